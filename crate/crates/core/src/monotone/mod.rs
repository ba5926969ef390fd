//! Monotone functions `[0, ∞] → [-∞, ∞]` with exact generalized inverses.
//!
//! A [`MonotoneFn`] is one of:
//!
//! * a piecewise-linear function given by knots with left/right values, so
//!   jumps and plateaus are first-class (see [`piecewise`]);
//! * a closed-form family: constants, powers `c·t^p`, exponentials of powers
//!   `exp(t^p)`, affine maps and affine-log maps (see [`analytic`]);
//! * a lazy composition `outer ∘ inner`, evaluated on demand with exact
//!   structural access to knots and jumps;
//! * the generalized inverse of another function.
//!
//! The generalized inverse of a non-decreasing `f` is
//! `g(τ) = inf { t : f(t) ≥ τ }`, of a non-increasing `f` is
//! `g(τ) = inf { t : f(t) ≤ τ }`, with `inf ∅ = ∞`. For piecewise-linear
//! functions the inverse is materialized exactly; for closed-form families it
//! is evaluated by the family's closed form; all other shapes fall back to
//! monotone bisection at `f64` resolution.
//!
//! Evaluation at a jump knot returns the right limit for user-constructed
//! functions. Inverses instead carry the value dictated by the infimum
//! definition, which at a jump of the inverse is the smaller of the two
//! one-sided limits. The flag [`piecewise::KnotSide`] records which
//! convention a piecewise function uses.

mod analytic;
mod laws;
mod piecewise;
mod recognize;
mod text;

pub use analytic::Family;
pub use laws::{
    check_composition_laws, check_convexity, ConvexityReport, ConvexityWitness, LawReport,
    StrictPoint,
};
pub use piecewise::{Knot, KnotSide, Piecewise};
pub use recognize::GaugeExprError;
pub use text::ParseTextError;

use crate::ext::{ExtReal, ExtSigned};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MonotoneError {
    #[error("knot abscissae must start at 0 and strictly increase (knot {index} at t = {t})")]
    BadKnots { index: usize, t: f64 },
    #[error("values are not monotone in one direction (knot {index})")]
    NotMonotone { index: usize },
    #[error("segment between knots {index} and {next} interpolates a non-finite value")]
    NonFiniteSegment { index: usize, next: usize },
    #[error("value at infinity breaks monotonicity")]
    BadTailValue,
    #[error("piecewise function needs at least one knot")]
    Empty,
    #[error("{what} must be {requirement}, got {value}")]
    BadParameter {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("inner function of a composition must take values in [0, ∞]")]
    InnerNotNonNegative,
    #[error("generalized inverse requires values in [0, ∞]")]
    NegativeValues,
    #[error("expected a sense-reversing bijection of [0, ∞]: {reason}")]
    NotReversingBijection { reason: &'static str },
}

/// Monotonicity class. Constant functions are represented as non-decreasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::NonDecreasing => Direction::NonIncreasing,
            Direction::NonIncreasing => Direction::NonDecreasing,
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Piecewise(Piecewise),
    Analytic(Family),
    Composed {
        outer: Box<MonotoneFn>,
        inner: Box<MonotoneFn>,
    },
    InverseOf(Box<MonotoneFn>),
}

/// A monotone function on `[0, ∞]`.
#[derive(Clone, Debug)]
pub struct MonotoneFn {
    repr: Repr,
}

/// A maximal interval of constancy, with endpoint openness and the value
/// taken there. `hi` may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constancy {
    pub lo: f64,
    pub hi: f64,
    pub closed_lo: bool,
    pub closed_hi: bool,
    pub value: f64,
}

impl Constancy {
    /// Whether `t` lies in the interval.
    pub fn contains(&self, t: f64) -> bool {
        let above = if self.closed_lo { t >= self.lo } else { t > self.lo };
        let below = if self.closed_hi { t <= self.hi } else { t < self.hi };
        above && below
    }

    /// Whether `t` lies strictly between the endpoints.
    pub fn contains_interior(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }
}

/// A jump discontinuity: one-sided limits on each side of `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpPoint {
    pub t: f64,
    pub before: f64,
    pub after: f64,
}

impl MonotoneFn {
    // -- constructors -------------------------------------------------------

    /// Piecewise-linear function from `(t, value)` pairs. A repeated abscissa
    /// introduces a jump: the first occurrence is the left limit, the second
    /// the right limit. The first abscissa must be 0. `at_inf` defaults to
    /// the last value.
    pub fn from_pairs(pairs: &[(f64, f64)], at_inf: Option<f64>) -> Result<Self, MonotoneError> {
        let pl = Piecewise::from_pairs(pairs, at_inf, KnotSide::Right)?;
        Ok(MonotoneFn {
            repr: Repr::Piecewise(pl),
        })
    }

    pub fn from_piecewise(pl: Piecewise) -> Self {
        MonotoneFn {
            repr: Repr::Piecewise(pl),
        }
    }

    pub fn constant(c: f64) -> Self {
        MonotoneFn {
            repr: Repr::Analytic(Family::Constant(c)),
        }
    }

    /// `t^p`, `p != 0`. Non-decreasing for `p > 0`, non-increasing otherwise.
    pub fn power(p: f64) -> Result<Self, MonotoneError> {
        Self::scaled_power(1.0, p)
    }

    /// `c · t^p` with `c > 0` finite and `p != 0`.
    pub fn scaled_power(c: f64, p: f64) -> Result<Self, MonotoneError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(MonotoneError::BadParameter {
                what: "scale",
                requirement: "finite and positive",
                value: c,
            });
        }
        if p == 0.0 || !p.is_finite() {
            return Err(MonotoneError::BadParameter {
                what: "exponent",
                requirement: "finite and nonzero",
                value: p,
            });
        }
        Ok(MonotoneFn {
            repr: Repr::Analytic(Family::ScaledPower { c, p }),
        })
    }

    /// `exp(t)`.
    pub fn exp() -> Self {
        MonotoneFn {
            repr: Repr::Analytic(Family::ExpPow { p: 1.0 }),
        }
    }

    /// `exp(t^p)` with `p > 0`.
    pub fn exp_pow(p: f64) -> Result<Self, MonotoneError> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(MonotoneError::BadParameter {
                what: "exponent",
                requirement: "finite and positive",
                value: p,
            });
        }
        Ok(MonotoneFn {
            repr: Repr::Analytic(Family::ExpPow { p }),
        })
    }

    /// `a + b·t` with `b != 0`.
    pub fn affine(a: f64, b: f64) -> Result<Self, MonotoneError> {
        if b == 0.0 || !b.is_finite() || !a.is_finite() {
            return Err(MonotoneError::BadParameter {
                what: "affine coefficient",
                requirement: "finite with nonzero slope",
                value: b,
            });
        }
        Ok(MonotoneFn {
            repr: Repr::Analytic(Family::Affine { a, b }),
        })
    }

    /// `a + b·ln t` with `b != 0`.
    pub fn affine_log(a: f64, b: f64) -> Result<Self, MonotoneError> {
        if b == 0.0 || !b.is_finite() || !a.is_finite() {
            return Err(MonotoneError::BadParameter {
                what: "affine-log coefficient",
                requirement: "finite with nonzero slope",
                value: b,
            });
        }
        Ok(MonotoneFn {
            repr: Repr::Analytic(Family::AffineLog { a, b }),
        })
    }

    /// `ln t`.
    pub fn log_map() -> Self {
        MonotoneFn {
            repr: Repr::Analytic(Family::AffineLog { a: 0.0, b: 1.0 }),
        }
    }

    /// The identity `t`.
    pub fn identity() -> Self {
        MonotoneFn {
            repr: Repr::Analytic(Family::ScaledPower { c: 1.0, p: 1.0 }),
        }
    }

    /// `1/t`, the canonical sense-reversing bijection of `[0, ∞]`.
    pub fn reciprocal_map() -> Self {
        MonotoneFn {
            repr: Repr::Analytic(Family::ScaledPower { c: 1.0, p: -1.0 }),
        }
    }

    /// `outer ∘ inner`. The inner function must take values in `[0, ∞]`.
    pub fn compose(outer: MonotoneFn, inner: MonotoneFn) -> Result<Self, MonotoneError> {
        if !inner.is_nonnegative() {
            return Err(MonotoneError::InnerNotNonNegative);
        }
        Ok(MonotoneFn {
            repr: Repr::Composed {
                outer: Box::new(outer),
                inner: Box::new(inner),
            },
        })
    }

    /// `1 / f`, the reciprocal conjugate. Requires `f ≥ 0`.
    pub fn reciprocal_of(f: MonotoneFn) -> Result<Self, MonotoneError> {
        Self::compose(Self::reciprocal_map(), f)
    }

    /// `log ∘ self`, simplified to an exact closed form where one exists:
    /// `log(exp(g)) = g`, `log(exp(t^p)) ∘ g = g^p`, `log(c·t^p) = ln c +
    /// p·ln t`, `log(exp(t^p)) = t^p`, `log c = ln c`. The simplifications
    /// matter numerically: they keep the result finite even where the base
    /// function overflows `f64`.
    pub fn logarithm(&self) -> Result<MonotoneFn, MonotoneError> {
        if !self.is_nonnegative() {
            return Err(MonotoneError::NegativeValues);
        }
        match &self.repr {
            Repr::Analytic(Family::ExpPow { p }) => Self::power(*p),
            Repr::Analytic(Family::ScaledPower { c, p }) => Self::affine_log(c.ln(), *p),
            Repr::Analytic(Family::Constant(c)) => Ok(Self::constant(c.ln())),
            Repr::Composed { outer, inner } => {
                if let Repr::Analytic(Family::ExpPow { p }) = &outer.repr {
                    if *p == 1.0 {
                        Ok((**inner).clone())
                    } else {
                        Self::compose(Self::power(*p)?, (**inner).clone())
                    }
                } else {
                    Self::compose(Self::log_map(), self.clone())
                }
            }
            _ => Self::compose(Self::log_map(), self.clone()),
        }
    }

    // -- structure ----------------------------------------------------------

    pub fn direction(&self) -> Direction {
        match &self.repr {
            Repr::Piecewise(pl) => pl.direction(),
            Repr::Analytic(f) => f.direction(),
            Repr::Composed { outer, inner } => {
                if outer.direction() == inner.direction() {
                    Direction::NonDecreasing
                } else {
                    Direction::NonIncreasing
                }
            }
            // The generalized inverse preserves the monotonicity class.
            Repr::InverseOf(f) => f.direction(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.repr {
            Repr::Piecewise(pl) => pl.is_constant(),
            Repr::Analytic(f) => matches!(f, Family::Constant(_)),
            Repr::Composed { outer, inner } => outer.is_constant() || inner.is_constant(),
            Repr::InverseOf(_) => false,
        }
    }

    /// Value at `t = 0` (right-limit convention at a jump there).
    pub fn at_zero(&self) -> f64 {
        self.eval_f64(0.0)
    }

    /// Value at `t = ∞`, stored explicitly and never extrapolated.
    pub fn at_infinity(&self) -> f64 {
        self.eval_f64(f64::INFINITY)
    }

    /// Whether every value lies in `[0, ∞]`.
    pub fn is_nonnegative(&self) -> bool {
        match &self.repr {
            Repr::InverseOf(_) => true,
            _ => {
                let low = match self.direction() {
                    Direction::NonDecreasing => self.at_zero(),
                    Direction::NonIncreasing => self.at_infinity(),
                };
                low >= 0.0
            }
        }
    }

    // -- evaluation ---------------------------------------------------------

    pub fn eval(&self, t: ExtReal) -> ExtSigned {
        ExtSigned::of(self.eval_f64(t.get()))
    }

    /// Raw evaluation; `t` must lie in `[0, ∞]` (`f64::INFINITY` allowed).
    pub fn eval_f64(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0 && !t.is_nan());
        match &self.repr {
            Repr::Piecewise(pl) => pl.eval(t),
            Repr::Analytic(f) => f.eval(t),
            Repr::Composed { outer, inner } => {
                // Rounding can push a nominally nonnegative inner value a hair
                // below zero; clamp rather than feed a bad point to `outer`.
                outer.eval_f64(inner.eval_f64(t).max(0.0))
            }
            Repr::InverseOf(f) => f.infimum_inverse_at(t),
        }
    }

    // -- generalized inverse ------------------------------------------------

    /// The generalized inverse. Errors when the function takes negative
    /// values, since the inverse would then live on the wrong domain.
    pub fn inverse(&self) -> Result<MonotoneFn, MonotoneError> {
        if !self.is_nonnegative() {
            return Err(MonotoneError::NegativeValues);
        }
        let repr = match &self.repr {
            Repr::Piecewise(pl) => Repr::Piecewise(pl.inverse()),
            _ => Repr::InverseOf(Box::new(self.clone())),
        };
        Ok(MonotoneFn { repr })
    }

    /// `inf { t : self(t) ≥ τ }` (non-decreasing) or `inf { t : self(t) ≤ τ }`
    /// (non-increasing), resolved per representation: exact for piecewise and
    /// closed-form families, monotone bisection otherwise.
    pub fn infimum_inverse_at(&self, tau: f64) -> f64 {
        // The endpoint targets are resolved structurally: a bisection probe
        // would confuse f64 overflow (`(2t)³ = ∞` from t ≈ 2.8e102) with a
        // genuine excursion to ∞ and report a spurious finite infimum.
        if tau == f64::INFINITY && self.direction() == Direction::NonDecreasing {
            return self.infinity_onset();
        }
        if tau == 0.0 && self.direction() == Direction::NonIncreasing {
            return self.vanishing_onset();
        }
        match &self.repr {
            Repr::Piecewise(pl) => pl.infimum_inverse(tau, false),
            Repr::Analytic(f) => f.inverse_eval(tau).unwrap_or_else(|| self.bisect_inverse(tau)),
            _ => self.bisect_inverse(tau),
        }
    }

    /// Whether the defining predicate of the inverse holds at `t`.
    fn inverse_pred(&self, t: f64, tau: f64) -> bool {
        match self.direction() {
            Direction::NonDecreasing => self.eval_f64(t) >= tau,
            Direction::NonIncreasing => self.eval_f64(t) <= tau,
        }
    }

    /// Monotone bisection for the infimum, exact at the endpoints and
    /// accurate to a relative `f64` ulp elsewhere.
    fn bisect_inverse(&self, tau: f64) -> f64 {
        if self.inverse_pred(0.0, tau) {
            return 0.0;
        }
        // Bracket an upper end with the predicate true at finite t.
        let mut hi = 1.0;
        let mut lo = 0.0;
        while hi < 1e300 {
            if self.inverse_pred(hi, tau) {
                break;
            }
            lo = hi;
            hi *= 65536.0;
        }
        if !self.inverse_pred(hi, tau) {
            // No finite witness: the set is empty or {∞}; either way inf = ∞.
            return f64::INFINITY;
        }
        // Walk the bracket down so both ends are positive, then bisect the
        // exponent. 200 rounds drive the ratio hi/lo to within one ulp.
        if lo == 0.0 {
            let mut probe = hi;
            loop {
                probe /= 65536.0;
                if probe < 1e-300 {
                    // Predicate holds arbitrarily close to 0 but not at 0.
                    return 0.0;
                }
                if self.inverse_pred(probe, tau) {
                    hi = probe;
                } else {
                    lo = probe;
                    break;
                }
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.inverse_pred(mid, tau) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    // -- structural queries used by quadrature ------------------------------

    /// Interior points where the function can change analytic form, clipped
    /// to `(a, b)`. Quadrature panels should not straddle these.
    pub fn breakpoints_within(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        self.collect_breakpoints(a, b, &mut pts);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn collect_breakpoints(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        match &self.repr {
            Repr::Piecewise(pl) => {
                for k in pl.knots() {
                    if k.t > a && k.t < b {
                        out.push(k.t);
                    }
                }
            }
            Repr::Analytic(_) => {}
            Repr::Composed { outer, inner } => {
                inner.collect_breakpoints(a, b, out);
                // Preimages of the outer function's breakpoints.
                let big = 1e308;
                let lo = inner.eval_f64(a).min(inner.eval_f64(b)).max(0.0);
                let hi = inner.eval_f64(a).max(inner.eval_f64(b));
                for v in outer.breakpoints_within(lo, hi.min(big)) {
                    let g = MonotoneFn {
                        repr: Repr::InverseOf(Box::new((**inner).clone())),
                    };
                    let t = g.eval_f64(v.max(0.0));
                    if t > a && t < b && t.is_finite() {
                        out.push(t);
                    }
                }
            }
            Repr::InverseOf(f) => {
                // Kinks of the inverse sit at the images of f's kinks.
                for t in f.breakpoints_within(0.0, f64::INFINITY) {
                    let v = f.eval_f64(t);
                    if v > a && v < b && v.is_finite() {
                        out.push(v);
                    }
                }
            }
        }
    }

    /// Jump discontinuities with `t` in `(a, b]`, as one-sided limits.
    pub fn jumps_within(&self, a: f64, b: f64) -> Vec<JumpPoint> {
        match &self.repr {
            Repr::Piecewise(pl) => pl.jumps_within(a, b),
            Repr::Analytic(_) => Vec::new(),
            Repr::Composed { outer, inner } => {
                // Only continuous outer functions arise here in practice; a
                // jump of the composition then sits at each jump of `inner`.
                inner
                    .jumps_within(a, b)
                    .into_iter()
                    .map(|j| JumpPoint {
                        t: j.t,
                        before: outer.eval_f64(j.before.max(0.0)),
                        after: outer.eval_f64(j.after.max(0.0)),
                    })
                    .filter(|j| j.before != j.after)
                    .collect()
            }
            Repr::InverseOf(f) => {
                // Jumps of the inverse come from plateaus of the base.
                let mut out = Vec::new();
                for c in f.constancy_intervals() {
                    let v = c.value;
                    if v > a && v <= b && v.is_finite() {
                        let before = if c.lo == 0.0 { 0.0 } else { c.lo };
                        out.push(JumpPoint {
                            t: v,
                            before,
                            after: if c.hi.is_finite() { c.hi } else { f64::INFINITY },
                        });
                    }
                }
                out
            }
        }
    }

    /// Density of the absolutely continuous part at `t` (a local slope).
    /// At a knot the right-hand slope is reported; jump mass is carried
    /// separately by [`Self::jumps_within`].
    pub fn density(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Piecewise(pl) => pl.slope_at(t),
            Repr::Analytic(f) => f.derivative(t),
            Repr::Composed { outer, inner } => {
                let v = inner.eval_f64(t).max(0.0);
                outer.density(v) * inner.density(t)
            }
            Repr::InverseOf(_) => {
                // Central difference; exotic shape, used only as a fallback.
                let h = (t.abs() * 1e-6).max(1e-9);
                let lo = (t - h).max(0.0);
                (self.eval_f64(t + h) - self.eval_f64(lo)) / (t + h - lo)
            }
        }
    }

    /// Maximal intervals of constancy.
    pub fn constancy_intervals(&self) -> Vec<Constancy> {
        match &self.repr {
            Repr::Piecewise(pl) => pl.constancy_intervals(),
            Repr::Analytic(f) => f.constancy_intervals(),
            Repr::Composed { outer, inner } => {
                let mut out = Vec::new();
                // Plateaus of the inner function survive composition.
                for c in inner.constancy_intervals() {
                    out.push(Constancy {
                        value: outer.eval_f64(c.value.max(0.0)),
                        ..c
                    });
                }
                // Preimages of outer plateaus under the inner function.
                let g = MonotoneFn {
                    repr: Repr::InverseOf(Box::new((**inner).clone())),
                };
                for c in outer.constancy_intervals() {
                    let mut lo = g.eval_f64(c.lo.max(0.0));
                    let mut hi = if c.hi.is_finite() {
                        g.eval_f64(c.hi)
                    } else {
                        f64::INFINITY
                    };
                    if inner.direction() == Direction::NonIncreasing {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    if hi > lo {
                        out.push(Constancy {
                            lo,
                            hi,
                            closed_lo: true,
                            closed_hi: true,
                            value: c.value,
                        });
                    }
                }
                out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
                out
            }
            Repr::InverseOf(f) => f.inverse_constancy(),
        }
    }

    /// Plateaus of `self⁻¹`, derived from jumps and range gaps of `self`.
    fn inverse_constancy(&self) -> Vec<Constancy> {
        let mut out = Vec::new();
        let dir = self.direction();
        // Initial plateau: the inverse is 0 up to the value at the domain end
        // where the infimum predicate first holds.
        let v0 = self.at_zero();
        match dir {
            Direction::NonDecreasing => {
                if v0 > 0.0 {
                    out.push(Constancy {
                        lo: 0.0,
                        hi: v0.min(f64::INFINITY),
                        closed_lo: true,
                        closed_hi: true,
                        value: 0.0,
                    });
                }
                // Jumps of self produce interior plateaus of the inverse.
                for j in self.jumps_within(0.0, f64::INFINITY) {
                    if j.after > j.before {
                        out.push(Constancy {
                            lo: j.before,
                            hi: j.after,
                            closed_lo: false,
                            closed_hi: true,
                            value: j.t,
                        });
                    }
                }
            }
            Direction::NonIncreasing => {
                if v0.is_finite() {
                    out.push(Constancy {
                        lo: v0,
                        hi: f64::INFINITY,
                        closed_lo: true,
                        closed_hi: true,
                        value: 0.0,
                    });
                }
                for j in self.jumps_within(0.0, f64::INFINITY) {
                    if j.after < j.before {
                        out.push(Constancy {
                            lo: j.after,
                            hi: j.before,
                            closed_lo: true,
                            closed_hi: false,
                            value: j.t,
                        });
                    }
                }
            }
        }
        out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        out
    }

    // -- derived landmarks --------------------------------------------------

    /// `sup { t : f(t) = 0 }` for a nonnegative non-decreasing `f`; 0 when
    /// `f(0) > 0`.
    pub fn zero_set_sup(&self) -> f64 {
        match self.direction() {
            Direction::NonDecreasing => self.nonpositive_region_sup(),
            Direction::NonIncreasing => {
                if self.at_zero() > 0.0 {
                    0.0
                } else {
                    infimum_of_predicate(|t| self.eval_f64(t) > 0.0)
                }
            }
        }
    }

    /// Right edge of the initial constancy interval: `sup { t : f(t) = f(0) }`.
    pub fn initial_plateau_end(&self) -> f64 {
        let v0 = self.at_zero();
        if let Repr::Piecewise(pl) = &self.repr {
            // The strict infimum walk is exact in either direction.
            return pl.infimum_inverse(v0, true);
        }
        match self.direction() {
            Direction::NonDecreasing => infimum_of_predicate(|t| self.eval_f64(t) > v0),
            Direction::NonIncreasing => infimum_of_predicate(|t| self.eval_f64(t) < v0),
        }
    }

    /// `inf { t : f(t) = +∞ }`, or ∞ when the function never reaches ∞.
    /// Resolved structurally, so a value that merely overflows `f64` at huge
    /// arguments does not count as an excursion to ∞.
    pub fn infinity_onset(&self) -> f64 {
        if self.direction() == Direction::NonIncreasing {
            // A non-increasing function is infinite on an initial interval
            // (possibly just {0}) or nowhere.
            return if self.at_zero() == f64::INFINITY {
                0.0
            } else {
                f64::INFINITY
            };
        }
        if self.at_infinity() < f64::INFINITY {
            return f64::INFINITY;
        }
        match &self.repr {
            Repr::Piecewise(pl) => pl.infimum_inverse(f64::INFINITY, false),
            // Every closed-form family is finite at finite arguments except a
            // constant pinned at ∞.
            Repr::Analytic(f) => match f {
                Family::Constant(c) if *c == f64::INFINITY => 0.0,
                _ => f64::INFINITY,
            },
            Repr::Composed { outer, inner } => {
                if inner.direction() == Direction::NonDecreasing {
                    let onset = outer.infinity_onset();
                    if onset == f64::INFINITY {
                        inner.infinity_onset()
                    } else {
                        // Where the inner value first enters the region on
                        // which the outer function is infinite.
                        inner.infimum_inverse_at(onset)
                    }
                } else {
                    // Both parts non-increasing: the outer function is ∞ on a
                    // left neighborhood of 0 that the inner value falls into.
                    if outer.at_zero() != f64::INFINITY {
                        f64::INFINITY
                    } else {
                        inner.infimum_inverse_at(outer.finite_onset_down())
                    }
                }
            }
            // The inverse of f is ∞ from the supremum of f's range on; the
            // bracketed bisection never overflows in the domain variable.
            Repr::InverseOf(_) => {
                infimum_of_predicate(|t| self.eval_f64(t) == f64::INFINITY)
            }
        }
    }

    /// `inf { t : f(t) ≤ 0 }` for a non-increasing `f` (∞ when `f` stays
    /// positive), resolved structurally for the same reason as
    /// [`Self::infinity_onset`]: `1/t²` underflows to 0 from t ≈ 1.3e154.
    fn vanishing_onset(&self) -> f64 {
        debug_assert_eq!(self.direction(), Direction::NonIncreasing);
        if self.at_zero() <= 0.0 {
            return 0.0;
        }
        if self.at_infinity() > 0.0 {
            return f64::INFINITY;
        }
        match &self.repr {
            Repr::Piecewise(pl) => pl.infimum_inverse(0.0, false),
            Repr::Analytic(f) => f
                .inverse_eval(0.0)
                .unwrap_or_else(|| infimum_of_predicate(|t| self.eval_f64(t) <= 0.0)),
            Repr::Composed { outer, inner } => {
                if outer.direction() == Direction::NonIncreasing {
                    // outer(v) ≤ 0 from v = outer.vanishing_onset() on, and
                    // the non-decreasing inner value first reaches it at:
                    inner.infimum_inverse_at(outer.vanishing_onset())
                } else {
                    // Non-decreasing outer ≤ 0 on an initial value interval;
                    // the non-increasing inner value first drops into it at:
                    inner.infimum_inverse_at(outer.nonpositive_region_sup())
                }
            }
            // g(τ) = inf { t : base(t) ≤ τ } hits 0 exactly from τ = base(0).
            Repr::InverseOf(base) => base.at_zero(),
        }
    }

    /// For a non-increasing `f` with `f(0) = ∞`: `inf { t : f(t) < ∞ }`, the
    /// right edge of its infinite initial region.
    fn finite_onset_down(&self) -> f64 {
        debug_assert_eq!(self.direction(), Direction::NonIncreasing);
        if self.at_zero() != f64::INFINITY {
            return 0.0;
        }
        if let Repr::Piecewise(pl) = &self.repr {
            return pl.infimum_inverse(f64::INFINITY, true);
        }
        infimum_of_predicate(|t| self.eval_f64(t) < f64::INFINITY)
    }

    /// For a non-decreasing `f`: `sup { t : f(t) ≤ 0 }`, with 0 when `f` is
    /// positive from the start. Resolved structurally where the
    /// representation allows: a bisection probe would mistake `f64`
    /// underflow of a positive value for a genuine zero (`t^2.3` underflows
    /// from t ≈ 1e-134).
    fn nonpositive_region_sup(&self) -> f64 {
        debug_assert_eq!(self.direction(), Direction::NonDecreasing);
        if self.at_zero() > 0.0 {
            return 0.0;
        }
        if self.at_infinity() <= 0.0 {
            return f64::INFINITY;
        }
        match &self.repr {
            Repr::Piecewise(pl) => pl.infimum_inverse(0.0, true),
            Repr::Analytic(f) => f
                .inverse_eval(0.0)
                .unwrap_or_else(|| infimum_of_predicate(|t| self.eval_f64(t) > 0.0)),
            Repr::Composed { outer, inner } => {
                if inner.direction() == Direction::NonDecreasing {
                    if outer.nonpositive_region_sup() == 0.0 {
                        // The outer part is positive away from 0, so the
                        // composed value is nonpositive exactly while the
                        // inner one is.
                        return inner.nonpositive_region_sup();
                    }
                } else {
                    let w = outer.vanishing_onset();
                    if w == f64::INFINITY {
                        // The outer part only vanishes at ∞, which the
                        // falling inner value can only hold on its initial
                        // infinite stretch.
                        return inner.finite_onset_down();
                    }
                    if w == 0.0 {
                        // Nonpositive for every positive inner value.
                        return inner.vanishing_onset();
                    }
                }
                // The nonpositive region's edge sits at a positive inner
                // value, where underflow cannot masquerade as zero.
                infimum_of_predicate(|t| self.eval_f64(t) > 0.0)
            }
            // g(τ) = inf { t : base(t) ≥ τ } stays at 0 up to τ = base(0).
            Repr::InverseOf(base) => base.at_zero().max(0.0),
        }
    }
}

/// Infimum of a monotone (up-set) predicate over `[0, ∞)`, by geometric
/// bracketing and log-space bisection. Returns ∞ when no finite point
/// satisfies the predicate (then the infimum over `[0, ∞]` is ∞ as well).
fn infimum_of_predicate(pred: impl Fn(f64) -> bool) -> f64 {
    if pred(0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while hi < 1e300 && !pred(hi) {
        lo = hi;
        hi *= 65536.0;
    }
    if !pred(hi) {
        return f64::INFINITY;
    }
    if lo == 0.0 {
        let mut probe = hi;
        loop {
            probe /= 65536.0;
            if probe < 1e-300 {
                return 0.0;
            }
            if pred(probe) {
                hi = probe;
            } else {
                lo = probe;
                break;
            }
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_combine_under_composition() {
        let inc = MonotoneFn::power(2.0).unwrap();
        let dec = MonotoneFn::power(-1.0).unwrap();
        let a = MonotoneFn::compose(dec.clone(), inc.clone()).unwrap();
        assert_eq!(a.direction(), Direction::NonIncreasing);
        let b = MonotoneFn::compose(dec.clone(), dec.clone()).unwrap();
        assert_eq!(b.direction(), Direction::NonDecreasing);
        let c = MonotoneFn::compose(inc.clone(), dec).unwrap();
        assert_eq!(c.direction(), Direction::NonIncreasing);
        let d = MonotoneFn::compose(inc.clone(), inc).unwrap();
        assert_eq!(d.direction(), Direction::NonDecreasing);
    }

    #[test]
    fn compose_rejects_signed_inner() {
        let log = MonotoneFn::log_map();
        let id = MonotoneFn::identity();
        assert_eq!(
            MonotoneFn::compose(id, log).unwrap_err(),
            MonotoneError::InnerNotNonNegative
        );
    }

    #[test]
    fn log_of_exp_is_identity_on_values() {
        let h = MonotoneFn::compose(MonotoneFn::log_map(), MonotoneFn::exp()).unwrap();
        for t in [0.0, 0.3, 1.0, 7.5, 300.0] {
            assert!((h.eval_f64(t) - t).abs() <= 1e-12 * t.max(1.0));
        }
        assert_eq!(h.eval_f64(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn inverse_rejects_signed_values() {
        let log = MonotoneFn::log_map();
        assert_eq!(log.inverse().unwrap_err(), MonotoneError::NegativeValues);
        let aff = MonotoneFn::affine(-1.0, 1.0).unwrap();
        assert_eq!(aff.inverse().unwrap_err(), MonotoneError::NegativeValues);
    }

    #[test]
    fn inverse_of_composed_by_bisection() {
        // f = (2t)^3 is strictly increasing; inverse should be τ ↦ τ^{1/3}/2.
        let f = MonotoneFn::compose(
            MonotoneFn::power(3.0).unwrap(),
            MonotoneFn::scaled_power(2.0, 1.0).unwrap(),
        )
        .unwrap();
        let g = f.inverse().unwrap();
        for tau in [0.0f64, 0.5, 1.0, 8.0, 1e6] {
            let expect = tau.powf(1.0 / 3.0) / 2.0;
            let got = g.eval_f64(tau);
            assert!(
                (got - expect).abs() <= 1e-12 * expect.max(1.0),
                "tau={tau}: got {got}, expected {expect}"
            );
        }
        assert_eq!(g.eval_f64(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn landmarks_on_a_delayed_ramp() {
        // f = 0 on [0,1], then rises with slope 1.
        let f = MonotoneFn::from_pairs(&[(0.0, 0.0), (1.0, 0.0), (5.0, 4.0)], None).unwrap();
        assert!((f.zero_set_sup() - 1.0).abs() < 1e-9);
        assert!((f.initial_plateau_end() - 1.0).abs() < 1e-9);
        assert_eq!(f.infinity_onset(), f64::INFINITY);
        // A positive constant has zero_set_sup 0.
        let c = MonotoneFn::constant(3.0);
        assert_eq!(c.zero_set_sup(), 0.0);
    }
}
