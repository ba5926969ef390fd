//! Piecewise-linear monotone functions with jumps.
//!
//! A [`Piecewise`] holds knots with strictly increasing abscissae starting at
//! `t = 0`, a left and a right value per knot, and an explicit value at ∞.
//! Between consecutive knots the function interpolates linearly from the right
//! value of the earlier knot to the left value of the later one; past the last
//! knot it is constant. Endpoint values are stored, never extrapolated.
//!
//! The value taken *at* a jump knot is a convention, recorded per function by
//! [`KnotSide`]: user-built functions return the right limit; inverses return
//! the value forced by the infimum definition, which is the smaller of the two
//! limits. The infimum itself never depends on the choice.

use super::{Constancy, Direction, JumpPoint, MonotoneError};

/// Which value `eval` returns exactly at a knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnotSide {
    /// Right limit: the convention for user-constructed functions.
    Right,
    /// The smaller of the one-sided limits: forced at jumps of an inverse.
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

#[derive(Clone, Debug)]
pub struct Piecewise {
    knots: Vec<Knot>,
    at_inf: f64,
    side: KnotSide,
    dir: Direction,
}

impl Piecewise {
    pub fn new(knots: Vec<Knot>, at_inf: f64, side: KnotSide) -> Result<Self, MonotoneError> {
        if knots.is_empty() {
            return Err(MonotoneError::Empty);
        }
        if knots[0].t != 0.0 {
            return Err(MonotoneError::BadKnots {
                index: 0,
                t: knots[0].t,
            });
        }
        for (i, k) in knots.iter().enumerate() {
            if !k.t.is_finite() {
                return Err(MonotoneError::BadKnots { index: i, t: k.t });
            }
            if i > 0 && !(k.t > knots[i - 1].t) {
                return Err(MonotoneError::BadKnots { index: i, t: k.t });
            }
            if k.left.is_nan() || k.right.is_nan() {
                return Err(MonotoneError::NotMonotone { index: i });
            }
        }
        if at_inf.is_nan() {
            return Err(MonotoneError::BadTailValue);
        }
        // Interpolated segments need finite endpoints unless they are flat.
        for i in 0..knots.len() - 1 {
            let a = knots[i].right;
            let b = knots[i + 1].left;
            if a != b && !(a.is_finite() && b.is_finite()) {
                return Err(MonotoneError::NonFiniteSegment { index: i, next: i + 1 });
            }
        }
        let dir = infer_direction(&knots, at_inf)?;
        Ok(Piecewise {
            knots,
            at_inf,
            side,
            dir,
        })
    }

    /// Builds from `(t, value)` pairs; a repeated abscissa is a jump (first
    /// occurrence = left limit, second = right limit).
    pub fn from_pairs(
        pairs: &[(f64, f64)],
        at_inf: Option<f64>,
        side: KnotSide,
    ) -> Result<Self, MonotoneError> {
        let mut knots: Vec<Knot> = Vec::new();
        for (i, &(t, v)) in pairs.iter().enumerate() {
            match knots.last_mut() {
                Some(k) if k.t == t => {
                    if k.left != k.right {
                        // Three values at one abscissa.
                        return Err(MonotoneError::BadKnots { index: i, t });
                    }
                    k.right = v;
                }
                _ => knots.push(Knot {
                    t,
                    left: v,
                    right: v,
                }),
            }
        }
        let tail = at_inf.unwrap_or_else(|| knots.last().map_or(f64::NAN, |k| k.right));
        Self::new(knots, tail, side)
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn at_infinity(&self) -> f64 {
        self.at_inf
    }

    pub fn side(&self) -> KnotSide {
        self.side
    }

    pub fn direction(&self) -> Direction {
        self.dir
    }

    pub fn is_constant(&self) -> bool {
        let v = self.knots[0].left;
        self.at_inf == v
            && self
                .knots
                .iter()
                .all(|k| k.left == v && k.right == v)
    }

    fn knot_value(&self, i: usize) -> f64 {
        let k = &self.knots[i];
        match self.side {
            KnotSide::Right => k.right,
            KnotSide::Min => k.left.min(k.right),
        }
    }

    /// Index of the last knot with abscissa `<= t`.
    fn locate(&self, t: f64) -> usize {
        self.knots.partition_point(|k| k.t <= t) - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t.is_infinite() {
            return self.at_inf;
        }
        let i = self.locate(t);
        let k = &self.knots[i];
        if k.t == t {
            return self.knot_value(i);
        }
        if i + 1 == self.knots.len() {
            return k.right;
        }
        let n = &self.knots[i + 1];
        if k.right == n.left {
            k.right
        } else {
            k.right + (t - k.t) / (n.t - k.t) * (n.left - k.right)
        }
    }

    /// Local slope. At a knot the slope of the following piece is reported;
    /// on flat or tail pieces it is 0.
    pub fn slope_at(&self, t: f64) -> f64 {
        if t.is_infinite() {
            return 0.0;
        }
        let i = self.locate(t);
        if i + 1 == self.knots.len() {
            return 0.0;
        }
        let k = &self.knots[i];
        let n = &self.knots[i + 1];
        if k.right == n.left {
            0.0
        } else {
            (n.left - k.right) / (n.t - k.t)
        }
    }

    pub fn jumps_within(&self, a: f64, b: f64) -> Vec<JumpPoint> {
        self.knots
            .iter()
            .filter(|k| k.t > a && k.t <= b && k.left != k.right)
            .map(|k| JumpPoint {
                t: k.t,
                before: k.left,
                after: k.right,
            })
            .collect()
    }

    /// `inf { t : f(t) ≥ τ }` (non-decreasing) or `inf { t : f(t) ≤ τ }`
    /// (non-increasing); with `strict`, the inequality is strict. Exact: the
    /// walk visits knots, open segments, the constant tail and the point ∞ in
    /// order and returns the first location where the predicate can hold.
    pub fn infimum_inverse(&self, tau: f64, strict: bool) -> f64 {
        match self.dir {
            Direction::NonDecreasing => self.infimum_up(tau, strict),
            Direction::NonIncreasing => self.infimum_down(tau, strict),
        }
    }

    fn infimum_up(&self, tau: f64, strict: bool) -> f64 {
        let hit = |v: f64| if strict { v > tau } else { v >= tau };
        let m = self.knots.len();
        for i in 0..m {
            if hit(self.knot_value(i)) {
                return self.knots[i].t;
            }
            let (a, va, vb, span) = if i + 1 < m {
                let k = &self.knots[i];
                let n = &self.knots[i + 1];
                (k.t, k.right, n.left, n.t - k.t)
            } else {
                let k = &self.knots[i];
                (k.t, k.right, k.right, f64::INFINITY)
            };
            if va == vb {
                // Flat open piece with value va.
                if hit(va) {
                    return a;
                }
            } else {
                // Strictly rising open piece, values in (va, vb): a solution
                // exists as soon as τ < vb, whether or not the comparison is
                // strict, and the first one is the crossing point.
                if tau < vb {
                    if tau <= va {
                        return a;
                    }
                    return a + (tau - va) / (vb - va) * span;
                }
            }
        }
        // Only the point ∞ remains; the infimum over {∞} and over ∅ is ∞.
        f64::INFINITY
    }

    fn infimum_down(&self, tau: f64, strict: bool) -> f64 {
        let hit = |v: f64| if strict { v < tau } else { v <= tau };
        let m = self.knots.len();
        for i in 0..m {
            if hit(self.knot_value(i)) {
                return self.knots[i].t;
            }
            let (a, va, vb, span) = if i + 1 < m {
                let k = &self.knots[i];
                let n = &self.knots[i + 1];
                (k.t, k.right, n.left, n.t - k.t)
            } else {
                let k = &self.knots[i];
                (k.t, k.right, k.right, f64::INFINITY)
            };
            if va == vb {
                if hit(va) {
                    return a;
                }
            } else {
                // Strictly falling open piece, values in (vb, va).
                if tau > vb {
                    if tau >= va {
                        return a;
                    }
                    return a + (va - tau) / (va - vb) * span;
                }
            }
        }
        f64::INFINITY
    }

    /// Exact generalized inverse. Knots sit at the stored values of `self`;
    /// one-sided limits at each come from the strict and non-strict infima.
    pub fn inverse(&self) -> Piecewise {
        let mut vals: Vec<f64> = vec![0.0];
        for (i, k) in self.knots.iter().enumerate() {
            for v in [k.left, k.right, self.knot_value(i)] {
                if v.is_finite() && v >= 0.0 {
                    vals.push(v);
                }
            }
        }
        if self.at_inf.is_finite() && self.at_inf >= 0.0 {
            vals.push(self.at_inf);
        }
        vals.sort_by(f64::total_cmp);
        vals.dedup();

        let knots: Vec<Knot> = vals
            .iter()
            .map(|&v| {
                let plain = self.infimum_inverse(v, false);
                let strict = self.infimum_inverse(v, true);
                match self.dir {
                    // Non-decreasing inverses are left-continuous; the right
                    // limit is the strict infimum. Mirrored when falling.
                    Direction::NonDecreasing => Knot {
                        t: v,
                        left: plain,
                        right: strict,
                    },
                    Direction::NonIncreasing => Knot {
                        t: v,
                        left: strict,
                        right: plain,
                    },
                }
            })
            .collect();
        let at_inf = self.infimum_inverse(f64::INFINITY, false);
        Piecewise::new(knots, at_inf, KnotSide::Min)
            .expect("inverse of a valid piecewise function is valid")
    }

    pub fn constancy_intervals(&self) -> Vec<Constancy> {
        #[derive(Clone, Copy)]
        struct Run {
            lo: f64,
            closed_lo: bool,
            hi: f64,
            closed_hi: bool,
            value: f64,
        }
        let mut out: Vec<Constancy> = Vec::new();
        let mut run: Option<Run> = None;
        let finish = |r: Option<Run>, out: &mut Vec<Constancy>| {
            if let Some(r) = r {
                if r.hi > r.lo {
                    out.push(Constancy {
                        lo: r.lo,
                        hi: r.hi,
                        closed_lo: r.closed_lo,
                        closed_hi: r.closed_hi,
                        value: r.value,
                    });
                }
            }
        };

        let m = self.knots.len();
        for i in 0..m {
            let t = self.knots[i].t;
            let v = self.knot_value(i);
            // The knot point itself.
            run = match run {
                Some(mut r) if r.value == v => {
                    r.hi = t;
                    r.closed_hi = true;
                    Some(r)
                }
                other => {
                    finish(other, &mut out);
                    Some(Run {
                        lo: t,
                        closed_lo: true,
                        hi: t,
                        closed_hi: true,
                        value: v,
                    })
                }
            };
            // The open piece that follows.
            let (va, vb, next_t) = if i + 1 < m {
                (
                    self.knots[i].right,
                    self.knots[i + 1].left,
                    self.knots[i + 1].t,
                )
            } else {
                (self.knots[i].right, self.knots[i].right, f64::INFINITY)
            };
            if va == vb {
                run = match run {
                    Some(mut r) if r.value == va => {
                        r.hi = next_t;
                        r.closed_hi = false;
                        Some(r)
                    }
                    other => {
                        finish(other, &mut out);
                        Some(Run {
                            lo: t,
                            closed_lo: false,
                            hi: next_t,
                            closed_hi: false,
                            value: va,
                        })
                    }
                };
            } else {
                finish(run.take(), &mut out);
            }
        }
        // The point at ∞.
        match run {
            Some(mut r) if r.value == self.at_inf && r.hi == f64::INFINITY => {
                r.closed_hi = true;
                finish(Some(r), &mut out);
            }
            other => finish(other, &mut out),
        }
        out
    }
}

fn infer_direction(knots: &[Knot], at_inf: f64) -> Result<Direction, MonotoneError> {
    let mut chain: Vec<(f64, usize)> = Vec::with_capacity(knots.len() * 2 + 1);
    for (i, k) in knots.iter().enumerate() {
        chain.push((k.left, i));
        chain.push((k.right, i));
    }
    chain.push((at_inf, knots.len()));
    let mut up = false;
    let mut down = false;
    for w in chain.windows(2) {
        if w[1].0 > w[0].0 {
            up = true;
        }
        if w[1].0 < w[0].0 {
            down = true;
        }
        if up && down {
            let idx = w[1].1;
            return if idx == knots.len() {
                Err(MonotoneError::BadTailValue)
            } else {
                Err(MonotoneError::NotMonotone { index: idx })
            };
        }
    }
    Ok(if down {
        Direction::NonIncreasing
    } else {
        Direction::NonDecreasing
    })
}
