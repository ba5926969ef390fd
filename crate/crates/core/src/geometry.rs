//! Euclidean geometry support: unit-ball constants, scalar fields over `ℝⁿ`,
//! spherical means, and shell-integrated mass functionals `∫ Φ(Q(x)) w(x) dx`.
//!
//! Means over a sphere are exact for radial fields (one evaluation on the
//! axis) and Monte Carlo otherwise, with the RNG stream keyed by the radius
//! bits so results do not depend on the order in which shells are visited.
//! The mass functionals reduce to one-dimensional shell integrals
//! `ω_{n-1} ∫ mean(Φ∘Q)(r) · r^{n-1} w(r) dr` and inherit the divergence
//! ladder's certificates: a mass can be a finite number, a certified `+∞`,
//! or inconclusive.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{self, Bindings, Expr, ParseError};
use crate::monotone::MonotoneFn;
use crate::quad::{
    classify_lower, classify_lower_sampled, classify_upper, classify_upper_sampled,
    IntegralVerdict, LadderConfig, QuadError, VerdictKind,
};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("field expression: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Constants of the unit ball in `ℝⁿ`: its volume, the surface area of its
/// boundary sphere, and the derived normalization `e / volume` applied to
/// mass thresholds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BallConstants {
    pub dim: usize,
    pub volume: f64,
    pub surface: f64,
    pub mass_scale: f64,
}

impl BallConstants {
    pub fn new(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::BadDimension(dim));
        }
        // V₁ = 2, V₂ = π, Vₙ = 2π·Vₙ₋₂/n.
        let mut vols = vec![0.0; dim.max(2) + 1];
        vols[1] = 2.0;
        vols[2] = std::f64::consts::PI;
        for n in 3..=dim {
            vols[n] = 2.0 * std::f64::consts::PI * vols[n - 2] / n as f64;
        }
        let volume = vols[dim];
        Ok(BallConstants {
            dim,
            volume,
            surface: dim as f64 * volume,
            mass_scale: std::f64::consts::E / volume,
        })
    }
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Chordal distance on the one-point compactification of `ℝⁿ`:
/// `|x − y| / ((1 + |x|²)(1 + |y|²))^{1/2}`. Symmetric, zero iff `x = y`.
pub fn spherical_distance(x: &[f64], y: &[f64]) -> f64 {
    let diff_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (diff_sq / ((1.0 + norm_sq(x)) * (1.0 + norm_sq(y)))).sqrt()
}

/// Chordal distance from `x` to the point at infinity: `(1 + |x|²)^{-1/2}`.
pub fn spherical_distance_to_infinity(x: &[f64]) -> f64 {
    1.0 / (1.0 + norm_sq(x)).sqrt()
}

/// Density `(1 + |x|²)^{-n}` of the chordal volume element relative to
/// Lebesgue measure, with `n = x.len()`. Bounded below by `(1 + ρ²)^{-n}` on
/// `{|x| ≤ ρ}` and by `2^{-n}|x|^{-2n}` on `{|x| ≥ 1}`.
pub fn spherical_density(x: &[f64]) -> f64 {
    (1.0 + norm_sq(x)).powi(-(x.len() as i32))
}

#[derive(Clone)]
enum FieldKind {
    Expr(Arc<Expr>),
    Func {
        f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        radial: bool,
    },
}

/// A scalar field `Q: ℝⁿ → [-∞, ∞]`, from a parsed expression or a closure.
/// Unevaluable points surface as NaN and poison any mean they enter, which
/// downstream classifiers report as inconclusive rather than as a number.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    kind: FieldKind,
    text: Option<String>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("ScalarField");
        d.field("dim", &self.dim);
        match &self.text {
            Some(t) => d.field("expr", t),
            None => d.field("radial", &self.is_radial()),
        };
        d.finish()
    }
}

impl ScalarField {
    /// Parses `src` as a field over points of dimension `dim`; coordinates
    /// `x1..xn`, the norm `abs(x)`, and the usual operators are available.
    pub fn from_expr(src: &str, dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::BadDimension(dim));
        }
        let ast = expr::parse_field(src, dim)?;
        let text = ast.to_string();
        Ok(ScalarField {
            dim,
            kind: FieldKind::Expr(Arc::new(ast)),
            text: Some(text),
        })
    }

    /// Wraps a closure; declare `radial` only if the value depends on the
    /// point solely through its norm (it unlocks exact one-point means).
    pub fn from_fn(
        dim: usize,
        radial: bool,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::BadDimension(dim));
        }
        Ok(ScalarField {
            dim,
            kind: FieldKind::Func {
                f: Arc::new(f),
                radial,
            },
            text: None,
        })
    }

    /// A radial field given directly as a function of the radius.
    pub fn radial_fn(
        dim: usize,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, GeometryError> {
        Self::from_fn(dim, true, move |x: &[f64]| {
            f(x.iter().map(|c| c * c).sum::<f64>().sqrt())
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_radial(&self) -> bool {
        match &self.kind {
            FieldKind::Expr(e) => e.is_radial(),
            FieldKind::Func { radial, .. } => *radial,
        }
    }

    /// Canonical source text when the field came from an expression.
    pub fn describe(&self) -> Option<&str> {
        self.text.as_deref()
    }

    /// Value at a point; NaN marks an unevaluable point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            FieldKind::Expr(e) => e
                .eval(&Bindings { t: 0.0, point: x })
                .unwrap_or(f64::NAN),
            FieldKind::Func { f, .. } => f(x),
        }
    }

    /// Value on the sphere of radius `r` for a radial field (evaluated on
    /// the first axis; callers must check [`Self::is_radial`]).
    pub fn eval_radius(&self, r: f64) -> f64 {
        let mut p = vec![0.0; self.dim];
        p[0] = r;
        self.eval(&p)
    }

    /// Pointwise `max(Q, floor)`.
    pub fn with_floor(&self, floor: f64) -> ScalarField {
        let base = self.clone();
        ScalarField {
            dim: self.dim,
            kind: FieldKind::Func {
                radial: self.is_radial(),
                f: Arc::new(move |x: &[f64]| base.eval(x).max(floor)),
            },
            text: None,
        }
    }

    /// Pointwise power `Q^λ` (negative bases are unevaluable for fractional
    /// `λ` and surface as NaN, like any other bad point).
    pub fn powered(&self, lambda: f64) -> ScalarField {
        let base = self.clone();
        ScalarField {
            dim: self.dim,
            kind: FieldKind::Func {
                radial: self.is_radial(),
                f: Arc::new(move |x: &[f64]| base.eval(x).powf(lambda)),
            },
            text: None,
        }
    }

    /// Inversion through the unit sphere: `x ↦ Q(x / |x|²)`. Swaps the
    /// inside and outside of the unit ball; radial fields stay radial.
    pub fn inverted(&self) -> ScalarField {
        let base = self.clone();
        ScalarField {
            dim: self.dim,
            kind: FieldKind::Func {
                radial: self.is_radial(),
                f: Arc::new(move |x: &[f64]| {
                    let n2: f64 = x.iter().map(|c| c * c).sum();
                    if n2 == 0.0 {
                        return f64::NAN;
                    }
                    let y: Vec<f64> = x.iter().map(|c| c / n2).collect();
                    base.eval(&y)
                }),
            },
            text: None,
        }
    }

    /// Recentred field `x ↦ Q(center + x)`.
    pub fn recentred(&self, center: &[f64]) -> Result<ScalarField, GeometryError> {
        if center.len() != self.dim {
            return Err(GeometryError::BadDimension(center.len()));
        }
        let base = self.clone();
        let c: Vec<f64> = center.to_vec();
        let still_radial = self.is_radial() && c.iter().all(|&v| v == 0.0);
        Ok(ScalarField {
            dim: self.dim,
            kind: FieldKind::Func {
                radial: still_radial,
                f: Arc::new(move |x: &[f64]| {
                    let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a + b).collect();
                    base.eval(&y)
                }),
            },
            text: None,
        })
    }

    /// Rescaled field `x ↦ Q(s·x)`.
    pub fn rescaled(&self, s: f64) -> ScalarField {
        let base = self.clone();
        ScalarField {
            dim: self.dim,
            kind: FieldKind::Func {
                radial: self.is_radial(),
                f: Arc::new(move |x: &[f64]| {
                    let y: Vec<f64> = x.iter().map(|c| c * s).collect();
                    base.eval(&y)
                }),
            },
            text: None,
        }
    }
}

/// Monte Carlo sampling parameters for non-radial spherical means.
#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            samples: 1 << 14,
        }
    }
}

/// RNG for one shell, keyed by the radius bits mixed through splitmix64 so
/// the stream is a function of (seed, r) alone — the set of shells visited
/// and their visiting order cannot change any mean.
fn shell_rng(root: u64, r: f64) -> ChaCha8Rng {
    let mut z = r.to_bits().wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(root ^ z)
}

/// Uniform direction on the unit sphere: normalized standard Gaussian vector
/// (Box–Muller pairs).
fn unit_direction(rng: &mut ChaCha8Rng, dim: usize, buf: &mut Vec<f64>) {
    loop {
        buf.clear();
        while buf.len() < dim {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let m = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            buf.push(m * c);
            if buf.len() < dim {
                buf.push(m * s);
            }
        }
        let norm2: f64 = buf.iter().map(|c| c * c).sum();
        if norm2.is_finite() && norm2 > 1e-300 {
            let inv = norm2.sqrt().recip();
            for c in buf.iter_mut() {
                *c *= inv;
            }
            return;
        }
    }
}

/// Means of `Q` and of `Φ∘Q` over one sphere, taken from the same draws so
/// their convexity relation (gauge mean ≥ gauge of mean, for convex `Φ`)
/// holds sample-for-sample and not just in expectation.
#[derive(Clone, Copy, Debug)]
pub struct ShellMeans {
    pub radius: f64,
    /// Spherical mean of `Q`.
    pub mean: f64,
    /// Spherical mean of `Φ∘Q`, with `Q` clamped below at 0 before applying
    /// the gauge (the non-decreasing extension of `Φ` to negative arguments).
    pub mean_gauge: f64,
    /// Standard error of `mean` (0 for the exact radial shortcut; ∞ when a
    /// draw was infinite or unevaluable).
    pub stderr: f64,
    /// Standard error of `mean_gauge`.
    pub stderr_gauge: f64,
    /// Draws used; 0 means the radial shortcut (exact, no sampling).
    pub samples: usize,
}

fn stderr_from_sums(sum: f64, sum_sq: f64, n: f64) -> f64 {
    if !sum.is_finite() || !sum_sq.is_finite() {
        return f64::INFINITY;
    }
    if n < 2.0 {
        return 0.0;
    }
    let var = (sum_sq - sum * sum / n).max(0.0) / (n - 1.0);
    (var / n).sqrt()
}

/// Computes [`ShellMeans`] on the sphere of radius `r`.
pub fn shell_means(
    field: &ScalarField,
    phi: &MonotoneFn,
    r: f64,
    cfg: &SampleConfig,
) -> Result<ShellMeans, GeometryError> {
    if cfg.samples == 0 {
        return Err(GeometryError::NoSamples);
    }
    if field.is_radial() {
        let q = field.eval_radius(r);
        return Ok(ShellMeans {
            radius: r,
            mean: q,
            mean_gauge: phi.eval_f64(q.max(0.0)),
            stderr: 0.0,
            stderr_gauge: 0.0,
            samples: 0,
        });
    }
    let mut rng = shell_rng(cfg.seed, r);
    let mut dir = Vec::with_capacity(field.dim());
    let mut point = vec![0.0; field.dim()];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut gauge_sum = 0.0;
    let mut gauge_sum_sq = 0.0;
    for _ in 0..cfg.samples {
        unit_direction(&mut rng, field.dim(), &mut dir);
        for (p, d) in point.iter_mut().zip(&dir) {
            *p = r * d;
        }
        let v = field.eval(&point);
        let g = phi.eval_f64(v.max(0.0));
        sum += v;
        sum_sq += v * v;
        gauge_sum += g;
        gauge_sum_sq += g * g;
    }
    let n = cfg.samples as f64;
    Ok(ShellMeans {
        radius: r,
        mean: sum / n,
        mean_gauge: gauge_sum / n,
        stderr: stderr_from_sums(sum, sum_sq, n),
        stderr_gauge: stderr_from_sums(gauge_sum, gauge_sum_sq, n),
        samples: cfg.samples,
    })
}

/// Empirical convexity gap `mean(Φ∘Q) − Φ(mean Q)` on one shell. For convex
/// `Φ` this is ≥ 0 up to quadrature noise because both means share draws.
pub fn jensen_gap(phi: &MonotoneFn, m: &ShellMeans) -> f64 {
    let at_mean = phi.eval_f64(m.mean.max(0.0));
    if m.mean_gauge.is_infinite() && at_mean.is_infinite() {
        return 0.0;
    }
    m.mean_gauge - at_mean
}

/// The weighted region of a mass functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MassRegion {
    /// `∫_{|x| ≤ r} Φ(Q(x)) dx`.
    Ball { radius: f64 },
    /// `∫_{|x| ≥ r} Φ(Q(x)) · |x|^{-2n} dx`.
    Exterior { radius: f64 },
    /// `∫_{ℝⁿ} Φ(Q(x)) · (1 + |x|²)^{-n} dx`.
    Spherical,
}

/// A mass functional value with its divergence certificate. The verdict is
/// already scaled by the sphere surface area, so `verdict.value` (when
/// convergent) is the mass itself.
#[derive(Clone, Debug, Serialize)]
pub struct MassEstimate {
    pub region: MassRegion,
    pub verdict: IntegralVerdict,
}

impl MassEstimate {
    /// The mass as an extended real: finite when certified convergent, `+∞`
    /// when certified divergent, `None` when inconclusive.
    pub fn value(&self) -> Option<f64> {
        match self.verdict.kind {
            VerdictKind::Converges => self.verdict.value,
            VerdictKind::Diverges => Some(f64::INFINITY),
            VerdictKind::Inconclusive => None,
        }
    }
}

/// Integrates `Φ∘Q` against the region's weight, shell by shell.
pub fn gauge_mass(
    field: &ScalarField,
    phi: &MonotoneFn,
    region: MassRegion,
    samples: &SampleConfig,
    ladder: &LadderConfig,
) -> Result<MassEstimate, GeometryError> {
    if samples.samples == 0 {
        return Err(GeometryError::NoSamples);
    }
    let consts = BallConstants::new(field.dim())?;
    let nf = field.dim() as f64;
    let shell = |r: f64| match shell_means(field, phi, r, samples) {
        Ok(m) => m.mean_gauge,
        Err(_) => f64::NAN,
    };
    // Monte Carlo shell means carry sampling noise, so adaptive panel
    // refinement would subdivide forever chasing it; a fixed composite rule
    // per octave integrates the underlying smooth profile at the noise's
    // accuracy instead. Radial fields are evaluated exactly and can afford
    // the adaptive rule.
    let noisy = !field.is_radial();
    const NOISY_PANELS: usize = 4;
    let lower = |g: &dyn Fn(f64) -> f64, b: f64| {
        if noisy {
            classify_lower_sampled(g, b, NOISY_PANELS, ladder)
        } else {
            classify_lower(g, b, &[], ladder)
        }
    };
    let upper = |g: &dyn Fn(f64) -> f64, a: f64| {
        if noisy {
            classify_upper_sampled(g, a, NOISY_PANELS, ladder)
        } else {
            classify_upper(g, a, &[], ladder)
        }
    };
    let verdict = match region {
        MassRegion::Ball { radius } => {
            let g = |r: f64| shell(r) * r.powf(nf - 1.0);
            lower(&g, radius)?
        }
        MassRegion::Exterior { radius } => {
            let g = |r: f64| shell(r) * r.powf(-nf - 1.0);
            upper(&g, radius)?
        }
        MassRegion::Spherical => {
            let g = |r: f64| shell(r) * r.powf(nf - 1.0) * (1.0 + r * r).powf(-nf);
            let inner = lower(&g, 1.0)?;
            let outer = upper(&g, 1.0)?;
            combine_verdicts(inner, outer)
        }
    };
    Ok(MassEstimate {
        region,
        verdict: verdict.scaled(consts.surface),
    })
}

fn combine_verdicts(a: IntegralVerdict, b: IntegralVerdict) -> IntegralVerdict {
    use VerdictKind::*;
    let kind = match (a.kind, b.kind) {
        (Diverges, _) | (_, Diverges) => Diverges,
        (Converges, Converges) => Converges,
        _ => Inconclusive,
    };
    let value = match (kind, a.value, b.value) {
        (Converges, Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let mut truncations = a.truncations;
    truncations.extend(b.truncations);
    IntegralVerdict {
        kind,
        value,
        error_estimate: a.error_estimate + b.error_estimate,
        tail_exponent: b.tail_exponent,
        truncations,
    }
}
