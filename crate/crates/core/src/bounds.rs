//! Verification of a radial lower bound for gauge integrals on the unit
//! ball.
//!
//! For a convex non-decreasing gauge `Φ` and a scalar field `Q` on the unit
//! ball of `ℝⁿ`, write `q(r)` for the spherical mean of `Q` over the sphere
//! of radius `r` and `M = ∫_B Φ(Q) dx` for the gauge mass. The bound checked
//! here is
//!
//! ```text
//!   ∫_0^1 dr / (r · q(r))  ≥  (1/n) ∫_{λₙM}^∞ dτ / (τ · Φ⁻¹(τ)),
//! ```
//!
//! with `λₙ = e/Ωₙ` and `Ωₙ` the unit-ball volume. [`verify_bound`] samples
//! the mean profile, classifies both sides, and reports whether the
//! inequality holds, fails, or cannot be decided at the working tolerances.
//! An exponent `λ ∈ (0,1)` switches to the cutoff variant: the mass is taken
//! over `max(Q, 1)` while the left side uses `q(r)^λ`.
//!
//! [`check_divergence`] verifies the derived criterion: if `M` is finite and
//! `∫_{δ₀}^∞ dτ/(τ·Φ⁻¹(τ))` diverges for some `δ₀ > Φ(0)`, then the radial
//! integral must diverge. [`check_exponent_pairs`] extends the conclusion to
//! integrals `∫ dr/(r^α · q(r)^β)`, and [`check_localized`] transports it to
//! interior balls, exteriors (through inversion), and the chordal weight on
//! all of `ℝⁿ`.

use serde::Serialize;
use thiserror::Error;

use crate::conditions::{self, ConditionsError};
use crate::geometry::{
    gauge_mass, shell_means, spherical_density, BallConstants, GeometryError, MassEstimate,
    MassRegion, SampleConfig, ScalarField,
};
use crate::monotone::{check_convexity, Direction, MonotoneError, MonotoneFn};
use crate::quad::{
    classify_increments, IntegralVerdict, LadderConfig, LadderKind, QuadError, VerdictKind,
};

/// Truncated left sides must reach at least this multiple of `log(1/ε)` on
/// every rung for growth alone to count as divergence evidence.
pub const GROWTH_SLOPE: f64 = 0.05;
/// Relative tolerance for the exterior/ball mass identity under inversion.
pub const MASS_MATCH_RTOL: f64 = 1e-6;
/// Spherical-mean comparisons allow this many standard errors of slack.
pub const JENSEN_SIGMA: f64 = 3.0;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("gauge must be non-decreasing")]
    NotNonDecreasing,
    #[error("gauge must be non-negative")]
    NegativeGauge,
    #[error("gauge must be convex; midpoint violation near t = {at}")]
    NotConvex { at: f64 },
    #[error("exponent lambda = {0} must lie in (0, 1]")]
    BadLambda(f64),
    #[error(
        "exponent pair (alpha, beta) = ({alpha}, {beta}) rejected: need alpha >= 1 and 0 < beta <= alpha"
    )]
    BadExponents { alpha: f64, beta: f64 },
    #[error(
        "value-space start {delta0} rejected: must exceed the gauge's starting value {tau0} \
         (below it the tail integral is infinite regardless of growth)"
    )]
    BadValueStart { delta0: f64, tau0: f64 },
    #[error("gauge mass {0} is not usable as a threshold")]
    BadMass(f64),
    #[error("gauge mass is zero: the threshold collapses to the origin")]
    ZeroMass,
    #[error(
        "threshold {threshold} does not exceed the gauge's starting value {tau0}; \
         the exact mass satisfies λₙM ≥ e·Φ(0), so this signals sampling error in M"
    )]
    ThresholdNotAboveValue { threshold: f64, tau0: f64 },
    #[error("radial grid needs at least 8 points and depth of at least 1 octave, got {points} points, depth {depth}")]
    BadGrid { points: usize, depth: u32 },
    #[error("invalid site: {0}")]
    BadSite(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Conditions(#[from] ConditionsError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Monotone(#[from] MonotoneError),
}

/// Tuning for the bound verifiers.
#[derive(Clone, Debug)]
pub struct BoundConfig {
    /// Left-side exponent: 1 for the plain bound, `(0,1)` for the cutoff
    /// variant.
    pub lambda: f64,
    /// The truncation ladder runs over `ε = 2^-1 .. 2^-depth`.
    pub depth: u32,
    /// Geometric radial grid points spanning `[2^-depth, 1]`.
    pub grid_points: usize,
    /// Spherical-mean sampling (ignored by radial fields).
    pub samples: SampleConfig,
    /// Ladder classifier tuning shared by every integral here.
    pub ladder: LadderConfig,
    /// Absolute slack added to inequality comparisons.
    pub slack: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            lambda: 1.0,
            depth: 20,
            grid_points: 512,
            samples: SampleConfig::default(),
            ladder: LadderConfig::default(),
            slack: 1e-9,
        }
    }
}

/// One sampled radius of the mean profile.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfilePoint {
    pub r: f64,
    /// Spherical mean of `Q`.
    pub mean: f64,
    /// Spherical mean of `Φ∘Q` from the same draws.
    pub mean_gauge: f64,
    pub stderr: f64,
    pub stderr_gauge: f64,
}

/// Spherical means on a geometric radial grid over `[2^-depth, 1]`,
/// ascending in radius.
#[derive(Clone, Debug, Serialize)]
pub struct RadialProfile {
    pub points: Vec<ProfilePoint>,
    pub depth: u32,
    /// Draws per shell (0 = exact radial shortcut).
    pub samples: usize,
}

/// Samples the mean profile of `field` under `phi` on the grid described by
/// `cfg`.
pub fn radial_profile(
    field: &ScalarField,
    phi: &MonotoneFn,
    cfg: &BoundConfig,
) -> Result<RadialProfile, BoundsError> {
    if cfg.grid_points < 8 || cfg.depth < 1 {
        return Err(BoundsError::BadGrid {
            points: cfg.grid_points,
            depth: cfg.depth,
        });
    }
    let n = cfg.grid_points;
    let mut points = Vec::with_capacity(n);
    let mut samples = 0;
    for i in 0..n {
        let exponent = -(cfg.depth as f64) * (n - 1 - i) as f64 / (n - 1) as f64;
        let r = 2f64.powf(exponent);
        let m = shell_means(field, phi, r, &cfg.samples)?;
        samples = samples.max(m.samples);
        points.push(ProfilePoint {
            r,
            mean: m.mean,
            mean_gauge: m.mean_gauge,
            stderr: m.stderr,
            stderr_gauge: m.stderr_gauge,
        });
    }
    Ok(RadialProfile {
        points,
        depth: cfg.depth,
        samples,
    })
}

/// The integral `∫_ε^1 r^{-alpha} q(r)^{-beta} dr` of a mean profile,
/// classified as `ε → 0` along the octave ladder. Negative means count as 0
/// (the integrand is `+∞` there, as it is wherever the means vanish); means
/// of `+∞` zero the integrand.
#[derive(Clone, Debug, Serialize)]
pub struct MeanIntegral {
    pub alpha: f64,
    pub beta: f64,
    /// Ladder verdict; `truncations` holds `(ε, ∫_ε^1)` per rung.
    pub verdict: IntegralVerdict,
    /// `min_k ∫_{ε_k}^1 / log(1/ε_k)` over the rungs.
    #[serde(serialize_with = "crate::ext::serialize_extended")]
    pub growth_floor: f64,
    /// Whether the growth floor clears [`GROWTH_SLOPE`].
    pub grows_logarithmically: bool,
    /// The means were `+∞` on the whole grid, so the integral is 0.
    pub degenerate: bool,
    #[serde(skip)]
    u: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl MeanIntegral {
    /// Truncated integral `∫_ε^1`, interpolated on the grid (clamped to the
    /// sampled range).
    pub fn at(&self, eps: f64) -> f64 {
        let target = -eps.ln();
        if !(target > 0.0) {
            return 0.0;
        }
        let last = *self.u.last().unwrap();
        if target >= last {
            return *self.cumulative.last().unwrap();
        }
        let j = self.u.partition_point(|&u| u < target);
        // j ≥ 1 because u[0] = 0 < target.
        let (u0, u1) = (self.u[j - 1], self.u[j]);
        let (c0, c1) = (self.cumulative[j - 1], self.cumulative[j]);
        if target == u0 || !c0.is_finite() {
            return c0;
        }
        if !c1.is_finite() {
            // The integrand blows up inside this cell: any deeper truncation
            // already includes the infinite contribution.
            return c1;
        }
        c0 + (c1 - c0) * (target - u0) / (u1 - u0)
    }

    /// The deepest truncated value, `∫_{2^-depth}^1`.
    pub fn deepest(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

/// Builds [`MeanIntegral`] from a sampled profile. In log coordinates
/// `u = log(1/r)` the integral is `∫_0^{log(1/ε)} e^{(alpha-1)u} q^{-beta} du`,
/// evaluated by the trapezoid rule on the uniform grid.
pub fn mean_integral(
    profile: &RadialProfile,
    alpha: f64,
    beta: f64,
    ladder: &LadderConfig,
) -> MeanIntegral {
    let n = profile.points.len();
    let mut u = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut noise = Vec::with_capacity(n);
    let mut all_infinite_means = true;
    for p in profile.points.iter().rev() {
        let ui = -p.r.ln();
        let q = if p.mean.is_nan() { f64::NAN } else { p.mean.max(0.0) };
        all_infinite_means &= q == f64::INFINITY;
        let weight = if alpha == 1.0 { 1.0 } else { ((alpha - 1.0) * ui).exp() };
        u.push(ui.max(0.0));
        g.push(weight * q.powf(-beta));
        // First-order sensitivity of the integrand to the mean estimate.
        let s = weight * beta * q.powf(-beta - 1.0) * p.stderr;
        noise.push(if s.is_finite() { s } else { 0.0 });
    }

    let mut cumulative = Vec::with_capacity(n);
    cumulative.push(0.0);
    let mut quad_err = 0.0;
    for j in 1..n {
        let du = u[j] - u[j - 1];
        let cell = 0.5 * (g[j - 1] + g[j]) * du;
        cumulative.push(cumulative[j - 1] + cell);
        quad_err += JENSEN_SIGMA * 0.5 * (noise[j - 1] + noise[j]) * du;
        if j + 1 < n {
            let second = g[j + 1] - 2.0 * g[j] + g[j - 1];
            if second.is_finite() {
                quad_err += second.abs() * du / 12.0;
            }
        }
    }

    let mut result = MeanIntegral {
        alpha,
        beta,
        verdict: IntegralVerdict {
            kind: VerdictKind::Inconclusive,
            value: None,
            error_estimate: quad_err,
            tail_exponent: None,
            truncations: Vec::new(),
        },
        growth_floor: f64::NAN,
        grows_logarithmically: false,
        degenerate: all_infinite_means,
        u,
        cumulative,
    };

    let mut limits = Vec::with_capacity(profile.depth as usize);
    let mut increments = Vec::with_capacity(profile.depth as usize);
    let mut growth_floor = f64::INFINITY;
    let mut prev = 0.0;
    for k in 1..=profile.depth {
        let eps = 2f64.powi(-(k as i32));
        let s = result.at(eps);
        limits.push(eps);
        increments.push(s - prev);
        prev = s;
        growth_floor = growth_floor.min(s / (k as f64 * std::f64::consts::LN_2));
    }
    result.verdict = classify_increments(&limits, &increments, LadderKind::Lower, quad_err, ladder);
    if result.degenerate {
        // All increments are exactly 0; report the (zero) integral instead
        // of an inconclusive all-zero ladder.
        result.verdict.kind = VerdictKind::Converges;
        result.verdict.value = Some(0.0);
    }
    result.growth_floor = growth_floor;
    result.grows_logarithmically = growth_floor >= GROWTH_SLOPE;
    result
}

/// The right side of the bound: `(1/n) ∫_{λₙM}^∞ dτ / (τ·Φ⁻¹(τ))`.
#[derive(Clone, Debug, Serialize)]
pub struct RhsBound {
    /// `λₙ·M`; infinite mass gives an empty integration range.
    #[serde(serialize_with = "crate::ext::serialize_extended")]
    pub threshold: f64,
    /// The scaled tail integral (value 0 when the range is empty).
    pub verdict: IntegralVerdict,
}

/// Classifies the right side for a gauge mass `mass` in dimension `dim`.
pub fn rhs_bound(
    phi: &MonotoneFn,
    mass: f64,
    dim: usize,
    ladder: &LadderConfig,
) -> Result<RhsBound, BoundsError> {
    let consts = BallConstants::new(dim)?;
    if mass.is_nan() || mass < 0.0 {
        return Err(BoundsError::BadMass(mass));
    }
    if mass == 0.0 {
        return Err(BoundsError::ZeroMass);
    }
    if mass.is_infinite() {
        return Ok(RhsBound {
            threshold: f64::INFINITY,
            verdict: IntegralVerdict {
                kind: VerdictKind::Converges,
                value: Some(0.0),
                error_estimate: 0.0,
                tail_exponent: None,
                truncations: Vec::new(),
            },
        });
    }
    let threshold = consts.mass_scale * mass;
    let tau0 = phi.at_zero();
    if !(threshold > tau0) || !threshold.is_finite() {
        return Err(BoundsError::ThresholdNotAboveValue { threshold, tau0 });
    }
    let inv = phi.inverse()?;
    let verdict =
        conditions::condition_value(&inv, threshold, ladder)?.scaled(1.0 / dim as f64);
    Ok(RhsBound { threshold, verdict })
}

/// Three-valued comparison result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Violated,
    Indeterminate,
}

/// Consistency checks derived from the proof of the bound, evaluated on the
/// sampled profile.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    /// `∫_0^1 h(r) dr/r` over the grid, with `h(r) = rⁿ·Φ(q(r))`.
    #[serde(serialize_with = "crate::ext::serialize_extended")]
    pub shell_integral: f64,
    /// Its proved ceiling `M/ωₙ₋₁` (when the mass is known).
    #[serde(serialize_with = "crate::ext::serialize_extended_opt")]
    pub shell_ceiling: Option<f64>,
    pub shell_within: Option<bool>,
    /// Measure of `{s > 0 : h(e^{-s}) > M/Ωₙ}` seen on the grid.
    pub excess_measure: Option<f64>,
    /// Its ceiling `1/n` plus one grid step.
    pub excess_ceiling: Option<f64>,
    pub excess_within: Option<bool>,
    /// `min_r (mean of Φ∘Q + 3·stderr − Φ(mean of Q))`: convexity of the
    /// gauge makes the true quantity non-negative at every radius.
    #[serde(serialize_with = "crate::ext::serialize_extended")]
    pub jensen_margin: f64,
    pub jensen_within: bool,
}

/// Full verification record for one `(Q, Φ, n)` instance.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub dim: usize,
    pub lambda: f64,
    pub mass: MassEstimate,
    /// `M/Ωₙ`, the mean of `Φ∘Q` over the ball (when `M` is finite).
    pub ball_mean: Option<f64>,
    /// `λₙ = e/Ωₙ`.
    pub mass_scale: f64,
    pub lhs: MeanIntegral,
    /// Absent when no usable threshold exists (mass unknown or degenerate).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<RhsBound>,
    pub outcome: Outcome,
    /// For `lambda < 1`: whether `∫ dr/(r·q^λ) ≥ ∫ dr/(r·q*)` held at every
    /// rung, `q*` being the means of the floored field `max(Q, 1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_ok: Option<bool>,
    pub diagnostics: Diagnostics,
    pub notes: Vec<String>,
}

fn validate_gauge(phi: &MonotoneFn) -> Result<(), BoundsError> {
    if phi.direction() != Direction::NonDecreasing {
        return Err(BoundsError::NotNonDecreasing);
    }
    if !phi.is_nonnegative() {
        return Err(BoundsError::NegativeGauge);
    }
    let report = check_convexity(phi, &[]);
    if !report.convex {
        let at = report.witness.map(|w| w.t1).unwrap_or(f64::NAN);
        return Err(BoundsError::NotConvex { at });
    }
    Ok(())
}

/// Verifies the radial lower bound for `(field, phi)` on the unit ball.
pub fn verify_bound(
    field: &ScalarField,
    phi: &MonotoneFn,
    cfg: &BoundConfig,
) -> Result<BoundReport, BoundsError> {
    validate_gauge(phi)?;
    if !(cfg.lambda > 0.0 && cfg.lambda <= 1.0) {
        return Err(BoundsError::BadLambda(cfg.lambda));
    }
    let consts = BallConstants::new(field.dim())?;
    let mut notes = Vec::new();

    let cutoff = cfg.lambda < 1.0;
    let mass_field = if cutoff { field.with_floor(1.0) } else { field.clone() };
    if cutoff {
        notes.push(
            "exponent < 1: the mass and threshold are taken over the floored field max(Q, 1)"
                .to_string(),
        );
    }
    let mass = gauge_mass(
        &mass_field,
        phi,
        MassRegion::Ball { radius: 1.0 },
        &cfg.samples,
        &cfg.ladder,
    )?;

    let profile = radial_profile(field, phi, cfg)?;
    let diag_profile = if cutoff {
        radial_profile(&mass_field, phi, cfg)?
    } else {
        profile.clone()
    };
    let lhs = mean_integral(&profile, 1.0, cfg.lambda, &cfg.ladder);
    if lhs.degenerate {
        notes.push("spherical means are infinite at every sampled radius; the left side is 0"
            .to_string());
    }

    let chain_ok = if cutoff {
        let floored = mean_integral(&diag_profile, 1.0, 1.0, &cfg.ladder);
        let ok = lhs
            .verdict
            .truncations
            .iter()
            .zip(&floored.verdict.truncations)
            .all(|(a, b)| {
                a.partial >= b.partial - 1e-12 * (1.0 + b.partial.abs()) || b.partial.is_nan()
            });
        Some(ok)
    } else {
        None
    };

    let mass_value = mass.value();
    let rhs = match mass_value {
        None => {
            notes.push("mass estimate is inconclusive; no threshold available".to_string());
            None
        }
        Some(m) if m.is_infinite() => {
            notes.push("mass is infinite: the threshold exceeds every value and the right side is 0"
                .to_string());
            Some(rhs_bound(phi, m, field.dim(), &cfg.ladder)?)
        }
        Some(m) if m == 0.0 => {
            notes.push(
                "mass is zero (the gauge vanishes along the field); the right side degenerates"
                    .to_string(),
            );
            None
        }
        Some(m) => match rhs_bound(phi, m, field.dim(), &cfg.ladder) {
            Ok(r) => Some(r),
            Err(BoundsError::ThresholdNotAboveValue { threshold, tau0 }) => {
                notes.push(format!(
                    "threshold {threshold} does not clear the starting value {tau0}; \
                     exact masses satisfy λₙM ≥ e·Φ(0), so the mass estimate is too noisy"
                ));
                None
            }
            Err(e) => return Err(e),
        },
    };

    let outcome = decide_outcome(&lhs, rhs.as_ref(), cfg.slack);
    let ball_mean = mass_value.filter(|m| m.is_finite()).map(|m| m / consts.volume);
    let diagnostics = build_diagnostics(&diag_profile, phi, &consts, mass_value);

    Ok(BoundReport {
        dim: field.dim(),
        lambda: cfg.lambda,
        mass,
        ball_mean,
        mass_scale: consts.mass_scale,
        lhs,
        rhs,
        outcome,
        chain_ok,
        diagnostics,
        notes,
    })
}

fn decide_outcome(lhs: &MeanIntegral, rhs: Option<&RhsBound>, slack: f64) -> Outcome {
    if lhs.verdict.diverges() {
        return Outcome::Holds;
    }
    let Some(rhs) = rhs else {
        return Outcome::Indeterminate;
    };
    match rhs.verdict.kind {
        VerdictKind::Inconclusive => Outcome::Indeterminate,
        VerdictKind::Diverges => {
            if lhs.verdict.converges() {
                Outcome::Violated
            } else {
                Outcome::Indeterminate
            }
        }
        VerdictKind::Converges => {
            let v = rhs.verdict.value.unwrap_or(0.0);
            let tol = lhs.verdict.error_estimate + rhs.verdict.error_estimate + slack;
            let deep = lhs.deepest();
            if deep >= v - tol {
                Outcome::Holds
            } else if let Some(l) = lhs.verdict.value {
                if l + tol < v {
                    Outcome::Violated
                } else {
                    Outcome::Indeterminate
                }
            } else {
                Outcome::Indeterminate
            }
        }
    }
}

fn build_diagnostics(
    profile: &RadialProfile,
    phi: &MonotoneFn,
    consts: &BallConstants,
    mass: Option<f64>,
) -> Diagnostics {
    let nf = consts.dim as f64;
    let pts = &profile.points;
    let n = pts.len();
    // Ascending u = log(1/r): reverse the radius order.
    let h: Vec<f64> = pts
        .iter()
        .rev()
        .map(|p| {
            let q = if p.mean.is_nan() { f64::NAN } else { p.mean.max(0.0) };
            p.r.powf(nf) * phi.eval_f64(q)
        })
        .collect();
    let u: Vec<f64> = pts.iter().rev().map(|p| -p.r.ln().min(0.0)).collect();
    let noise: Vec<f64> = pts
        .iter()
        .rev()
        .map(|p| {
            let s = p.r.powf(nf) * p.stderr_gauge;
            if s.is_finite() {
                s
            } else {
                0.0
            }
        })
        .collect();

    let mut shell_integral = 0.0;
    let mut shell_slack = 0.0;
    let mut excess = 0.0;
    let ball_mean = mass.map(|m| m / consts.volume);
    // Centered second difference at knot j, when defined and finite.
    let curvature = |j: usize| -> Option<f64> {
        (1..n - 1).contains(&j).then(|| {
            let second = h[j + 1] - 2.0 * h[j] + h[j - 1];
            second.is_finite().then_some(second.abs())
        })?
    };
    for j in 1..n {
        let du = u[j] - u[j - 1];
        shell_integral += 0.5 * (h[j - 1] + h[j]) * du;
        shell_slack += JENSEN_SIGMA * 0.5 * (noise[j - 1] + noise[j]) * du;
        // Trapezoid discretization error, bounded per cell by the larger of
        // the second differences at its two ends: the bound can be achieved
        // with equality, so the tolerance must absorb the rule's own bias.
        let bias = match (curvature(j - 1), curvature(j)) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0.0,
        };
        shell_slack += bias * du / 12.0;
        if let Some(mn) = ball_mean {
            if h[j] > mn {
                excess += du;
            }
        }
    }
    let grid_step = (u[n - 1] - u[0]) / (n - 1) as f64;

    let shell_ceiling = mass.map(|m| m / consts.surface);
    let shell_within = shell_ceiling
        .map(|c| shell_integral <= c + shell_slack + 1e-9 * (1.0 + c.abs().min(1e300)));
    let (excess_measure, excess_ceiling, excess_within) = match ball_mean {
        Some(_) => {
            let ceiling = 1.0 / nf + grid_step;
            (Some(excess), Some(ceiling), Some(excess <= ceiling))
        }
        None => (None, None, None),
    };

    let mut jensen_margin = f64::INFINITY;
    let mut jensen_nan = false;
    for p in pts {
        let q = if p.mean.is_nan() { f64::NAN } else { p.mean.max(0.0) };
        let gauge_of_mean = phi.eval_f64(q);
        let margin = if p.mean_gauge.is_nan() || gauge_of_mean.is_nan() {
            f64::NAN
        } else if p.mean_gauge.is_infinite() {
            f64::INFINITY
        } else if gauge_of_mean.is_infinite() {
            f64::NEG_INFINITY
        } else {
            p.mean_gauge + JENSEN_SIGMA * p.stderr_gauge - gauge_of_mean
        };
        if margin.is_nan() {
            jensen_nan = true;
        } else {
            jensen_margin = jensen_margin.min(margin);
        }
    }
    let jensen_within = !jensen_nan && jensen_margin >= -1e-9;

    Diagnostics {
        shell_integral,
        shell_ceiling,
        shell_within,
        excess_measure,
        excess_ceiling,
        excess_within,
        jensen_margin,
        jensen_within,
    }
}

/// Status of a hypothesis-and-conclusion check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// Hypotheses verified and the asserted conclusion confirmed.
    Confirmed,
    /// A hypothesis failed; the conclusion is not asserted.
    HypothesisFailure,
    /// Hypotheses verified but the conclusion failed numerically.
    ConclusionFailure,
    /// Some ingredient could not be classified.
    Inconclusive,
}

/// Record of the divergence criterion: finite mass plus a divergent
/// value-space tail force the radial integral to diverge.
#[derive(Clone, Debug, Serialize)]
pub struct DivergenceReport {
    pub dim: usize,
    pub mass: MassEstimate,
    /// Start of the value-space tail (must exceed `Φ(0)`).
    pub delta0: f64,
    /// `Φ(0)`.
    #[serde(serialize_with = "crate::ext::serialize_extended")]
    pub tau0: f64,
    /// `∫_{δ₀}^∞ dτ/(τ·Φ⁻¹(τ))`, unscaled.
    pub tail: IntegralVerdict,
    pub lhs: MeanIntegral,
    pub status: CheckStatus,
    pub findings: Vec<String>,
}

/// Checks the divergence criterion for `(field, phi)` on the unit ball.
/// `delta0` defaults to the canonical value-space cutoff of the condition
/// battery; explicit values at or below `Φ(0)` are rejected because the tail
/// is then infinite for reasons unrelated to the growth of the gauge.
pub fn check_divergence(
    field: &ScalarField,
    phi: &MonotoneFn,
    delta0: Option<f64>,
    cfg: &BoundConfig,
) -> Result<DivergenceReport, BoundsError> {
    validate_gauge(phi)?;
    let tau0 = phi.at_zero();
    let d0 = match delta0 {
        Some(v) => {
            if !(v > tau0) || !v.is_finite() || v <= 0.0 {
                return Err(BoundsError::BadValueStart { delta0: v, tau0 });
            }
            v
        }
        None => conditions::default_cutoffs(phi)?.value_from,
    };
    let tail = conditions::condition_value(&phi.inverse()?, d0, &cfg.ladder)?;
    let mass = gauge_mass(
        field,
        phi,
        MassRegion::Ball { radius: 1.0 },
        &cfg.samples,
        &cfg.ladder,
    )?;
    let profile = radial_profile(field, phi, cfg)?;
    let lhs = mean_integral(&profile, 1.0, 1.0, &cfg.ladder);

    let mut findings = Vec::new();
    let mut status = CheckStatus::Confirmed;
    match mass.verdict.kind {
        VerdictKind::Diverges => {
            findings.push(
                "gauge mass over the unit ball is infinite; the finiteness hypothesis fails"
                    .to_string(),
            );
            status = CheckStatus::HypothesisFailure;
        }
        VerdictKind::Inconclusive => {
            findings.push("gauge mass could not be classified".to_string());
            status = CheckStatus::Inconclusive;
        }
        VerdictKind::Converges => {}
    }
    match tail.kind {
        VerdictKind::Converges => {
            findings.push(format!(
                "value-space tail from {d0} converges; the growth hypothesis on the gauge fails"
            ));
            status = CheckStatus::HypothesisFailure;
        }
        VerdictKind::Inconclusive => {
            findings.push("value-space tail could not be classified".to_string());
            if status == CheckStatus::Confirmed {
                status = CheckStatus::Inconclusive;
            }
        }
        VerdictKind::Diverges => {}
    }
    if status == CheckStatus::Confirmed {
        if lhs.verdict.diverges() {
            findings.push("radial integral certified divergent".to_string());
        } else if lhs.grows_logarithmically {
            findings.push(format!(
                "radial truncations grow at least {GROWTH_SLOPE}·log(1/ε) on every rung \
                 (floor {:.4})",
                lhs.growth_floor
            ));
        } else if lhs.verdict.converges() {
            findings.push(
                "hypotheses hold but the radial integral converged numerically".to_string(),
            );
            status = CheckStatus::ConclusionFailure;
        } else {
            findings.push("radial integral could not be classified".to_string());
            status = CheckStatus::Inconclusive;
        }
    }

    Ok(DivergenceReport {
        dim: field.dim(),
        mass,
        delta0: d0,
        tau0,
        tail,
        lhs,
        status,
        findings,
    })
}

/// One `(α, β)` member of [`ExponentPairsReport`].
#[derive(Clone, Debug, Serialize)]
pub struct ExponentPairOutcome {
    pub alpha: f64,
    pub beta: f64,
    pub integral: MeanIntegral,
    pub diverges: bool,
}

/// Divergence of `∫ dr/(r^α · q^β)` for supplied exponent pairs, under the
/// hypotheses of [`check_divergence`] plus a side condition (`Φ(1) < ∞`, or
/// means ≥ 1 on a set of radii of positive measure).
#[derive(Clone, Debug, Serialize)]
pub struct ExponentPairsReport {
    pub base: DivergenceReport,
    pub side_condition: String,
    pub side_condition_ok: bool,
    pub pairs: Vec<ExponentPairOutcome>,
    pub status: CheckStatus,
    pub findings: Vec<String>,
}

/// Checks divergence of `∫ dr/(r^α · q^β)` for each pair; requires `α ≥ 1`
/// and `0 < β ≤ α`.
pub fn check_exponent_pairs(
    field: &ScalarField,
    phi: &MonotoneFn,
    pairs: &[(f64, f64)],
    cfg: &BoundConfig,
) -> Result<ExponentPairsReport, BoundsError> {
    for &(alpha, beta) in pairs {
        if !alpha.is_finite() || alpha < 1.0 || !beta.is_finite() || beta <= 0.0 || beta > alpha {
            return Err(BoundsError::BadExponents { alpha, beta });
        }
    }
    let base = check_divergence(field, phi, None, cfg)?;
    let profile = radial_profile(field, phi, cfg)?;

    let phi_at_one = phi.eval_f64(1.0);
    let (side_condition, side_condition_ok) = if phi_at_one.is_finite() {
        (format!("gauge finite at 1 (Φ(1) = {phi_at_one})"), true)
    } else {
        let mut measure = 0.0;
        for w in profile.points.windows(2) {
            if w[0].mean >= 1.0 && w[1].mean >= 1.0 {
                measure += w[1].r - w[0].r;
            }
        }
        if measure > 0.0 {
            (
                format!("means ≥ 1 on radii of measure {measure:.6}"),
                true,
            )
        } else {
            (
                "gauge infinite at 1 and means nowhere ≥ 1".to_string(),
                false,
            )
        }
    };

    let mut findings = Vec::new();
    let mut status = base.status;
    if !side_condition_ok {
        findings.push(format!("side condition fails: {side_condition}"));
        status = CheckStatus::HypothesisFailure;
    }

    let mut outcomes = Vec::with_capacity(pairs.len());
    for &(alpha, beta) in pairs {
        let integral = mean_integral(&profile, alpha, beta, &cfg.ladder);
        let diverges = integral.verdict.diverges() || integral.grows_logarithmically;
        if !diverges && status == CheckStatus::Confirmed {
            findings.push(format!(
                "integral with exponents ({alpha}, {beta}) did not certify divergence"
            ));
            status = if integral.verdict.converges() {
                CheckStatus::ConclusionFailure
            } else {
                CheckStatus::Inconclusive
            };
        }
        outcomes.push(ExponentPairOutcome {
            alpha,
            beta,
            integral,
            diverges,
        });
    }

    Ok(ExponentPairsReport {
        base,
        side_condition,
        side_condition_ok,
        pairs: outcomes,
        status,
        findings,
    })
}

/// Where a localized check runs.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Site {
    /// The ball `B(center, radius)`, rescaled to the unit ball.
    Interior { center: Vec<f64>, radius: f64 },
    /// `{|x| > radius}` with weight `|x|^{-2n}`, transported to the unit
    /// ball by inversion.
    Exterior { radius: f64 },
    /// All of `ℝⁿ` under the chordal density `(1+|x|²)^{-n}`; implies both
    /// an interior and an exterior finding.
    Spherical,
}

/// The exterior/ball mass identity under inversion.
#[derive(Clone, Debug, Serialize)]
pub struct MassMatch {
    pub exterior: MassEstimate,
    pub ball: MassEstimate,
    /// Relative gap of the two values (0 when both are infinite).
    pub rel_gap: Option<f64>,
    pub ok: bool,
}

/// Result of a localized divergence check.
#[derive(Clone, Debug, Serialize)]
pub struct LocalizedReport {
    pub site: Site,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spherical_mass: Option<MassEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_match: Option<MassMatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_floors_ok: Option<bool>,
    pub delegates: Vec<DivergenceReport>,
    pub status: CheckStatus,
    pub findings: Vec<String>,
}

fn worst_status(statuses: impl IntoIterator<Item = CheckStatus>) -> CheckStatus {
    let mut worst = CheckStatus::Confirmed;
    for s in statuses {
        worst = match (worst, s) {
            (CheckStatus::HypothesisFailure, _) | (_, CheckStatus::HypothesisFailure) => {
                CheckStatus::HypothesisFailure
            }
            (CheckStatus::ConclusionFailure, _) | (_, CheckStatus::ConclusionFailure) => {
                CheckStatus::ConclusionFailure
            }
            (CheckStatus::Inconclusive, _) | (_, CheckStatus::Inconclusive) => {
                CheckStatus::Inconclusive
            }
            _ => CheckStatus::Confirmed,
        };
    }
    worst
}

/// Runs [`check_divergence`] transported to the given site.
pub fn check_localized(
    field: &ScalarField,
    phi: &MonotoneFn,
    site: Site,
    delta0: Option<f64>,
    cfg: &BoundConfig,
) -> Result<LocalizedReport, BoundsError> {
    match site {
        Site::Interior { ref center, radius } => {
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(BoundsError::BadSite(format!(
                    "interior radius {radius} must be positive and finite"
                )));
            }
            let inner = field.recentred(center)?.rescaled(radius);
            let delegate = check_divergence(&inner, phi, delta0, cfg)?;
            let status = delegate.status;
            Ok(LocalizedReport {
                site,
                spherical_mass: None,
                mass_match: None,
                density_floors_ok: None,
                delegates: vec![delegate],
                status,
                findings: vec![format!(
                    "field recentred and rescaled from the interior ball of radius {radius}"
                )],
            })
        }
        Site::Exterior { radius } => {
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(BoundsError::BadSite(format!(
                    "exterior radius {radius} must be positive and finite"
                )));
            }
            let mut findings = Vec::new();
            let exterior = gauge_mass(
                field,
                phi,
                MassRegion::Exterior { radius },
                &cfg.samples,
                &cfg.ladder,
            )?;
            let ball = gauge_mass(
                &field.inverted(),
                phi,
                MassRegion::Ball { radius: 1.0 / radius },
                &cfg.samples,
                &cfg.ladder,
            )?;
            let (rel_gap, ok) = match (exterior.value(), ball.value()) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() => {
                    let gap = (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
                    (Some(gap), gap <= MASS_MATCH_RTOL)
                }
                (Some(a), Some(b)) if a.is_infinite() && b.is_infinite() => (Some(0.0), true),
                _ => (None, false),
            };
            if !ok {
                findings.push(
                    "weighted exterior mass and inverted-field ball mass disagree".to_string(),
                );
            }
            let mass_match = MassMatch {
                exterior,
                ball,
                rel_gap,
                ok,
            };
            let unit_field = field.rescaled(radius).inverted();
            let delegate = check_divergence(&unit_field, phi, delta0, cfg)?;
            let status = if ok {
                delegate.status
            } else {
                worst_status([delegate.status, CheckStatus::Inconclusive])
            };
            findings.push(format!(
                "exterior of radius {radius} transported to the unit ball by inversion"
            ));
            Ok(LocalizedReport {
                site,
                spherical_mass: None,
                mass_match: Some(mass_match),
                density_floors_ok: None,
                delegates: vec![delegate],
                status,
                findings,
            })
        }
        Site::Spherical => {
            let dim = field.dim();
            let mut findings = Vec::new();
            // The chordal density dominates (1+ρ²)^{-n} on {|x| ≤ ρ} and
            // 2^{-n}|x|^{-2n} on {|x| ≥ 1}; probe both floors on a grid.
            let mut floors_ok = true;
            let rho: f64 = 2.0;
            for k in 0..64 {
                let r = rho * (k as f64 + 0.5) / 64.0;
                let mut p = vec![0.0; dim];
                p[0] = r;
                floors_ok &= spherical_density(&p)
                    >= (1.0 + rho * rho).powi(-(dim as i32)) - 1e-15;
            }
            for k in 0..64 {
                let r = 1.0 + k as f64 * 0.5;
                let mut p = vec![0.0; dim];
                p[0] = r;
                floors_ok &= spherical_density(&p)
                    >= 2f64.powi(-(dim as i32)) * r.powi(-2 * dim as i32) - 1e-15;
            }
            let spherical_mass = gauge_mass(
                field,
                phi,
                MassRegion::Spherical,
                &cfg.samples,
                &cfg.ladder,
            )?;
            let mut hypothesis = CheckStatus::Confirmed;
            match spherical_mass.verdict.kind {
                VerdictKind::Diverges => {
                    findings.push(
                        "chordal-weighted mass is infinite; the localized finiteness hypotheses \
                         do not follow"
                            .to_string(),
                    );
                    hypothesis = CheckStatus::HypothesisFailure;
                }
                VerdictKind::Inconclusive => {
                    findings.push("chordal-weighted mass could not be classified".to_string());
                    hypothesis = CheckStatus::Inconclusive;
                }
                VerdictKind::Converges => {
                    findings.push(
                        "finite chordal-weighted mass dominates both localized masses \
                         (density floors (1+ρ²)^{-n} inside, 2^{-n}|x|^{-2n} outside)"
                            .to_string(),
                    );
                }
            }
            let interior = check_divergence(field, phi, delta0, cfg)?;
            let exterior = check_divergence(&field.inverted(), phi, delta0, cfg)?;
            let status = worst_status([hypothesis, interior.status, exterior.status]);
            Ok(LocalizedReport {
                site,
                spherical_mass: Some(spherical_mass),
                mass_match: None,
                density_floors_ok: Some(floors_ok),
                delegates: vec![interior, exterior],
                status,
                findings,
            })
        }
    }
}
