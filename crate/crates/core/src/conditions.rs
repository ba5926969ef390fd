//! Divergence classification for convex gauge functions.
//!
//! For a non-decreasing gauge `Φ: [0,∞] → [0,∞]` with `H = log Φ`, six
//! integral tests are evaluated, each probing the growth of `Φ` in a
//! different coordinate system:
//!
//! * `c1` — `∫ H′(t) dt/t` over a tail `[Δ, ∞)`, using only the density
//!   (absolutely continuous part) of `H`;
//! * `c2` — the Stieltjes integral `∫ dH(t)/t` over `(Δ, ∞)`, which also
//!   counts jumps of `H`;
//! * `c3` — `∫ H(t) dt/t²` over `[Δ, ∞)`;
//! * `c4` — `∫ H(1/t) dt` over the head `(0, δ]`;
//! * `c5` — `∫ dη / H⁻¹(η)` over `[Δ*, ∞)`, in log-value space;
//! * `c6` — `∫ dτ / (τ · Φ⁻¹(τ))` over `[δ*, ∞)`, in value space.
//!
//! Tests `c2`–`c6` diverge or converge together; `c1` is dominated by `c2`
//! and agrees with it exactly when `H` has no jumps. The report records each
//! verdict together with a consistency check of those relations.
//!
//! Divergence does not depend on the cutoffs `Δ`, `δ`, `δ*`, `Δ*` as long as
//! they avoid the degenerate region where `log Φ` is infinite; defaults are
//! derived from the landmarks of `Φ` and can be overridden per test.

use serde::Serialize;
use thiserror::Error;

use crate::ext::ExtReal;
use crate::monotone::{Direction, MonotoneError, MonotoneFn};
use crate::quad::{
    self, classify_lower, classify_stieltjes_upper, classify_upper, IntegralVerdict, LadderConfig,
    QuadError, VerdictKind,
};

/// Why a gauge or a cutoff override was rejected.
#[derive(Debug, Error)]
pub enum ConditionsError {
    #[error("gauge must be non-decreasing")]
    NotNonDecreasing,
    #[error("gauge must be non-negative")]
    NegativeGauge,
    #[error("gauge is identically zero; log-gauge is everywhere -inf")]
    IdenticallyZero,
    #[error("cutoff {which} = {value} rejected: must be {requirement}")]
    BadCutoff {
        which: &'static str,
        requirement: String,
        value: f64,
    },
    #[error(transparent)]
    Monotone(#[from] MonotoneError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Options for [`evaluate_conditions`]. All cutoffs default to values derived
/// from the gauge's landmarks; see [`Cutoffs`] for their meaning.
#[derive(Clone, Debug, Default)]
pub struct ConditionsConfig {
    /// Start of the `t`-space tails (`Δ`, used by `c1`, `c2`, `c3`).
    pub tail_from: Option<f64>,
    /// End of the inverted head `(0, δ]` (used by `c4`).
    pub head_to: Option<f64>,
    /// Start of the value-space tail (`δ*`, used by `c6`).
    pub value_from: Option<f64>,
    /// Start of the log-value-space tail (`Δ*`, used by `c5`).
    pub log_value_from: Option<f64>,
    /// Declared absolute continuity of `log Φ`. When unset, inferred from a
    /// jump scan; declaring it tightens the `c1`/`c2` consistency check from
    /// one-sided domination to equivalence.
    pub absolutely_continuous: Option<bool>,
    /// Ladder classifier tuning shared by all six tests.
    pub quad: LadderConfig,
}

/// The cutoffs actually used, after defaulting and validation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cutoffs {
    /// `Δ`: the `t`-space tails `c1`, `c2`, `c3` integrate over `[Δ, ∞)`.
    pub tail_from: f64,
    /// `δ`: the inverted head `c4` integrates over `(0, δ]`.
    pub head_to: f64,
    /// `δ*`: the value-space tail `c6` integrates over `[δ*, ∞)`.
    pub value_from: f64,
    /// `Δ*`: the log-value-space tail `c5` integrates over `[Δ*, ∞)`.
    pub log_value_from: f64,
}

/// Gauge-level attributes recorded alongside the verdicts.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaugeFlags {
    /// Whether `log Φ` is treated as having no singular (jump) part.
    pub absolutely_continuous: bool,
    /// Midpoint-convexity of `Φ` on a probe grid (informational; the
    /// divergence tests themselves do not require convexity).
    pub convex: bool,
}

/// The six verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionVerdicts {
    pub c1: IntegralVerdict,
    pub c2: IntegralVerdict,
    pub c3: IntegralVerdict,
    pub c4: IntegralVerdict,
    pub c5: IntegralVerdict,
    pub c6: IntegralVerdict,
}

/// Cross-checks between the verdicts: `c2`–`c6` must agree wherever they are
/// conclusive, divergence of `c1` forces divergence of `c2`, and under
/// absolute continuity `c1` and `c2` must agree outright.
#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub consistent: bool,
    pub witnesses: Vec<String>,
}

/// Full classification output for one gauge.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    /// Text form of the gauge (parseable by `MonotoneFn::from_text`).
    pub phi: String,
    /// `sup {t : Φ(t) = 0}` (0 when `Φ` is positive away from the origin).
    pub t0: ExtReal,
    /// End of the initial plateau: `inf {t : Φ(t) > Φ(0)}`.
    pub tstar: ExtReal,
    /// `Φ(0)`, the starting value.
    pub tau0: ExtReal,
    /// Absent when `Φ` reaches `+∞` at a finite point, in which case every
    /// test diverges outright and no cutoffs are needed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Cutoffs>,
    pub flags: GaugeFlags,
    pub conditions: ConditionVerdicts,
    pub equivalence: Equivalence,
}

impl ConditionReport {
    /// Whether every conclusive test diverged.
    pub fn diverges(&self) -> bool {
        self.all_kinds()
            .iter()
            .any(|k| **k == VerdictKind::Diverges)
            && self.equivalence.consistent
    }

    fn all_kinds(&self) -> [&VerdictKind; 6] {
        let c = &self.conditions;
        [
            &c.c1.kind, &c.c2.kind, &c.c3.kind, &c.c4.kind, &c.c5.kind, &c.c6.kind,
        ]
    }
}

/// `log Φ` with exact simplification of exponential compositions.
pub fn log_gauge(phi: &MonotoneFn) -> Result<MonotoneFn, ConditionsError> {
    Ok(phi.logarithm()?)
}

fn verdict_diverges() -> IntegralVerdict {
    IntegralVerdict {
        kind: VerdictKind::Diverges,
        value: None,
        error_estimate: 0.0,
        tail_exponent: None,
        truncations: Vec::new(),
    }
}

fn verdict_converges(value: f64, error_estimate: f64) -> IntegralVerdict {
    IntegralVerdict {
        kind: VerdictKind::Converges,
        value: Some(value),
        error_estimate,
        tail_exponent: None,
        truncations: Vec::new(),
    }
}

/// Evaluates all six divergence tests for the gauge `phi` and cross-checks
/// their verdicts.
pub fn evaluate_conditions(
    phi: &MonotoneFn,
    cfg: &ConditionsConfig,
) -> Result<ConditionReport, ConditionsError> {
    if phi.direction() != Direction::NonDecreasing {
        return Err(ConditionsError::NotNonDecreasing);
    }
    if !phi.is_nonnegative() {
        return Err(ConditionsError::NegativeGauge);
    }
    if phi.at_infinity() == 0.0 {
        return Err(ConditionsError::IdenticallyZero);
    }

    let t0 = phi.zero_set_sup();
    let tstar = phi.initial_plateau_end();
    let tau0 = phi.at_zero();

    let h = phi.logarithm()?;
    let ac = match cfg.absolutely_continuous {
        Some(declared) => declared,
        None => h.jumps_within(0.0, 1e300).is_empty(),
    };
    let flags = GaugeFlags {
        absolutely_continuous: ac,
        convex: crate::monotone::check_convexity(phi, &[]).convex,
    };

    // A gauge that reaches +∞ at a finite point diverges under every test:
    // the log-gauge acquires an infinite increment that no tail cutoff can
    // avoid.
    if phi.infinity_onset().is_finite() {
        let div = verdict_diverges();
        let conditions = ConditionVerdicts {
            c1: div.clone(),
            c2: div.clone(),
            c3: div.clone(),
            c4: div.clone(),
            c5: div.clone(),
            c6: div,
        };
        let equivalence = check_equivalence(ac, &conditions);
        return Ok(ConditionReport {
            phi: phi.to_text(),
            t0: ExtReal::new(t0).unwrap(),
            tstar: ExtReal::new(tstar).unwrap(),
            tau0: ExtReal::new(tau0).unwrap(),
            cutoffs: None,
            flags,
            conditions,
            equivalence,
        });
    }

    let cutoffs = resolve_cutoffs(cfg, t0, tstar, tau0, phi)?;
    let phi_inv = phi.inverse()?;
    // First point where the log-gauge is non-negative; the sign splits in
    // `c3` and `c4` happen there.
    let t_unit = phi_inv.eval_f64(1.0);

    let conditions = ConditionVerdicts {
        c1: condition_density(&h, cutoffs.tail_from, &cfg.quad)?,
        c2: condition_stieltjes(&h, cutoffs.tail_from, &cfg.quad)?,
        c3: condition_level(&h, phi, t_unit, cutoffs.tail_from, &cfg.quad)?,
        c4: condition_inverted_head(&h, phi, t_unit, cutoffs.head_to, &cfg.quad)?,
        c5: condition_log_value(&h, cutoffs.log_value_from, &cfg.quad)?,
        c6: condition_value(&phi_inv, cutoffs.value_from, &cfg.quad)?,
    };
    let equivalence = check_equivalence(ac, &conditions);

    Ok(ConditionReport {
        phi: phi.to_text(),
        t0: ExtReal::new(t0).unwrap(),
        tstar: ExtReal::new(tstar).unwrap(),
        tau0: ExtReal::new(tau0).unwrap(),
        cutoffs: Some(cutoffs),
        flags,
        conditions,
        equivalence,
    })
}

/// The cutoffs [`evaluate_conditions`] would pick for `phi` with no
/// overrides. Used by callers that need a single canonical threshold (for
/// example a value-space start `δ* > Φ(0)`).
pub fn default_cutoffs(phi: &MonotoneFn) -> Result<Cutoffs, ConditionsError> {
    let t0 = phi.zero_set_sup();
    let tstar = phi.initial_plateau_end();
    let tau0 = phi.at_zero();
    resolve_cutoffs(&ConditionsConfig::default(), t0, tstar, tau0, phi)
}

fn resolve_cutoffs(
    cfg: &ConditionsConfig,
    t0: f64,
    tstar: f64,
    tau0: f64,
    phi: &MonotoneFn,
) -> Result<Cutoffs, ConditionsError> {
    let tstar_cap = if tstar.is_finite() { tstar } else { 0.0 };
    let tail_from = match cfg.tail_from {
        Some(v) => {
            if !v.is_finite() || v <= 0.0 || v <= t0 {
                return Err(ConditionsError::BadCutoff {
                    which: "tail_from",
                    requirement: format!("finite and > max(0, {t0}) (past the zero set)"),
                    value: v,
                });
            }
            v
        }
        None => 1f64.max(2.0 * t0).max(tstar_cap + 1.0),
    };
    let head_to = match cfg.head_to {
        Some(v) => {
            if !v.is_finite() || v <= 0.0 || v * t0 >= 1.0 {
                return Err(ConditionsError::BadCutoff {
                    which: "head_to",
                    requirement: format!("in (0, 1/{t0}) so the inverted gauge stays positive"),
                    value: v,
                });
            }
            v
        }
        None => 1.0 / tail_from,
    };
    let value_from = match cfg.value_from {
        Some(v) => {
            if !v.is_finite() || v <= 0.0 || v <= tau0 {
                return Err(ConditionsError::BadCutoff {
                    which: "value_from",
                    requirement: format!("finite and > max(0, {tau0}) (above the starting value)"),
                    value: v,
                });
            }
            v
        }
        None => (std::f64::consts::E * tau0).max(phi.eval_f64(tail_from)),
    };
    let log_value_from = match cfg.log_value_from {
        Some(v) => {
            if !v.is_finite() || v <= tau0.ln() {
                return Err(ConditionsError::BadCutoff {
                    which: "log_value_from",
                    requirement: format!("finite and > ln(starting value) = {}", tau0.ln()),
                    value: v,
                });
            }
            v
        }
        None => value_from.ln(),
    };
    Ok(Cutoffs {
        tail_from,
        head_to,
        value_from,
        log_value_from,
    })
}

/// `c1`: `∫_Δ^∞ H′(t) dt/t` over the absolutely continuous part of `H`.
fn condition_density(
    h: &MonotoneFn,
    from: f64,
    cfg: &LadderConfig,
) -> Result<IntegralVerdict, ConditionsError> {
    let cuts = h.breakpoints_within(from, from * 2f64.powi(41));
    Ok(classify_upper(&|t| h.density(t) / t, from, &cuts, cfg)?)
}

/// `c2`: Stieltjes `∫_(Δ,∞) dH(t)/t`, jumps included.
fn condition_stieltjes(
    h: &MonotoneFn,
    from: f64,
    cfg: &LadderConfig,
) -> Result<IntegralVerdict, ConditionsError> {
    Ok(classify_stieltjes_upper(&|t| 1.0 / t, h, from, cfg)?)
}

/// `c3`: `∫_Δ^∞ H(t) dt/t²`. Where `H < 0` (gauge below 1) the integrand is
/// negative but absolutely integrable, so that stretch is evaluated as a
/// proper signed integral and only the non-negative tail goes through the
/// ladder classifier.
fn condition_level(
    h: &MonotoneFn,
    phi: &MonotoneFn,
    t_unit: f64,
    from: f64,
    cfg: &LadderConfig,
) -> Result<IntegralVerdict, ConditionsError> {
    let f = |t: f64| h.eval_f64(t) / (t * t);
    let cuts = h.breakpoints_within(from, from * 2f64.powi(41));
    if t_unit <= from {
        return Ok(classify_upper(&f, from, &cuts, cfg)?);
    }
    if t_unit.is_infinite() {
        // The gauge never reaches 1: `H` is negative, bounded, and
        // non-decreasing, so the integral converges absolutely. Sum a long
        // geometric stretch and bracket the remainder between the current
        // and limiting levels of `H`.
        let far = from * 2f64.powi(40);
        let (main, qerr) = quad::integrate(&f, from, far, &cuts, cfg.panel_tol);
        let level_far = h.eval_f64(far);
        let level_inf = phi.at_infinity().ln();
        let tail_mid = (level_far + level_inf) / (2.0 * far);
        let tail_err = (level_inf - level_far).abs() / (2.0 * far);
        return Ok(verdict_converges(main + tail_mid, qerr + tail_err));
    }
    let head_cuts = h.breakpoints_within(from, t_unit);
    let (head, head_err) = quad::integrate(&f, from, t_unit, &head_cuts, cfg.panel_tol);
    let tail_cuts = h.breakpoints_within(t_unit, t_unit * 2f64.powi(41));
    let tail = classify_upper(&f, t_unit, &tail_cuts, cfg)?;
    Ok(offset_verdict(tail, head, head_err))
}

/// `c4`: `∫_0^δ H(1/t) dt`. Mirror of `c3`: near `t = 0` the integrand is
/// eventually non-negative and classified by the shrinking ladder; any
/// stretch where the gauge sits below 1 contributes a bounded signed piece.
fn condition_inverted_head(
    h: &MonotoneFn,
    phi: &MonotoneFn,
    t_unit: f64,
    to: f64,
    cfg: &LadderConfig,
) -> Result<IntegralVerdict, ConditionsError> {
    let g = |t: f64| h.eval_f64(1.0 / t);
    let cuts: Vec<f64> = h
        .breakpoints_within(1.0 / to, 1e300)
        .into_iter()
        .map(|b| 1.0 / b)
        .filter(|b| b.is_finite() && *b > 0.0)
        .collect();
    let split = 1.0 / t_unit;
    if split >= to {
        return Ok(classify_lower(&g, to, &cuts, cfg)?);
    }
    if split == 0.0 {
        // The gauge never reaches 1, so the integrand is negative and
        // bounded (it tends to `ln Φ(∞)` at the origin): a proper integral.
        debug_assert!(phi.at_infinity() > 0.0);
        let (value, err) = quad::integrate(&g, 0.0, to, &cuts, cfg.panel_tol);
        return Ok(verdict_converges(value, err));
    }
    let signed_cuts: Vec<f64> = cuts.iter().copied().filter(|&c| c > split).collect();
    let (head, head_err) = quad::integrate(&g, split, to, &signed_cuts, cfg.panel_tol);
    let tail = classify_lower(&g, split, &cuts, cfg)?;
    Ok(offset_verdict(tail, head, head_err))
}

/// `c5`: `∫_{Δ*}^∞ dη / H⁻¹(η)` with `H⁻¹(η) = inf { t : log Φ(t) ≥ η }`.
/// The inverse is evaluated pointwise in `t`-space; going through
/// `Φ⁻¹(e^η)` instead would overflow `e^η` long before the ladder tops out.
/// The start may be negative (log-value space), so a proper head is
/// integrated up to a positive anchor and the geometric ladder runs from
/// there.
fn condition_log_value(
    h: &MonotoneFn,
    from: f64,
    cfg: &LadderConfig,
) -> Result<IntegralVerdict, ConditionsError> {
    let f = |eta: f64| 1.0 / h.infimum_inverse_at(eta);
    // Jumps of H⁻¹ sit at the levels H attains around its own breakpoints.
    let mut cuts: Vec<f64> = Vec::new();
    for b in h.breakpoints_within(0.0, 1e300) {
        let v = h.eval_f64(b);
        if v.is_finite() && v > from {
            cuts.push(v);
        }
    }
    let anchor = 1f64.max(from + 1.0);
    let head_cuts: Vec<f64> = cuts.iter().copied().filter(|&c| c < anchor).collect();
    let (head, head_err) = quad::integrate(&f, from, anchor, &head_cuts, cfg.panel_tol);
    let tail = classify_upper(&f, anchor, &cuts, cfg)?;
    Ok(offset_verdict(tail, head, head_err))
}

/// `c6`: `∫_{δ*}^∞ dτ / (τ · Φ⁻¹(τ))`.
pub(crate) fn condition_value(
    phi_inv: &MonotoneFn,
    from: f64,
    cfg: &LadderConfig,
) -> Result<IntegralVerdict, ConditionsError> {
    let f = |tau: f64| 1.0 / (tau * phi_inv.eval_f64(tau));
    let cuts = phi_inv.breakpoints_within(from, 1e300);
    Ok(classify_upper(&f, from, &cuts, cfg)?)
}

/// Adds a finite signed head to a classified tail: the verdict kind is the
/// tail's, the value (when certified) gains the head, and reported partial
/// sums are shifted accordingly.
fn offset_verdict(mut tail: IntegralVerdict, head: f64, head_err: f64) -> IntegralVerdict {
    if let Some(v) = tail.value.as_mut() {
        *v += head;
    }
    tail.error_estimate += head_err;
    for tr in &mut tail.truncations {
        tr.partial += head;
    }
    tail
}

fn check_equivalence(ac: bool, c: &ConditionVerdicts) -> Equivalence {
    let labelled = [
        ("c2", &c.c2.kind),
        ("c3", &c.c3.kind),
        ("c4", &c.c4.kind),
        ("c5", &c.c5.kind),
        ("c6", &c.c6.kind),
    ];
    let word = |k: &VerdictKind| match k {
        VerdictKind::Converges => "converges",
        VerdictKind::Diverges => "diverges",
        VerdictKind::Inconclusive => "is inconclusive",
    };
    let mut witnesses = Vec::new();
    for i in 0..labelled.len() {
        for j in i + 1..labelled.len() {
            let (ni, ki) = labelled[i];
            let (nj, kj) = labelled[j];
            if *ki != VerdictKind::Inconclusive && *kj != VerdictKind::Inconclusive && ki != kj {
                witnesses.push(format!("{ni} {} but {nj} {}", word(ki), word(kj)));
            }
        }
    }
    if c.c1.kind == VerdictKind::Diverges && c.c2.kind == VerdictKind::Converges {
        witnesses.push("c1 diverges but c2 converges (c2 dominates c1)".to_string());
    }
    if ac
        && c.c1.kind != VerdictKind::Inconclusive
        && c.c2.kind != VerdictKind::Inconclusive
        && c.c1.kind != c.c2.kind
    {
        witnesses.push(format!(
            "log-gauge declared absolutely continuous yet c1 {} while c2 {}",
            word(&c.c1.kind),
            word(&c.c2.kind)
        ));
    }
    Equivalence {
        consistent: witnesses.is_empty(),
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ConditionsConfig {
        ConditionsConfig::default()
    }

    fn kinds(r: &ConditionReport) -> [VerdictKind; 6] {
        let c = &r.conditions;
        [
            c.c1.kind, c.c2.kind, c.c3.kind, c.c4.kind, c.c5.kind, c.c6.kind,
        ]
    }

    #[test]
    fn exponential_gauge_diverges_everywhere() {
        let phi = MonotoneFn::exp();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Diverges; 6]);
        assert!(r.equivalence.consistent);
        assert!(r.diverges());
        assert!(r.flags.absolutely_continuous);
        assert!(r.flags.convex);
    }

    #[test]
    fn stretched_exponential_converges_everywhere() {
        // Φ = exp(√t): H = √t exactly, H'/t = t^{-3/2}/2.
        let phi =
            MonotoneFn::compose(MonotoneFn::exp_pow(1.0).unwrap(), MonotoneFn::power(0.5).unwrap())
                .unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Converges; 6]);
        assert!(r.equivalence.consistent);
        assert!(!r.diverges());
        // ∫_1^∞ t^{-3/2}/2 dt = 1.
        let c1 = &r.conditions.c1;
        assert!((c1.value.unwrap() - 1.0).abs() < 1e-6, "{c1:?}");
    }

    #[test]
    fn square_exponential_diverges_everywhere() {
        // Φ = exp(t²).
        let phi = MonotoneFn::exp_pow(2.0).unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Diverges; 6]);
        assert!(r.equivalence.consistent);
    }

    #[test]
    fn polynomial_gauge_converges_with_exact_head() {
        // Φ = t²: H = 2 ln t, cutoffs Δ = 1, δ = 1.
        let phi = MonotoneFn::power(2.0).unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Converges; 6]);
        assert!(r.equivalence.consistent);
        let cut = r.cutoffs.unwrap();
        assert_eq!(cut.tail_from, 1.0);
        assert_eq!(cut.head_to, 1.0);
        // c4 = ∫_0^1 2 ln(1/t) dt = 2 exactly.
        let c4 = &r.conditions.c4;
        assert!((c4.value.unwrap() - 2.0).abs() < 1e-6, "{c4:?}");
        // c3 = ∫_1^∞ 2 ln t / t² dt = 2 as well.
        let c3 = &r.conditions.c3;
        assert!((c3.value.unwrap() - 2.0).abs() < 1e-4, "{c3:?}");
        // δ* = max(e·0, Φ(1)) = 1, so the log-value test starts at 0 and
        // exercises the head-plus-ladder path.
        assert_eq!(cut.log_value_from, 0.0);
    }

    #[test]
    fn affine_gauge_converges() {
        // Φ = 1 + t: Φ⁻¹(τ) = τ - 1, c6 integrand ~ 1/τ² converges.
        let phi = MonotoneFn::affine(1.0, 1.0).unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Converges; 6]);
        assert!(r.equivalence.consistent);
    }

    #[test]
    fn gauge_below_one_everywhere_is_consistent() {
        // Φ ramps from 0 up to 1/2 and stays there: every test converges
        // (c3 and c4 through their all-negative branches).
        let phi = MonotoneFn::from_pairs(&[(0.0, 0.0), (1.0, 0.5)], Some(0.5)).unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Converges; 6]);
        assert!(r.equivalence.consistent);
        // c3 value is negative: H ≤ ln(1/2) < 0 beyond the ramp.
        assert!(r.conditions.c3.value.unwrap() < 0.0);
        assert!(r.conditions.c4.value.unwrap() < 0.0);
    }

    #[test]
    fn bounded_gauge_above_one_converges() {
        let phi = MonotoneFn::from_pairs(&[(0.0, 1.0), (2.0, 5.0)], Some(5.0)).unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Converges; 6]);
        assert!(r.equivalence.consistent);
    }

    #[test]
    fn blowup_at_finite_point_diverges_outright() {
        let phi = MonotoneFn::from_pairs(
            &[(0.0, 1.0), (3.0, 10.0), (3.0, f64::INFINITY)],
            Some(f64::INFINITY),
        )
        .unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert_eq!(kinds(&r), [VerdictKind::Diverges; 6]);
        assert!(r.cutoffs.is_none());
        assert!(r.equivalence.consistent);
        assert!(r.diverges());
    }

    #[test]
    fn staircase_log_gauge_separates_density_from_stieltjes() {
        // H jumps by 2^k at t = 2^k: the density part of H is zero, so c1
        // converges, yet the jump masses make every other test diverge.
        let mut pairs = vec![(0.0, 0.0)];
        let mut level = 0.0;
        for k in 1..=45 {
            let t = 2f64.powi(k);
            pairs.push((t, level));
            level += t;
            pairs.push((t, level));
        }
        let h = MonotoneFn::from_pairs(&pairs, Some(level)).unwrap();
        let phi = MonotoneFn::compose(MonotoneFn::exp_pow(1.0).unwrap(), h).unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        assert!(!r.flags.absolutely_continuous);
        assert_eq!(r.conditions.c1.kind, VerdictKind::Converges);
        assert_eq!(r.conditions.c2.kind, VerdictKind::Diverges);
        assert_eq!(r.conditions.c3.kind, VerdictKind::Diverges);
        assert_eq!(r.conditions.c4.kind, VerdictKind::Diverges);
        assert_eq!(r.conditions.c5.kind, VerdictKind::Diverges);
        assert_eq!(r.conditions.c6.kind, VerdictKind::Diverges);
        assert!(r.equivalence.consistent, "{:?}", r.equivalence.witnesses);
    }

    #[test]
    fn unit_jump_staircase_converges_consistently() {
        // H jumps by 1 at t = 2^k: Stieltjes mass Σ 2^{-k} = 1 converges and
        // H(t) ≈ log₂ t keeps the other tests convergent too.
        let mut pairs = vec![(0.0, 0.0)];
        for k in 1..=45 {
            let t = 2f64.powi(k);
            pairs.push((t, (k - 1) as f64));
            pairs.push((t, k as f64));
        }
        let h = MonotoneFn::from_pairs(&pairs, Some(45.0)).unwrap();
        let phi = MonotoneFn::compose(MonotoneFn::exp_pow(1.0).unwrap(), h).unwrap();
        let cfg = ConditionsConfig {
            tail_from: Some(1.0),
            ..defaults()
        };
        let r = evaluate_conditions(&phi, &cfg).unwrap();
        assert_eq!(r.conditions.c1.kind, VerdictKind::Converges);
        let c2 = &r.conditions.c2;
        assert_eq!(c2.kind, VerdictKind::Converges);
        // Mass above Δ = 1: Σ_{k≥1} 2^{-k}·1 = 1 (up to the last rung).
        assert!((c2.value.unwrap() - 1.0).abs() < 1e-9, "{c2:?}");
        assert!(r.equivalence.consistent, "{:?}", r.equivalence.witnesses);
    }

    #[test]
    fn delayed_gauge_shifts_cutoffs_past_zero_set() {
        // Φ = 0 on [0, 4], then ramps: t₀ = 4 forces Δ ≥ 8.
        let phi = MonotoneFn::from_pairs(
            &[(0.0, 0.0), (4.0, 0.0), (6.0, 10.0)],
            Some(f64::INFINITY),
        )
        .unwrap();
        let r = evaluate_conditions(&phi, &defaults()).unwrap();
        let cut = r.cutoffs.unwrap();
        assert!(cut.tail_from >= 8.0);
        assert!(cut.head_to <= 1.0 / 8.0);
        assert!(r.equivalence.consistent);
    }

    #[test]
    fn cutoff_overrides_validated() {
        let phi = MonotoneFn::from_pairs(
            &[(0.0, 0.0), (1.0, 0.0), (2.0, 3.0)],
            Some(f64::INFINITY),
        )
        .unwrap();
        let bad_tail = ConditionsConfig {
            tail_from: Some(0.5),
            ..defaults()
        };
        assert!(matches!(
            evaluate_conditions(&phi, &bad_tail),
            Err(ConditionsError::BadCutoff { which: "tail_from", .. })
        ));
        let bad_head = ConditionsConfig {
            head_to: Some(2.0),
            ..defaults()
        };
        assert!(matches!(
            evaluate_conditions(&phi, &bad_head),
            Err(ConditionsError::BadCutoff { which: "head_to", .. })
        ));
        let phi_hi = MonotoneFn::affine(2.0, 1.0).unwrap();
        let bad_value = ConditionsConfig {
            value_from: Some(1.5),
            ..defaults()
        };
        assert!(matches!(
            evaluate_conditions(&phi_hi, &bad_value),
            Err(ConditionsError::BadCutoff { which: "value_from", .. })
        ));
        let bad_log = ConditionsConfig {
            log_value_from: Some(2f64.ln() - 1.0),
            ..defaults()
        };
        assert!(matches!(
            evaluate_conditions(&phi_hi, &bad_log),
            Err(ConditionsError::BadCutoff { which: "log_value_from", .. })
        ));
    }

    #[test]
    fn rejects_degenerate_gauges() {
        assert!(matches!(
            evaluate_conditions(&MonotoneFn::constant(0.0), &defaults()),
            Err(ConditionsError::IdenticallyZero)
        ));
        assert!(matches!(
            evaluate_conditions(&MonotoneFn::reciprocal_map(), &defaults()),
            Err(ConditionsError::NotNonDecreasing)
        ));
    }

    #[test]
    fn verdicts_stable_under_cutoff_choice() {
        // Divergence is a tail property: moving the cutoffs must not flip
        // any verdict for a cleanly divergent and a cleanly convergent gauge.
        for (phi, expect) in [
            (MonotoneFn::exp(), VerdictKind::Diverges),
            (MonotoneFn::exp_pow(0.5).unwrap(), VerdictKind::Converges),
        ] {
            for tail in [1.0, 3.0, 17.5] {
                let cfg = ConditionsConfig {
                    tail_from: Some(tail),
                    head_to: Some(0.25 / tail),
                    ..defaults()
                };
                let r = evaluate_conditions(&phi, &cfg).unwrap();
                assert_eq!(kinds(&r), [expect; 6], "tail_from = {tail}");
                assert!(r.equivalence.consistent);
            }
        }
    }
}
