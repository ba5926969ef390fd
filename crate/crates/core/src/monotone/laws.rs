//! Identities and inequalities between inverses of compositions.
//!
//! For a continuous, strictly decreasing bijection `ψ` of `[0, ∞]` and any
//! monotone `φ ≥ 0`, the inverse of `ψ∘φ` equals `φ⁻¹∘ψ⁻¹` everywhere, while
//! the inverse of `φ∘ψ` is only bounded above by `ψ⁻¹∘φ⁻¹`, with strict
//! inequality possible at countably many points (values of plateaus of `φ`).
//! [`check_composition_laws`] measures both numerically.

use super::{Direction, MonotoneError, MonotoneFn};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A point where the inner-reversed inequality was measured as strict (or,
/// in the violation list, where it failed beyond tolerance).
#[derive(Clone, Copy, Debug)]
pub struct StrictPoint {
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct LawReport {
    /// Largest relative gap between `(ψ∘φ)⁻¹` and `φ⁻¹∘ψ⁻¹` over the probes.
    pub reversed_outer_max_gap: f64,
    /// Probes where `(φ∘ψ)⁻¹ < ψ⁻¹∘φ⁻¹` strictly (beyond tolerance).
    pub reversed_inner_strict: Vec<StrictPoint>,
    /// Probes where `(φ∘ψ)⁻¹ > ψ⁻¹∘φ⁻¹` beyond tolerance — the inequality
    /// law would be broken; expected to stay empty.
    pub reversed_inner_violations: Vec<StrictPoint>,
}

/// Relative gap that treats infinities exactly: equal values (finite or not)
/// have gap 0, mixed finite/infinite gap ∞.
fn rel_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a.is_infinite() || b.is_infinite() {
        f64::INFINITY
    } else {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }
}

/// Signed excess of `a` over `b` on the same relative scale; `-∞` when
/// `a ≤ b` trivially by an infinity.
fn rel_excess(a: f64, b: f64) -> f64 {
    if a <= b {
        // Covers equal infinities and everything below.
        return if a == b { 0.0 } else { f64::NEG_INFINITY };
    }
    if a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    (a - b) / a.abs().max(b.abs()).max(1.0)
}

pub fn check_composition_laws(
    psi: &MonotoneFn,
    phi: &MonotoneFn,
    taus: &[f64],
) -> Result<LawReport, MonotoneError> {
    // ψ must reverse sense and exchange the endpoints of [0, ∞] without
    // jumps or plateaus; otherwise neither law applies.
    if psi.direction() != Direction::NonIncreasing {
        return Err(MonotoneError::NotReversingBijection {
            reason: "it is not sense-reversing",
        });
    }
    if psi.at_zero() != f64::INFINITY {
        return Err(MonotoneError::NotReversingBijection {
            reason: "it does not map 0 to ∞",
        });
    }
    if psi.at_infinity() != 0.0 {
        return Err(MonotoneError::NotReversingBijection {
            reason: "it does not map ∞ to 0",
        });
    }
    if !psi.jumps_within(0.0, f64::INFINITY).is_empty() {
        return Err(MonotoneError::NotReversingBijection {
            reason: "it has jumps",
        });
    }
    if !psi.constancy_intervals().is_empty() {
        return Err(MonotoneError::NotReversingBijection {
            reason: "it has constancy intervals",
        });
    }
    if !phi.is_nonnegative() {
        return Err(MonotoneError::NegativeValues);
    }

    let outer_lhs = MonotoneFn::compose(psi.clone(), phi.clone())?.inverse()?;
    let inner_lhs = MonotoneFn::compose(phi.clone(), psi.clone())?.inverse()?;
    let psi_inv = psi.inverse()?;
    let phi_inv = phi.inverse()?;

    let mut max_gap: f64 = 0.0;
    let mut strict = Vec::new();
    let mut violations = Vec::new();
    // Resolution floor of the bisection-based inverse evaluations.
    let tol = 1e-9;
    for &tau in taus {
        if tau.is_nan() || tau < 0.0 {
            continue;
        }
        let lhs = outer_lhs.eval_f64(tau);
        let rhs = phi_inv.eval_f64(psi_inv.eval_f64(tau).max(0.0));
        max_gap = max_gap.max(rel_gap(lhs, rhs));

        let lhs = inner_lhs.eval_f64(tau);
        let rhs = psi_inv.eval_f64(phi_inv.eval_f64(tau).max(0.0));
        let excess = rel_excess(lhs, rhs);
        if excess > tol {
            violations.push(StrictPoint { tau, lhs, rhs });
        } else if rel_excess(rhs, lhs) > tol {
            strict.push(StrictPoint { tau, lhs, rhs });
        }
    }
    Ok(LawReport {
        reversed_outer_max_gap: max_gap,
        reversed_inner_strict: strict,
        reversed_inner_violations: violations,
    })
}

/// Counterexample to midpoint-style convexity: the chord at `(t1, t2, λ)`
/// lies below the function value.
#[derive(Clone, Copy, Debug)]
pub struct ConvexityWitness {
    pub t1: f64,
    pub t2: f64,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct ConvexityReport {
    pub convex: bool,
    pub witness: Option<ConvexityWitness>,
}

/// Numerically probes `f(λx + (1-λ)y) ≤ λf(x) + (1-λ)f(y)` on knot points,
/// a geometric grid, caller-supplied extras and a deterministic batch of
/// random pairs. A report with `convex: false` carries the first witness.
pub fn check_convexity(f: &MonotoneFn, extra: &[f64]) -> ConvexityReport {
    let mut pts: Vec<f64> = Vec::new();
    for k in 0..=24 {
        pts.push(1e-3 * 10f64.powf(k as f64 / 4.0));
    }
    pts.extend(f.breakpoints_within(0.0, 1e12));
    pts.push(0.0);
    pts.extend(extra.iter().copied().filter(|v| v.is_finite() && *v >= 0.0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        pairs.push((w[0], w[1]));
    }
    for i in 0..pts.len().saturating_sub(2) {
        pairs.push((pts[i], pts[i + 2]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x51d);
    for _ in 0..100 {
        let a = rng.gen_range(-3.0f64..6.0).exp2();
        let b = rng.gen_range(-3.0f64..6.0).exp2();
        pairs.push((a.min(b), a.max(b)));
    }

    for &(x, y) in &pairs {
        if !(y > x) {
            continue;
        }
        for lambda in [0.25, 0.5, 0.75] {
            let mid = lambda * x + (1.0 - lambda) * y;
            let lhs = f.eval_f64(mid);
            let fx = f.eval_f64(x);
            let fy = f.eval_f64(y);
            if fx.is_infinite() || fy.is_infinite() {
                // The chord value is ∞; the inequality holds trivially.
                continue;
            }
            let rhs = lambda * fx + (1.0 - lambda) * fy;
            let slack = 1e-9 * lhs.abs().max(rhs.abs()).max(1.0);
            if lhs > rhs + slack {
                return ConvexityReport {
                    convex: false,
                    witness: Some(ConvexityWitness {
                        t1: x,
                        t2: y,
                        lambda,
                        lhs,
                        rhs,
                    }),
                };
            }
        }
    }
    ConvexityReport {
        convex: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe_taus() -> Vec<f64> {
        let mut taus = vec![0.0, 1e-6, 0.1, 0.5, 1.0, 2.0, 10.0, 1e4, f64::INFINITY];
        for k in 1..40 {
            taus.push((k as f64 / 7.0).exp());
        }
        taus
    }

    #[test]
    fn outer_reversed_law_is_an_identity() {
        let psi = MonotoneFn::reciprocal_map();
        let phi = MonotoneFn::power(2.0).unwrap();
        let report = check_composition_laws(&psi, &phi, &probe_taus()).unwrap();
        assert!(
            report.reversed_outer_max_gap <= 1e-9,
            "gap = {}",
            report.reversed_outer_max_gap
        );
        assert!(report.reversed_inner_violations.is_empty());
    }

    #[test]
    fn inner_reversed_law_is_strict_at_plateau_values() {
        let psi = MonotoneFn::reciprocal_map();
        // φ = step: 0 on [0, 1), 1 on [1, ∞]. Then φ∘ψ jumps at t = 1 and the
        // inequality is strict exactly at the plateau values 0 and 1.
        let phi =
            MonotoneFn::from_pairs(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)], None).unwrap();
        let report =
            check_composition_laws(&psi, &phi, &[0.0, 0.25, 0.5, 1.0, 2.0, f64::INFINITY])
                .unwrap();
        assert!(report.reversed_inner_violations.is_empty());
        let strict_at: Vec<f64> = report.reversed_inner_strict.iter().map(|p| p.tau).collect();
        assert!(strict_at.contains(&0.0), "strict points: {strict_at:?}");
        assert!(strict_at.contains(&1.0), "strict points: {strict_at:?}");
        assert!(!strict_at.contains(&0.5));
    }

    #[test]
    fn non_bijections_are_rejected() {
        let phi = MonotoneFn::power(2.0).unwrap();
        let rising = MonotoneFn::identity();
        assert!(matches!(
            check_composition_laws(&rising, &phi, &[1.0]),
            Err(MonotoneError::NotReversingBijection { .. })
        ));
        // Decreasing but bounded: maps 0 to 4, not to ∞.
        let bounded = MonotoneFn::from_pairs(&[(0.0, 4.0), (1.0, 0.0)], None).unwrap();
        assert!(matches!(
            check_composition_laws(&bounded, &phi, &[1.0]),
            Err(MonotoneError::NotReversingBijection { .. })
        ));
    }

    #[test]
    fn convexity_probe_accepts_and_rejects() {
        assert!(check_convexity(&MonotoneFn::power(2.0).unwrap(), &[]).convex);
        assert!(check_convexity(&MonotoneFn::exp(), &[]).convex);
        assert!(check_convexity(&MonotoneFn::constant(2.0), &[]).convex);
        // √t is concave: expect a witness.
        let root = MonotoneFn::power(0.5).unwrap();
        let report = check_convexity(&root, &[]);
        assert!(!report.convex);
        let w = report.witness.unwrap();
        assert!(w.lhs > w.rhs);
    }
}
