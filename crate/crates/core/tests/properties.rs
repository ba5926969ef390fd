//! Property-based checks of exact identities the library is built on:
//! generalized inverses against brute-force grid scans, composition and
//! conjugation laws, the layer-cake equality, substitution invariance of
//! truncated integrals, Stieltjes domination of the density part,
//! monotonicity of truncated mean integrals, and expression round-trips.

use intcond::bounds::{mean_integral, radial_profile, BoundConfig};
use intcond::conditions::{evaluate_conditions, ConditionsConfig};
use intcond::expr::{parse_field, parse_gauge};
use intcond::geometry::ScalarField;
use intcond::monotone::check_composition_laws;
use intcond::quad::{classify_stieltjes_upper, classify_upper, integrate, LadderConfig};
use intcond::{Direction, MonotoneFn, VerdictKind};
use proptest::collection::vec as pvec;
use proptest::prelude::*;

// ---------------------------------------------------------------------------
// Random piecewise-linear monotone functions
// ---------------------------------------------------------------------------

/// One building block of a piecewise-linear monotone function.
#[derive(Clone, Debug)]
enum Seg {
    /// Flat stretch of the given width.
    Plateau(f64),
    /// Jump of the given height at the current abscissa.
    Jump(f64),
    /// Linear stretch: (width, rise).
    Slope(f64, f64),
}

fn seg() -> impl Strategy<Value = Seg> {
    prop_oneof![
        (0.05f64..1.5).prop_map(Seg::Plateau),
        (0.05f64..2.0).prop_map(Seg::Jump),
        ((0.05f64..1.5), (0.05f64..2.0)).prop_map(|(dt, dv)| Seg::Slope(dt, dv)),
    ]
}

fn segs() -> impl Strategy<Value = Vec<Seg>> {
    pvec(seg(), 1..6)
}

/// Assembles the segments into knots, sense chosen by `rising`. Falling
/// functions clamp at zero, which may merge steps into plateaus.
fn build_pl(rising: bool, v0: f64, segs: &[Seg]) -> MonotoneFn {
    let mut t = 0.0;
    let mut v = v0;
    let mut pairs: Vec<(f64, f64)> = vec![(0.0, v0)];
    for s in segs {
        match *s {
            Seg::Plateau(dt) => {
                t += dt;
                pairs.push((t, v));
            }
            Seg::Jump(dv) => {
                let w = if rising { v + dv } else { (v - dv).max(0.0) };
                if w != v {
                    let len = pairs.len();
                    if len >= 2 && pairs[len - 1].0 == t && pairs[len - 2].0 == t {
                        // Consecutive jumps at one abscissa merge.
                        pairs[len - 1].1 = w;
                    } else {
                        if pairs.last() != Some(&(t, v)) {
                            pairs.push((t, v));
                        }
                        pairs.push((t, w));
                    }
                    v = w;
                }
            }
            Seg::Slope(dt, dv) => {
                t += dt;
                v = if rising { v + dv } else { (v - dv).max(0.0) };
                pairs.push((t, v));
            }
        }
    }
    MonotoneFn::from_pairs(&pairs, None).expect("segments assemble into a valid function")
}

fn span_of(segs: &[Seg]) -> f64 {
    segs.iter()
        .map(|s| match *s {
            Seg::Plateau(dt) | Seg::Slope(dt, _) => dt,
            Seg::Jump(_) => 0.0,
        })
        .sum()
}

const GRID: f64 = 1e-3;

/// Brute-force generalized inverse: first grid point whose value passes τ.
fn oracle(grid_lo_values: &[f64], rising: bool, tau: f64) -> f64 {
    let idx = if rising {
        grid_lo_values.partition_point(|&v| v < tau)
    } else {
        grid_lo_values.partition_point(|&v| v > tau)
    };
    if idx == grid_lo_values.len() {
        f64::INFINITY
    } else {
        idx as f64 * GRID
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The exact inverse agrees with a grid scan to within one grid step,
    /// including which side of infinity the answer lands on.
    #[test]
    fn inverse_matches_grid_scan(
        rising in any::<bool>(),
        v0 in 0.0f64..2.0,
        segs in segs(),
        units in pvec(0.0f64..1.0, 20),
    ) {
        let f = build_pl(rising, v0, &segs);
        // A constant assembly collapses to the non-decreasing reading.
        let rising = f.direction() == Direction::NonDecreasing;
        let g = f.inverse().unwrap();
        let span = span_of(&segs) + 1.0;
        let steps = (span / GRID) as usize + 1;
        let values: Vec<f64> = (0..=steps).map(|i| f.eval_f64(i as f64 * GRID)).collect();
        let (vmin, vmax) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let lo = (vmin - 0.3).max(0.0);
        let hi = vmax + 0.3;
        for u in units {
            let tau = lo + u * (hi - lo);
            let exact = g.eval_f64(tau);
            let scanned = oracle(&values, rising, tau);
            if exact.is_finite() || scanned.is_finite() {
                prop_assert!(
                    (exact - scanned).abs() <= GRID + 1e-9,
                    "tau = {tau}: exact {exact} vs scan {scanned} for {}",
                    f.to_text()
                );
            }
        }
    }

    /// `g(f(t)) ≤ t` always, with equality wherever `f` is not constant.
    #[test]
    fn inverse_of_value_never_overshoots(
        rising in any::<bool>(),
        v0 in 0.0f64..2.0,
        segs in segs(),
        units in pvec(0.0f64..1.0, 20),
    ) {
        let f = build_pl(rising, v0, &segs);
        let g = f.inverse().unwrap();
        let plateaus = f.constancy_intervals();
        let span = span_of(&segs) + 1.5;
        for u in units {
            let t = u * span;
            let back = g.eval_f64(f.eval_f64(t));
            prop_assert!(back <= t + 1e-9, "t = {t}: back {back} for {}", f.to_text());
            let margin = 1e-7;
            let flat = plateaus.iter().any(|p| t >= p.lo - margin && t <= p.hi + margin);
            if !flat {
                prop_assert!(
                    (back - t).abs() <= 1e-7 * (1.0 + t),
                    "t = {t}: back {back} off a plateau for {}",
                    f.to_text()
                );
            }
        }
    }

    /// Layer-cake equality: for non-decreasing `f` and any `T`,
    /// `∫_0^T f(t) dt = ∫_0^{f(T)} (T - min(g(τ), T)) dτ` with `g` the
    /// generalized inverse. Jumps and plateaus only move sets of measure
    /// zero, so both sides agree exactly.
    #[test]
    fn layer_cake_equality(
        v0 in 0.0f64..2.0,
        segs in segs(),
        u in 0.0f64..1.0,
    ) {
        let f = build_pl(true, v0, &segs);
        let g = f.inverse().unwrap();
        let t_end = 0.3 + u * (span_of(&segs) + 0.7);
        let cuts_t = f.breakpoints_within(0.0, t_end);
        let (lhs, err_l) = integrate(&|t| f.eval_f64(t), 0.0, t_end, &cuts_t, 1e-12);
        let m = f.eval_f64(t_end);
        if m <= 0.0 {
            prop_assert!(lhs.abs() <= 1e-10);
            return Ok(());
        }
        let mut cuts_v: Vec<f64> = cuts_t.iter().map(|&b| f.eval_f64(b)).collect();
        for j in f.jumps_within(0.0, t_end) {
            cuts_v.push(j.before);
            cuts_v.push(j.after);
        }
        let (rhs, err_r) = integrate(
            &|tau| (t_end - g.eval_f64(tau).min(t_end)).max(0.0),
            0.0,
            m,
            &cuts_v,
            1e-12,
        );
        prop_assert!(
            (lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()) + err_l + err_r,
            "lhs {lhs} vs rhs {rhs} at T = {t_end} for {}",
            f.to_text()
        );
    }
}

// ---------------------------------------------------------------------------
// Composition and conjugation laws
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum PhiChoice {
    Pl(f64, Vec<Seg>),
    Power(f64),
    Scaled(f64, f64),
    Affine(f64, f64),
    ExpPow(f64),
}

fn phi_choice() -> impl Strategy<Value = PhiChoice> {
    prop_oneof![
        3 => (0.0f64..2.0, segs()).prop_map(|(v0, s)| PhiChoice::Pl(v0, s)),
        1 => (0.5f64..3.0).prop_map(PhiChoice::Power),
        1 => ((0.3f64..3.0), (0.5f64..2.5)).prop_map(|(c, p)| PhiChoice::Scaled(c, p)),
        1 => ((0.0f64..2.0), (0.2f64..3.0)).prop_map(|(a, b)| PhiChoice::Affine(a, b)),
        1 => (0.3f64..1.8).prop_map(PhiChoice::ExpPow),
    ]
}

fn build_phi(choice: &PhiChoice) -> MonotoneFn {
    match choice {
        PhiChoice::Pl(v0, s) => build_pl(true, *v0, s),
        PhiChoice::Power(p) => MonotoneFn::power(*p).unwrap(),
        PhiChoice::Scaled(c, p) => MonotoneFn::scaled_power(*c, *p).unwrap(),
        PhiChoice::Affine(a, b) => MonotoneFn::affine(*a, *b).unwrap(),
        PhiChoice::ExpPow(p) => MonotoneFn::exp_pow(*p).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `(ψ∘φ)⁻¹ = φ⁻¹∘ψ⁻¹` exactly, and `(φ∘ψ)⁻¹ ≥ ψ⁻¹∘φ⁻¹` with strict
    /// probes confined to plateaus of `φ`, for any decreasing bijection `ψ`.
    #[test]
    fn reversal_laws(
        c in 0.25f64..4.0,
        p in 0.4f64..2.5,
        choice in phi_choice(),
        units in pvec(0.0f64..1.0, 10),
    ) {
        let psi = MonotoneFn::scaled_power(c, -p).unwrap();
        let phi = build_phi(&choice);
        let phi_inv = phi.inverse().unwrap();
        let plateaus = phi.constancy_intervals();
        let mut taus = vec![0.0, 1e-6, 1e-3, 1e3];
        for pl in &plateaus {
            if pl.value.is_finite() && pl.value >= 0.0 {
                taus.push(pl.value);
            }
        }
        taus.extend(units.iter().map(|u| u * 6.0));
        let rep = check_composition_laws(&psi, &phi, &taus).unwrap();
        prop_assert!(
            rep.reversed_outer_max_gap <= 1e-9,
            "identity gap {} for {}",
            rep.reversed_outer_max_gap,
            phi.to_text()
        );
        prop_assert!(
            rep.reversed_inner_violations.is_empty(),
            "inequality broken at {:?} for {}",
            rep.reversed_inner_violations,
            phi.to_text()
        );
        for s in &rep.reversed_inner_strict {
            let arg = phi_inv.eval_f64(s.tau);
            prop_assert!(
                plateaus.iter().any(|pl| arg >= pl.lo - 1e-6 && arg <= pl.hi + 1e-6),
                "strict point tau = {} lands at {arg}, off-plateau, for {}",
                s.tau,
                phi.to_text()
            );
        }
    }

    /// Exponential composition shifts inversion to log scale:
    /// `(exp∘H)⁻¹(τ) = H⁻¹(log τ)` for τ ≥ 1.
    #[test]
    fn exp_composition_inverts_on_log_scale(
        v0 in 0.0f64..2.0,
        segs in segs(),
        units in pvec(0.0f64..1.0, 12),
    ) {
        let h = build_pl(true, v0, &segs);
        let h_inv = h.inverse().unwrap();
        let phi = MonotoneFn::compose(MonotoneFn::exp(), h.clone()).unwrap();
        let phi_inv = phi.inverse().unwrap();
        let hmax = h.at_infinity();
        for u in units {
            let eta = u * (hmax + 1.0);
            let via_log = h_inv.eval_f64(eta);
            let direct = phi_inv.eval_f64(eta.exp());
            if via_log.is_infinite() || direct.is_infinite() {
                prop_assert_eq!(via_log, direct, "eta = {} for {}", eta, h.to_text());
            } else {
                prop_assert!(
                    (via_log - direct).abs() <= 1e-9 * (1.0 + via_log),
                    "eta = {eta}: {via_log} vs {direct} for {}",
                    h.to_text()
                );
            }
        }
    }

    /// Inverting a reciprocal conjugates the argument: `(1/φ)⁻¹(τ) = φ⁻¹(1/τ)`.
    #[test]
    fn reciprocal_inverse_conjugates_argument(
        choice in phi_choice(),
        units in pvec(0.0f64..1.0, 10),
    ) {
        let phi = build_phi(&choice);
        let psi = MonotoneFn::reciprocal_of(phi.clone()).unwrap();
        let psi_inv = psi.inverse().unwrap();
        let phi_inv = phi.inverse().unwrap();
        for u in units {
            let tau = 10f64.powf((u - 0.5) * 8.0);
            let lhs = psi_inv.eval_f64(tau);
            let rhs = phi_inv.eval_f64(1.0 / tau);
            if lhs.is_infinite() || rhs.is_infinite() {
                prop_assert_eq!(lhs, rhs, "tau = {} for {}", tau, phi.to_text());
            } else {
                prop_assert!(
                    (lhs - rhs).abs() <= 1e-9 * (1.0 + rhs),
                    "tau = {tau}: {lhs} vs {rhs} for {}",
                    phi.to_text()
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Integral identities and orderings
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Substituting `t = 1/u` maps `∫_Δ^T H(t)/t² dt` onto `∫_{1/T}^{1/Δ} H(1/u) du`.
    #[test]
    fn reciprocal_substitution_preserves_truncations(
        v0 in 0.0f64..2.0,
        segs in segs(),
        delta in 0.05f64..0.5,
        t_hi in 2.0f64..50.0,
    ) {
        let h = build_pl(true, v0, &segs);
        let cuts_t = h.breakpoints_within(delta, t_hi);
        let cuts_u: Vec<f64> = cuts_t.iter().map(|&b| 1.0 / b).collect();
        let (lhs, err_l) = integrate(
            &|t| h.eval_f64(t) / (t * t),
            delta,
            t_hi,
            &cuts_t,
            1e-12,
        );
        let (rhs, err_r) = integrate(
            &|u| h.eval_f64(1.0 / u),
            1.0 / t_hi,
            1.0 / delta,
            &cuts_u,
            1e-12,
        );
        prop_assert!(
            (lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()) + err_l + err_r,
            "lhs {lhs} vs rhs {rhs} on [{delta}, {t_hi}] for {}",
            h.to_text()
        );
    }

    /// The Stieltjes tail dominates its absolutely continuous part on every
    /// rung of the ladder: jumps only add mass.
    #[test]
    fn stieltjes_partials_dominate_density_partials(
        v0 in 0.0f64..2.0,
        segs in segs(),
        a in 0.2f64..1.0,
    ) {
        let h = build_pl(true, v0, &segs);
        let cfg = LadderConfig::default();
        let cuts = h.breakpoints_within(a, 1e300);
        let density = classify_upper(&|t| h.density(t) / t, a, &cuts, &cfg).unwrap();
        let stieltjes = classify_stieltjes_upper(&|t| 1.0 / t, &h, a, &cfg).unwrap();
        for (d, s) in density.truncations.iter().zip(stieltjes.truncations.iter()) {
            prop_assert!(
                (d.limit - s.limit).abs() <= 1e-9 * d.limit,
                "ladders misaligned: {} vs {}",
                d.limit,
                s.limit
            );
            prop_assert!(
                s.partial >= d.partial - 1e-9 * (1.0 + d.partial.abs()),
                "at T = {}: density part {} exceeds Stieltjes mass {} for {}",
                d.limit,
                d.partial,
                s.partial,
                h.to_text()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// For means bounded below by 1, a larger decay exponent can only shrink
    /// every truncated integral.
    #[test]
    fn mean_integral_shrinks_with_exponent(
        c in 1.0f64..3.0,
        p in 0.3f64..1.5,
        n in 2usize..5,
        alpha in 0.6f64..1.4,
        b1 in 0.5f64..2.0,
        b2 in 0.5f64..2.0,
    ) {
        let (beta_lo, beta_hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let field = ScalarField::from_expr(&format!("{c}/abs(x)^{p}"), n).unwrap();
        let profile = radial_profile(&field, &MonotoneFn::identity(), &BoundConfig::default())
            .unwrap();
        let ladder = LadderConfig::default();
        let wide = mean_integral(&profile, alpha, beta_lo, &ladder);
        let narrow = mean_integral(&profile, alpha, beta_hi, &ladder);
        for eps in [1e-6, 1e-3, 0.05, 0.4] {
            let w = wide.at(eps);
            let nv = narrow.at(eps);
            prop_assert!(
                w >= nv - 1e-9 * (1.0 + nv.abs()),
                "at eps = {eps}: beta {beta_lo} gives {w} < beta {beta_hi} gives {nv}"
            );
        }
        prop_assert!(wide.deepest() >= narrow.deepest() - 1e-9 * (1.0 + narrow.deepest().abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// Away from the critical exponent the six tests agree and classify
    /// `exp(t^p)` by which side of 1 the exponent falls on.
    #[test]
    fn divergence_tests_agree_on_exp_powers(
        p in prop_oneof![0.3f64..0.8, 1.2f64..2.2],
    ) {
        let phi = MonotoneFn::exp_pow(p).unwrap();
        let report = evaluate_conditions(&phi, &ConditionsConfig::default()).unwrap();
        prop_assert!(report.equivalence.consistent, "p = {p}: {:?}", report.equivalence);
        let want = if p < 1.0 { VerdictKind::Converges } else { VerdictKind::Diverges };
        let c = &report.conditions;
        for (name, verdict) in [
            ("density", &c.c1), ("stieltjes", &c.c2), ("tail", &c.c3),
            ("head", &c.c4), ("log-inverse", &c.c5), ("inverse", &c.c6),
        ] {
            prop_assert_eq!(verdict.kind, want, "p = {}: {} disagrees", p, name);
        }
    }
}

// ---------------------------------------------------------------------------
// Expression round-trips
// ---------------------------------------------------------------------------

fn number_literal() -> impl Strategy<Value = String> {
    prop_oneof![
        (1u32..1000).prop_map(|k| k.to_string()),
        (0.001f64..1000.0).prop_map(|x| format!("{x}")),
        (1i32..20, -6i32..7).prop_map(|(m, e)| format!("{m}e{e}")),
        Just("e".to_string()),
        Just("pi".to_string()),
    ]
}

/// Random well-formed expression over the given leaves, fully parenthesized
/// so precedence never changes the intended tree.
fn expr_string(leaves: Vec<String>) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![number_literal(), proptest::sample::select(leaves)];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), 0..5u8, inner.clone()).prop_map(|(a, op, b)| {
                let op = ["+", "-", "*", "/", "^"][op as usize];
                format!("({a} {op} {b})")
            }),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), 0..3u8).prop_map(|(a, f)| {
                let f = ["exp", "log", "abs"][f as usize];
                format!("{f}({a})")
            }),
            (inner.clone(), inner, 0..3u8).prop_map(|(a, b, f)| {
                let f = ["min", "max", "pow"][f as usize];
                format!("{f}({a}, {b})")
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Printing a parsed gauge expression and reparsing it restores the tree.
    #[test]
    fn gauge_expression_roundtrip(src in expr_string(vec!["t".to_string()])) {
        let first = parse_gauge(&src).unwrap();
        let printed = format!("{first}");
        let second = parse_gauge(&printed).unwrap();
        prop_assert_eq!(first, second, "{} -> {}", src, printed);
    }

    /// Same for field expressions over coordinates and the radius.
    #[test]
    fn field_expression_roundtrip(
        src in expr_string(
            ["x1", "x2", "x3", "abs(x)"].iter().map(|s| s.to_string()).collect(),
        ),
    ) {
        let first = parse_field(&src, 3).unwrap();
        let printed = format!("{first}");
        let second = parse_field(&printed, 3).unwrap();
        prop_assert_eq!(first, second, "{} -> {}", src, printed);
    }
}
