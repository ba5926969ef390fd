//! Closed-form monotone function families.
//!
//! Each family evaluates with the extended-real conventions of the crate
//! (`1/0 = ∞`, `log 0 = -∞`, `e^∞ = ∞`) and, where a closed form exists,
//! inverts exactly instead of falling back to bisection.

use super::{Constancy, Direction};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// `t ↦ c`.
    Constant(f64),
    /// `t ↦ c · t^p` with `c > 0`, `p ≠ 0`.
    ScaledPower { c: f64, p: f64 },
    /// `t ↦ exp(t^p)` with `p > 0`.
    ExpPow { p: f64 },
    /// `t ↦ a + b·t` with `b ≠ 0`.
    Affine { a: f64, b: f64 },
    /// `t ↦ a + b·log t` with `b ≠ 0`.
    AffineLog { a: f64, b: f64 },
}

impl Family {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Family::Constant(c) => c,
            Family::ScaledPower { c, p } => c * t.powf(p),
            Family::ExpPow { p } => t.powf(p).exp(),
            Family::Affine { a, b } => a + b * t,
            Family::AffineLog { a, b } => a + b * t.ln(),
        }
    }

    pub fn direction(self) -> Direction {
        let rising = match self {
            Family::Constant(_) => true,
            Family::ScaledPower { p, .. } => p > 0.0,
            Family::ExpPow { .. } => true,
            Family::Affine { b, .. } | Family::AffineLog { b, .. } => b > 0.0,
        };
        if rising {
            Direction::NonDecreasing
        } else {
            Direction::NonIncreasing
        }
    }

    /// Derivative at an interior point, with extended values at 0 and ∞.
    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Family::Constant(_) => 0.0,
            Family::ScaledPower { c, p } => c * p * t.powf(p - 1.0),
            Family::ExpPow { p } => t.powf(p).exp() * p * t.powf(p - 1.0),
            Family::Affine { b, .. } => b,
            Family::AffineLog { b, .. } => b / t,
        }
    }

    /// Closed-form generalized inverse at `tau ≥ 0`, when one is available.
    pub fn inverse_eval(self, tau: f64) -> Option<f64> {
        match self {
            Family::Constant(c) => Some(if c >= tau { 0.0 } else { f64::INFINITY }),
            Family::ScaledPower { c, p } => {
                // Rising: inf { t : c t^p ≥ τ }. Falling: inf { t : c t^p ≤ τ },
                // and the sign of p makes (τ/c)^(1/p) the answer either way,
                // including τ ∈ {0, ∞}.
                Some((tau / c).powf(p.recip()))
            }
            Family::ExpPow { p } => {
                if tau <= 1.0 {
                    Some(0.0)
                } else {
                    Some(tau.ln().powf(p.recip()))
                }
            }
            Family::Affine { a, b } if b > 0.0 && a >= 0.0 => {
                if tau <= a {
                    Some(0.0)
                } else if tau.is_infinite() {
                    Some(f64::INFINITY)
                } else {
                    Some((tau - a) / b)
                }
            }
            Family::AffineLog { a, b } if b > 0.0 => {
                // a + b ln t is a bijection of [0, ∞] for b > 0.
                Some(if tau.is_infinite() {
                    if tau > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    ((tau - a) / b).exp()
                })
            }
            // Remaining signed families are rejected before inversion;
            // bisection would handle them if they ever slipped through.
            _ => None,
        }
    }

    pub fn constancy_intervals(self) -> Vec<Constancy> {
        match self {
            Family::Constant(c) => vec![Constancy {
                lo: 0.0,
                hi: f64::INFINITY,
                closed_lo: true,
                closed_hi: true,
                value: c,
            }],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_evaluation() {
        let sq = Family::ScaledPower { c: 1.0, p: 2.0 };
        assert_eq!(sq.eval(0.0), 0.0);
        assert_eq!(sq.eval(3.0), 9.0);
        assert_eq!(sq.eval(f64::INFINITY), f64::INFINITY);

        let inv = Family::ScaledPower { c: 1.0, p: -1.0 };
        assert_eq!(inv.eval(0.0), f64::INFINITY);
        assert_eq!(inv.eval(f64::INFINITY), 0.0);
        assert_eq!(inv.direction(), Direction::NonIncreasing);

        let e = Family::ExpPow { p: 1.0 };
        assert_eq!(e.eval(0.0), 1.0);
        assert_eq!(e.eval(f64::INFINITY), f64::INFINITY);

        let lg = Family::AffineLog { a: 0.0, b: 1.0 };
        assert_eq!(lg.eval(0.0), f64::NEG_INFINITY);
        assert_eq!(lg.eval(1.0), 0.0);
        assert_eq!(lg.eval(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn closed_form_inverses() {
        let sq = Family::ScaledPower { c: 4.0, p: 2.0 };
        assert_eq!(sq.inverse_eval(16.0), Some(2.0));
        assert_eq!(sq.inverse_eval(0.0), Some(0.0));
        assert_eq!(sq.inverse_eval(f64::INFINITY), Some(f64::INFINITY));

        // Falling power: inf { t : 1/t ≤ τ }.
        let rec = Family::ScaledPower { c: 1.0, p: -1.0 };
        assert_eq!(rec.inverse_eval(2.0), Some(0.5));
        assert_eq!(rec.inverse_eval(0.0), Some(f64::INFINITY));
        assert_eq!(rec.inverse_eval(f64::INFINITY), Some(0.0));

        let e = Family::ExpPow { p: 1.0 };
        assert_eq!(e.inverse_eval(0.5), Some(0.0));
        assert_eq!(e.inverse_eval(1.0), Some(0.0));
        assert_eq!(e.inverse_eval(std::f64::consts::E), Some(1.0));

        let aff = Family::Affine { a: 1.0, b: 2.0 };
        assert_eq!(aff.inverse_eval(0.5), Some(0.0));
        assert_eq!(aff.inverse_eval(5.0), Some(2.0));
    }

    #[test]
    fn constant_has_a_full_line_plateau() {
        let c = Family::Constant(3.0).constancy_intervals();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].lo, c[0].hi, c[0].value), (0.0, f64::INFINITY, 3.0));
        assert!(Family::ScaledPower { c: 1.0, p: 1.0 }
            .constancy_intervals()
            .is_empty());
    }
}
