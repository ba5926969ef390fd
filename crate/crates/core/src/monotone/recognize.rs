//! Builds a [`MonotoneFn`] from a gauge expression in the variable `t`.
//!
//! Only expressions with recognizable monotone structure are accepted: the
//! closed-form families (`t`, `t^p`, `exp(t)`, `exp(t^p)`, `a + b*t`,
//! `a + b*log(t)`, constants) plus constant scalings, shifts, powers, and
//! chains of those through `exp` and `log`. Anything whose monotonicity
//! cannot be read off the syntax — `min`/`max`, sums of non-constant terms,
//! `abs` — is rejected with an explanation rather than silently approximated.

use super::{MonotoneError, MonotoneFn};
use crate::expr::{parse_gauge, BinOp, Expr, Func, ParseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaugeExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unsupported gauge expression: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Invalid(#[from] MonotoneError),
}

/// Evaluates a variable-free subexpression; `None` when `t` occurs.
fn fold(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::ConstE => Some(std::f64::consts::E),
        Expr::ConstPi => Some(std::f64::consts::PI),
        Expr::VarT | Expr::Coord(_) | Expr::Norm => None,
        Expr::Neg(x) => Some(-fold(x)?),
        Expr::Bin(op, l, r) => {
            let (a, b) = (fold(l)?, fold(r)?);
            Some(match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            })
        }
        Expr::Call(f, args) => {
            let a = fold(&args[0])?;
            Some(match f {
                Func::Exp => a.exp(),
                Func::Log => a.ln(),
                Func::Abs => a.abs(),
                Func::Pow => a.powf(fold(&args[1])?),
                Func::Min => a.min(fold(&args[1])?),
                Func::Max => a.max(fold(&args[1])?),
            })
        }
    }
}

/// `c · g` for a constant `c`, simplifying to a scaled power where possible.
fn scale(c: f64, inner: &Expr) -> Result<MonotoneFn, GaugeExprError> {
    if !c.is_finite() {
        return Err(GaugeExprError::Unsupported(format!(
            "scale factor {c} is not finite"
        )));
    }
    if c == 0.0 {
        return Ok(MonotoneFn::constant(0.0));
    }
    // Pure-power inner stays a single family.
    if let Some(p) = power_exponent(inner) {
        if c > 0.0 {
            return Ok(MonotoneFn::scaled_power(c, p)?);
        }
        return Ok(MonotoneFn::compose(
            MonotoneFn::affine(0.0, c)?,
            MonotoneFn::power(p)?,
        )?);
    }
    if is_log_of_t(inner) {
        return Ok(MonotoneFn::affine_log(0.0, c)?);
    }
    let g = recognize(inner)?;
    Ok(MonotoneFn::compose(MonotoneFn::affine(0.0, c)?, g)?)
}

/// `a + g` for a constant `a`, simplifying to affine families where possible.
fn shift(a: f64, inner: &Expr) -> Result<MonotoneFn, GaugeExprError> {
    if !a.is_finite() {
        return Err(GaugeExprError::Unsupported(format!(
            "shift {a} is not finite"
        )));
    }
    // a + b·t and a + b·log(t) in any operand order.
    if matches!(inner, Expr::VarT) {
        return Ok(MonotoneFn::affine(a, 1.0)?);
    }
    if is_log_of_t(inner) {
        return Ok(MonotoneFn::affine_log(a, 1.0)?);
    }
    if let Expr::Bin(BinOp::Mul, l, r) = inner {
        for (cst, var) in [(l, r), (r, l)] {
            if let Some(b) = fold(cst) {
                if matches!(var.as_ref(), Expr::VarT) && b.is_finite() && b != 0.0 {
                    return Ok(MonotoneFn::affine(a, b)?);
                }
                if is_log_of_t(var) && b.is_finite() && b != 0.0 {
                    return Ok(MonotoneFn::affine_log(a, b)?);
                }
            }
        }
    }
    if a == 0.0 {
        return recognize(inner);
    }
    let g = recognize(inner)?;
    Ok(MonotoneFn::compose(MonotoneFn::affine(a, 1.0)?, g)?)
}

/// The exponent when the expression is exactly `t^p` (or `pow(t, p)`, or
/// bare `t`), with a constant `p`.
fn power_exponent(e: &Expr) -> Option<f64> {
    match e {
        Expr::VarT => Some(1.0),
        Expr::Bin(BinOp::Pow, b, p) if matches!(b.as_ref(), Expr::VarT) => fold(p),
        Expr::Call(Func::Pow, args) if matches!(&args[0], Expr::VarT) => fold(&args[1]),
        _ => None,
    }
}

fn is_log_of_t(e: &Expr) -> bool {
    matches!(e, Expr::Call(Func::Log, args) if matches!(&args[0], Expr::VarT))
}

fn recognize(e: &Expr) -> Result<MonotoneFn, GaugeExprError> {
    if let Some(c) = fold(e) {
        if c.is_nan() {
            return Err(GaugeExprError::Unsupported(
                "constant evaluates to NaN".into(),
            ));
        }
        return Ok(MonotoneFn::constant(c));
    }
    if let Some(p) = power_exponent(e) {
        return Ok(MonotoneFn::power(p)?);
    }
    match e {
        Expr::Neg(x) => scale(-1.0, x),
        Expr::Call(Func::Exp, args) => {
            let inner = &args[0];
            if let Some(p) = power_exponent(inner) {
                if p > 0.0 {
                    return Ok(MonotoneFn::exp_pow(p)?);
                }
            }
            let g = recognize(inner)?;
            Ok(MonotoneFn::compose(MonotoneFn::exp(), g)?)
        }
        Expr::Call(Func::Log, args) => {
            let inner = &args[0];
            if matches!(inner, Expr::VarT) {
                return Ok(MonotoneFn::log_map());
            }
            let g = recognize(inner)?;
            Ok(MonotoneFn::compose(MonotoneFn::log_map(), g)?)
        }
        Expr::Bin(BinOp::Mul, l, r) => {
            if let Some(c) = fold(l) {
                return scale(c, r);
            }
            if let Some(c) = fold(r) {
                return scale(c, l);
            }
            Err(GaugeExprError::Unsupported(
                "product of two non-constant factors".into(),
            ))
        }
        Expr::Bin(BinOp::Div, l, r) => {
            if let Some(c) = fold(r) {
                if c == 0.0 {
                    return Err(GaugeExprError::Unsupported("division by zero".into()));
                }
                return scale(1.0 / c, l);
            }
            if let Some(c) = fold(l) {
                // c / g = (c·u^{-1}) ∘ g.
                if !(c > 0.0) || !c.is_finite() {
                    return Err(GaugeExprError::Unsupported(format!(
                        "reciprocal numerator must be a positive constant, got {c}"
                    )));
                }
                let g = recognize(r)?;
                return Ok(MonotoneFn::compose(
                    MonotoneFn::scaled_power(c, -1.0)?,
                    g,
                )?);
            }
            Err(GaugeExprError::Unsupported(
                "quotient of two non-constant terms".into(),
            ))
        }
        Expr::Bin(BinOp::Add, l, r) => {
            if let Some(a) = fold(l) {
                return shift(a, r);
            }
            if let Some(a) = fold(r) {
                return shift(a, l);
            }
            Err(GaugeExprError::Unsupported(
                "sum of two non-constant terms".into(),
            ))
        }
        Expr::Bin(BinOp::Sub, l, r) => {
            if let Some(c) = fold(r) {
                return shift(-c, l);
            }
            if let Some(c) = fold(l) {
                // c − g = (c + (−1)·u) ∘ g.
                let g = recognize(r)?;
                return Ok(MonotoneFn::compose(MonotoneFn::affine(c, -1.0)?, g)?);
            }
            Err(GaugeExprError::Unsupported(
                "difference of two non-constant terms".into(),
            ))
        }
        Expr::Bin(BinOp::Pow, b, p) => {
            let Some(pe) = fold(p) else {
                return Err(GaugeExprError::Unsupported(
                    "exponent must be constant".into(),
                ));
            };
            let g = recognize(b)?;
            Ok(MonotoneFn::compose(MonotoneFn::power(pe)?, g)?)
        }
        Expr::Call(Func::Pow, args) => {
            let Some(pe) = fold(&args[1]) else {
                return Err(GaugeExprError::Unsupported(
                    "exponent must be constant".into(),
                ));
            };
            let g = recognize(&args[0])?;
            Ok(MonotoneFn::compose(MonotoneFn::power(pe)?, g)?)
        }
        Expr::Call(f @ (Func::Min | Func::Max | Func::Abs), _) => {
            Err(GaugeExprError::Unsupported(format!(
                "`{}` has no recognizable monotone structure",
                match f {
                    Func::Min => "min",
                    Func::Max => "max",
                    _ => "abs",
                }
            )))
        }
        // parse_gauge admits neither coordinates nor `abs(x)`.
        Expr::Coord(_) | Expr::Norm => unreachable!("gauge context has no point variables"),
        Expr::Num(_) | Expr::ConstE | Expr::ConstPi => unreachable!("constants fold"),
        Expr::VarT => unreachable!("handled by power_exponent"),
    }
}

impl MonotoneFn {
    /// Parses a gauge expression in the single variable `t` — for example
    /// `"exp(t^2)"`, `"t^3"`, `"2 + 5*t"`, `"log(1 + t)"` — into the
    /// matching closed-form function. See the module docs for what is
    /// recognizable. For piecewise data or explicit family syntax use
    /// [`MonotoneFn::from_text`].
    pub fn from_expr(src: &str) -> Result<Self, GaugeExprError> {
        let ast = parse_gauge(src)?;
        recognize(&ast)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe(src: &str, t: f64) -> f64 {
        MonotoneFn::from_expr(src).unwrap().eval_f64(t)
    }

    #[test]
    fn families_come_out_exact() {
        assert_eq!(MonotoneFn::from_expr("t").unwrap().to_text(), "fam: pow 1");
        assert_eq!(
            MonotoneFn::from_expr("t^2").unwrap().to_text(),
            "fam: pow 2"
        );
        assert_eq!(
            MonotoneFn::from_expr("pow(t, 2)").unwrap().to_text(),
            "fam: pow 2"
        );
        assert_eq!(
            MonotoneFn::from_expr("exp(t)").unwrap().to_text(),
            "fam: exp"
        );
        assert_eq!(
            MonotoneFn::from_expr("exp(t^0.5)").unwrap().to_text(),
            "fam: exppow 0.5"
        );
        assert_eq!(
            MonotoneFn::from_expr("3*t^2").unwrap().to_text(),
            "fam: spow 3 2"
        );
        assert_eq!(
            MonotoneFn::from_expr("1 + 2*t").unwrap().to_text(),
            "fam: affine 1 2"
        );
        assert_eq!(
            MonotoneFn::from_expr("t + 1").unwrap().to_text(),
            "fam: affine 1 1"
        );
        assert_eq!(
            MonotoneFn::from_expr("2 + 3*log(t)").unwrap().to_text(),
            "fam: afflog 2 3"
        );
        assert_eq!(
            MonotoneFn::from_expr("log(t)").unwrap().to_text(),
            "fam: afflog 0 1"
        );
        assert_eq!(
            MonotoneFn::from_expr("pi").unwrap().to_text(),
            format!("fam: const {}", std::f64::consts::PI)
        );
    }

    #[test]
    fn chains_evaluate_correctly() {
        // 1/(1+t) through the reciprocal chain.
        assert!((probe("2/(1 + t)", 1.0) - 1.0).abs() < 1e-12);
        // exp(2t) via scaling inside the exponential.
        assert!((probe("exp(2*t)", 1.5) - 3.0f64.exp()).abs() < 1e-11);
        // (1+t)^2 via an outer power.
        assert!((probe("(1 + t)^2", 2.0) - 9.0).abs() < 1e-12);
        // log(1+t).
        assert!((probe("log(1 + t)", 1.0) - std::f64::consts::LN_2).abs() < 1e-12);
        // 5 − t is monotone (decreasing) and allowed.
        assert!((probe("5 - t", 2.0) - 3.0).abs() < 1e-12);
        // t/2 is a scaled power.
        assert_eq!(
            MonotoneFn::from_expr("t/2").unwrap().to_text(),
            "fam: spow 0.5 1"
        );
    }

    #[test]
    fn structureless_expressions_are_rejected() {
        for bad in ["t + t^2", "t*t", "min(t, 1)", "abs(t)", "t^t", "t/(1+t)"] {
            assert!(
                matches!(
                    MonotoneFn::from_expr(bad),
                    Err(GaugeExprError::Unsupported(_))
                ),
                "{bad} should be unsupported"
            );
        }
        assert!(matches!(
            MonotoneFn::from_expr("exp(t^^)"),
            Err(GaugeExprError::Parse(_))
        ));
        assert!(matches!(
            MonotoneFn::from_expr("abs(x)"),
            Err(GaugeExprError::Parse(_))
        ));
    }

    #[test]
    fn negative_structure_is_still_monotone() {
        let f = MonotoneFn::from_expr("-2*t").unwrap();
        assert_eq!(f.eval_f64(3.0), -6.0);
        assert_eq!(
            f.direction(),
            crate::monotone::Direction::NonIncreasing
        );
    }
}
