//! Compact text form for monotone functions.
//!
//! * `pl: (0, 1) (2, 5) (2, 7) (inf, 9)` — piecewise-linear knots; a repeated
//!   abscissa is a jump (left limit first), a final `(inf, v)` pins the value
//!   at ∞ (defaulting to the last value). Values may be `inf` or `-inf`.
//!   The `plmin:` variant evaluates to the smaller one-sided limit at a jump
//!   knot instead of the right limit — the convention inverses carry.
//! * `fam: pow 2` | `fam: spow c p` | `fam: exp` | `fam: exppow p` |
//!   `fam: const c` | `fam: affine a b` | `fam: afflog a b` — closed forms.
//! * `inv(F)` and `comp(F; G)` wrap the inverse of `F` and the composition
//!   `F ∘ G`.
//!
//! [`MonotoneFn::to_text`] prints a form that parses back to an identical
//! function.

use super::{Family, KnotSide, MonotoneFn, MonotoneError, Piecewise, Repr};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseTextError {
    #[error("expected {expected} at byte {at}")]
    Syntax { expected: &'static str, at: usize },
    #[error("bad number {token:?} at byte {at}")]
    Number { token: String, at: usize },
    #[error("unknown family {name:?}")]
    UnknownFamily { name: String },
    #[error("family {name} takes {expected} parameter(s), got {got}")]
    Arity {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Invalid(#[from] MonotoneError),
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<(), ParseTextError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(ParseTextError::Syntax {
                expected: match c {
                    '(' => "`(`",
                    ')' => "`)`",
                    ',' => "`,`",
                    ';' => "`;`",
                    _ => "punctuation",
                },
                at: self.pos,
            })
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    /// A bare token: letters, digits, `.`, `+`, `-`, `_`.
    fn token(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let end = rest
            .find(|c: char| !(c.is_alphanumeric() || "+-._".contains(c)))
            .unwrap_or(rest.len());
        self.pos = start + end;
        (start, &rest[..end])
    }

    fn number(&mut self) -> Result<f64, ParseTextError> {
        let (at, tok) = self.token();
        match tok {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => tok.parse::<f64>().map_err(|_| ParseTextError::Number {
                token: tok.to_string(),
                at,
            }),
        }
    }
}

pub(super) fn parse(src: &str) -> Result<MonotoneFn, ParseTextError> {
    let mut cur = Cursor { src, pos: 0 };
    let f = parse_fn(&mut cur)?;
    cur.skip_ws();
    if cur.pos != src.len() {
        return Err(ParseTextError::Syntax {
            expected: "end of input",
            at: cur.pos,
        });
    }
    Ok(f)
}

fn parse_fn(cur: &mut Cursor) -> Result<MonotoneFn, ParseTextError> {
    if cur.eat_keyword("plmin:") {
        return parse_piecewise(cur, KnotSide::Min);
    }
    if cur.eat_keyword("pl:") {
        return parse_piecewise(cur, KnotSide::Right);
    }
    if cur.eat_keyword("fam:") {
        return parse_family(cur);
    }
    if cur.eat_keyword("inv(") {
        let base = parse_fn(cur)?;
        cur.eat(')')?;
        return Ok(base.inverse()?);
    }
    if cur.eat_keyword("comp(") {
        let outer = parse_fn(cur)?;
        cur.eat(';')?;
        let inner = parse_fn(cur)?;
        cur.eat(')')?;
        return Ok(MonotoneFn::compose(outer, inner)?);
    }
    Err(ParseTextError::Syntax {
        expected: "`pl:`, `plmin:`, `fam:`, `inv(` or `comp(`",
        at: cur.pos,
    })
}

fn parse_piecewise(cur: &mut Cursor, side: KnotSide) -> Result<MonotoneFn, ParseTextError> {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut at_inf: Option<f64> = None;
    while cur.peek() == Some('(') {
        cur.eat('(')?;
        let t = cur.number()?;
        cur.eat(',')?;
        let v = cur.number()?;
        cur.eat(')')?;
        if t.is_infinite() {
            at_inf = Some(v);
            break;
        }
        pairs.push((t, v));
    }
    if pairs.is_empty() {
        return Err(ParseTextError::Syntax {
            expected: "at least one `(t, value)` pair",
            at: cur.pos,
        });
    }
    let pl = Piecewise::from_pairs(&pairs, at_inf, side)?;
    Ok(MonotoneFn::from_piecewise(pl))
}

fn parse_family(cur: &mut Cursor) -> Result<MonotoneFn, ParseTextError> {
    let (at, name) = cur.token();
    if name.is_empty() {
        return Err(ParseTextError::Syntax {
            expected: "a family name",
            at,
        });
    }
    let name_owned = name.to_string();
    let mut params: Vec<f64> = Vec::new();
    loop {
        cur.skip_ws();
        if cur.pos == cur.src.len() || matches!(cur.peek(), Some(')') | Some(';')) {
            break;
        }
        params.push(cur.number()?);
    }
    let need = |n: usize, label: &'static str| -> Result<(), ParseTextError> {
        if params.len() == n {
            Ok(())
        } else {
            Err(ParseTextError::Arity {
                name: label,
                expected: n,
                got: params.len(),
            })
        }
    };
    let f = match name_owned.as_str() {
        "pow" => {
            need(1, "pow")?;
            MonotoneFn::power(params[0])?
        }
        "spow" => {
            need(2, "spow")?;
            MonotoneFn::scaled_power(params[0], params[1])?
        }
        "exp" => {
            need(0, "exp")?;
            MonotoneFn::exp()
        }
        "exppow" => {
            need(1, "exppow")?;
            MonotoneFn::exp_pow(params[0])?
        }
        "const" => {
            need(1, "const")?;
            MonotoneFn::constant(params[0])
        }
        "affine" => {
            need(2, "affine")?;
            MonotoneFn::affine(params[0], params[1])?
        }
        "afflog" => {
            need(2, "afflog")?;
            MonotoneFn::affine_log(params[0], params[1])?
        }
        _ => return Err(ParseTextError::UnknownFamily { name: name_owned }),
    };
    Ok(f)
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        // Shortest representation that round-trips.
        format!("{v}")
    }
}

pub(super) fn print(f: &MonotoneFn) -> String {
    match &f.repr {
        Repr::Piecewise(pl) => {
            let mut s = String::from(match pl.side() {
                KnotSide::Right => "pl:",
                KnotSide::Min => "plmin:",
            });
            for k in pl.knots() {
                if k.left == k.right {
                    let _ = write!(s, " ({}, {})", fmt_num(k.t), fmt_num(k.left));
                } else {
                    let _ = write!(
                        s,
                        " ({}, {}) ({}, {})",
                        fmt_num(k.t),
                        fmt_num(k.left),
                        fmt_num(k.t),
                        fmt_num(k.right)
                    );
                }
            }
            let last = pl.knots().last().expect("piecewise is nonempty");
            if pl.at_infinity() != last.right {
                let _ = write!(s, " (inf, {})", fmt_num(pl.at_infinity()));
            }
            s
        }
        Repr::Analytic(fam) => match fam {
            Family::Constant(c) => format!("fam: const {}", fmt_num(*c)),
            Family::ScaledPower { c, p } if *c == 1.0 => format!("fam: pow {}", fmt_num(*p)),
            Family::ScaledPower { c, p } => {
                format!("fam: spow {} {}", fmt_num(*c), fmt_num(*p))
            }
            Family::ExpPow { p } if *p == 1.0 => "fam: exp".to_string(),
            Family::ExpPow { p } => format!("fam: exppow {}", fmt_num(*p)),
            Family::Affine { a, b } => format!("fam: affine {} {}", fmt_num(*a), fmt_num(*b)),
            Family::AffineLog { a, b } => {
                format!("fam: afflog {} {}", fmt_num(*a), fmt_num(*b))
            }
        },
        Repr::Composed { outer, inner } => format!("comp({}; {})", print(outer), print(inner)),
        Repr::InverseOf(base) => format!("inv({})", print(base)),
    }
}

impl MonotoneFn {
    /// Parses the text form described in [the module docs](self).
    pub fn from_text(src: &str) -> Result<Self, ParseTextError> {
        parse(src)
    }

    /// Prints a text form that parses back to an identical function.
    pub fn to_text(&self) -> String {
        print(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(src: &str) -> String {
        MonotoneFn::from_text(src).unwrap().to_text()
    }

    #[test]
    fn piecewise_forms() {
        assert_eq!(round_trip("pl: (0, 1) (2, 5)"), "pl: (0, 1) (2, 5)");
        // Jump written as a repeated abscissa survives the round trip.
        assert_eq!(
            round_trip("pl: (0,0) (1,0) (1,2)"),
            "pl: (0, 0) (1, 0) (1, 2)"
        );
        // A jump to ∞ and an explicit tail value.
        assert_eq!(
            round_trip("pl: (0, 0) (1, 1) (1, inf) (inf, inf)"),
            "pl: (0, 0) (1, 1) (1, inf)"
        );
        assert_eq!(
            round_trip("pl: (0, 2) (inf, 5)"),
            "pl: (0, 2) (inf, 5)"
        );
    }

    #[test]
    fn family_forms() {
        assert_eq!(round_trip("fam: pow 2"), "fam: pow 2");
        assert_eq!(round_trip("fam: spow 1 2"), "fam: pow 2");
        assert_eq!(round_trip("fam: spow 3 -1"), "fam: spow 3 -1");
        assert_eq!(round_trip("fam: exp"), "fam: exp");
        assert_eq!(round_trip("fam: exppow 0.5"), "fam: exppow 0.5");
        assert_eq!(round_trip("fam: const 4"), "fam: const 4");
        assert_eq!(round_trip("fam: affine 1 2"), "fam: affine 1 2");
        assert_eq!(round_trip("fam: afflog 0 1"), "fam: afflog 0 1");
    }

    #[test]
    fn nested_forms() {
        assert_eq!(
            round_trip("comp(fam: exp; fam: pow 2)"),
            "comp(fam: exp; fam: pow 2)"
        );
        // The inverse of a piecewise function materializes to piecewise form
        // with the infimum-side evaluation convention.
        let g = MonotoneFn::from_text("inv(pl: (0,0) (1,0) (1,2))").unwrap();
        assert_eq!(g.to_text(), "plmin: (0, 0) (0, 1) (2, 1) (2, inf)");
        assert_eq!(MonotoneFn::from_text(&g.to_text()).unwrap().eval_f64(2.0), 1.0);
        // Non-piecewise inverses stay symbolic.
        assert_eq!(
            round_trip("inv(comp(fam: exp; fam: pow 2))"),
            "inv(comp(fam: exp; fam: pow 2))"
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(
            MonotoneFn::from_text("pl:"),
            Err(ParseTextError::Syntax { .. })
        ));
        assert!(matches!(
            MonotoneFn::from_text("fam: pow"),
            Err(ParseTextError::Arity { expected: 1, got: 0, .. })
        ));
        assert!(matches!(
            MonotoneFn::from_text("fam: wobble 3"),
            Err(ParseTextError::UnknownFamily { .. })
        ));
        assert!(matches!(
            MonotoneFn::from_text("pl: (0, x)"),
            Err(ParseTextError::Number { .. })
        ));
        // Trailing garbage is rejected.
        assert!(matches!(
            MonotoneFn::from_text("fam: exp junk"),
            Err(ParseTextError::Number { .. })
        ));
        // Non-monotone data surfaces the underlying validation error.
        assert!(matches!(
            MonotoneFn::from_text("pl: (0,0) (1,2) (2,1)"),
            Err(ParseTextError::Invalid(_))
        ));
    }
}
