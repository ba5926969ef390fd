//! Expression language for gauges `Φ(t)` and scalar fields `Q(x1, ..., xn)`.
//!
//! Grammar (infix, usual precedence, `^` right-associative and strongest):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'e' | 'pi' | 't' | 'x<k>' | 'x'
//!         | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func   := exp | log | pow | min | max | abs
//! ```
//!
//! The bare identifier `x` denotes the evaluation point as a vector and is
//! only meaningful as the argument of `abs`, where `abs(x)` is the Euclidean
//! norm `|x|`. Anywhere else it is a type error. A field whose coordinates
//! enter only through `abs(x)` is radial, and callers exploit that.
//!
//! Evaluation follows the extended conventions of the crate: division by zero
//! yields ∞, `log 0 = -∞`, and any NaN (such as `0/0` or `∞ - ∞`) is reported
//! as a non-evaluable point rather than silently propagated.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("column {col}: unexpected character {ch:?}")]
    UnexpectedChar { col: usize, ch: char },
    #[error("column {col}: unexpected {found}")]
    UnexpectedToken { col: usize, found: String },
    #[error("column {col}: unknown identifier {name:?}")]
    UnknownIdent { col: usize, name: String },
    #[error("column {col}: {func} expects {expected} argument(s), got {got}")]
    Arity {
        col: usize,
        func: String,
        expected: usize,
        got: usize,
    },
    #[error("column {col}: coordinate {name} exceeds dimension {dim}")]
    Dimension { col: usize, name: String, dim: usize },
    #[error("column {col}: the vector `x` is only valid inside abs(...)")]
    VectorOutsideAbs { col: usize },
    #[error("column {col}: variable {name} is not available here")]
    VariableNotAllowed { col: usize, name: String },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed number at column {col}")]
    BadNumber { col: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("expression is not evaluable at this point (NaN at {context})")]
    NotANumber { context: &'static str },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Pow,
    Min,
    Max,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Pow => "pow",
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Exp | Func::Log | Func::Abs => 1,
            Func::Pow | Func::Min | Func::Max => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Named constant `e` or `pi`, kept symbolic so printing round-trips.
    ConstE,
    ConstPi,
    /// The gauge argument `t`.
    VarT,
    /// Coordinate `x<k>`, zero-based index.
    Coord(usize),
    /// Euclidean norm of the evaluation point, printed as `abs(x)`.
    Norm,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// What variables an expression may reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Context {
    /// Gauge of one variable `t`.
    Gauge,
    /// Field over points of dimension `n`; coordinates `x1..xn` and `abs(x)`.
    Field { dim: usize },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
        }
    }
}

/// Token plus its 1-based starting column.
type Spanned = (Tok, usize);

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, col));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // Exponent suffix: 1e-3, 2.5E+10.
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text.parse().map_err(|_| ParseError::BadNumber { col })?;
                out.push((Tok::Num(v), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            _ => return Err(ParseError::UnexpectedChar { col, ch: c }),
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    ctx: Context,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.next() {
            Some((t, _)) if t == tok => Ok(()),
            Some((t, col)) => Err(ParseError::UnexpectedToken {
                col,
                found: t.to_string(),
            }),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.next();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.next();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.next();
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.next();
            // Right-associative; exponent may carry a unary minus.
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            None => Err(ParseError::UnexpectedEnd),
            Some((Tok::Num(v), _)) => Ok(Expr::Num(v)),
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some((Tok::Ident(name), col)) => self.ident(name, col),
            Some((t, col)) => Err(ParseError::UnexpectedToken {
                col,
                found: t.to_string(),
            }),
        }
    }

    fn ident(&mut self, name: String, col: usize) -> Result<Expr, ParseError> {
        let func = match name.as_str() {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "pow" => Some(Func::Pow),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            "abs" => Some(Func::Abs),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(Tok::LParen)?;
            let mut args = vec![self.expr()?];
            while let Some((Tok::Comma, _)) = self.peek() {
                self.next();
                args.push(self.expr()?);
            }
            self.expect(Tok::RParen)?;
            if args.len() != f.arity() {
                return Err(ParseError::Arity {
                    col,
                    func: f.name().to_string(),
                    expected: f.arity(),
                    got: args.len(),
                });
            }
            if f == Func::Abs && args[0] == Expr::Norm {
                // abs(x) already parsed as Norm by the x-branch below; keep
                // it wrapped so printing stays canonical.
                return Ok(Expr::Norm);
            }
            return Ok(Expr::Call(f, args));
        }
        match name.as_str() {
            "e" => Ok(Expr::ConstE),
            "pi" => Ok(Expr::ConstPi),
            "t" => match self.ctx {
                Context::Gauge => Ok(Expr::VarT),
                Context::Field { .. } => Err(ParseError::VariableNotAllowed { col, name }),
            },
            "x" => match self.ctx {
                Context::Field { .. } => Ok(Expr::Norm),
                Context::Gauge => Err(ParseError::VariableNotAllowed { col, name }),
            },
            _ => {
                if let Some(rest) = name.strip_prefix('x') {
                    if let Ok(k) = rest.parse::<usize>() {
                        if k == 0 {
                            return Err(ParseError::UnknownIdent { col, name });
                        }
                        return match self.ctx {
                            Context::Field { dim } => {
                                if k > dim {
                                    Err(ParseError::Dimension { col, name, dim })
                                } else {
                                    Ok(Expr::Coord(k - 1))
                                }
                            }
                            Context::Gauge => Err(ParseError::VariableNotAllowed { col, name }),
                        };
                    }
                }
                Err(ParseError::UnknownIdent { col, name })
            }
        }
    }
}

/// `x` outside `abs(...)` is only detectable after parsing: `Norm` stands for
/// `abs(x)`, so a bare vector never survives except as `Norm`, which is fine.
/// What must be rejected is `x` used where a scalar is needed without `abs`,
/// e.g. `x + 1`. The parser maps bare `x` to `Norm` optimistically; this walk
/// rejects the cases where the source spelled `x` without the `abs`.
fn reject_bare_vector(src: &str, ast: &Expr) -> Result<(), ParseError> {
    // A bare `x` token not immediately preceded by `abs(` in the token stream.
    let toks = lex(src).expect("already lexed once");
    for (i, (tok, col)) in toks.iter().enumerate() {
        if let Tok::Ident(name) = tok {
            if name == "x" {
                let inside_abs = i >= 2
                    && toks[i - 1].0 == Tok::LParen
                    && matches!(&toks[i - 2].0, Tok::Ident(f) if f == "abs")
                    && toks.get(i + 1).map(|t| &t.0) == Some(&Tok::RParen);
                if !inside_abs {
                    return Err(ParseError::VectorOutsideAbs { col: *col });
                }
            }
        }
    }
    let _ = ast;
    Ok(())
}

/// Parses `src` in the given variable context.
pub fn parse(src: &str, ctx: Context) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        ctx,
    };
    let ast = p.expr()?;
    if let Some((t, col)) = p.peek() {
        return Err(ParseError::UnexpectedToken {
            col: *col,
            found: t.to_string(),
        });
    }
    if matches!(ctx, Context::Field { .. }) {
        reject_bare_vector(src, &ast)?;
    }
    Ok(ast)
}

/// Parses a gauge expression in the single variable `t`.
pub fn parse_gauge(src: &str) -> Result<Expr, ParseError> {
    parse(src, Context::Gauge)
}

/// Parses a field expression over points of dimension `dim`.
pub fn parse_field(src: &str, dim: usize) -> Result<Expr, ParseError> {
    parse(src, Context::Field { dim })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Values bound during evaluation. For gauges only `t` is set; for fields
/// only the point.
#[derive(Clone, Copy)]
pub struct Bindings<'a> {
    pub t: f64,
    pub point: &'a [f64],
}

impl Expr {
    /// Evaluates with extended conventions. NaN anywhere is an error.
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        let v = self.eval_raw(b);
        if v.is_nan() {
            Err(EvalError::NotANumber {
                context: "expression evaluation",
            })
        } else {
            Ok(v)
        }
    }

    fn eval_raw(&self, b: &Bindings) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::ConstE => std::f64::consts::E,
            Expr::ConstPi => std::f64::consts::PI,
            Expr::VarT => b.t,
            Expr::Coord(k) => b.point[*k],
            Expr::Norm => b.point.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Expr::Neg(e) => -e.eval_raw(b),
            Expr::Bin(op, l, r) => {
                let lv = l.eval_raw(b);
                let rv = r.eval_raw(b);
                match op {
                    BinOp::Add => lv + rv,
                    BinOp::Sub => lv - rv,
                    BinOp::Mul => lv * rv,
                    BinOp::Div => lv / rv,
                    BinOp::Pow => lv.powf(rv),
                }
            }
            Expr::Call(f, args) => {
                let a0 = args[0].eval_raw(b);
                match f {
                    Func::Exp => a0.exp(),
                    Func::Log => a0.ln(),
                    Func::Abs => a0.abs(),
                    Func::Pow => a0.powf(args[1].eval_raw(b)),
                    Func::Min => a0.min(args[1].eval_raw(b)),
                    Func::Max => a0.max(args[1].eval_raw(b)),
                }
            }
        }
    }

    /// Whether coordinates enter only through `abs(x)`.
    pub fn is_radial(&self) -> bool {
        match self {
            Expr::Coord(_) => false,
            Expr::Num(_) | Expr::ConstE | Expr::ConstPi | Expr::VarT | Expr::Norm => true,
            Expr::Neg(e) => e.is_radial(),
            Expr::Bin(_, l, r) => l.is_radial() && r.is_radial(),
            Expr::Call(_, args) => args.iter().all(Expr::is_radial),
        }
    }

    /// Whether the expression references the point at all.
    pub fn uses_point(&self) -> bool {
        match self {
            Expr::Coord(_) | Expr::Norm => true,
            Expr::Num(_) | Expr::ConstE | Expr::ConstPi | Expr::VarT => false,
            Expr::Neg(e) => e.uses_point(),
            Expr::Bin(_, l, r) => l.uses_point() || r.uses_point(),
            Expr::Call(_, args) => args.iter().any(Expr::uses_point),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, _, _) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, _, _) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, _, _) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    /// Canonical form: minimal parentheses, `.` decimals via the shortest
    /// round-trip float encoding. `parse(format!("{e}"))` reproduces `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, need: u8, strict: bool) -> fmt::Result {
            let p = e.precedence();
            let parens = if strict { p <= need } else { p < need };
            if parens {
                write!(f, "(")?;
            }
            write!(f, "{e}")?;
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        match self {
            Expr::Num(v) => {
                if *v == v.trunc() && v.abs() < 1e15 {
                    write!(f, "{}", *v as i64)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::ConstE => write!(f, "e"),
            Expr::ConstPi => write!(f, "pi"),
            Expr::VarT => write!(f, "t"),
            Expr::Coord(k) => write!(f, "x{}", k + 1),
            Expr::Norm => write!(f, "abs(x)"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                child(f, e, 3, false)
            }
            Expr::Bin(op, l, r) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                // Left child binds at the operator level, right child one
                // tighter for the non-associative cases; `^` mirrors that
                // because it is right-associative.
                if *op == BinOp::Pow {
                    child(f, l, prec, true)?;
                    write!(f, "{sym}")?;
                    child(f, r, prec, false)
                } else {
                    child(f, l, prec, false)?;
                    write!(f, "{sym}")?;
                    child(f, r, prec, true)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev_t(src: &str, t: f64) -> f64 {
        parse_gauge(src)
            .unwrap()
            .eval(&Bindings { t, point: &[] })
            .unwrap()
    }

    fn ev_pt(src: &str, dim: usize, p: &[f64]) -> f64 {
        parse_field(src, dim)
            .unwrap()
            .eval(&Bindings { t: 0.0, point: p })
            .unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev_t("1+2*3", 0.0), 7.0);
        assert_eq!(ev_t("2^3^2", 0.0), 512.0); // right-assoc
        assert_eq!(ev_t("-2^2", 0.0), -4.0); // unary minus binds looser than ^
        assert_eq!(ev_t("(1+2)*3", 0.0), 9.0);
        assert_eq!(ev_t("2*t^2", 3.0), 18.0);
        assert_eq!(ev_t("6/3/2", 0.0), 1.0); // left-assoc
    }

    #[test]
    fn constants_and_functions() {
        assert!((ev_t("exp(1)", 0.0) - std::f64::consts::E).abs() < 1e-15);
        assert!((ev_t("log(e)", 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(ev_t("min(3,max(1,2))", 0.0), 2.0);
        assert_eq!(ev_t("pow(2,10)", 0.0), 1024.0);
        assert_eq!(ev_t("abs(-3)", 0.0), 3.0);
        assert!((ev_t("pi", 0.0) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn field_variables_and_radial_detection() {
        assert_eq!(ev_pt("x1+1", 2, &[0.5, 0.0]), 1.5);
        assert_eq!(ev_pt("abs(x)", 3, &[3.0, 0.0, 4.0]), 5.0);
        assert_eq!(ev_pt("1/abs(x)", 3, &[0.0, 2.0, 0.0]), 0.5);
        assert!(parse_field("1/abs(x)", 3).unwrap().is_radial());
        assert!(parse_field("log(e/abs(x))", 2).unwrap().is_radial());
        assert!(!parse_field("x1+1", 2).unwrap().is_radial());
        assert!(!parse_field("abs(x1)", 2).unwrap().is_radial());
    }

    #[test]
    fn extended_conventions() {
        assert_eq!(ev_pt("1/abs(x)", 2, &[0.0, 0.0]), f64::INFINITY);
        assert_eq!(ev_t("log(t)", 0.0), f64::NEG_INFINITY);
        let e = parse_gauge("t/t").unwrap();
        assert!(e.eval(&Bindings { t: 0.0, point: &[] }).is_err()); // 0/0
    }

    #[test]
    fn error_positions_are_1_based_columns() {
        match parse_gauge("exp(t^^)") {
            Err(ParseError::UnexpectedToken { col, .. }) => assert_eq!(col, 7),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_field("x3+1", 2) {
            Err(ParseError::Dimension { col, dim, .. }) => {
                assert_eq!((col, dim), (1, 2));
            }
            other => panic!("expected dimension error, got {other:?}"),
        }
        match parse_field("x+1", 2) {
            Err(ParseError::VectorOutsideAbs { col }) => assert_eq!(col, 1),
            other => panic!("expected vector error, got {other:?}"),
        }
        match parse_gauge("x1") {
            Err(ParseError::VariableNotAllowed { .. }) => {}
            other => panic!("expected variable error, got {other:?}"),
        }
    }

    #[test]
    fn printing_round_trips() {
        let field = Context::Field { dim: 3 };
        let cases = [
            ("1+2*3", Context::Gauge),
            ("2^3^2", Context::Gauge),
            ("-(t+1)", Context::Gauge),
            ("-t^2", Context::Gauge),
            ("(1+t)*(2-t)", Context::Gauge),
            ("exp(t^2)", Context::Gauge),
            ("log(e/abs(x))", field),
            ("min(x1,max(x2,0.5))", field),
            ("1/abs(x)", field),
            ("pow(t,2.5)", Context::Gauge),
            ("t^-2", Context::Gauge),
            ("2*t^2-t/3+0.125", Context::Gauge),
        ];
        for (src, ctx) in cases {
            let ast = parse(src, ctx).unwrap();
            let printed = format!("{ast}");
            let re = parse(&printed, ctx)
                .unwrap_or_else(|e| panic!("reprint of {src:?} -> {printed:?} failed: {e}"));
            assert_eq!(ast, re, "round trip of {src:?} via {printed:?}");
        }
    }
}
