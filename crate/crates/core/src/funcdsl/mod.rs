//! A small expression language for the scalar functions of a scenario.
//!
//! Grammar (single variable `t`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)*
//! atom   := number | 't' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | log | sqrt
//! exponent := integer | '(' integer ')'
//! ```
//!
//! Exponents are non-negative integers so that differentiation stays total.

mod param;
mod parser;
pub mod poly;

use std::fmt;

pub use param::ParamFunction;
pub use parser::parse;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var,
    Const(f64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

// Smart constructors with constant folding. Used by `differentiate`.

fn constant(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

pub fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (constant(&a), constant(&b)) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (constant(&a), constant(&b)) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (constant(&a), constant(&b)) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (constant(&a), constant(&b)) {
        (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
        (Some(x), _) if x == 0.0 => Expr::Const(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub fn pow(base: Expr, n: u32) -> Expr {
    match (n, constant(&base)) {
        (0, _) => Expr::Const(1.0),
        (1, _) => base,
        (_, Some(c)) => Expr::Const(c.powi(n as i32)),
        _ => Expr::Pow(Box::new(base), n),
    }
}

pub fn call(f: Func, arg: Expr) -> Expr {
    Expr::Call(f, Box::new(arg))
}

impl Expr {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let v = match self {
            Expr::Var => t,
            Expr::Const(c) => *c,
            Expr::Neg(e) => -e.evaluate(t)?,
            Expr::Add(a, b) => a.evaluate(t)? + b.evaluate(t)?,
            Expr::Sub(a, b) => a.evaluate(t)? - b.evaluate(t)?,
            Expr::Mul(a, b) => a.evaluate(t)? * b.evaluate(t)?,
            Expr::Div(a, b) => {
                let den = b.evaluate(t)?;
                if den == 0.0 {
                    return Err(Error::Domain(format!("division by zero at t = {t}")));
                }
                a.evaluate(t)? / den
            }
            Expr::Pow(e, n) => e.evaluate(t)?.powi(*n as i32),
            Expr::Call(f, e) => {
                let x = e.evaluate(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(Error::Domain(format!("log of {x} at t = {t}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::Domain(format!("sqrt of {x} at t = {t}")));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value at t = {t}")))
        }
    }

    /// Exact symbolic derivative with respect to `t`.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Var => Expr::Const(1.0),
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Neg(e) => neg(e.differentiate()),
            Expr::Add(a, b) => add(a.differentiate(), b.differentiate()),
            Expr::Sub(a, b) => sub(a.differentiate(), b.differentiate()),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(), (**b).clone()),
                mul((**a).clone(), b.differentiate()),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.differentiate(), (**b).clone()),
                    mul((**a).clone(), b.differentiate()),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(_, 0) => Expr::Const(0.0),
            Expr::Pow(e, n) => mul(
                mul(Expr::Const(*n as f64), pow((**e).clone(), n - 1)),
                e.differentiate(),
            ),
            Expr::Call(f, e) => {
                let inner = e.differentiate();
                let u = (**e).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, u),
                    Func::Cos => neg(call(Func::Sin, u)),
                    Func::Exp => call(Func::Exp, u),
                    Func::Log => div(Expr::Const(1.0), u),
                    Func::Sqrt => div(Expr::Const(1.0), mul(Expr::Const(2.0), call(Func::Sqrt, u))),
                };
                mul(inner, outer)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Expr::Var)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Expr::Var => write!(f, "t"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                write_operand(f, e, e.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => "+",
                    Expr::Sub(..) => "-",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                write_operand(f, a, a.precedence() < p)?;
                write!(f, " {op} ")?;
                write_operand(f, b, b.precedence() <= p)
            }
            Expr::Pow(e, n) => {
                write_operand(f, e, e.precedence() < 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// A parsed function paired with its classical derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentiableFn {
    pub expr: Expr,
    pub classical_derivative: Expr,
    source: String,
}

impl DifferentiableFn {
    pub fn new(expr: Expr) -> Self {
        let classical_derivative = expr.differentiate();
        let source = expr.to_string();
        DifferentiableFn { expr, classical_derivative, source }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let expr = parse(text)?;
        Ok(DifferentiableFn {
            classical_derivative: expr.differentiate(),
            expr,
            source: text.to_string(),
        })
    }

    pub fn identity() -> Self {
        Self::new(Expr::Var)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.expr.evaluate(t)
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.classical_derivative.evaluate(t)
    }

    pub fn is_identity(&self) -> bool {
        self.expr.is_identity()
    }

    /// Coefficients (ascending powers) when the expression is a polynomial.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        poly::from_expr(&self.expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("t^2").differentiate(), p("2*t"));
        assert_eq!(p("sin(t)").differentiate(), p("cos(t)"));
        assert_eq!(p("exp(2*t)").differentiate(), p("2*exp(2*t)"));
        assert_eq!(p("5").differentiate(), Expr::Const(0.0));
        assert_eq!(p("t^0").differentiate(), Expr::Const(0.0));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(p("t^2").evaluate(3.0).unwrap(), 9.0);
        assert!(matches!(p("log(t)").evaluate(-1.0), Err(Error::Domain(_))));
        assert!(matches!(p("sqrt(t)").evaluate(-1.0), Err(Error::Domain(_))));
        assert!(matches!(p("1/t").evaluate(0.0), Err(Error::Domain(_))));
        assert_eq!(p("sin(t) + 2*t").evaluate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn printing_respects_precedence() {
        for s in [
            "t^2",
            "-t^2",
            "(-t)^2",
            "t - (t - 1)",
            "t / (2 * t)",
            "(t + 1) * (t - 1)",
            "-(t + 1)",
            "t * -2",
            "(t^2)^3",
            "exp(-t / 4)",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} printed as {e}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            (0.0f64..10.0).prop_map(Expr::Const),
            (-10.0f64..-0.01).prop_map(Expr::Const),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| match e {
                    Expr::Const(_) => Expr::Neg(Box::new(Expr::Var)),
                    e => Expr::Neg(Box::new(e)),
                }),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                (inner.clone(), 0u32..5).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
                (inner, 0usize..5).prop_map(|(a, k)| {
                    let f = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt][k];
                    Expr::Call(f, Box::new(a))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(e in arb_expr()) {
            let printed = e.to_string();
            prop_assert_eq!(parse(&printed).unwrap(), e);
        }
    }

    /// Expressions that are smooth on all of R, for the finite-difference check.
    fn arb_smooth() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![Just(Expr::Var), (-2.0f64..2.0).prop_map(Expr::Const)];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(neg),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| mul(a, b)),
                (inner.clone(), 0u32..4).prop_map(|(a, n)| pow(a, n)),
                inner.clone().prop_map(|a| call(Func::Sin, a)),
                inner.clone().prop_map(|a| call(Func::Cos, a)),
                // bounded argument keeps exp well scaled
                inner.prop_map(|a| call(Func::Exp, call(Func::Sin, a))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn derivative_matches_central_differences(
            e in arb_smooth(),
            ts in proptest::collection::vec(-1.5f64..1.5, 100),
        ) {
            let d = e.differentiate();
            let h = 1e-6;
            for t in ts {
                let sym = d.evaluate(t).unwrap();
                let fd = (e.evaluate(t + h).unwrap() - e.evaluate(t - h).unwrap()) / (2.0 * h);
                prop_assert!((sym - fd).abs() <= 1e-5 * (1.0 + sym.abs()),
                    "{} at t = {}: symbolic {} vs fd {}", e, t, sym, fd);
            }
        }
    }
}
