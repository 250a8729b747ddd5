//! Scalar expressions in the single variable `x`.
//!
//! An [`Expr`] is an immutable tree. It can be evaluated, differentiated
//! symbolically and printed back to the text grammar accepted by
//! [`parse`](crate::parse::parse). Derivatives are simplified by constant
//! folding and identity elimination only; no attempt is made at a
//! canonical form.

use std::fmt;

use crate::error::{Error, Result};

/// Elementary functions available in the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, t: f64) -> Result<f64> {
        match self {
            Func::Sin => Ok(t.sin()),
            Func::Cos => Ok(t.cos()),
            Func::Exp => Ok(t.exp()),
            Func::Ln if t > 0.0 => Ok(t.ln()),
            Func::Ln => Err(Error::Domain {
                what: "ln of non-positive argument",
                x: t,
            }),
            Func::Sqrt if t >= 0.0 => Ok(t.sqrt()),
            Func::Sqrt => Err(Error::Domain {
                what: "sqrt of negative argument",
                x: t,
            }),
        }
    }
}

/// Expression tree.
///
/// Powers carry a constant exponent; a non-integer exponent requires a
/// positive base at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
}

fn integral_exponent(p: f64) -> Option<i32> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        Some(p as i32)
    } else {
        None
    }
}

fn power(base: f64, p: f64) -> Result<f64> {
    match integral_exponent(p) {
        Some(_) if base == 0.0 && p < 0.0 => Err(Error::Domain {
            what: "zero raised to a negative power",
            x: base,
        }),
        Some(n) => Ok(base.powi(n)),
        None if base > 0.0 => Ok(base.powf(p)),
        None => Err(Error::Domain {
            what: "non-integer power of non-positive base",
            x: base,
        }),
    }
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Box::new(arg))
    }

    /// Evaluates at `x`. The result is finite or an error is returned.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.eval_raw(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                what: "non-finite value",
                x,
            })
        }
    }

    fn eval_raw(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Neg(a) => -a.eval_raw(x)?,
            Expr::Func(f, a) => f.apply(a.eval_raw(x)?)?,
            Expr::Add(a, b) => a.eval_raw(x)? + b.eval_raw(x)?,
            Expr::Sub(a, b) => a.eval_raw(x)? - b.eval_raw(x)?,
            Expr::Mul(a, b) => a.eval_raw(x)? * b.eval_raw(x)?,
            Expr::Div(a, b) => {
                let den = b.eval_raw(x)?;
                if den == 0.0 {
                    return Err(Error::Domain {
                        what: "division by zero",
                        x,
                    });
                }
                a.eval_raw(x)? / den
            }
            Expr::Pow(a, p) => power(a.eval_raw(x)?, *p)?,
        })
    }

    /// Value of the expression if it does not depend on `x`.
    pub fn constant_value(&self) -> Option<f64> {
        if self.contains_x() {
            return None;
        }
        self.eval(0.0).ok()
    }

    pub fn contains_x(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::X => true,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Pow(a, _) => a.contains_x(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_x() || b.contains_x()
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::X => 1,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Symbolic derivative with respect to `x`, simplified.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::X => Expr::Const(1.0),
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => {
                if let Some(c) = b.constant_value() {
                    div(a.derivative(), Expr::Const(c))
                } else if a.constant_value().is_some() {
                    // (c / v)' = -c v' / v^2
                    neg(div(
                        mul((**a).clone(), b.derivative()),
                        pow((**b).clone(), 2.0),
                    ))
                } else if let Expr::Pow(u, p) = &**b {
                    // (a / u^p)' = a' / u^p - p a u' / u^(p+1), avoids squaring u^p
                    sub(
                        div(a.derivative(), (**b).clone()),
                        div(
                            mul(mul(Expr::Const(*p), (**a).clone()), u.derivative()),
                            pow((**u).clone(), p + 1.0),
                        ),
                    )
                } else {
                    div(
                        sub(
                            mul(a.derivative(), (**b).clone()),
                            mul((**a).clone(), b.derivative()),
                        ),
                        pow((**b).clone(), 2.0),
                    )
                }
            }
            Expr::Pow(a, p) => mul(
                mul(Expr::Const(*p), pow((**a).clone(), p - 1.0)),
                a.derivative(),
            ),
            Expr::Func(f, a) => {
                let inner = a.derivative();
                let arg = (**a).clone();
                let outer = match f {
                    Func::Sin => func(Func::Cos, arg),
                    Func::Cos => neg(func(Func::Sin, arg)),
                    Func::Exp => func(Func::Exp, arg),
                    Func::Ln => return div(inner, arg),
                    Func::Sqrt => return div(inner, mul(Expr::Const(2.0), func(Func::Sqrt, arg))),
                };
                mul(outer, inner)
            }
        }
    }

    /// Rebuilds the tree through the simplifying constructors.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::X => self.clone(),
            Expr::Neg(a) => neg(a.simplify()),
            Expr::Func(f, a) => func(*f, a.simplify()),
            Expr::Add(a, b) => add(a.simplify(), b.simplify()),
            Expr::Sub(a, b) => sub(a.simplify(), b.simplify()),
            Expr::Mul(a, b) => mul(a.simplify(), b.simplify()),
            Expr::Div(a, b) => div(a.simplify(), b.simplify()),
            Expr::Pow(a, p) => pow(a.simplify(), *p),
        }
    }
}

// Simplifying constructors. A fold only happens when the folded value is
// finite, so domain errors are preserved for evaluation time.

fn folded(v: Result<f64>) -> Option<Expr> {
    match v {
        Ok(v) if v.is_finite() => Some(Expr::Const(v)),
        _ => None,
    }
}

fn is_const(e: &Expr, c: f64) -> bool {
    matches!(e, Expr::Const(v) if *v == c)
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

pub(crate) fn func(f: Func, a: Expr) -> Expr {
    if let Expr::Const(c) = a {
        if let Some(e) = folded(f.apply(c)) {
            return e;
        }
    }
    Expr::Func(f, Box::new(a))
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) if is_const(&a, 0.0) => b,
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) if is_const(&a, 0.0) => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, _) if is_const(&a, 0.0) => Expr::Const(0.0),
        (_, b) if is_const(&b, 0.0) => Expr::Const(0.0),
        (a, b) if is_const(&a, 1.0) => b,
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) if is_const(&a, -1.0) => neg(b),
        (a, b) if is_const(&b, -1.0) => neg(a),
        // c1 * (c2 * e) -> (c1 c2) * e
        (Expr::Const(c1), Expr::Mul(l, r)) if matches!(*l, Expr::Const(_)) => {
            let Expr::Const(c2) = *l else { unreachable!() };
            mul(Expr::Const(c1 * c2), *r)
        }
        // keep constants on the left
        (a, Expr::Const(c)) => mul(Expr::Const(c), a),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) if y != 0.0 => Expr::Const(x / y),
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) if is_const(&a, 0.0) && !is_const(&b, 0.0) => Expr::Const(0.0),
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(a: Expr, p: f64) -> Expr {
    if p == 1.0 {
        return a;
    }
    if p == 0.0 {
        return Expr::Const(1.0);
    }
    match a {
        Expr::Const(c) => {
            if let Some(e) = folded(power(c, p)) {
                return e;
            }
            Expr::Pow(Box::new(Expr::Const(c)), p)
        }
        // (u^q)^p = u^(qp) for integer p
        Expr::Pow(u, q) if p.fract() == 0.0 => pow(*u, q * p),
        a => Expr::Pow(Box::new(a), p),
    }
}

// Printing. Precedence levels: 1 additive, 2 multiplicative, 3 unary minus,
// 4 power, 5 atoms.

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Const(c) if c.is_sign_negative() => 3,
        _ => 5,
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    // `{:?}` gives the shortest round-tripping representation.
    if c.is_sign_negative() {
        write!(f, "-{:?}", -c)
    } else {
        write!(f, "{c:?}")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_number(f, *c),
            Expr::X => f.write_str("x"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 4)
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_operand(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, p) => {
                write_operand(f, a, 5)?;
                f.write_str("^")?;
                if *p < 0.0 {
                    f.write_str("(")?;
                    write_number(f, *p)?;
                    f.write_str(")")
                } else {
                    write_number(f, *p)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn power_rule() {
        let d = parse("x^3").unwrap().derivative();
        assert_eq!(
            d,
            Expr::Mul(
                Box::new(Expr::Const(3.0)),
                Box::new(Expr::Pow(Box::new(Expr::X), 2.0))
            )
        );
        assert_eq!(d.to_string(), "3.0*x^2.0");
    }

    #[test]
    fn sine_rule() {
        assert_eq!(
            parse("sin(x)").unwrap().derivative(),
            Expr::func(Func::Cos, Expr::X)
        );
    }

    #[test]
    fn domain_errors() {
        let e = parse("ln(1+x)").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 0.0);
        assert!(matches!(e.eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(
            parse("sqrt(x)").unwrap().eval(-0.5),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            parse("1/x").unwrap().eval(0.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            parse("x^0.5").unwrap().eval(-2.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            parse("x^(-2)").unwrap().eval(0.0),
            Err(Error::Domain { .. })
        ));
        assert_eq!(parse("x^2").unwrap().eval(-3.0).unwrap(), 9.0);
        assert!(matches!(
            parse("exp(x)").unwrap().eval(1000.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn negative_constants_print_with_parentheses() {
        let e = Expr::Pow(Box::new(Expr::Const(-2.0)), 2.0);
        assert_eq!(e.to_string(), "(-2.0)^2.0");
        assert_eq!(parse(&e.to_string()).unwrap().eval(0.0).unwrap(), 4.0);
        let e = Expr::Neg(Box::new(Expr::Const(-0.0)));
        assert_eq!(e.to_string(), "-(-0.0)");
    }

    #[test]
    fn example_functions_vanish_at_origin() {
        assert_eq!(parse("exp(x/5)*sin(x)").unwrap().eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn folding_keeps_domain_errors() {
        let e = Expr::Div(Box::new(Expr::Const(1.0)), Box::new(Expr::Const(0.0))).simplify();
        assert!(e.eval(0.0).is_err());
        let e = func(Func::Ln, Expr::Const(-1.0));
        assert!(e.eval(0.0).is_err());
    }

    #[test]
    fn identities() {
        assert_eq!(add(Expr::Const(0.0), Expr::X), Expr::X);
        assert_eq!(mul(Expr::Const(1.0), Expr::X), Expr::X);
        assert_eq!(mul(Expr::X, Expr::Const(0.0)), Expr::Const(0.0));
        assert_eq!(pow(Expr::X, 1.0), Expr::X);
        assert_eq!(neg(neg(Expr::X)), Expr::X);
        assert_eq!(
            mul(Expr::Const(2.0), mul(Expr::Const(3.0), Expr::X)),
            mul(Expr::Const(6.0), Expr::X)
        );
    }

    #[test]
    fn quotient_and_chain_rules() {
        // d/dx sqrt(1 + x^2) = x / sqrt(1 + x^2)
        let d = parse("sqrt(1 + x^2)").unwrap().derivative();
        for &x in &[-2.0_f64, 0.3, 4.0] {
            let want = x / (1.0 + x * x).sqrt();
            assert!((d.eval(x).unwrap() - want).abs() < 1e-15);
        }
        // d/dx (x / (1 + x)) = 1 / (1 + x)^2
        let d = parse("x/(1+x)").unwrap().derivative();
        for &x in &[0.5, 2.0, 7.0] {
            let want = 1.0 / ((1.0 + x) * (1.0 + x));
            assert!((d.eval(x).unwrap() - want).abs() < 1e-15);
        }
    }
}
