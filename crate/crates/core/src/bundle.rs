//! A function together with its symbolic derivatives.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parse::parse;

/// Smallest supported derivative order; the spline error bound needs y⁽⁶⁾.
pub const MIN_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBundle {
    function: Expr,
    /// `derivatives[k - 1]` is the k-th derivative.
    derivatives: Vec<Expr>,
    domain: (f64, f64),
}

impl DerivativeBundle {
    /// Differentiates `function` symbolically up to `max_order` (at least 6).
    pub fn new(function: Expr, max_order: usize) -> Result<Self> {
        if max_order < MIN_ORDER {
            return Err(Error::InvalidArgument(format!(
                "derivative bundle needs max_order >= {MIN_ORDER}, got {max_order}"
            )));
        }
        let mut derivatives = Vec::with_capacity(max_order);
        let mut current = function.clone();
        for _ in 0..max_order {
            current = current.derivative();
            derivatives.push(current.clone());
        }
        Ok(DerivativeBundle {
            function,
            derivatives,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    pub fn from_text(text: &str, max_order: usize) -> Result<Self> {
        Self::new(parse(text)?, max_order)
    }

    /// Restricts the bundle to `[lo, hi]` after checking that the function
    /// and every derivative evaluate finitely on `samples` uniform points.
    pub fn with_domain(mut self, lo: f64, hi: f64, samples: usize) -> Result<Self> {
        if !(lo < hi) || samples < 2 {
            return Err(Error::InvalidArgument(format!("bad domain [{lo}, {hi}]")));
        }
        let step = (hi - lo) / (samples - 1) as f64;
        for i in 0..samples {
            let x = if i + 1 == samples {
                hi
            } else {
                lo + i as f64 * step
            };
            for order in 0..=self.max_order() {
                self.eval(order, x)?;
            }
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    pub fn function(&self) -> &Expr {
        &self.function
    }

    pub fn max_order(&self) -> usize {
        self.derivatives.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Expression for the derivative of the given order (0 is the function).
    pub fn expr(&self, order: usize) -> Option<&Expr> {
        match order {
            0 => Some(&self.function),
            k => self.derivatives.get(k - 1),
        }
    }

    /// Evaluates y⁽ᵒʳᵈᵉʳ⁾(x).
    pub fn eval(&self, order: usize, x: f64) -> Result<f64> {
        let e = self.expr(order).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "derivative order {order} exceeds bundle order {}",
                self.max_order()
            ))
        })?;
        e.eval(x)
    }

    pub fn y(&self, x: f64) -> Result<f64> {
        self.eval(0, x)
    }
}
