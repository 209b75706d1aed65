//! Expression parsing, evaluation on the Riemann sphere, and symbolic
//! differentiation for meromorphic formulas in one variable.

mod ast;
mod parse;

use std::fmt;

use num_complex::Complex64;

pub use ast::Expr;
pub use parse::parse;

use crate::complex::ComplexValue;
use crate::error::{Error, Result};

/// Evaluate one node. Infinity is absorbing through every operation except
/// division by an infinite denominator, which returns 0 — that keeps
/// `1/(1/z)` correct at the origin without any symbolic cancellation.
fn eval_node(e: &Expr, z: Complex64) -> Result<ComplexValue> {
    use ComplexValue::{Finite, Infinity};
    let v = match e {
        Expr::Const(c) => Finite(*c),
        Expr::Var => Finite(z),
        Expr::Neg(f) => match eval_node(f, z)? {
            Finite(a) => Finite(-a),
            Infinity => Infinity,
        },
        Expr::Add(f, g) => match (eval_node(f, z)?, eval_node(g, z)?) {
            (Finite(a), Finite(b)) => ComplexValue::clamped(a + b),
            _ => Infinity,
        },
        Expr::Sub(f, g) => match (eval_node(f, z)?, eval_node(g, z)?) {
            (Finite(a), Finite(b)) => ComplexValue::clamped(a - b),
            _ => Infinity,
        },
        Expr::Mul(f, g) => match (eval_node(f, z)?, eval_node(g, z)?) {
            (Finite(a), Finite(b)) => ComplexValue::clamped(a * b),
            _ => Infinity,
        },
        Expr::Div(f, g) => match (eval_node(f, z)?, eval_node(g, z)?) {
            (Finite(a), Finite(b)) => {
                if b == Complex64::new(0.0, 0.0) {
                    Infinity
                } else {
                    ComplexValue::clamped(a / b)
                }
            }
            (Finite(_), Infinity) => Finite(Complex64::new(0.0, 0.0)),
            (Infinity, _) => Infinity,
        },
        Expr::Pow(f, n) => match eval_node(f, z)? {
            Finite(a) => {
                if *n == 0 {
                    Finite(Complex64::new(1.0, 0.0))
                } else if a == Complex64::new(0.0, 0.0) && *n < 0 {
                    Infinity
                } else {
                    ComplexValue::clamped(a.powi(*n))
                }
            }
            Infinity => match n.cmp(&0) {
                std::cmp::Ordering::Greater => Infinity,
                std::cmp::Ordering::Equal => Finite(Complex64::new(1.0, 0.0)),
                std::cmp::Ordering::Less => Finite(Complex64::new(0.0, 0.0)),
            },
        },
        Expr::Exp(f) => match eval_node(f, z)? {
            Finite(a) => ComplexValue::clamped(a.exp()),
            Infinity => Infinity,
        },
        Expr::Log(f) => match eval_node(f, z)? {
            Finite(a) => {
                if a == Complex64::new(0.0, 0.0) {
                    return Err(Error::Domain("log of zero".into()));
                }
                // Principal branch: imaginary part in (-pi, pi].
                ComplexValue::clamped(a.ln())
            }
            Infinity => Infinity,
        },
        Expr::Sin(f) => match eval_node(f, z)? {
            Finite(a) => ComplexValue::clamped(a.sin()),
            Infinity => Infinity,
        },
        Expr::Cos(f) => match eval_node(f, z)? {
            Finite(a) => ComplexValue::clamped(a.cos()),
            Infinity => Infinity,
        },
    };
    Ok(v)
}

/// A parsed function together with its symbolic derivative.
#[derive(Clone, Debug)]
pub struct FunctionDef {
    body: Expr,
    derivative_body: Expr,
    source: String,
}

impl FunctionDef {
    pub fn parse(text: &str) -> Result<Self> {
        let body = parse(text)?;
        Ok(FunctionDef {
            derivative_body: body.differentiate(),
            body,
            source: text.trim().to_string(),
        })
    }

    pub fn from_expr(body: Expr) -> Self {
        FunctionDef {
            derivative_body: body.differentiate(),
            source: body.to_string(),
            body,
        }
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn derivative_body(&self) -> &Expr {
        &self.derivative_body
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        eval_node(&self.body, z.require_finite("evaluation point")?)
    }

    pub fn eval_c64(&self, z: Complex64) -> Result<ComplexValue> {
        eval_node(&self.body, z)
    }

    pub fn eval_derivative(&self, z: ComplexValue) -> Result<ComplexValue> {
        eval_node(&self.derivative_body, z.require_finite("evaluation point")?)
    }

    pub fn eval_derivative_c64(&self, z: Complex64) -> Result<ComplexValue> {
        eval_node(&self.derivative_body, z)
    }

    /// The derivative as a first-class function (so f'' is available where
    /// critical points need their own Newton refinement).
    pub fn derivative_fn(&self) -> FunctionDef {
        FunctionDef::from_expr(self.derivative_body.clone())
    }

    /// f - c, sharing f's derivative.
    pub fn sub_const(&self, c: Complex64) -> FunctionDef {
        let body = Expr::Sub(Box::new(self.body.clone()), Box::new(Expr::Const(c)));
        FunctionDef {
            derivative_body: self.derivative_body.clone(),
            source: body.to_string(),
            body,
        }
    }
}

impl fmt::Display for FunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
