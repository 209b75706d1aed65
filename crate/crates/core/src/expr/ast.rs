use std::fmt;

use num_complex::Complex64;

/// Expression tree over one complex variable `z`.
///
/// Exponents are restricted to integer literals, so every expression is
/// meromorphic wherever `log` is not involved and differentiation stays
/// closed over the same node set.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn constant(re: f64, im: f64) -> Expr {
        Expr::Const(Complex64::new(re, im))
    }

    pub fn differentiate(&self) -> Expr {
        use Expr::*;
        let d = match self {
            Const(_) => Expr::constant(0.0, 0.0),
            Var => Expr::constant(1.0, 0.0),
            Neg(f) => Neg(Box::new(f.differentiate())),
            Add(f, g) => Add(Box::new(f.differentiate()), Box::new(g.differentiate())),
            Sub(f, g) => Sub(Box::new(f.differentiate()), Box::new(g.differentiate())),
            Mul(f, g) => Add(
                Box::new(Mul(Box::new(f.differentiate()), g.clone())),
                Box::new(Mul(f.clone(), Box::new(g.differentiate()))),
            ),
            Div(f, g) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(f.differentiate()), g.clone())),
                    Box::new(Mul(f.clone(), Box::new(g.differentiate()))),
                )),
                Box::new(Pow(g.clone(), 2)),
            ),
            Pow(f, n) => Mul(
                Box::new(Mul(
                    Box::new(Expr::constant(f64::from(*n), 0.0)),
                    Box::new(Pow(f.clone(), n - 1)),
                )),
                Box::new(f.differentiate()),
            ),
            Exp(f) => Mul(Box::new(Exp(f.clone())), Box::new(f.differentiate())),
            Log(f) => Div(Box::new(f.differentiate()), f.clone()),
            Sin(f) => Mul(Box::new(Cos(f.clone())), Box::new(f.differentiate())),
            Cos(f) => Neg(Box::new(Mul(
                Box::new(Sin(f.clone())),
                Box::new(f.differentiate()),
            ))),
        };
        d.simplified()
    }

    /// Light bottom-up cleanup: constant folding on +,-,*,neg and the usual
    /// 0/1 identities. Keeps derivative trees from ballooning; it is not a
    /// CAS and deliberately leaves `Div` and transcendental nodes alone.
    pub fn simplified(self) -> Expr {
        use Expr::*;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Neg(f) => match f.simplified() {
                Const(c) => Const(-c),
                Neg(inner) => *inner,
                g => Neg(Box::new(g)),
            },
            Add(f, g) => match (f.simplified(), g.simplified()) {
                (Const(a), Const(b)) => Const(a + b),
                (Const(a), h) | (h, Const(a)) if a == zero => h,
                (a, b) => Add(Box::new(a), Box::new(b)),
            },
            Sub(f, g) => match (f.simplified(), g.simplified()) {
                (Const(a), Const(b)) => Const(a - b),
                (h, Const(b)) if b == zero => h,
                (Const(a), h) if a == zero => Neg(Box::new(h)).simplified(),
                (a, b) => Sub(Box::new(a), Box::new(b)),
            },
            Mul(f, g) => match (f.simplified(), g.simplified()) {
                (Const(a), Const(b)) => Const(a * b),
                (Const(a), _) | (_, Const(a)) if a == zero => Const(zero),
                (Const(a), h) | (h, Const(a)) if a == one => h,
                (a, b) => Mul(Box::new(a), Box::new(b)),
            },
            Div(f, g) => match (f.simplified(), g.simplified()) {
                (a, Const(b)) if b == one => a,
                (a, b) => Div(Box::new(a), Box::new(b)),
            },
            Pow(f, n) => match (f.simplified(), n) {
                (_, 0) => Const(one),
                (a, 1) => a,
                (Const(a), n) if n > 0 && n <= 16 => Const(a.powi(n)),
                (a, n) => Pow(Box::new(a), n),
            },
            Exp(f) => Exp(Box::new(f.simplified())),
            Log(f) => Log(Box::new(f.simplified())),
            Sin(f) => Sin(Box::new(f.simplified())),
            Cos(f) => Cos(Box::new(f.simplified())),
            leaf => leaf,
        }
    }
}

/// Operator precedence for the printer; higher binds tighter.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Neg(..) => 2,
        Expr::Mul(..) | Expr::Div(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn fmt_f64(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // {:?} prints the shortest representation that round-trips through parsing.
    write!(f, "{v:?}")
}

fn fmt_const(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        if c.re < 0.0 {
            write!(f, "(")?;
            fmt_f64(c.re, f)?;
            write!(f, ")")
        } else {
            fmt_f64(c.re, f)
        }
    } else if c.re == 0.0 && c.im == 1.0 {
        write!(f, "i")
    } else if c.re == 0.0 {
        write!(f, "(")?;
        fmt_f64(c.im, f)?;
        write!(f, "*i)")
    } else {
        write!(f, "(")?;
        fmt_f64(c.re, f)?;
        write!(f, "{}", if c.im < 0.0 { "-" } else { "+" })?;
        fmt_f64(c.im.abs(), f)?;
        write!(f, "*i)")
    }
}

fn fmt_child(e: &Expr, parent_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < parent_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_const(*c, f),
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                // -(a+b) needs parens; -a*b does not, but parenthesizing any
                // lower-or-equal precedence child keeps re-parsing faithful.
                if precedence(a) <= 2 {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
            Expr::Add(a, b) => {
                fmt_child(a, 1, f)?;
                write!(f, " + ")?;
                fmt_child(b, 2, f)
            }
            Expr::Sub(a, b) => {
                fmt_child(a, 1, f)?;
                write!(f, " - ")?;
                // Right operand of `-` must bind tighter than the `-` itself.
                fmt_child(b, 2, f)
            }
            Expr::Mul(a, b) => {
                fmt_child(a, 3, f)?;
                write!(f, "*")?;
                fmt_child(b, 4, f)
            }
            Expr::Div(a, b) => {
                fmt_child(a, 3, f)?;
                write!(f, "/")?;
                // Same for `/`: a/(b*c) != a/b*c.
                fmt_child(b, 4, f)
            }
            Expr::Pow(a, n) => {
                if precedence(a) < 5 {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}
