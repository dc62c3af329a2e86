//! Symbolic scalar engine: expression trees, parsing and printing,
//! canonicalisation, differentiation, evaluation and zero testing.

mod parse;
mod poly;
mod scalar;
mod zero;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use parse::{parse_expr, parse_expr_with, ParseError};
pub use poly::{Atom, Func, Kernel, Monomial, Poly};
pub use scalar::Scalar;
pub use zero::{all_zero, is_zero, SamplingPolicy, ZeroTestError, ZeroVerdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("division by an identically zero expression")]
    DivisionByZero,
    #[error("exponent out of range")]
    ExponentTooLarge,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("near-singular division (denominator {value:e})")]
    NearSingular { value: f64 },
    #[error("point has {found} coordinates, expected at least {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Expression tree over the coordinates of a chart. Symbols are coordinate
/// indices into the chart's coordinate list.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Symbol(usize),
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Num(BigRational::from_integer(n.into()))
    }

    /// Coordinates occurring in the tree.
    pub fn symbols(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Symbol(i) => {
                out.insert(*i);
            }
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Apply(_, e) => e.collect_symbols(out),
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Quotient(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    pub fn has_transcendental(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Symbol(_) => false,
            Expr::Apply(..) => true,
            Expr::Neg(e) | Expr::Pow(e, _) => e.has_transcendental(),
            Expr::Sum(v) | Expr::Product(v) => v.iter().any(Expr::has_transcendental),
            Expr::Quotient(a, b) => a.has_transcendental() || b.has_transcendental(),
        }
    }

    /// Canonical scalar value of the tree.
    pub fn to_scalar(&self) -> Result<Scalar, ExprError> {
        Ok(match self {
            Expr::Num(q) => Scalar::constant(q.clone()),
            Expr::Symbol(i) => Scalar::coord(*i),
            Expr::Neg(e) => e.to_scalar()?.neg(),
            Expr::Sum(v) => {
                let mut acc = Scalar::zero();
                for e in v {
                    acc = acc.add(&e.to_scalar()?);
                }
                acc
            }
            Expr::Product(v) => {
                let mut acc = Scalar::one();
                for e in v {
                    acc = acc.mul(&e.to_scalar()?);
                }
                acc
            }
            Expr::Quotient(a, b) => a.to_scalar()?.mul(&b.reciprocal()?),
            Expr::Pow(b, k) => b.to_scalar()?.powi(i64::from(*k))?,
            Expr::Apply(f, e) => Scalar::apply(*f, &e.to_scalar()?),
        })
    }

    // Keeps the factor structure of products and powers in denominators.
    fn reciprocal(&self) -> Result<Scalar, ExprError> {
        match self {
            Expr::Product(v) => {
                let mut acc = Scalar::one();
                for e in v {
                    acc = acc.mul(&e.reciprocal()?);
                }
                Ok(acc)
            }
            Expr::Pow(b, k) => b.to_scalar()?.powi(-i64::from(*k)),
            Expr::Quotient(a, b) => Ok(b.to_scalar()?.mul(&a.reciprocal()?)),
            other => other.to_scalar()?.inverse(),
        }
    }

    /// Tree of the canonical form.
    pub fn canonicalize(&self) -> Result<Expr, ExprError> {
        Ok(self.to_scalar()?.to_expr())
    }

    /// Canonicalised partial derivative with respect to coordinate `i`.
    pub fn diff(&self, i: usize) -> Result<Expr, ExprError> {
        Ok(self.to_scalar()?.diff(i).to_expr())
    }

    /// Floating-point evaluation of the tree itself.
    pub fn eval(&self, point: &[f64], guard: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(q) => poly::rational_to_f64(q),
            Expr::Symbol(i) => *point.get(*i).ok_or(EvalError::DimensionMismatch {
                expected: i + 1,
                found: point.len(),
            })?,
            Expr::Neg(e) => -e.eval(point, guard)?,
            Expr::Sum(v) => {
                let mut s = 0.0;
                for e in v {
                    s += e.eval(point, guard)?;
                }
                s
            }
            Expr::Product(v) => {
                let mut s = 1.0;
                for e in v {
                    s *= e.eval(point, guard)?;
                }
                s
            }
            Expr::Quotient(a, b) => {
                let d = b.eval(point, guard)?;
                if d.abs() < guard {
                    return Err(EvalError::NearSingular { value: d });
                }
                a.eval(point, guard)? / d
            }
            Expr::Pow(b, k) => {
                let v = b.eval(point, guard)?;
                if *k < 0 && v.abs() < guard {
                    return Err(EvalError::NearSingular { value: v });
                }
                libm::pow(v, f64::from(*k))
            }
            Expr::Apply(f, e) => f.apply(e.eval(point, guard)?),
        })
    }

    /// Printer over the given coordinate names.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> ExprDisplay<'a, S> {
        ExprDisplay {
            expr: self,
            names: Some(names),
        }
    }

    /// Printer naming coordinate `i` as `x{i+1}`.
    pub fn display_generic(&self) -> ExprDisplay<'_, String> {
        ExprDisplay {
            expr: self,
            names: None,
        }
    }
}

pub struct ExprDisplay<'a, S> {
    expr: &'a Expr,
    names: Option<&'a [S]>,
}

// Binding strength used to decide where parentheses are needed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Unary,
    Power,
    Atom,
}

fn prec(e: &Expr) -> Prec {
    match e {
        Expr::Sum(v) if v.len() > 1 => Prec::Sum,
        Expr::Sum(v) => v.first().map_or(Prec::Atom, prec),
        Expr::Product(_) | Expr::Quotient(..) => Prec::Product,
        Expr::Neg(_) => Prec::Unary,
        Expr::Num(q) if q.is_negative() => Prec::Unary,
        Expr::Num(q) if !q.denom().is_one() => Prec::Product,
        Expr::Pow(..) => Prec::Power,
        Expr::Num(_) | Expr::Symbol(_) | Expr::Apply(..) => Prec::Atom,
    }
}

impl<S: AsRef<str>> ExprDisplay<'_, S> {
    fn write(&self, e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e {
            Expr::Num(q) => {
                if q.is_negative() {
                    write!(f, "-")?;
                }
                let q = q.abs();
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Expr::Symbol(i) => match self.names {
                Some(names) => match names.get(*i) {
                    Some(n) => write!(f, "{}", n.as_ref()),
                    None => write!(f, "?{}", i),
                },
                None => write!(f, "x{}", i + 1),
            },
            Expr::Neg(inner) => {
                write!(f, "-")?;
                self.wrap(inner, Prec::Unary, f)
            }
            Expr::Sum(v) => {
                if v.is_empty() {
                    return write!(f, "0");
                }
                for (k, t) in v.iter().enumerate() {
                    match (k, t) {
                        (0, _) => self.wrap(t, Prec::Sum, f)?,
                        (_, Expr::Neg(inner)) => {
                            write!(f, " - ")?;
                            self.wrap(inner, Prec::Product, f)?;
                        }
                        _ => {
                            write!(f, " + ")?;
                            self.wrap(t, Prec::Product, f)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Product(v) => {
                if v.is_empty() {
                    return write!(f, "1");
                }
                for (k, t) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                        // The right operand of '*' must not itself be a product
                        // or quotient, or the left-associative parse changes shape.
                        self.wrap(t, Prec::Unary, f)?;
                    } else {
                        self.wrap(t, Prec::Product, f)?;
                    }
                }
                Ok(())
            }
            Expr::Quotient(a, b) => {
                self.wrap(a, Prec::Product, f)?;
                write!(f, "/")?;
                self.wrap(b, Prec::Unary, f)
            }
            Expr::Pow(b, k) => {
                self.wrap(b, Prec::Atom, f)?;
                write!(f, "^{}", k)
            }
            Expr::Apply(func, arg) => {
                write!(f, "{}(", func.name())?;
                self.write(arg, f)?;
                write!(f, ")")
            }
        }
    }

    fn wrap(&self, e: &Expr, min: Prec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let needs = prec(e) < min || matches!(e, Expr::Num(q) if !q.denom().is_one() && min > Prec::Product);
        if needs {
            write!(f, "(")?;
            self.write(e, f)?;
            write!(f, ")")
        } else {
            self.write(e, f)
        }
    }
}

impl<S: AsRef<str>> fmt::Display for ExprDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_generic().fmt(f)
    }
}

impl From<Scalar> for Expr {
    fn from(s: Scalar) -> Self {
        s.to_expr()
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}
