//! Canonical scalar functions: a single expanded numerator over a product of
//! monic denominator factors, with exp/sin/cos kept as opaque kernels.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Atom, Func, Kernel, Monomial, Poly};
use super::{EvalError, Expr, ExprError};

/// Canonical rational function over ℚ in coordinates and kernels.
///
/// Invariants:
/// - every denominator factor is monic, non-constant, and either a single
///   atom or free of monomial content;
/// - no denominator factor divides another;
/// - the numerator is not divisible by any denominator factor;
/// - zero has an empty denominator.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_poly(Poly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Scalar::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn coord(i: usize) -> Self {
        Scalar::from_poly(Poly::atom(Atom::Coord(i)))
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<Poly, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// True when no exp/sin/cos kernel occurs anywhere.
    pub fn is_rational(&self) -> bool {
        !self.num.has_transcendental() && self.den.keys().all(|f| !f.has_transcendental())
    }

    pub fn max_coord(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut visit = |p: &Poly| {
            for a in p.atoms() {
                if let Some(c) = a.max_coord() {
                    best = Some(best.map_or(c, |b| b.max(c)));
                }
            }
        };
        visit(&self.num);
        for f in self.den.keys() {
            visit(f);
        }
        best
    }

    pub fn mentions(&self, coord: usize) -> bool {
        let hit = |p: &Poly| p.atoms().iter().any(|a| a.mentions(coord));
        hit(&self.num) || self.den.keys().any(hit)
    }

    /// Expanded denominator polynomial.
    pub fn denominator_poly(&self) -> Poly {
        expand(&self.den)
    }

    fn build(num: Poly, mut den: BTreeMap<Poly, u32>) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        let mut num = num;
        let keys: Vec<Poly> = den.keys().cloned().collect();
        for f in keys {
            let e = den.get_mut(&f).expect("key present");
            while *e > 0 {
                match num.div_exact(&f) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
            if *e == 0 {
                den.remove(&f);
            }
        }
        Scalar { num, den }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Scalar::build(self.num.add(&other.num), self.den.clone());
        }
        let mut common = self.den.clone();
        for (f, &e) in &other.den {
            match common.get_mut(f) {
                Some(x) => *x = (*x).max(e),
                None => insert_factor(&mut common, f.clone(), e),
            }
        }
        let a = self.num.mul(&cofactor(&common, &self.den));
        let b = other.num.mul(&cofactor(&common, &other.den));
        Scalar::build(a.add(&b), common)
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Scalar {
        if k.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Scalar {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut den = self.den.clone();
        for (f, &e) in &other.den {
            insert_factor(&mut den, f.clone(), e);
        }
        Scalar::build(self.num.mul(&other.num), den)
    }

    pub fn inverse(&self) -> Result<Scalar, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let mut den = BTreeMap::new();
        let c = insert_poly(&mut den, &self.num, 1);
        let num = expand(&self.den).scale(&c.recip());
        Ok(Scalar::build(num, den))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ExprError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn powi(&self, k: i64) -> Result<Scalar, ExprError> {
        if k < 0 {
            return self.inverse()?.powi(-k);
        }
        let k = u32::try_from(k).map_err(|_| ExprError::ExponentTooLarge)?;
        if k == 0 {
            return Ok(Scalar::one());
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let den = self.den.iter().map(|(f, e)| (f.clone(), e * k)).collect();
        Ok(Scalar::build(self.num.pow(k), den))
    }

    /// `exp(u)`, normalised so the kernel argument has a positive leading
    /// coefficient (`exp(-u)` is stored as `1/exp(u)`).
    pub fn exp(u: &Scalar) -> Scalar {
        if u.is_zero() {
            return Scalar::one();
        }
        if !u.num.leading_positive() {
            let k = Scalar::from_poly(Poly::atom(Atom::kernel(Func::Exp, u.neg())));
            return k.inverse().expect("kernel atoms are nonzero");
        }
        Scalar::from_poly(Poly::atom(Atom::kernel(Func::Exp, u.clone())))
    }

    pub fn sin(u: &Scalar) -> Scalar {
        if u.is_zero() {
            return Scalar::zero();
        }
        if !u.num.leading_positive() {
            return Scalar::sin(&u.neg()).neg();
        }
        Scalar::from_poly(Poly::atom(Atom::kernel(Func::Sin, u.clone())))
    }

    pub fn cos(u: &Scalar) -> Scalar {
        if u.is_zero() {
            return Scalar::one();
        }
        if !u.num.leading_positive() {
            return Scalar::cos(&u.neg());
        }
        Scalar::from_poly(Poly::atom(Atom::kernel(Func::Cos, u.clone())))
    }

    pub fn apply(func: Func, u: &Scalar) -> Scalar {
        match func {
            Func::Exp => Scalar::exp(u),
            Func::Sin => Scalar::sin(u),
            Func::Cos => Scalar::cos(u),
        }
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn diff(&self, i: usize) -> Scalar {
        if self.is_zero() || !self.mentions(i) {
            return Scalar::zero();
        }
        let recip_den = Scalar {
            num: Poly::one(),
            den: self.den.clone(),
        };
        let mut out = diff_poly(&self.num, i).mul(&recip_den);
        for (f, &e) in &self.den {
            let df = diff_poly(f, i);
            if df.is_zero() {
                continue;
            }
            let inv_f = Scalar::from_poly(f.clone())
                .inverse()
                .expect("denominator factors are nonzero");
            let term = self.mul(&df).mul(&inv_f).scale_int(i64::from(e));
            out = out.sub(&term);
        }
        out
    }

    /// Substitutes every coordinate through `map`, re-canonicalising kernels.
    pub fn substitute(&self, map: &dyn Fn(usize) -> Scalar) -> Result<Scalar, ExprError> {
        let mut cache: BTreeMap<Atom, Scalar> = BTreeMap::new();
        let num = eval_poly_symbolic(&self.num, map, &mut cache)?;
        let mut out = num;
        for (f, &e) in &self.den {
            let v = eval_poly_symbolic(f, map, &mut cache)?;
            out = out.mul(&v.powi(-i64::from(e))?);
        }
        Ok(out)
    }

    /// Replaces coordinate `coord` by the rational constant `value`.
    pub fn substitute_value(&self, coord: usize, value: &BigRational) -> Result<Scalar, ExprError> {
        if !self.mentions(coord) {
            return Ok(self.clone());
        }
        self.substitute(&|j| {
            if j == coord {
                Scalar::constant(value.clone())
            } else {
                Scalar::coord(j)
            }
        })
    }

    /// Value at `point`; fails when a denominator factor is smaller than
    /// `guard` in magnitude.
    pub fn eval(&self, point: &[f64], guard: f64) -> Result<f64, EvalError> {
        self.eval_with_scale(point, guard).map(|(v, _)| v)
    }

    /// Value and magnitude scale (sum of absolute term values over the
    /// absolute denominator) at `point`.
    pub fn eval_with_scale(&self, point: &[f64], guard: f64) -> Result<(f64, f64), EvalError> {
        let mut cache: BTreeMap<Atom, f64> = BTreeMap::new();
        let (n, scale) = eval_poly_f64(&self.num, point, guard, &mut cache)?;
        let mut d = 1.0;
        for (f, &e) in &self.den {
            let (v, _) = eval_poly_f64(f, point, guard, &mut cache)?;
            if v.abs() < guard {
                return Err(EvalError::NearSingular { value: v });
            }
            d *= libm::pow(v, f64::from(e));
        }
        Ok((n / d, scale / d.abs()))
    }

    /// Rebuilds an expression tree `numerator / (f1^e1 * f2^e2 * ...)`.
    pub fn to_expr(&self) -> Expr {
        let num = poly_to_expr(&self.num);
        if self.den.is_empty() {
            return num;
        }
        let mut factors: Vec<Expr> = self
            .den
            .iter()
            .map(|(f, &e)| {
                let base = poly_to_expr(f);
                if e == 1 {
                    base
                } else {
                    Expr::Pow(Box::new(base), e as i32)
                }
            })
            .collect();
        let den = if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Expr::Product(factors)
        };
        Expr::Quotient(Box::new(num), Box::new(den))
    }
}

fn expand(den: &BTreeMap<Poly, u32>) -> Poly {
    den.iter().fold(Poly::one(), |acc, (f, &e)| acc.mul(&f.pow(e)))
}

/// `expand(common) / expand(part)` where `common` is a multiple of `part`.
fn cofactor(common: &BTreeMap<Poly, u32>, part: &BTreeMap<Poly, u32>) -> Poly {
    let mut rest = common.clone();
    for (g, &e) in part {
        match rest.get_mut(g) {
            Some(x) if *x >= e => *x -= e,
            _ => {
                return expand(common)
                    .div_exact(&expand(part))
                    .expect("common denominator is a multiple of each part");
            }
        }
    }
    expand(&rest)
}

/// Inserts `p^e` into a factored denominator, splitting off constant and
/// monomial content. Returns the constant `c^e` removed from `p^e`.
fn insert_poly(den: &mut BTreeMap<Poly, u32>, p: &Poly, e: u32) -> BigRational {
    let content = p.monomial_content();
    let rest = if content.is_one() {
        p.clone()
    } else {
        for (a, k) in content.factors() {
            insert_factor(den, Poly::atom(a.clone()), k * e);
        }
        p.div_monomial(&content)
    };
    let (c, monic) = rest.make_monic();
    if monic.as_constant().is_none() {
        insert_factor(den, monic, e);
    }
    num_traits::pow(c, e as usize)
}

/// Inserts a monic, non-constant factor while keeping factors pairwise
/// non-dividing.
fn insert_factor(den: &mut BTreeMap<Poly, u32>, f: Poly, e: u32) {
    if e == 0 || f.as_constant().is_some() {
        return;
    }
    if let Some(x) = den.get_mut(&f) {
        *x += e;
        return;
    }
    let keys: Vec<Poly> = den.keys().cloned().collect();
    for g in keys {
        if g.degree() < f.degree() {
            if let Some(r) = f.div_exact(&g) {
                *den.get_mut(&g).expect("key present") += e;
                insert_factor(den, r, e);
                return;
            }
        } else if g.degree() > f.degree() {
            if let Some(r) = g.div_exact(&f) {
                let eg = den.remove(&g).expect("key present");
                insert_factor(den, f, e + eg);
                insert_factor(den, r, eg);
                return;
            }
        }
    }
    den.insert(f, e);
}

fn atom_derivative(a: &Atom, i: usize) -> Scalar {
    match a {
        Atom::Coord(j) => {
            if *j == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
        Atom::Kernel(k) => {
            let du = k.arg.diff(i);
            if du.is_zero() {
                return Scalar::zero();
            }
            let outer = match k.func {
                Func::Exp => Scalar::from_poly(Poly::atom(a.clone())),
                Func::Sin => Scalar::cos(&k.arg),
                Func::Cos => Scalar::sin(&k.arg).neg(),
            };
            outer.mul(&du)
        }
    }
}

fn diff_poly(p: &Poly, i: usize) -> Scalar {
    let mut out = Scalar::zero();
    for a in p.atoms() {
        if !a.mentions(i) {
            continue;
        }
        let da = atom_derivative(&a, i);
        if da.is_zero() {
            continue;
        }
        out = out.add(&Scalar::from_poly(p.partial(&a)).mul(&da));
    }
    out
}

fn atom_value_symbolic(
    a: &Atom,
    map: &dyn Fn(usize) -> Scalar,
    cache: &mut BTreeMap<Atom, Scalar>,
) -> Result<Scalar, ExprError> {
    if let Some(v) = cache.get(a) {
        return Ok(v.clone());
    }
    let v = match a {
        Atom::Coord(j) => map(*j),
        Atom::Kernel(k) => {
            let Kernel { func, arg } = &**k;
            Scalar::apply(*func, &arg.substitute(map)?)
        }
    };
    cache.insert(a.clone(), v.clone());
    Ok(v)
}

fn eval_poly_symbolic(
    p: &Poly,
    map: &dyn Fn(usize) -> Scalar,
    cache: &mut BTreeMap<Atom, Scalar>,
) -> Result<Scalar, ExprError> {
    let mut out = Scalar::zero();
    for (m, c) in p.terms() {
        let mut t = Scalar::constant(c.clone());
        for (a, e) in m.factors() {
            let v = atom_value_symbolic(a, map, cache)?;
            t = t.mul(&v.powi(i64::from(*e))?);
        }
        out = out.add(&t);
    }
    Ok(out)
}

fn atom_value_f64(
    a: &Atom,
    point: &[f64],
    guard: f64,
    cache: &mut BTreeMap<Atom, f64>,
) -> Result<f64, EvalError> {
    if let Some(v) = cache.get(a) {
        return Ok(*v);
    }
    let v = match a {
        Atom::Coord(j) => *point.get(*j).ok_or(EvalError::DimensionMismatch {
            expected: j + 1,
            found: point.len(),
        })?,
        Atom::Kernel(k) => k.func.apply(k.arg.eval(point, guard)?),
    };
    cache.insert(a.clone(), v);
    Ok(v)
}

fn eval_poly_f64(
    p: &Poly,
    point: &[f64],
    guard: f64,
    cache: &mut BTreeMap<Atom, f64>,
) -> Result<(f64, f64), EvalError> {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (m, c) in p.map_coeffs_f64() {
        let mut t = c;
        for (a, e) in m.factors() {
            t *= libm::pow(atom_value_f64(a, point, guard, cache)?, f64::from(*e));
        }
        sum += t;
        scale += t.abs();
    }
    Ok((sum, scale))
}

fn monomial_to_expr(m: &Monomial) -> Vec<Expr> {
    m.factors()
        .iter()
        .map(|(a, e)| {
            let base = match a {
                Atom::Coord(j) => Expr::Symbol(*j),
                Atom::Kernel(k) => Expr::Apply(k.func, Box::new(k.arg.to_expr())),
            };
            if *e == 1 {
                base
            } else {
                Expr::Pow(Box::new(base), *e as i32)
            }
        })
        .collect()
}

fn poly_to_expr(p: &Poly) -> Expr {
    if p.is_zero() {
        return Expr::Num(BigRational::zero());
    }
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms().rev() {
        let mut factors = monomial_to_expr(m);
        let negative = c.is_negative();
        let mag = c.abs();
        if factors.is_empty() || !mag.is_one() {
            factors.insert(0, Expr::Num(mag));
        }
        let body = if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Expr::Product(factors)
        };
        terms.push(if negative {
            Expr::Neg(Box::new(body))
        } else {
            body
        });
    }
    if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        Expr::Sum(terms)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr().display_generic())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$inner(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::$inner(&self, &rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$inner(&self, rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::$inner(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl core::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a.add(&b))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Scalar {
        Scalar::coord(i)
    }

    #[test]
    fn cancellation_in_quotients() {
        let a = &x(0) * &x(0) - Scalar::one();
        let b = &x(0) - Scalar::one();
        let q = a.div(&b).unwrap();
        assert_eq!(q, &x(0) + Scalar::one());
    }

    #[test]
    fn sums_of_fractions_share_factors() {
        let f = Scalar::one() + &x(0) * &x(0);
        let inv = f.inverse().unwrap();
        let s = &inv + &inv;
        assert_eq!(s.denominator().len(), 1);
        let back = s.mul(&f);
        assert_eq!(back, Scalar::int(2));
    }

    #[test]
    fn exp_of_negated_argument_cancels() {
        let u = &x(2) + &x(0);
        let p = Scalar::exp(&u).mul(&Scalar::exp(&u.neg()));
        assert!(p.is_one());
    }

    #[test]
    fn quotient_rule() {
        let f = x(0).inverse().unwrap();
        let d = f.diff(0);
        let expected = x(0).powi(-2).unwrap().neg();
        assert_eq!(d, expected);
    }

    #[test]
    fn chain_rule_through_kernels() {
        let u = &x(0) * &x(1);
        let d = Scalar::sin(&u).diff(0);
        assert_eq!(d, Scalar::cos(&u).mul(&x(1)));
        let e = Scalar::exp(&-&u).diff(1);
        assert_eq!(e, Scalar::exp(&-&u).mul(&x(0)).neg());
    }

    #[test]
    fn substitution_into_kernels() {
        let e = Scalar::exp(&x(2)).mul(&x(1));
        let s = e
            .substitute_value(2, &BigRational::zero())
            .unwrap();
        assert_eq!(s, x(1));
    }

    #[test]
    fn eval_guards_denominators() {
        let f = x(0).inverse().unwrap();
        assert!(matches!(f.eval(&[0.0], 1e-6), Err(EvalError::NearSingular { .. })));
        assert_eq!(f.eval(&[4.0], 1e-6).unwrap(), 0.25);
    }
}
