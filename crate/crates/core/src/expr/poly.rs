//! Sparse multivariate polynomials over ℚ whose indeterminates are chart
//! coordinates and opaque transcendental kernels.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::Scalar;

/// Transcendental function heads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => libm::exp(x),
            Func::Sin => libm::sin(x),
            Func::Cos => libm::cos(x),
        }
    }
}

/// `func(arg)` with a canonical argument. Two kernels are the same
/// indeterminate iff their heads and canonical arguments agree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Kernel {
    pub func: Func,
    pub arg: Scalar,
}

/// A polynomial indeterminate. Coordinates sort before kernels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Coord(usize),
    Kernel(Arc<Kernel>),
}

impl Atom {
    pub fn kernel(func: Func, arg: Scalar) -> Self {
        Atom::Kernel(Arc::new(Kernel { func, arg }))
    }

    /// Largest coordinate index mentioned by this atom, including inside
    /// kernel arguments.
    pub(crate) fn max_coord(&self) -> Option<usize> {
        match self {
            Atom::Coord(i) => Some(*i),
            Atom::Kernel(k) => k.arg.max_coord(),
        }
    }

    pub(crate) fn mentions(&self, coord: usize) -> bool {
        match self {
            Atom::Coord(i) => *i == coord,
            Atom::Kernel(k) => k.arg.mentions(coord),
        }
    }

    pub(crate) fn is_transcendental(&self) -> bool {
        matches!(self, Atom::Kernel(_))
    }
}

/// Power product of atoms, kept sorted by atom with positive exponents.
///
/// Ordering is graded lexicographic (total degree first, then exponent of the
/// smallest atom), which is a term order, so the last key of a [`Poly`] is its
/// leading monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(alloc::vec![(a, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *a {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *a {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((a.clone(), e - f)),
                }
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (a, e) in &self.0 {
            let f = other.exponent(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    /// Removes one power of `a`, returning the reduced monomial and the
    /// original exponent.
    fn lower(&self, a: &Atom) -> Option<(u32, Monomial)> {
        let idx = self.0.binary_search_by(|(b, _)| b.cmp(a)).ok()?;
        let e = self.0[idx].1;
        let mut v = self.0.clone();
        if e == 1 {
            v.remove(idx);
        } else {
            v[idx].1 -= 1;
        }
        Some((e, Monomial(v)))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let mut k = 0;
        loop {
            match (a.get(k), b.get(k)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, e)), Some((y, f))) => match x.cmp(y) {
                    // `self` carries the higher-priority atom `x`, which `other` lacks.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match e.cmp(f) {
                        Ordering::Equal => k += 1,
                        ord => return ord,
                    },
                },
            }
        }
    }
}

/// Polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly(BTreeMap<Monomial, BigRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::one(), c);
        }
        Poly(m)
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Monomial::atom(a, 1), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Poly(map)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }

    /// The constant value if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.0.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.leading().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = Vec::new();
        for m in self.0.keys() {
            for (a, _) in m.factors() {
                if let Err(i) = v.binary_search(a) {
                    v.insert(i, a.clone());
                }
            }
        }
        v
    }

    pub fn has_transcendental(&self) -> bool {
        self.0
            .keys()
            .any(|m| m.factors().iter().any(|(a, _)| a.is_transcendental()))
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul_term(&self, m: &Monomial, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(n, c)| (n.mul(m), c * k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            for (n, d) in &other.0 {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// A single polynomial is a Gröbner basis of the ideal it generates, so
    /// plain leading-term division decides divisibility.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.0.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(n, c)| (n.div(m).expect("monomial content divides every term"), c.clone()))
                .collect(),
        )
    }

    /// Partial derivative with respect to an atom treated as an independent
    /// indeterminate.
    pub fn partial(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            if let Some((e, lowered)) = m.lower(a) {
                out.add_term(lowered, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Leading coefficient is positive.
    pub fn leading_positive(&self) -> bool {
        self.leading().map(|(_, c)| c.is_positive()).unwrap_or(true)
    }

    /// Scaled so the leading coefficient is one; returns the scale removed.
    pub fn make_monic(&self) -> (BigRational, Poly) {
        match self.leading() {
            None => (BigRational::one(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }

    pub(crate) fn map_coeffs_f64(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.0.iter().map(|(m, c)| (m, rational_to_f64(c)))
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::atom(Atom::Coord(i))
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn grlex_order_is_total_degree_first() {
        let x0 = Monomial::atom(Atom::Coord(0), 1);
        let x1sq = Monomial::atom(Atom::Coord(1), 2);
        assert!(x1sq > x0);
        let x1 = Monomial::atom(Atom::Coord(1), 1);
        assert!(x0 > x1);
        assert!(Monomial::one() < x1);
    }

    #[test]
    fn exact_division_detects_factors() {
        let a = x(0).add(&Poly::one());
        let b = x(0).sub(&Poly::one());
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.add(&Poly::one()).div_exact(&a), None);
        assert_eq!(x(0).div_exact(&x(1)), None);
    }

    #[test]
    fn partial_derivative_of_power() {
        let p = x(0).pow(3).scale(&q(2)).add(&x(0).mul(&x(1)));
        let d = p.partial(&Atom::Coord(0));
        assert_eq!(d, x(0).pow(2).scale(&q(6)).add(&x(1)));
    }

    #[test]
    fn monomial_content_extraction() {
        let p = x(0).pow(2).mul(&x(1)).add(&x(0).mul(&x(1)).pow(2));
        let m = p.monomial_content();
        assert_eq!(m, Monomial::atom(Atom::Coord(0), 2).mul(&Monomial::atom(Atom::Coord(1), 1)));
    }
}
