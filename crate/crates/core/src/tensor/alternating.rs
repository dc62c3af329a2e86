use alloc::vec::Vec;
use core::fmt;
use core::marker::PhantomData;

use crate::expr::Scalar;

use super::{Endo, TensorError};

/// Index position of an alternating tensor.
pub trait Variance: Clone + Copy + fmt::Debug + PartialEq + Eq + Default + Send + Sync + 'static {
    type Dual: Variance<Dual = Self>;
    const NAME: &'static str;
}

/// Covariant slots: differential forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Lower;

/// Contravariant slots: multivector fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Upper;

impl Variance for Lower {
    type Dual = Upper;
    const NAME: &'static str = "form";
}

impl Variance for Upper {
    type Dual = Lower;
    const NAME: &'static str = "multivector";
}

/// Totally antisymmetric tensor of degree `k` on an `n`-dimensional chart,
/// stored densely on strictly increasing index tuples in lexicographic order.
#[derive(Clone, PartialEq)]
pub struct Alternating<K> {
    dim: usize,
    degree: usize,
    comps: Vec<Scalar>,
    _kind: PhantomData<K>,
}

pub type Form = Alternating<Lower>;
pub type Multivector = Alternating<Upper>;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing `k`-tuples from `0..n`, lexicographically ordered.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut next = 0;
    for (i, &c) in idx.iter().enumerate() {
        for j in next..c {
            r += binomial(n - 1 - j, k - 1 - i);
        }
        next = c + 1;
    }
    r
}

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

impl<K: Variance> Alternating<K> {
    /// Zero of the given degree; above the dimension this has no components.
    pub fn zero(dim: usize, degree: usize) -> Self {
        Alternating {
            dim,
            degree,
            comps: alloc::vec![Scalar::zero(); binomial(dim, degree)],
            _kind: PhantomData,
        }
    }

    /// Degree-0 element.
    pub fn scalar(dim: usize, f: Scalar) -> Self {
        let mut z = Self::zero(dim, 0);
        z.comps[0] = f;
        z
    }

    /// Wedge of coordinate basis elements, e.g. `dx1∧dx3` for `[0, 2]`.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut z = Self::zero(dim, idx.len());
        z.set(idx, Scalar::one());
        z
    }

    /// Degree-1 element from its components.
    pub fn vector(comps: Vec<Scalar>) -> Self {
        let dim = comps.len();
        Alternating {
            dim,
            degree: 1,
            comps,
            _kind: PhantomData,
        }
    }

    /// Builds an element from stored components, ordered as [`combinations`].
    pub fn from_components(dim: usize, degree: usize, comps: Vec<Scalar>) -> Result<Self, TensorError> {
        let want = binomial(dim, degree);
        if comps.len() != want {
            return Err(TensorError::DimensionMismatch(comps.len(), want));
        }
        Ok(Alternating {
            dim,
            degree,
            comps,
            _kind: PhantomData,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Stored components, ordered as [`combinations`].
    pub fn components(&self) -> &[Scalar] {
        &self.comps
    }

    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> {
        combinations(self.dim, self.degree).into_iter().zip(&self.comps)
    }

    /// Component at an arbitrary index tuple, with the permutation sign.
    pub fn get(&self, idx: &[usize]) -> Scalar {
        assert_eq!(idx.len(), self.degree, "index arity");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        match sort_with_sign(idx) {
            None => Scalar::zero(),
            Some((v, odd)) => {
                let c = &self.comps[rank(self.dim, &v)];
                if odd {
                    c.neg()
                } else {
                    c.clone()
                }
            }
        }
    }

    /// Degree-1 component.
    pub fn at(&self, i: usize) -> &Scalar {
        assert_eq!(self.degree, 1, "single-index access needs degree 1");
        &self.comps[i]
    }

    /// Sets the component at `idx`, storing it with the permutation sign.
    ///
    /// # Panics
    /// On a repeated index with nonzero value.
    pub fn set(&mut self, idx: &[usize], value: Scalar) {
        assert_eq!(idx.len(), self.degree, "index arity");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        match sort_with_sign(idx) {
            None => assert!(value.is_zero(), "repeated index"),
            Some((v, odd)) => {
                self.comps[rank(self.dim, &v)] = if odd { value.neg() } else { value };
            }
        }
    }

    fn same_shape(&self, o: &Self) {
        assert_eq!(self.dim, o.dim, "chart dimensions differ");
        assert_eq!(self.degree, o.degree, "degrees differ");
    }

    fn zip(&self, o: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        self.same_shape(o);
        Alternating {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| f(a, b)).collect(),
            _kind: PhantomData,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, Scalar::add)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, Scalar::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(Scalar::neg)
    }

    pub fn scale(&self, f: &Scalar) -> Self {
        self.map(|c| c.mul(f))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.map(|c| c.scale_int(k))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        Alternating {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(f).collect(),
            _kind: PhantomData,
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<Self, E> {
        Ok(Alternating {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(f).collect::<Result<_, E>>()?,
            _kind: PhantomData,
        })
    }

    pub fn is_zero_exact(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    /// Exterior product. Errors when the degrees overflow the dimension.
    pub fn try_wedge(&self, o: &Self) -> Result<Self, TensorError> {
        assert_eq!(self.dim, o.dim, "chart dimensions differ");
        let (p, q) = (self.degree, o.degree);
        if p + q > self.dim {
            return Err(TensorError::DegreeTooHigh {
                degree: p + q,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim, p + q);
        for (a_idx, a) in self.indexed() {
            if a.is_zero() {
                continue;
            }
            for (b_idx, b) in o.indexed() {
                if b.is_zero() {
                    continue;
                }
                let joined: Vec<usize> = a_idx.iter().chain(&b_idx).copied().collect();
                if let Some((v, odd)) = sort_with_sign(&joined) {
                    let r = rank(self.dim, &v);
                    let t = a.mul(b);
                    out.comps[r] = if odd { out.comps[r].sub(&t) } else { out.comps[r].add(&t) };
                }
            }
        }
        Ok(out)
    }

    /// # Panics
    /// When the degrees overflow the dimension.
    pub fn wedge(&self, o: &Self) -> Self {
        self.try_wedge(o).expect("wedge degree exceeds dimension")
    }

    /// Contraction of a degree-1 element of the dual kind into the first
    /// slot: `(ι_v T)(…) = T(v, …)`.
    ///
    /// # Panics
    /// If `self` has degree 0 or `v` is not of degree 1.
    pub fn contract(&self, v: &Alternating<K::Dual>) -> Self {
        assert_eq!(v.degree, 1, "contraction needs a degree-1 argument");
        assert_eq!(v.dim, self.dim, "chart dimensions differ");
        assert!(self.degree >= 1, "cannot contract into a degree-0 element");
        let mut out = Self::zero(self.dim, self.degree - 1);
        for (r, rest) in combinations(self.dim, self.degree - 1).into_iter().enumerate() {
            let mut acc = Scalar::zero();
            for i in 0..self.dim {
                if v.comps[i].is_zero() || rest.contains(&i) {
                    continue;
                }
                let mut full = Vec::with_capacity(self.degree);
                full.push(i);
                full.extend_from_slice(&rest);
                acc = acc.add(&v.comps[i].mul(&self.get(&full)));
            }
            out.comps[r] = acc;
        }
        out
    }

    /// Full evaluation on `degree` arguments of the dual kind.
    pub fn eval(&self, args: &[Alternating<K::Dual>]) -> Scalar {
        assert_eq!(args.len(), self.degree, "argument count");
        let mut t = self.clone();
        for a in args {
            t = t.contract(a);
        }
        t.comps[0].clone()
    }

    /// Natural pairing of two degree-1 elements.
    pub fn pair(&self, v: &Alternating<K::Dual>) -> Scalar {
        assert_eq!(self.degree, 1, "pairing needs degree 1");
        assert_eq!(v.degree, 1, "pairing needs degree 1");
        self.comps.iter().zip(&v.comps).map(|(a, b)| a.mul(b)).sum()
    }

    /// The degree-0 value.
    pub fn as_scalar(&self) -> &Scalar {
        assert_eq!(self.degree, 0, "not a function");
        &self.comps[0]
    }

    /// Highest coordinate index mentioned by a component.
    pub fn max_coord(&self) -> Option<usize> {
        self.comps.iter().filter_map(Scalar::max_coord).max()
    }
}

impl Form {
    /// `ι_X ω`.
    pub fn interior(&self, x: &Multivector) -> Form {
        self.contract(x)
    }

    /// `ι_{X∧Y} ω = ι_Y ι_X ω`.
    pub fn interior_pair(&self, x: &Multivector, y: &Multivector) -> Form {
        self.contract(x).contract(y)
    }

    /// `B♭(X) = ι_X B` for a 2-form `B`.
    pub fn flat(&self, x: &Multivector) -> Form {
        assert_eq!(self.degree, 2, "flat needs a 2-form");
        self.contract(x)
    }

    /// The zero-degree derivation `ι_A`:
    /// `(ι_A ω)(X₁,…,X_k) = Σᵢ ω(X₁,…,AXᵢ,…,X_k)`.
    pub fn i_endo(&self, a: &Endo) -> Form {
        assert_eq!(a.dim(), self.dim, "chart dimensions differ");
        let mut out = Form::zero(self.dim, self.degree);
        for (r, idx) in combinations(self.dim, self.degree).into_iter().enumerate() {
            let mut acc = Scalar::zero();
            for s in 0..idx.len() {
                let mut j = idx.clone();
                for l in 0..self.dim {
                    let c = a.get(l, idx[s]);
                    if c.is_zero() {
                        continue;
                    }
                    j[s] = l;
                    acc = acc.add(&c.mul(&self.get(&j)));
                }
            }
            out.comps[r] = acc;
        }
        out
    }
}

impl Multivector {
    /// `P♯α` for a bivector `P`, pinned by `⟨β, P♯α⟩ = P(α, β)`.
    pub fn sharp(&self, alpha: &Form) -> Multivector {
        assert_eq!(self.degree, 2, "sharp needs a bivector");
        self.contract(alpha)
    }

    /// `X(f) = Σ Xⁱ ∂ᵢ f`.
    pub fn apply_to(&self, f: &Scalar) -> Scalar {
        assert_eq!(self.degree, 1, "derivation needs a vector field");
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c.mul(&f.diff(i)))
            .sum()
    }
}

impl<K: Variance> fmt::Debug for Alternating<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}; ", K::NAME, self.degree)?;
        let mut first = true;
        for (idx, c) in self.indexed() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{:?}: {}", idx, c)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Chart;

    fn ch() -> Chart {
        Chart::standard(3)
    }

    fn s(t: &str) -> Scalar {
        ch().scalar(t).unwrap()
    }

    #[test]
    fn ranks_follow_lexicographic_order() {
        for n in 0..6 {
            for k in 0..=n {
                for (r, c) in combinations(n, k).iter().enumerate() {
                    assert_eq!(rank(n, c), r);
                }
                assert_eq!(combinations(n, k).len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn wedge_of_coordinate_forms() {
        let dx1 = Form::basis(3, &[0]);
        let dx2 = Form::basis(3, &[1]);
        let w = dx1.wedge(&dx2);
        assert_eq!(w.get(&[0, 1]), Scalar::one());
        assert_eq!(w.get(&[1, 0]), Scalar::int(-1));
        assert!(dx1.wedge(&dx1).is_zero_exact());
    }

    #[test]
    fn wedge_of_vector_fields() {
        let x = Multivector::basis(3, &[0]).scale(&s("x3"));
        let y = Multivector::basis(3, &[1]);
        assert_eq!(x.wedge(&y).get(&[0, 1]), s("x3"));
    }

    #[test]
    fn interior_examples() {
        let b = Form::basis(3, &[1, 2]);
        assert_eq!(b.interior(&Multivector::basis(3, &[1])), Form::basis(3, &[2]));
        assert_eq!(b.interior(&Multivector::basis(3, &[2])), Form::basis(3, &[1]).neg());
        let vol = Form::basis(3, &[0, 1, 2]).scale(&s("x1"));
        assert_eq!(vol.interior(&Multivector::basis(3, &[0])), Form::basis(3, &[1, 2]).scale(&s("x1")));
    }

    #[test]
    fn interior_pair_follows_order_convention() {
        let vol = Form::basis(3, &[0, 1, 2]);
        let (d1, d2) = (Multivector::basis(3, &[0]), Multivector::basis(3, &[1]));
        assert_eq!(vol.interior_pair(&d1, &d2), Form::basis(3, &[2]));
        assert_eq!(vol.interior_pair(&d2, &d1), Form::basis(3, &[2]).neg());
    }

    #[test]
    fn sharp_anchor() {
        let p = Multivector::basis(3, &[0, 1]).scale(&s("x3"));
        assert_eq!(p.sharp(&Form::basis(3, &[0])), Multivector::basis(3, &[1]).scale(&s("x3")));
        assert_eq!(p.sharp(&Form::basis(3, &[1])), Multivector::basis(3, &[0]).scale(&s("-x3")));
        assert!(p.sharp(&Form::basis(3, &[2])).is_zero_exact());
        // ⟨β, P♯α⟩ = P(α, β)
        let (a, b) = (Form::basis(3, &[0]), Form::basis(3, &[1]));
        assert_eq!(b.pair(&p.sharp(&a)), p.eval(&[a, b]));
    }

    #[test]
    fn flat_examples() {
        let b = Form::basis(3, &[1, 2]).scale(&s("exp(x2)"));
        assert_eq!(b.flat(&Multivector::basis(3, &[2])), Form::basis(3, &[1]).scale(&s("-exp(x2)")));
        assert!(Form::basis(3, &[1, 2]).flat(&Multivector::basis(3, &[0])).is_zero_exact());
    }

    #[test]
    fn i_endo_scales_by_degree() {
        let w = Form::basis(3, &[0, 2]).add(&Form::basis(3, &[1, 2]).scale(&s("x1")));
        assert_eq!(w.i_endo(&Endo::identity(3)), w.scale_int(2));
        let g = s("x3");
        assert_eq!(w.i_endo(&Endo::scalar(3, g.clone())), w.scale(&g).scale_int(2));
    }

    #[test]
    fn eval_is_determinant() {
        let vol = Form::basis(3, &[0, 1, 2]);
        let e = |i| Multivector::basis(3, &[i]);
        assert_eq!(vol.eval(&[e(0), e(1), e(2)]), Scalar::one());
        assert_eq!(vol.eval(&[e(1), e(0), e(2)]), Scalar::int(-1));
    }
}
