use alloc::vec::Vec;
use core::fmt;

use crate::expr::Scalar;

use super::{Form, Multivector, TensorError};

/// (1,1)-tensor field as an `n × n` matrix; entry `(i, j)` is the
/// coefficient of `∂ᵢ⊗dxʲ`, so `(AX)ⁱ = Σⱼ A[i][j] Xʲ`.
#[derive(Clone, PartialEq)]
pub struct Endo {
    dim: usize,
    m: Vec<Scalar>,
}

impl Endo {
    pub fn zero(dim: usize) -> Self {
        Endo {
            dim,
            m: alloc::vec![Scalar::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, Scalar::one())
    }

    /// `g·Id`.
    pub fn scalar(dim: usize, g: Scalar) -> Self {
        Self::from_fn(dim, |i, j| if i == j { g.clone() } else { Scalar::zero() })
    }

    /// `∂ᵢ⊗dxʲ`.
    pub fn basis(dim: usize, i: usize, j: usize) -> Self {
        let mut e = Self::zero(dim);
        e.set(i, j, Scalar::one());
        e
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                m.push(f(i, j));
            }
        }
        Endo { dim, m }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, TensorError> {
        let dim = rows.len();
        let mut m = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(TensorError::DimensionMismatch(r.len(), dim));
            }
            m.extend(r);
        }
        Ok(Endo { dim, m })
    }

    /// `P♯∘B♭`, with components `C[l][j] = Σₖ B_{jk} P^{kl}`.
    pub fn sharp_flat(p: &Multivector, b: &Form) -> Self {
        assert_eq!(p.degree(), 2, "sharp needs a bivector");
        assert_eq!(b.degree(), 2, "flat needs a 2-form");
        let n = p.dim();
        Self::from_fn(n, |l, j| {
            (0..n)
                .map(|k| b.get(&[j, k]).mul(&p.get(&[k, l])))
                .sum()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.m[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.m[i * self.dim + j] = v;
    }

    /// Row-major entries.
    pub fn components(&self) -> &[Scalar] {
        &self.m
    }

    pub fn apply(&self, x: &Multivector) -> Multivector {
        assert_eq!(x.degree(), 1, "endomorphisms act on vector fields");
        assert_eq!(x.dim(), self.dim, "chart dimensions differ");
        Multivector::vector(
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.get(i, j).mul(x.at(j))).sum())
                .collect(),
        )
    }

    /// `Aᵗα`, so that `(Aᵗα)(X) = α(AX)`.
    pub fn transpose_apply(&self, alpha: &Form) -> Form {
        assert_eq!(alpha.degree(), 1, "transpose acts on 1-forms");
        assert_eq!(alpha.dim(), self.dim, "chart dimensions differ");
        Form::vector(
            (0..self.dim)
                .map(|j| (0..self.dim).map(|i| alpha.at(i).mul(self.get(i, j))).sum())
                .collect(),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endo) -> Endo {
        assert_eq!(self.dim, other.dim, "chart dimensions differ");
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.get(i, k).mul(other.get(k, j))).sum()
        })
    }

    pub fn transpose(&self) -> Endo {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Endo) -> Endo {
        assert_eq!(self.dim, o.dim, "chart dimensions differ");
        Self::from_fn(self.dim, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn sub(&self, o: &Endo) -> Endo {
        assert_eq!(self.dim, o.dim, "chart dimensions differ");
        Self::from_fn(self.dim, |i, j| self.get(i, j).sub(o.get(i, j)))
    }

    pub fn neg(&self) -> Endo {
        self.map(Scalar::neg)
    }

    pub fn scale(&self, f: &Scalar) -> Endo {
        self.map(|c| c.mul(f))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Endo {
        Endo {
            dim: self.dim,
            m: self.m.iter().map(f).collect(),
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<Endo, E> {
        Ok(Endo {
            dim: self.dim,
            m: self.m.iter().map(f).collect::<Result<_, E>>()?,
        })
    }

    pub fn is_zero_exact(&self) -> bool {
        self.m.iter().all(Scalar::is_zero)
    }

    /// Determinant by Gaussian elimination over scalars.
    pub fn det(&self) -> Scalar {
        let n = self.dim;
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Scalar::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = det.neg();
            }
            let p = a[col][col].clone();
            det = det.mul(&p);
            let inv = p.inverse().expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = a[r][col].mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let t = factor.mul(&a[col][c]);
                    a[r][c] = a[r][c].sub(&t);
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination, pivoting on canonically nonzero
    /// entries. `None` when some column has no such pivot.
    pub fn inverse(&self) -> Option<Endo> {
        let n = self.dim;
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut b: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(piv, col);
            b.swap(piv, col);
            let inv = a[col][col].inverse().ok()?;
            for c in 0..n {
                a[col][c] = a[col][c].mul(&inv);
                b[col][c] = b[col][c].mul(&inv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let ta = factor.mul(&a[col][c]);
                    a[r][c] = a[r][c].sub(&ta);
                    let tb = factor.mul(&b[col][c]);
                    b[r][c] = b[r][c].sub(&tb);
                }
            }
        }
        Endo::from_rows(b).ok()
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Chart;

    fn s(t: &str) -> Scalar {
        Chart::standard(3).scalar(t).unwrap()
    }

    #[test]
    fn scalar_multiple_scales_vectors() {
        let g = s("x3");
        let x = Multivector::vector(alloc::vec![s("x1"), s("1"), s("x2^2")]);
        assert_eq!(Endo::scalar(3, g.clone()).apply(&x), x.scale(&g));
    }

    #[test]
    fn transpose_of_rank_one() {
        let f = s("1 + x1^2");
        let a = Endo::basis(3, 0, 2).scale(&f);
        assert_eq!(a.transpose_apply(&Form::basis(3, &[0])), Form::basis(3, &[2]).scale(&f));
        assert!(a.transpose_apply(&Form::basis(3, &[2])).is_zero_exact());
    }

    #[test]
    fn sharp_flat_matches_known_gauge_data() {
        let f = s("1 + x1^2");
        let p = Multivector::basis(3, &[0, 1]).scale(&f);
        let c = Endo::sharp_flat(&p, &Form::basis(3, &[1, 2]));
        assert_eq!(c, Endo::basis(3, 0, 2).scale(&f));
        let c = Endo::sharp_flat(&Multivector::basis(3, &[0, 1]), &Form::basis(3, &[1, 2]).scale(&s("exp(x2)")));
        assert_eq!(c, Endo::basis(3, 0, 2).scale(&s("exp(x2)")));
    }

    #[test]
    fn inverse_and_determinant() {
        let a = Endo::from_rows(alloc::vec![
            alloc::vec![s("x1"), s("1")],
            alloc::vec![s("0"), s("1 + x2^2")],
        ])
        .unwrap();
        assert_eq!(a.det(), s("x1 + x1*x2^2"));
        let inv = a.inverse().unwrap();
        assert_eq!(a.compose(&inv), Endo::identity(2));
        assert!(Endo::basis(2, 0, 1).inverse().is_none());
        assert!(Endo::basis(2, 0, 1).det().is_zero());
    }

    #[test]
    fn compose_is_matrix_product() {
        let a = Endo::basis(3, 0, 1);
        let b = Endo::basis(3, 1, 2);
        assert_eq!(a.compose(&b), Endo::basis(3, 0, 2));
        assert!(b.compose(&a).is_zero_exact());
    }
}
