use alloc::vec::Vec;

use crate::expr::Scalar;

use super::{combinations, Endo, Form};

/// Component array over coordinate frames with `rank` slots, row-major.
/// The meaning of each slot (vector or covector) is fixed by the producer.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dim: usize,
    rank: usize,
    comps: Vec<Scalar>,
}

fn unflatten(dim: usize, rank: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = alloc::vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % dim;
        flat /= dim;
    }
    idx
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return alloc::vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            // Inserting the largest element at `pos` adds `len - pos` inversions.
            out.push((q, odd ^ ((p.len() - pos) % 2 == 1)));
        }
    }
    out
}

impl DenseTensor {
    pub fn from_fn(dim: usize, rank: usize, f: impl Fn(&[usize]) -> Scalar) -> Self {
        let total = dim.pow(rank as u32);
        let comps = (0..total).map(|k| f(&unflatten(dim, rank, k))).collect();
        DenseTensor { dim, rank, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        assert_eq!(idx.len(), self.rank, "index arity");
        let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        &self.comps[flat]
    }

    pub fn components(&self) -> &[Scalar] {
        &self.comps
    }

    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> {
        let (dim, rank) = (self.dim, self.rank);
        self.comps.iter().enumerate().map(move |(k, c)| (unflatten(dim, rank, k), c))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (o.dim, o.rank), "shapes differ");
        DenseTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (o.dim, o.rank), "shapes differ");
        DenseTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn is_zero_exact(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    /// `T(…, i, …, j, …) + T(…, j, …, i, …)` for every pair of slots `(a, b)`
    /// from `slots` and every index tuple with `idx[a] <= idx[b]`. All vanish
    /// iff `T` is antisymmetric in those slots.
    pub fn antisymmetry_defects(&self, slots: &[usize]) -> Vec<Scalar> {
        let mut out = Vec::new();
        for (idx, c) in self.indexed() {
            for (x, &a) in slots.iter().enumerate() {
                for &b in &slots[x + 1..] {
                    if idx[a] > idx[b] {
                        continue;
                    }
                    let mut sw = idx.clone();
                    sw.swap(a, b);
                    out.push(c.add(self.get(&sw)));
                }
            }
        }
        out
    }

    /// Antisymmetrisation `(1/k!) Σ_σ sgn(σ) T∘σ` as a form. Equals `T` when
    /// `T` is already antisymmetric.
    pub fn alternating_part(&self) -> Form {
        let perms = permutations(self.rank);
        let inv = Scalar::ratio(1, perms.len() as i64);
        let comps = combinations(self.dim, self.rank)
            .into_iter()
            .map(|idx| {
                let mut acc = Scalar::zero();
                for (p, odd) in &perms {
                    let j: Vec<usize> = p.iter().map(|&s| idx[s]).collect();
                    let v = self.get(&j);
                    acc = if *odd { acc.sub(v) } else { acc.add(v) };
                }
                acc.mul(&inv)
            })
            .collect();
        Form::from_components(self.dim, self.rank, comps).expect("shape")
    }
}

impl From<&Form> for DenseTensor {
    fn from(w: &Form) -> Self {
        DenseTensor::from_fn(w.dim(), w.degree(), |idx| w.get(idx))
    }
}

impl Form {
    /// `(X, Y) ↦ B(SX, Y)`.
    pub fn form_left(&self, s: &Endo) -> DenseTensor {
        self.form_both(s, &Endo::identity(self.dim()))
    }

    /// `(X, Y) ↦ B(SX, TY)`.
    pub fn form_both(&self, s: &Endo, t: &Endo) -> DenseTensor {
        assert_eq!(self.degree(), 2, "needs a 2-form");
        let n = self.dim();
        DenseTensor::from_fn(n, 2, |jk| {
            let (j, k) = (jk[0], jk[1]);
            let mut acc = Scalar::zero();
            for l in 0..n {
                let sl = s.get(l, j);
                if sl.is_zero() {
                    continue;
                }
                for m in 0..n {
                    let tm = t.get(m, k);
                    if tm.is_zero() || l == m {
                        continue;
                    }
                    acc = acc.add(&sl.mul(tm).mul(&self.get(&[l, m])));
                }
            }
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{Chart, Multivector};

    fn s(t: &str) -> Scalar {
        Chart::standard(3).scalar(t).unwrap()
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let odd = perms.iter().filter(|(_, o)| *o).count();
        assert_eq!(odd, 3);
        assert!(perms.contains(&(alloc::vec![1, 0, 2], true)));
        assert!(perms.contains(&(alloc::vec![1, 2, 0], false)));
    }

    #[test]
    fn form_left_identity_is_the_form() {
        let b = Form::basis(3, &[0, 1]).scale(&s("x3")).add(&Form::basis(3, &[1, 2]));
        let t = b.form_left(&Endo::identity(3));
        assert_eq!(t, DenseTensor::from(&b));
        assert!(t.antisymmetry_defects(&[0, 1]).iter().all(Scalar::is_zero));
        assert_eq!(t.alternating_part(), b);
    }

    #[test]
    fn gauge_data_gives_vanishing_bc() {
        let f = s("1 + x1^2");
        let p = Multivector::basis(3, &[0, 1]).scale(&f);
        let b = Form::basis(3, &[1, 2]);
        let c = Endo::sharp_flat(&p, &b);
        assert!(b.form_left(&c).is_zero_exact());
    }

    #[test]
    fn form_both_scales_quadratically() {
        let g = s("x3");
        let b = Form::basis(3, &[0, 1]);
        let gi = Endo::scalar(3, g.clone());
        assert_eq!(b.form_both(&gi, &gi).alternating_part(), b.scale(&g.mul(&g)));
    }

    #[test]
    fn symmetric_tensor_has_defects() {
        let t = DenseTensor::from_fn(2, 2, |_| Scalar::one());
        assert!(t.antisymmetry_defects(&[0, 1]).iter().any(|d| !d.is_zero()));
        assert!(t.alternating_part().is_zero_exact());
    }
}
