//! Exterior calculus on a chart: d, Lie derivatives, brackets, deformed
//! brackets, Nijenhuis torsion, the concomitant and cyclic 3-tensors.

use alloc::vec::Vec;

use crate::expr::Scalar;
use crate::tensor::{combinations, DenseTensor, Endo, Form, Multivector};

/// Exterior derivative. Forms of top degree map to the (empty) zero form.
pub fn ext_d(w: &Form) -> Form {
    let n = w.dim();
    let k = w.degree();
    let comps = combinations(n, k + 1)
        .into_iter()
        .map(|idx| {
            let mut acc = Scalar::zero();
            for s in 0..idx.len() {
                let mut rest = idx.clone();
                let i = rest.remove(s);
                let term = w.get(&rest).diff(i);
                acc = if s % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        })
        .collect();
    Form::from_components(n, k + 1, comps).expect("shape")
}

/// `df` as a 1-form.
pub fn d_fn(f: &Scalar, dim: usize) -> Form {
    Form::vector((0..dim).map(|i| f.diff(i)).collect())
}

/// `ℒ_X ω = ι_X dω + d ι_X ω`; on functions `ℒ_X f = X(f)`.
pub fn lie_derivative(x: &Multivector, w: &Form) -> Form {
    if w.degree() == 0 {
        return Form::scalar(w.dim(), x.apply_to(w.as_scalar()));
    }
    ext_d(w).interior(x).add(&ext_d(&w.interior(x)))
}

/// `[X, Y]ⁱ = X(Yⁱ) − Y(Xⁱ)`.
pub fn vf_bracket(x: &Multivector, y: &Multivector) -> Multivector {
    let n = x.dim();
    Multivector::vector(
        (0..n)
            .map(|i| x.apply_to(y.at(i)).sub(&y.apply_to(x.at(i))))
            .collect(),
    )
}

/// `[X, Y]_A = [AX, Y] + [X, AY] − A[X, Y]`.
pub fn deformed_vf_bracket(a: &Endo, x: &Multivector, y: &Multivector) -> Multivector {
    vf_bracket(&a.apply(x), y)
        .add(&vf_bracket(x, &a.apply(y)))
        .sub(&a.apply(&vf_bracket(x, y)))
}

/// `[α, β]_Q = ℒ_{Q♯α} β − ℒ_{Q♯β} α − d(Q(α, β))`.
pub fn oneform_bracket(q: &Multivector, alpha: &Form, beta: &Form) -> Form {
    let qab = q.eval(&[alpha.clone(), beta.clone()]);
    lie_derivative(&q.sharp(alpha), beta)
        .sub(&lie_derivative(&q.sharp(beta), alpha))
        .sub(&d_fn(&qab, q.dim()))
}

/// `d_A = ι_A∘d − d∘ι_A`; on functions `d_A f = ι_A df`.
pub fn d_a(a: &Endo, w: &Form) -> Form {
    let first = ext_d(w).i_endo(a);
    if w.degree() == 0 {
        return first;
    }
    first.sub(&ext_d(&w.i_endo(a)))
}

/// `ℒ^A_X = ι_X∘d_A + d_A∘ι_X`.
pub fn lie_a(a: &Endo, x: &Multivector, w: &Form) -> Form {
    let first = d_a(a, w).interior(x);
    if w.degree() == 0 {
        return first;
    }
    first.add(&d_a(a, &w.interior(x)))
}

/// `([α, β]^A)_Q = ℒ^A_{Q♯α} β − ℒ^A_{Q♯β} α − d_A(Q(α, β))`.
pub fn oneform_bracket_a(q: &Multivector, a: &Endo, alpha: &Form, beta: &Form) -> Form {
    let qab = Form::scalar(q.dim(), q.eval(&[alpha.clone(), beta.clone()]));
    lie_a(a, &q.sharp(alpha), beta)
        .sub(&lie_a(a, &q.sharp(beta), alpha))
        .sub(&d_a(a, &qab))
}

/// `([α, β]_Q)_{Aᵗ} = [Aᵗα, β]_Q + [α, Aᵗβ]_Q − Aᵗ[α, β]_Q`.
pub fn deformed_oneform_bracket(q: &Multivector, a: &Endo, alpha: &Form, beta: &Form) -> Form {
    oneform_bracket(q, &a.transpose_apply(alpha), beta)
        .add(&oneform_bracket(q, alpha, &a.transpose_apply(beta)))
        .sub(&a.transpose_apply(&oneform_bracket(q, alpha, beta)))
}

/// `𝒩_A(X, Y) = [AX, AY] − A([AX, Y] + [X, AY] − A[X, Y])`.
pub fn nijenhuis(a: &Endo, x: &Multivector, y: &Multivector) -> Multivector {
    vf_bracket(&a.apply(x), &a.apply(y)).sub(&a.apply(&deformed_vf_bracket(a, x, y)))
}

fn frame(n: usize) -> Vec<Multivector> {
    (0..n).map(|i| Multivector::basis(n, &[i])).collect()
}

fn coframe(n: usize) -> Vec<Form> {
    (0..n).map(|i| Form::basis(n, &[i])).collect()
}

/// Torsion on the coordinate frame: entry `[i, j, k]` is `𝒩_A(∂ⱼ, ∂ₖ)ⁱ`.
pub fn nijenhuis_tensor(a: &Endo) -> DenseTensor {
    let n = a.dim();
    let e = frame(n);
    let cols: Vec<Vec<Multivector>> = (0..n)
        .map(|j| (0..n).map(|k| nijenhuis(a, &e[j], &e[k])).collect())
        .collect();
    DenseTensor::from_fn(n, 3, |ijk| cols[ijk[1]][ijk[2]].at(ijk[0]).clone())
}

/// The concomitant
/// `𝒞_{P,A}(α, β) = ℒ_{P♯β}(Aᵗα) − ℒ_{P♯α}(Aᵗβ) + Aᵗℒ_{P♯α}β − Aᵗℒ_{P♯β}α
///                 + d(P(Aᵗα, β)) − Aᵗ d(P(α, β))`.
pub fn concomitant(p: &Multivector, a: &Endo, alpha: &Form, beta: &Form) -> Form {
    let n = p.dim();
    let (pa, pb) = (p.sharp(alpha), p.sharp(beta));
    let (ata, atb) = (a.transpose_apply(alpha), a.transpose_apply(beta));
    lie_derivative(&pb, &ata)
        .sub(&lie_derivative(&pa, &atb))
        .add(&a.transpose_apply(&lie_derivative(&pa, beta)))
        .sub(&a.transpose_apply(&lie_derivative(&pb, alpha)))
        .add(&d_fn(&p.eval(&[ata, beta.clone()]), n))
        .sub(&a.transpose_apply(&d_fn(&p.eval(&[alpha.clone(), beta.clone()]), n)))
}

/// `½(([α, β]^A)_P − ([α, β]_P)_{Aᵗ})`, which equals [`concomitant`] when
/// `A∘P♯ = P♯∘Aᵗ`.
pub fn concomitant_half_difference(p: &Multivector, a: &Endo, alpha: &Form, beta: &Form) -> Form {
    oneform_bracket_a(p, a, alpha, beta)
        .sub(&deformed_oneform_bracket(p, a, alpha, beta))
        .scale(&Scalar::ratio(1, 2))
}

/// Concomitant on the coordinate coframe: entry `[i, j, k]` is
/// `𝒞_{P,A}(dxⁱ, dxʲ)(∂ₖ)`.
pub fn concomitant_tensor(p: &Multivector, a: &Endo) -> DenseTensor {
    let n = p.dim();
    let e = coframe(n);
    let vals: Vec<Vec<Form>> = (0..n)
        .map(|i| (0..n).map(|j| concomitant(p, a, &e[i], &e[j])).collect())
        .collect();
    DenseTensor::from_fn(n, 3, |ijk| vals[ijk[0]][ijk[1]].at(ijk[2]).clone())
}

/// `↻ T(SX, UY, Z)` over cyclic permutations of `(X, Y, Z)`, on the frame.
pub fn cyclic_mixed(t: &Form, s: &Endo, u: &Endo) -> DenseTensor {
    assert_eq!(t.degree(), 3, "needs a 3-form");
    let n = t.dim();
    // m[j,k,l] = T(S∂ⱼ, U∂ₖ, ∂ₗ)
    let m = DenseTensor::from_fn(n, 3, |jkl| {
        let mut acc = Scalar::zero();
        for a in 0..n {
            let sa = s.get(a, jkl[0]);
            if sa.is_zero() {
                continue;
            }
            for b in 0..n {
                let ub = u.get(b, jkl[1]);
                if ub.is_zero() {
                    continue;
                }
                acc = acc.add(&sa.mul(ub).mul(&t.get(&[a, b, jkl[2]])));
            }
        }
        acc
    });
    DenseTensor::from_fn(n, 3, |jkl| {
        let (j, k, l) = (jkl[0], jkl[1], jkl[2]);
        m.get(&[j, k, l]).add(m.get(&[k, l, j])).add(m.get(&[l, j, k]))
    })
}

/// `𝓗(X, Y, Z) = ↻ H(AX, AY, Z)`.
pub fn hcal(h: &Form, a: &Endo) -> Form {
    cyclic_mixed(h, a, a).alternating_part()
}

/// `[P, P]^{ijk} = 2 Σₗ (P^{il}∂ₗP^{jk} + P^{jl}∂ₗP^{ki} + P^{kl}∂ₗP^{ij})`.
pub fn schouten_self(p: &Multivector) -> Multivector {
    assert_eq!(p.degree(), 2, "needs a bivector");
    let n = p.dim();
    let term = |i: usize, j: usize, k: usize| -> Scalar {
        (0..n)
            .map(|l| {
                let pil = p.get(&[i, l]);
                if pil.is_zero() {
                    Scalar::zero()
                } else {
                    pil.mul(&p.get(&[j, k]).diff(l))
                }
            })
            .sum()
    };
    let comps = combinations(n, 3)
        .into_iter()
        .map(|c| {
            let (i, j, k) = (c[0], c[1], c[2]);
            term(i, j, k).add(&term(j, k, i)).add(&term(k, i, j)).scale_int(2)
        })
        .collect();
    Multivector::from_components(n, 3, comps).expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Chart;

    fn ch(n: usize) -> Chart {
        Chart::standard(n)
    }

    fn s(t: &str) -> Scalar {
        ch(3).scalar(t).unwrap()
    }

    fn dx(i: &[usize]) -> Form {
        Form::basis(3, i)
    }

    fn e(i: usize) -> Multivector {
        Multivector::basis(3, &[i])
    }

    #[test]
    fn d_examples() {
        assert_eq!(ext_d(&dx(&[1]).scale(&s("x1"))), dx(&[0, 1]));
        assert!(ext_d(&dx(&[1, 2]).scale(&s("exp(x2)"))).is_zero_exact());
        let top = ext_d(&dx(&[0, 1, 2]).scale(&s("x1")));
        assert_eq!(top.degree(), 4);
        assert!(top.is_zero_exact());
    }

    #[test]
    fn d_of_function_matches_gradient() {
        let f = s("x1^2*x3 + sin(x2)");
        assert_eq!(ext_d(&Form::scalar(3, f.clone())), d_fn(&f, 3));
    }

    #[test]
    fn lie_examples() {
        assert_eq!(lie_derivative(&e(0), &dx(&[1]).scale(&s("x1"))), dx(&[1]));
        let f = s("x2*x3");
        let x = e(1).scale(&s("x1"));
        assert_eq!(lie_derivative(&x, &Form::scalar(3, f)).as_scalar(), &s("x1*x3"));
    }

    #[test]
    fn bracket_example() {
        assert_eq!(vf_bracket(&e(0).scale(&s("x2")), &e(1)), e(0).neg());
    }

    #[test]
    fn deformed_bracket_by_identity() {
        let x = e(0).scale(&s("x2"));
        let y = e(2).scale(&s("x1*x3"));
        assert_eq!(deformed_vf_bracket(&Endo::identity(3), &x, &y), vf_bracket(&x, &y));
        assert!(deformed_vf_bracket(&Endo::scalar(3, s("x3")), &x, &x).is_zero_exact());
    }

    #[test]
    fn oneform_bracket_of_constant_structure() {
        let q = Multivector::basis(3, &[0, 1]);
        assert!(oneform_bracket(&q, &dx(&[0]), &dx(&[1])).is_zero_exact());
    }

    #[test]
    fn d_a_reduces_to_d() {
        let w = dx(&[1]).scale(&s("x1*x3"));
        assert_eq!(d_a(&Endo::identity(3), &w), ext_d(&w));
        let f = Form::scalar(3, s("x1*x2"));
        let a = Endo::basis(3, 0, 2).scale(&s("x2"));
        // d_A f = df∘A
        assert_eq!(d_a(&a, &f), a.transpose_apply(&d_fn(f.as_scalar(), 3)));
    }

    #[test]
    fn lie_a_special_cases() {
        let w = dx(&[1]).scale(&s("x1*x3"));
        let x = e(2).scale(&s("x2"));
        assert_eq!(lie_a(&Endo::identity(3), &x, &w), lie_derivative(&x, &w));
        assert!(lie_a(&Endo::zero(3), &x, &w).is_zero_exact());
    }

    #[test]
    fn torsion_of_rank_one_example() {
        let a = Endo::from_rows(alloc::vec![
            alloc::vec![ch(2).scalar("x2").unwrap(), Scalar::zero()],
            alloc::vec![Scalar::zero(), Scalar::zero()],
        ])
        .unwrap();
        let e2 = |i| Multivector::basis(2, &[i]);
        let t = nijenhuis(&a, &e2(0), &e2(1));
        assert_eq!(t, e2(0).scale(&ch(2).scalar("x2").unwrap()));
    }

    #[test]
    fn torsion_vanishes_for_x3_multiple_of_identity() {
        assert!(nijenhuis_tensor(&Endo::scalar(3, s("x3"))).is_zero_exact());
    }

    #[test]
    fn concomitant_of_identity_vanishes() {
        let p = Multivector::basis(3, &[0, 1]).scale(&s("1 + x1^2"));
        assert!(concomitant_tensor(&p, &Endo::identity(3)).is_zero_exact());
    }

    #[test]
    fn concomitant_for_scalar_endomorphism() {
        // 𝒞 = (∂g/∂x3) P(α, β) dx3 for A = g·Id with g depending on x3 only.
        let f = s("1 + x1^2");
        let g = s("x3^2");
        let p = Multivector::basis(3, &[0, 1]).scale(&f);
        let c = concomitant(&p, &Endo::scalar(3, g.clone()), &dx(&[0]), &dx(&[1]));
        assert_eq!(c, dx(&[2]).scale(&g.diff(2).mul(&f)));
    }

    #[test]
    fn hcal_special_cases() {
        let h = dx(&[0, 1, 2]).scale(&s("x2"));
        assert_eq!(hcal(&h, &Endo::identity(3)), h.scale_int(3));
        assert!(hcal(&h, &Endo::zero(3)).is_zero_exact());
        let g = s("x1 + x3");
        assert_eq!(hcal(&h, &Endo::scalar(3, g.clone())), h.scale(&g.mul(&g)).scale_int(3));
    }

    #[test]
    fn schouten_of_planar_bivector_vanishes() {
        let p = Multivector::basis(3, &[0, 1]).scale(&s("exp(x3) + x1"));
        assert!(schouten_self(&p).is_zero_exact());
    }

    #[test]
    fn schouten_detects_jacobi_failure() {
        // Dual vector field (0, x1, 1) has v·curl v = 1, so Jacobi fails.
        let p = Multivector::basis(3, &[0, 1]).sub(&Multivector::basis(3, &[0, 2]).scale(&s("x1")));
        let pp = schouten_self(&p);
        assert_eq!(pp.get(&[0, 1, 2]), Scalar::int(-2));
    }
}
