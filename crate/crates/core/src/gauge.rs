//! Gauge transformations by 2-forms, constructions from Poisson bivectors,
//! conformal change by Casimirs, and the action on generalized complex
//! structures.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::calculus::{cyclic_mixed, d_a, d_fn, ext_d, vf_bracket};
use crate::expr::{SamplingPolicy, Scalar, ZeroTestError, ZeroVerdict};
use crate::structures::{
    bfield_map, check_pqn, check_pqnb, check_poisson, concomitant_residual, courant_bracket_h, torsion_residual,
    zero_all, GcStructure, PqnbStructure, VerificationReport,
};
use crate::tensor::{Chart, DenseTensor, Endo, Form, GeneralizedSection, Multivector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaugeError {
    #[error("tensor lives on a {found}-dimensional chart, expected {expected}")]
    ChartMismatch { expected: usize, found: usize },
    #[error("B must be a 2-form, found degree {0}")]
    NotTwoForm(usize),
    #[error("input structure fails its check at `{}`", .0.first_failure().unwrap_or("?"))]
    InputRejected(Box<VerificationReport>),
    #[error("transformed structure fails its check at `{}`", .0.first_failure().unwrap_or("?"))]
    OutputRejected(Box<VerificationReport>),
    #[error("bivector is not Poisson")]
    NotPoisson(Box<VerificationReport>),
    #[error("function is not a Casimir: P#(df) has a nonzero component along coordinate {direction}")]
    NotCasimir { direction: usize, verdict: ZeroVerdict },
    #[error("bivector is degenerate")]
    Degenerate,
    #[error("(P#)^-1 A is not antisymmetric; A o P# = P# o A^t fails")]
    NotAntisymmetric { witness: (usize, usize), verdict: ZeroVerdict },
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

/// Whether to re-verify inputs and outputs of a transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verification {
    #[default]
    Verify,
    Trust,
}

fn check_dims(n: usize, b: &Form) -> Result<(), GaugeError> {
    if b.dim() != n {
        return Err(GaugeError::ChartMismatch {
            expected: n,
            found: b.dim(),
        });
    }
    if b.degree() != 2 {
        return Err(GaugeError::NotTwoForm(b.degree()));
    }
    Ok(())
}

/// `B_S(X, Y) = B(SX, Y)` as a 2-form. Exact whenever `B_S` is
/// antisymmetric, as it is for `S = P♯B♭`.
pub fn b_left(b: &Form, s: &Endo) -> Form {
    b.form_left(s).alternating_part()
}

/// The gauge image `(P, A + C, φ − dB_C − d(ι_A B), H + dB)` with `C = P♯B♭`,
/// computed without any checks.
pub fn gauge_transform_unchecked(b: &Form, s: &PqnbStructure) -> PqnbStructure {
    let c = Endo::sharp_flat(&s.p, b);
    let bc = b_left(b, &c);
    let phi = s.phi.sub(&ext_d(&bc)).sub(&ext_d(&b.i_endo(&s.a)));
    PqnbStructure::new(s.chart.clone(), s.p.clone(), s.a.add(&c), phi, s.h.add(&ext_d(b)))
}

/// Gauge transformation determined by `B`. With [`Verification::Verify`]
/// the input and the output are both certified by [`check_pqnb`].
pub fn gauge_transform(
    b: &Form,
    s: &PqnbStructure,
    policy: &SamplingPolicy,
    mode: Verification,
) -> Result<PqnbStructure, GaugeError> {
    check_dims(s.dim(), b)?;
    if mode == Verification::Verify {
        let r = check_pqnb(s, policy);
        if !r.passed() {
            return Err(GaugeError::InputRejected(Box::new(r)));
        }
    }
    let out = gauge_transform_unchecked(b, s);
    if mode == Verification::Verify {
        let r = check_pqnb(&out, policy);
        if !r.passed() {
            return Err(GaugeError::OutputRejected(Box::new(r)));
        }
    }
    Ok(out)
}

fn require_poisson(chart: &Chart, p: &Multivector, policy: &SamplingPolicy) -> Result<(), GaugeError> {
    let r = check_poisson(chart, p, policy);
    if r.passed() {
        Ok(())
    } else {
        Err(GaugeError::NotPoisson(Box::new(r)))
    }
}

/// `(P, C, −dB_C, dB)` with `C = P♯B♭`, for a Poisson bivector `P`.
pub fn gauge_of_poisson(
    chart: &Chart,
    p: &Multivector,
    b: &Form,
    policy: &SamplingPolicy,
) -> Result<PqnbStructure, GaugeError> {
    check_dims(chart.dim(), b)?;
    require_poisson(chart, p, policy)?;
    Ok(gauge_of_poisson_unchecked(chart, p, b))
}

pub fn gauge_of_poisson_unchecked(chart: &Chart, p: &Multivector, b: &Form) -> PqnbStructure {
    gauge_transform_unchecked(b, &PqnbStructure::from_poisson(chart.clone(), p.clone()))
}

/// Outcome of [`pqn_from_form`].
#[derive(Debug, Clone, PartialEq)]
pub enum PqnFromForm {
    /// `(P, C, −dB_C)` with `H = 0`, and its certifying report.
    Accepted(PqnbStructure, VerificationReport),
    /// `ι_{P♯dxⁱ∧P♯dxʲ} dB ≠ 0` for the recorded pair.
    Rejected { pair: (usize, usize), verdict: ZeroVerdict },
}

/// Drops the background of [`gauge_of_poisson`] when
/// `ι_{P♯α∧P♯β} dB = 0` on all coframe pairs.
pub fn pqn_from_form(
    chart: &Chart,
    p: &Multivector,
    b: &Form,
    policy: &SamplingPolicy,
) -> Result<PqnFromForm, GaugeError> {
    check_dims(chart.dim(), b)?;
    require_poisson(chart, p, policy)?;
    let n = chart.dim();
    let db = ext_d(b);
    for i in 0..n {
        for j in i + 1..n {
            let pi = p.sharp(&Form::basis(n, &[i]));
            let pj = p.sharp(&Form::basis(n, &[j]));
            let v = zero_all(db.interior_pair(&pi, &pj).components(), chart, policy)?;
            if !v.is_zero() {
                return Ok(PqnFromForm::Rejected { pair: (i, j), verdict: v });
            }
        }
    }
    let g = gauge_of_poisson_unchecked(chart, p, b);
    let r = check_pqn(chart, &g.p, &g.a, &g.phi, policy);
    let s = PqnbStructure::new(chart.clone(), g.p, g.a, g.phi, Form::zero(n, 3));
    Ok(PqnFromForm::Accepted(s, r))
}

/// Group law: `𝔊(B1)∘𝔊(B2) = 𝔊(B1 + B2)`.
pub fn compose_gauges(b1: &Form, b2: &Form) -> Form {
    b1.add(b2)
}

pub fn inverse_gauge(b: &Form) -> Form {
    b.neg()
}

fn require_casimir(chart: &Chart, p: &Multivector, f: &Scalar, policy: &SamplingPolicy) -> Result<(), GaugeError> {
    let n = chart.dim();
    let v = p.sharp(&d_fn(f, n));
    for i in 0..n {
        let verdict = zero_all(core::iter::once(v.at(i)), chart, policy)?;
        if !verdict.is_zero() {
            return Err(GaugeError::NotCasimir { direction: i, verdict });
        }
    }
    Ok(())
}

/// `e^f P` for a Casimir `f`, certified Poisson.
pub fn conformal_change(
    chart: &Chart,
    p: &Multivector,
    f: &Scalar,
    policy: &SamplingPolicy,
) -> Result<Multivector, GaugeError> {
    require_casimir(chart, p, f, policy)?;
    let q = p.scale(&Scalar::exp(f));
    require_poisson(chart, &q, policy)?;
    Ok(q)
}

/// The two structures
/// `(e^f P, C, e^{−f}(−dB_C + df∧B_C), e^{−f}(dB − df∧B))` and
/// `(e^f P, e^f C, e^f(−dB_C − df∧B_C), dB)`, with `C = P♯B♭`.
pub fn conformal_gauge_variants(
    chart: &Chart,
    p: &Multivector,
    f: &Scalar,
    b: &Form,
    policy: &SamplingPolicy,
) -> Result<(PqnbStructure, PqnbStructure), GaugeError> {
    check_dims(chart.dim(), b)?;
    let q = conformal_change(chart, p, f, policy)?;
    let n = chart.dim();
    let (ef, emf) = (Scalar::exp(f), Scalar::exp(&f.neg()));
    let df = d_fn(f, n);
    let c = Endo::sharp_flat(p, b);
    let bc = b_left(b, &c);
    let dbc = ext_d(&bc);
    let db = ext_d(b);
    let first = PqnbStructure::new(
        chart.clone(),
        q.clone(),
        c.clone(),
        dbc.neg().add(&df.wedge(&bc)).scale(&emf),
        db.sub(&df.wedge(b)).scale(&emf),
    );
    let second = PqnbStructure::new(
        chart.clone(),
        q,
        c.scale(&ef),
        dbc.neg().sub(&df.wedge(&bc)).scale(&ef),
        db,
    );
    Ok((first, second))
}

/// `(A + C, P, σ − B_C − ι_A B)` with background `H + dB`.
pub fn gauge_gc(b: &Form, j: &GcStructure) -> Result<GcStructure, GaugeError> {
    check_dims(j.chart.dim(), b)?;
    let c = Endo::sharp_flat(&j.p, b);
    let sigma = j.sigma.sub(&b_left(b, &c)).sub(&b.i_endo(&j.a));
    Ok(GcStructure::new(
        j.chart.clone(),
        j.a.add(&c),
        j.p.clone(),
        sigma,
        j.h.add(&ext_d(b)),
    ))
}

/// For nondegenerate `P`, the 2-form `B` with `B♭ = (P♯)⁻¹A`, together with
/// `(P, A, −dB_{P♯B♭}, dB)`, the only structure over `(P, A)`.
pub fn pqnb_nondegenerate_classify(
    chart: &Chart,
    p: &Multivector,
    a: &Endo,
    policy: &SamplingPolicy,
) -> Result<(Form, PqnbStructure, VerificationReport), GaugeError> {
    let n = chart.dim();
    if a.dim() != n {
        return Err(GaugeError::ChartMismatch { expected: n, found: a.dim() });
    }
    require_poisson(chart, p, policy)?;
    // Matrix of P♯: column i is P♯(dxⁱ), so entry (j, i) is P^{ij}.
    let sharp = Endo::from_fn(n, |j, i| p.get(&[i, j]));
    let det = sharp.det();
    if det.is_zero() || zero_all(core::iter::once(&det), chart, policy)?.is_zero() {
        return Err(GaugeError::Degenerate);
    }
    let inv = sharp.inverse().ok_or(GaugeError::Degenerate)?;
    // Matrix of B♭: entry (k, j) is B_{jk}.
    let flat = inv.compose(a);
    for j in 0..n {
        for k in j..n {
            let sum = flat.get(k, j).add(flat.get(j, k));
            let v = zero_all(core::iter::once(&sum), chart, policy)?;
            if !v.is_zero() {
                return Err(GaugeError::NotAntisymmetric { witness: (j, k), verdict: v });
            }
        }
    }
    let mut b = Form::zero(n, 2);
    for j in 0..n {
        for k in j + 1..n {
            b.set(&[j, k], flat.get(k, j).clone());
        }
    }
    let s = gauge_of_poisson_unchecked(chart, p, &b);
    let r = check_pqnb(&s, policy);
    Ok((b, s, r))
}

/// Components of the difference of two structures on the same chart.
pub fn structure_difference(x: &PqnbStructure, y: &PqnbStructure) -> Vec<Scalar> {
    x.p.sub(&y.p)
        .components()
        .iter()
        .chain(x.a.sub(&y.a).components())
        .chain(x.phi.sub(&y.phi).components())
        .chain(x.h.sub(&y.h).components())
        .cloned()
        .collect()
}

/// `B[μ, ν]_H − [Bμ, Bν]_{H+dB}`, which vanishes for every `B`.
pub fn courant_compatibility_residual(
    b: &Form,
    h: &Form,
    mu: &GeneralizedSection,
    nu: &GeneralizedSection,
) -> GeneralizedSection {
    let lhs = bfield_map(b, &courant_bracket_h(mu, nu, h));
    let rhs = courant_bracket_h(&bfield_map(b, mu), &bfield_map(b, nu), &h.add(&ext_d(b)));
    lhs.sub(&rhs)
}

// Cyclic sums need not be alternating, so identities are compared densely.
fn dense3(w: &Form) -> DenseTensor {
    DenseTensor::from(w)
}

fn frame_vectors(n: usize) -> Vec<Multivector> {
    (0..n).map(|i| Multivector::basis(n, &[i])).collect()
}

/// Residuals of the identities used to prove that gauge images are again
/// structures, evaluated on coordinate frames. For `C = P♯B♭`:
///
/// - `𝒞_{P,C}(α, β) + ι_{P♯α∧P♯β} dB` (needs `P` Poisson),
/// - `𝒩_C(X, Y) − P♯(ι_{CX∧Y} dB + ι_{X∧CY} dB − ι_{X∧Y} dB_C)`,
/// - `d_C B_C − 𝓑^{C,C} + dB_{C²}`,
///
/// and, when `(P, A, φ, H)` is itself a structure,
///
/// - the mixed torsion `[AX,CY] − A[CX,Y] − … + CA[X,Y]` against
///   `P♯(ι_{AX∧Y}dB + ι_{X∧AY}dB − ι_{X∧Y}d(ι_A B) + ι_{CX∧Y}H + ι_{X∧CY}H)`,
/// - `d_A B_C + d_C(ι_A B) − 𝓗^{C,C} − 𝓑^{A,C} − 𝓑^{C,A} + dB_{AC} + d(ι_{CA} B)`,
/// - `d_A(ι_A B) − 𝓗^{A,C} − 𝓗^{C,A} − 𝓑^{A,A} + dB_{A,A} − ι_C φ`,
///
/// where `𝓑^{S,T}(X,Y,Z) = ↻ dB(SX, TY, Z)` and `𝓗^{S,T}` is the same with `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeIdentityResiduals {
    pub concomitant: Vec<Scalar>,
    pub torsion: Vec<Scalar>,
    pub d_c_bc: Vec<Scalar>,
    pub mixed_torsion: Vec<Scalar>,
    pub d_a_bc: Vec<Scalar>,
    pub d_a_iab: Vec<Scalar>,
}

impl GaugeIdentityResiduals {
    pub fn compute(s: &PqnbStructure, b: &Form) -> Self {
        let (p, a, phi, h) = (&s.p, &s.a, &s.phi, &s.h);
        let n = s.dim();
        let c = Endo::sharp_flat(p, b);
        let db = ext_d(b);
        let bc = b_left(b, &c);
        let dbc = ext_d(&bc);
        let iab = b.i_endo(a);
        let bcal = |x: &Endo, y: &Endo| cyclic_mixed(&db, x, y);
        let hcal2 = |x: &Endo, y: &Endo| cyclic_mixed(h, x, y);
        let flatten = |v: Vec<Form>| v.iter().flat_map(|f| f.components().to_vec()).collect::<Vec<_>>();

        let concomitant = flatten(concomitant_residual(p, &c, &db));
        let torsion = torsion_residual(p, &c, &dbc.neg(), &db)
            .iter()
            .flat_map(|v| v.components().to_vec())
            .collect();
        let c2 = c.compose(&c);
        let d_c_bc = dense3(&d_a(&c, &bc))
            .sub(&bcal(&c, &c))
            .add(&dense3(&ext_d(&b_left(b, &c2))))
            .components()
            .to_vec();

        let e = frame_vectors(n);
        let mut mixed_torsion = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                let (x, y) = (&e[j], &e[k]);
                let br = |u: &Multivector, v: &Multivector| vf_bracket(u, v);
                let (ax, ay, cx, cy) = (a.apply(x), a.apply(y), c.apply(x), c.apply(y));
                let xy = br(x, y);
                let lhs = br(&ax, &cy)
                    .sub(&a.apply(&br(&cx, y)))
                    .sub(&a.apply(&br(x, &cy)))
                    .add(&a.apply(&c.apply(&xy)))
                    .add(&br(&cx, &ay))
                    .sub(&c.apply(&br(&ax, y)))
                    .sub(&c.apply(&br(x, &ay)))
                    .add(&c.apply(&a.apply(&xy)));
                let inner = db
                    .interior_pair(&ax, y)
                    .add(&db.interior_pair(x, &ay))
                    .sub(&ext_d(&iab).interior_pair(x, y))
                    .add(&h.interior_pair(&cx, y))
                    .add(&h.interior_pair(x, &cy));
                mixed_torsion.extend(lhs.sub(&p.sharp(&inner)).components().iter().cloned());
            }
        }

        let ac = a.compose(&c);
        let ca = c.compose(a);
        let d_a_bc = dense3(&d_a(a, &bc).add(&d_a(&c, &iab)))
            .sub(&hcal2(&c, &c))
            .sub(&bcal(a, &c))
            .sub(&bcal(&c, a))
            .add(&dense3(&ext_d(&b_left(b, &ac))))
            .add(&dense3(&ext_d(&b.i_endo(&ca))))
            .components()
            .to_vec();

        let baa = b.form_both(a, a).alternating_part();
        let d_a_iab = dense3(&d_a(a, &iab))
            .sub(&hcal2(a, &c))
            .sub(&hcal2(&c, a))
            .sub(&bcal(a, a))
            .add(&dense3(&ext_d(&baa)))
            .sub(&dense3(&phi.i_endo(&c)))
            .components()
            .to_vec();

        GaugeIdentityResiduals {
            concomitant,
            torsion,
            d_c_bc,
            mixed_torsion,
            d_a_bc,
            d_a_iab,
        }
    }

    /// Labelled residual groups, in the order listed above.
    pub fn groups(&self) -> [(&'static str, &[Scalar]); 6] {
        [
            ("C_{P,C} = -i_{P#a ^ P#b} dB", &self.concomitant),
            ("N_C = P#(i_{CX^Y} dB + i_{X^CY} dB - i_{X^Y} dB_C)", &self.torsion),
            ("d_C B_C = B^{C,C} - dB_{C^2}", &self.d_c_bc),
            ("mixed torsion of A and C", &self.mixed_torsion),
            ("d_A B_C + d_C i_A B", &self.d_a_bc),
            ("d_A i_A B", &self.d_a_iab),
        ]
    }
}
