//! Structure checkers: Poisson, PN, PqN, PqNb, generalized complex with
//! background, plus the Courant bracket layer.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::calculus::{
    concomitant, ext_d, hcal, lie_derivative, nijenhuis, schouten_self, vf_bracket, d_a, d_fn,
};
use crate::expr::{all_zero, SamplingPolicy, Scalar, ZeroTestError, ZeroVerdict};
use crate::tensor::{Chart, DenseTensor, Endo, Form, GeneralizedSection, Multivector};

/// Poisson bivector `P`, (1,1)-tensor `A`, closed 3-forms `φ` and `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PqnbStructure {
    pub chart: Chart,
    pub p: Multivector,
    pub a: Endo,
    pub phi: Form,
    pub h: Form,
}

impl PqnbStructure {
    pub fn new(chart: Chart, p: Multivector, a: Endo, phi: Form, h: Form) -> Self {
        let n = chart.dim();
        assert!(p.dim() == n && a.dim() == n && phi.dim() == n && h.dim() == n, "chart mismatch");
        assert_eq!(p.degree(), 2, "P must be a bivector");
        assert_eq!(phi.degree(), 3, "phi must be a 3-form");
        assert_eq!(h.degree(), 3, "H must be a 3-form");
        PqnbStructure { chart, p, a, phi, h }
    }

    /// `(P, 0, 0, 0)`.
    pub fn from_poisson(chart: Chart, p: Multivector) -> Self {
        let n = chart.dim();
        PqnbStructure::new(chart, p, Endo::zero(n), Form::zero(n, 3), Form::zero(n, 3))
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }
}

/// The map `𝓙 = [[A, P♯], [σ♭, −Aᵗ]]` on `TM ⊕ T*M` with background `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcStructure {
    pub chart: Chart,
    pub a: Endo,
    pub p: Multivector,
    pub sigma: Form,
    pub h: Form,
}

impl GcStructure {
    pub fn new(chart: Chart, a: Endo, p: Multivector, sigma: Form, h: Form) -> Self {
        let n = chart.dim();
        assert!(p.dim() == n && a.dim() == n && sigma.dim() == n && h.dim() == n, "chart mismatch");
        assert_eq!(p.degree(), 2, "P must be a bivector");
        assert_eq!(sigma.degree(), 2, "sigma must be a 2-form");
        assert_eq!(h.degree(), 3, "H must be a 3-form");
        GcStructure { chart, a, p, sigma, h }
    }

    /// `𝓙(X + α) = (AX + P♯α) + (σ♭X − Aᵗα)`.
    pub fn apply(&self, mu: &GeneralizedSection) -> GeneralizedSection {
        GeneralizedSection::new(
            self.a.apply(&mu.vector).add(&self.p.sharp(&mu.covector)),
            self.sigma.flat(&mu.vector).sub(&self.a.transpose_apply(&mu.covector)),
        )
    }

    /// The associated quadruple `(P, A, dσ, H)`.
    pub fn pqnb(&self) -> PqnbStructure {
        PqnbStructure::new(
            self.chart.clone(),
            self.p.clone(),
            self.a.clone(),
            ext_d(&self.sigma),
            self.h.clone(),
        )
    }
}

/// Result of one checked item.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Verdict(ZeroVerdict),
    Flag(bool),
    Nested(VerificationReport),
    /// The zero test could not run, e.g. sampling found no admissible point.
    Error(String),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        match self {
            Outcome::Verdict(v) => v.is_zero(),
            Outcome::Flag(b) => *b,
            Outcome::Nested(r) => r.passed(),
            Outcome::Error(_) => false,
        }
    }
}

impl From<Result<ZeroVerdict, ZeroTestError>> for Outcome {
    fn from(r: Result<ZeroVerdict, ZeroTestError>) -> Self {
        match r {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportItem {
    pub label: String,
    /// The identity being checked, written out.
    pub anchor: String,
    pub outcome: Outcome,
}

/// Ordered record of checked items. Passes iff every item passes.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub title: String,
    pub items: Vec<ReportItem>,
    pub policy: SamplingPolicy,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>, policy: &SamplingPolicy) -> Self {
        VerificationReport {
            title: title.into(),
            items: Vec::new(),
            policy: policy.clone(),
        }
    }

    pub fn push(&mut self, label: &str, anchor: &str, outcome: impl Into<Outcome>) {
        self.items.push(ReportItem {
            label: label.to_string(),
            anchor: anchor.to_string(),
            outcome: outcome.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.outcome.passed())
    }

    pub fn seed(&self) -> u64 {
        self.policy.seed
    }

    pub fn item(&self, label: &str) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.label == label)
    }

    /// Label of the first failing item.
    pub fn first_failure(&self) -> Option<&str> {
        self.items.iter().find(|i| !i.outcome.passed()).map(|i| i.label.as_str())
    }
}

/// Zero test over every component of a family of tensors.
pub(crate) fn zero_all<'a>(
    items: impl IntoIterator<Item = &'a Scalar>,
    chart: &Chart,
    policy: &SamplingPolicy,
) -> Result<ZeroVerdict, ZeroTestError> {
    all_zero(items, policy, chart.nonvanishing())
}

fn coframe(n: usize) -> Vec<Form> {
    (0..n).map(|i| Form::basis(n, &[i])).collect()
}

fn frame(n: usize) -> Vec<Multivector> {
    (0..n).map(|i| Multivector::basis(n, &[i])).collect()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

pub const ANCHOR_PHI_CLOSED: &str = "d phi = 0";
pub const ANCHOR_H_CLOSED: &str = "d H = 0";
pub const ANCHOR_POISSON: &str = "[P, P] = 0";
pub const ANCHOR_COMPAT: &str = "A o P# = P# o A^t";
pub const ANCHOR_CONCOMITANT: &str = "C_{P,A}(a, b) = -i_{P#a ^ P#b} H";
pub const ANCHOR_TORSION: &str = "N_A(X, Y) = P#(i_{X^Y} phi + i_{AX^Y} H + i_{X^AY} H)";
pub const ANCHOR_DA_PHI: &str = "d_A phi = d Hcal, Hcal(X,Y,Z) = cyc H(AX, AY, Z)";

/// Residuals of `A∘P♯ − P♯∘Aᵗ` on the coframe.
pub fn compat_residual(p: &Multivector, a: &Endo) -> Vec<Scalar> {
    coframe(p.dim())
        .iter()
        .flat_map(|al| {
            a.apply(&p.sharp(al))
                .sub(&p.sharp(&a.transpose_apply(al)))
                .components()
                .to_vec()
        })
        .collect()
}

/// `𝒞_{P,A}(dxⁱ, dxʲ) + ι_{P♯dxⁱ∧P♯dxʲ} H` for `i < j`.
pub fn concomitant_residual(p: &Multivector, a: &Endo, h: &Form) -> Vec<Form> {
    let e = coframe(p.dim());
    pairs(p.dim())
        .map(|(i, j)| {
            let c = concomitant(p, a, &e[i], &e[j]);
            c.add(&h.interior_pair(&p.sharp(&e[i]), &p.sharp(&e[j])))
        })
        .collect()
}

/// `𝒩_A(∂ⱼ, ∂ₖ) − P♯(ι_{∂ⱼ∧∂ₖ}φ + ι_{A∂ⱼ∧∂ₖ}H + ι_{∂ⱼ∧A∂ₖ}H)` for `j < k`.
pub fn torsion_residual(p: &Multivector, a: &Endo, phi: &Form, h: &Form) -> Vec<Multivector> {
    let e = frame(p.dim());
    pairs(p.dim())
        .map(|(j, k)| {
            let (x, y) = (&e[j], &e[k]);
            let (ax, ay) = (a.apply(x), a.apply(y));
            let inner = phi
                .interior_pair(x, y)
                .add(&h.interior_pair(&ax, y))
                .add(&h.interior_pair(x, &ay));
            nijenhuis(a, x, y).sub(&p.sharp(&inner))
        })
        .collect()
}

fn flatten<'a, K: crate::tensor::Variance + 'a>(
    v: impl IntoIterator<Item = &'a crate::tensor::Alternating<K>>,
) -> Vec<&'a Scalar> {
    v.into_iter().flat_map(|t| t.components().iter()).collect()
}

pub fn check_poisson(chart: &Chart, p: &Multivector, policy: &SamplingPolicy) -> VerificationReport {
    let mut r = VerificationReport::new("poisson", policy);
    push_poisson(&mut r, chart, p, policy);
    r
}

fn push_poisson(r: &mut VerificationReport, chart: &Chart, p: &Multivector, policy: &SamplingPolicy) {
    let pp = schouten_self(p);
    r.push("poisson", ANCHOR_POISSON, zero_all(pp.components(), chart, policy));
}

fn push_compat_and_concomitant(
    r: &mut VerificationReport,
    chart: &Chart,
    p: &Multivector,
    a: &Endo,
    h: &Form,
    policy: &SamplingPolicy,
) {
    let compat = compat_residual(p, a);
    r.push("compat", ANCHOR_COMPAT, zero_all(&compat, chart, policy));
    let conc = concomitant_residual(p, a, h);
    r.push("concomitant", ANCHOR_CONCOMITANT, zero_all(flatten(&conc), chart, policy));
}

/// Checks closedness of `φ` and `H`, the Poisson condition, and the four
/// compatibility conditions relating `P`, `A`, `φ`, `H`.
pub fn check_pqnb(s: &PqnbStructure, policy: &SamplingPolicy) -> VerificationReport {
    check_quadruple("pqnb", s, policy)
}

fn check_quadruple(title: &str, s: &PqnbStructure, policy: &SamplingPolicy) -> VerificationReport {
    let ch = &s.chart;
    let mut r = VerificationReport::new(title, policy);
    r.push("phi-closed", ANCHOR_PHI_CLOSED, zero_all(ext_d(&s.phi).components(), ch, policy));
    r.push("H-closed", ANCHOR_H_CLOSED, zero_all(ext_d(&s.h).components(), ch, policy));
    push_poisson(&mut r, ch, &s.p, policy);
    push_compat_and_concomitant(&mut r, ch, &s.p, &s.a, &s.h, policy);
    let tors = torsion_residual(&s.p, &s.a, &s.phi, &s.h);
    r.push("torsion", ANCHOR_TORSION, zero_all(flatten(&tors), ch, policy));
    let da = d_a(&s.a, &s.phi).sub(&ext_d(&hcal(&s.h, &s.a)));
    r.push("dA-phi", ANCHOR_DA_PHI, zero_all(da.components(), ch, policy));
    r
}

/// Poisson quasi-Nijenhuis: the quadruple check with `H = 0`.
pub fn check_pqn(chart: &Chart, p: &Multivector, a: &Endo, phi: &Form, policy: &SamplingPolicy) -> VerificationReport {
    let n = chart.dim();
    let s = PqnbStructure::new(chart.clone(), p.clone(), a.clone(), phi.clone(), Form::zero(n, 3));
    check_quadruple("pqn", &s, policy)
}

/// Poisson–Nijenhuis: the quadruple check with `φ = H = 0`.
pub fn check_pn(chart: &Chart, p: &Multivector, a: &Endo, policy: &SamplingPolicy) -> VerificationReport {
    check_pqn(chart, p, a, &Form::zero(chart.dim(), 3), policy)
}

/// `[X+α, Y+β] = [X,Y] + ℒ_Xβ − ℒ_Yα + ½d(α(Y) − β(X))`.
pub fn courant_bracket(mu: &GeneralizedSection, nu: &GeneralizedSection) -> GeneralizedSection {
    let n = mu.dim();
    let (x, a) = (&mu.vector, &mu.covector);
    let (y, b) = (&nu.vector, &nu.covector);
    let half = Scalar::ratio(1, 2);
    let exact = d_fn(&a.pair(y).sub(&b.pair(x)).mul(&half), n);
    GeneralizedSection::new(
        vf_bracket(x, y),
        lie_derivative(x, b).sub(&lie_derivative(y, a)).add(&exact),
    )
}

/// Courant bracket with background: subtracts `ι_{X∧Y}H` from the covector part.
pub fn courant_bracket_h(mu: &GeneralizedSection, nu: &GeneralizedSection, h: &Form) -> GeneralizedSection {
    let mut out = courant_bracket(mu, nu);
    out.covector = out.covector.sub(&h.interior_pair(&mu.vector, &nu.vector));
    out
}

/// `X + α ↦ X + α + ι_X B`.
pub fn bfield_map(b: &Form, mu: &GeneralizedSection) -> GeneralizedSection {
    GeneralizedSection::new(mu.vector.clone(), mu.covector.add(&b.flat(&mu.vector)))
}

pub const ANCHOR_SIGMA_ANTI: &str = "sigma_A(X, Y) = sigma(AX, Y) is antisymmetric";
pub const ANCHOR_SIGMA_RELATION: &str = "d sigma_A + H - i_A d sigma - Hcal = 0";
pub const ANCHOR_SQUARE: &str = "A^2 = -Id - P# o sigma_flat";
pub const ANCHOR_J_SQUARE: &str = "J^2 = -Id";
pub const ANCHOR_INTEGRABILITY: &str = "[Jm, Jn]_H - J[Jm, n]_H - J[m, Jn]_H - [m, n]_H = 0";

/// Checks the classical-tensor characterisation of a generalized complex
/// structure with background.
pub fn check_gc_background(j: &GcStructure, policy: &SamplingPolicy) -> VerificationReport {
    let ch = &j.chart;
    let n = ch.dim();
    let mut r = VerificationReport::new("gc", policy);
    r.push("H-closed", ANCHOR_H_CLOSED, zero_all(ext_d(&j.h).components(), ch, policy));
    push_poisson(&mut r, ch, &j.p, policy);
    push_compat_and_concomitant(&mut r, ch, &j.p, &j.a, &j.h, policy);
    let dsigma = ext_d(&j.sigma);
    let tors = torsion_residual(&j.p, &j.a, &dsigma, &j.h);
    r.push("torsion", ANCHOR_TORSION, zero_all(flatten(&tors), ch, policy));

    let sigma_a = j.sigma.form_left(&j.a);
    let defects = sigma_a.antisymmetry_defects(&[0, 1]);
    let anti = zero_all(&defects, ch, policy);
    let anti_ok = matches!(&anti, Ok(v) if v.is_zero());
    r.push("sigma_A-antisymmetric", ANCHOR_SIGMA_ANTI, anti);
    if anti_ok {
        let rel = ext_d(&sigma_a.alternating_part())
            .add(&j.h)
            .sub(&dsigma.i_endo(&j.a))
            .sub(&hcal(&j.h, &j.a));
        r.push("sigma-relation", ANCHOR_SIGMA_RELATION, zero_all(rel.components(), ch, policy));
    } else {
        r.push("sigma-relation", ANCHOR_SIGMA_RELATION, Outcome::Error("sigma_A is not a 2-form".into()));
    }

    let sq = j
        .a
        .compose(&j.a)
        .add(&Endo::identity(n))
        .add(&Endo::sharp_flat(&j.p, &j.sigma));
    r.push("square", ANCHOR_SQUARE, zero_all(sq.components(), ch, policy));
    r
}

/// Checks `𝓙² = −Id` and the integrability operator directly on all pairs
/// of the coordinate frame `{∂ᵢ} ∪ {dxʲ}`.
pub fn check_gc_integrability_direct(j: &GcStructure, policy: &SamplingPolicy) -> VerificationReport {
    let ch = &j.chart;
    let n = ch.dim();
    let mut r = VerificationReport::new("gc-direct", policy);
    r.push("H-closed", ANCHOR_H_CLOSED, zero_all(ext_d(&j.h).components(), ch, policy));
    let basis = GeneralizedSection::frame(n);
    let images: Vec<GeneralizedSection> = basis.iter().map(|m| j.apply(m)).collect();
    let sq: Vec<GeneralizedSection> = basis
        .iter()
        .zip(&images)
        .map(|(m, jm)| j.apply(jm).add(m))
        .collect();
    r.push("J-squared", ANCHOR_J_SQUARE, zero_all(sq.iter().flat_map(|s| s.components()), ch, policy));
    let br = |a: &GeneralizedSection, b: &GeneralizedSection| courant_bracket_h(a, b, &j.h);
    let mut residuals = Vec::new();
    for u in 0..basis.len() {
        for v in u + 1..basis.len() {
            let (m, nn) = (&basis[u], &basis[v]);
            let (jm, jn) = (&images[u], &images[v]);
            let t = br(jm, jn)
                .sub(&j.apply(&br(jm, nn)))
                .sub(&j.apply(&br(m, jn)))
                .sub(&br(m, nn));
            residuals.push(t);
        }
    }
    r.push(
        "integrability",
        ANCHOR_INTEGRABILITY,
        zero_all(residuals.iter().flat_map(|s| s.components()), ch, policy),
    );
    r
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StructureError {
    #[error("the 2-form is not closed")]
    NotClosed,
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

/// Conditions under which `σ ↦ σ + ω` keeps a generalized complex structure:
/// `ω_A` antisymmetric, `dω_A = 0` and `P♯∘ω♭ = 0`.
pub fn sigma_shift_report(
    j: &GcStructure,
    omega: &Form,
    policy: &SamplingPolicy,
) -> Result<VerificationReport, StructureError> {
    let ch = &j.chart;
    if !zero_all(ext_d(omega).components(), ch, policy)?.is_zero() {
        return Err(StructureError::NotClosed);
    }
    let mut r = VerificationReport::new("sigma-shift", policy);
    let omega_a = omega.form_left(&j.a);
    let anti = zero_all(&omega_a.antisymmetry_defects(&[0, 1]), ch, policy);
    let anti_ok = matches!(&anti, Ok(v) if v.is_zero());
    r.push("omega_A-antisymmetric", "omega_A(X, Y) = omega(AX, Y) is antisymmetric", anti);
    if anti_ok {
        let d = ext_d(&omega_a.alternating_part());
        r.push("omega_A-closed", "d omega_A = 0", zero_all(d.components(), ch, policy));
    } else {
        r.push("omega_A-closed", "d omega_A = 0", Outcome::Error("omega_A is not a 2-form".into()));
    }
    let pw = Endo::sharp_flat(&j.p, omega);
    r.push("P-omega", "P# o omega_flat = 0", zero_all(pw.components(), ch, policy));
    Ok(r)
}

pub fn check_sigma_shift(j: &GcStructure, omega: &Form, policy: &SamplingPolicy) -> Result<bool, StructureError> {
    Ok(sigma_shift_report(j, omega, policy)?.passed())
}

/// Componentwise zero test of a dense tensor against the chart's
/// nonvanishing set.
pub fn dense_is_zero(t: &DenseTensor, chart: &Chart, policy: &SamplingPolicy) -> Result<ZeroVerdict, ZeroTestError> {
    zero_all(t.components(), chart, policy)
}

/// Componentwise zero test of a form or multivector.
pub fn alternating_is_zero<K: crate::tensor::Variance>(
    t: &crate::tensor::Alternating<K>,
    chart: &Chart,
    policy: &SamplingPolicy,
) -> Result<ZeroVerdict, ZeroTestError> {
    zero_all(t.components(), chart, policy)
}

/// Componentwise zero test of an endomorphism.
pub fn endo_is_zero(t: &Endo, chart: &Chart, policy: &SamplingPolicy) -> Result<ZeroVerdict, ZeroTestError> {
    zero_all(t.components(), chart, policy)
}

/// One-line summary, e.g. `pqnb: PASS (7/7)`.
pub fn summary(r: &VerificationReport) -> String {
    let ok = r.items.iter().filter(|i| i.outcome.passed()).count();
    format!(
        "{}: {} ({}/{})",
        r.title,
        if r.passed() { "PASS" } else { "FAIL" },
        ok,
        r.items.len()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch3() -> Chart {
        Chart::standard(3)
    }

    fn s(t: &str) -> Scalar {
        ch3().scalar(t).unwrap()
    }

    fn pol() -> SamplingPolicy {
        SamplingPolicy::default()
    }

    #[test]
    fn planar_bivector_is_poisson() {
        let p = Multivector::basis(3, &[0, 1]).scale(&s("1 + x1^2"));
        assert!(check_poisson(&ch3(), &p, &pol()).passed());
        let q = Multivector::basis(4, &[0, 1]).add(&Multivector::basis(4, &[2, 3]));
        assert!(check_poisson(&Chart::standard(4), &q, &pol()).passed());
    }

    #[test]
    fn bare_poisson_is_pqnb() {
        let p = Multivector::basis(3, &[0, 1]).scale(&s("x3"));
        let st = PqnbStructure::from_poisson(ch3(), p);
        let r = check_pqnb(&st, &pol());
        assert_eq!(r.items.len(), 7);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn pn_example_in_three_dimensions() {
        let p = Multivector::basis(3, &[0, 1]);
        let e = s("exp(x3)");
        let a = Endo::identity(3).add(&Endo::basis(3, 1, 2).scale(&s("x2"))).scale(&e);
        assert!(check_pn(&ch3(), &p, &a, &pol()).passed());
    }

    #[test]
    fn courant_examples() {
        let e = |i| GeneralizedSection::from_vector(Multivector::basis(3, &[i]));
        assert!(courant_bracket(&e(0), &e(1)).is_zero_exact());
        let vol = Form::basis(3, &[0, 1, 2]);
        let t = courant_bracket_h(&e(0), &e(1), &vol);
        assert!(t.vector.is_zero_exact());
        assert_eq!(t.covector, Form::basis(3, &[2]).neg());
    }

    #[test]
    fn bfield_examples() {
        let b = Form::basis(3, &[1, 2]);
        let mu = GeneralizedSection::from_vector(Multivector::basis(3, &[1]));
        let img = bfield_map(&b, &mu);
        assert_eq!(img.covector, Form::basis(3, &[2]));
        assert_eq!(bfield_map(&b.neg(), &img), mu);
        assert_eq!(bfield_map(&Form::zero(3, 2), &mu), mu);
    }

    fn symplectic() -> GcStructure {
        let c = Chart::standard(2);
        GcStructure::new(
            c,
            Endo::zero(2),
            Multivector::basis(2, &[0, 1]),
            Form::basis(2, &[0, 1]),
            Form::zero(2, 3),
        )
    }

    #[test]
    fn symplectic_case_passes_both_checkers() {
        let j = symplectic();
        let r = check_gc_background(&j, &pol());
        assert!(r.passed(), "{r:?}");
        let d = check_gc_integrability_direct(&j, &pol());
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn opposite_sign_symplectic_form_fails() {
        let mut j = symplectic();
        j.sigma = j.sigma.neg();
        assert_eq!(check_gc_background(&j, &pol()).first_failure(), Some("square"));
        assert_eq!(check_gc_integrability_direct(&j, &pol()).first_failure(), Some("J-squared"));
    }

    #[test]
    fn complex_structure_passes() {
        let a = Endo::basis(2, 1, 0).sub(&Endo::basis(2, 0, 1));
        let j = GcStructure::new(Chart::standard(2), a, Multivector::zero(2, 2), Form::zero(2, 2), Form::zero(2, 3));
        assert!(check_gc_background(&j, &pol()).passed());
        assert!(check_gc_integrability_direct(&j, &pol()).passed());
    }

    #[test]
    fn sigma_shift_cases() {
        let a = Endo::basis(2, 1, 0).sub(&Endo::basis(2, 0, 1));
        let j = GcStructure::new(Chart::standard(2), a, Multivector::zero(2, 2), Form::zero(2, 2), Form::zero(2, 3));
        assert!(check_sigma_shift(&j, &Form::zero(2, 2), &pol()).unwrap());
        assert!(!check_sigma_shift(&j, &Form::basis(2, &[0, 1]), &pol()).unwrap());
        assert!(!check_sigma_shift(&symplectic(), &Form::basis(2, &[0, 1]), &pol()).unwrap());
        let c3 = ch3();
        let j3 = GcStructure::new(c3, Endo::zero(3), Multivector::zero(3, 2), Form::zero(3, 2), Form::zero(3, 3));
        let open = Form::basis(3, &[0, 1]).scale(&s("x3"));
        assert_eq!(check_sigma_shift(&j3, &open, &pol()), Err(StructureError::NotClosed));
    }
}
