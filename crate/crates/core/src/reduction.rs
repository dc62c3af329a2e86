//! Reduction of structures to a quotient, in a chart adapted to the data.
//!
//! Coordinates of `M` split into blocks `q` (quotient), `s` (leaf) and `c`
//! (constraint). The submanifold is `N = {c = c₀}`, its tangent bundle is
//! spanned by `∂q, ∂s`, the distribution `E` by `∂s, ∂c`, and the quotient
//! `Q` has coordinates `q` with projection `(q, s) ↦ q`.
//!
//! Every hypothesis is tested on coordinate frames and restricted to `N`.
//! Conditions stated for arbitrary sections of `E` reduce to the frame
//! because the contractions involved are tensorial; what happens off `N`
//! never enters. The bracket condition on `E`-basic functions is replaced by
//! `∂_s P^{qq} = 0` on `N`, which is sufficient but not equivalent.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::calculus::{concomitant, ext_d, hcal};
use crate::expr::{ExprError, SamplingPolicy, Scalar, ZeroTestError, ZeroVerdict};
use crate::gauge::{gauge_transform_unchecked, structure_difference};
use crate::structures::{
    check_gc_background, check_pqnb, zero_all, GcStructure, Outcome, PqnbStructure, VerificationReport,
};
use crate::tensor::{combinations, Alternating, Chart, Endo, Form, Multivector, Variance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    #[error("invalid block setup: {0}")]
    InvalidSetup(String),
    #[error("structure lives on a {found}-dimensional chart, setup expects {expected}")]
    ChartMismatch { expected: usize, found: usize },
    #[error("a component is singular on N: {0}")]
    SingularOnN(#[from] ExprError),
    #[error("hypothesis {} fails", .0.first_failure().unwrap_or("?"))]
    HypothesisFailed(Box<VerificationReport>),
    #[error("component {tensor}{index:?} still depends on leaf coordinate {leaf} after restriction to N")]
    ResidualDependence { tensor: &'static str, index: Vec<usize>, leaf: usize, verdict: ZeroVerdict },
    #[error("reduced structure fails its check at `{}`", .0.first_failure().unwrap_or("?"))]
    OutputRejected(Box<VerificationReport>),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedReductionSetup {
    pub chart: Chart,
    pub q: Vec<usize>,
    pub s: Vec<usize>,
    pub c: Vec<usize>,
    pub c0: Vec<BigRational>,
}

pub const ANCHOR_I: &str = "sufficient surrogate: d_s P^{q q} = 0 on N";
pub const ANCHOR_II: &str = "P^{q c} = 0 on N";
pub const ANCHOR_III: &str = "A^c_q = A^c_s = 0, A^q_s = A^q_c = 0, d_s A^q_q = 0 on N";
pub const ANCHOR_IV: &str = "phi(e, t, t') = H(e, t, t') = 0 on N for e in {s, c}, t, t' in {q, s}";
pub const ANCHOR_GC_A: &str = "sigma(t, e) = 0 on N for t in {q, s}, e in {s, c}";
pub const ANCHOR_GC_B: &str = "d sigma(e, t, t') = H(e, t, t') = 0 on N for e in {s, c}, t, t' in {q, s}";
pub const ANCHOR_B_A: &str = "B(t, e) = 0 on N for t in {q, s}, e in {s, c}";
pub const ANCHOR_B_B: &str = "d_s B_{q q} = 0 on N";

impl AdaptedReductionSetup {
    pub fn new(
        chart: Chart,
        q: Vec<usize>,
        s: Vec<usize>,
        c: Vec<usize>,
        c0: Vec<BigRational>,
    ) -> Result<Self, ReductionError> {
        let n = chart.dim();
        if q.is_empty() {
            return Err(ReductionError::InvalidSetup("the quotient block is empty".into()));
        }
        if c0.len() != c.len() {
            return Err(ReductionError::InvalidSetup(alloc::format!(
                "{} constraint coordinates but {} values",
                c.len(),
                c0.len()
            )));
        }
        let mut seen = alloc::vec![false; n];
        for &i in q.iter().chain(&s).chain(&c) {
            if i >= n || seen[i] {
                return Err(ReductionError::InvalidSetup(alloc::format!(
                    "coordinate index {i} is out of range or used twice"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|b| !b) {
            return Err(ReductionError::InvalidSetup("blocks do not cover every coordinate".into()));
        }
        Ok(AdaptedReductionSetup { chart, q, s, c, c0 })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn quotient_dim(&self) -> usize {
        self.q.len()
    }

    /// Indices spanning `TN`: `q` then `s`.
    pub fn tangent(&self) -> Vec<usize> {
        self.q.iter().chain(&self.s).copied().collect()
    }

    /// Indices spanning `E`: `s` then `c`.
    pub fn distribution(&self) -> Vec<usize> {
        self.s.iter().chain(&self.c).copied().collect()
    }

    /// Chart of `Q`. Nonvanishing factors mentioning only `q` carry over.
    pub fn quotient_chart(&self) -> Chart {
        let names: Vec<String> = self.q.iter().map(|&i| self.chart.coords()[i].clone()).collect();
        let mut out = Chart::new(names).expect("distinct names");
        for f in self.chart.nonvanishing() {
            let only_q = (0..self.dim()).all(|i| self.q.contains(&i) || !f.mentions(i));
            if only_q {
                if let Ok(g) = self.descend(f) {
                    out.declare_nonvanishing(g);
                }
            }
        }
        out
    }

    fn check_chart(&self, n: usize) -> Result<(), ReductionError> {
        if n == self.dim() {
            Ok(())
        } else {
            Err(ReductionError::ChartMismatch { expected: self.dim(), found: n })
        }
    }

    /// `f|_N`: constraint coordinates set to `c₀`.
    pub fn restrict(&self, f: &Scalar) -> Result<Scalar, ReductionError> {
        if !self.c.iter().any(|&i| f.mentions(i)) {
            return Ok(f.clone());
        }
        Ok(f.substitute(&|j| match self.c.iter().position(|&k| k == j) {
            Some(b) => Scalar::constant(self.c0[b].clone()),
            None => Scalar::coord(j),
        })?)
    }

    /// `π*g` for a function on `Q`.
    pub fn lift(&self, g: &Scalar) -> Result<Scalar, ReductionError> {
        Ok(g.substitute(&|k| Scalar::coord(self.q[k]))?)
    }

    // f|_{N, s = 0} in quotient coordinates, without certification.
    fn descend(&self, f: &Scalar) -> Result<Scalar, ReductionError> {
        Ok(f.substitute(&|j| {
            if let Some(k) = self.q.iter().position(|&i| i == j) {
                Scalar::coord(k)
            } else if let Some(b) = self.c.iter().position(|&i| i == j) {
                Scalar::constant(self.c0[b].clone())
            } else {
                Scalar::zero()
            }
        })?)
    }

    /// Projects a component to `Q` after certifying that its restriction
    /// to `N` does not depend on `s`.
    pub fn project(
        &self,
        f: &Scalar,
        tensor: &'static str,
        index: &[usize],
        policy: &SamplingPolicy,
    ) -> Result<Scalar, ReductionError> {
        let r = self.restrict(f)?;
        for &a in &self.s {
            let d = r.diff(a);
            let v = zero_all(core::iter::once(&d), &self.chart, policy)?;
            if !v.is_zero() {
                return Err(ReductionError::ResidualDependence {
                    tensor,
                    index: index.to_vec(),
                    leaf: a,
                    verdict: v,
                });
            }
        }
        self.descend(f)
    }

    fn project_alternating<K: Variance>(
        &self,
        t: &Alternating<K>,
        tensor: &'static str,
        policy: &SamplingPolicy,
    ) -> Result<Alternating<K>, ReductionError> {
        let m = self.quotient_dim();
        let mut out = Alternating::<K>::zero(m, t.degree());
        for idx in combinations(m, t.degree()) {
            let full: Vec<usize> = idx.iter().map(|&k| self.q[k]).collect();
            out.set(&idx, self.project(&t.get(&full), tensor, &full, policy)?);
        }
        Ok(out)
    }

    pub fn project_form(&self, w: &Form, tensor: &'static str, policy: &SamplingPolicy) -> Result<Form, ReductionError> {
        self.project_alternating(w, tensor, policy)
    }

    pub fn project_multivector(
        &self,
        p: &Multivector,
        tensor: &'static str,
        policy: &SamplingPolicy,
    ) -> Result<Multivector, ReductionError> {
        self.project_alternating(p, tensor, policy)
    }

    pub fn project_endo(&self, a: &Endo, policy: &SamplingPolicy) -> Result<Endo, ReductionError> {
        let m = self.quotient_dim();
        let mut out = Endo::zero(m);
        for i in 0..m {
            for j in 0..m {
                let (qi, qj) = (self.q[i], self.q[j]);
                out.set(i, j, self.project(a.get(qi, qj), "A", &[qi, qj], policy)?);
            }
        }
        Ok(out)
    }

    /// `π*w` for a form on `Q`.
    pub fn lift_form(&self, w: &Form) -> Result<Form, ReductionError> {
        let mut out = Form::zero(self.dim(), w.degree());
        for (idx, v) in w.indexed() {
            let full: Vec<usize> = idx.iter().map(|&k| self.q[k]).collect();
            out.set(&full, self.lift(v)?);
        }
        Ok(out)
    }

    /// `i_N^* w − π^* w'` on the `TN` frame; vanishes iff `w` restricts to
    /// the pullback of `w'`.
    pub fn pullback_residual(&self, w: &Form, w_q: &Form) -> Result<Vec<Scalar>, ReductionError> {
        let t = self.tangent();
        let lifted = self.lift_form(w_q)?;
        let mut out = Vec::new();
        for idx in combinations(t.len(), w.degree()) {
            let full: Vec<usize> = idx.iter().map(|&k| t[k]).collect();
            out.push(self.restrict(&w.get(&full))?.sub(&lifted.get(&full)));
        }
        Ok(out)
    }

    // Restrictions to N of the given components.
    fn restricted(&self, items: impl IntoIterator<Item = Scalar>) -> Result<Vec<Scalar>, ReductionError> {
        items.into_iter().map(|f| self.restrict(&f)).collect()
    }

    fn zero_on_n(&self, items: Vec<Scalar>, policy: &SamplingPolicy) -> Outcome {
        match self.restricted(items) {
            Ok(v) => zero_all(&v, &self.chart, policy).into(),
            Err(e) => Outcome::Error(alloc::string::ToString::to_string(&e)),
        }
    }

    // Components w(e, t, t') with e in E and t, t' in TN.
    fn transverse_components(&self, w: &Form) -> Vec<Scalar> {
        let t = self.tangent();
        let mut out = Vec::new();
        for &e in &self.distribution() {
            for rest in combinations(t.len(), w.degree() - 1) {
                let mut idx = alloc::vec![e];
                idx.extend(rest.iter().map(|&k| t[k]));
                out.push(w.get(&idx));
            }
        }
        out
    }

    fn push_bivector_conditions(&self, r: &mut VerificationReport, p: &Multivector, a: &Endo, policy: &SamplingPolicy) {
        let mut i_items = Vec::new();
        for &qi in &self.q {
            for &qj in &self.q {
                if qi < qj {
                    let pq = p.get(&[qi, qj]);
                    i_items.extend(self.s.iter().map(|&sa| pq.diff(sa)));
                }
            }
        }
        r.push("(i)", ANCHOR_I, self.zero_on_n(i_items, policy));

        let ii_items = self.q.iter().flat_map(|&qi| self.c.iter().map(move |&cb| p.get(&[qi, cb]))).collect();
        r.push("(ii)", ANCHOR_II, self.zero_on_n(ii_items, policy));

        let mut iii = Vec::new();
        for &c in &self.c {
            for &t in &self.tangent() {
                iii.push(a.get(c, t).clone());
            }
        }
        for &qi in &self.q {
            for &e in &self.distribution() {
                iii.push(a.get(qi, e).clone());
            }
            for &qj in &self.q {
                iii.extend(self.s.iter().map(|&sa| a.get(qi, qj).diff(sa)));
            }
        }
        r.push("(iii)", ANCHOR_III, self.zero_on_n(iii, policy));
    }
}

/// Tests the reduction hypotheses (i)–(iv) on `N`.
pub fn check_reduction_hypotheses(
    setup: &AdaptedReductionSetup,
    st: &PqnbStructure,
    policy: &SamplingPolicy,
) -> Result<VerificationReport, ReductionError> {
    setup.check_chart(st.dim())?;
    let mut r = VerificationReport::new("reduction hypotheses", policy);
    setup.push_bivector_conditions(&mut r, &st.p, &st.a, policy);
    let mut iv = setup.transverse_components(&st.phi);
    iv.extend(setup.transverse_components(&st.h));
    r.push("(iv)", ANCHOR_IV, setup.zero_on_n(iv, policy));
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduced<T> {
    pub structure: T,
    pub hypotheses: VerificationReport,
    /// Check of the reduced structure on `Q`.
    pub certificate: VerificationReport,
}

/// Projects `(P, A, φ, H)` to `Q`. Fails on the first unmet hypothesis or
/// on any projected component that still depends on `s` along `N`.
pub fn reduce(
    setup: &AdaptedReductionSetup,
    st: &PqnbStructure,
    policy: &SamplingPolicy,
) -> Result<Reduced<PqnbStructure>, ReductionError> {
    let hypotheses = check_reduction_hypotheses(setup, st, policy)?;
    if !hypotheses.passed() {
        return Err(ReductionError::HypothesisFailed(Box::new(hypotheses)));
    }
    let structure = project_structure(setup, st, policy)?;
    let certificate = check_pqnb(&structure, policy);
    if !certificate.passed() {
        return Err(ReductionError::OutputRejected(Box::new(certificate)));
    }
    Ok(Reduced { structure, hypotheses, certificate })
}

/// The projection step of [`reduce`] without hypothesis checks.
pub fn project_structure(
    setup: &AdaptedReductionSetup,
    st: &PqnbStructure,
    policy: &SamplingPolicy,
) -> Result<PqnbStructure, ReductionError> {
    setup.check_chart(st.dim())?;
    Ok(PqnbStructure::new(
        setup.quotient_chart(),
        setup.project_multivector(&st.p, "P", policy)?,
        setup.project_endo(&st.a, policy)?,
        setup.project_form(&st.phi, "phi", policy)?,
        setup.project_form(&st.h, "H", policy)?,
    ))
}

/// Reduces a generalized complex structure: hypotheses (i)–(iii) on
/// `(P, A)`, then (a) and (b) on `σ` and `H`.
pub fn reduce_gc(
    setup: &AdaptedReductionSetup,
    j: &GcStructure,
    policy: &SamplingPolicy,
) -> Result<Reduced<GcStructure>, ReductionError> {
    setup.check_chart(j.chart.dim())?;
    let mut r = VerificationReport::new("gc reduction hypotheses", policy);
    setup.push_bivector_conditions(&mut r, &j.p, &j.a, policy);
    let mut a_items = Vec::new();
    for &t in &setup.tangent() {
        for &e in &setup.distribution() {
            a_items.push(j.sigma.get(&[t, e]));
        }
    }
    r.push("(a)", ANCHOR_GC_A, setup.zero_on_n(a_items, policy));
    let mut b_items = setup.transverse_components(&ext_d(&j.sigma));
    b_items.extend(setup.transverse_components(&j.h));
    r.push("(b)", ANCHOR_GC_B, setup.zero_on_n(b_items, policy));
    if !r.passed() {
        return Err(ReductionError::HypothesisFailed(Box::new(r)));
    }
    let structure = GcStructure::new(
        setup.quotient_chart(),
        setup.project_endo(&j.a, policy)?,
        setup.project_multivector(&j.p, "P", policy)?,
        setup.project_form(&j.sigma, "sigma", policy)?,
        setup.project_form(&j.h, "H", policy)?,
    );
    let certificate = check_gc_background(&structure, policy);
    if !certificate.passed() {
        return Err(ReductionError::OutputRejected(Box::new(certificate)));
    }
    Ok(Reduced { structure, hypotheses: r, certificate })
}

/// Both routes around the square formed by gauging with `B` and reducing.
#[derive(Debug, Clone, PartialEq)]
pub struct CommuteOutcome {
    pub report: VerificationReport,
    pub gauge_then_reduce: Option<PqnbStructure>,
    pub reduce_then_gauge: Option<PqnbStructure>,
}

impl CommuteOutcome {
    pub fn commutes(&self) -> bool {
        self.report.passed()
    }
}

/// Gauges by `B` then reduces, and reduces then gauges by the projected
/// `B'`, and compares componentwise. Items `(a)` and `(b)` are the
/// conditions on `B`.
pub fn gauge_reduce_commute(
    setup: &AdaptedReductionSetup,
    st: &PqnbStructure,
    b: &Form,
    policy: &SamplingPolicy,
) -> Result<CommuteOutcome, ReductionError> {
    setup.check_chart(st.dim())?;
    setup.check_chart(b.dim())?;
    let mut report = VerificationReport::new("gauge/reduction square", policy);
    let mut a_items = Vec::new();
    for &t in &setup.tangent() {
        for &e in &setup.distribution() {
            a_items.push(b.get(&[t, e]));
        }
    }
    report.push("(a)", ANCHOR_B_A, setup.zero_on_n(a_items, policy));
    let b_q = setup.project_form(b, "B", policy);
    report.push(
        "(b)",
        ANCHOR_B_B,
        match &b_q {
            Ok(_) => Outcome::Flag(true),
            Err(e) => Outcome::Error(alloc::string::ToString::to_string(e)),
        },
    );
    let hyp = check_reduction_hypotheses(setup, st, policy)?;
    let hyp_ok = hyp.passed();
    report.push("reducible", "hypotheses (i)-(iv) for the input", Outcome::Nested(hyp));
    if !report.passed() || !hyp_ok {
        return Ok(CommuteOutcome { report, gauge_then_reduce: None, reduce_then_gauge: None });
    }
    let b_q = b_q?;

    let first = reduce(setup, &gauge_transform_unchecked(b, st), policy);
    let second = reduce(setup, st, policy).map(|red| gauge_transform_unchecked(&b_q, &red.structure));
    let (first, second) = match (first, second) {
        (Ok(x), Ok(y)) => (x.structure, y),
        (x, y) => {
            let describe = |e: Option<ReductionError>| match e {
                None => Outcome::Flag(true),
                Some(e) => Outcome::Error(alloc::string::ToString::to_string(&e)),
            };
            report.push("gauge-then-reduce", "reduce(gauge(B, S))", describe(x.err()));
            report.push("reduce-then-gauge", "gauge(B', reduce(S))", describe(y.err()));
            return Ok(CommuteOutcome { report, gauge_then_reduce: None, reduce_then_gauge: None });
        }
    };
    let diff = structure_difference(&first, &second);
    let q_chart = setup.quotient_chart();
    report.push(
        "diagram",
        "reduce(gauge(B, S)) = gauge(B', reduce(S))",
        zero_all(&diff, &q_chart, policy),
    );
    Ok(CommuteOutcome {
        report,
        gauge_then_reduce: Some(first),
        reduce_then_gauge: Some(second),
    })
}

/// Residuals of the identities relating a structure to its reduction, on
/// coframe pairs `(dqᵢ, dqⱼ)` of `Q` and their canonical extensions:
///
/// - `P(dqᵢ, dqⱼ)|_N = π*P'(dqᵢ, dqⱼ)`,
/// - `dπ P♯(dqᵢ)|_N = π*(P'♯ dqᵢ)`,
/// - `i_N^* 𝒞_{P,A}(dqᵢ, dqⱼ) = π* 𝒞_{P',A'}(dqᵢ, dqⱼ)`,
/// - `i_N^*(ι_A φ) = π*(ι_{A'} φ')` and `i_N^* 𝓗 = π* 𝓗'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionIdentityResiduals {
    pub bivector: Vec<Scalar>,
    pub hamiltonian: Vec<Scalar>,
    pub concomitant: Vec<Scalar>,
    pub phi_contraction: Vec<Scalar>,
    pub hcal: Vec<Scalar>,
}

impl ReductionIdentityResiduals {
    pub fn compute(
        setup: &AdaptedReductionSetup,
        st: &PqnbStructure,
        reduced: &PqnbStructure,
    ) -> Result<Self, ReductionError> {
        let (n, m) = (setup.dim(), setup.quotient_dim());
        let dq = |k: usize| Form::basis(n, &[setup.q[k]]);
        let dq_q = |k: usize| Form::basis(m, &[k]);
        let mut out = ReductionIdentityResiduals {
            bivector: Vec::new(),
            hamiltonian: Vec::new(),
            concomitant: Vec::new(),
            phi_contraction: Vec::new(),
            hcal: Vec::new(),
        };
        for i in 0..m {
            let v = st.p.sharp(&dq(i));
            let v_q = reduced.p.sharp(&dq_q(i));
            for k in 0..m {
                let lhs = setup.restrict(v.at(setup.q[k]))?;
                out.hamiltonian.push(lhs.sub(&setup.lift(v_q.at(k))?));
            }
            for j in i + 1..m {
                let lhs = setup.restrict(&st.p.get(&[setup.q[i], setup.q[j]]))?;
                out.bivector.push(lhs.sub(&setup.lift(&reduced.p.get(&[i, j]))?));
                let c = concomitant(&st.p, &st.a, &dq(i), &dq(j));
                let c_q = concomitant(&reduced.p, &reduced.a, &dq_q(i), &dq_q(j));
                out.concomitant.extend(setup.pullback_residual(&c, &c_q)?);
            }
        }
        out.phi_contraction = setup.pullback_residual(&st.phi.i_endo(&st.a), &reduced.phi.i_endo(&reduced.a))?;
        out.hcal = setup.pullback_residual(&hcal(&st.h, &st.a), &hcal(&reduced.h, &reduced.a))?;
        Ok(out)
    }

    pub fn groups(&self) -> [(&'static str, &[Scalar]); 5] {
        [
            ("P(dq_i, dq_j) on N", &self.bivector),
            ("d pi P#(dq_i) on N", &self.hamiltonian),
            ("pullback of the concomitant", &self.concomitant),
            ("pullback of i_A phi", &self.phi_contraction),
            ("pullback of Hcal", &self.hcal),
        ]
    }

    pub fn all(&self) -> impl Iterator<Item = &Scalar> {
        self.groups().into_iter().flat_map(|(_, v)| v.iter())
    }
}

/// Compares the concomitant and `P♯` on the canonical extensions `dqᵢ`
/// with the same quantities on the extensions `dqᵢ + (c₁ − c₀)·w·(dqⱼ + dc₁)`,
/// which agree with `dqᵢ` on `N` and vanish on `E` there. Returns the
/// residual components on `N` (pulled back to `N` for the concomitant).
pub fn extension_independence_residuals(
    setup: &AdaptedReductionSetup,
    st: &PqnbStructure,
    w: &Scalar,
) -> Result<Vec<Scalar>, ReductionError> {
    let n = setup.dim();
    let m = setup.quotient_dim();
    let canonical: Vec<Form> = setup.q.iter().map(|&qi| Form::basis(n, &[qi])).collect();
    let alternative: Vec<Form> = match setup.c.first() {
        None => canonical.clone(),
        Some(&c1) => {
            let bump = Scalar::coord(c1).sub(&Scalar::constant(setup.c0[0].clone())).mul(w);
            (0..m)
                .map(|i| {
                    let other = setup.q[(i + 1) % m];
                    let extra = Form::basis(n, &[other]).add(&Form::basis(n, &[c1]));
                    canonical[i].add(&extra.scale(&bump))
                })
                .collect()
        }
    };
    let mut out = Vec::new();
    for i in 0..m {
        let v = st.p.sharp(&canonical[i]).sub(&st.p.sharp(&alternative[i]));
        out.extend(setup.restricted(setup.q.iter().map(|&k| v.at(k).clone()))?);
        for j in i + 1..m {
            let c = concomitant(&st.p, &st.a, &canonical[i], &canonical[j]);
            let c_alt = concomitant(&st.p, &st.a, &alternative[i], &alternative[j]);
            out.extend(setup.pullback_residual(&c.sub(&c_alt), &Form::zero(m, 1))?);
        }
    }
    Ok(out)
}
