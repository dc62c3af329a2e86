//! Seeded instance generators for sweeps and acceptance runs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::ext_d;
use crate::expr::Scalar;
use num_rational::BigRational;

use crate::gauge::{gauge_gc, gauge_of_poisson_unchecked, gauge_transform_unchecked};
use crate::reduction::AdaptedReductionSetup;
use crate::structures::{GcStructure, PqnbStructure};
use crate::tensor::{combinations, Chart, Endo, Form, GeneralizedSection, Multivector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn parse(chart: &Chart, text: &str) -> Scalar {
    chart.scalar(text).expect("generated expression parses")
}

/// Integer polynomial of degree at most `degree` in the chart coordinates,
/// as source text. About half of all monomials are kept.
pub fn random_poly_text(rng: &mut impl Rng, chart: &Chart, degree: usize) -> String {
    let n = chart.dim();
    let mut monos: Vec<Vec<usize>> = Vec::new();
    for d in 0..=degree {
        // multisets of size d
        let mut cur = Vec::new();
        fn rec(n: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == d {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, d, i, cur, out);
                cur.pop();
            }
        }
        rec(n, d, 0, &mut cur, &mut monos);
    }
    let mut out = String::new();
    for m in monos {
        if !rng.random_bool(0.5) {
            continue;
        }
        let c: i64 = rng.random_range(1..=2) * if rng.random_bool(0.5) { -1 } else { 1 };
        let mut term = format!("{}", c.abs());
        for &i in &m {
            term.push('*');
            term.push_str(&chart.coords()[i]);
        }
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn random_poly(rng: &mut impl Rng, chart: &Chart, degree: usize) -> Scalar {
    parse(chart, &random_poly_text(rng, chart, degree))
}

/// A `k`-form whose components are random polynomials of degree at most 2.
/// Each component is nonzero with probability one half.
pub fn random_form(rng: &mut impl Rng, chart: &Chart, k: usize) -> Form {
    let n = chart.dim();
    let mut w = Form::zero(n, k);
    for idx in combinations(n, k) {
        if rng.random_bool(0.5) {
            w.set(&idx, random_poly(rng, chart, 2));
        }
    }
    w
}

pub fn random_vector(rng: &mut impl Rng, chart: &Chart) -> Multivector {
    Multivector::vector((0..chart.dim()).map(|_| random_poly(rng, chart, 2)).collect())
}

pub fn random_section(rng: &mut impl Rng, chart: &Chart) -> GeneralizedSection {
    GeneralizedSection::new(random_vector(rng, chart), random_form(rng, chart, 1))
}

/// The three base Poisson bivectors of the gauge sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasePoisson {
    /// `∂1∧∂2 + ∂3∧∂4` on ℝ⁴.
    ConstantSymplectic,
    /// `f(x3) ∂1∧∂2` on ℝ³ with a random nonconstant `f`.
    ThirdCoordinate,
    /// `∂1∧∂2` on ℝ⁴.
    Degenerate,
}

impl BasePoisson {
    pub const ALL: [BasePoisson; 3] = [
        BasePoisson::ConstantSymplectic,
        BasePoisson::ThirdCoordinate,
        BasePoisson::Degenerate,
    ];

    pub fn build(self, rng: &mut impl Rng) -> (Chart, Multivector) {
        match self {
            BasePoisson::ConstantSymplectic => (
                Chart::standard(4),
                Multivector::basis(4, &[0, 1]).add(&Multivector::basis(4, &[2, 3])),
            ),
            BasePoisson::ThirdCoordinate => {
                let c = Chart::standard(3);
                let f = ["1 + x3^2", "x3", "exp(x3)", "2*x3^2 - x3"][rng.random_range(0..4)];
                let p = Multivector::basis(3, &[0, 1]).scale(&parse(&c, f));
                (c, p)
            }
            BasePoisson::Degenerate => (Chart::standard(4), Multivector::basis(4, &[0, 1])),
        }
    }
}

/// A structure `(P, P♯B♭, −dB_C, dB)` over a base Poisson bivector with a
/// random polynomial `B`, together with the form used.
#[derive(Debug, Clone)]
pub struct GaugeInstance {
    pub base: BasePoisson,
    pub b: Form,
    pub structure: PqnbStructure,
}

pub fn gauge_instance(rng: &mut impl Rng, base: BasePoisson) -> GaugeInstance {
    let (chart, p) = base.build(rng);
    let b = random_form(rng, &chart, 2);
    let structure = gauge_of_poisson_unchecked(&chart, &p, &b);
    GaugeInstance { base, b, structure }
}

/// `count` instances cycling through the base bivectors.
pub fn gauge_instances(seed: u64, count: usize) -> Vec<GaugeInstance> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| gauge_instance(&mut r, BasePoisson::ALL[i % 3]))
        .collect()
}

/// A Poisson bivector on ℝ³ with a prescribed Casimir: `P^{ij} = u εⁱʲᵏ ∂ₖf`.
pub fn casimir_pair(rng: &mut impl Rng) -> (Chart, Multivector, Scalar) {
    let c = Chart::standard(3);
    let f = random_poly(rng, &c, 2);
    let u = random_poly(rng, &c, 1);
    let mut p = Multivector::zero(3, 2);
    p.set(&[0, 1], u.mul(&f.diff(2)));
    p.set(&[1, 2], u.mul(&f.diff(0)));
    p.set(&[0, 2], u.mul(&f.diff(1)).neg());
    (c, p, f)
}

/// `(P, A, φ, H)` with `P = f ∂1∧∂2`, `A = g Id`, `H = −(1/f)(∂g/∂x3) dx1∧dx2∧dx3`
/// and `φ = −2gH` on ℝ³, for `f` nonvanishing and `g` depending on `x3` only.
pub fn rescaled_identity_structure(chart: &Chart, f: &Scalar, g: &Scalar) -> PqnbStructure {
    let p = Multivector::basis(3, &[0, 1]).scale(f);
    let a = Endo::scalar(3, g.clone());
    let h = Form::basis(3, &[0, 1, 2]).scale(&f.inverse().expect("f nonzero").mul(&g.diff(2)).neg());
    let phi = h.scale(&g.mul(&Scalar::int(-2)));
    PqnbStructure::new(chart.clone(), p, a, phi, h)
}

/// The ℝ³ structure with `f = 1 + x1²` and `g = x3`.
pub fn standard_rescaled_identity() -> PqnbStructure {
    let c = Chart::standard(3);
    let f = parse(&c, "1 + x1^2");
    let c = c.with_nonvanishing(f.clone());
    let g = parse(&c, "x3");
    rescaled_identity_structure(&c, &f, &g)
}

/// A labelled generalized complex candidate and whether it is built to pass.
#[derive(Debug, Clone)]
pub struct GcCase {
    pub label: &'static str,
    pub expected: Option<bool>,
    pub structure: GcStructure,
}

fn rotation(n: usize, i: usize, j: usize) -> Endo {
    Endo::basis(n, j, i).sub(&Endo::basis(n, i, j))
}

/// `count` generalized complex candidates: symplectic, complex and gauged
/// symplectic or complex structures, interleaved with deliberate
/// violations. `expected` is `None` where no outcome is built in.
pub fn gc_corpus(seed: u64, count: usize) -> Vec<GcCase> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let c2 = Chart::standard(2);
    let c4 = Chart::standard(4);
    for i in 0..count {
        let case = match i % 10 {
            0 => {
                // P = f ∂1∧∂2, σ = (1/f) dx1∧dx2
                let f = ["1", "2", "1 + x1^2", "exp(x2)"][r.random_range(0..4)];
                let f = parse(&c2, f);
                let ch = c2.clone().with_nonvanishing(f.clone());
                let j = GcStructure::new(
                    ch,
                    Endo::zero(2),
                    Multivector::basis(2, &[0, 1]).scale(&f),
                    Form::basis(2, &[0, 1]).scale(&f.inverse().unwrap()),
                    Form::zero(2, 3),
                );
                GcCase { label: "symplectic", expected: Some(true), structure: j }
            }
            1 => GcCase {
                label: "symplectic-r4",
                expected: Some(true),
                structure: GcStructure::new(
                    c4.clone(),
                    Endo::zero(4),
                    Multivector::basis(4, &[0, 1]).add(&Multivector::basis(4, &[2, 3])),
                    Form::basis(4, &[0, 1]).add(&Form::basis(4, &[2, 3])),
                    Form::zero(4, 3),
                ),
            },
            2 => GcCase {
                label: "complex",
                expected: Some(true),
                structure: GcStructure::new(
                    c4.clone(),
                    rotation(4, 0, 1).add(&rotation(4, 2, 3)),
                    Multivector::zero(4, 2),
                    Form::zero(4, 2),
                    Form::zero(4, 3),
                ),
            },
            3 => {
                // closed B: for dB != 0 the two gc checkers differ by the sign of H
                let base = symplectic_r4();
                let b = ext_d(&random_form(&mut r, &c4, 1));
                GcCase { label: "gauged-symplectic", expected: Some(true), structure: gauge_gc(&b, &base).unwrap() }
            }
            4 => {
                let base = GcStructure::new(c4.clone(), rotation(4, 0, 1).add(&rotation(4, 2, 3)), Multivector::zero(4, 2), Form::zero(4, 2), Form::zero(4, 3));
                let b = ext_d(&random_form(&mut r, &c4, 1));
                GcCase { label: "gauged-complex", expected: Some(true), structure: gauge_gc(&b, &base).unwrap() }
            }
            5 => {
                let mut j = symplectic_r4();
                j.sigma = j.sigma.neg();
                GcCase { label: "symplectic-wrong-sign", expected: Some(false), structure: j }
            }
            6 => {
                let mut j = symplectic_r4();
                j.p = j.p.scale_int(2);
                GcCase { label: "symplectic-scaled-bivector", expected: Some(false), structure: j }
            }
            7 => {
                // a nonzero dB whose background is dropped
                let b = Form::basis(4, &[0, 1]).scale(&random_nonconstant(&mut r, &c4));
                let mut j = gauge_gc(&b, &symplectic_r4()).unwrap();
                j.h = Form::zero(4, 3);
                GcCase { label: "gauged-missing-background", expected: Some(false), structure: j }
            }
            8 => GcCase {
                label: "complex-rescaled",
                expected: Some(false),
                structure: GcStructure::new(
                    c2.clone(),
                    rotation(2, 0, 1).scale(&parse(&c2, "1 + x1^2")),
                    Multivector::zero(2, 2),
                    Form::zero(2, 2),
                    Form::zero(2, 3),
                ),
            },
            _ => {
                // x1-dependent almost complex structure on ℝ⁴
                let mut a = rotation(4, 0, 1);
                let x = parse(&c4, "x1");
                a.set(2, 2, x.clone());
                a.set(2, 3, parse(&c4, "-1 - x1^2"));
                a.set(3, 2, Scalar::one());
                a.set(3, 3, x.neg());
                GcCase {
                    label: "almost-complex",
                    expected: None,
                    structure: GcStructure::new(c4.clone(), a, Multivector::zero(4, 2), Form::zero(4, 2), Form::zero(4, 3)),
                }
            }
        };
        out.push(case);
    }
    out
}

/// An adapted-chart reduction instance on ℝ⁴ = (q1, q2, s1, c1) with
/// `N = {c1 = 0}`, and a gauge form that projects.
#[derive(Debug, Clone)]
pub struct BlockCase {
    pub label: &'static str,
    /// Whether the reduction hypotheses are built to hold.
    pub reducible: bool,
    pub setup: AdaptedReductionSetup,
    pub structure: PqnbStructure,
    pub gauge: Form,
}

pub fn block_chart() -> Chart {
    Chart::new(["q1", "q2", "s1", "c1"]).expect("distinct names")
}

/// `P = f ∂q1∧∂q2`, `A = g Id`, `H = −(g′/f) dq1∧dq2∧dc1`, `φ = −2gH` for
/// `f = f(q)` nonvanishing and `g = g(c1)`.
pub fn lifted_rescaled_identity(chart: &Chart, f: &Scalar, g: &Scalar) -> PqnbStructure {
    let h = Form::basis(4, &[0, 1, 3]).scale(&f.inverse().expect("f nonzero").mul(&g.diff(3)).neg());
    let phi = h.scale(&g.scale_int(-2));
    PqnbStructure::new(chart.clone(), Multivector::basis(4, &[0, 1]).scale(f), Endo::scalar(4, g.clone()), phi, h)
}

/// `b(q) dq1∧dq2` plus terms in `dq∧dc`, `ds∧dc` with a factor `c1` and a
/// `dq∧ds` term with a factor `c1²`. A single factor on `dq∧ds` would leave
/// `∂_c B_{qs}` in `dB(∂c, ∂q, ∂s)` on `N`.
pub fn projectable_form(rng: &mut impl Rng, chart: &Chart) -> Form {
    let qc = Chart::new(["q1", "q2"]).expect("distinct names");
    let mut b = Form::basis(4, &[0, 1]).scale(&parse(chart, &random_poly_text(rng, &qc, 2)));
    for (pair, w) in [([0, 2], "c1^2"), ([1, 3], "c1"), ([2, 3], "c1")] {
        let r = random_poly(rng, chart, 1);
        b = b.add(&Form::basis(4, &pair).scale(&parse(chart, w).mul(&r)));
    }
    b
}

/// `count` block instances: a lifted rescaled identity gauged by a
/// projectable form. Every fifth one has `g′(0) ≠ 0`, which breaks the
/// vanishing of `H` along `N`.
pub fn block_corpus(seed: u64, count: usize) -> Vec<BlockCase> {
    let mut r = rng(seed);
    let chart = block_chart();
    let zero = BigRational::from_integer(0.into());
    let setup = AdaptedReductionSetup::new(chart.clone(), vec![0, 1], vec![2], vec![3], vec![zero]).expect("valid blocks");
    (0..count)
        .map(|i| {
            let f = parse(&chart, ["1", "1 + q1^2", "2 + q2^2", "1 + q1^2 + q2^2"][r.random_range(0..4)]);
            let ch = chart.clone().with_nonvanishing(f.clone());
            let setup = AdaptedReductionSetup { chart: ch.clone(), ..setup.clone() };
            let (label, reducible, g) = if i % 5 == 4 {
                ("obstructed", false, ["c1", "1 + c1 + c1^2"][r.random_range(0..2)])
            } else {
                ("lifted", true, ["1 + c1^2", "c1^2", "2 - c1^3", "1 + c1^2 + c1^4"][r.random_range(0..4)])
            };
            let base = lifted_rescaled_identity(&ch, &f, &parse(&ch, g));
            let structure = gauge_transform_unchecked(&projectable_form(&mut r, &ch), &base);
            let gauge = projectable_form(&mut r, &ch);
            BlockCase { label, reducible, setup, structure, gauge }
        })
        .collect()
}

fn symplectic_r4() -> GcStructure {
    GcStructure::new(
        Chart::standard(4),
        Endo::zero(4),
        Multivector::basis(4, &[0, 1]).add(&Multivector::basis(4, &[2, 3])),
        Form::basis(4, &[0, 1]).add(&Form::basis(4, &[2, 3])),
        Form::zero(4, 3),
    )
}

// b(x) with ∂b/∂x3 or ∂b/∂x4 nonzero, so that d(b dx1∧dx2) ≠ 0.
fn random_nonconstant(r: &mut impl Rng, chart: &Chart) -> Scalar {
    let extra = random_poly(r, chart, 2);
    let k = r.random_range(1..=2);
    parse(chart, &format!("{k}*x{}", r.random_range(3..=4))).add(&extra.mul(&extra))
}
