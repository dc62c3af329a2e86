//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use pqnb::format::parse_file;
use pqnb_core::calculus::ext_d;
use pqnb_core::corpus::{self, BasePoisson};
use pqnb_core::expr::{all_zero, SamplingPolicy, Scalar, ZeroVerdict};
use pqnb_core::gauge::{
    b_left, compose_gauges, courant_compatibility_residual, gauge_of_poisson_unchecked, gauge_transform,
    gauge_transform_unchecked, inverse_gauge, structure_difference, GaugeIdentityResiduals, Verification,
};
use pqnb_core::reduction::{
    check_reduction_hypotheses, extension_independence_residuals, gauge_reduce_commute, reduce,
    ReductionIdentityResiduals,
};
use pqnb_core::structures::{
    check_gc_background, check_gc_integrability_direct, check_pn, check_pqnb, Outcome, PqnbStructure,
};
use pqnb_core::tensor::{Chart, Endo, Form, Multivector};

const POINTS: usize = 16;
const TOLERANCE: f64 = 1e-9;
const SEED: u64 = 0xacce_97ed;
const EX1_LIMIT: Duration = Duration::from_secs(5);
const SWEEP_LIMIT: Duration = Duration::from_secs(180);

fn policy() -> SamplingPolicy {
    SamplingPolicy { points: POINTS, tolerance: TOLERANCE, seed: SEED, ..SamplingPolicy::default() }
}

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn zero(items: &[Scalar], chart: &Chart) -> Result<ZeroVerdict, String> {
    all_zero(items, &policy(), chart.nonvanishing()).map_err(|e| e.to_string())
}

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn ex1() -> PqnbStructure {
    parse_file(&data("rescaled_identity.pqnb")).unwrap().pqnb().unwrap()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let s = ex1();
    ensure(s == corpus::standard_rescaled_identity(), "file and generator disagree")?;
    let r = check_pqnb(&s, &policy());
    let elapsed = start.elapsed();
    ensure(r.items.len() == 7 && r.passed(), format!("{:?}", r.first_failure()))?;
    for i in &r.items {
        ensure(matches!(i.outcome, Outcome::Verdict(ZeroVerdict::ZeroExact)), format!("{} not exact", i.label))?;
    }
    ensure(elapsed < EX1_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!("7/7 items exact in {elapsed:.2?}"))
}

fn criterion_2() -> Verdict {
    let s = ex1();
    let f = s.chart.scalar("1 + x1^2").unwrap();
    let b = Form::basis(3, &[1, 2]);
    let t = gauge_transform(&b, &s, &policy(), Verification::Verify).map_err(|e| e.to_string())?;
    ensure(t.a.sub(&s.a) == Endo::basis(3, 0, 2).scale(&f), "A~ - A is not f d1 (x) dx3")?;
    ensure(t.phi == s.phi && t.h == s.h && t.p == s.p, "P, phi or H changed")?;
    Ok("A~ - A = f d1 (x) dx3, P, phi, H unchanged".into())
}

fn criterion_3() -> Verdict {
    let c = Chart::standard(3);
    let sc = |t: &str| c.scalar(t).unwrap();
    let p = Multivector::basis(3, &[0, 1]);
    let mut a = Endo::scalar(3, sc("exp(x3)"));
    a.set(1, 2, sc("x2*exp(x3)"));
    let b = Form::basis(3, &[1, 2]).scale(&sc("exp(x2)"));
    ensure(check_pn(&c, &p, &a, &policy()).passed(), "input is not PN")?;
    let cc = Endo::sharp_flat(&p, &b);
    ensure(cc == Endo::basis(3, 0, 2).scale(&sc("exp(x2)")), "C is not e^x2 d1 (x) dx3")?;
    let db = zero(ext_d(&b).components(), &c)?;
    let bc = zero(b_left(&b, &cc).components(), &c)?;
    let diab = zero(ext_d(&b.i_endo(&a)).components(), &c)?;
    for (name, v) in [("dB", &db), ("B_C", &bc), ("d(i_A B)", &diab)] {
        ensure(v.is_zero(), format!("{name} nonzero: {v:?}"))?;
    }
    let t = gauge_transform_unchecked(&b, &PqnbStructure::new(c.clone(), p, a, Form::zero(3, 3), Form::zero(3, 3)));
    let r = check_pn(&c, &t.p, &t.a, &policy());
    ensure(r.passed(), format!("gauge image fails {:?}", r.first_failure()))?;
    ensure(zero(t.phi.components(), &c)?.is_zero() && zero(t.h.components(), &c)?.is_zero(), "phi~ or H~ nonzero")?;
    Ok("dB, B_C, d(i_A B) vanish; gauge image is PN".into())
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut rng = corpus::rng(SEED ^ 4);
    let mut failures = 0;
    for inst in corpus::gauge_instances(SEED, 50) {
        let b2 = corpus::random_form(&mut rng, &inst.structure.chart, 2);
        let t = gauge_transform_unchecked(&b2, &inst.structure);
        if !check_pqnb(&t, &policy()).passed() {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(failures == 0, format!("{failures} of 50 failed"))?;
    ensure(elapsed < SWEEP_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!("50/50 twice-gauged structures pass in {elapsed:.1?}"))
}

fn criterion_5() -> Verdict {
    let mut rng = corpus::rng(SEED ^ 5);
    let mut exact = 0;
    let mut numeric = 0;
    let mut tally = |v: ZeroVerdict, what: &str, i: usize| -> Result<(), String> {
        match v {
            ZeroVerdict::ZeroExact => exact += 1,
            ZeroVerdict::ZeroNumeric { .. } => numeric += 1,
            v => return Err(format!("{what} on instance {i}: {v:?}")),
        }
        Ok(())
    };
    for i in 0..30 {
        let (chart, p) = BasePoisson::ALL[i % 3].build(&mut rng);
        let b = corpus::random_form(&mut rng, &chart, 2);
        let res = GaugeIdentityResiduals::compute(&PqnbStructure::from_poisson(chart.clone(), p), &b);
        for (what, items) in &res.groups()[..3] {
            tally(zero(items, &chart)?, what, i)?;
        }
    }
    for (i, inst) in corpus::gauge_instances(SEED ^ 55, 30).into_iter().enumerate() {
        let chart = inst.structure.chart.clone();
        let b = corpus::random_form(&mut rng, &chart, 2);
        let res = GaugeIdentityResiduals::compute(&inst.structure, &b);
        for (what, items) in &res.groups()[3..] {
            tally(zero(items, &chart)?, what, i)?;
        }
    }
    Ok(format!("180 identity checks vanish ({exact} exact, {numeric} numeric)"))
}

fn criterion_6() -> Verdict {
    let mut rng = corpus::rng(SEED ^ 6);
    let same = |x: &PqnbStructure, y: &PqnbStructure, what: &str, i: usize| -> Result<(), String> {
        let v = zero(&structure_difference(x, y), &x.chart)?;
        ensure(v.is_zero(), format!("{what} fails on instance {i}: {v:?}"))
    };
    for (i, inst) in corpus::gauge_instances(SEED ^ 66, 20).into_iter().enumerate() {
        let s = &inst.structure;
        let n = s.dim();
        let b1 = corpus::random_form(&mut rng, &s.chart, 2);
        let b2 = corpus::random_form(&mut rng, &s.chart, 2);
        let g = gauge_transform_unchecked;
        same(&g(&Form::zero(n, 2), s), s, "identity", i)?;
        same(&g(&inverse_gauge(&b1), &g(&b1, s)), s, "inverse", i)?;
        same(&g(&b1, &g(&b2, s)), &g(&compose_gauges(&b1, &b2), s), "composition", i)?;
        same(&g(&b1, &g(&b2, s)), &g(&b2, &g(&b1, s)), "commutativity", i)?;
    }
    Ok("identity, inverse, composition, commutativity on 20 instances".into())
}

fn criterion_7() -> Verdict {
    let mut rng = corpus::rng(SEED ^ 7);
    for i in 0..30 {
        let chart = Chart::standard(2 + i % 3);
        let b = corpus::random_form(&mut rng, &chart, 2);
        let h = ext_d(&corpus::random_form(&mut rng, &chart, 2));
        let mu = corpus::random_section(&mut rng, &chart);
        let nu = corpus::random_section(&mut rng, &chart);
        let r = courant_compatibility_residual(&b, &h, &mu, &nu);
        let items: Vec<Scalar> = r.vector.components().iter().chain(r.covector.components()).cloned().collect();
        let v = zero(&items, &chart)?;
        ensure(v.is_zero(), format!("tuple {i}: {v:?}"))?;
    }
    Ok("residual vanishes on 30 tuples".into())
}

fn criterion_8() -> Verdict {
    let (mut pass, mut fail) = (0, 0);
    for (i, case) in corpus::gc_corpus(SEED, 50).into_iter().enumerate() {
        let a = check_gc_background(&case.structure, &policy()).passed();
        let b = check_gc_integrability_direct(&case.structure, &policy()).passed();
        ensure(a == b, format!("case {i} ({}): tensorial {a}, direct {b}", case.label))?;
        if let Some(e) = case.expected {
            ensure(a == e, format!("case {i} ({}): expected {e}, got {a}", case.label))?;
        }
        if a {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    ensure(pass > 0 && fail > 0, "corpus is one-sided")?;
    Ok(format!("checkers agree on 50 cases ({pass} pass, {fail} fail)"))
}

fn criterion_9() -> Verdict {
    let mut rng = corpus::rng(SEED ^ 9);
    let (mut reduced, mut obstructed) = (0, 0);
    for (i, case) in corpus::block_corpus(SEED, 10).into_iter().enumerate() {
        let hyp = check_reduction_hypotheses(&case.setup, &case.structure, &policy()).map_err(|e| e.to_string())?;
        ensure(hyp.passed() == case.reducible, format!("instance {i}: hypotheses {}", hyp.passed()))?;
        if !hyp.passed() {
            obstructed += 1;
            continue;
        }
        let red = reduce(&case.setup, &case.structure, &policy()).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(red.certificate.passed(), format!("instance {i}: reduced structure fails"))?;
        ensure(check_pqnb(&red.structure, &policy()).passed(), format!("instance {i}: reduced structure fails"))?;
        let ids = ReductionIdentityResiduals::compute(&case.setup, &case.structure, &red.structure)
            .map_err(|e| e.to_string())?;
        for (what, items) in ids.groups() {
            ensure(items.iter().all(Scalar::is_zero), format!("instance {i}: {what} not exactly zero"))?;
        }
        let w = corpus::random_poly(&mut rng, &case.setup.chart, 2);
        let probe = extension_independence_residuals(&case.setup, &case.structure, &w).map_err(|e| e.to_string())?;
        ensure(probe.iter().all(Scalar::is_zero), format!("instance {i}: extension probe"))?;
        reduced += 1;
    }
    ensure(reduced > 0, "no instance reduced")?;
    Ok(format!("{reduced} reduced with exact identities, {obstructed} obstructed as built"))
}

fn criterion_10() -> Verdict {
    let cases: Vec<_> = corpus::block_corpus(SEED ^ 10, 10).into_iter().filter(|c| c.reducible).take(5).collect();
    ensure(cases.len() == 5, "fewer than 5 reducible instances")?;
    for (i, case) in cases.iter().enumerate() {
        let out = gauge_reduce_commute(&case.setup, &case.structure, &case.gauge, &policy()).map_err(|e| e.to_string())?;
        ensure(out.commutes(), format!("instance {i}: {:?}", out.report.first_failure()))?;
        let diagram = out.report.item("diagram").map(|d| &d.outcome);
        ensure(
            matches!(diagram, Some(Outcome::Verdict(ZeroVerdict::ZeroExact))),
            format!("instance {i}: diagram not exact"),
        )?;
    }
    Ok("diagram commutes exactly on 5 instances".into())
}

fn criterion_11() -> Verdict {
    let mut rng = corpus::rng(SEED ^ 11);
    let c4 = Chart::standard(4);
    let p = Multivector::basis(4, &[0, 1]);
    let extra = Form::basis(4, &[0, 2, 3]).sub(&Form::basis(4, &[1, 2, 3]).scale_int(3));
    for i in 0..3 {
        let b = corpus::random_form(&mut rng, &c4, 2);
        let s = gauge_of_poisson_unchecked(&c4, &p, &b);
        let mut s2 = s.clone();
        s2.h = s2.h.add(&extra);
        ensure(check_pqnb(&s, &policy()).passed(), format!("background dB fails ({i})"))?;
        ensure(check_pqnb(&s2, &policy()).passed(), format!("background dB + H fails ({i})"))?;
    }
    let c3 = Chart::standard(3);
    let mut a = Endo::zero(3);
    a.set(0, 0, c3.scalar("x2").unwrap());
    for i in 0..5 {
        let phi = corpus::random_form(&mut rng, &c3, 3);
        let h = corpus::random_form(&mut rng, &c3, 3);
        let s = PqnbStructure::new(c3.clone(), Multivector::zero(3, 2), a.clone(), phi, h);
        let r = check_pqnb(&s, &policy());
        let t = r.item("torsion").ok_or("no torsion item")?;
        ensure(
            matches!(t.outcome, Outcome::Verdict(ZeroVerdict::NonZero { .. })),
            format!("torsion item did not fail for choice {i}"),
        )?;
    }
    Ok("two backgrounds pass for 3 forms B; torsion fails for 5 (phi, H) with P = 0".into())
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("rescaled identity certification", criterion_1),
        ("gauge by dx2^dx3 changes only A", criterion_2),
        ("PN preserved by a closed gauge", criterion_3),
        ("closure sweep", criterion_4),
        ("gauge identity sweep", criterion_5),
        ("gauge group laws", criterion_6),
        ("Courant compatibility", criterion_7),
        ("gc checkers agree", criterion_8),
        ("reduction of block corpus", criterion_9),
        ("gauge and reduction commute", criterion_10),
        ("non-uniqueness and obstruction", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match v {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail} [{t:.1?}]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why} [{t:.1?}]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
