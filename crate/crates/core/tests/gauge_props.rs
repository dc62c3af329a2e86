use pqnb_core::calculus::ext_d;
use pqnb_core::corpus::{self, BasePoisson};
use pqnb_core::expr::{all_zero, SamplingPolicy};
use pqnb_core::gauge::{
    compose_gauges, courant_compatibility_residual, gauge_gc, gauge_transform, gauge_transform_unchecked,
    inverse_gauge, structure_difference, Verification,
};
use pqnb_core::reduction::{check_reduction_hypotheses, reduce};
use pqnb_core::structures::{check_gc_background, check_pn, check_pqn, check_pqnb, PqnbStructure};
use pqnb_core::tensor::{Endo, Form};
use proptest::prelude::*;

fn pol() -> SamplingPolicy {
    SamplingPolicy::default()
}

fn same(x: &PqnbStructure, y: &PqnbStructure) -> bool {
    matches!(all_zero(&structure_difference(x, y), &pol(), x.chart.nonvanishing()), Ok(v) if v.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gauge_images_are_structures_over_the_same_bivector(seed in any::<u64>(), base in 0usize..3) {
        let mut r = corpus::rng(seed);
        let inst = corpus::gauge_instance(&mut r, BasePoisson::ALL[base]);
        let b = corpus::random_form(&mut r, &inst.structure.chart, 2);
        let t = gauge_transform(&b, &inst.structure, &pol(), Verification::Verify);
        prop_assert!(t.is_ok(), "{:?}", t.err());
        prop_assert_eq!(t.unwrap().p, inst.structure.p);
    }

    #[test]
    fn gauges_form_an_abelian_group_action(seed in any::<u64>(), base in 0usize..3) {
        let mut r = corpus::rng(seed);
        let s = corpus::gauge_instance(&mut r, BasePoisson::ALL[base]).structure;
        let b1 = corpus::random_form(&mut r, &s.chart, 2);
        let b2 = corpus::random_form(&mut r, &s.chart, 2);
        let g = gauge_transform_unchecked;
        prop_assert!(same(&g(&Form::zero(s.dim(), 2), &s), &s));
        prop_assert!(same(&g(&inverse_gauge(&b1), &g(&b1, &s)), &s));
        prop_assert!(same(&g(&b1, &g(&b2, &s)), &g(&compose_gauges(&b1, &b2), &s)));
        prop_assert!(same(&g(&b1, &g(&b2, &s)), &g(&b2, &g(&b1, &s))));
    }

    #[test]
    fn closed_gauges_keep_the_subclass(seed in any::<u64>(), base in 0usize..3) {
        let mut r = corpus::rng(seed);
        let (chart, p) = BasePoisson::ALL[base].build(&mut r);
        let n = chart.dim();
        let b = ext_d(&corpus::random_form(&mut r, &chart, 1));
        // (P, Id) is Poisson-Nijenhuis; a closed gauge leaves H = 0
        let pn = PqnbStructure::new(chart.clone(), p, Endo::identity(n), Form::zero(n, 3), Form::zero(n, 3));
        let t = gauge_transform_unchecked(&b, &pn);
        prop_assert!(t.h.is_zero_exact());
        prop_assert!(check_pqn(&chart, &t.p, &t.a, &t.phi, &pol()).passed());
        if t.phi.is_zero_exact() {
            prop_assert!(check_pn(&chart, &t.p, &t.a, &pol()).passed());
        }
    }

    #[test]
    fn gauge_is_compatible_with_twisted_brackets(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = corpus::rng(seed);
        let c = pqnb_core::tensor::Chart::standard(n);
        let b = corpus::random_form(&mut r, &c, 2);
        let h = ext_d(&corpus::random_form(&mut r, &c, 2));
        let (mu, nu) = (corpus::random_section(&mut r, &c), corpus::random_section(&mut r, &c));
        prop_assert!(courant_compatibility_residual(&b, &h, &mu, &nu).is_zero_exact());
    }

    #[test]
    fn gc_structures_are_structures(seed in any::<u64>()) {
        for case in corpus::gc_corpus(seed, 10) {
            let j = &case.structure;
            if check_gc_background(j, &pol()).passed() {
                let s = PqnbStructure::new(j.chart.clone(), j.p.clone(), j.a.clone(), ext_d(&j.sigma), j.h.clone());
                prop_assert!(check_pqnb(&s, &pol()).passed(), "{}", case.label);
            }
        }
    }

    #[test]
    fn gc_gauge_forgets_to_the_structure_gauge(seed in any::<u64>()) {
        let case = &corpus::gc_corpus(seed, 4)[3];
        let j = &case.structure;
        let b = corpus::random_form(&mut corpus::rng(seed), &j.chart, 2);
        let k = gauge_gc(&b, j).unwrap();
        let forget = |j: &pqnb_core::structures::GcStructure| {
            PqnbStructure::new(j.chart.clone(), j.p.clone(), j.a.clone(), ext_d(&j.sigma), j.h.clone())
        };
        prop_assert!(same(&forget(&k), &gauge_transform_unchecked(&b, &forget(j))));
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let s = corpus::gauge_instance(&mut corpus::rng(seed), BasePoisson::ThirdCoordinate).structure;
        let p = SamplingPolicy { seed, ..pol() };
        prop_assert_eq!(check_pqnb(&s, &p), check_pqnb(&s, &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn reducible_block_instances_reduce_to_structures(seed in any::<u64>()) {
        for case in corpus::block_corpus(seed, 5) {
            let h = check_reduction_hypotheses(&case.setup, &case.structure, &pol()).unwrap();
            if h.passed() {
                let red = reduce(&case.setup, &case.structure, &pol()).unwrap();
                prop_assert!(check_pqnb(&red.structure, &pol()).passed(), "{}", case.label);
            }
        }
    }
}
