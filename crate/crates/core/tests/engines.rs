use pssolve::oracle::{
    dense_solve, homogeneous_residual, random_instance, random_resonant_instance, residual, spaces_equal, Engine, QMode,
};
use pssolve::spectrum::good_spectrum;
use pssolve::SolutionSpace;
use proptest::prelude::*;

fn q_mode(one: bool) -> QMode {
    if one {
        QMode::One
    } else {
        QMode::Random
    }
}

fn assert_solves(s: &SolutionSpace, inst: &pssolve::ProblemInstance) {
    if let SolutionSpace::Affine { particular, basis } = s {
        assert!(residual(particular, inst).unwrap().is_zero());
        assert!(homogeneous_residual(basis, inst).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_engines_agree_on_good_spectrum(seed in any::<u64>(), n in 1usize..=4, big_n in 1usize..=20, k in 1usize..=3, one in any::<bool>()) {
        let inst = random_instance(seed, n, big_n, k, q_mode(one), true).unwrap();
        prop_assert!(good_spectrum(&inst.a().coefficient_matrix(0), inst.ctx(), big_n).good);
        let outs: Vec<SolutionSpace> = Engine::ALL.iter().map(|e| e.solve(&inst).unwrap()).collect();
        for s in &outs {
            assert_solves(s, &inst);
        }
        prop_assert!(spaces_equal(&outs[0], &outs[1]));
        prop_assert!(spaces_equal(&outs[1], &outs[2]));
        prop_assert!(spaces_equal(&outs[0], &outs[2]));
    }

    #[test]
    fn dac_matches_dense_without_spectrum_assumptions(seed in any::<u64>(), n in 1usize..=4, big_n in 1usize..=16, k in 1usize..=3, one in any::<bool>()) {
        let inst = random_instance(seed, n, big_n, k, q_mode(one), false).unwrap();
        let dense = dense_solve(&inst);
        let dac = Engine::Dac.solve(&inst).unwrap();
        assert_solves(&dac, &inst);
        prop_assert!(spaces_equal(&dense, &dac));
    }

    #[test]
    fn dac_matches_dense_with_resonances(seed in any::<u64>(), n in 1usize..=4, big_n in 2usize..=20, one in any::<bool>(), homogeneous in any::<bool>()) {
        let (inst, _) = random_resonant_instance(seed, n, big_n, q_mode(one), homogeneous).unwrap();
        let dense = dense_solve(&inst);
        let dac = Engine::Dac.solve(&inst).unwrap();
        assert_solves(&dac, &inst);
        prop_assert!(spaces_equal(&dense, &dac));
    }

    #[test]
    fn k0_instances_agree(seed in any::<u64>(), n in 1usize..=3, big_n in 1usize..=12, one in any::<bool>()) {
        let inst = random_instance(seed, n, big_n, 0, q_mode(one), true).unwrap();
        prop_assert_eq!((inst.k(), inst.n_prec()), (1, big_n + 1));
        let dense = dense_solve(&inst);
        prop_assert!(spaces_equal(&dense, &Engine::Dac.solve(&inst).unwrap()));
        prop_assert!(spaces_equal(&dense, &Engine::Newton.solve(&inst).unwrap()));
    }
}

#[test]
fn newton_rejects_bad_spectrum_with_the_clause() {
    let (inst, _) = random_resonant_instance(3, 3, 10, QMode::One, true).unwrap();
    match Engine::Newton.solve(&inst) {
        Err(pssolve::Error::Spectrum(v)) => assert!(v.index().is_some()),
        other => panic!("expected a spectrum error, got {other:?}"),
    }
}
