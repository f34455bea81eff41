mod common;

use std::sync::Arc;

use proptest::prelude::*;
use qrf::group::{build_cyclic, build_heisenberg};
use qrf::invariant::{g_twirl, TwirlSpec};
use qrf::linalg::{random_matrix, random_state, seeded_rng, C64};
use qrf::repr::{cyclic_irreps, UnitaryRep};
use qrf::tensor::{embed, partial_trace, LabeledOperator, ProductSpace};
use qrf::transform::{build_two_frame, frame_rotation_demo, transform_operator};

fn space() -> ProductSpace {
    ProductSpace::new([("A", 2), ("B", 3), ("C", 2)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cyclic_and_heisenberg_axioms(n in 1usize..12, a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let g = build_cyclic(n);
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
        let h = build_heisenberg(3).unwrap();
        let (a, b, c) = (a % 27, b % 27, c % 27);
        prop_assert_eq!(h.mul(h.mul(a, b), c), h.mul(a, h.mul(b, c)));
        prop_assert_eq!(h.mul(h.inv(a), a), h.identity());
    }

    #[test]
    fn embedding_is_multiplicative(seed: u64) {
        let mut rng = seeded_rng(seed);
        let sub = ProductSpace::new([("C", 2), ("A", 2)]).unwrap();
        let x = LabeledOperator::new(sub.clone(), random_matrix(&mut rng, 4)).unwrap();
        let y = LabeledOperator::new(sub, random_matrix(&mut rng, 4)).unwrap();
        let lhs = embed(&x, &space()).unwrap().product(&embed(&y, &space()).unwrap()).unwrap();
        let rhs = embed(&x.product(&y).unwrap(), &space()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-10);
    }

    #[test]
    fn partial_trace_is_adjoint_to_embedding(seed: u64) {
        let mut rng = seeded_rng(seed);
        let x = LabeledOperator::new(space(), random_matrix(&mut rng, 12)).unwrap();
        let y = LabeledOperator::single("B", random_matrix(&mut rng, 3)).unwrap();
        let lhs = partial_trace(&x, &["A", "C"]).unwrap().product(&y).unwrap().trace();
        let rhs = x.product(&embed(&y, &space()).unwrap()).unwrap().trace();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn twirl_is_idempotent_on_bundled_pairs(seed: u64, which in 0usize..4) {
        let (key, rep) = [("z2", "x"), ("z3", "qubit"), ("s3", "standard"), ("s3", "perm")][which];
        let (t, r) = common::pair(key, rep);
        let spec = TwirlSpec::frame_and_system(t.group().clone(), &r).unwrap();
        let mut rng = seeded_rng(seed);
        let n = spec.space().dim();
        let op = LabeledOperator::new(spec.space().clone(), random_matrix(&mut rng, n)).unwrap();
        let once = g_twirl(&op, &spec).unwrap();
        prop_assert!(g_twirl(&once, &spec).unwrap().distance(&once).unwrap() < 1e-9);
    }

    #[test]
    fn frame_change_is_an_algebra_homomorphism(seed: u64) {
        let g = Arc::new(build_cyclic(3));
        let t = cyclic_irreps(g.clone()).unwrap();
        let s = build_two_frame(&t, &UnitaryRep::regular(g), 4096).unwrap();
        let mut rng = seeded_rng(seed);
        let n = s.dim();
        let x = LabeledOperator::new(s.alice_space().clone(), random_matrix(&mut rng, n)).unwrap();
        let y = LabeledOperator::new(s.alice_space().clone(), random_matrix(&mut rng, n)).unwrap();
        let lhs = transform_operator(&x.product(&y).unwrap(), &s).unwrap();
        let rhs = transform_operator(&x, &s).unwrap().product(&transform_operator(&y, &s).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn reduced_purity_is_sum_of_fourth_powers(seed: u64) {
        let g = Arc::new(build_cyclic(3));
        let t = cyclic_irreps(g.clone()).unwrap();
        let s = build_two_frame(&t, &UnitaryRep::regular(g), 4096).unwrap();
        let mut rng = seeded_rng(seed);
        let phi: Vec<C64> = random_state(&mut rng, 3).iter().copied().collect();
        let psi = random_state(&mut rng, 3);
        let out = frame_rotation_demo(&s, &phi, &psi).unwrap();
        prop_assert!((out.reduced_purity - out.predicted_purity).abs() < 1e-10);
        prop_assert!((out.global_purity - 1.0).abs() < 1e-10);
    }
}
