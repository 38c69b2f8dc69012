use netid_core::dissimilar::{flip_metric, DissimilarSolver};
use netid_core::model::{generate_er, seeded_rng, sparsity_mask, NetworkSystem};
use netid_core::observability::{analyze, classify_edges, RowClass};
use netid_core::Matrix;
use proptest::prelude::*;

fn system(n: usize, seed: u64, sensors: usize) -> NetworkSystem {
    let a = generate_er(n, 0.4, &mut seeded_rng(seed));
    NetworkSystem::with_sensors(a, &(0..sensors.min(n)).collect::<Vec<_>>()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_orthonormal_nullspace(n in 2usize..7, seed in any::<u64>(), sensors in 1usize..4) {
        let sys = system(n, seed, sensors);
        let an = analyze(&sys, 0.0).unwrap();
        prop_assert_eq!(an.rank + an.nullity(), n);
        let k = an.nullity();
        prop_assert!((an.phi.transpose() * &an.phi - Matrix::identity(k, k)).norm() <= 1e-10);
        prop_assert!((&an.o * &an.phi).norm() <= 1e-8 * an.o.norm().max(1.0));
    }

    #[test]
    fn every_row_gets_one_class(n in 2usize..7, seed in any::<u64>()) {
        let sys = system(n, seed, 1);
        let an = analyze(&sys, 0.0).unwrap();
        let labels = classify_edges(&an, 1e-9);
        prop_assert_eq!(labels.rows.len(), n);
        let total: usize = [RowClass::Essential, RowClass::Decoupled, RowClass::Coupled]
            .iter()
            .map(|&c| labels.rows_of(c).len())
            .sum();
        prop_assert_eq!(total, n);
    }

    #[test]
    fn l1_solution_is_feasible_and_no_worse_than_l2(n in 2usize..7, seed in any::<u64>(), sensors in 1usize..3) {
        let sys = system(n, seed, sensors);
        let an = analyze(&sys, 0.0).unwrap();
        let mask = sparsity_mask(sys.a(), 1e-5).unwrap();
        let res = DissimilarSolver { presence_threshold: 1e-5, certify: false }.solve(&sys, &an).unwrap();
        prop_assert!((&an.o * &res.delta).norm() <= 1e-8 * an.o.norm().max(1.0));
        let l2 = netid_core::dissimilar::solve_l2(&sys, &an, &mask).unwrap();
        let l2_obj = netid_core::dissimilar::masked_l1(&mask, &(sys.a() + &l2.delta));
        prop_assert!(res.objective <= l2_obj + 1e-9 * (1.0 + l2_obj));
        let cert = netid_core::dissimilar::check_equivalence(&sys, &an, &mask, &l2.v, 1e-5).unwrap();
        if cert.holds {
            prop_assert!((res.objective - l2_obj).abs() <= 1e-7 * (1.0 + res.objective));
        }
    }

    #[test]
    fn l1_never_worse_than_unchanged_network(n in 20usize..41, seed in any::<u64>(), sensors in 1usize..12) {
        let a = generate_er(n, 1.0 / 6.0, &mut seeded_rng(seed));
        let sys = NetworkSystem::with_sensors(a, &(0..sensors).collect::<Vec<_>>()).unwrap();
        let an = analyze(&sys, 0.0).unwrap();
        let mask = sparsity_mask(sys.a(), 1e-5).unwrap();
        let res = DissimilarSolver { presence_threshold: 1e-5, certify: false }.solve(&sys, &an).unwrap();
        let unchanged = netid_core::dissimilar::masked_l1(&mask, sys.a());
        prop_assert!(res.objective <= unchanged * (1.0 + 1e-9));
        // Δ may be large along poorly conditioned directions; consistency is
        // judged relative to its size.
        prop_assert!((&an.o * &res.delta).norm() <= 1e-12 * an.o.norm() * res.delta.norm().max(1.0));
    }

    #[test]
    fn flip_metric_is_symmetric(n in 1usize..8, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = generate_er(n, 0.5, &mut seeded_rng(s1));
        let b = generate_er(n, 0.5, &mut seeded_rng(s2));
        let ab = flip_metric(&a, &b, 1e-5).unwrap();
        let ba = flip_metric(&b, &a, 1e-5).unwrap();
        prop_assert_eq!(ab.flipped.len(), ba.flipped.len());
        prop_assert!(ab.percentage >= 0.0 && ab.percentage <= 100.0);
    }

    #[test]
    fn mask_is_idempotent(n in 1usize..8, seed in any::<u64>()) {
        let a = generate_er(n, 0.5, &mut seeded_rng(seed));
        let z = sparsity_mask(&a, 1e-5).unwrap();
        prop_assert_eq!(sparsity_mask(z.matrix(), 1e-5).unwrap(), z);
    }
}

#[test]
fn er_density_is_binomial() {
    let (n, p) = (100usize, 1.0 / 6.0);
    let mut total = 0usize;
    for seed in 0..100 {
        total += generate_er(n, p, &mut seeded_rng(seed)).iter().filter(|&&x| x != 0.0).count();
    }
    let trials = (100 * n * n) as f64;
    let sigma = (trials * p * (1.0 - p)).sqrt();
    assert!((total as f64 - trials * p).abs() <= 3.0 * sigma);
}

#[test]
fn ws_rewiring_is_binomial() {
    let (n, k, beta) = (100usize, 3usize, 1.0 / 30.0);
    let mut rewired = 0usize;
    for seed in 0..100 {
        let edges = netid_core::model::watts_strogatz_edges(n, k, beta, &mut seeded_rng(seed));
        rewired += edges.iter().filter(|e| e.rewired).count();
    }
    let trials = (100 * n * k) as f64;
    let sigma = (trials * beta * (1.0 - beta)).sqrt();
    assert!((rewired as f64 - trials * beta).abs() <= 3.0 * sigma, "{rewired}");
}
