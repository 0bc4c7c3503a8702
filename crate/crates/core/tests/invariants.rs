use std::f64::consts::FRAC_PI_4;

use jlroa::algorithms::{extract_result, run_general, run_jacobi_g, run_jlroa, OrderingRule, RunConfig};
use jlroa::geometry::cost_from_working;
use jlroa::givens::{apply_givens, solve_pair, PairClass};
use jlroa::orderings::random_ordering;
use jlroa::tensor::{random_symmetric, OrthoMatrix, SymTensor};
use proptest::prelude::*;

fn unit(a: &SymTensor) -> SymTensor {
    a.scale(1.0 / a.frobenius_norm())
}

fn instance() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (2usize..=5, 3usize..=4, any::<u64>()).prop_flat_map(|(n, d, seed)| (Just(n), Just(d), 1..=n, Just(seed)))
}

#[test]
fn kept_pair_steps_satisfy_the_descent_angle_bound() {
    let mut checked = 0;
    for seed in 0..30u64 {
        let n = 3 + seed as usize % 4;
        let a = random_symmetric(3, n, 40 + seed);
        for p in [2, n] {
            let (_, trace) = run_jlroa(&a, &RunConfig::new(p).with_max_sweeps(50)).unwrap();
            for r in trace.records.iter().filter(|r| r.j < p && r.theta.abs() <= FRAC_PI_4) {
                let bound = 0.5 * r.slope.abs() * r.theta.abs();
                assert!(
                    r.gain >= bound - 1e-12 * (1.0 + bound),
                    "step {}: gain {} < {bound}",
                    r.k,
                    r.gain
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_variant_is_monotone((n, d, p, seed) in instance()) {
        let a = unit(&random_symmetric(d, n, seed));
        let cfg = RunConfig::new(p).with_max_sweeps(20);
        let (_, cyclic) = run_jlroa(&a, &cfg).unwrap();
        prop_assert!(cyclic.max_decrease() <= 1e-14);
        let ord = random_ordering(n, p, seed.wrapping_add(1)).unwrap();
        let (_, general) = run_general(&a, &ord, &cfg).unwrap();
        prop_assert!(general.max_decrease() <= 1e-14);
        let (_, greedy) = run_jacobi_g(&a, &cfg.clone().with_ordering(OrderingRule::JacobiG)).unwrap();
        prop_assert!(greedy.max_decrease() <= 1e-14);
    }

    #[test]
    fn rotations_preserve_the_norm(n in 2usize..=5, d in 3usize..=4, seed in any::<u64>(), theta in -3.2f64..3.2) {
        let w = random_symmetric(d, n, seed);
        let rotated = apply_givens(&w, 0, n - 1, theta).unwrap();
        prop_assert!((rotated.frobenius_norm() - w.frobenius_norm()).abs() <= 1e-12 * w.frobenius_norm());
    }

    #[test]
    fn solver_gain_is_realized_and_beats_samples((n, d, p, seed) in instance(), theta in -1.6f64..1.6) {
        let w = random_symmetric(d, n, seed);
        let (i, j) = (0, n - 1);
        let sol = solve_pair(&w, PairClass::new(i, j, n, p).unwrap()).unwrap();
        let h = |t: f64| cost_from_working(&apply_givens(&w, i, j, t).unwrap(), p);
        let h0 = h(0.0);
        prop_assert!(sol.gain >= 0.0);
        prop_assert!((h(sol.theta_star) - h0 - sol.gain).abs() <= 1e-9 * (1.0 + h0));
        prop_assert!(sol.gain >= h(theta) - h0 - 1e-9 * (1.0 + h0));
    }

    #[test]
    fn residual_forms_agree((n, d, p, seed) in instance()) {
        let a = random_symmetric(d, n, seed);
        let q = OrthoMatrix::random(n, seed.wrapping_mul(3));
        let res = extract_result(&a, &q, p).unwrap();
        let scale = a.frobenius_norm().powi(2);
        prop_assert!((res.residual_sq - res.residual_sq_direct).abs() <= 1e-10 * scale);
        prop_assert!(res.residual_sq >= -1e-10 * scale);
    }
}
