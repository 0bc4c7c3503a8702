use jlroa::algorithms::{hosvd_init, run_jlroa, run_shopm, RunConfig};
use jlroa::tensor::{random_symmetric, random_symmetric_from, EntryDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// 50 random instances with n ≤ 6, d = 3 and p ∈ {1, 2, n}: the cyclic
/// method drives the gradient below 1e−8 within 200 sweeps.
#[test]
fn cyclic_sweeps_reach_stationary_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cases: Vec<(usize, usize, u64)> = (0..50u64)
        .map(|t| {
            let n = rng.random_range(2..=6);
            let p = [1, 2, n][rng.random_range(0..3)].min(n);
            (n, p, 500 + t)
        })
        .collect();
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|&(n, p, seed)| {
            let a = random_symmetric(3, n, seed);
            let cfg = RunConfig::new(p)
                .with_tol_grad(1e-8)
                .with_tol_gain(f64::NEG_INFINITY)
                .with_max_sweeps(200);
            let (_, trace) = run_jlroa(&a, &cfg).unwrap();
            (trace.final_grad_norm > 1e-8).then(|| {
                format!(
                    "n={n} p={p} seed={seed}: grad {:e} after {} sweeps",
                    trace.final_grad_norm, trace.sweeps
                )
            })
        })
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

/// On tensors with nonnegative entries both methods reach the dominant
/// rank-one term.
#[test]
fn rank_one_matches_a_settled_power_method() {
    let mut compared = 0;
    for seed in 0..40u64 {
        let a = random_symmetric_from(3, 6, 900 + seed, EntryDistribution::Uniform);
        let x0 = hosvd_init(&a, 1).unwrap().column(0);
        let power = run_shopm(&a, &x0, 5000, 1e-13).unwrap();
        if !power.converged {
            continue;
        }
        let cfg = RunConfig::new(1).with_init(jlroa::Init::Hosvd);
        let (res, _) = run_jlroa(&a, &cfg).unwrap();
        assert!(
            (res.objective - power.sigma * power.sigma).abs() < 1e-4,
            "seed {seed}: {} vs {}",
            res.objective,
            power.sigma * power.sigma
        );
        compared += 1;
    }
    assert!(compared >= 35, "only {compared} power-method runs settled");
}
