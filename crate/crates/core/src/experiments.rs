//! Batch experiment protocols: pairwise algorithm comparison, ordering
//! sensitivity, the nondegeneracy check after greedy Jacobi runs, and the
//! power-method failure case.
//!
//! Every trial derives its own seed from the master seed, trials run on a
//! bounded rayon pool and results are collected in trial order, so reports
//! are reproducible regardless of scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{
    hosvd_init, run_general, run_jacobi_g, run_jlroa, run_shopm, run_slroat, Init, OrderingRule, RunConfig, StopReason,
};
use crate::error::{Error, Result};
use crate::fixtures::kofidis_tensor;
use crate::geometry::{omega, CONDITION_THRESHOLD};
use crate::orderings::{cyclic_ordering, random_ordering};
use crate::svg::{emit_svg_scatter, PointStyle, Scatter, ScatterPoint};
use crate::tensor::{contract_all, random_symmetric_from, EntryDistribution, SymTensor};

/// Environment variable bounding the worker pool.
pub const THREADS_ENV: &str = "JLROA_THREADS";
/// Objective values closer than this count as equal.
pub const DEFAULT_EQ_TOL: f64 = 1e-4;
/// Sorted final values separated by more than this start a new cluster.
pub const DEFAULT_CLUSTER_GAP: f64 = 1e-4;

/// Splitmix64 finalizer applied to `seed + (trial + 1)·φ`.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add((trial + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f(0..trials)` on a pool sized by `JLROA_THREADS`, in trial order.
pub fn run_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if threads == 0 {
            return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
        }
        builder = builder.num_threads(threads);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    /// Cyclic Jacobi sweeps.
    Jlroa,
    JacobiG,
    Shopm,
    Slroat,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jlroa" | "cyclic" => Ok(Algo::Jlroa),
            "jacobi-g" => Ok(Algo::JacobiG),
            "shopm" => Ok(Algo::Shopm),
            "slroat" => Ok(Algo::Slroat),
            _ => Err(Error::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Jlroa => "jlroa",
            Algo::JacobiG => "jacobi-g",
            Algo::Shopm => "shopm",
            Algo::Slroat => "slroat",
        })
    }
}

/// Settings shared by all algorithms in a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgoSettings {
    pub max_sweeps: usize,
    pub tol_grad: Option<f64>,
    pub baseline_iters: usize,
    pub baseline_tol: f64,
    /// Starting point of the Jacobi variants; baselines always start from HOSVD.
    pub jacobi_init: Init,
}

impl Default for AlgoSettings {
    fn default() -> Self {
        Self {
            max_sweeps: 200,
            tol_grad: None,
            baseline_iters: 2000,
            baseline_tol: 1e-12,
            jacobi_init: Init::Hosvd,
        }
    }
}

/// Final objective `Σσ_k²` of one algorithm on `a`.
pub fn final_objective(a: &SymTensor, p: usize, algo: Algo, settings: &AlgoSettings) -> Result<f64> {
    let mut cfg = RunConfig::new(p)
        .with_max_sweeps(settings.max_sweeps)
        .with_init(settings.jacobi_init);
    cfg.tol_grad = settings.tol_grad;
    match algo {
        Algo::Jlroa => Ok(run_jlroa(a, &cfg)?.0.objective),
        Algo::JacobiG => Ok(run_jacobi_g(a, &cfg.with_ordering(OrderingRule::JacobiG))?.0.objective),
        Algo::Shopm => {
            if p != 1 {
                return Err(Error::Config(
                    "the power method computes a rank-1 approximation; use p = 1".into(),
                ));
            }
            let x0 = hosvd_init(a, 1)?.column(0);
            let out = run_shopm(a, &x0, settings.baseline_iters, settings.baseline_tol)?;
            Ok(out.sigma * out.sigma)
        }
        Algo::Slroat => {
            let x0 = hosvd_init(a, p)?;
            let out = run_slroat(a, &x0, settings.baseline_iters, settings.baseline_tol)?;
            Ok(out.sigmas.iter().map(|s| s * s).sum())
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub num_greater: usize,
    pub num_smaller: usize,
    pub num_equal: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.num_greater + self.num_smaller + self.num_equal
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Ratios {
    /// Mean of `a/b` over trials where `a` is greater.
    pub ratio_greater: Option<f64>,
    /// Mean of `a/b` over trials where `a` is smaller.
    pub ratio_smaller: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Greater,
    Smaller,
    Equal,
}

pub fn classify(a: f64, b: f64, eq_tol: f64) -> Outcome {
    if (a - b).abs() < eq_tol {
        Outcome::Equal
    } else if a > b {
        Outcome::Greater
    } else {
        Outcome::Smaller
    }
}

/// Counts and mean quotients for paired values.
pub fn tally(pairs: &[(f64, f64)], eq_tol: f64) -> (Counts, Ratios) {
    let mut counts = Counts::default();
    let (mut g_sum, mut s_sum) = (0.0, 0.0);
    for &(a, b) in pairs {
        match classify(a, b, eq_tol) {
            Outcome::Equal => counts.num_equal += 1,
            Outcome::Greater => {
                counts.num_greater += 1;
                g_sum += a / b;
            }
            Outcome::Smaller => {
                counts.num_smaller += 1;
                s_sum += a / b;
            }
        }
    }
    let ratios = Ratios {
        ratio_greater: (counts.num_greater > 0).then(|| g_sum / counts.num_greater as f64),
        ratio_smaller: (counts.num_smaller > 0).then(|| s_sum / counts.num_smaller as f64),
    };
    (counts, ratios)
}

/// Per-trial rows as CSV with a header taken from the field names.
pub fn write_rows_csv<T: Serialize, W: std::io::Write>(rows: &[T], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Single,
    Compare,
    Kofidis,
    Orderings,
    Condcheck,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareParams {
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub p: usize,
    pub seed: u64,
    pub algo_a: Algo,
    pub algo_b: Algo,
    pub eq_tol: f64,
    /// Entry law of the random tensors; batches default to uniform on [0, 1).
    pub dist: EntryDistribution,
    pub settings: AlgoSettings,
}

impl CompareParams {
    pub fn new(trials: usize, n: usize, d: usize, p: usize, seed: u64, algo_a: Algo, algo_b: Algo) -> Self {
        Self {
            trials,
            n,
            d,
            p,
            seed,
            algo_a,
            algo_b,
            eq_tol: DEFAULT_EQ_TOL,
            dist: EntryDistribution::Uniform,
            settings: AlgoSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub trial: usize,
    pub seed: u64,
    pub val_a: f64,
    pub val_b: f64,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub protocol: Protocol,
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub p: usize,
    pub seed: u64,
    pub algo_a: Algo,
    pub algo_b: Algo,
    pub eq_tol: f64,
    pub dist: EntryDistribution,
    pub counts: Counts,
    pub ratios: Ratios,
    pub rows: Vec<CompareRow>,
}

fn check_batch(trials: usize, n: usize, d: usize, p: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if d < 2 || n < 2 {
        return Err(Error::Config(format!("need n ≥ 2 and d ≥ 2, got n = {n}, d = {d}")));
    }
    if p == 0 || p > n {
        return Err(Error::Config(format!("need 1 ≤ p ≤ n, got p = {p}, n = {n}")));
    }
    Ok(())
}

/// One random tensor per trial; both algorithms run on it.
pub fn cmd_compare(params: &CompareParams) -> Result<CompareReport> {
    let CompareParams {
        trials,
        n,
        d,
        p,
        seed,
        algo_a,
        algo_b,
        eq_tol,
        dist,
        ref settings,
    } = *params;
    check_batch(trials, n, d, p)?;
    let rows = run_trials(trials, |t| {
        let tseed = derive_seed(seed, t as u64);
        let a = random_symmetric_from(d, n, tseed, dist);
        let val_a = final_objective(&a, p, algo_a, settings)?;
        let val_b = if algo_b == algo_a {
            val_a
        } else {
            final_objective(&a, p, algo_b, settings)?
        };
        Ok(CompareRow {
            trial: t,
            seed: tseed,
            val_a,
            val_b,
            outcome: classify(val_a, val_b, eq_tol),
        })
    })?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.val_a, r.val_b)).collect();
    let (counts, ratios) = tally(&pairs, eq_tol);
    Ok(CompareReport {
        protocol: Protocol::Compare,
        trials,
        n,
        d,
        p,
        seed,
        algo_a,
        algo_b,
        eq_tol,
        dist,
        counts,
        ratios,
        rows,
    })
}

pub fn compare_plot(report: &CompareReport) -> Scatter {
    let points: Vec<ScatterPoint> = report
        .rows
        .iter()
        .map(|r| ScatterPoint {
            x: r.val_a,
            y: r.val_b,
            style: match r.outcome {
                Outcome::Greater => PointStyle::AGreater,
                Outcome::Smaller => PointStyle::BGreater,
                Outcome::Equal => PointStyle::Equal,
            },
        })
        .collect();
    emit_svg_scatter(
        &points,
        &format!(
            "{} vs {} (n = {}, d = {}, p = {})",
            report.algo_a, report.algo_b, report.n, report.d, report.p
        ),
        &report.algo_a.to_string(),
        &report.algo_b.to_string(),
        true,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingsParams {
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub p: usize,
    pub seed: u64,
    pub eq_tol: f64,
    pub cluster_gap: f64,
    pub dist: EntryDistribution,
    pub settings: AlgoSettings,
}

impl OrderingsParams {
    pub fn new(trials: usize, n: usize, d: usize, p: usize, seed: u64) -> Self {
        Self {
            trials,
            n,
            d,
            p,
            seed,
            eq_tol: DEFAULT_EQ_TOL,
            cluster_gap: DEFAULT_CLUSTER_GAP,
            dist: EntryDistribution::Uniform,
            settings: AlgoSettings {
                jacobi_init: Init::Identity,
                ..AlgoSettings::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingsRow {
    /// 0 is the cyclic ordering, `1..=trials` random orderings.
    pub trial: usize,
    pub cyclic: bool,
    pub ordering_seed: Option<u64>,
    pub f: f64,
    pub grad_norm: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingsReport {
    pub protocol: Protocol,
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub p: usize,
    pub seed: u64,
    pub dist: EntryDistribution,
    pub cyclic_f: f64,
    /// `max f − min f` over the random orderings.
    pub spread: f64,
    pub clusters: usize,
    /// Random orderings compared with the cyclic one.
    pub counts: Counts,
    pub ratios: Ratios,
    pub rows: Vec<OrderingsRow>,
}

/// Number of groups after splitting the sorted values at gaps above `gap`.
pub fn count_clusters(values: &[f64], gap: f64) -> usize {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return 0;
    }
    v.sort_by(f64::total_cmp);
    1 + v.windows(2).filter(|w| w[1] - w[0] > gap).count()
}

/// A fixed random tensor, the cyclic ordering and `trials` random orderings.
pub fn cmd_orderings(params: &OrderingsParams) -> Result<OrderingsReport> {
    let OrderingsParams {
        trials,
        n,
        d,
        p,
        seed,
        eq_tol,
        cluster_gap,
        dist,
        ref settings,
    } = *params;
    check_batch(trials, n, d, p)?;
    let a = random_symmetric_from(d, n, derive_seed(seed, 0), dist);
    let mut cfg = RunConfig::new(p)
        .with_max_sweeps(settings.max_sweeps)
        .with_init(settings.jacobi_init);
    cfg.tol_grad = settings.tol_grad;
    let rows = run_trials(trials + 1, |t| {
        let (ord, ordering_seed) = if t == 0 {
            (cyclic_ordering(n, p)?, None)
        } else {
            let s = derive_seed(seed, t as u64);
            (random_ordering(n, p, s)?, Some(s))
        };
        let (res, trace) = run_general(&a, &ord, &cfg)?;
        Ok(OrderingsRow {
            trial: t,
            cyclic: t == 0,
            ordering_seed,
            f: res.objective,
            grad_norm: trace.final_grad_norm,
            converged: trace.converged,
        })
    })?;
    let cyclic_f = rows[0].f;
    let random: Vec<f64> = rows[1..].iter().map(|r| r.f).collect();
    let (lo, hi) = random
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let pairs: Vec<(f64, f64)> = random.iter().map(|&v| (v, cyclic_f)).collect();
    let (counts, ratios) = tally(&pairs, eq_tol);
    Ok(OrderingsReport {
        protocol: Protocol::Orderings,
        trials,
        n,
        d,
        p,
        seed,
        dist,
        cyclic_f,
        spread: hi - lo,
        clusters: count_clusters(&random, cluster_gap),
        counts,
        ratios,
        rows,
    })
}

pub fn orderings_plot(report: &OrderingsReport) -> Scatter {
    let points: Vec<ScatterPoint> = report
        .rows
        .iter()
        .map(|r| ScatterPoint {
            x: r.trial as f64,
            y: r.f,
            style: if r.cyclic {
                PointStyle::Highlight
            } else {
                PointStyle::AGreater
            },
        })
        .collect();
    emit_svg_scatter(
        &points,
        &format!(
            "final f over orderings (n = {}, d = {}, p = {})",
            report.n, report.d, report.p
        ),
        "ordering",
        "f",
        false,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct CondcheckParams {
    pub trials: usize,
    pub n: usize,
    pub iterations: usize,
    pub seed: u64,
    pub threshold: f64,
    pub dist: EntryDistribution,
}

impl CondcheckParams {
    pub fn new(trials: usize, n: usize, iterations: usize, seed: u64) -> Self {
        Self {
            trials,
            n,
            iterations,
            seed,
            threshold: CONDITION_THRESHOLD,
            dist: EntryDistribution::Uniform,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CondcheckRow {
    pub trial: usize,
    pub seed: u64,
    pub omega: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub condition_52: bool,
    pub condition_53: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CondcheckReport {
    pub protocol: Protocol,
    pub trials: usize,
    pub n: usize,
    pub iterations: usize,
    pub seed: u64,
    pub threshold: f64,
    pub dist: EntryDistribution,
    pub num_positive: usize,
    pub frequency: f64,
    pub rows: Vec<CondcheckRow>,
}

/// Greedy Jacobi at `p = 2` on order-3 tensors for a fixed iteration budget,
/// then `ω` at the final iterate.
pub fn cmd_condcheck(params: &CondcheckParams) -> Result<CondcheckReport> {
    let CondcheckParams {
        trials,
        n,
        iterations,
        seed,
        threshold,
        dist,
    } = *params;
    check_batch(trials, n, 3, 2)?;
    let rows = run_trials(trials, |t| {
        let tseed = derive_seed(seed, t as u64);
        let a = random_symmetric_from(3, n, tseed, dist);
        let cfg = RunConfig::new(2)
            .with_ordering(OrderingRule::JacobiG)
            .with_epsilon(2.0 / n as f64)
            .with_max_iters(iterations)
            .with_max_sweeps(usize::MAX)
            .with_tol_gain(f64::NEG_INFINITY);
        let (res, trace) = run_jacobi_g(&a, &cfg)?;
        let w = contract_all(&a, &res.q)?;
        Ok(CondcheckRow {
            trial: t,
            seed: tseed,
            omega: omega(&w, 2)?,
            grad_norm: trace.final_grad_norm,
            iterations: trace.iterations(),
            condition_52: trace.diagnostics.condition_52_ok.unwrap_or(false),
            condition_53: trace.diagnostics.condition_53_ok.unwrap_or(false),
        })
    })?;
    let num_positive = rows.iter().filter(|r| r.omega > threshold).count();
    Ok(CondcheckReport {
        protocol: Protocol::Condcheck,
        trials,
        n,
        iterations,
        seed,
        threshold,
        dist,
        num_positive,
        frequency: num_positive as f64 / trials as f64,
        rows,
    })
}

pub fn condcheck_plot(report: &CondcheckReport) -> Scatter {
    let points: Vec<ScatterPoint> = report
        .rows
        .iter()
        .map(|r| ScatterPoint {
            x: r.trial as f64,
            y: r.omega,
            style: if r.omega > report.threshold {
                PointStyle::AGreater
            } else {
                PointStyle::BGreater
            },
        })
        .collect();
    emit_svg_scatter(
        &points,
        &format!("ω after {} greedy iterations", report.iterations),
        "trial",
        "ω",
        false,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KofidisRun {
    pub p: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub max_decrease: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KofidisReport {
    pub protocol: Protocol,
    pub runs: Vec<KofidisRun>,
    /// `max |σ| − min |σ|` of the power method over its last `window` iterations.
    pub shopm_amplitude: f64,
    pub shopm_iterations: usize,
    pub window: usize,
}

/// Cyclic Jacobi at `p = 1, 2, 3` to `tol_grad`, and the power method from
/// the HOSVD start for `shopm_iterations` steps.
pub fn kofidis_report(
    tol_grad: f64,
    max_sweeps: usize,
    shopm_iterations: usize,
    window: usize,
) -> Result<KofidisReport> {
    let a = kofidis_tensor();
    let mut runs = Vec::new();
    for p in 1..=3 {
        let cfg = RunConfig::new(p)
            .with_tol_grad(tol_grad)
            .with_tol_gain(f64::NEG_INFINITY)
            .with_max_sweeps(max_sweeps);
        let (res, trace) = run_jlroa(&a, &cfg)?;
        runs.push(KofidisRun {
            p,
            objective: res.objective,
            grad_norm: trace.final_grad_norm,
            sweeps: trace.sweeps,
            converged: trace.stop == StopReason::Gradient,
            max_decrease: trace.max_decrease(),
        });
    }
    let x0 = hosvd_init(&a, 1)?.column(0);
    let out = run_shopm(&a, &x0, shopm_iterations, 0.0)?;
    let tail = &out.sigmas[out.sigmas.len().saturating_sub(window)..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| {
        (l.min(s.abs()), h.max(s.abs()))
    });
    Ok(KofidisReport {
        protocol: Protocol::Kofidis,
        runs,
        shopm_amplitude: hi - lo,
        shopm_iterations: out.iterations,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_and_repeat() {
        let s: Vec<u64> = (0..100).map(|t| derive_seed(7, t)).collect();
        let mut u = s.clone();
        u.sort_unstable();
        u.dedup();
        assert_eq!(u.len(), 100);
        assert_eq!(derive_seed(7, 3), s[3]);
        assert_ne!(derive_seed(8, 3), s[3]);
    }

    #[test]
    fn tally_counts_and_ratios() {
        let pairs = [(2.0, 1.0), (1.0, 2.0), (1.0, 1.00001), (3.0, 1.0)];
        let (c, r) = tally(&pairs, 1e-4);
        assert_eq!(
            c,
            Counts {
                num_greater: 2,
                num_smaller: 1,
                num_equal: 1
            }
        );
        assert_eq!(c.total(), 4);
        assert_eq!(r.ratio_greater, Some(2.5));
        assert_eq!(r.ratio_smaller, Some(0.5));
        let (_, r) = tally(&[(1.0, 1.0)], 1e-4);
        assert_eq!(r, Ratios::default());
    }

    #[test]
    fn clusters() {
        assert_eq!(count_clusters(&[], 1e-4), 0);
        assert_eq!(count_clusters(&[1.0, 1.00001, 1.00002], 1e-4), 1);
        assert_eq!(count_clusters(&[1.0, 2.0, 1.00001, 2.00005, 3.0], 1e-4), 3);
    }

    #[test]
    fn compare_same_algorithm_is_all_equal_and_reproducible() {
        let params = CompareParams::new(4, 5, 3, 2, 3, Algo::Jlroa, Algo::Jlroa);
        let r = cmd_compare(&params).unwrap();
        assert_eq!(r.counts.num_equal, 4);
        assert_eq!(r, cmd_compare(&params).unwrap());
        assert_eq!(compare_plot(&r).svg.matches("<circle").count(), 4);
    }

    #[test]
    fn batch_validation() {
        let mut params = CompareParams::new(0, 5, 3, 2, 3, Algo::Jlroa, Algo::Slroat);
        assert!(matches!(cmd_compare(&params), Err(Error::Config(_))));
        params.trials = 1;
        params.algo_b = Algo::Shopm;
        assert!(matches!(cmd_compare(&params), Err(Error::Config(_))));
        assert!("bogus".parse::<Algo>().is_err());
        assert_eq!("jacobi-g".parse::<Algo>().unwrap().to_string(), "jacobi-g");
    }

    #[test]
    fn orderings_report_structure() {
        let r = cmd_orderings(&OrderingsParams::new(5, 5, 3, 2, 1)).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.rows[0].cyclic && !r.rows[1].cyclic);
        assert_eq!(r.counts.total(), 5);
        let plot = orderings_plot(&r);
        assert_eq!(plot.svg.matches(r#"fill="green""#).count(), 1);
    }

    #[test]
    fn condcheck_is_reproducible() {
        let p = CondcheckParams::new(3, 5, 50, 2);
        let a = cmd_condcheck(&p).unwrap();
        assert_eq!(a, cmd_condcheck(&p).unwrap());
        assert_eq!(a.rows.len(), 3);
        assert!(a.rows.iter().all(|r| r.iterations <= 50));
    }

    #[test]
    fn rows_csv_has_header_and_one_line_per_trial() {
        let r = cmd_orderings(&OrderingsParams::new(3, 4, 3, 1, 5)).unwrap();
        let mut buf = Vec::new();
        write_rows_csv(&r.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,cyclic,ordering_seed,f,grad_norm,converged");
        assert_eq!(lines.len(), 5);
        // the cyclic row has no ordering seed
        assert!(lines[1].starts_with("0,true,,"));
    }

    #[test]
    fn entry_distribution_changes_the_tensors() {
        let mut params = CompareParams::new(2, 4, 3, 1, 7, Algo::Jlroa, Algo::Jlroa);
        let uniform = cmd_compare(&params).unwrap();
        params.dist = EntryDistribution::Gaussian;
        let gaussian = cmd_compare(&params).unwrap();
        assert_ne!(uniform.rows[0].val_a, gaussian.rows[0].val_a);
        assert_eq!(serde_json::to_value(&gaussian).unwrap()["dist"], "gaussian");
    }
}
