//! Jacobi-type rotation drivers, result extraction and the power-method
//! baselines.
//!
//! All Jacobi variants keep the working tensor `W = A(Q)` up to date by
//! rotating it in place, so one iteration costs `O(d·nᵈ)`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    cost_from_working, d_raw, diagnostics_from_working, grad_norm_from_working, lambda_from_working, sigma_raw,
    DiagnosticReport, CONDITION_THRESHOLD,
};
use crate::givens::{rotate_in_place, solve_pair, PairClass, PairKind};
use crate::orderings::{cyclic_ordering, pair_count, PairOrdering};
use crate::tensor::{contract_all, polar_factor, OrthoMatrix, StiefelMatrix, SymTensor, ORTHO_TOL};

pub const DEFAULT_MAX_SWEEPS: usize = 200;
pub const DEFAULT_TOL_GAIN: f64 = 1e-14;
pub const DEFAULT_REORTHOGONALIZE_EVERY: usize = 1000;
/// Relative gradient tolerance used when none is configured.
pub const DEFAULT_REL_TOL_GRAD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum OrderingRule {
    Cyclic,
    Explicit(PairOrdering),
    JacobiG,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    Identity,
    RandomOrthogonal(u64),
    Hosvd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub p: usize,
    pub ordering: OrderingRule,
    /// Jacobi-G threshold; `None` means `2/n`.
    pub epsilon: Option<f64>,
    /// `None` means `1e−10·max(1, ‖A‖)`.
    pub tol_grad: Option<f64>,
    /// A sweep whose total predicted gain is at most this stops the run.
    pub tol_gain: f64,
    pub max_sweeps: usize,
    /// Iteration budget; mainly for Jacobi-G, where a "sweep" is `N` iterations.
    pub max_iters: Option<usize>,
    pub init: Init,
    pub reorthogonalize_every: usize,
}

impl RunConfig {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            ordering: OrderingRule::Cyclic,
            epsilon: None,
            tol_grad: None,
            tol_gain: DEFAULT_TOL_GAIN,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            max_iters: None,
            init: Init::Identity,
            reorthogonalize_every: DEFAULT_REORTHOGONALIZE_EVERY,
        }
    }

    pub fn with_ordering(mut self, ordering: OrderingRule) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_tol_grad(mut self, tol: f64) -> Self {
        self.tol_grad = Some(tol);
        self
    }

    pub fn with_tol_gain(mut self, tol: f64) -> Self {
        self.tol_gain = tol;
        self
    }

    pub fn with_max_sweeps(mut self, sweeps: usize) -> Self {
        self.max_sweeps = sweeps;
        self
    }

    pub fn with_max_iters(mut self, iters: usize) -> Self {
        self.max_iters = Some(iters);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.p == 0 || self.p > n {
            return Err(Error::Config(format!("need 1 ≤ p ≤ n, got p = {}, n = {n}", self.p)));
        }
        if self.tol_gain.is_nan() {
            return Err(Error::Config("tol_gain must not be NaN".into()));
        }
        if let Some(tol) = self.tol_grad {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::Config(format!("tol_grad must be positive, got {tol}")));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps <= 2.0 / n as f64) {
                return Err(Error::Config(format!(
                    "epsilon must lie in (0, 2/n] = (0, {}], got {eps}",
                    2.0 / n as f64
                )));
            }
        }
        if self.reorthogonalize_every == 0 {
            return Err(Error::Config("reorthogonalize_every must be positive".into()));
        }
        if let OrderingRule::Explicit(ord) = &self.ordering {
            if ord.n() != n || ord.p() != self.p {
                return Err(Error::Shape(format!(
                    "ordering built for n = {}, p = {} does not match n = {n}, p = {}",
                    ord.n(),
                    ord.p(),
                    self.p
                )));
            }
        }
        Ok(())
    }

    fn resolved_tol_grad(&self, a: &SymTensor) -> f64 {
        self.tol_grad
            .unwrap_or(DEFAULT_REL_TOL_GRAD * a.frobenius_norm().max(1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Zero-based rotation plane.
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub f: f64,
    pub grad_norm: f64,
    pub gain: f64,
    /// `h′(0) = −2Λ_{ij}` before the rotation.
    pub slope: f64,
    /// `‖Λ‖_F` before the rotation.
    pub grad_norm_before: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Gradient,
    Stalled,
    MaxSweeps,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub initial_f: f64,
    pub initial_grad_norm: f64,
    pub tol_grad: f64,
    pub sweeps: usize,
    pub stop: StopReason,
    pub converged: bool,
    pub final_grad_norm: f64,
    pub diagnostics: DiagnosticReport,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Largest decrease of `f` between consecutive iterates (0 when monotone).
    pub fn max_decrease(&self) -> f64 {
        let mut prev = self.initial_f;
        let mut worst = 0.0f64;
        for r in &self.records {
            worst = worst.max(prev - r.f);
            prev = r.f;
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationResult {
    pub q: OrthoMatrix,
    /// First `p` columns of `q`.
    pub x: StiefelMatrix,
    pub sigmas: Vec<f64>,
    pub objective: f64,
    /// `‖A‖² − Σσ_k²`.
    pub residual_sq: f64,
    /// `‖A − Σσ_k u_k^{⊗d}‖²` evaluated directly.
    pub residual_sq_direct: f64,
}

/// `σ_k = W_{k…k}` and both forms of the squared residual at `Q`.
pub fn extract_result(a: &SymTensor, q: &OrthoMatrix, p: usize) -> Result<ApproximationResult> {
    if p == 0 || p > a.dim() || q.dim() != a.dim() {
        return Err(Error::Shape(format!("p = {p} with a {}-dimensional frame", q.dim())));
    }
    let x = q.leading(p);
    let w = contract_all(a, &x)?;
    let sigmas: Vec<f64> = (0..p).map(|k| w.diag(k)).collect();
    let objective: f64 = sigmas.iter().map(|s| s * s).sum();
    let norm_sq = a.frobenius_norm().powi(2);
    let mut approx = SymTensor::zeros(a.order(), a.dim());
    for (k, &s) in sigmas.iter().enumerate() {
        approx.add_power(&x.column(k), s);
    }
    let residual_sq_direct = a.sub(&approx)?.frobenius_norm().powi(2);
    Ok(ApproximationResult {
        q: q.clone(),
        x,
        sigmas,
        objective,
        residual_sq: norm_sq - objective,
        residual_sq_direct,
    })
}

/// Leading `p` left singular vectors of the mode-1 unfolding, each signed so
/// that its largest-magnitude entry is positive.
pub fn hosvd_init(a: &SymTensor, p: usize) -> Result<StiefelMatrix> {
    let n = a.dim();
    if p == 0 || p > n {
        return Err(Error::Config(format!("need 1 ≤ p ≤ n, got p = {p}, n = {n}")));
    }
    let cols = a.data().len() / n;
    let unfolding = DMatrix::from_row_slice(n, cols, a.data());
    let svd = unfolding.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| {
        svd.singular_values[y]
            .total_cmp(&svd.singular_values[x])
            .then(x.cmp(&y))
    });
    let mut out = DMatrix::zeros(n, p);
    for (k, &src) in order.iter().take(p).enumerate() {
        let mut col = u.column(src).into_owned();
        let lead = col
            .iter()
            .copied()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            col.neg_mut();
        }
        out.set_column(k, &col);
    }
    StiefelMatrix::new(out)
}

fn initial_frame(a: &SymTensor, init: Init) -> Result<OrthoMatrix> {
    let n = a.dim();
    match init {
        Init::Identity => Ok(OrthoMatrix::identity(n)),
        Init::RandomOrthogonal(seed) => Ok(OrthoMatrix::random(n, seed)),
        Init::Hosvd => Ok(hosvd_init(a, n)?.complete()),
    }
}

/// Cyclic Jacobi sweeps in row-major pair order.
pub fn run_jlroa(a: &SymTensor, cfg: &RunConfig) -> Result<(ApproximationResult, IterationTrace)> {
    if cfg.ordering != OrderingRule::Cyclic {
        return Err(Error::Config("run_jlroa expects the cyclic ordering".into()));
    }
    cfg.validate(a.dim())?;
    let ord = cyclic_ordering(a.dim(), cfg.p)?;
    Driver::new(a, cfg)?.run(Selection::Ordered(ord.pairs()))
}

/// Jacobi sweeps repeating an arbitrary ordering of the pair set.
pub fn run_general(
    a: &SymTensor,
    ordering: &PairOrdering,
    cfg: &RunConfig,
) -> Result<(ApproximationResult, IterationTrace)> {
    let cfg = cfg.clone().with_ordering(OrderingRule::Explicit(ordering.clone()));
    cfg.validate(a.dim())?;
    Driver::new(a, &cfg)?.run(Selection::Ordered(ordering.pairs()))
}

/// Greedy pair selection by the largest `|Λ_{ij}|`.
pub fn run_jacobi_g(a: &SymTensor, cfg: &RunConfig) -> Result<(ApproximationResult, IterationTrace)> {
    cfg.validate(a.dim())?;
    let eps = cfg.epsilon.unwrap_or(2.0 / a.dim() as f64);
    Driver::new(a, cfg)?.run(Selection::Greedy { epsilon: eps })
}

/// Dispatches on `cfg.ordering`.
pub fn run(a: &SymTensor, cfg: &RunConfig) -> Result<(ApproximationResult, IterationTrace)> {
    match &cfg.ordering {
        OrderingRule::Cyclic => run_jlroa(a, cfg),
        OrderingRule::Explicit(ord) => run_general(a, ord, cfg),
        OrderingRule::JacobiG => run_jacobi_g(a, cfg),
    }
}

enum Selection<'a> {
    Ordered(&'a [(usize, usize)]),
    Greedy { epsilon: f64 },
}

struct Driver<'a> {
    a: &'a SymTensor,
    cfg: &'a RunConfig,
    q: DMatrix<f64>,
    w: SymTensor,
    f: f64,
    grad: f64,
    tol_grad: f64,
    records: Vec<IterationRecord>,
}

impl<'a> Driver<'a> {
    fn new(a: &'a SymTensor, cfg: &'a RunConfig) -> Result<Self> {
        let q0 = initial_frame(a, cfg.init)?;
        let w = contract_all(a, &q0)?;
        let f = cost_from_working(&w, cfg.p);
        let grad = grad_norm_from_working(&w, cfg.p);
        Ok(Self {
            a,
            cfg,
            q: q0.into_inner(),
            w,
            f,
            grad,
            tol_grad: cfg.resolved_tol_grad(a),
            records: Vec::new(),
        })
    }

    fn run(mut self, selection: Selection<'_>) -> Result<(ApproximationResult, IterationTrace)> {
        let p = self.cfg.p;
        let n = self.a.dim();
        let per_sweep = pair_count(n, p);
        let max_iters = self.cfg.max_iters.unwrap_or(usize::MAX);
        let (initial_f, initial_grad) = (self.f, self.grad);
        let mut sweeps = 0;

        let stop = if self.grad <= self.tol_grad {
            StopReason::Gradient
        } else if per_sweep == 0 {
            StopReason::Stalled
        } else {
            'outer: loop {
                let mut sweep_gain = 0.0;
                for step in 0..per_sweep {
                    if self.records.len() >= max_iters {
                        break 'outer StopReason::MaxIters;
                    }
                    let (i, j) = match &selection {
                        Selection::Ordered(pairs) => pairs[step],
                        Selection::Greedy { epsilon } => self.greedy_pair(*epsilon)?,
                    };
                    sweep_gain += self.step(i, j)?;
                    if self.grad <= self.tol_grad {
                        sweeps += 1;
                        break 'outer StopReason::Gradient;
                    }
                }
                sweeps += 1;
                if sweep_gain <= self.cfg.tol_gain {
                    break StopReason::Stalled;
                }
                if sweeps >= self.cfg.max_sweeps {
                    break StopReason::MaxSweeps;
                }
            }
        };

        let q = OrthoMatrix::new_unchecked(self.q);
        let diagnostics = diagnostics_from_working(&self.w, p, CONDITION_THRESHOLD);
        let result = extract_result(self.a, &q, p)?;
        let trace = IterationTrace {
            records: self.records,
            initial_f,
            initial_grad_norm: initial_grad,
            tol_grad: self.tol_grad,
            sweeps,
            stop,
            converged: self.grad <= self.tol_grad,
            final_grad_norm: self.grad,
            diagnostics,
        };
        Ok((result, trace))
    }

    fn greedy_pair(&self, epsilon: f64) -> Result<(usize, usize)> {
        let lambda = lambda_from_working(&self.w, self.cfg.p);
        let (i, j) = lambda
            .argmax_pair()
            .ok_or_else(|| Error::Breakdown("empty pair set".into()))?;
        let lhs = 2.0 * lambda.lambda[(i, j)].abs();
        let rhs = epsilon * lambda.norm();
        if lhs < rhs * (1.0 - 1e-12) {
            return Err(Error::Breakdown(format!(
                "selected pair ({}, {}) violates the selection threshold: {lhs} < {rhs}",
                i + 1,
                j + 1
            )));
        }
        Ok((i, j))
    }

    /// One rotation; returns the solver's predicted gain.
    fn step(&mut self, i: usize, j: usize) -> Result<f64> {
        let p = self.cfg.p;
        let pair = PairClass::new(i, j, self.a.dim(), p)?;
        let d = self.a.order() as f64;
        let slope = match pair.class {
            PairKind::C1 => 2.0 * d * d_raw(&self.w, i, j),
            PairKind::C2 => 2.0 * d * sigma_raw(&self.w, i, j),
        };
        let sol = solve_pair(&self.w, pair)?;
        let grad_before = self.grad;
        let theta = sol.theta_star;
        if theta != 0.0 {
            let (s, c) = theta.sin_cos();
            rotate_in_place(&mut self.w, i, j, c, s);
            for r in 0..self.q.nrows() {
                let (qi, qj) = (self.q[(r, i)], self.q[(r, j)]);
                self.q[(r, i)] = c * qi + s * qj;
                self.q[(r, j)] = -s * qi + c * qj;
            }
        }
        let k = self.records.len() + 1;
        if k.is_multiple_of(self.cfg.reorthogonalize_every) {
            self.reorthogonalize()?;
        }
        let f_new = cost_from_working(&self.w, p);
        self.grad = grad_norm_from_working(&self.w, p);
        self.records.push(IterationRecord {
            k,
            i,
            j,
            theta,
            f: f_new,
            grad_norm: self.grad,
            gain: sol.gain,
            slope,
            grad_norm_before: grad_before,
        });
        self.f = f_new;
        Ok(sol.gain)
    }

    fn reorthogonalize(&mut self) -> Result<()> {
        let (polar, ratio) = polar_factor(&self.q);
        if ratio < 0.5 {
            return Err(Error::Breakdown(format!(
                "rotation frame degenerated (σ_min/σ_max = {ratio})"
            )));
        }
        self.q = polar;
        self.w = self.a.contract(&self.q)?;
        Ok(())
    }
}

/// Result JSON: objective, residual, σ values, `X` column-major,
/// diagnostics, convergence flag and sweep count.
pub fn result_json(result: &ApproximationResult, trace: &IterationTrace) -> serde_json::Value {
    serde_json::json!({
        "objective": result.objective,
        "residual_sq": result.residual_sq,
        "sigmas": result.sigmas,
        "X": result.x.matrix().as_slice(),
        "X_shape": [result.x.rows(), result.x.cols()],
        "diagnostics": trace.diagnostics,
        "converged": trace.converged,
        "sweeps": trace.sweeps,
        "iterations": trace.iterations(),
        "stop": trace.stop,
    })
}

/// Trace CSV with columns `iter,i,j,theta,f,grad_norm,gain`; pairs one-based.
pub fn write_trace_csv<W: Write>(trace: &IterationTrace, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["iter", "i", "j", "theta", "f", "grad_norm", "gain"])?;
    for r in &trace.records {
        wtr.write_record([
            r.k.to_string(),
            (r.i + 1).to_string(),
            (r.j + 1).to_string(),
            format!("{:e}", r.theta),
            format!("{:e}", r.f),
            format!("{:e}", r.grad_norm),
            format!("{:e}", r.gain),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShopmOutput {
    pub x: Vec<f64>,
    pub sigma: f64,
    /// `σ` after every iteration.
    pub sigmas: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Symmetric higher-order power method: `x ← A·x^{d−1} / ‖A·x^{d−1}‖`.
/// Stops once successive iterates differ by at most `tol` (never if `tol = 0`).
pub fn run_shopm(a: &SymTensor, x0: &[f64], max_iters: usize, tol: f64) -> Result<ShopmOutput> {
    if x0.len() != a.dim() {
        return Err(Error::Shape(format!(
            "start vector has length {}, expected {}",
            x0.len(),
            a.dim()
        )));
    }
    let norm0 = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm0 - 1.0).abs() > ORTHO_TOL {
        return Err(Error::Precondition {
            what: "unit start vector",
            residual: (norm0 - 1.0).abs(),
        });
    }
    let mut x = x0.to_vec();
    let mut sigma = a.eval_form(&x);
    let mut sigmas = Vec::with_capacity(max_iters);
    let mut converged = false;
    for _ in 0..max_iters {
        let v = a.contract_vector(&x, a.order() - 1);
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::Breakdown("A·x^{d−1} vanished in the power iteration".into()));
        }
        let next: Vec<f64> = v.iter().map(|t| t / norm).collect();
        let change = next.iter().zip(&x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        x = next;
        sigma = a.eval_form(&x);
        sigmas.push(sigma);
        if change <= tol {
            converged = true;
            break;
        }
    }
    Ok(ShopmOutput {
        iterations: sigmas.len(),
        x,
        sigma,
        sigmas,
        converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlroatOutput {
    #[serde(skip)]
    pub x: StiefelMatrix,
    pub sigmas: Vec<f64>,
    /// `Σσ_k²` after every iteration.
    pub objectives: Vec<f64>,
    /// Iterations (one-based) whose update matrix was numerically rank deficient.
    pub rank_deficient: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
}

/// Polar-decomposition iteration: `X ← polar(M)` with columns
/// `M_k = σ_k·A·u_k^{d−1}`, the Euclidean gradient of `Σσ_k²` up to the factor `2d`.
pub fn run_slroat(a: &SymTensor, x0: &StiefelMatrix, max_iters: usize, tol: f64) -> Result<SlroatOutput> {
    let n = a.dim();
    if x0.rows() != n {
        return Err(Error::Shape(format!(
            "start frame has {} rows, expected {n}",
            x0.rows()
        )));
    }
    let p = x0.cols();
    let mut x = x0.matrix().clone();
    let mut objectives = Vec::with_capacity(max_iters);
    let mut rank_deficient = Vec::new();
    let mut converged = false;
    for it in 1..=max_iters {
        let mut m = DMatrix::zeros(n, p);
        for k in 0..p {
            let u: Vec<f64> = x.column(k).iter().copied().collect();
            let v = a.contract_vector(&u, a.order() - 1);
            let sigma: f64 = v.iter().zip(&u).map(|(s, t)| s * t).sum();
            for r in 0..n {
                m[(r, k)] = sigma * v[r];
            }
        }
        let (polar, ratio) = polar_factor(&m);
        if ratio < 1e-12 {
            rank_deficient.push(it);
            if m.norm() == 0.0 {
                return Err(Error::Breakdown("SLROAT update matrix vanished".into()));
            }
        }
        let change = (&polar - &x).norm();
        x = polar;
        let sigmas: Vec<f64> = (0..p)
            .map(|k| a.eval_form(&x.column(k).iter().copied().collect::<Vec<_>>()))
            .collect();
        objectives.push(sigmas.iter().map(|s| s * s).sum());
        if change <= tol {
            converged = true;
            break;
        }
    }
    let sigmas: Vec<f64> = (0..p)
        .map(|k| a.eval_form(&x.column(k).iter().copied().collect::<Vec<_>>()))
        .collect();
    Ok(SlroatOutput {
        x: StiefelMatrix::new_unchecked(x),
        sigmas,
        iterations: objectives.len(),
        objectives,
        rank_deficient,
        converged,
    })
}
