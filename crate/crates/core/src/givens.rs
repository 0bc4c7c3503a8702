//! Givens rotations and the exact per-pair angle subproblem.
//!
//! Every solver works on the two-index subtensor of the working tensor on
//! `{i, j}`, relabeled so that `i ↦ 0` and `j ↦ 1`. For a rotation in that
//! plane the objective increment only depends on this subtensor: both
//! diagonal entries count for a pair of kept indices (class `C1`), only the
//! first one when `j` is a discarded index (class `C2`).
//!
//! With `x = tan θ`, the increment is a rational function
//! `P(x) / (1 + x²)^k` with `deg P = 2k`. It is evaluated in homogeneous
//! form `Σ P_m sin^m θ cos^{2k−m} θ`, which stays finite at `x = ±∞`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::real_roots;
use crate::tensor::{OrthoMatrix, SymTensor};

/// Candidates whose gains differ by at most this much are considered tied.
pub const TIE_TOL: f64 = 1e-12;

const GENERIC_GRID: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    /// Both indices are kept (`i < j < p`).
    C1,
    /// `i` is kept and `j` is discarded (`i < p ≤ j`).
    C2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClass {
    pub i: usize,
    pub j: usize,
    pub class: PairKind,
}

impl PairClass {
    pub fn new(i: usize, j: usize, n: usize, p: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, dim: n });
        }
        if i >= j || i >= p {
            return Err(Error::Shape(format!(
                "pair ({i}, {j}) is not admissible for p = {p}: need i < j and i < p"
            )));
        }
        let class = if j < p { PairKind::C1 } else { PairKind::C2 };
        Ok(Self { i, j, class })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    C1Order3,
    C2Order3,
    C1Order4,
    C2Order4,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(with = "ext_real")]
    pub x: f64,
    pub gain: f64,
}

impl Candidate {
    pub fn theta(&self) -> f64 {
        theta_of(self.x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSolution {
    pub theta_star: f64,
    /// `tan θ*`; `+∞` encodes `θ* = π/2`.
    #[serde(with = "ext_real")]
    pub x_star: f64,
    pub gain: f64,
    pub candidates: Vec<Candidate>,
    pub solver_kind: SolverKind,
}

/// `θ = arctan x`, with `±∞ ↦ π/2`.
pub fn theta_of(x: f64) -> f64 {
    if x.is_infinite() {
        FRAC_PI_2
    } else {
        x.atan()
    }
}

/// Identity except `(i,i) = (j,j) = cos θ`, `(i,j) = −sin θ`, `(j,i) = sin θ`.
pub fn givens(n: usize, i: usize, j: usize, theta: f64) -> Result<OrthoMatrix> {
    check_plane(n, i, j)?;
    let mut g = DMatrix::identity(n, n);
    let (s, c) = theta.sin_cos();
    g[(i, i)] = c;
    g[(j, j)] = c;
    g[(i, j)] = -s;
    g[(j, i)] = s;
    Ok(OrthoMatrix::new_unchecked(g))
}

/// `W(G^{(i,j,θ)})`, touching only entries with an index in `{i, j}`.
pub fn apply_givens(w: &SymTensor, i: usize, j: usize, theta: f64) -> Result<SymTensor> {
    check_plane(w.dim(), i, j)?;
    let mut out = w.clone();
    let (s, c) = theta.sin_cos();
    rotate_in_place(&mut out, i, j, c, s);
    Ok(out)
}

fn check_plane(n: usize, i: usize, j: usize) -> Result<()> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    if i >= j {
        return Err(Error::Shape(format!("rotation plane ({i}, {j}) needs i < j")));
    }
    Ok(())
}

/// In-place `W ← W(G)` for `G = G^{(i,j,θ)}` with `c = cos θ`, `s = sin θ`.
/// Along every mode the pair `(w_i, w_j)` becomes `(c w_i + s w_j, −s w_i + c w_j)`.
pub(crate) fn rotate_in_place(w: &mut SymTensor, i: usize, j: usize, c: f64, s: f64) {
    let n = w.dim();
    let order = w.order();
    let data = w.data_mut();
    for mode in 0..order {
        let stride = n.pow((order - 1 - mode) as u32);
        let block = n * stride;
        let outer = data.len() / block;
        for o in 0..outer {
            let base = o * block;
            for r in 0..stride {
                let li = base + i * stride + r;
                let lj = base + j * stride + r;
                let (xi, xj) = (data[li], data[lj]);
                data[li] = c * xi + s * xj;
                data[lj] = -s * xi + c * xj;
            }
        }
    }
}

/// Dispatches to the closed-form solver for orders 3 and 4 and to the
/// sampled search otherwise.
pub fn solve_pair(w: &SymTensor, pair: PairClass) -> Result<RotationSolution> {
    let sub = w.pair_subtensor(pair.i, pair.j);
    match (w.order(), pair.class) {
        (3, PairKind::C1) => solve_c1_order3(&sub),
        (3, PairKind::C2) => solve_c2_order3(&sub),
        (4, PairKind::C1) => solve_c1_order4(&sub),
        (4, PairKind::C2) => solve_c2_order4(&sub),
        _ => solve_generic(w, pair),
    }
}

fn expect_pair_subtensor(w: &SymTensor, order: usize) -> Result<()> {
    if w.order() != order || w.dim() != 2 {
        return Err(Error::Shape(format!(
            "expected an order-{order} subtensor of dimension 2, got order {} dimension {}",
            w.order(),
            w.dim()
        )));
    }
    Ok(())
}

/// Entries of a dimension-2 order-3 tensor, indexed by how many indices are 1.
fn entries3(w: &SymTensor) -> [f64; 4] {
    [
        w.get(&[0, 0, 0]),
        w.get(&[0, 0, 1]),
        w.get(&[0, 1, 1]),
        w.get(&[1, 1, 1]),
    ]
}

fn entries4(w: &SymTensor) -> [f64; 5] {
    [
        w.get(&[0, 0, 0, 0]),
        w.get(&[0, 0, 0, 1]),
        w.get(&[0, 0, 1, 1]),
        w.get(&[0, 1, 1, 1]),
        w.get(&[1, 1, 1, 1]),
    ]
}

/// Numerator coefficients `P_0..P_4` (over `(1 + x²)²`) for a kept pair, order 3.
pub fn increment_c1_order3(w: &SymTensor) -> Vec<f64> {
    let (a, b) = resolvent_ab_order3(&entries3(w));
    vec![0.0, a, -0.5 * b, -a, 0.0]
}

fn resolvent_ab_order3(e: &[f64; 4]) -> (f64, f64) {
    let [w111, w112, w122, w222] = *e;
    let a = 6.0 * (w111 * w112 - w122 * w222);
    let b = 6.0
        * (w111 * w111 + w222 * w222 - 3.0 * w112 * w112 - 3.0 * w122 * w122 - 2.0 * w111 * w122 - 2.0 * w112 * w222);
    (a, b)
}

/// Numerator coefficients `P_0..P_6` (over `(1 + x²)³`) for a kept/discarded pair, order 3.
/// Index 1 of the subtensor plays the role of the discarded index `3`.
pub fn increment_c2_order3(w: &SymTensor) -> Vec<f64> {
    let [w111, w113, w133, w333] = entries3(w);
    vec![
        0.0,
        6.0 * w111 * w113,
        -3.0 * w111 * w111 + 6.0 * w133 * w111 + 9.0 * w113 * w113,
        18.0 * w113 * w133 + 2.0 * w111 * w333,
        -3.0 * w111 * w111 + 9.0 * w133 * w133 + 6.0 * w113 * w333,
        6.0 * w133 * w333,
        w333 * w333 - w111 * w111,
    ]
}

/// Numerator coefficients `P_0..P_8` (over `(1 + x²)⁴`) for a kept pair, order 4.
pub fn increment_c1_order4(w: &SymTensor) -> Vec<f64> {
    let [w1111, w1112, w1122, w1222, w2222] = entries4(w);
    let odd1 = 8.0 * w1111 * w1112 - 8.0 * w1222 * w2222;
    let even2 = -4.0 * w1111 * w1111 + 12.0 * w1122 * w1111 + 16.0 * w1112 * w1112 + 16.0 * w1222 * w1222
        - 4.0 * w2222 * w2222
        + 12.0 * w1122 * w2222;
    let odd3 = 48.0 * w1112 * w1122 + 8.0 * w1111 * w1222 - 48.0 * w1122 * w1222 - 8.0 * w1112 * w2222;
    let mid =
        -6.0 * w1111 * w1111 + 4.0 * w1111 * w2222 + 72.0 * w1122 * w1122 - 6.0 * w2222 * w2222 + 64.0 * w1112 * w1222;
    vec![0.0, odd1, even2, odd3, mid, -odd3, even2, -odd1, 0.0]
}

/// Numerator coefficients `P_0..P_8` (over `(1 + x²)⁴`) for a kept/discarded pair, order 4.
pub fn increment_c2_order4(w: &SymTensor) -> Vec<f64> {
    let [w1111, w1113, w1133, w1333, w3333] = entries4(w);
    vec![
        0.0,
        8.0 * w1111 * w1113,
        -4.0 * w1111 * w1111 + 12.0 * w1133 * w1111 + 16.0 * w1113 * w1113,
        48.0 * w1113 * w1133 + 8.0 * w1111 * w1333,
        -6.0 * w1111 * w1111 + 2.0 * w3333 * w1111 + 36.0 * w1133 * w1133 + 32.0 * w1113 * w1333,
        48.0 * w1133 * w1333 + 8.0 * w1113 * w3333,
        -4.0 * w1111 * w1111 + 16.0 * w1333 * w1333 + 12.0 * w1133 * w3333,
        8.0 * w1333 * w3333,
        w3333 * w3333 - w1111 * w1111,
    ]
}

/// Evaluates `P(x) / (1 + x²)^k` (`k = (len − 1)/2`) at `θ` in homogeneous form.
pub fn eval_increment(numer: &[f64], theta: f64) -> f64 {
    let two_k = numer.len() - 1;
    let (s, c) = theta.sin_cos();
    let mut acc = 0.0;
    for (m, &pm) in numer.iter().enumerate() {
        if pm != 0.0 {
            acc += pm * s.powi(m as i32) * c.powi((two_k - m) as i32);
        }
    }
    acc
}

/// Kept pair, order 3: roots of `Ω(ξ) = aξ² + bξ − 4a`, mapped back through
/// `x² − ξx − 1 = 0` into `[−1, 1]`, together with `x = 0`.
pub fn solve_c1_order3(w: &SymTensor) -> Result<RotationSolution> {
    expect_pair_subtensor(w, 3)?;
    let (a, b) = resolvent_ab_order3(&entries3(w));
    let xs = c1_candidates(&[-4.0 * a, b, a]);
    Ok(finish(increment_c1_order3(w), xs, a, SolverKind::C1Order3))
}

/// Kept/discarded pair, order 3: real roots of
/// `−W₁₃₃x³ + (W₃₃₃ − 2W₁₁₃)x² + (2W₁₃₃ − W₁₁₁)x + W₁₁₃`, plus `0` and `∞`.
pub fn solve_c2_order3(w: &SymTensor) -> Result<RotationSolution> {
    expect_pair_subtensor(w, 3)?;
    let [w111, w113, w133, w333] = entries3(w);
    let cubic = [w113, 2.0 * w133 - w111, w333 - 2.0 * w113, -w133];
    let mut xs = real_roots(&cubic);
    xs.push(f64::INFINITY);
    let slope = 6.0 * w111 * w113;
    Ok(finish(increment_c2_order3(w), xs, slope, SolverKind::C2Order3))
}

/// Kept pair, order 4: roots of
/// `Ω(ξ) = aξ⁴ + bξ³ + (4a + c)ξ² + (3b + d)ξ + 2a + 2c + e`.
pub fn solve_c1_order4(w: &SymTensor) -> Result<RotationSolution> {
    expect_pair_subtensor(w, 4)?;
    let [w1111, w1112, w1122, w1222, w2222] = entries4(w);
    let a = 8.0 * (w1111 * w1112 - w1222 * w2222);
    let b = 8.0
        * (w1111 * w1111 - 3.0 * w1122 * w1111 - 4.0 * w1112 * w1112 - 4.0 * w1222 * w1222 + w2222 * w2222
            - 3.0 * w1122 * w2222);
    let c = 8.0
        * (18.0 * w1112 * w1122 - 7.0 * w1111 * w1112 + 3.0 * w1111 * w1222
            - 18.0 * w1122 * w1222
            - 3.0 * w1112 * w2222
            + 7.0 * w1222 * w2222);
    let d = 8.0
        * (9.0 * w1111 * w1122 - 32.0 * w1112 * w1222 - 2.0 * w1111 * w2222
            + 9.0 * w1122 * w2222
            + 12.0 * w1112 * w1112
            - 36.0 * w1122 * w1122
            + 12.0 * w1222 * w1222);
    let e = 80.0 * (6.0 * w1122 * w1222 - w1111 * w1222 - 6.0 * w1112 * w1122 + w1112 * w2222);
    let omega = [2.0 * a + 2.0 * c + e, 3.0 * b + d, 4.0 * a + c, b, a];
    let xs = c1_candidates(&omega);
    Ok(finish(increment_c1_order4(w), xs, a, SolverKind::C1Order4))
}

/// Kept/discarded pair, order 4: real roots of
/// `W₁₃₃₃x⁴ + (3W₁₁₃₃ − W₃₃₃₃)x³ + (3W₁₁₁₃ − 3W₁₃₃₃)x² + (W₁₁₁₁ − 3W₁₁₃₃)x − W₁₁₁₃`,
/// plus `0` and `∞`.
pub fn solve_c2_order4(w: &SymTensor) -> Result<RotationSolution> {
    expect_pair_subtensor(w, 4)?;
    let [w1111, w1113, w1133, w1333, w3333] = entries4(w);
    let quartic = [
        -w1113,
        w1111 - 3.0 * w1133,
        3.0 * w1113 - 3.0 * w1333,
        3.0 * w1133 - w3333,
        w1333,
    ];
    let mut xs = real_roots(&quartic);
    xs.push(f64::INFINITY);
    let slope = 8.0 * w1111 * w1113;
    Ok(finish(increment_c2_order4(w), xs, slope, SolverKind::C2Order4))
}

/// Maps resolvent roots `ξ` to the root of `x² − ξx − 1 = 0` lying in `[−1, 1]`.
fn c1_candidates(resolvent: &[f64]) -> Vec<f64> {
    let mut xs = Vec::new();
    for xi in real_roots(resolvent) {
        let disc = (xi * xi + 4.0).sqrt();
        // the large-magnitude root is computed without cancellation; the
        // small one follows from the product of roots being −1
        let big = if xi >= 0.0 {
            0.5 * (xi + disc)
        } else {
            0.5 * (xi - disc)
        };
        let small = -1.0 / big;
        xs.push(small);
        if (big.abs() - 1.0).abs() <= 1e-15 {
            xs.push(big.signum());
        }
    }
    xs
}

/// Scores every candidate and applies the tie-breaking rule.
fn finish(numer: Vec<f64>, mut xs: Vec<f64>, slope0: f64, kind: SolverKind) -> RotationSolution {
    xs.push(0.0);
    let candidates: Vec<Candidate> = xs
        .into_iter()
        .map(|x| Candidate {
            x,
            gain: if x == 0.0 {
                0.0
            } else {
                eval_increment(&numer, theta_of(x))
            },
        })
        .collect();
    let best = choose(&candidates, slope0);
    let chosen = candidates[best];
    RotationSolution {
        theta_star: chosen.theta(),
        x_star: chosen.x,
        gain: chosen.gain,
        candidates,
        solver_kind: kind,
    }
}

/// Picks the maximal gain; near-ties go to the smallest `|θ|`, then to
/// positive `θ`. `x = 0` only takes part in a tie when it is itself a
/// critical point (`h′(0) = 0`); otherwise a tied nonzero critical point
/// with positive gain beats it.
fn choose(candidates: &[Candidate], slope0: f64) -> usize {
    let best_gain = candidates.iter().map(|c| c.gain).fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..candidates.len())
        .filter(|&k| candidates[k].gain >= best_gain - TIE_TOL)
        .collect();
    let has_nonzero = tied.iter().any(|&k| candidates[k].x != 0.0 && candidates[k].gain > 0.0);
    let pool: Vec<usize> = if slope0 != 0.0 && has_nonzero {
        tied.into_iter()
            .filter(|&k| candidates[k].x != 0.0 && candidates[k].gain > 0.0)
            .collect()
    } else {
        tied
    };
    *pool
        .iter()
        .min_by(|&&a, &&b| {
            let (ta, tb) = (candidates[a].theta(), candidates[b].theta());
            ta.abs().total_cmp(&tb.abs()).then_with(|| tb.total_cmp(&ta))
        })
        .expect("candidate list always contains x = 0")
}

/// Local objective on the rotated pair subtensor.
struct LocalObjective {
    sub: SymTensor,
    kept_second: bool,
}

impl LocalObjective {
    fn frames(theta: f64) -> ([f64; 2], [f64; 2]) {
        let (s, c) = theta.sin_cos();
        ([c, s], [-s, c])
    }

    fn value(&self, theta: f64) -> f64 {
        let (g0, g1) = Self::frames(theta);
        let t0 = self.sub.eval_form(&g0);
        let mut h = t0 * t0;
        if self.kept_second {
            let t1 = self.sub.eval_form(&g1);
            h += t1 * t1;
        }
        h
    }

    /// `h′(θ) = −2Λ_{ij}` at the rotated state.
    fn slope(&self, theta: f64) -> f64 {
        let d = self.sub.order();
        let (g0, g1) = Self::frames(theta);
        let v0 = self.sub.contract_vector(&g0, d - 1);
        let t0 = v0[0] * g0[0] + v0[1] * g0[1];
        let mut acc = t0 * (v0[0] * g1[0] + v0[1] * g1[1]);
        if self.kept_second {
            let v1 = self.sub.contract_vector(&g1, d - 1);
            let t1 = v1[0] * g1[0] + v1[1] * g1[1];
            acc -= t1 * (v1[0] * g0[0] + v1[1] * g0[1]);
        }
        2.0 * d as f64 * acc
    }
}

/// Any order: 1024-point sampling of `h` over one period, then golden-section
/// and safeguarded Newton refinement on `h′` around every sampled local
/// maximum. Kept pairs use period `π/2`, kept/discarded pairs period `π`.
pub fn solve_generic(w: &SymTensor, pair: PairClass) -> Result<RotationSolution> {
    check_plane(w.dim(), pair.i, pair.j)?;
    let local = LocalObjective {
        sub: w.pair_subtensor(pair.i, pair.j),
        kept_second: pair.class == PairKind::C1,
    };
    let period = match pair.class {
        PairKind::C1 => FRAC_PI_2,
        PairKind::C2 => PI,
    };
    let h0 = local.value(0.0);
    let step = period / GENERIC_GRID as f64;
    let lo = -0.5 * period;
    let samples: Vec<f64> = (0..GENERIC_GRID).map(|k| local.value(lo + k as f64 * step)).collect();

    let mut xs = Vec::new();
    for k in 0..GENERIC_GRID {
        let prev = samples[(k + GENERIC_GRID - 1) % GENERIC_GRID];
        let next = samples[(k + 1) % GENERIC_GRID];
        if samples[k] >= prev && samples[k] >= next && samples[k] > h0 {
            let centre = lo + k as f64 * step;
            let theta = refine_max(&local, centre - step, centre + step);
            let wrapped = wrap(theta, period);
            xs.push(if (wrapped.abs() - FRAC_PI_2).abs() < 1e-15 {
                f64::INFINITY
            } else {
                wrapped.tan()
            });
        }
    }
    xs.push(0.0);
    let candidates: Vec<Candidate> = xs
        .into_iter()
        .map(|x| Candidate {
            x,
            gain: if x == 0.0 { 0.0 } else { local.value(theta_of(x)) - h0 },
        })
        .collect();
    let best = choose(&candidates, local.slope(0.0));
    let chosen = candidates[best];
    Ok(RotationSolution {
        theta_star: chosen.theta(),
        x_star: chosen.x,
        gain: chosen.gain,
        candidates,
        solver_kind: SolverKind::Generic,
    })
}

fn wrap(theta: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    let mut t = (theta + half).rem_euclid(period) - half;
    // keep the closed end of the window at +half
    if (t + half).abs() < 1e-15 {
        t = half;
    }
    t
}

fn refine_max(local: &LocalObjective, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (local.value(x1), local.value(x2));
    while b - a > 1e-9 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = local.value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = local.value(x1);
        }
    }
    let (lo, hi) = (a - 1e-6, b + 1e-6);
    let mut theta = 0.5 * (a + b);
    let fd = 1e-6;
    for _ in 0..50 {
        let g = local.slope(theta);
        let curvature = (local.slope(theta + fd) - local.slope(theta - fd)) / (2.0 * fd);
        if curvature >= 0.0 || !curvature.is_finite() {
            break;
        }
        let delta = -g / curvature;
        let next = theta + delta;
        if !(lo..=hi).contains(&next) {
            break;
        }
        theta = next;
        if delta.abs() <= 1e-14 {
            break;
        }
    }
    theta
}

/// Serde helper for extended reals: finite values as numbers, `±∞` as
/// the strings `"inf"` / `"-inf"`.
pub mod ext_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Str(s) => Err(de::Error::custom(format!("invalid extended real {s:?}"))),
        }
    }
}

/// `|θ| ≤ π/4` for kept-pair solutions.
pub const C1_WINDOW: f64 = FRAC_PI_4;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{contract_all, random_symmetric};

    fn sub3(e: [f64; 4]) -> SymTensor {
        let mut t = SymTensor::zeros(3, 2);
        t.set_orbit(&[0, 0, 0], e[0]).unwrap();
        t.set_orbit(&[0, 0, 1], e[1]).unwrap();
        t.set_orbit(&[0, 1, 1], e[2]).unwrap();
        t.set_orbit(&[1, 1, 1], e[3]).unwrap();
        t
    }

    fn sub4(e: [f64; 5]) -> SymTensor {
        let mut t = SymTensor::zeros(4, 2);
        t.set_orbit(&[0, 0, 0, 0], e[0]).unwrap();
        t.set_orbit(&[0, 0, 0, 1], e[1]).unwrap();
        t.set_orbit(&[0, 0, 1, 1], e[2]).unwrap();
        t.set_orbit(&[0, 1, 1, 1], e[3]).unwrap();
        t.set_orbit(&[1, 1, 1, 1], e[4]).unwrap();
        t
    }

    #[test]
    fn givens_basics() {
        let g0 = givens(4, 1, 3, 0.0).unwrap();
        assert_eq!(g0, OrthoMatrix::identity(4));
        let g = givens(4, 0, 2, 0.7).unwrap();
        let ginv = givens(4, 0, 2, -0.7).unwrap();
        assert!((g.mul(&ginv).matrix() - DMatrix::<f64>::identity(4, 4)).norm() < 1e-15);
        let q = givens(3, 0, 1, FRAC_PI_2).unwrap();
        assert!(q.residual() < 1e-15);
        assert!((q.matrix().determinant() - 1.0).abs() < 1e-15);
        // first column rotates onto e₂
        assert!((q.matrix()[(1, 0)] - 1.0).abs() < 1e-15);
        assert!(givens(3, 1, 1, 0.1).is_err());
        assert!(givens(3, 0, 3, 0.1).is_err());
    }

    #[test]
    fn apply_givens_matches_full_contraction() {
        for seed in 0..10 {
            let w = random_symmetric(3 + (seed % 2) as usize, 5, seed);
            let theta = 0.3 * seed as f64 - 1.1;
            let fast = apply_givens(&w, 1, 3, theta).unwrap();
            let full = contract_all(&w, &givens(5, 1, 3, theta).unwrap()).unwrap();
            for (x, y) in fast.data().iter().zip(full.data()) {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn apply_givens_leaves_disjoint_entries_untouched() {
        let w = random_symmetric(3, 5, 3);
        let r = apply_givens(&w, 0, 2, 0.9).unwrap();
        for lin in 0..w.data().len() {
            let idx = crate::tensor::multi_index(lin, 3, 5);
            if !idx.iter().any(|&k| k == 0 || k == 2) {
                assert_eq!(r.data()[lin].to_bits(), w.data()[lin].to_bits());
            }
        }
        assert_eq!(apply_givens(&w, 0, 2, 0.0).unwrap(), w);
    }

    #[test]
    fn c1_order3_diagonal_input_stays_put() {
        let sol = solve_c1_order3(&sub3([1.0, 0.0, 0.0, 0.6])).unwrap();
        assert_eq!(sol.x_star, 0.0);
        assert_eq!(sol.gain, 0.0);
        assert_eq!(sol.solver_kind, SolverKind::C1Order3);
    }

    fn grid_max(t: &SymTensor, kept_second: bool, period: f64) -> f64 {
        let local = LocalObjective {
            sub: t.clone(),
            kept_second,
        };
        let h0 = local.value(0.0);
        (0..200_000)
            .map(|k| local.value(-0.5 * period + period * k as f64 / 200_000.0) - h0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn c1_order3_matches_dense_grid() {
        let t = sub3([1.0, 0.0, 0.5, 1.0]);
        let sol = solve_c1_order3(&t).unwrap();
        let best = grid_max(&t, true, FRAC_PI_2);
        assert!(best > 0.1);
        assert!(
            sol.gain >= best - 1e-9 && sol.gain <= best + 1e-9,
            "{} vs {best}",
            sol.gain
        );
        assert!(sol.theta_star.abs() <= FRAC_PI_4 + 1e-15);
    }

    #[test]
    fn c2_order3_fixed_and_swap_cases() {
        let sol = solve_c2_order3(&sub3([1.0, 0.0, 0.0, 0.5])).unwrap();
        assert_eq!(sol.gain, 0.0);
        assert_eq!(sol.x_star, 0.0);
        let swap = solve_c2_order3(&sub3([0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(swap.x_star.is_infinite());
        assert_eq!(swap.theta_star, FRAC_PI_2);
        assert!((swap.gain - 1.0).abs() < 1e-15);
    }

    #[test]
    fn c1_order4_symmetric_cases() {
        let sol = solve_c1_order4(&sub4([1.0, 0.0, 0.0, 0.0, 0.3])).unwrap();
        assert_eq!(sol.x_star, 0.0);
        assert_eq!(sol.gain, 0.0);
        // swap-symmetric input: τ is even, optimum at 0 or ±1
        let sol = solve_c1_order4(&sub4([0.4, 0.0, 0.7, 0.0, 0.4])).unwrap();
        assert!(
            sol.x_star == 0.0 || (sol.x_star.abs() - 1.0).abs() < 1e-12,
            "{}",
            sol.x_star
        );
    }

    #[test]
    fn c2_order4_cases() {
        let sol = solve_c2_order4(&sub4([1.0, 0.0, 0.1, 0.2, 0.3])).unwrap();
        assert!(sol.candidates.iter().any(|c| c.x == 0.0));
        let swap = solve_c2_order4(&sub4([0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(swap.x_star.is_infinite());
        assert!((swap.gain - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_zero_is_a_root_when_constant_term_vanishes() {
        let t = sub4([0.7, 0.0, -0.2, 0.5, 0.1]);
        let [_, w1113, ..] = entries4(&t);
        assert_eq!(w1113, 0.0);
        let quartic_at_zero = -w1113;
        assert_eq!(quartic_at_zero, 0.0);
        let t3 = sub3([0.7, 0.0, -0.2, 0.5]);
        let cubic_const = entries3(&t3)[1];
        assert_eq!(cubic_const, 0.0);
    }

    #[test]
    fn solvers_reject_wrong_shapes() {
        let t = random_symmetric(3, 3, 0);
        assert!(solve_c1_order3(&t).is_err());
        assert!(solve_c1_order4(&sub3([1.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn generic_constant_objective_returns_zero() {
        // x₁³ + x₂³ is not isotropic, but a zero tensor is
        let z = SymTensor::zeros(5, 3);
        let sol = solve_generic(&z, PairClass::new(0, 1, 3, 2).unwrap()).unwrap();
        assert_eq!(sol.theta_star, 0.0);
        assert_eq!(sol.gain, 0.0);
    }

    #[test]
    fn generic_agrees_with_closed_forms() {
        for seed in 0..20u64 {
            for order in [3usize, 4] {
                let w = random_symmetric(order, 4, 1000 + seed);
                for pair in [PairClass::new(0, 1, 4, 2).unwrap(), PairClass::new(1, 3, 4, 2).unwrap()] {
                    let exact = solve_pair(&w, pair).unwrap();
                    let generic = solve_generic(&w, pair).unwrap();
                    assert!(
                        (exact.gain - generic.gain).abs() <= 1e-10,
                        "order {order} seed {seed} {:?}: {} vs {}",
                        pair.class,
                        exact.gain,
                        generic.gain
                    );
                }
            }
        }
    }

    #[test]
    fn pair_class_rules() {
        assert_eq!(PairClass::new(0, 1, 4, 2).unwrap().class, PairKind::C1);
        assert_eq!(PairClass::new(1, 2, 4, 2).unwrap().class, PairKind::C2);
        assert!(PairClass::new(2, 3, 4, 2).is_err());
        assert!(PairClass::new(1, 0, 4, 2).is_err());
    }

    #[test]
    fn ext_real_round_trip() {
        let c = Candidate {
            x: f64::INFINITY,
            gain: 1.0,
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"x":"inf","gain":1.0}"#);
        let back: Candidate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
