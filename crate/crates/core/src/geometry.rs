//! Cost functions and first-order geometry on `O(n)` and `St(p, n)`.
//!
//! Everything here is expressed through the working tensor `W = A(Q)`: the
//! objective is the sum of the first `p` squared diagonal entries, and the
//! Riemannian gradient `Q·Λ(Q)` is assembled from the pairwise statistics
//! `σ_{i,j}(W) = W_{i…i} W_{j i…i}` and `d_{i,j}(W) = σ_{i,j} − σ_{j,i}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{contract_all, OrthoMatrix, StiefelMatrix, SymTensor};

/// Threshold used by the (5.2)/(5.3)-style condition checks and by `ω`.
pub const CONDITION_THRESHOLD: f64 = 1e-4;
/// Tolerance on `A_iii A_iij − A_ijj A_jjj` when forming `γ_ij`.
pub const GAMMA_HYPOTHESIS_TOL: f64 = 1e-10;

/// `σ_{i,j}(A) = A_{i…i}·A_{j i…i}`.
pub fn sigma_ij(a: &SymTensor, i: usize, j: usize) -> Result<f64> {
    check_pair(a.dim(), i, j)?;
    Ok(sigma_raw(a, i, j))
}

/// `d_{i,j}(A) = σ_{i,j}(A) − σ_{j,i}(A)`.
pub fn d_ij(a: &SymTensor, i: usize, j: usize) -> Result<f64> {
    check_pair(a.dim(), i, j)?;
    Ok(d_raw(a, i, j))
}

#[inline]
pub(crate) fn sigma_raw(a: &SymTensor, i: usize, j: usize) -> f64 {
    a.diag(i) * a.one_off(j, i)
}

#[inline]
pub(crate) fn d_raw(a: &SymTensor, i: usize, j: usize) -> f64 {
    sigma_raw(a, i, j) - sigma_raw(a, j, i)
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    if i >= j {
        return Err(Error::Shape(format!("pair ({i}, {j}) must satisfy i < j")));
    }
    Ok(())
}

/// `Λ(Q)`: skew-symmetric, with the bottom-right `(n − p) × (n − p)` block zero.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientMatrix {
    pub lambda: DMatrix<f64>,
    pub order_factor: usize,
    pub p: usize,
}

impl GradientMatrix {
    /// `‖Λ‖_F`, which equals the norm of the Riemannian gradient `QΛ`.
    pub fn norm(&self) -> f64 {
        self.lambda.norm()
    }

    /// `h′(0) = −2Λ_{ij}` for a rotation in the plane `(i, j)`.
    pub fn slope(&self, i: usize, j: usize) -> f64 {
        -2.0 * self.lambda[(i, j)]
    }

    /// The admissible pair with the largest `|Λ_{ij}|`; ties go to the first
    /// pair in row-major order.
    pub fn argmax_pair(&self) -> Option<(usize, usize)> {
        let n = self.lambda.nrows();
        let mut best: Option<((usize, usize), f64)> = None;
        for i in 0..self.p.min(n) {
            for j in i + 1..n {
                let v = self.lambda[(i, j)].abs();
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some(((i, j), v));
                }
            }
        }
        best.map(|(pair, _)| pair)
    }
}

/// `Λ` computed directly from a working tensor `W = A(Q)`.
pub fn lambda_from_working(w: &SymTensor, p: usize) -> GradientMatrix {
    let n = w.dim();
    let d = w.order() as f64;
    let mut lambda = DMatrix::zeros(n, n);
    for i in 0..p.min(n) {
        for j in i + 1..n {
            let v = if j < p {
                d * d_raw(w, i, j)
            } else {
                d * sigma_raw(w, i, j)
            };
            lambda[(i, j)] = -v;
            lambda[(j, i)] = v;
        }
    }
    GradientMatrix {
        lambda,
        order_factor: w.order(),
        p,
    }
}

/// `‖Λ‖_F` from a working tensor without materializing `Λ`.
pub fn grad_norm_from_working(w: &SymTensor, p: usize) -> f64 {
    let n = w.dim();
    let d = w.order() as f64;
    let mut acc = 0.0;
    for i in 0..p.min(n) {
        for j in i + 1..n {
            let v = if j < p { d_raw(w, i, j) } else { sigma_raw(w, i, j) };
            acc += 2.0 * v * v;
        }
    }
    d * acc.sqrt()
}

pub fn lambda_matrix(a: &SymTensor, q: &OrthoMatrix, p: usize) -> Result<GradientMatrix> {
    check_rank(p, a.dim())?;
    let w = contract_all(a, q)?;
    Ok(lambda_from_working(&w, p))
}

/// `f(Q) = Σ_{i<p} W_{i…i}²`.
pub fn cost_f(a: &SymTensor, q: &OrthoMatrix, p: usize) -> Result<f64> {
    check_rank(p, a.dim())?;
    let w = contract_all(a, q)?;
    Ok(cost_from_working(&w, p))
}

pub fn cost_from_working(w: &SymTensor, p: usize) -> f64 {
    (0..p.min(w.dim())).map(|i| w.diag(i).powi(2)).sum()
}

/// `f̃(X) = Σ_{i<p} W̃_{i…i}²` with `W̃ = A(X)`.
pub fn cost_f_stiefel(a: &SymTensor, x: &StiefelMatrix) -> Result<f64> {
    let w = contract_all(a, x)?;
    Ok(cost_from_working(&w, x.cols()))
}

/// Euclidean gradient of `f̃` at any `n × p` matrix: column `k` is
/// `2d·σ_k·A·u_k^{d−1}` with `σ_k = ⟨A, u_k^{⊗d}⟩`.
pub fn euclidean_gradient(a: &SymTensor, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != a.dim() {
        return Err(Error::Shape(format!(
            "frame has {} rows, tensor dimension is {}",
            x.nrows(),
            a.dim()
        )));
    }
    let d = a.order() as f64;
    let mut g = DMatrix::zeros(x.nrows(), x.ncols());
    for k in 0..x.ncols() {
        let u: Vec<f64> = x.column(k).iter().copied().collect();
        let v = a.contract_vector(&u, a.order() - 1);
        let sigma: f64 = v.iter().zip(&u).map(|(p, q)| p * q).sum();
        for (r, vr) in v.iter().enumerate() {
            g[(r, k)] = 2.0 * d * sigma * vr;
        }
    }
    Ok(g)
}

/// Riemannian gradient of `f̃` on `St(p, n)`:
/// `(I − XXᵀ)∇f̃(X) + d·X·K` with `K_{ij} = −d_{i,j}(W̃)` above the diagonal.
pub fn stiefel_gradient(a: &SymTensor, x: &StiefelMatrix) -> Result<DMatrix<f64>> {
    let xm = x.matrix();
    let egrad = euclidean_gradient(a, xm)?;
    let w = contract_all(a, x)?;
    let p = x.cols();
    let k = skew_d_matrix(&w, p);
    let proj = &egrad - xm * (xm.transpose() * &egrad);
    Ok(proj + xm * k * (a.order() as f64))
}

/// The `p × p` skew matrix with `−d_{i,j}` above and `d_{i,j}` below the diagonal.
pub(crate) fn skew_d_matrix(w: &SymTensor, p: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i + 1..p {
            let v = d_raw(w, i, j);
            k[(i, j)] = -v;
            k[(j, i)] = v;
        }
    }
    k
}

fn check_rank(p: usize, n: usize) -> Result<()> {
    if p == 0 || p > n {
        return Err(Error::Config(format!("rank p = {p} must satisfy 1 ≤ p ≤ n = {n}")));
    }
    Ok(())
}

/// Value of the stationary diagonal ratio `γ_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum GammaValue {
    /// The whole `(i, j)` subtensor vanishes; `γ = 0`.
    ZeroSubtensor,
    /// Both diagonal entries vanish but an off-diagonal one does not.
    Infinite,
    Ratio(f64),
}

impl GammaValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            GammaValue::ZeroSubtensor => 0.0,
            GammaValue::Infinite => f64::INFINITY,
            GammaValue::Ratio(r) => r,
        }
    }
}

/// `γ_ij` for a third-order tensor, defined when
/// `A_iii A_iij = A_ijj A_jjj` holds within [`GAMMA_HYPOTHESIS_TOL`].
pub fn gamma_ij(a: &SymTensor, i: usize, j: usize) -> Result<GammaValue> {
    gamma_ij_with_tol(a, i, j, GAMMA_HYPOTHESIS_TOL)
}

pub fn gamma_ij_with_tol(a: &SymTensor, i: usize, j: usize, tol: f64) -> Result<GammaValue> {
    if a.order() != 3 {
        return Err(Error::Unsupported(format!(
            "stationary diagonal ratio is defined for order 3, got {}",
            a.order()
        )));
    }
    check_pair(a.dim(), i, j)?;
    let (aiii, ajjj) = (a.diag(i), a.diag(j));
    let aiij = a.get(&[i, i, j]);
    let aijj = a.get(&[i, j, j]);
    let residual = (aiii * aiij - aijj * ajjj).abs();
    if residual > tol {
        return Err(Error::Precondition {
            what: "A_iii·A_iij = A_ijj·A_jjj",
            residual,
        });
    }
    let diag_sq = aiii * aiii + ajjj * ajjj;
    let off_sq = aijj * aijj + aiij * aiij;
    if diag_sq <= tol * tol && off_sq <= tol * tol {
        return Ok(GammaValue::ZeroSubtensor);
    }
    if diag_sq <= tol * tol {
        return Ok(GammaValue::Infinite);
    }
    // proportional by hypothesis; least squares picks the common factor
    Ok(GammaValue::Ratio((aijj * aiii + aiij * ajjj) / diag_sq))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    /// One-based pair.
    pub pair: [usize; 2],
    pub gamma: GammaValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub grad_norm: f64,
    /// `min{|W₁₁₂|, |W₁₂₂|, |W₃₃₃|, …, |W_nnn|}`; only for order 3 and `p = 2`.
    pub omega: Option<f64>,
    pub gammas: Vec<GammaEntry>,
    #[serde(rename = "condition_52")]
    pub condition_52_ok: Option<bool>,
    #[serde(rename = "condition_53")]
    pub condition_53_ok: Option<bool>,
}

/// `ω` at the working tensor `W`. Requires order 3 and `p = 2`.
pub fn omega(w: &SymTensor, p: usize) -> Result<f64> {
    if p != 2 || w.order() != 3 || w.dim() < 2 {
        return Err(Error::Unsupported(format!(
            "ω is defined for order 3 and p = 2 (got order {}, p = {p})",
            w.order()
        )));
    }
    let mut m = w.get(&[0, 0, 1]).abs().min(w.get(&[0, 1, 1]).abs());
    for i in 2..w.dim() {
        m = m.min(w.diag(i).abs());
    }
    Ok(m)
}

pub fn diagnostics(a: &SymTensor, q: &OrthoMatrix, p: usize) -> Result<DiagnosticReport> {
    check_rank(p, a.dim())?;
    let w = contract_all(a, q)?;
    Ok(diagnostics_from_working(&w, p, CONDITION_THRESHOLD))
}

pub fn diagnostics_from_working(w: &SymTensor, p: usize, threshold: f64) -> DiagnosticReport {
    let grad_norm = lambda_from_working(w, p).norm();
    let mut gammas = Vec::new();
    if w.order() == 3 {
        for i in 0..p {
            for j in i + 1..p {
                if let Ok(gamma) = gamma_ij(w, i, j) {
                    gammas.push(GammaEntry {
                        pair: [i + 1, j + 1],
                        gamma,
                    });
                }
            }
        }
    }
    let (omega, c52, c53) = match omega(w, p) {
        Ok(om) => {
            let w112 = w.get(&[0, 0, 1]);
            let w122 = w.get(&[0, 1, 1]);
            let c52 = w112 * w112 + w122 * w122 > threshold;
            let c53 = (2..w.dim()).all(|i| w.diag(i).abs() > threshold);
            (Some(om), Some(c52), Some(c53))
        }
        Err(_) => (None, None, None),
    };
    DiagnosticReport {
        grad_norm,
        omega,
        gammas,
        condition_52_ok: c52,
        condition_53_ok: c53,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::kofidis_tensor;
    use crate::tensor::random_symmetric;

    fn diagonal(order: usize, values: &[f64]) -> SymTensor {
        let mut t = SymTensor::zeros(order, values.len());
        for (i, &v) in values.iter().enumerate() {
            t.set_orbit(&vec![i; order], v).unwrap();
        }
        t
    }

    #[test]
    fn sigma_and_d_vanish_on_diagonal_tensors() {
        let t = diagonal(3, &[1.0, -2.0, 0.5]);
        for i in 0..3 {
            for j in i + 1..3 {
                assert_eq!(sigma_ij(&t, i, j).unwrap(), 0.0);
                assert_eq!(d_ij(&t, i, j).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn sigma_direct_product() {
        let mut t = SymTensor::zeros(3, 2);
        t.set_orbit(&[0, 0, 0], 2.0).unwrap();
        t.set_orbit(&[1, 0, 0], 3.0).unwrap();
        assert_eq!(sigma_ij(&t, 0, 1).unwrap(), 6.0);
    }

    #[test]
    fn sigma_on_fixture() {
        let a = kofidis_tensor();
        let expected = 0.2883 * -0.0031;
        assert!((sigma_ij(&a, 0, 1).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn d_vanishes_under_index_swap_symmetry() {
        let mut t = SymTensor::zeros(3, 2);
        t.set_orbit(&[0, 0, 0], 1.3).unwrap();
        t.set_orbit(&[1, 1, 1], 1.3).unwrap();
        t.set_orbit(&[0, 0, 1], -0.4).unwrap();
        t.set_orbit(&[0, 1, 1], -0.4).unwrap();
        assert_eq!(d_ij(&t, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn d_matches_entry_arithmetic() {
        let t = random_symmetric(3, 2, 4);
        let expected = t.get(&[0, 0, 0]) * t.get(&[1, 0, 0]) - t.get(&[0, 1, 1]) * t.get(&[1, 1, 1]);
        assert!((d_ij(&t, 0, 1).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn pair_index_errors() {
        let t = random_symmetric(3, 3, 0);
        assert!(sigma_ij(&t, 1, 1).is_err());
        assert!(d_ij(&t, 0, 3).is_err());
    }

    #[test]
    fn lambda_vanishes_for_diagonal_working_tensor() {
        let t = diagonal(3, &[1.0, 2.0, 3.0]);
        let g = lambda_matrix(&t, &OrthoMatrix::identity(3), 3).unwrap();
        assert_eq!(g.norm(), 0.0);
    }

    #[test]
    fn lambda_rank_one_has_only_first_row_and_column() {
        let a = random_symmetric(3, 4, 8);
        let g = lambda_matrix(&a, &OrthoMatrix::identity(4), 1).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let v = g.lambda[(r, c)];
                if r != 0 && c != 0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
        for j in 1..4 {
            let expected = -3.0 * a.one_off(j, 0) * a.diag(0);
            assert!((g.lambda[(0, j)] - expected).abs() < 1e-14);
            assert_eq!(g.lambda[(j, 0)], -g.lambda[(0, j)]);
        }
    }

    #[test]
    fn lambda_entrywise_formula() {
        let a = random_symmetric(3, 3, 12);
        let g = lambda_matrix(&a, &OrthoMatrix::identity(3), 2).unwrap();
        let e = |i: usize, j: usize, k: usize| a.get(&[i, j, k]);
        // (0,1) is a kept pair: −3·d_{0,1}
        let d01 = e(0, 0, 0) * e(1, 0, 0) - e(0, 1, 1) * e(1, 1, 1);
        assert!((g.lambda[(0, 1)] + 3.0 * d01).abs() < 1e-14);
        // (0,2),(1,2) couple a kept and a discarded index: −3·σ
        assert!((g.lambda[(0, 2)] + 3.0 * e(0, 0, 0) * e(2, 0, 0)).abs() < 1e-14);
        assert!((g.lambda[(1, 2)] + 3.0 * e(1, 1, 1) * e(2, 1, 1)).abs() < 1e-14);
        assert_eq!(g.lambda[(2, 2)], 0.0);
        assert_eq!(&g.lambda + g.lambda.transpose(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn cost_on_fixture_identity() {
        let a = kofidis_tensor();
        let f = cost_f(&a, &OrthoMatrix::identity(3), 3).unwrap();
        assert!((f - 0.19178686).abs() < 1e-14);
        assert_eq!(
            cost_f(&SymTensor::zeros(3, 3), &OrthoMatrix::identity(3), 3).unwrap(),
            0.0
        );
    }

    #[test]
    fn cost_invariant_under_signed_permutations() {
        let a = random_symmetric(3, 3, 21);
        let q = OrthoMatrix::random(3, 5);
        let base = cost_f(&a, &q, 3).unwrap();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for perm in perms {
            for signs in 0..8u32 {
                let mut s = DMatrix::zeros(3, 3);
                for (c, &r) in perm.iter().enumerate() {
                    s[(r, c)] = if signs >> c & 1 == 1 { -1.0 } else { 1.0 };
                }
                let qs = OrthoMatrix::new(q.matrix() * s).unwrap();
                assert!((cost_f(&a, &qs, 3).unwrap() - base).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stiefel_cost_agrees_with_square_frame() {
        let a = random_symmetric(3, 5, 3);
        let q = OrthoMatrix::random(5, 9);
        for p in 1..=5 {
            let x = q.leading(p);
            let fs = cost_f_stiefel(&a, &x).unwrap();
            assert!((fs - cost_f(&a, &q, p).unwrap()).abs() < 1e-12);
        }
        let id = OrthoMatrix::identity(5);
        assert!((cost_f_stiefel(&a, &id.leading(2)).unwrap() - cost_f(&a, &id, 2).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn stiefel_cost_matches_brute_force() {
        let a = random_symmetric(3, 4, 30);
        let x = OrthoMatrix::random(4, 31).leading(2);
        let mut expected = 0.0;
        for k in 0..2 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        s += a.get(&[i, j, l]) * x.matrix()[(i, k)] * x.matrix()[(j, k)] * x.matrix()[(l, k)];
                    }
                }
            }
            expected += s * s;
        }
        assert!((cost_f_stiefel(&a, &x).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn stiefel_gradient_is_tangent_and_has_skew_projection() {
        let a = random_symmetric(4, 5, 17);
        let x = OrthoMatrix::random(5, 18).leading(3);
        let g = stiefel_gradient(&a, &x).unwrap();
        let xtg = x.matrix().transpose() * &g;
        assert!((&xtg + xtg.transpose()).norm() < 1e-12);
        let w = contract_all(&a, &x).unwrap();
        let expected = skew_d_matrix(&w, 3) * 4.0;
        assert!((xtg - expected).norm() < 1e-12);
    }

    #[test]
    fn stiefel_gradient_vanishes_on_diagonalizing_subspace() {
        let d = diagonal(3, &[3.0, -2.0, 1.0, 0.5]);
        let q0 = OrthoMatrix::random(4, 2);
        // A = D(Q0ᵀ) so that A(Q0) = D
        let a = contract_all(&d, &q0.transpose()).unwrap();
        let x = q0.leading(2);
        let g = stiefel_gradient(&a, &x).unwrap();
        assert!(g.norm() < 1e-12, "{}", g.norm());
    }

    #[test]
    fn stiefel_gradient_matches_finite_differences() {
        let a = random_symmetric(3, 5, 40);
        let x = OrthoMatrix::random(5, 41).leading(2);
        let g = stiefel_gradient(&a, &x).unwrap();
        let f = |m: &DMatrix<f64>| -> f64 {
            (0..m.ncols())
                .map(|k| {
                    let u: Vec<f64> = m.column(k).iter().copied().collect();
                    a.eval_form(&u).powi(2)
                })
                .sum()
        };
        let h = 1e-5;
        for seed in 0..5u64 {
            let raw = OrthoMatrix::random(5, 100 + seed).matrix().columns(0, 2).into_owned();
            let xm = x.matrix();
            // tangent projection: Z − X sym(XᵀZ)
            let xtz = xm.transpose() * &raw;
            let sym = (&xtz + xtz.transpose()) * 0.5;
            let z = &raw - xm * sym;
            let fd = (f(&(xm + &z * h)) - f(&(xm - &z * h))) / (2.0 * h);
            let exact = g.dot(&z);
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "fd {fd} exact {exact}"
            );
        }
    }

    #[test]
    fn gamma_cases() {
        let zero = SymTensor::zeros(3, 2);
        assert_eq!(gamma_ij(&zero, 0, 1).unwrap(), GammaValue::ZeroSubtensor);

        let mut t = SymTensor::zeros(3, 2);
        t.set_orbit(&[0, 0, 0], 2.0).unwrap();
        t.set_orbit(&[1, 1, 1], 4.0).unwrap();
        t.set_orbit(&[0, 1, 1], 1.0).unwrap();
        t.set_orbit(&[0, 0, 1], 2.0).unwrap();
        assert_eq!(gamma_ij(&t, 0, 1).unwrap(), GammaValue::Ratio(0.5));

        let mut inf = SymTensor::zeros(3, 2);
        inf.set_orbit(&[0, 1, 1], 1.0).unwrap();
        assert_eq!(gamma_ij(&inf, 0, 1).unwrap(), GammaValue::Infinite);

        let bad = random_symmetric(3, 2, 1);
        assert!(matches!(gamma_ij(&bad, 0, 1), Err(Error::Precondition { .. })));
        assert!(matches!(
            gamma_ij(&random_symmetric(4, 2, 1), 0, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn omega_and_conditions() {
        let t = diagonal(3, &[1.0, 2.0, 3.0]);
        let rep = diagnostics(&t, &OrthoMatrix::identity(3), 2).unwrap();
        assert_eq!(rep.omega, Some(0.0));
        assert_eq!(rep.condition_52_ok, Some(false));
        assert_eq!(rep.condition_53_ok, Some(true));

        let mut big = SymTensor::zeros(3, 4);
        big.set_orbit(&[0, 0, 1], 0.3).unwrap();
        big.set_orbit(&[0, 1, 1], -0.2).unwrap();
        big.set_orbit(&[2, 2, 2], 0.1).unwrap();
        big.set_orbit(&[3, 3, 3], -0.5).unwrap();
        let rep = diagnostics(&big, &OrthoMatrix::identity(4), 2).unwrap();
        assert!(rep.omega.unwrap() >= 0.1 - 1e-15);
        assert_eq!(rep.condition_52_ok, Some(true));
        assert_eq!(rep.condition_53_ok, Some(true));

        assert!(omega(&big, 3).is_err());
        let rep3 = diagnostics(&big, &OrthoMatrix::identity(4), 3).unwrap();
        assert_eq!(rep3.omega, None);
    }

    #[test]
    fn report_serializes_with_stable_names() {
        let rep = diagnostics(&kofidis_tensor(), &OrthoMatrix::identity(3), 2).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        for key in ["grad_norm", "omega", "gammas", "condition_52", "condition_53"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
