//! Dense symmetric tensors and the orthonormal frames that act on them.
//!
//! A [`SymTensor`] of order `d` and dimension `n` stores all `n^d` entries in
//! row-major order. Symmetry is enforced on construction by averaging every
//! index orbit, so the dense kernels never have to reason about orbits.
//!
//! Indices are zero-based throughout the library. File formats use one-based
//! indices (see [`crate::io`]).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetry residual tolerated on internally produced tensors.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative symmetry residual accepted (and repaired) when ingesting data.
pub const INGEST_SYMMETRY_TOL: f64 = 1e-8;
/// Orthonormality residual `‖MᵀM − I‖_F` accepted for frames.
pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(order: usize, dim: usize) -> Self {
        Self {
            order,
            dim,
            data: vec![0.0; dim.pow(order as u32)],
        }
    }

    /// Projects `raw` onto the symmetric subspace by averaging each orbit.
    pub fn symmetrize(raw: &[f64], order: usize, dim: usize) -> Result<Self> {
        check_shape(raw.len(), order, dim)?;
        let (means, canon) = orbit_means(raw, order, dim);
        let data = canon.iter().map(|&c| means[c]).collect();
        Ok(Self { order, dim, data })
    }

    /// Accepts `raw` if it is symmetric up to `rel_tol` (relative to the
    /// largest entry) and returns its symmetrization. Otherwise reports the
    /// orbit with the largest deviation.
    pub fn from_dense_checked(raw: &[f64], order: usize, dim: usize, rel_tol: f64) -> Result<Self> {
        check_shape(raw.len(), order, dim)?;
        let (means, canon) = orbit_means(raw, order, dim);
        let scale = raw.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst = (0.0f64, 0usize);
        for (lin, &c) in canon.iter().enumerate() {
            let dev = (raw[lin] - means[c]).abs();
            if dev > worst.0 {
                worst = (dev, lin);
            }
        }
        if worst.0 > rel_tol * scale {
            let mut orbit = multi_index(canon[worst.1], order, dim);
            orbit.sort_unstable();
            return Err(Error::NotSymmetric {
                orbit,
                deviation: worst.0,
                tolerance: rel_tol * scale,
            });
        }
        let data = canon.iter().map(|&c| means[c]).collect();
        Ok(Self { order, dim, data })
    }

    /// Builds a tensor from orbit representatives; unlisted orbits are zero.
    pub fn from_orbits<'a, I>(order: usize, dim: usize, orbits: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], f64)>,
    {
        let mut t = Self::zeros(order, dim);
        for (index, value) in orbits {
            t.set_orbit(index, value)?;
        }
        Ok(t)
    }

    /// Writes `value` to every permutation of `index`.
    pub fn set_orbit(&mut self, index: &[usize], value: f64) -> Result<()> {
        if index.len() != self.order {
            return Err(Error::Shape(format!(
                "orbit index has {} entries, tensor order is {}",
                index.len(),
                self.order
            )));
        }
        if let Some(&bad) = index.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        let mut perm = index.to_vec();
        perm.sort_unstable();
        loop {
            let lin = self.linear(&perm);
            self.data[lin] = value;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn linear(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    #[inline]
    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.linear(index)]
    }

    /// Diagonal entry `T_{i…i}`.
    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        let step: usize = (0..self.order).fold(0, |acc, _| acc * self.dim + 1);
        self.data[i * step]
    }

    /// Entry `T_{j i…i}`: one index `j`, the remaining `d − 1` equal to `i`.
    #[inline]
    pub fn one_off(&self, j: usize, i: usize) -> f64 {
        let mut lin = j;
        for _ in 1..self.order {
            lin = lin * self.dim + i;
        }
        self.data[lin]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute deviation between an entry and any of its permutations.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut idx = vec![0usize; self.order];
        for lin in 0..self.data.len() {
            decode_into(lin, self.dim, &mut idx);
            let mut perm = idx.clone();
            perm.sort_unstable();
            loop {
                worst = worst.max((self.data[lin] - self.get(&perm)).abs());
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
        worst
    }

    /// `A(M) = A ×₁ Mᵀ ×₂ ⋯ ×_d Mᵀ` for an `n × m` matrix `M`; the result has
    /// dimension `m`. Contracts one mode at a time.
    pub fn contract(&self, m: &DMatrix<f64>) -> Result<SymTensor> {
        if m.nrows() != self.dim {
            return Err(Error::Shape(format!(
                "frame has {} rows, tensor dimension is {}",
                m.nrows(),
                self.dim
            )));
        }
        let mut dims = vec![self.dim; self.order];
        let mut data = self.data.clone();
        for mode in 0..self.order {
            data = mode_product(&data, &dims, mode, m);
            dims[mode] = m.ncols();
        }
        Ok(SymTensor {
            order: self.order,
            dim: m.ncols(),
            data,
        })
    }

    /// The subtensor obtained by letting every index range over `indices` only.
    pub fn subtensor(&self, indices: &[usize]) -> Result<SymTensor> {
        if indices.is_empty() {
            return Err(Error::Shape("empty index set".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&k| k >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Shape(format!(
                "subtensor indices must be strictly increasing, got {indices:?}"
            )));
        }
        Ok(self.subtensor_unchecked(indices))
    }

    pub(crate) fn subtensor_unchecked(&self, indices: &[usize]) -> SymTensor {
        let m = indices.len();
        let mut out = SymTensor::zeros(self.order, m);
        let mut idx = vec![0usize; self.order];
        for lin in 0..out.data.len() {
            decode_into(lin, m, &mut idx);
            let src = idx.iter().fold(0, |acc, &j| acc * self.dim + indices[j]);
            out.data[lin] = self.data[src];
        }
        out
    }

    /// Two-index subtensor on `{i, j}` relabeled so that `i ↦ 0`, `j ↦ 1`.
    /// Unlike [`subtensor`](Self::subtensor) the pair need not be increasing.
    pub(crate) fn pair_subtensor(&self, i: usize, j: usize) -> SymTensor {
        self.subtensor_unchecked(&[i, j])
    }

    pub fn scale(&self, factor: f64) -> SymTensor {
        SymTensor {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `⟨A, u^{⊗d}⟩`.
    pub fn eval_form(&self, u: &[f64]) -> f64 {
        let v = self.contract_vector(u, self.order - 1);
        v.iter().zip(u).map(|(a, b)| a * b).sum()
    }

    /// Contracts the last `times` modes with `u`, returning the flattened
    /// remaining tensor. With `times = d − 1` this is the vector `A·u^{d−1}`.
    pub fn contract_vector(&self, u: &[f64], times: usize) -> Vec<f64> {
        assert_eq!(u.len(), self.dim);
        let mut cur = self.data.clone();
        for _ in 0..times {
            cur = cur
                .chunks_exact(self.dim)
                .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum())
                .collect();
        }
        cur
    }

    /// Dense tensor power `u^{⊗d}` scaled by `weight`, added into `self`.
    pub(crate) fn add_power(&mut self, u: &[f64], weight: f64) {
        let mut idx = vec![0usize; self.order];
        for lin in 0..self.data.len() {
            decode_into(lin, self.dim, &mut idx);
            let prod: f64 = idx.iter().map(|&k| u[k]).product();
            self.data[lin] += weight * prod;
        }
    }

    pub fn sub(&self, other: &SymTensor) -> Result<SymTensor> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::Shape("tensor shapes differ".into()));
        }
        Ok(SymTensor {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

/// `A(M)` for an orthogonal or Stiefel frame.
pub fn contract_all<M: AsRef<DMatrix<f64>>>(a: &SymTensor, m: &M) -> Result<SymTensor> {
    a.contract(m.as_ref())
}

/// Distribution of the raw entries before symmetrization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDistribution {
    /// Standard normal.
    #[default]
    Gaussian,
    /// Uniform on `[0, 1)`.
    Uniform,
}

impl std::str::FromStr for EntryDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "uniform" => Ok(Self::Uniform),
            _ => Err(Error::Config(format!("unknown entry distribution {s:?}"))),
        }
    }
}

/// I.i.d. standard normal entries followed by symmetrization.
pub fn random_symmetric(order: usize, dim: usize, seed: u64) -> SymTensor {
    random_symmetric_from(order, dim, seed, EntryDistribution::Gaussian)
}

pub fn random_symmetric_from(order: usize, dim: usize, seed: u64, dist: EntryDistribution) -> SymTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_symmetric_with(order, dim, dist, &mut rng)
}

pub fn random_symmetric_with<R: rand::Rng + ?Sized>(
    order: usize,
    dim: usize,
    dist: EntryDistribution,
    rng: &mut R,
) -> SymTensor {
    let raw: Vec<f64> = (0..dim.pow(order as u32))
        .map(|_| match dist {
            EntryDistribution::Gaussian => StandardNormal.sample(rng),
            EntryDistribution::Uniform => rng.random::<f64>(),
        })
        .collect();
    SymTensor::symmetrize(&raw, order, dim).expect("length matches by construction")
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMatrix(DMatrix<f64>);

impl OrthoMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "{}×{} matrix is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let residual = orthonormality_residual(&m);
        if residual > ORTHO_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn mul(&self, other: &OrthoMatrix) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn residual(&self) -> f64 {
        orthonormality_residual(&self.0)
    }

    /// The first `p` columns.
    pub fn leading(&self, p: usize) -> StiefelMatrix {
        StiefelMatrix(self.0.columns(0, p).into_owned())
    }

    /// Seeded Haar-distributed orthogonal matrix: QR of a Gaussian matrix
    /// with the signs of `R`'s diagonal moved into `Q`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for k in 0..n {
            if r[(k, k)] < 0.0 {
                q.column_mut(k).neg_mut();
            }
        }
        Self(q)
    }
}

impl AsRef<DMatrix<f64>> for OrthoMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StiefelMatrix(DMatrix<f64>);

impl StiefelMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.ncols() > m.nrows() {
            return Err(Error::Shape(format!(
                "Stiefel frame must have p ≤ n, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let residual = orthonormality_residual(&m);
        if residual > ORTHO_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn residual(&self) -> f64 {
        orthonormality_residual(&self.0)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.0.column(k).iter().copied().collect()
    }

    /// Completes the frame to a square orthogonal matrix `[X, Y]`.
    pub fn complete(&self) -> OrthoMatrix {
        let (n, p) = self.0.shape();
        let mut m = DMatrix::zeros(n, n);
        m.columns_mut(0, p).copy_from(&self.0);
        let mut filled = p;
        for e in 0..n {
            if filled == n {
                break;
            }
            let mut v = nalgebra::DVector::zeros(n);
            v[e] = 1.0;
            // two passes of Gram-Schmidt
            for _ in 0..2 {
                for k in 0..filled {
                    let c = m.column(k).dot(&v);
                    v.axpy(-c, &m.column(k), 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                m.column_mut(filled).copy_from(&(v / norm));
                filled += 1;
            }
        }
        OrthoMatrix(m)
    }
}

impl AsRef<DMatrix<f64>> for StiefelMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

pub fn orthonormality_residual(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    (gram - DMatrix::identity(m.ncols(), m.ncols())).norm()
}

/// Orthogonal factor of the polar decomposition, `U Vᵀ` from a thin SVD.
/// The second value is the ratio of smallest to largest singular value.
pub fn polar_factor(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    (u * v_t, ratio)
}

fn check_shape(len: usize, order: usize, dim: usize) -> Result<()> {
    if order < 2 || dim < 1 {
        return Err(Error::Shape(format!(
            "order {order} and dimension {dim} are not supported"
        )));
    }
    let expected = dim
        .checked_pow(order as u32)
        .ok_or_else(|| Error::Shape("tensor too large".into()))?;
    if len != expected {
        return Err(Error::Shape(format!(
            "expected {expected} entries for order {order}, dimension {dim}; got {len}"
        )));
    }
    Ok(())
}

/// Per-orbit means and the canonical (sorted) linear index of each entry's
/// orbit. Deviations from the canonical entry are averaged, so already
/// symmetric input is reproduced bit for bit.
fn orbit_means(raw: &[f64], order: usize, dim: usize) -> (Vec<f64>, Vec<usize>) {
    let mut sums = vec![0.0; raw.len()];
    let mut counts = vec![0u32; raw.len()];
    let mut canon = vec![0usize; raw.len()];
    let mut idx = vec![0usize; order];
    for (lin, &v) in raw.iter().enumerate() {
        decode_into(lin, dim, &mut idx);
        idx.sort_unstable();
        let c = idx.iter().fold(0, |acc, &i| acc * dim + i);
        canon[lin] = c;
        sums[c] += v - raw[c];
        counts[c] += 1;
    }
    for c in 0..raw.len() {
        if counts[c] > 0 {
            sums[c] = raw[c] + sums[c] / counts[c] as f64;
        }
    }
    (sums, canon)
}

pub(crate) fn decode_into(mut lin: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = lin % dim;
        lin /= dim;
    }
}

pub(crate) fn multi_index(lin: usize, order: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; order];
    decode_into(lin, dim, &mut idx);
    idx
}

/// Lexicographic next permutation; false when `v` was the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `out[…, a, …] = Σ_b in[…, b, …] M[b, a]` along `mode`.
fn mode_product(data: &[f64], dims: &[usize], mode: usize, m: &DMatrix<f64>) -> Vec<f64> {
    let n_in = dims[mode];
    let n_out = m.ncols();
    let outer: usize = dims[..mode].iter().product();
    let inner: usize = dims[mode + 1..].iter().product();
    let mut out = vec![0.0; outer * n_out * inner];
    for o in 0..outer {
        let src = &data[o * n_in * inner..(o + 1) * n_in * inner];
        let dst = &mut out[o * n_out * inner..(o + 1) * n_out * inner];
        for b in 0..n_in {
            let row = &src[b * inner..(b + 1) * inner];
            for a in 0..n_out {
                let coef = m[(b, a)];
                if coef == 0.0 {
                    continue;
                }
                let target = &mut dst[a * inner..(a + 1) * inner];
                for (t, s) in target.iter_mut().zip(row) {
                    *t += coef * s;
                }
            }
        }
    }
    out
}
