//! Dense unit-norm frame substrate: storage, Gram matrix, spectral norm.
//!
//! A frame is an M×N complex matrix whose columns (the frame elements) all
//! have Euclidean norm 1. Storage is column-major because every algorithm in
//! this crate walks columns. Inner products conjugate the FIRST argument,
//! so `gram` is literally F*F and the recovery proxy is literally F*y.

use num_complex::Complex64;

use crate::constructions::ConstructionDescriptor;
use crate::error::{FrameError, Result};

/// Column-norm admission tolerance: |norm - 1| must not exceed this.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// Norms at or below this are treated as zero columns.
pub const ZERO_COL_TOL: f64 = 1e-14;

const POWER_ITER_CAP: usize = 10_000;
const POWER_ITER_REL_TOL: f64 = 1e-12;
const EIGEN_FALLBACK_MAX_DIM: usize = 64;

/// Inner product ⟨a, b⟩ = Σ conj(a_i)·b_i (conjugate-linear in `a`).
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// An M×N unit-norm frame with optional construction metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    m: usize,
    n: usize,
    /// Column-major entries: element (i, j) lives at `data[i + j*m]`.
    data: Vec<Complex64>,
    real_flag: bool,
    meta: Option<ConstructionDescriptor>,
}

impl Frame {
    /// Admits a column-major entry grid as a frame.
    ///
    /// Rejects empty dimensions, wrong-length data, non-finite entries, and
    /// columns whose norm strays from 1 by more than [`UNIT_NORM_TOL`].
    /// Data that is not yet normalized belongs in [`normalize_columns`].
    pub fn new(m: usize, n: usize, data: Vec<Complex64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(FrameError::Domain(format!("frame dimensions must be positive, got {m}x{n}")));
        }
        if data.len() != m * n {
            return Err(FrameError::Mismatch(format!(
                "data length {} does not match {m}x{n}",
                data.len()
            )));
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(FrameError::Domain(format!(
                    "non-finite entry at flat index {idx}: {z}"
                )));
            }
        }
        for j in 0..n {
            let norm = norm_sq(&data[j * m..(j + 1) * m]).sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(FrameError::Domain(format!(
                    "column {j} has norm {norm}, outside 1 ± {UNIT_NORM_TOL}"
                )));
            }
        }
        let real_flag = data.iter().all(|z| z.im == 0.0);
        Ok(Self { m, n, data, real_flag, meta: None })
    }

    /// Skips unit-norm admission so tests can fabricate broken inputs.
    #[cfg(test)]
    pub(crate) fn new_unchecked_for_tests(m: usize, n: usize, data: Vec<Complex64>) -> Self {
        let real_flag = data.iter().all(|z| z.im == 0.0);
        Self { m, n, data, real_flag, meta: None }
    }

    /// Attaches a construction descriptor (builder-style).
    pub fn with_meta(mut self, meta: ConstructionDescriptor) -> Self {
        self.meta = Some(meta);
        self
    }

    /// Number of rows (ambient dimension M).
    pub fn rows(&self) -> usize {
        self.m
    }

    /// Number of columns (frame elements N).
    pub fn cols(&self) -> usize {
        self.n
    }

    /// True iff every stored entry has imaginary part exactly zero.
    pub fn is_real(&self) -> bool {
        self.real_flag
    }

    /// Construction metadata, when the frame came from a named family.
    pub fn meta(&self) -> Option<&ConstructionDescriptor> {
        self.meta.as_ref()
    }

    /// Entry (i, j).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i + j * self.m]
    }

    /// Column `j` as a contiguous slice.
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    /// All entries, column-major.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Componentwise sum of all columns.
    pub fn column_sum(&self) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); self.m];
        for j in 0..self.n {
            for (si, &z) in s.iter_mut().zip(self.column(j)) {
                *si += z;
            }
        }
        s
    }

    /// Splits entries into planar (re, im) buffers, both column-major.
    pub(crate) fn planar(&self) -> (Vec<f64>, Vec<f64>) {
        let mut re = Vec::with_capacity(self.data.len());
        let mut im = Vec::with_capacity(self.data.len());
        for z in &self.data {
            re.push(z.re);
            im.push(z.im);
        }
        (re, im)
    }

    /// Applies the frame operator FF* to an M-vector.
    fn frame_operator_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        // u = F* v, one entry per column
        let mut w = vec![Complex64::new(0.0, 0.0); self.m];
        for j in 0..self.n {
            let col = self.column(j);
            let u_j = inner(col, v);
            for (wi, &c) in w.iter_mut().zip(col) {
                *wi += c * u_j;
            }
        }
        w
    }

    /// Largest singular value, by power iteration on FF*.
    ///
    /// Starts from the normalized all-ones vector (deterministic, no RNG),
    /// declares convergence when the eigenvalue estimate's relative change
    /// drops below 1e-12, and perturbs the first coordinate by 1e-3 once if
    /// 50 iterations pass without convergence (guards against a start vector
    /// orthogonal to the top eigenvector). Past the 10000-iteration cap,
    /// frames with M ≤ 64 fall back to a full Hermitian eigendecomposition;
    /// larger frames report non-convergence with the last estimate.
    pub fn spectral_norm(&self) -> Result<f64> {
        let m = self.m;
        let start = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
        let mut v = vec![start; m];
        let mut lambda_prev = f64::INFINITY;
        let mut perturbed = false;

        for iter in 0..POWER_ITER_CAP {
            if iter == 50 && !perturbed {
                perturbed = true;
                v[0] += Complex64::new(1e-3, 0.0);
                let s = norm_sq(&v).sqrt();
                for z in v.iter_mut() {
                    *z /= s;
                }
            }
            let w = self.frame_operator_apply(&v);
            let lambda = norm_sq(&w).sqrt();
            if lambda == 0.0 {
                // impossible for unit-norm columns; defensive
                return Ok(0.0);
            }
            if (lambda - lambda_prev).abs() <= POWER_ITER_REL_TOL * lambda {
                return Ok(lambda.sqrt());
            }
            lambda_prev = lambda;
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / lambda;
            }
        }

        if m <= EIGEN_FALLBACK_MAX_DIM {
            return Ok(self.spectral_norm_eigen());
        }
        Err(FrameError::NonConvergence { iterations: POWER_ITER_CAP, last: lambda_prev.sqrt() })
    }

    /// Full Hermitian eigendecomposition of FF*; O(M³), small M only.
    fn spectral_norm_eigen(&self) -> f64 {
        let mut a = nalgebra::DMatrix::<Complex64>::zeros(self.m, self.m);
        for j in 0..self.n {
            let col = self.column(j);
            for r in 0..self.m {
                for c in 0..self.m {
                    a[(r, c)] += col[r] * col[c].conj();
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(a);
        let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        top.max(0.0).sqrt()
    }

    /// ‖F‖₂² − N/M: zero (within tolerance) iff the frame is tight.
    pub fn tightness_defect(&self) -> Result<f64> {
        let s = self.spectral_norm()?;
        Ok(s * s - self.n as f64 / self.m as f64)
    }

    /// Full Gram matrix F*F; O(N²M) time and O(N²) memory.
    pub fn gram(&self) -> GramMatrix {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let g = inner(self.column(i), self.column(j));
                data[i * n + j] = g;
                data[j * n + i] = g.conj();
            }
        }
        GramMatrix { n, data }
    }
}

/// Scales each column of a raw grid to unit norm and admits it as a frame.
///
/// Errors with the offending index if any column's norm is at or below
/// [`ZERO_COL_TOL`]. Already-unit columns pass through unchanged.
pub fn normalize_columns(m: usize, n: usize, mut raw: Vec<Complex64>) -> Result<Frame> {
    if m == 0 || n == 0 {
        return Err(FrameError::Domain(format!("frame dimensions must be positive, got {m}x{n}")));
    }
    if raw.len() != m * n {
        return Err(FrameError::Mismatch(format!("data length {} does not match {m}x{n}", raw.len())));
    }
    for j in 0..n {
        let col = &mut raw[j * m..(j + 1) * m];
        let norm = norm_sq(col).sqrt();
        if !(norm > ZERO_COL_TOL) {
            return Err(FrameError::ZeroColumn { index: j });
        }
        if norm != 1.0 {
            for z in col.iter_mut() {
                *z /= norm;
            }
        }
    }
    Frame::new(m, n, raw)
}

/// Hermitian N×N matrix of all pairwise inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    /// Row-major entries.
    data: Vec<Complex64>,
}

impl GramMatrix {
    /// Matrix side length (number of frame elements).
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry (i, j) = ⟨f_i, f_j⟩.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Largest deviation |G[i,j] - conj(G[j,i])| over all pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }
}
