//! Coherence metrics, the Strong Coherence Property, sufficient conditions
//! for low average coherence, and lower bounds on worst-case coherence.
//!
//! All logarithms are natural. Bounds are reported raw (negative values mean
//! the bound is vacuous); the only clamp anywhere is the cosine argument in
//! [`lb_real`], which the formula itself confines to [0, π].

use num_complex::Complex64;

use crate::error::{FrameError, Result};
use crate::frame::{inner, Frame};

/// Slack used when comparing ν against μ/√M.
pub const SCP2_TOL: f64 = 1e-12;

/// Direct pair loop beyond this many flops switches to the blocked scan.
const DIRECT_SCAN_FLOP_LIMIT: usize = 200_000_000;

// ── metrics ──────────────────────────────────────────────────────────────

/// Worst-case coherence μ: the largest off-diagonal Gram modulus.
pub fn worst_case_coherence(frame: &Frame) -> Result<f64> {
    let (m, n) = (frame.rows(), frame.cols());
    if n < 2 {
        return Err(FrameError::Domain("worst-case coherence needs at least 2 columns".into()));
    }
    let max_sq = if n * n * m <= DIRECT_SCAN_FLOP_LIMIT {
        max_offdiag_sq_direct(frame)
    } else {
        max_offdiag_sq_blocked(frame)
    };
    Ok(max_sq.sqrt())
}

fn max_offdiag_sq_direct(frame: &Frame) -> f64 {
    let n = frame.cols();
    let mut worst = 0.0f64;
    for i in 0..n {
        let ci = frame.column(i);
        for j in (i + 1)..n {
            worst = worst.max(inner(ci, frame.column(j)).norm_sqr());
        }
    }
    worst
}

/// Gram scan in column blocks via four real matrix products on planar
/// re/im buffers. Same O(N²M) flop count as the direct loop but runs at
/// dense-matmul speed, which is what makes 1000×5000 frames affordable.
fn max_offdiag_sq_blocked(frame: &Frame) -> f64 {
    const BLOCK: usize = 256;
    let (m, n) = (frame.rows(), frame.cols());
    let (re, im) = frame.planar();
    let mut g_re = vec![0.0f64; n * BLOCK];
    let mut g_im = vec![0.0f64; n * BLOCK];
    let mut worst = 0.0f64;

    let mut j0 = 0;
    while j0 < n {
        let bw = BLOCK.min(n - j0);
        let rows = j0 + bw; // columns 0..rows paired against the block
        // G = A^H B with A = F[:, 0..rows], B = F[:, j0..j0+bw]:
        //   Re(G) =  Re(A)^T Re(B) + Im(A)^T Im(B)
        //   Im(G) =  Re(A)^T Im(B) - Im(A)^T Re(B)
        unsafe {
            let a_re = re.as_ptr();
            let a_im = im.as_ptr();
            let b_re = re.as_ptr().add(j0 * m);
            let b_im = im.as_ptr().add(j0 * m);
            let rsa = m as isize; // A viewed transposed: row stride = column stride of F
            let bwi = bw as isize;
            matrixmultiply::dgemm(rows, m, bw, 1.0, a_re, rsa, 1, b_re, 1, m as isize, 0.0, g_re.as_mut_ptr(), bwi, 1);
            matrixmultiply::dgemm(rows, m, bw, 1.0, a_im, rsa, 1, b_im, 1, m as isize, 1.0, g_re.as_mut_ptr(), bwi, 1);
            matrixmultiply::dgemm(rows, m, bw, 1.0, a_re, rsa, 1, b_im, 1, m as isize, 0.0, g_im.as_mut_ptr(), bwi, 1);
            matrixmultiply::dgemm(rows, m, bw, -1.0, a_im, rsa, 1, b_re, 1, m as isize, 1.0, g_im.as_mut_ptr(), bwi, 1);
        }
        for jj in 0..bw {
            let j = j0 + jj;
            for i in 0..j {
                let gr = g_re[i * bw + jj];
                let gi = g_im[i * bw + jj];
                worst = worst.max(gr * gr + gi * gi);
            }
        }
        j0 += bw;
    }
    worst
}

/// Average coherence ν: max over i of |Σ_{j≠i} ⟨f_i, f_j⟩| / (N−1).
///
/// Uses the column-sum identity Σ_{j≠i} ⟨f_i,f_j⟩ = ⟨f_i, s⟩ − 1 (unit
/// norms), which is O(MN) instead of a Gram scan. Tests cross-check this
/// against explicit Gram row sums.
pub fn average_coherence(frame: &Frame) -> Result<f64> {
    let n = frame.cols();
    if n < 2 {
        return Err(FrameError::Domain("average coherence needs at least 2 columns".into()));
    }
    let s = frame.column_sum();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row_sum = inner(frame.column(i), &s) - Complex64::new(1.0, 0.0);
        worst = worst.max(row_sum.norm());
    }
    Ok(worst / (n as f64 - 1.0))
}

// ── lower bounds ─────────────────────────────────────────────────────────

/// Welch bound √((N−M)/(M(N−1))): the floor for worst-case coherence;
/// attained exactly by equiangular tight frames.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m < 1 || n < m || n < 2 {
        return Err(FrameError::Domain(format!(
            "welch bound needs n ≥ m ≥ 1 and n ≥ 2, got m={m}, n={n}"
        )));
    }
    let (mf, nf) = (m as f64, n as f64);
    Ok(((nf - mf) / (mf * (nf - 1.0))).sqrt())
}

/// Coherence lower bound 1 − 2N^{−1/(M−1)} for complex frames.
/// May be negative (vacuous); reported raw.
pub fn lb_complex(m: usize, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(FrameError::Domain(format!("lb_complex needs m ≥ 2, got {m}")));
    }
    let nf = n as f64;
    Ok(1.0 - 2.0 * nf.powf(-1.0 / (m as f64 - 1.0)))
}

/// ln(Γ((m−1)/2) / Γ(m/2)) without evaluating Γ, which overflows near
/// m ≈ 350. Walks the recurrence Γ(x+1) = xΓ(x) in log space from the two
/// half-integer base cases.
fn ln_gamma_ratio(m: usize) -> f64 {
    debug_assert!(m >= 2);
    let half_ln_pi = 0.5 * std::f64::consts::PI.ln();
    let mut k = if m % 2 == 0 { 2 } else { 3 };
    // Γ(1/2)/Γ(1) = √π;  Γ(1)/Γ(3/2) = 2/√π
    let mut acc = if m % 2 == 0 { half_ln_pi } else { std::f64::consts::LN_2 - half_ln_pi };
    while k < m {
        k += 2;
        acc += ((k - 3) as f64 / (k - 2) as f64).ln();
    }
    acc
}

/// Coherence lower bound cos[π((M−1)/(N√π) · Γ((M−1)/2)/Γ(M/2))^{1/(M−1)}]
/// for real frames. The cos argument is clamped to [0, π]; the value itself
/// is reported raw (it can be negative for small N).
pub fn lb_real(m: usize, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(FrameError::Domain(format!("lb_real needs m ≥ 2, got {m}")));
    }
    let mf = m as f64;
    let nf = n as f64;
    let half_ln_pi = 0.5 * std::f64::consts::PI.ln();
    let ln_inner = (mf - 1.0).ln() - nf.ln() - half_ln_pi + ln_gamma_ratio(m);
    let arg = (std::f64::consts::PI * (ln_inner / (mf - 1.0)).exp()).clamp(0.0, std::f64::consts::PI);
    Ok(arg.cos())
}

/// Coherence lower bound 1 − 4/N + 2/N² for real frames in dimension 3.
pub fn lb_real_m3(n: usize) -> f64 {
    let nf = n as f64;
    1.0 - 4.0 / nf + 2.0 / (nf * nf)
}

/// One row of a [`BoundTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub welch: f64,
    pub lb_complex: f64,
    pub lb_real: f64,
    /// Populated only when the table dimension is 3.
    pub lb_real_m3: Option<f64>,
}

/// All applicable coherence lower bounds for one dimension, over a range
/// of frame sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub m: usize,
    pub rows: Vec<BoundRow>,
}

/// Evaluates every bound for n in `n_min..=n_max` at dimension `m`.
pub fn bound_table(m: usize, n_min: usize, n_max: usize) -> Result<BoundTable> {
    if n_min < m.max(2) {
        return Err(FrameError::Domain(format!(
            "bound table needs n_min ≥ max(m, 2), got m={m}, n_min={n_min}"
        )));
    }
    if n_max < n_min {
        return Err(FrameError::Domain(format!("empty range n_min={n_min} > n_max={n_max}")));
    }
    let mut rows = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        rows.push(BoundRow {
            n,
            welch: welch_bound(m, n)?,
            lb_complex: lb_complex(m, n)?,
            lb_real: lb_real(m, n)?,
            lb_real_m3: (m == 3).then(|| lb_real_m3(n)),
        });
    }
    Ok(BoundTable { m, rows })
}

// ── coherence properties ─────────────────────────────────────────────────

/// The three coherence-property predicates for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScpFlags {
    /// μ ≤ 1/(constant · ln N). Rarely holds at desk scale with 164.
    pub scp1: bool,
    /// μ ≤ 1/(15 √(ln N)): the weaker variant that suffices for Weak RIP.
    pub coherence_property: bool,
    /// ν ≤ μ/√M (+1e-12 slack).
    pub scp2: bool,
}

/// Evaluates SCP-1 (with an overridable constant), the 15√log-N coherence
/// property, and SCP-2 for `frame`.
pub fn scp_check(frame: &Frame, constant: f64) -> Result<ScpFlags> {
    let mu = worst_case_coherence(frame)?;
    let nu = average_coherence(frame)?;
    Ok(scp_flags_from_metrics(frame.rows(), frame.cols(), mu, nu, constant))
}

fn scp_flags_from_metrics(m: usize, n: usize, mu: f64, nu: f64, constant: f64) -> ScpFlags {
    let ln_n = (n as f64).ln();
    ScpFlags {
        scp1: mu <= 1.0 / (constant * ln_n),
        coherence_property: mu <= 1.0 / (15.0 * ln_n.sqrt()),
        scp2: nu <= mu / (m as f64).sqrt() + SCP2_TOL,
    }
}

/// The three structural conditions, each of which forces ν ≤ μ/√M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SufficientConditions {
    /// ⟨f_k, Σf_n⟩ = N/M for every k (within 1e-8).
    pub c1: bool,
    /// N ≥ 2M and the columns sum to (numerically) zero.
    pub c2: bool,
    /// N ≥ M²+3M+3 and ‖Σf_n‖² ≤ N.
    pub c3: bool,
}

impl SufficientConditions {
    pub fn any(&self) -> bool {
        self.c1 || self.c2 || self.c3
    }
}

/// Checks the three sufficient conditions on the column sum.
pub fn sufficient_conditions(frame: &Frame) -> SufficientConditions {
    let (m, n) = (frame.rows(), frame.cols());
    let s = frame.column_sum();
    let target = Complex64::new(n as f64 / m as f64, 0.0);
    let c1 = (0..n).all(|k| (inner(frame.column(k), &s) - target).norm() <= 1e-8);
    let s_norm_sq: f64 = s.iter().map(|z| z.norm_sqr()).sum();
    let c2 = n >= 2 * m && s_norm_sq.sqrt() <= 1e-8;
    let c3 = n >= m * m + 3 * m + 3 && s_norm_sq <= n as f64 + 1e-8;
    let out = SufficientConditions { c1, c2, c3 };

    // each condition provably forces nu ≤ mu/√m; affordable to re-verify
    // only where the Gram scan is cheap
    #[cfg(debug_assertions)]
    if out.any() && n >= 2 && n * n * m <= 20_000_000 {
        let mu = worst_case_coherence(frame).expect("n ≥ 2 checked");
        let nu = average_coherence(frame).expect("n ≥ 2 checked");
        debug_assert!(
            nu <= mu / (m as f64).sqrt() + 1e-10,
            "sufficient condition held but nu={nu} > mu/√m={}",
            mu / (m as f64).sqrt()
        );
    }
    out
}

// ── combined report ──────────────────────────────────────────────────────

/// Every coherence-related quantity for one frame, computed in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub m: usize,
    pub n: usize,
    pub mu: f64,
    pub nu: f64,
    pub spectral_norm: f64,
    pub tightness_defect: f64,
    pub welch: f64,
    pub scp1: bool,
    pub scp1_constant: f64,
    pub coherence_property: bool,
    pub scp2: bool,
    pub sufficient: SufficientConditions,
}

impl CoherenceReport {
    /// Computes all metrics, bounds, and flags for `frame`.
    pub fn compute(frame: &Frame, scp1_constant: f64) -> Result<Self> {
        let (m, n) = (frame.rows(), frame.cols());
        let mu = worst_case_coherence(frame)?;
        let nu = average_coherence(frame)?;
        let spectral_norm = frame.spectral_norm()?;
        let flags = scp_flags_from_metrics(m, n, mu, nu, scp1_constant);
        Ok(Self {
            m,
            n,
            mu,
            nu,
            spectral_norm,
            tightness_defect: spectral_norm * spectral_norm - n as f64 / m as f64,
            welch: if n >= m { welch_bound(m, n)? } else { 0.0 },
            scp1: flags.scp1,
            scp1_constant,
            coherence_property: flags.coherence_property,
            scp2: flags.scp2,
            sufficient: sufficient_conditions(frame),
        })
    }
}
