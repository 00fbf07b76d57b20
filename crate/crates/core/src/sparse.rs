//! Sparse-recovery experiments: the measurement model, one-step
//! thresholding with a least-squares debias, the threshold and floor
//! formulas, flat test signals, and empirical weak restricted-isometry
//! testing.
//!
//! All logarithms are natural.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{FrameError, Result};
use crate::frame::{inner, Frame};
use crate::rng;

use rand::Rng;
use std::f64::consts::PI;

/// 37e, the constant gating the support-size hypothesis of the recovery
/// guarantee. Vacuously large at desk scale; exposed for the calculator.
pub const RECOVERY_C1: f64 = 37.0 * std::f64::consts::E;

/// 2/(1 − e^{−1/2}), the noise-term constant in the recovery error bound.
pub const RECOVERY_C2: f64 = 2.0 / (1.0 - 0.6065306597126334);

/// 1 + e^{−1/2}/(1 − e^{−1/2}), the tail-term constant in the bound.
pub const RECOVERY_C3: f64 = 1.0 + 0.6065306597126334 / (1.0 - 0.6065306597126334);

/// A length-n vector with K nonzero entries, stored sparsely. Support
/// indices are kept sorted with their values alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    n: usize,
    support: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseSignal {
    pub fn new(n: usize, support: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(FrameError::Mismatch(format!(
                "support has {} indices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.is_empty() {
            return Err(FrameError::Domain("sparse signal needs at least one nonzero".into()));
        }
        let mut pairs: Vec<(usize, Complex64)> =
            support.into_iter().zip(values).collect();
        pairs.sort_by_key(|&(i, _)| i);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(FrameError::Domain("sparse signal support has duplicates".into()));
        }
        if pairs.last().unwrap().0 >= n {
            return Err(FrameError::Domain(format!(
                "support index {} out of range for n={n}",
                pairs.last().unwrap().0
            )));
        }
        if pairs.iter().any(|(_, v)| v.norm() == 0.0 || !v.is_finite()) {
            return Err(FrameError::Domain("sparse signal values must be nonzero and finite".into()));
        }
        let (support, values) = pairs.into_iter().unzip();
        Ok(Self { n, support, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted nonzero positions.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Values, parallel to [`SparseSignal::support`].
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dense(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    /// Real and imaginary parts independent N(0, σ²/2), so E|e_i|² = σ².
    ComplexGaussian,
    /// Real N(0, σ²) noise.
    RealGaussian,
    /// e = 0; sigma is ignored and the recorded snr is infinite.
    Noiseless,
}

/// Whether generated signals carry random phases or only random signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalMode {
    Real,
    Complex,
}

/// y = Fx + e together with the noise level it was drawn at.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub y: Vec<Complex64>,
    pub sigma: f64,
    /// ‖x‖²/(Mσ²); infinite when σ = 0 or the model is noiseless.
    pub snr: f64,
    pub noise_model: NoiseModel,
}

/// Applies the frame to a sparse vector: Fx = Σ x_i f_i.
pub fn synthesize(frame: &Frame, x: &SparseSignal) -> Result<Vec<Complex64>> {
    if x.n() != frame.cols() {
        return Err(FrameError::Mismatch(format!(
            "signal length {} vs frame width {}",
            x.n(),
            frame.cols()
        )));
    }
    let m = frame.rows();
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for (&i, &v) in x.support().iter().zip(x.values()) {
        for (acc, f) in y.iter_mut().zip(frame.column(i)) {
            *acc += v * f;
        }
    }
    Ok(y)
}

/// Draws y = Fx + e. The snr field records ‖x‖²/(Mσ²), the ratio of signal
/// energy to expected noise energy.
pub fn measure(
    frame: &Frame,
    x: &SparseSignal,
    sigma: f64,
    model: NoiseModel,
    seed: u64,
) -> Result<MeasurementSet> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(FrameError::Domain(format!("noise level must be finite and ≥ 0, got {sigma}")));
    }
    let mut y = synthesize(frame, x)?;
    let m = frame.rows();
    let mut r = rng::seeded(seed);
    let effective_sigma = match model {
        NoiseModel::Noiseless => 0.0,
        _ => sigma,
    };
    if effective_sigma > 0.0 {
        match model {
            NoiseModel::ComplexGaussian => {
                let part = (sigma * sigma / 2.0).sqrt();
                for v in y.iter_mut() {
                    let (a, b) = rng::standard_normal_pair(&mut r);
                    *v += Complex64::new(part * a, part * b);
                }
            }
            NoiseModel::RealGaussian => {
                for v in y.iter_mut() {
                    *v += Complex64::new(sigma * rng::standard_normal(&mut r), 0.0);
                }
            }
            NoiseModel::Noiseless => unreachable!(),
        }
    }
    let snr = if effective_sigma > 0.0 {
        x.norm_sqr() / (m as f64 * sigma * sigma)
    } else {
        f64::INFINITY
    };
    Ok(MeasurementSet { y, sigma: effective_sigma, snr, noise_model: model })
}

/// Labeled convenience: ‖y‖²/(Mσ²) − 1 as a crude snr estimate. Never used
/// implicitly; the threshold formula takes whatever snr the caller supplies.
pub fn estimate_snr(y: &[Complex64], sigma: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(FrameError::Domain("snr estimation needs σ > 0".into()));
    }
    let energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    Ok(energy / (y.len() as f64 * sigma * sigma) - 1.0)
}

/// Output of one-step thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct OSTResult {
    /// Indices whose proxy |⟨f_n, y⟩| strictly exceeded λ, ascending.
    pub estimated_support: Vec<usize>,
    /// Dense estimate, zero off the estimated support.
    pub estimate: Vec<Complex64>,
    pub lambda: f64,
    /// ‖x − x̂‖ when the truth was supplied afterwards.
    pub l2_error: Option<f64>,
    /// (T_σ, T_μ) floor sets when the truth was supplied afterwards.
    pub floor_sets: Option<(Vec<usize>, Vec<usize>)>,
}

/// One-step thresholding: proxy z = F*y, keep |z_n| > λ, then least-squares
/// on the kept columns. An empty selection yields the zero estimate.
///
/// Selected columns whose smallest singular value drops below 1e-10 of the
/// largest are reported as an ill-conditioned selection, not solved anyway.
pub fn ost(frame: &Frame, y: &[Complex64], lambda: f64) -> Result<OSTResult> {
    if !(lambda >= 0.0) {
        return Err(FrameError::Domain(format!("threshold must be ≥ 0, got {lambda}")));
    }
    if y.len() != frame.rows() {
        return Err(FrameError::Mismatch(format!(
            "measurement length {} vs frame height {}",
            y.len(),
            frame.rows()
        )));
    }
    let m = frame.rows();
    let n = frame.cols();
    let mut selected = Vec::new();
    for j in 0..n {
        if inner(frame.column(j), y).norm() > lambda {
            selected.push(j);
        }
    }
    let mut estimate = vec![Complex64::new(0.0, 0.0); n];
    if !selected.is_empty() {
        let a = DMatrix::<Complex64>::from_fn(m, selected.len(), |r, c| {
            frame.entry(r, selected[c])
        });
        let svd = a.svd(true, true);
        let max_sv = svd.singular_values.max();
        let min_sv = svd.singular_values.min();
        if min_sv < 1e-10 * max_sv {
            return Err(FrameError::IllConditioned { support: selected });
        }
        let b = DVector::<Complex64>::from_column_slice(y);
        let sol = svd
            .solve(&b, 0.0)
            .map_err(|e| FrameError::Internal(format!("least-squares solve failed: {e}")))?;
        for (c, &j) in selected.iter().enumerate() {
            estimate[j] = sol[c];
        }
    }
    Ok(OSTResult { estimated_support: selected, estimate, lambda, l2_error: None, floor_sets: None })
}

/// λ = √(2σ² ln N) · max{ (10/t) μ √(M·snr), √2/(1−t) }.
pub fn ost_threshold(sigma: f64, n: usize, mu: f64, m: usize, snr: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(FrameError::Domain(format!("threshold split t must lie in (0,1), got {t}")));
    }
    if !(sigma > 0.0) {
        return Err(FrameError::Domain(format!("threshold formula needs σ > 0, got {sigma}")));
    }
    let base = (2.0 * sigma * sigma * (n as f64).ln()).sqrt();
    let mu_branch = (10.0 / t) * mu * (m as f64 * snr).sqrt();
    let sigma_branch = std::f64::consts::SQRT_2 / (1.0 - t);
    Ok(base * mu_branch.max(sigma_branch))
}

/// Floor sets: T_σ keeps entries above the noise floor
/// (2√2/(1−t))√(2σ² ln N); T_μ keeps entries above the interference floor
/// (20/t) μ ‖x‖ √(2 ln N).
pub fn floor_sets(
    x: &SparseSignal,
    sigma: f64,
    t: f64,
    mu: f64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(t > 0.0 && t < 1.0) {
        return Err(FrameError::Domain(format!("floor split t must lie in (0,1), got {t}")));
    }
    let ln_n = (x.n() as f64).ln();
    let noise_floor = (2.0 * std::f64::consts::SQRT_2 / (1.0 - t))
        * (2.0 * sigma * sigma * ln_n).sqrt();
    let interference_floor = (20.0 / t) * mu * x.norm() * (2.0 * ln_n).sqrt();
    let above = |floor: f64| -> Vec<usize> {
        x.support()
            .iter()
            .zip(x.values())
            .filter(|(_, v)| v.norm() > floor)
            .map(|(&i, _)| i)
            .collect()
    };
    Ok((above(noise_floor), above(interference_floor)))
}

/// K-sparse signal whose ⌈βK⌉ leading nonzeros have modulus exactly alpha
/// and whose remaining nonzeros are strictly smaller. Support is a uniform
/// K-subset; phases are uniform (complex mode) or random signs (real mode).
pub fn flat_signal(
    n: usize,
    k: usize,
    beta: f64,
    alpha: f64,
    small_scale: f64,
    mode: SignalMode,
    seed: u64,
) -> Result<SparseSignal> {
    if k < 1 || k > n {
        return Err(FrameError::Domain(format!("sparsity must satisfy 1 ≤ K ≤ N, got K={k}, N={n}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(FrameError::Domain(format!("flat fraction must lie in (0,1], got {beta}")));
    }
    if !(alpha > 0.0) || !(small_scale > 0.0 && small_scale <= 1.0) {
        return Err(FrameError::Domain(format!(
            "need alpha > 0 and small_scale in (0,1], got alpha={alpha}, small_scale={small_scale}"
        )));
    }
    let mut r = rng::seeded(seed);
    let support = rng::sample_distinct(&mut r, n, k);
    let flat = ((beta * k as f64).ceil() as usize).min(k);
    let mut values = Vec::with_capacity(k);
    for slot in 0..k {
        let modulus = if slot < flat {
            alpha
        } else {
            // (0, small_scale·alpha]: 1 − u maps [0,1) onto (0,1]
            small_scale * alpha * (1.0 - r.random::<f64>())
        };
        let v = match mode {
            SignalMode::Real => {
                let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(sign * modulus, 0.0)
            }
            SignalMode::Complex => {
                let phase = 2.0 * PI * r.random::<f64>();
                Complex64::new(modulus * phase.cos(), modulus * phase.sin())
            }
        };
        values.push(v);
    }
    SparseSignal::new(n, support, values)
}

/// Empirical weak restricted-isometry summary over random placements.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakRIPReport {
    pub k: usize,
    pub delta: f64,
    pub trials: u64,
    /// Fraction of trials with ‖Fx‖²/‖x‖² outside [1−δ, 1+δ].
    pub violation_fraction: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_mean: f64,
}

fn ratio_for_support(frame: &Frame, support: &[usize], values: &[Complex64], norm_sqr: f64) -> f64 {
    let m = frame.rows();
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for (&i, &v) in support.iter().zip(values) {
        for (acc, f) in y.iter_mut().zip(frame.column(i)) {
            *acc += v * f;
        }
    }
    y.iter().map(|z| z.norm_sqr()).sum::<f64>() / norm_sqr
}

/// Places the fixed values on a uniformly random K-subset in random order
/// each trial and tallies how often the energy ratio leaves [1−δ, 1+δ].
pub fn weak_rip_test(
    frame: &Frame,
    values: &[Complex64],
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<WeakRIPReport> {
    let k = values.len();
    let n = frame.cols();
    if k == 0 || k > n {
        return Err(FrameError::Domain(format!("need 1 ≤ K ≤ N, got K={k}, N={n}")));
    }
    if values.iter().any(|v| v.norm() == 0.0 || !v.is_finite()) {
        return Err(FrameError::Domain("weak-isometry values must be nonzero and finite".into()));
    }
    if trials < 1 {
        return Err(FrameError::Domain("need at least one trial".into()));
    }
    if !(delta >= 0.0) {
        return Err(FrameError::Domain(format!("tolerance δ must be ≥ 0, got {delta}")));
    }
    let norm_sqr: f64 = values.iter().map(|v| v.norm_sqr()).sum();

    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut r = rng::seeded(rng::derive_seed(seed, trial));
            let support = rng::sample_distinct(&mut r, n, k);
            ratio_for_support(frame, &support, values, norm_sqr)
        })
        .collect();

    let violations = ratios.iter().filter(|&&q| q < 1.0 - delta || q > 1.0 + delta).count();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &q in &ratios {
        min = min.min(q);
        max = max.max(q);
        sum += q;
    }
    Ok(WeakRIPReport {
        k,
        delta,
        trials,
        violation_fraction: violations as f64 / trials as f64,
        ratio_min: min,
        ratio_max: max,
        ratio_mean: sum / trials as f64,
    })
}

/// Exhaustive K=2 oracle: every ordered support pair with the two values in
/// both orders. Ground truth for the Monte-Carlo tester on small frames.
pub fn weak_rip_exhaustive_k2(
    frame: &Frame,
    values: &[Complex64; 2],
    delta: f64,
) -> Result<WeakRIPReport> {
    let n = frame.cols();
    if n < 2 {
        return Err(FrameError::Domain("exhaustive sweep needs N ≥ 2".into()));
    }
    let norm_sqr: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let mut violations = 0u64;
    let mut trials = 0u64;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let q = ratio_for_support(frame, &[i, j], values, norm_sqr);
            if q < 1.0 - delta || q > 1.0 + delta {
                violations += 1;
            }
            min = min.min(q);
            max = max.max(q);
            sum += q;
            trials += 1;
        }
    }
    Ok(WeakRIPReport {
        k: 2,
        delta,
        trials,
        violation_fraction: violations as f64 / trials as f64,
        ratio_min: min,
        ratio_max: max,
        ratio_mean: sum / trials as f64,
    })
}

/// Pure arithmetic for the weak-isometry hypothesis
/// 2K ln N ≤ min{ δ²/(100 μ²), M }.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRipHypothesis {
    pub lhs: f64,
    pub mu_cap: f64,
    pub dimension_cap: f64,
    pub holds: bool,
}

pub fn weak_rip_hypothesis(mu: f64, m: usize, n: usize, delta: f64, k: usize) -> WeakRipHypothesis {
    let lhs = 2.0 * k as f64 * (n as f64).ln();
    let mu_cap = if mu > 0.0 { delta * delta / (100.0 * mu * mu) } else { f64::INFINITY };
    let dimension_cap = m as f64;
    WeakRipHypothesis { lhs, mu_cap, dimension_cap, holds: lhs <= mu_cap.min(dimension_cap) }
}

/// Aggregate outcome of repeated flat-signal → measure → threshold runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySummary {
    pub trials: u64,
    /// Fraction of trials with estimated support exactly the true support.
    pub exact_support_rate: f64,
    pub mean_l2_error: f64,
    pub median_l2_error: f64,
    /// Fraction of trials with ‖x−x̂‖ ≤ c₂√(σ²K ln N) + 1e-9.
    pub error_bound_fraction: f64,
    pub mean_lambda: f64,
    /// Worst-case coherence of the frame, reused across trials.
    pub mu: f64,
}

/// Runs `trials` independent recovery experiments. The threshold follows
/// the formula at the per-trial true snr unless `lambda_override` pins it
/// (required for noiseless runs, where the formula's σ > 0 precondition
/// fails). Signals are real or complex to match the frame.
#[allow(clippy::too_many_arguments)]
pub fn recovery_experiment(
    frame: &Frame,
    k: usize,
    beta: f64,
    alpha_multiple: f64,
    sigma: f64,
    t: f64,
    trials: u64,
    seed: u64,
    lambda_override: Option<f64>,
) -> Result<RecoverySummary> {
    if trials < 1 {
        return Err(FrameError::Domain("need at least one trial".into()));
    }
    if !(alpha_multiple > 0.0) {
        return Err(FrameError::Domain(format!("alpha multiple must be > 0, got {alpha_multiple}")));
    }
    if sigma == 0.0 && lambda_override.is_none() {
        return Err(FrameError::Domain(
            "noiseless runs need an explicit threshold; the formula requires σ > 0".into(),
        ));
    }
    let n = frame.cols();
    let m = frame.rows();
    let mu = crate::coherence::worst_case_coherence(frame)?;
    let ln_n = (n as f64).ln();
    // α = multiple · σ√(2 ln N) in noise, multiple · √(2 ln N) noiseless
    let alpha = if sigma > 0.0 {
        alpha_multiple * sigma * (2.0 * ln_n).sqrt()
    } else {
        alpha_multiple * (2.0 * ln_n).sqrt()
    };
    let mode = if frame.is_real() { SignalMode::Real } else { SignalMode::Complex };
    let noise = if sigma == 0.0 {
        NoiseModel::Noiseless
    } else if frame.is_real() {
        NoiseModel::RealGaussian
    } else {
        NoiseModel::ComplexGaussian
    };

    struct TrialOutcome {
        exact: bool,
        error: f64,
        lambda: f64,
    }

    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let x = flat_signal(n, k, beta, alpha, 0.1, mode, rng::derive_seed(seed, 2 * trial))?;
            let meas = measure(frame, &x, sigma, noise, rng::derive_seed(seed, 2 * trial + 1))?;
            let lambda = match lambda_override {
                Some(l) => l,
                None => ost_threshold(sigma, n, mu, m, meas.snr, t)?,
            };
            let result = ost(frame, &meas.y, lambda)?;
            let exact = result.estimated_support == x.support();
            let dense = x.dense();
            let error: f64 = dense
                .iter()
                .zip(&result.estimate)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(TrialOutcome { exact, error, lambda })
        })
        .collect();

    let mut errors = Vec::with_capacity(trials as usize);
    let mut exact = 0u64;
    let mut lambda_sum = 0.0;
    for o in outcomes {
        let o = o?;
        if o.exact {
            exact += 1;
        }
        errors.push(o.error);
        lambda_sum += o.lambda;
    }
    let bound = RECOVERY_C2 * (sigma * sigma * k as f64 * ln_n).sqrt();
    let within = errors.iter().filter(|&&e| e <= bound + 1e-9).count();
    let mean = errors.iter().sum::<f64>() / trials as f64;
    let mut sorted = errors.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("errors are finite"));
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    Ok(RecoverySummary {
        trials,
        exact_support_rate: exact as f64 / trials as f64,
        mean_l2_error: mean,
        median_l2_error: median,
        error_bound_fraction: within as f64 / trials as f64,
        mean_lambda: lambda_sum / trials as f64,
        mu,
    })
}

/// Fills the truth-dependent fields of a threshold result in place.
pub fn evaluate_against_truth(
    result: &mut OSTResult,
    x: &SparseSignal,
    sigma: f64,
    t: f64,
    mu: f64,
) -> Result<()> {
    let dense = x.dense();
    if dense.len() != result.estimate.len() {
        return Err(FrameError::Mismatch(format!(
            "truth length {} vs estimate length {}",
            dense.len(),
            result.estimate.len()
        )));
    }
    let err: f64 = dense
        .iter()
        .zip(&result.estimate)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    result.l2_error = Some(err);
    result.floor_sets = Some(floor_sets(x, sigma, t, mu)?);
    Ok(())
}
