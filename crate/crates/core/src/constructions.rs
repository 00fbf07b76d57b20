//! The eight frame families, each returning a [`Frame`] tagged with a
//! descriptor sufficient to rebuild it bit-for-bit in the same build.
//!
//! DFT sign convention is e^{+2πi kℓ/N} throughout. Phase exponents are
//! reduced as integers before touching floating point, so unimodular entries
//! are exact up to one sin/cos rounding.

use num_complex::Complex64;

use crate::designs::SteinerSystem;
use crate::error::{FrameError, Result};
use crate::frame::{normalize_columns, Frame};
use crate::gf2m::FieldContext;
use crate::rng;

use rand::Rng;
use std::f64::consts::PI;

// ── selection and descriptor types ───────────────────────────────────────

/// A nonempty set of DFT row indices, sorted ascending, all below `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicSelection {
    n: usize,
    indices: Vec<usize>,
}

impl HarmonicSelection {
    /// Validates and sorts a row-index set for an order-`n` DFT.
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(FrameError::Domain("harmonic selection must be nonempty".into()));
        }
        indices.sort_unstable();
        let distinct = indices.windows(2).all(|w| w[0] != w[1]);
        if !distinct {
            return Err(FrameError::Domain("harmonic selection has duplicate indices".into()));
        }
        if *indices.last().unwrap() >= n {
            return Err(FrameError::Domain(format!(
                "harmonic selection index {} out of range for n={n}",
                indices.last().unwrap()
            )));
        }
        Ok(Self { n, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Selected row indices, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn indices_csv(&self) -> String {
        self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// The frame families this crate can construct by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Harmonic,
    HarmonicFixed,
    GaborAlltop,
    GaborSteinhaus,
    Chirp,
    Sph2Design,
    SteinerPair,
    SteinerAffine,
    Code,
}

impl Family {
    /// Stable lowercase name used in CLI arguments and frame files.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Harmonic => "harmonic",
            Family::HarmonicFixed => "harmonic-fixed",
            Family::GaborAlltop => "gabor-alltop",
            Family::GaborSteinhaus => "gabor-steinhaus",
            Family::Chirp => "chirp",
            Family::Sph2Design => "sph2design",
            Family::SteinerPair => "steiner-pair",
            Family::SteinerAffine => "steiner-affine",
            Family::Code => "code",
        }
    }

    /// Inverse of [`Family::name`].
    pub fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => Family::Gaussian,
            "harmonic" => Family::Harmonic,
            "harmonic-fixed" => Family::HarmonicFixed,
            "gabor-alltop" => Family::GaborAlltop,
            "gabor-steinhaus" => Family::GaborSteinhaus,
            "chirp" => Family::Chirp,
            "sph2design" => Family::Sph2Design,
            "steiner-pair" => Family::SteinerPair,
            "steiner-affine" => Family::SteinerAffine,
            "code" => Family::Code,
            other => return Err(FrameError::Domain(format!("unknown frame family '{other}'"))),
        })
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Provenance record: family plus the ordered parameters that rebuild the
/// frame exactly (seed for randomized families, reduction polynomial for
/// code frames, row-assignment rule for Steiner, applied flip/wiggle).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionDescriptor {
    family: Family,
    parameters: Vec<(String, String)>,
}

impl ConstructionDescriptor {
    pub fn new(family: Family, parameters: Vec<(String, String)>) -> Self {
        Self { family, parameters }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parameters(&self) -> &[(String, String)] {
        &self.parameters
    }

    /// Value of the first parameter named `key`, if present.
    pub fn param(&self, key: &str) -> Option<&str> {
        self.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Replaces (or appends) parameter `key`.
    pub fn set_param(&mut self, key: &str, value: String) {
        if let Some(slot) = self.parameters.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            self.parameters.push((key.to_string(), value));
        }
    }

    fn param_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .param(key)
            .ok_or_else(|| FrameError::Domain(format!("descriptor missing parameter '{key}'")))?;
        raw.parse::<T>()
            .map_err(|_| FrameError::Domain(format!("descriptor parameter '{key}'='{raw}' failed to parse")))
    }
}

// ── family constructors ──────────────────────────────────────────────────

/// Real m×n frame of column-normalized N(0,1) entries.
pub fn gaussian_normalized(m: usize, n: usize, seed: u64) -> Result<Frame> {
    if m == 0 || n == 0 {
        return Err(FrameError::Domain(format!("gaussian frame needs positive dimensions, got {m}x{n}")));
    }
    let mut r = rng::seeded(seed);
    let raw: Vec<Complex64> = (0..m * n)
        .map(|_| Complex64::new(rng::standard_normal(&mut r), 0.0))
        .collect();
    let frame = normalize_columns(m, n, raw)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::Gaussian,
        vec![
            ("m".into(), m.to_string()),
            ("n".into(), n.to_string()),
            ("seed".into(), seed.to_string()),
        ],
    )))
}

/// Harmonic frame from an explicit row selection: entry (k, ℓ) is
/// e^{2πi·k·ℓ/n} / √|selection| over the selected rows k, ascending.
pub fn harmonic_from_indices(sel: &HarmonicSelection) -> Result<Frame> {
    let n = sel.n;
    let rows = sel.len();
    let scale = 1.0 / (rows as f64).sqrt();
    let mut data = Vec::with_capacity(rows * n);
    for l in 0..n {
        for &k in sel.indices() {
            // reduce k·ℓ mod n as an integer so large products keep full phase accuracy
            let phase = 2.0 * PI * (((k as u64 * l as u64) % n as u64) as f64) / n as f64;
            data.push(Complex64::new(scale * phase.cos(), scale * phase.sin()));
        }
    }
    let frame = Frame::new(rows, n, data)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::HarmonicFixed,
        vec![("n".into(), n.to_string()), ("indices".into(), sel.indices_csv())],
    )))
}

/// Random harmonic frame: each DFT row kept with probability m_target/n.
///
/// Returns the frame together with the realized selection. All-rows-rejected
/// is an error advising a different seed (vanishingly unlikely at contract
/// sizes, but it must not loop silently).
pub fn random_harmonic(m_target: usize, n: usize, seed: u64) -> Result<(Frame, HarmonicSelection)> {
    if m_target < 1 || m_target > n {
        return Err(FrameError::Domain(format!(
            "random harmonic needs 1 ≤ m_target ≤ n, got m_target={m_target}, n={n}"
        )));
    }
    let p = m_target as f64 / n as f64;
    let mut r = rng::seeded(seed);
    let indices: Vec<usize> = (0..n).filter(|_| r.random::<f64>() < p).collect();
    if indices.is_empty() {
        return Err(FrameError::EmptySelection);
    }
    let sel = HarmonicSelection::new(n, indices)?;
    let frame = harmonic_from_indices(&sel)?.with_meta(ConstructionDescriptor::new(
        Family::Harmonic,
        vec![
            ("m".into(), m_target.to_string()),
            ("n".into(), n.to_string()),
            ("seed".into(), seed.to_string()),
        ],
    ));
    Ok((frame, sel))
}

/// Cubic-phase unimodular seed: entry t is e^{2πi·t³/m} / √m.
pub fn alltop_seed(m: usize) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(FrameError::Domain("alltop seed needs m ≥ 1".into()));
    }
    let scale = 1.0 / (m as f64).sqrt();
    Ok((0..m as u64)
        .map(|t| {
            let cube = (t % m as u64) * (t % m as u64) % m as u64 * (t % m as u64) % m as u64;
            let phase = 2.0 * PI * cube as f64 / m as f64;
            Complex64::new(scale * phase.cos(), scale * phase.sin())
        })
        .collect())
}

/// Random-phase unimodular seed: entry t is e^{2πi·θ_t} / √m with θ_t
/// uniform on [0, 1).
pub fn steinhaus_seed(m: usize, seed: u64) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(FrameError::Domain("steinhaus seed needs m ≥ 1".into()));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut r = rng::seeded(seed);
    Ok((0..m)
        .map(|_| {
            let phase = 2.0 * PI * r.random::<f64>();
            Complex64::new(scale * phase.cos(), scale * phase.sin())
        })
        .collect())
}

/// M×M² Gabor frame of all cyclic translates and modulations of a seed.
///
/// Column x·M+y holds f_{xy}(t) = f((t−x) mod M) · e^{2πi·y·(t−x)/M}: the
/// modulation rides on the translated argument, which is the variant whose
/// average coherence matches the known M=5 cubic-seed value. The seed is
/// normalized on entry; a (near-)zero seed is a domain error.
pub fn gabor(seed_vector: &[Complex64]) -> Result<Frame> {
    let m = seed_vector.len();
    if m == 0 {
        return Err(FrameError::Domain("gabor seed must be nonempty".into()));
    }
    let norm: f64 = seed_vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-14) {
        return Err(FrameError::Domain("gabor seed vector is zero".into()));
    }
    let f: Vec<Complex64> = seed_vector.iter().map(|z| z / norm).collect();

    let n = m * m;
    let mut data = Vec::with_capacity(m * n);
    for x in 0..m {
        for y in 0..m {
            for t in 0..m {
                let shifted = (t + m - x) % m;
                let phase = 2.0 * PI * ((y * shifted) % m) as f64 / m as f64;
                let rot = Complex64::new(phase.cos(), phase.sin());
                data.push(f[shifted] * rot);
            }
        }
    }
    Frame::new(m, n, data)
}

/// Gabor frame seeded by [`alltop_seed`], with provenance metadata.
pub fn gabor_alltop(m: usize) -> Result<Frame> {
    let frame = gabor(&alltop_seed(m)?)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::GaborAlltop,
        vec![("m".into(), m.to_string())],
    )))
}

/// Gabor frame seeded by [`steinhaus_seed`], with provenance metadata.
pub fn gabor_steinhaus(m: usize, seed: u64) -> Result<Frame> {
    let frame = gabor(&steinhaus_seed(m, seed)?)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::GaborSteinhaus,
        vec![("m".into(), m.to_string()), ("seed".into(), seed.to_string())],
    )))
}

/// M×M² chirp frame for prime M: column a·M+b holds
/// (1/√M) e^{πi·a·t(t−M)/M} e^{2πi·b·t/M}.
///
/// The combined phase exponent a·t(t−M) + 2bt is reduced mod 2M as an
/// integer before exponentiation, so entries carry no accumulated drift.
pub fn chirp(m: usize) -> Result<Frame> {
    if !is_prime(m) {
        return Err(FrameError::Domain(format!("chirp frame needs a prime dimension, got {m}")));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let n = m * m;
    let two_m = 2 * m as i64;
    let mut data = Vec::with_capacity(m * n);
    for a in 0..m as i64 {
        for b in 0..m as i64 {
            for t in 0..m as i64 {
                let k = (a * t * (t - m as i64) + 2 * b * t).rem_euclid(two_m);
                let phase = PI * k as f64 / m as f64;
                data.push(Complex64::new(scale * phase.cos(), scale * phase.sin()));
            }
        }
    }
    let frame = Frame::new(m, n, data)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::Chirp,
        vec![("m".into(), m.to_string())],
    )))
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Real 2|sel|×n frame of cosine/sine row pairs over the selected
/// frequencies, largest index first. Columns sum to zero and the frame is
/// tight, so it always satisfies the zero-sum sufficient condition.
///
/// Index 0 is rejected (its sine row would vanish), as is n < 4|sel|.
pub fn spherical_2design(sel: &HarmonicSelection) -> Result<Frame> {
    if sel.indices()[0] == 0 {
        return Err(FrameError::Domain(
            "spherical 2-design selection must exclude index 0 (zero sine row)".into(),
        ));
    }
    let m = 2 * sel.len();
    let n = sel.n;
    if n < 2 * m {
        return Err(FrameError::Domain(format!(
            "spherical 2-design needs n ≥ 2M, got n={n}, M={m}"
        )));
    }
    let scale = (2.0 / m as f64).sqrt();
    // row pairs walk the selection from its largest index down
    let mut freqs: Vec<usize> = sel.indices().to_vec();
    freqs.reverse();
    let mut data = Vec::with_capacity(m * n);
    for l in 0..n {
        for &k in &freqs {
            let phase = 2.0 * PI * (((k as u64 * l as u64) % n as u64) as f64) / n as f64;
            data.push(Complex64::new(scale * phase.cos(), 0.0));
            data.push(Complex64::new(scale * phase.sin(), 0.0));
        }
    }
    let frame = Frame::new(m, n, data)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::Sph2Design,
        vec![
            ("n".into(), n.to_string()),
            ("indices".into(), sel.indices_csv()),
            ("row_order".into(), "descending".into()),
        ],
    )))
}

/// Steiner equiangular tight frame from a (2,k,v) design.
///
/// Point j contributes r+1 columns (r = replication number). Column (j, c)
/// places, in the rows of the blocks through j taken in increasing block
/// order, the entries ω^{s·c} for s = 1..r (ω the order-(r+1) root of
/// unity), scaled by 1/√r. Skipping s = 0 avoids the all-ones DFT row; the
/// resulting frame attains the Welch bound exactly.
pub fn steiner_etf(s: &SteinerSystem) -> Result<Frame> {
    let v = s.points();
    let r = s.replication();
    let m = s.block_count();
    let n = v * (r + 1);
    let order = r + 1;
    let scale = 1.0 / (r as f64).sqrt();

    // ω^p for p mod (r+1), exact integer phases
    let roots: Vec<Complex64> = (0..order)
        .map(|p| {
            let phase = 2.0 * PI * p as f64 / order as f64;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect();

    let mut data = vec![Complex64::new(0.0, 0.0); m * n];
    for j in 0..v {
        let through = s.blocks_through(j);
        debug_assert_eq!(through.len(), r);
        for c in 0..order {
            let col = j * order + c;
            for (s_idx, &row) in through.iter().enumerate() {
                let p = ((s_idx + 1) * c) % order;
                data[row + col * m] = scale * roots[p];
            }
        }
    }
    let frame = Frame::new(m, n, data)?;
    let (family, size_key, size_val) = if s.block_size() == 2 {
        (Family::SteinerPair, "v", v.to_string())
    } else {
        (Family::SteinerAffine, "q", s.block_size().to_string())
    };
    Ok(frame.with_meta(ConstructionDescriptor::new(
        family,
        vec![
            (size_key.into(), size_val),
            ("row_rule".into(), "dft-rows-2..r+1-by-block-order".into()),
        ],
    )))
}

/// Real ±1/√(2^m) frame of shape 2^m × 2^{(t+1)m} from trace forms over
/// GF(2^m): entry (x, α) is (−1)^{Tr[α₀x + Σ α_i x^{2^i+1}]} / √(2^m).
///
/// Rows follow field enumeration (increasing bitmask); columns decode the
/// index big-endian into (α₀, …, α_t). The size cap (t+1)·m ≤ 24 keeps N at
/// desk scale.
pub fn code_frame(ctx: &FieldContext, t: u32) -> Result<Frame> {
    let m_bits = ctx.degree();
    if (t + 1) * m_bits > 24 {
        return Err(FrameError::Domain(format!(
            "code frame size 2^{} exceeds the desk-scale cap 2^24",
            (t + 1) * m_bits
        )));
    }
    let rows = ctx.order() as usize;
    let cols = 1usize << ((t + 1) * m_bits);
    let scale = 1.0 / (rows as f64).sqrt();
    let elements = ctx.enumerate();

    // powers[x][j] = x^(2^j + 1) for j ≥ 1; powers[x][0] = x
    let mut powers = Vec::with_capacity(rows);
    for &x in &elements {
        let mut row = Vec::with_capacity(t as usize + 1);
        row.push(x);
        for i in 1..=t {
            row.push(x.pow((1u64 << i) + 1));
        }
        powers.push(row);
    }

    let mask = (ctx.order() - 1) as u32;
    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    for col in 0..cols {
        for (xi, pw) in powers.iter().enumerate() {
            let mut acc = ctx.zero();
            for (j, &p) in pw.iter().enumerate().take(t as usize + 1) {
                let alpha_bits = ((col >> (m_bits as usize * (t as usize - j))) as u32) & mask;
                let alpha = ctx.element(alpha_bits)?;
                acc = acc.add(alpha.mul(p)?)?;
            }
            let sign = if acc.trace()? == 0 { scale } else { -scale };
            data[xi + col * rows] = Complex64::new(sign, 0.0);
        }
    }
    let frame = Frame::new(rows, cols, data)?;
    Ok(frame.with_meta(ConstructionDescriptor::new(
        Family::Code,
        vec![
            ("m".into(), m_bits.to_string()),
            ("t".into(), t.to_string()),
            ("poly".into(), format!("{:#x}", ctx.polynomial())),
        ],
    )))
}

// ── descriptor reconstruction ────────────────────────────────────────────

fn parse_indices(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| FrameError::Domain(format!("bad index '{tok}' in descriptor")))
        })
        .collect()
}

/// Rebuilds a frame from its descriptor. Within one build this reproduces
/// the original entries exactly, including any recorded flip or wiggle.
pub fn reconstruct(desc: &ConstructionDescriptor) -> Result<Frame> {
    let base = match desc.family() {
        Family::Gaussian => gaussian_normalized(
            desc.param_parsed("m")?,
            desc.param_parsed("n")?,
            desc.param_parsed("seed")?,
        )?,
        Family::Harmonic => {
            random_harmonic(
                desc.param_parsed("m")?,
                desc.param_parsed("n")?,
                desc.param_parsed("seed")?,
            )?
            .0
        }
        Family::HarmonicFixed => {
            let n = desc.param_parsed("n")?;
            let idx = parse_indices(desc.param("indices").ok_or_else(|| {
                FrameError::Domain("harmonic-fixed descriptor missing 'indices'".into())
            })?)?;
            harmonic_from_indices(&HarmonicSelection::new(n, idx)?)?
        }
        Family::GaborAlltop => gabor_alltop(desc.param_parsed("m")?)?,
        Family::GaborSteinhaus => {
            gabor_steinhaus(desc.param_parsed("m")?, desc.param_parsed("seed")?)?
        }
        Family::Chirp => chirp(desc.param_parsed("m")?)?,
        Family::Sph2Design => {
            let n = desc.param_parsed("n")?;
            let idx = parse_indices(desc.param("indices").ok_or_else(|| {
                FrameError::Domain("sph2design descriptor missing 'indices'".into())
            })?)?;
            spherical_2design(&HarmonicSelection::new(n, idx)?)?
        }
        Family::SteinerPair => {
            steiner_etf(&crate::designs::pair_system(desc.param_parsed("v")?)?)?
        }
        Family::SteinerAffine => {
            steiner_etf(&crate::designs::affine_plane_system(desc.param_parsed("q")?)?)?
        }
        Family::Code => {
            let m: u32 = desc.param_parsed("m")?;
            let ctx = match desc.param("poly") {
                Some(raw) => {
                    let digits = raw.trim_start_matches("0x");
                    let poly = u32::from_str_radix(digits, 16).map_err(|_| {
                        FrameError::Domain(format!("bad polynomial '{raw}' in descriptor"))
                    })?;
                    FieldContext::new(m, poly)?
                }
                None => FieldContext::default_for(m)?,
            };
            code_frame(&ctx, desc.param_parsed("t")?)?
        }
    };

    // re-apply any recorded column transforms
    let mut frame = base;
    if let Some(pattern) = desc.param("flip").map(str::to_owned) {
        let flip = crate::equivalence::FlipPattern::parse(&pattern)?;
        frame = crate::equivalence::apply_flip(&frame, &flip)?;
    }
    if let Some(raw) = desc.param("wiggle").map(str::to_owned) {
        let wiggle = crate::equivalence::WigglePattern::parse(&raw)?;
        frame = crate::equivalence::apply_wiggle(&frame, &wiggle)?;
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{average_coherence, sufficient_conditions, welch_bound, worst_case_coherence};
    use approx::assert_abs_diff_eq;

    #[test]
    fn alltop_seed_entries() {
        let s = alltop_seed(5).unwrap();
        let scale = 1.0 / 5.0f64.sqrt();
        assert_abs_diff_eq!(s[0].re, scale, epsilon = 1e-15);
        assert_abs_diff_eq!(s[0].im, 0.0, epsilon = 1e-15);
        // 2^3 mod 5 = 3
        let want = 2.0 * PI * 3.0 / 5.0;
        assert_abs_diff_eq!(s[2].re, scale * want.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[2].im, scale * want.sin(), epsilon = 1e-15);
        for z in &s {
            assert_abs_diff_eq!(z.norm(), scale, epsilon = 1e-15);
        }
    }

    #[test]
    fn steinhaus_seed_unimodular_and_seeded() {
        let a = steinhaus_seed(70, 9).unwrap();
        let b = steinhaus_seed(70, 9).unwrap();
        assert_eq!(a, b);
        let scale = 1.0 / 70.0f64.sqrt();
        for z in &a {
            assert_abs_diff_eq!(z.norm(), scale, epsilon = 1e-15);
        }
    }

    #[test]
    fn gaussian_columns_are_unit_and_seeded() {
        let f = gaussian_normalized(6, 40, 4).unwrap();
        assert!(f.is_real());
        for j in 0..40 {
            let norm: f64 = f.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
        let g = gaussian_normalized(6, 40, 4).unwrap();
        assert_eq!(f.data(), g.data());
    }

    #[test]
    fn harmonic_examples() {
        let one_row = harmonic_from_indices(&HarmonicSelection::new(2, vec![0]).unwrap()).unwrap();
        assert!(one_row.is_real());
        assert_abs_diff_eq!(one_row.entry(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one_row.entry(0, 1).re, 1.0, epsilon = 1e-15);

        let roots = harmonic_from_indices(&HarmonicSelection::new(4, vec![1]).unwrap()).unwrap();
        assert_abs_diff_eq!(worst_case_coherence(&roots).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(roots.entry(0, 1).im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_nine_of_thirtyseven_attains_welch() {
        let sel = HarmonicSelection::new(37, vec![1, 7, 9, 10, 12, 16, 26, 33, 34]).unwrap();
        let f = harmonic_from_indices(&sel).unwrap();
        let mu = worst_case_coherence(&f).unwrap();
        assert_abs_diff_eq!(mu, welch_bound(9, 37).unwrap(), epsilon = 1e-9);
        assert!(f.tightness_defect().unwrap().abs() < 1e-9);
        // 0 not selected: columns of the full DFT sum to zero on nonzero rows
        assert_abs_diff_eq!(average_coherence(&f).unwrap(), 1.0 / 36.0, epsilon = 1e-12);
    }

    #[test]
    fn random_harmonic_is_tight_and_errors_on_empty() {
        let (f, sel) = random_harmonic(5, 50, 3).unwrap();
        assert_eq!(f.rows(), sel.len());
        assert!(f.tightness_defect().unwrap().abs() < 1e-9);
        for z in f.data() {
            assert_abs_diff_eq!(z.norm(), 1.0 / (sel.len() as f64).sqrt(), epsilon = 1e-13);
        }
        assert!(random_harmonic(0, 50, 3).is_err());
    }

    #[test]
    fn selection_validation() {
        assert!(HarmonicSelection::new(10, vec![]).is_err());
        assert!(HarmonicSelection::new(10, vec![3, 3]).is_err());
        assert!(HarmonicSelection::new(10, vec![10]).is_err());
        let s = HarmonicSelection::new(10, vec![7, 2, 5]).unwrap();
        assert_eq!(s.indices(), &[2, 5, 7]);
    }

    #[test]
    fn gabor_is_tight_for_arbitrary_seeds() {
        let seed: Vec<Complex64> = (0..6)
            .map(|t| Complex64::new(1.0 + t as f64, (t as f64) * 0.5 - 1.0))
            .collect();
        let f = gabor(&seed).unwrap();
        assert_eq!((f.rows(), f.cols()), (6, 36));
        assert!(f.tightness_defect().unwrap().abs() < 1e-9);
        let zero = vec![Complex64::new(0.0, 0.0); 4];
        assert!(gabor(&zero).is_err());
    }

    #[test]
    fn chirp_m5_exact_metrics() {
        let f = chirp(5).unwrap();
        assert_eq!((f.rows(), f.cols()), (5, 25));
        assert_abs_diff_eq!(worst_case_coherence(&f).unwrap(), 1.0 / 5.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(average_coherence(&f).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.spectral_norm().unwrap(), 5.0f64.sqrt(), epsilon = 1e-12);
        assert!(sufficient_conditions(&f).c1);
        assert!(chirp(6).is_err());
    }

    #[test]
    fn chirp_entry_matches_direct_exponential() {
        let f = chirp(7).unwrap();
        let (a, b, t) = (3i64, 5i64, 4i64);
        let phase = PI * (a * t * (t - 7)) as f64 / 7.0 + 2.0 * PI * (b * t) as f64 / 7.0;
        let want = Complex64::new(phase.cos(), phase.sin()) / 7.0f64.sqrt();
        let got = f.entry(t as usize, (a * 7 + b) as usize);
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn chirp_and_alltop_gabor_share_mu_and_spectral_norm() {
        for m in [5usize, 7] {
            let c = chirp(m).unwrap();
            let g = gabor_alltop(m).unwrap();
            assert_abs_diff_eq!(
                worst_case_coherence(&c).unwrap(),
                worst_case_coherence(&g).unwrap(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                c.spectral_norm().unwrap(),
                g.spectral_norm().unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn spherical_2design_example_metrics() {
        let sel = HarmonicSelection::new(37, vec![1, 7, 9, 10, 12, 16, 26, 33, 34]).unwrap();
        let f = spherical_2design(&sel).unwrap();
        assert_eq!((f.rows(), f.cols()), (18, 37));
        assert!(f.is_real());
        let s = f.column_sum();
        assert!(s.iter().map(|z| z.norm()).fold(0.0f64, f64::max) < 1e-9);
        assert!(f.tightness_defect().unwrap().abs() < 1e-9);
        assert!(sufficient_conditions(&f).c2);
        assert_abs_diff_eq!(worst_case_coherence(&f).unwrap(), 0.1967434036193996, epsilon = 1e-9);
        assert_abs_diff_eq!(average_coherence(&f).unwrap(), 1.0 / 36.0, epsilon = 1e-9);
    }

    #[test]
    fn spherical_2design_rejects_zero_index_and_small_n() {
        assert!(spherical_2design(&HarmonicSelection::new(20, vec![0, 1]).unwrap()).is_err());
        assert!(spherical_2design(&HarmonicSelection::new(7, vec![1, 2]).unwrap()).is_err());
    }

    #[test]
    fn steiner_pair3_is_the_printed_etf() {
        let f = steiner_etf(&crate::designs::pair_system(3).unwrap()).unwrap();
        assert_eq!((f.rows(), f.cols()), (3, 9));
        let g = f.gram();
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    assert_abs_diff_eq!(g.entry(i, j).norm(), 0.5, epsilon = 1e-10);
                }
            }
        }
        assert_abs_diff_eq!(average_coherence(&f).unwrap(), 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(f.spectral_norm().unwrap(), 3.0f64.sqrt(), epsilon = 1e-9);

        // spot-check the printed entries: first point's blocks are rows 0,1
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(f.entry(0, 0).re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(f.entry(1, 0).re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(f.entry(2, 0).re, 0.0, epsilon = 1e-12);
        let w = Complex64::new((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
        assert!((f.entry(0, 1) - s * w).norm() < 1e-12);
        assert!((f.entry(1, 1) - s * w * w).norm() < 1e-12);
    }

    #[test]
    fn steiner_affine3_is_a_welch_equality_frame() {
        let f = steiner_etf(&crate::designs::affine_plane_system(3).unwrap()).unwrap();
        assert_eq!((f.rows(), f.cols()), (12, 45));
        assert!(f.tightness_defect().unwrap().abs() < 1e-9);
        let mu = worst_case_coherence(&f).unwrap();
        assert_abs_diff_eq!(mu, welch_bound(12, 45).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn code_frame_small_examples() {
        let ctx = FieldContext::default_for(2).unwrap();
        let f = code_frame(&ctx, 1).unwrap();
        assert_eq!((f.rows(), f.cols()), (4, 16));
        assert!(f.is_real());
        // columns sum to 2^{(t+1/2)m} δ0 = 8 δ0
        let s = f.column_sum();
        assert_abs_diff_eq!(s[0].re, 8.0, epsilon = 1e-12);
        for z in &s[1..] {
            assert_abs_diff_eq!(z.norm(), 0.0, epsilon = 1e-12);
        }
        assert!(sufficient_conditions(&f).c1);
        assert!(f.tightness_defect().unwrap().abs() < 1e-9);

        // cap: (t+1)·m must stay ≤ 24
        let big = FieldContext::default_for(13).unwrap();
        assert!(code_frame(&big, 1).is_err());
    }

    #[test]
    fn tight_families_have_zero_defect() {
        let sel = HarmonicSelection::new(24, vec![1, 3, 8]).unwrap();
        let frames: Vec<Frame> = vec![
            harmonic_from_indices(&sel).unwrap(),
            gabor_alltop(5).unwrap(),
            gabor_steinhaus(6, 11).unwrap(),
            chirp(5).unwrap(),
            spherical_2design(&HarmonicSelection::new(16, vec![1, 2, 5]).unwrap()).unwrap(),
            steiner_etf(&crate::designs::pair_system(4).unwrap()).unwrap(),
            code_frame(&FieldContext::default_for(3).unwrap(), 1).unwrap(),
        ];
        for f in &frames {
            assert!(
                f.tightness_defect().unwrap().abs() < 1e-9,
                "family {:?} not tight",
                f.meta().map(|d| d.family())
            );
        }
    }

    #[test]
    fn gabor_average_coherence_bound() {
        for m in [5usize, 6, 7] {
            let f = gabor_alltop(m).unwrap();
            let nu = average_coherence(&f).unwrap();
            assert!(nu <= 1.0 / (m as f64 + 1.0) + 1e-12, "m={m}, nu={nu}");
            let g = gabor_steinhaus(m, 2).unwrap();
            let nu = average_coherence(&g).unwrap();
            assert!(nu <= 1.0 / (m as f64 + 1.0) + 1e-12, "steinhaus m={m}, nu={nu}");
        }
    }

    #[test]
    fn descriptors_reconstruct_exactly() {
        let sel = HarmonicSelection::new(37, vec![1, 7, 9, 10, 12, 16, 26, 33, 34]).unwrap();
        let frames: Vec<Frame> = vec![
            gaussian_normalized(5, 20, 123).unwrap(),
            random_harmonic(4, 30, 7).unwrap().0,
            harmonic_from_indices(&sel).unwrap(),
            gabor_alltop(5).unwrap(),
            gabor_steinhaus(5, 99).unwrap(),
            chirp(7).unwrap(),
            spherical_2design(&sel).unwrap(),
            steiner_etf(&crate::designs::pair_system(3).unwrap()).unwrap(),
            steiner_etf(&crate::designs::affine_plane_system(3).unwrap()).unwrap(),
            code_frame(&FieldContext::default_for(3).unwrap(), 1).unwrap(),
        ];
        for f in &frames {
            let desc = f.meta().expect("constructed frames carry metadata");
            let rebuilt = reconstruct(desc).unwrap();
            assert_eq!(rebuilt.rows(), f.rows());
            assert_eq!(rebuilt.cols(), f.cols());
            for (a, b) in f.data().iter().zip(rebuilt.data()) {
                assert!((a - b).norm() <= 1e-15, "family {:?}", desc.family());
            }
        }
    }
}
