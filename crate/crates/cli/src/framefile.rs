//! On-disk frame format: a single JSON object with a fixed field order.
//!
//! Canonical form, which `encode` always produces and reload-then-save
//! reproduces byte for byte:
//! - compact JSON, one trailing newline, fields in declaration order
//! - floats as shortest round-trip decimals
//! - `data` row-major; every entry a bare real when `real_flag` is true,
//!   a `[re, im]` pair otherwise

use frame_forge_core::{Complex64, ConstructionDescriptor, Family, Frame};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl Entry {
    fn to_complex(&self) -> Complex64 {
        match *self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MetaRepr {
    family: String,
    parameters: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct FrameFile {
    format_version: u32,
    m: usize,
    n: usize,
    real_flag: bool,
    meta: Option<MetaRepr>,
    data: Vec<Entry>,
}

/// Renders `frame` in canonical form.
pub fn encode(frame: &Frame) -> String {
    let (m, n) = (frame.rows(), frame.cols());
    let real = frame.is_real();
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let z = frame.entry(i, j);
            data.push(if real { Entry::Real(z.re) } else { Entry::Pair([z.re, z.im]) });
        }
    }
    let meta = frame.meta().map(|d| MetaRepr {
        family: d.family().name().to_string(),
        parameters: d.parameters().to_vec(),
    });
    let file = FrameFile { format_version: FORMAT_VERSION, m, n, real_flag: real, meta, data };
    let mut text = serde_json::to_string(&file).expect("frame file serialization is infallible");
    text.push('\n');
    text
}

/// Parses frame-file text and validates it as a unit-norm frame.
pub fn decode(text: &str) -> Result<Frame, CliError> {
    let file: FrameFile =
        serde_json::from_str(text).map_err(|e| CliError::Io(format!("malformed frame file: {e}")))?;
    if file.format_version != FORMAT_VERSION {
        return Err(CliError::Io(format!(
            "unsupported format_version {} (this build reads {FORMAT_VERSION})",
            file.format_version
        )));
    }
    if file.data.len() != file.m * file.n {
        return Err(CliError::Io(format!(
            "data holds {} entries, expected m*n = {}",
            file.data.len(),
            file.m * file.n
        )));
    }
    let (m, n) = (file.m, file.n);
    let mut column_major = vec![Complex64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for j in 0..n {
            column_major[i + j * m] = file.data[i * n + j].to_complex();
        }
    }
    let mut frame = Frame::new(m, n, column_major)
        .map_err(|e| CliError::Io(format!("frame file rejected: {e}")))?;
    if frame.is_real() != file.real_flag {
        return Err(CliError::Io(format!(
            "real_flag says {} but the entries say {}",
            file.real_flag,
            frame.is_real()
        )));
    }
    if let Some(meta) = file.meta {
        let family = Family::from_name(&meta.family)
            .map_err(|e| CliError::Io(format!("frame file meta rejected: {e}")))?;
        frame = frame.with_meta(ConstructionDescriptor::new(family, meta.parameters));
    }
    Ok(frame)
}

pub fn save(frame: &Frame, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, encode(frame))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<Frame, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    decode(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use frame_forge_core::constructions::{chirp, gaussian_normalized};

    #[test]
    fn reload_then_save_is_byte_identical() {
        for frame in [chirp(5).unwrap(), gaussian_normalized(4, 9, 11).unwrap()] {
            let first = encode(&frame);
            let second = encode(&decode(&first).unwrap());
            assert_eq!(first, second);
        }
    }

    #[test]
    fn real_frames_store_bare_reals() {
        let text = encode(&gaussian_normalized(3, 5, 0).unwrap());
        assert!(text.contains("\"real_flag\":true"));
        let data = text.split("\"data\":[").nth(1).unwrap();
        assert!(!data.contains('['), "real data must not be pair-encoded: {data}");
    }

    #[test]
    fn decode_round_trips_entries_exactly() {
        let frame = chirp(7).unwrap();
        let back = decode(&encode(&frame)).unwrap();
        assert_eq!(frame.data(), back.data());
        assert_eq!(back.meta().unwrap().param("m"), Some("7"));
    }

    #[test]
    fn version_and_length_are_enforced() {
        let good = encode(&chirp(5).unwrap());
        let bad_version = good.replace("\"format_version\":1", "\"format_version\":9");
        assert!(decode(&bad_version).is_err());
        let bad_dims = good.replace("\"m\":5", "\"m\":6");
        assert!(decode(&bad_dims).is_err());
    }
}
