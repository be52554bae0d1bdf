//! Kraus JSON: `{"format_version": 1, "dim": n, "kraus": [F_1, ...]}` with each
//! `F` an `n × n` array of `[re, im]` pairs.

use super::{check_version, read_file, IoError, FORMAT_VERSION};
use crate::channel::QuantumChannel;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKraus {
    format_version: u32,
    dim: usize,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn parse_kraus_str(text: &str) -> Result<QuantumChannel, IoError> {
    let raw: RawKraus = serde_json::from_str(text).map_err(|e| IoError::Malformed(e.to_string()))?;
    check_version(raw.format_version)?;
    let n = raw.dim;
    let mut ops = Vec::with_capacity(raw.kraus.len());
    for (a, f) in raw.kraus.iter().enumerate() {
        if f.len() != n || f.iter().any(|row| row.len() != n) {
            return Err(IoError::Malformed(format!("Kraus operator {a} is not {n}x{n}")));
        }
        ops.push(DMatrix::from_fn(n, n, |r, c| Complex64::new(f[r][c][0], f[r][c][1])));
    }
    Ok(QuantumChannel::new(ops)?)
}

pub fn parse_kraus(path: &Path) -> Result<QuantumChannel, IoError> {
    parse_kraus_str(&read_file(path)?)
}

/// One matrix row per line.
pub fn serialize_kraus(phi: &QuantumChannel) -> String {
    let n = phi.dim();
    let num = |x: f64| serde_json::to_string(&x).expect("finite");
    let mut out = format!("{{\n  \"format_version\": {FORMAT_VERSION},\n  \"dim\": {n},\n  \"kraus\": [\n");
    let ops = phi.kraus();
    for (a, f) in ops.iter().enumerate() {
        out.push_str("    [\n");
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| format!("[{}, {}]", num(f[(r, c)].re), num(f[(r, c)].im))).collect();
            let sep = if r + 1 < n { "," } else { "" };
            let _ = writeln!(out, "      [{}]{sep}", row.join(", "));
        }
        out.push_str(if a + 1 < ops.len() { "    ],\n" } else { "    ]\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::examples;

    #[test]
    fn round_trip() {
        for phi in [examples::reset(), examples::pinching(3), examples::flip_hadamard()] {
            let back = parse_kraus_str(&serialize_kraus(&phi)).unwrap();
            assert_eq!(back.kraus(), phi.kraus());
        }
    }

    #[test]
    fn errors() {
        let bad_shape = r#"{"format_version":1,"dim":2,"kraus":[[[[1,0]]]]}"#;
        assert_eq!(parse_kraus_str(bad_shape).unwrap_err().code(), "MALFORMED_SHAPE");
        let empty = r#"{"format_version":1,"dim":2,"kraus":[]}"#;
        assert_eq!(parse_kraus_str(empty).unwrap_err().code(), "KRAUS_ERROR");
        let version = r#"{"format_version":3,"dim":1,"kraus":[[[[1,0]]]]}"#;
        assert_eq!(parse_kraus_str(version).unwrap_err().code(), "UNSUPPORTED_VERSION");
    }
}
