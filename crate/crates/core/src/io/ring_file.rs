//! Ring JSON: `format_version`, `name`, `rank`, `dual` (0-based), `N[i][j][k]`
//! and optional `local_data` blocks.

use super::{check_version, read_file, IoError, FORMAT_VERSION};
use crate::fusion::FusionRing;
use crate::graph::LocalFusionData;
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    format_version: u32,
    name: String,
    rank: usize,
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    local_data: Vec<LocalFusionData>,
}

/// A parsed and validated ring file.
#[derive(Debug, Clone, PartialEq)]
pub struct RingFile {
    pub ring: FusionRing,
    pub local_data: Vec<LocalFusionData>,
}

impl RingFile {
    pub fn new(ring: FusionRing) -> Self {
        RingFile { ring, local_data: Vec::new() }
    }

    /// Parses and runs the axiom checks; violations are returned inside the error.
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let raw: RawRing = serde_json::from_str(text).map_err(|e| IoError::Malformed(e.to_string()))?;
        check_version(raw.format_version)?;
        if raw.dual.len() != raw.rank {
            return Err(IoError::Malformed(format!("dual has {} entries, rank is {}", raw.dual.len(), raw.rank)));
        }
        let ring = FusionRing::new(raw.name, raw.dual, &raw.n)?;
        let report = ring.validate();
        if !report.is_valid() {
            return Err(IoError::Axioms(report));
        }
        for block in &raw.local_data {
            block.validate()?;
        }
        Ok(RingFile { ring, local_data: raw.local_data })
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        Self::parse(&read_file(path)?)
    }

    /// Canonical text: one line per fusion matrix, one line per local data block.
    pub fn to_canonical(&self) -> String {
        let ring = &self.ring;
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(", ");
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"format_version\": {FORMAT_VERSION},");
        let _ = writeln!(out, "  \"name\": {},", serde_json::to_string(ring.name()).expect("string"));
        let _ = writeln!(out, "  \"rank\": {},", ring.rank());
        let _ = writeln!(out, "  \"dual\": [{}],", join(&mut ring.dual().iter().map(|d| d.to_string())));
        out.push_str("  \"N\": [\n");
        let r = ring.rank();
        for i in 0..r {
            let rows = join(&mut (0..r).map(|j| format!("[{}]", join(&mut (0..r).map(|k| ring.n(i, j, k).to_string())))));
            let sep = if i + 1 < r { "," } else { "" };
            let _ = writeln!(out, "    [{rows}]{sep}");
        }
        if self.local_data.is_empty() {
            out.push_str("  ]\n");
        } else {
            out.push_str("  ],\n  \"local_data\": [\n");
            for (b, block) in self.local_data.iter().enumerate() {
                let sep = if b + 1 < self.local_data.len() { "," } else { "" };
                let _ = writeln!(out, "    {}{sep}", serde_json::to_string(block).expect("serializable"));
            }
            out.push_str("  ]\n");
        }
        out.push_str("}\n");
        out
    }
}

pub fn parse_ring_str(text: &str) -> Result<FusionRing, IoError> {
    Ok(RingFile::parse(text)?.ring)
}

pub fn parse_ring(path: &Path) -> Result<FusionRing, IoError> {
    Ok(RingFile::read(path)?.ring)
}

pub fn serialize_ring(ring: &FusionRing) -> String {
    RingFile::new(ring.clone()).to_canonical()
}
