//! Files bundled under `crates/core/corpus/`.

use super::{parse_kraus_str, RingFile};
use crate::channel::QuantumChannel;
use crate::fusion::{self, FusionRing};

macro_rules! bundled {
    ($($file:literal),* $(,)?) => {
        &[$(($file, include_str!(concat!("../../corpus/", $file)))),*]
    };
}

/// `(file name, contents)` of every bundled ring.
pub const RINGS: &[(&str, &str)] = bundled!(
    "z1.ring", "z2.ring", "z3.ring", "z4.ring", "z5.ring", "z6.ring", "z7.ring", "z8.ring", "z2xz2.ring", "fib.ring",
    "r4_3.ring", "r4_4.ring", "r4_5.ring", "r4_6.ring", "r4_7.ring", "r4_8.ring", "r6.ring",
);

pub const D5_GRAPH: &str = include_str!("../../corpus/d5.graph");

/// Amplitude damping with full damping: every state is sent to `|0⟩⟨0|`.
pub const FULL_DAMP_KRAUS: &str = include_str!("../../corpus/full_damp.kraus.json");

/// Pinching onto the diagonal of `M_3`.
pub const PINCHING_KRAUS: &str = include_str!("../../corpus/pinching3.kraus.json");

pub fn ring_files() -> Vec<RingFile> {
    RINGS.iter().map(|(name, text)| RingFile::parse(text).unwrap_or_else(|e| panic!("bundled {name}: {e}"))).collect()
}

pub fn rings() -> Vec<FusionRing> {
    ring_files().into_iter().map(|f| f.ring).collect()
}

pub fn ring(file: &str) -> Option<FusionRing> {
    RINGS.iter().find(|(name, _)| *name == file).map(|(_, text)| RingFile::parse(text).expect("bundled ring").ring)
}

pub fn full_damp() -> QuantumChannel {
    parse_kraus_str(FULL_DAMP_KRAUS).expect("bundled channel")
}

pub fn pinching() -> QuantumChannel {
    parse_kraus_str(PINCHING_KRAUS).expect("bundled channel")
}

/// The built-in ring each bundled file should contain.
pub fn expected(file: &str) -> Option<FusionRing> {
    let stem = file.strip_suffix(".ring")?;
    Some(match stem {
        "z2xz2" => fusion::product(&fusion::cyclic(2), &fusion::cyclic(2)),
        "fib" => fusion::fibonacci(),
        "r6" => fusion::r6(),
        s if s.starts_with("r4_") => fusion::r4k(s[3..].parse().ok()?),
        s if s.starts_with('z') => fusion::cyclic(s[1..].parse().ok()?),
        _ => return None,
    })
}
