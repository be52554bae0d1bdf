//! File formats, the bundled corpus, run configuration and the batch runner.
//!
//! Every file format carries a `format_version` field; the current version of
//! each is [`FORMAT_VERSION`].

mod batch;
pub mod corpus;
mod graph_file;
mod kraus;
mod ring_file;

pub use batch::{
    run_batch, run_rings, CriterionKind, OutputFormat, Report, RingSummary, RunConfig, TaskRecord, TaskStatus, Totals,
};
pub use graph_file::{graph_report, parse_graph, parse_graph_str, DimSpec, GraphFile, GraphReport};
pub use kraus::{parse_kraus, parse_kraus_str, serialize_kraus};
pub use ring_file::{parse_ring, parse_ring_str, serialize_ring, RingFile};

use crate::channel::ChannelError;
use crate::fusion::{FusionError, ValidationReport};
use crate::graph::GraphError;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("UNREADABLE_FILE: {path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },
    #[error("UNSUPPORTED_VERSION: format_version {found}, expected {FORMAT_VERSION}")]
    UnsupportedVersion { found: u32 },
    #[error("MALFORMED_SHAPE: {0}")]
    Malformed(String),
    #[error("{0}")]
    Ring(#[from] FusionError),
    #[error("AXIOM_VIOLATION: {}", describe_violations(.0))]
    Axioms(ValidationReport),
    #[error("GRAPH_FORMAT: line {line}: {message}")]
    GraphSyntax { line: usize, message: String },
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Channel(#[from] ChannelError),
}

impl IoError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Unreadable { .. } => "UNREADABLE_FILE",
            IoError::UnsupportedVersion { .. } => "UNSUPPORTED_VERSION",
            IoError::Malformed(_) => "MALFORMED_SHAPE",
            IoError::Ring(FusionError::MalformedShape(_)) => "MALFORMED_SHAPE",
            IoError::Ring(FusionError::NegativeCoefficient { .. }) => "NEGATIVE_COEFFICIENT",
            IoError::Ring(FusionError::DualNotInvolution { .. }) => "DUAL_NOT_INVOLUTION",
            IoError::Ring(_) => "RING_ERROR",
            IoError::Axioms(_) => "AXIOM_VIOLATION",
            IoError::GraphSyntax { .. } => "GRAPH_FORMAT",
            IoError::Graph(_) => "GRAPH_ERROR",
            IoError::Channel(_) => "KRAUS_ERROR",
        }
    }
}

fn describe_violations(report: &ValidationReport) -> String {
    report
        .violations
        .iter()
        .map(|v| format!("{:?} at {:?}", v.axiom, v.indices))
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Unreadable { path: path.to_path_buf(), source })
}

pub(crate) fn check_version(found: u32) -> Result<(), IoError> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(IoError::UnsupportedVersion { found })
    }
}
