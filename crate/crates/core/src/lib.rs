//! Numerical obstructions to unitary categorification of fusion rings, Perron–Frobenius
//! theory for nonnegative matrices and quantum channels, principal-graph checks, and
//! Fourier inequalities on cyclic groups.
//!
//! ```
//! use qfourier_core::{criteria::localized_criterion, fusion::r4k, PsdPolicy};
//!
//! let v = localized_criterion(&r4k(5), &[1, 2], 3, &PsdPolicy::default()).unwrap();
//! assert!(v.fails());
//! ```

pub mod channel;
pub mod criteria;
pub mod fusion;
pub mod graph;
pub mod group;
pub mod io;
pub mod linalg;

pub use channel::{ChannelError, QuantumChannel};
pub use criteria::{CriteriaError, RingContext, TwistMode, UnitaryKind};
pub use fusion::{FusionError, FusionRing, RingProfile, ValidationReport};
pub use graph::{BipartiteGraph, GraphError, LocalFusionData};
pub use group::{GroupError, GroupFunction};
pub use io::{IoError, Report, RunConfig};
pub use linalg::{CriterionVerdict, LinalgError, PfResult, PsdPolicy, VerdictStatus, Witness};
