//! The problem model with implicit variables and the verdict engine for its
//! M-stationarity notions, qualification conditions and their implications.
//!
//! All multiplier-based statements quantify over `K(z̄)`. Coderivatives of
//! polyhedral maps are constant on the strata of the arrangement induced by
//! the pieces of `gph F` and `gph G`, so checking one representative per
//! stratum decides them.

mod checks;
mod objective;
mod pipeline;
mod program;
mod verdict;

pub use checks::{check_cq, check_stationarity, Session};
pub use objective::{AffineDto, Objective, ObjectiveDto};
pub use pipeline::{convex_sufficiency, pipeline, EdgeStatus, NodeStatus, PipelineEdge, PipelineNode, PipelineReport};
pub use program::{DerivedMaps, ImplicitProgram, KStratum, ProgramDto, Structure};
pub use verdict::{CheckKind, Verdict, VerdictDto, Witnesses, WitnessesDto};
