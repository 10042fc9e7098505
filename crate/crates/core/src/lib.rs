//! Ruppert's Delaunay refinement and the machinery to study its non-termination:
//! explicit counterexample constructions, a fixed-point threshold solver, and
//! detection of self-similar insertion cycles in refinement traces.

pub mod analysis;
pub mod cdt;
pub mod construction;
pub mod geom;
pub mod io;
pub mod refine;

pub use analysis::{
    detect_self_similarity, match_expected_sequence, precision_horizon, CycleReport, ExpectedCycle, SequenceReport,
};
pub use cdt::{CdtError, Pslg, Triangulation};
pub use construction::{construct, solve_threshold, ConstructionError, ConstructionResult, Example, Threshold};
pub use geom::{GeomError, Orientation, Point2, RigidMotion, Segment};
pub use io::IoError;
pub use refine::{
    refine, EventKind, QueuePolicy, RefineError, RefinementConfig, RefinementOutcome, RefinementTrace, Status,
    TraceEvent,
};
