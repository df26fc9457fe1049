//! Exclusivity-graph analysis of noncontextuality inequalities.
//!
//! The classical (noncontextual) maximum of an inequality is the weighted
//! independence number of its exclusivity graph, the quantum maximum is
//! bounded by the weighted Lovász number, and the clique-constrained packing
//! LP gives the bound implied by requiring pairwise exclusive events to sum
//! to at most one. The [`optics`] module simulates the bosonic-bunching
//! experiments and [`scenario::check_requirements`] shows mechanically why
//! they are not contextuality tests.

pub mod analysis;
pub mod document;
pub mod exact;
pub mod graphs;
pub mod optics;
pub mod scenario;
pub mod theta;

pub use analysis::{analyze, run_builtin, AnalysisError, AnalysisOptions, BoundsReport, Builtin};
pub use document::{parse_scenario, ScenarioDocument};
pub use graphs::{ExactLimits, ExclusivityGraph};
pub use theta::SolverConfig;
