//! Test functions, error measurement and the table and contour drivers.

mod contour;
mod errors;
mod functions;
mod tables;

pub use contour::emit_contour;
pub use errors::{
    compute_errors, pollution_mask, pollution_radius, ErrorReport, PollutionMask, DEFAULT_ERROR_NODES,
};
pub use functions::{f1, f2, Smoothness, TestFunction, FUNCTION_NAMES};
pub use tables::{
    format_sci, run_degree, run_experiment, Case, ExperimentOptions, ExperimentTable, ProjectionRule, TableRow,
    CASES,
};
