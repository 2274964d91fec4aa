//! Batch front end: reads a JSON problem specification, evaluates star
//! products, module products and connection forms, runs verification suites
//! and writes JSON-line records.

pub mod poly;
pub mod records;
pub mod run;
pub mod spec;

pub use run::{cmd_dump_r, cmd_star, cmd_verify, RunOptions, EXIT_CHECK_FAILED, EXIT_OK, EXIT_SETUP};
pub use spec::{Problem, ProblemSpec, SpecError};
