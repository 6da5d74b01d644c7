//! Library half of the `polyopt` command: problem files and command dispatch.

pub mod app;
pub mod problem;

pub use app::{run, Outcome, EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_VERDICT};
pub use problem::{parse_order_range, Problem, ProblemError, ProblemFile};
