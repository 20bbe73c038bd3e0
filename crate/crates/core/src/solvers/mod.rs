//! Iteration engines, Cauchy diagnostics and point extraction.

pub mod cauchy;
pub mod diagnostics;
pub mod lemma;
pub mod solve;
pub mod trace;
pub mod witness;

pub use cauchy::{certify_cauchy, CauchyCertificate, Route, RouteSpec};
pub use diagnostics::{
    cauchy_diagnostic, cauchy_diagnostic_with, even_collapse_diagnostic, DIAGNOSTIC_SLACK,
};
pub use lemma::{check_e_conditions, PsiSpec};
pub use solve::{solve_best_proximity, solve_common_fixed_point, solve_fixed_point, SolveResult};
pub use trace::{
    alternating_trace, alternating_trace_bounded, cyclic_even_trace, picard_trace,
    picard_trace_bounded, AlternatingSchedule, CyclicRun, Generator, IterationTrace, TraceStatus,
    DEFAULT_ESCAPE_BOUND,
};
pub use witness::{extract_noncauchy_witness, NonCauchyOutcome, NonCauchyWitness, Occurrence};
