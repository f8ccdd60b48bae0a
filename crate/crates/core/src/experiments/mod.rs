//! Seeded Monte Carlo engine and the verification suites built on it.
//!
//! Trial `i` of a run draws from `seed.child(i)` and results are reduced in
//! index order, so reports do not depend on the number of worker threads.

mod engine;
mod pipeline;
pub mod stats;
mod suites;

pub use engine::{
    estimate_probability, run_trials, write_csv, BoundKind, Check, ExperimentConfig, ExperimentReport, DEFAULT_A,
    DEFAULT_C, DEFAULT_CONFIDENCE,
};
pub use pipeline::{
    counterexample_pipeline, counterexample_pipeline_with_guard, PipelineOptions, PipelineReport, PipelineRow,
    PipelineSummary, UnitarySource, GAP_TOLERANCE, NO_VIOLATION_NOTE, SUBADDITIVITY_SLACK,
};
pub use suites::{
    g_second_moment, hhl_bounds, levy_bound, levy_exact_tail, polar_cap_bound, polar_cap_exact, prop5_bound,
    random_density, verify_bounds, verify_fg, verify_geometric, verify_hayden, verify_hhl, verify_independence,
    verify_levy, verify_lipschitz, verify_median_lemma, verify_pinching, verify_prop5, FgRow, LevyStatistic,
    GEOMETRIC_MAX_DIM,
};
