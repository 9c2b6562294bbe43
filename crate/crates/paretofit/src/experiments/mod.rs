//! Deterministic experiment runner behind the `paretofit` CLI.
//!
//! Experiments are configured by strict JSON files (unknown keys are
//! rejected), run repeats in parallel with the seed schedule
//! `seed_r = base_seed + r`, and emit `results.csv` (long format),
//! `summary.json` (aggregates plus the resolved config) and `front.svg`
//! (a static polyline report). Identical configs produce byte-identical
//! `results.csv`.

pub mod config;
pub mod output;
mod parallel;
mod runs;

pub use config::{
    load_config, AdversarialConfig, ExperimentKind, FairnessConfig, FairnessSource,
    FrontCompareConfig, HvReportConfig, MethodName, PenaltyConfig, SolverConfig, SpectrumConfig,
    SynthSweepConfig, TrainConfig,
};
pub use output::{emit_outputs, parse_results_csv, results_csv, RunOutput, Series};
pub use parallel::{parallel_map, THREADS_ENV};
pub use runs::{
    run_adversarial_contrast, run_fairness, run_front_compare, run_hv_report, run_synth_sweep,
};
