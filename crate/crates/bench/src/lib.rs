//! Benchmark harness over the orbench environments: paired multi-method
//! evaluation, performance ratios, a cross-entropy learning baseline and
//! CSV/JSON reports.

pub mod benchmark;
pub mod cem;
pub mod error;
pub mod methods;
pub mod report;

pub use benchmark::{episode_seeds, mean_std, performance_ratio, raw_ratio, run_benchmark, BenchmarkRun};
pub use cem::{cem_train, evaluate_policy, small_binkp_config, CemOptions, CemResult, LinearPolicy};
pub use error::{BenchError, Result};
pub use methods::{env_methods, reference_method, EpisodeOutcome, MethodRunner};
pub use report::{emit_report, parse_report, read_report, write_report, BenchmarkReport, ReportFormat, ReportRow, CSV_HEADER};
