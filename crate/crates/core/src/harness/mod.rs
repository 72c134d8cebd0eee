//! Scenario loading, benchmark orchestration and trace export.

mod bench;
mod export;
mod scenario;
mod summary;

pub use bench::{
    expand_grid, run_benchmark, run_benchmark_table, run_scenario, scale_grid, sweep, tolerance_scan, tolerates,
    BenchmarkCase, ScanPoint, SweepCase, BENCHMARK_CASES,
};
pub use export::{continuous_csv, export_trace, fmt_sig, steps_csv, summary_json, CONTINUOUS_HEADER, STEPS_HEADER};
pub use scenario::{benchmark_start, load_scenario, load_scenario_with, parse_scenario, Scenario, BENCH_FOOT_GAP, BENCH_THETA0, BENCH_Y0};
pub use summary::{band_half_width, summarize, RunSummary, ViolationEntry, BAND_FRACTION, BAND_HOLD};
