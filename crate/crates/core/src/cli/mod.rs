// SPDX-License-Identifier: Apache-2.0

//! Scenario files, the run pipeline and report output used by the binary.

pub mod config;
pub mod plot;
pub mod scenario;

pub use config::{load_config, parse_config, InitialState, ScenarioConfig};
pub use plot::emit_plot_script;
pub use scenario::{
    check_row, compute_scenario, csv_string, estimate_file, run_scenario, thread_count, ReportRow,
    ScenarioOutput, ScenarioRun, CSV_HEADER, THREADS_ENV,
};

/// Process exit status for an error: 2 for bad input, 3 for numerical
/// failures.
pub fn exit_code(err: &crate::Error) -> i32 {
    if err.is_input_error() {
        2
    } else {
        3
    }
}
