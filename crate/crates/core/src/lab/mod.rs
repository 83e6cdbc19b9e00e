//! Scenario presets, the experiment runner and report persistence behind the
//! `fraclab` command line.

mod config;
mod presets;
mod report;
mod run;

pub use config::{
    load_config, load_config_str, parse_config, DomainConfig, Format, InitialConfig, OutputConfig,
    Profile, Scenario, ScenarioConfig, TimeConfig,
};
pub use presets::{cached_eigenpair, check_hypotheses, preset, HypothesisCheck, InfoCheck};
pub use report::{emit_report, format_e12, report_bytes, to_csv, to_json_bytes};
pub use run::{
    initial_field, run_scenario, PairResult, Payload, RunSummary, ScenarioReport, COMPARISON_PAIRS,
    ORDER_TOL, POSITIVITY_TOL,
};
