//! Loads a scenario file, runs it and writes JSON and CSV reports.
//!
//! `cargo run --example scenario_config -- configs/global-d.toml`

use fraclab::lab::{emit_report, load_config, load_config_str, run_scenario, Format};

const INLINE: &str = r#"
scenario = "decay-b"
seed = 3

[domain]
cells = 24

[time]
t_final = 10.0
steps = 100
"#;

fn main() -> fraclab::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => load_config_str(INLINE)?,
    };
    let report = run_scenario(&cfg)?;
    let dir = std::env::temp_dir().join("fraclab-reports");
    for fmt in [Format::Json, Format::Csv] {
        println!("wrote {}", emit_report(&report, fmt, &dir)?.display());
    }
    println!("{}: {} ({:.2} s)", cfg.scenario, if report.pass { "pass" } else { "fail" }, report.wall_time);
    if let Some(l) = report.hypotheses.lambda1 {
        println!("lambda1 used by the hypothesis check: {l:.6}");
    }
    Ok(())
}
