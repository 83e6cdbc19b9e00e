use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::lab::config::Format;
use crate::lab::run::{Payload, RunSummary, ScenarioReport};

/// Compact JSON with every float written as C's `%.12e`.
struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_e12(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `%.12e`: twelve mantissa digits, signed exponent of at least two digits.
pub fn format_e12(value: f64) -> String {
    if !value.is_finite() {
        return "null".into();
    }
    let s = format!("{value:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Serializes with keys sorted at every level.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let tree = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloat);
    tree.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn trajectory_rows(run: &RunSummary, out: &mut String) {
    out.push_str("t,l2,sup,gagliardo_p,dalpha_l2,status\n");
    for d in &run.diagnostics {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_e12(d.t),
            format_e12(d.l2),
            format_e12(d.sup),
            format_e12(d.gagliardo_p),
            format_e12(d.dalpha_l2),
            run.status.label()
        ));
    }
}

/// CSV body for a report. Trajectory payloads give one row per accepted node
/// (`t,l2,sup,gagliardo_p,dalpha_l2,status`); comparison gives one row per
/// pair, eigen one row per cell, verify one row per inequality.
pub fn to_csv(report: &ScenarioReport) -> String {
    let mut out = String::new();
    match &report.payload {
        Payload::Blowup { run, .. } | Payload::Boundedness { run, .. } | Payload::Decay { run, .. } => {
            trajectory_rows(run, &mut out)
        }
        Payload::Comparison { pairs, .. } => {
            out.push_str("pair,cells,regime,max_violation,frames_compared,ordered,min_value\n");
            for (i, p) in pairs.iter().enumerate() {
                out.push_str(&format!(
                    "{i},{},{},{},{},{},{}\n",
                    p.cells,
                    p.comparison.regime.name(),
                    format_e12(p.comparison.max_violation),
                    p.comparison.frames_compared,
                    p.comparison.ordered,
                    format_e12(p.min_value)
                ));
            }
        }
        Payload::Eigen { centers, eigenfunction, .. } => {
            out.push_str("x,xi\n");
            for (x, v) in centers.iter().zip(eigenfunction) {
                out.push_str(&format!("{},{}\n", format_e12(*x), format_e12(*v)));
            }
        }
        Payload::Verify { suite } => {
            out.push_str("name,instances,min_slack,passed\n");
            for e in &suite.entries {
                out.push_str(&format!("{},{},{},{}\n", e.name, e.instances, format_e12(e.min_slack), e.passed));
            }
        }
        Payload::Failed { message } => {
            out.push_str("error\n");
            out.push_str(&format!("\"{}\"\n", message.replace('"', "\"\"")));
        }
    }
    out
}

pub fn report_bytes(report: &ScenarioReport, fmt: Format) -> Result<Vec<u8>> {
    match fmt {
        Format::Json => to_json_bytes(report),
        Format::Csv => Ok(to_csv(report).into_bytes()),
    }
}

/// Writes `<scenario>-seed<seed>.<ext>` into `dir` and returns its path.
pub fn emit_report(report: &ScenarioReport, fmt: Format, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let ext = match fmt {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let path = dir.join(format!("{}-seed{}.{ext}", report.config.scenario, report.config.seed));
    std::fs::write(&path, report_bytes(report, fmt)?)?;
    Ok(path)
}
