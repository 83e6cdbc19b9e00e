use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::Reaction;
use crate::error::{Error, Result};
use crate::fracspace::{FracParams, Grid1D};
use crate::fractime::TimeMesh;
use crate::lab::presets::check_hypotheses;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "compare")]
    Compare,
    #[serde(rename = "blowup-a")]
    BlowupA,
    #[serde(rename = "blowup-b")]
    BlowupB,
    #[serde(rename = "blowup-c")]
    BlowupC,
    #[serde(rename = "blowup-d")]
    BlowupD,
    #[serde(rename = "global-a")]
    GlobalA,
    #[serde(rename = "global-b")]
    GlobalB,
    #[serde(rename = "global-c")]
    GlobalC,
    #[serde(rename = "global-d")]
    GlobalD,
    #[serde(rename = "global-e")]
    GlobalE,
    #[serde(rename = "decay-a")]
    DecayA,
    #[serde(rename = "decay-b")]
    DecayB,
    #[serde(rename = "decay-c")]
    DecayC,
    #[serde(rename = "eigen")]
    Eigen,
    #[serde(rename = "verify")]
    Verify,
}

impl Scenario {
    pub const ALL: [Scenario; 15] = [
        Scenario::Compare,
        Scenario::BlowupA,
        Scenario::BlowupB,
        Scenario::BlowupC,
        Scenario::BlowupD,
        Scenario::GlobalA,
        Scenario::GlobalB,
        Scenario::GlobalC,
        Scenario::GlobalD,
        Scenario::GlobalE,
        Scenario::DecayA,
        Scenario::DecayB,
        Scenario::DecayC,
        Scenario::Eigen,
        Scenario::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Compare => "compare",
            Scenario::BlowupA => "blowup-a",
            Scenario::BlowupB => "blowup-b",
            Scenario::BlowupC => "blowup-c",
            Scenario::BlowupD => "blowup-d",
            Scenario::GlobalA => "global-a",
            Scenario::GlobalB => "global-b",
            Scenario::GlobalC => "global-c",
            Scenario::GlobalD => "global-d",
            Scenario::GlobalE => "global-e",
            Scenario::DecayA => "decay-a",
            Scenario::DecayB => "decay-b",
            Scenario::DecayC => "decay-c",
            Scenario::Eigen => "eigen",
            Scenario::Verify => "verify",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub a: f64,
    pub b: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub t_final: f64,
    pub steps: usize,
    /// `1` for a uniform mesh, `r > 1` for nodes `T (j/N)^r`.
    pub grading: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `4(x - a)(b - x)/L²`.
    Bump,
    /// First eigenfunction scaled to unit sup norm.
    Eigen,
    /// The bump with seeded multiplicative noise in `[0.75, 1.25]`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConfig {
    pub profile: Profile,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parameter(format!("unknown report format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

/// A fully resolved scenario: preset defaults overlaid with the file's values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub domain: DomainConfig,
    pub time: TimeConfig,
    pub frac: FracParams,
    pub reaction: Reaction,
    pub initial: InitialConfig,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.domain.a, self.domain.b, self.domain.cells)
    }

    pub fn mesh(&self) -> Result<TimeMesh> {
        if self.time.grading == 1.0 {
            TimeMesh::uniform(self.time.t_final, self.time.steps)
        } else {
            TimeMesh::graded(self.time.t_final, self.time.steps, self.time.grading)
        }
    }

    /// Checks ranges of every field, without the scenario hypotheses.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.mesh()?;
        self.frac.validate()?;
        self.reaction.validate()?;
        if !(self.initial.amplitude.is_finite() && self.initial.amplitude > 0.0) {
            return Err(Error::Parameter(format!(
                "initial amplitude {} must be positive",
                self.initial.amplitude
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    seed: Option<u64>,
    domain: Option<RawDomain>,
    time: Option<RawTime>,
    frac: Option<RawFrac>,
    reaction: Option<RawReaction>,
    initial: Option<RawInitial>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    a: Option<f64>,
    b: Option<f64>,
    cells: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_final: Option<f64>,
    steps: Option<usize>,
    grading: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrac {
    alpha: Option<f64>,
    s: Option<f64>,
    p: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReaction {
    gamma: Option<f64>,
    mu: Option<f64>,
    m: Option<f64>,
    q: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    profile: Option<Profile>,
    amplitude: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<Format>,
}

macro_rules! overlay {
    ($target:expr, $raw:expr, $($field:ident),+) => {
        if let Some(raw) = $raw {
            $(if let Some(v) = raw.$field {
                $target.$field = v;
            })+
        }
    };
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses config text without running the hypothesis checks.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let mut cfg = crate::lab::presets::preset(raw.scenario);
    if let Some(seed) = raw.seed {
        cfg.seed = seed;
    }
    overlay!(cfg.domain, raw.domain, a, b, cells);
    overlay!(cfg.time, raw.time, t_final, steps, grading);
    overlay!(cfg.frac, raw.frac, alpha, s, p);
    overlay!(cfg.reaction, raw.reaction, gamma, mu, m, q);
    overlay!(cfg.initial, raw.initial, profile, amplitude);
    overlay!(cfg.output, raw.output, dir, format);
    cfg.validate()?;
    Ok(cfg)
}

/// Parses, validates and checks the scenario's hypotheses; an eigensolve is
/// run (and cached) when a hypothesis involves λ₁(Ω).
pub fn load_config_str(text: &str) -> Result<ScenarioConfig> {
    let cfg = parse_config(text)?;
    check_hypotheses(&cfg)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    load_config_str(&text)
}
