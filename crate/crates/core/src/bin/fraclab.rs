use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fraclab::lab::{
    check_hypotheses, emit_report, load_config, preset, run_scenario, Format, Scenario, ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "fraclab", version, about = "Time-space fractional p-Laplacian laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First eigenpair of the discrete operator.
    Eigen(Overrides),
    /// Evolve one of the global-existence presets.
    Solve {
        #[arg(long, default_value = "d")]
        case: char,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Ordered initial pairs must stay ordered.
    Compare(Overrides),
    /// Blow-up prediction plus a PDE run.
    Blowup {
        #[arg(long, default_value = "c")]
        case: char,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Algebraic decay envelope of a sink-dominated run.
    Decay {
        #[arg(long, default_value = "b")]
        case: char,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Randomized inequality suite.
    Verify(Overrides),
    /// Run a scenario file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Report directory; defaults to $FRACLAB_OUT, then the config's value.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        macro_rules! set {
            ($src:ident => $dst:expr) => {
                if let Some(v) = self.$src.clone() {
                    $dst = v;
                }
            };
        }
        set!(seed => cfg.seed);
        set!(format => cfg.output.format);
        set!(cells => cfg.domain.cells);
        set!(steps => cfg.time.steps);
        set!(alpha => cfg.frac.alpha);
        set!(s => cfg.frac.s);
        set!(p => cfg.frac.p);
        set!(gamma => cfg.reaction.gamma);
        set!(mu => cfg.reaction.mu);
        set!(m => cfg.reaction.m);
        set!(q => cfg.reaction.q);
        if let Some(dir) = self.out.clone().or_else(|| std::env::var_os("FRACLAB_OUT").map(PathBuf::from)) {
            cfg.output.dir = dir;
        }
    }
}

fn lettered(family: &str, case: char) -> Result<Scenario, fraclab::Error> {
    format!("{family}-{case}").parse()
}

fn resolve(command: Command) -> Result<ScenarioConfig, fraclab::Error> {
    let (mut cfg, overrides) = match command {
        Command::Eigen(o) => (preset(Scenario::Eigen), o),
        Command::Compare(o) => (preset(Scenario::Compare), o),
        Command::Verify(o) => (preset(Scenario::Verify), o),
        Command::Solve { case, overrides } => (preset(lettered("global", case)?), overrides),
        Command::Blowup { case, overrides } => (preset(lettered("blowup", case)?), overrides),
        Command::Decay { case, overrides } => (preset(lettered("decay", case)?), overrides),
        Command::Run { config, overrides } => (load_config(&config)?, overrides),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    check_hypotheses(&cfg)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match emit_report(&report, cfg.output.format, &cfg.output.dir) {
        Ok(path) => println!(
            "{}: {} in {:.2}s, report {}",
            cfg.scenario,
            if report.pass { "pass" } else { "FAIL" },
            report.wall_time,
            path.display()
        ),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
