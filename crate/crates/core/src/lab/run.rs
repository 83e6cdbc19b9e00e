use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    compare_runs, decay_fit, inequality_suite, predict_blowup_case, solve_pde_with, BlowupPrediction,
    ComparisonReport, DecayEnvelope, InequalityReport, NodeDiagnostics, RunStatus, SolverOptions,
    Trajectory,
};
use crate::eigen::RESIDUAL_TOL;
use crate::error::{Error, Result};
use crate::fracspace::{assemble_weights, Field, Grid1D, KernelWeights};
use crate::lab::config::{Profile, Scenario, ScenarioConfig};
use crate::lab::presets::{blowup_case, cached_eigenpair, check_hypotheses, decay_rate, HypothesisCheck};

/// Number of ordered initial pairs in the comparison preset.
pub const COMPARISON_PAIRS: usize = 20;
/// Relative tolerance on order violations and negative values.
pub const ORDER_TOL: f64 = 1e-6;
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub nodes: usize,
    pub max_sup: f64,
    pub final_l2: f64,
    pub min_value: f64,
    pub diagnostics: Vec<NodeDiagnostics>,
}

impl RunSummary {
    fn new(traj: &Trajectory) -> Self {
        Self {
            status: traj.status,
            nodes: traj.diagnostics.len(),
            max_sup: traj.sup_series().into_iter().fold(0.0, f64::max),
            final_l2: traj.diagnostics.last().map_or(f64::NAN, |d| d.l2),
            min_value: traj.min_value(),
            diagnostics: traj.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResult {
    pub cells: usize,
    pub comparison: ComparisonReport,
    pub u_status: RunStatus,
    pub v_status: RunStatus,
    pub min_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Comparison {
        pairs: Vec<PairResult>,
        max_violation: f64,
        min_value: f64,
        scale: f64,
    },
    Blowup {
        prediction: Option<BlowupPrediction>,
        t_detect: Option<f64>,
        run: RunSummary,
    },
    Boundedness {
        l2_nonincreasing: bool,
        requires_monotone_l2: bool,
        run: RunSummary,
    },
    Decay {
        envelope: Option<DecayEnvelope>,
        run: RunSummary,
    },
    Eigen {
        lambda1: f64,
        quotient_min: f64,
        residual: f64,
        iterations: usize,
        sign_definite: bool,
        centers: Vec<f64>,
        eigenfunction: Vec<f64>,
    },
    Verify {
        suite: InequalityReport,
    },
    Failed {
        message: String,
    },
}

impl Payload {
    /// The preset's pass criterion, read off the payload alone.
    pub fn passes(&self) -> bool {
        match self {
            Payload::Comparison { pairs, max_violation, min_value, scale } => {
                pairs.iter().all(|p| p.comparison.ordered)
                    && *max_violation <= ORDER_TOL * scale
                    && *min_value >= -POSITIVITY_TOL * scale
            }
            Payload::Blowup { t_detect, .. } => t_detect.is_some_and(f64::is_finite),
            Payload::Boundedness { l2_nonincreasing, requires_monotone_l2, run } => {
                run.status == RunStatus::Completed && (*l2_nonincreasing || !requires_monotone_l2)
            }
            Payload::Decay { envelope, run } => {
                run.status == RunStatus::Completed && envelope.as_ref().is_some_and(|e| e.bounded)
            }
            Payload::Eigen { residual, sign_definite, .. } => *residual <= RESIDUAL_TOL && *sign_definite,
            Payload::Verify { suite } => suite.passed,
            Payload::Failed { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub hypotheses: HypothesisCheck,
    pub payload: Payload,
    pub pass: bool,
    /// Seconds spent in [`run_scenario`]; kept out of serialized reports.
    #[serde(skip)]
    pub wall_time: f64,
}

pub fn initial_field(cfg: &ScenarioConfig, grid: &Grid1D, rng: &mut ChaCha8Rng) -> Result<Field> {
    let (a, b) = (grid.a(), grid.b());
    let len2 = grid.length() * grid.length();
    let amp = cfg.initial.amplitude;
    let bump = Field::from_fn(*grid, |x| amp * 4.0 * (x - a) * (b - x) / len2);
    Ok(match cfg.initial.profile {
        Profile::Bump => bump,
        Profile::Random => {
            let noisy = bump.values().iter().map(|v| v * rng.gen_range(0.75..1.25)).collect();
            Field::new(*grid, noisy)?
        }
        Profile::Eigen => {
            let pair = cached_eigenpair(grid, cfg.frac.s, cfg.frac.p)?;
            let xi = &pair.eigenfunction;
            xi.scaled(amp / xi.sup_norm())
        }
    })
}

fn trajectory(cfg: &ScenarioConfig, weights: &KernelWeights, u0: &Field) -> Result<Trajectory> {
    solve_pde_with(u0, weights, &cfg.frac, &cfg.reaction, &cfg.mesh()?, &SolverOptions::default())
}

fn comparison(cfg: &ScenarioConfig) -> Result<Payload> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cells_max = cfg.domain.cells.max(8);
    let jobs: Vec<(usize, u64)> = (0..COMPARISON_PAIRS).map(|_| (rng.gen_range(8..=cells_max), rng.gen())).collect();
    let pairs: Vec<PairResult> = jobs
        .into_par_iter()
        .map(|(cells, seed)| -> Result<PairResult> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let grid = Grid1D::new(cfg.domain.a, cfg.domain.b, cells)?;
            let weights = assemble_weights(&grid, cfg.frac.s, cfg.frac.p)?;
            let lower = initial_field(cfg, &grid, &mut rng)?;
            let gap = cfg.initial.amplitude * 0.3;
            let shifted = lower.values().iter().map(|x| x + rng.gen_range(0.0..gap)).collect();
            let upper = Field::new(grid, shifted)?;
            let u = trajectory(cfg, &weights, &lower)?;
            let v = trajectory(cfg, &weights, &upper)?;
            let comparison = compare_runs(&u, &v, ORDER_TOL * upper.sup_norm().max(1.0))?;
            Ok(PairResult {
                cells,
                comparison,
                u_status: u.status,
                v_status: v.status,
                min_value: u.min_value().min(v.min_value()),
            })
        })
        .collect::<Result<_>>()?;
    let max_violation = pairs.iter().map(|p| p.comparison.max_violation).fold(0.0, f64::max);
    let min_value = pairs.iter().map(|p| p.min_value).fold(f64::INFINITY, f64::min);
    let scale = 1.3 * cfg.initial.amplitude.max(1.0);
    Ok(Payload::Comparison { pairs, max_violation, min_value, scale })
}

fn evolve(cfg: &ScenarioConfig, hyp: &HypothesisCheck) -> Result<Payload> {
    let grid = cfg.grid()?;
    let weights = assemble_weights(&grid, cfg.frac.s, cfg.frac.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let u0 = initial_field(cfg, &grid, &mut rng)?;
    let traj = trajectory(cfg, &weights, &u0)?;
    let run = RunSummary::new(&traj);
    if let Some(case) = blowup_case(cfg.scenario) {
        let prediction = predict_blowup_case(case, &cfg.reaction, cfg.frac.alpha, cfg.frac.p, hyp.lambda1).ok();
        return Ok(Payload::Blowup { prediction, t_detect: traj.t_detect(), run });
    }
    if let Some(r) = decay_rate(cfg.scenario, &cfg.reaction) {
        let envelope = decay_fit(&traj, cfg.frac.alpha, r).ok();
        return Ok(Payload::Decay { envelope, run });
    }
    let l2 = traj.l2_series();
    Ok(Payload::Boundedness {
        l2_nonincreasing: l2.windows(2).all(|w| w[1] <= w[0]),
        requires_monotone_l2: cfg.scenario == Scenario::GlobalD,
        run,
    })
}

fn eigen(cfg: &ScenarioConfig) -> Result<Payload> {
    let grid = cfg.grid()?;
    let pair = cached_eigenpair(&grid, cfg.frac.s, cfg.frac.p)?;
    let xi = &pair.eigenfunction;
    Ok(Payload::Eigen {
        lambda1: pair.lambda1,
        quotient_min: pair.quotient_min,
        residual: pair.residual,
        iterations: pair.iterations,
        sign_definite: xi.min() >= 0.0 || xi.max() <= 0.0,
        centers: grid.centers(),
        eigenfunction: xi.values().to_vec(),
    })
}

/// Runs a preset after re-checking its hypotheses. Failures inside the run
/// end up in a [`Payload::Failed`] report; hypothesis violations are errors.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let start = Instant::now();
    cfg.validate()?;
    let hypotheses = check_hypotheses(cfg)?;
    let outcome = match cfg.scenario {
        Scenario::Compare => comparison(cfg),
        Scenario::Eigen => eigen(cfg),
        Scenario::Verify => inequality_suite(cfg.seed).map(|suite| Payload::Verify { suite }),
        _ => evolve(cfg, &hypotheses),
    };
    let payload = match outcome {
        Ok(p) => p,
        Err(e @ Error::Hypothesis { .. }) => return Err(e),
        Err(e) => Payload::Failed { message: e.to_string() },
    };
    let pass = payload.passes();
    Ok(ScenarioReport { config: cfg.clone(), hypotheses, payload, pass, wall_time: start.elapsed().as_secs_f64() })
}
