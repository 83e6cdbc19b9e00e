use serde::Serialize;

use crate::dynamics::reaction::{ComparisonRegime, Reaction};
use crate::dynamics::stepper::Trajectory;
use crate::error::{Error, Result};
use crate::fractime::{gamma_fn, ScalarHistory};

const EQ_TOL: f64 = 1e-12;

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlowupCase {
    A,
    B,
    C,
    D,
}

impl BlowupCase {
    pub const ALL: [BlowupCase; 4] = [BlowupCase::A, BlowupCase::B, BlowupCase::C, BlowupCase::D];

    pub fn letter(self) -> char {
        match self {
            BlowupCase::A => 'a',
            BlowupCase::B => 'b',
            BlowupCase::C => 'c',
            BlowupCase::D => 'd',
        }
    }

    /// `k = m - 1`, or `q - 2` in case (b); in case (d) the two agree.
    pub fn k(self, r: &Reaction) -> f64 {
        match self {
            BlowupCase::B => r.q - 2.0,
            _ => r.m - 1.0,
        }
    }

    /// Each hypothesis clause with whether it holds. Clauses on λ₁(Ω) are
    /// skipped when `lambda1` is `None`.
    pub fn clauses(self, r: &Reaction, p: f64, lambda1: Option<f64>) -> Vec<(&'static str, bool)> {
        let (g, mu, m, q) = (r.gamma, r.mu, r.m, r.q);
        let mut out = Vec::new();
        match self {
            BlowupCase::A => {
                out.push(("p = q ≥ 2", eq(p, q) && p >= 2.0));
                out.push(("m > 1", m > 1.0));
                out.push(("γ > 0", g > 0.0));
                if let Some(l) = lambda1 {
                    out.push(("λ₁(Ω) ≥ μ", l >= mu));
                }
            }
            BlowupCase::B => {
                out.push(("p - 1 = m ≥ 1", eq(p - 1.0, m) && m >= 1.0));
                out.push(("q > 2", q > 2.0));
                out.push(("μ > 0", mu > 0.0));
                if let Some(l) = lambda1 {
                    out.push(("λ₁(Ω) ≥ γ", l >= g));
                }
            }
            BlowupCase::C => {
                out.push(("p ≥ 2", p >= 2.0));
                out.push(("m > 1", m > 1.0));
                out.push(("q ≥ 1", q >= 1.0));
                out.push(("γ > 0", g > 0.0));
                out.push(("μ ≤ 0", mu <= 0.0));
            }
            BlowupCase::D => {
                out.push(("p ≥ 2", p >= 2.0));
                out.push(("m + 1 = q > 2", eq(m + 1.0, q) && q > 2.0));
                out.push(("γ > 0", g > 0.0));
                out.push(("μ > 0", mu > 0.0));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupPrediction {
    pub case: BlowupCase,
    pub k: f64,
    pub alpha: f64,
    /// Pole of the subsolution `z(t) = b/(b - t)^{2/(m-1)}`; equal to `t_star`.
    pub b: f64,
    /// `(k Γ(2-α))^{2/(2-2α-k)}`.
    pub t_star: f64,
    /// The exponent `2/(2-2α-k)`.
    pub exponent: f64,
    /// Set when `2 - 2α - k < 0`, a range where the bound is not discussed.
    pub negative_exponent: bool,
    pub finite: bool,
}

fn blowup_time(k: f64, alpha: f64) -> Result<(f64, f64)> {
    let denom = 2.0 - 2.0 * alpha - k;
    if denom.abs() < EQ_TOL {
        return Err(Error::DegenerateExponent { k, alpha });
    }
    let exponent = 2.0 / denom;
    Ok(((k * gamma_fn(2.0 - alpha)?).powf(exponent), exponent))
}

/// Blow-up time bound for the given case after checking its hypotheses.
pub fn predict_blowup_case(
    case: BlowupCase,
    reaction: &Reaction,
    alpha: f64,
    p: f64,
    lambda1: Option<f64>,
) -> Result<BlowupPrediction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    let failed: Vec<&str> = case
        .clauses(reaction, p, lambda1)
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(c, _)| c)
        .collect();
    if !failed.is_empty() {
        return Err(Error::Regime(format!("case ({}) requires {}", case.letter(), failed.join(", "))));
    }
    let k = case.k(reaction);
    let (t_star, exponent) = blowup_time(k, alpha)?;
    Ok(BlowupPrediction {
        case,
        k,
        alpha,
        b: t_star,
        t_star,
        exponent,
        negative_exponent: exponent < 0.0,
        finite: t_star.is_finite() && t_star > 0.0,
    })
}

/// [`predict_blowup_case`] for the first of cases (a)-(d) whose hypotheses hold.
pub fn predict_blowup(reaction: &Reaction, alpha: f64, p: f64, lambda1: Option<f64>) -> Result<BlowupPrediction> {
    let mut reasons = Vec::new();
    for case in BlowupCase::ALL {
        match predict_blowup_case(case, reaction, alpha, p, lambda1) {
            Err(Error::Regime(msg)) => reasons.push(msg),
            other => return other,
        }
    }
    Err(Error::Regime(reasons.join("; ")))
}

/// `b/(b - t)^{2/(m-1)}` with `b = ((m-1)Γ(2-α))^{2/(3-2α-m)}`.
pub fn subsolution_z(t: f64, m: f64, alpha: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::Parameter(format!("m = {m} must exceed 1")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} is negative")));
    }
    let (b, _) = blowup_time(m - 1.0, alpha)?;
    if t >= b {
        return Err(Error::Divergence { t, pole: b });
    }
    Ok(b / (b - t).powf(2.0 / (m - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEnvelope {
    pub r: f64,
    pub alpha: f64,
    /// `max_t sup|u(t)| (1 + t^{α/r})`.
    pub m_est: f64,
    /// Maximum of the statistic over the last quarter of the nodes.
    pub tail_max: f64,
    /// Maximum over the nodes before the last quarter.
    pub early_max: f64,
    /// `tail_max ≤ 1.05 · early_max`: no upward trend at the end of the run.
    pub bounded: bool,
}

fn envelope(times: &[f64], sups: &[f64], alpha: f64, r: f64) -> Result<DecayEnvelope> {
    if !(r > 0.0) {
        return Err(Error::Parameter(format!("decay exponent r = {r} must be positive")));
    }
    if times.len() < 4 {
        return Err(Error::InsufficientData(format!("{} nodes are too few for a decay fit", times.len())));
    }
    let stat: Vec<f64> = times.iter().zip(sups).map(|(t, s)| s * (1.0 + t.powf(alpha / r))).collect();
    let split = 3 * stat.len() / 4;
    let early_max = stat[..split].iter().fold(0.0f64, |m, &x| m.max(x));
    let tail_max = stat[split..].iter().fold(0.0f64, |m, &x| m.max(x));
    Ok(DecayEnvelope {
        r,
        alpha,
        m_est: early_max.max(tail_max),
        tail_max,
        early_max,
        bounded: tail_max <= 1.05 * early_max,
    })
}

/// Fits `M` in `sup|u(t)| ≤ M/(1 + t^{α/r})` along a completed trajectory.
pub fn decay_fit(traj: &Trajectory, alpha: f64, r: f64) -> Result<DecayEnvelope> {
    if !traj.completed() {
        return Err(Error::Regime(format!("decay fit needs a completed run, status is {}", traj.status.label())));
    }
    envelope(&traj.times(), &traj.sup_series(), alpha, r)
}

/// [`decay_fit`] for a scalar history, using `|v(t)|`.
pub fn decay_fit_scalar(history: &ScalarHistory, alpha: f64, r: f64) -> Result<DecayEnvelope> {
    let sups: Vec<f64> = history.values().iter().map(|v| v.abs()).collect();
    envelope(history.times(), &sups, alpha, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub regime: ComparisonRegime,
    /// `max (u - v)₊` over shared frames and cells.
    pub max_violation: f64,
    pub ordered: bool,
    pub tol: f64,
    pub frames_compared: usize,
}

/// Checks that a run started below another stays below it.
pub fn compare_runs(u: &Trajectory, v: &Trajectory, tol: f64) -> Result<ComparisonReport> {
    if u.grid != v.grid || u.mesh != v.mesh || u.params != v.params || u.reaction != v.reaction {
        return Err(Error::Precondition("runs differ in grid, mesh or equation".into()));
    }
    let regime = u.reaction.comparison_regime().ok_or_else(|| {
        Error::Regime(format!(
            "(γ, μ, m, q) = ({}, {}, {}, {}) lies in none of the four comparison regimes",
            u.reaction.gamma, u.reaction.mu, u.reaction.m, u.reaction.q
        ))
    })?;
    let (u0, v0) = (&u.frames[0], &v.frames[0]);
    if u0.values().iter().zip(v0.values()).any(|(a, b)| a > b) {
        return Err(Error::Precondition("initial data are not ordered (u0 ≤ v0 fails)".into()));
    }
    let mut max_violation = 0.0f64;
    let mut frames_compared = 0;
    let mut j = 0;
    for (i, t) in u.frame_times.iter().enumerate() {
        while j < v.frame_times.len() && v.frame_times[j] < *t {
            j += 1;
        }
        if j < v.frame_times.len() && v.frame_times[j] == *t {
            frames_compared += 1;
            for (a, b) in u.frames[i].values().iter().zip(v.frames[j].values()) {
                max_violation = max_violation.max(a - b);
            }
        }
    }
    Ok(ComparisonReport { regime, max_violation, ordered: max_violation <= tol, tol, frames_compared })
}
