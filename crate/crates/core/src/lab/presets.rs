use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::dynamics::{BlowupCase, ComparisonRegime, Reaction};
use crate::eigen::{first_eigenpair, EigenPair, Normalization, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::fracspace::{kernel_constant, FracParams, Grid1D};
use crate::lab::config::{
    DomainConfig, Format, InitialConfig, OutputConfig, Profile, Scenario, ScenarioConfig, TimeConfig,
};

const EQ_TOL: f64 = 1e-12;

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Default configuration of each preset; every default satisfies its
/// scenario's hypotheses.
pub fn preset(scenario: Scenario) -> ScenarioConfig {
    let unit = DomainConfig { a: 0.0, b: 1.0, cells: 32 };
    let (domain, time, frac, reaction, initial) = match scenario {
        Scenario::Compare => (
            unit,
            TimeConfig { t_final: 1.0, steps: 60, grading: 1.5 },
            (0.5, 0.5, 2.0),
            (1.0, -1.0, 1.5, 1.5),
            (Profile::Random, 0.8),
        ),
        Scenario::BlowupA | Scenario::BlowupB | Scenario::BlowupC | Scenario::BlowupD => {
            let reaction = match scenario {
                Scenario::BlowupA => (1.0, 0.5, 2.0, 2.0),
                Scenario::BlowupB => (0.5, 1.0, 1.0, 3.0),
                Scenario::BlowupC => (1.0, 0.0, 2.0, 2.0),
                _ => (1.0, 1.0, 1.5, 2.5),
            };
            (
                unit,
                TimeConfig { t_final: 1.0, steps: 200, grading: 1.0 },
                (0.3, 0.5, 2.0),
                reaction,
                (Profile::Eigen, 8.0),
            )
        }
        Scenario::GlobalA => (
            unit,
            TimeConfig { t_final: 5.0, steps: 100, grading: 1.0 },
            (0.5, 0.5, 2.5),
            (0.25, 0.25, 1.5, 2.5),
            (Profile::Bump, 1.0),
        ),
        Scenario::GlobalB => (
            unit,
            TimeConfig { t_final: 5.0, steps: 100, grading: 1.0 },
            (0.5, 0.5, 2.0),
            (0.5, 0.5, 2.0, 2.0),
            (Profile::Bump, 1.0),
        ),
        Scenario::GlobalC => (
            unit,
            TimeConfig { t_final: 5.0, steps: 100, grading: 1.0 },
            (0.5, 0.5, 2.0),
            (0.5, -1.0, 1.0, 1.5),
            (Profile::Bump, 1.0),
        ),
        Scenario::GlobalD => (
            DomainConfig { cells: 64, ..unit },
            TimeConfig { t_final: 20.0, steps: 400, grading: 1.0 },
            (0.5, 0.4, 2.5),
            (-1.0, -1.0, 2.0, 2.5),
            (Profile::Bump, 1.0),
        ),
        Scenario::GlobalE => (
            unit,
            TimeConfig { t_final: 5.0, steps: 100, grading: 1.0 },
            (0.5, 0.5, 2.0),
            (-1.0, 0.5, 2.0, 2.0),
            (Profile::Bump, 1.0),
        ),
        Scenario::DecayA | Scenario::DecayB | Scenario::DecayC => {
            let reaction = match scenario {
                Scenario::DecayA => (-1.0, 0.5, 1.5, 2.5),
                Scenario::DecayB => (-1.0, 0.0, 2.0, 2.0),
                _ => (0.0, -1.0, 1.0, 2.5),
            };
            (
                unit,
                TimeConfig { t_final: 20.0, steps: 200, grading: 1.0 },
                (0.5, 0.5, 2.0),
                reaction,
                (Profile::Bump, 1.0),
            )
        }
        Scenario::Eigen => (
            DomainConfig { a: -1.0, b: 1.0, cells: 128 },
            TimeConfig { t_final: 1.0, steps: 1, grading: 1.0 },
            (0.5, 0.5, 2.0),
            (0.0, 0.0, 1.0, 2.0),
            (Profile::Bump, 1.0),
        ),
        Scenario::Verify => (
            unit,
            TimeConfig { t_final: 1.0, steps: 1, grading: 1.0 },
            (0.5, 0.5, 2.0),
            (0.0, 0.0, 1.0, 2.0),
            (Profile::Bump, 1.0),
        ),
    };
    ScenarioConfig {
        scenario,
        seed: 7,
        domain,
        time,
        frac: FracParams { alpha: frac.0, s: frac.1, p: frac.2 },
        reaction: Reaction { gamma: reaction.0, mu: reaction.1, m: reaction.2, q: reaction.3 },
        initial: InitialConfig { profile: initial.0, amplitude: initial.1 },
        output: OutputConfig { dir: PathBuf::from("out"), format: Format::Json },
    }
}

type EigenKey = (u64, u64, usize, u64, u64);

fn eigen_cache() -> &'static Mutex<HashMap<EigenKey, Arc<EigenPair>>> {
    static CACHE: OnceLock<Mutex<HashMap<EigenKey, Arc<EigenPair>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// First eigenpair (L²-unit) on `grid`, memoized by domain, `s` and `p`.
pub fn cached_eigenpair(grid: &Grid1D, s: f64, p: f64) -> Result<Arc<EigenPair>> {
    let key = (grid.a().to_bits(), grid.b().to_bits(), grid.n_cells(), s.to_bits(), p.to_bits());
    if let Some(pair) = eigen_cache().lock().expect("eigen cache poisoned").get(&key) {
        return Ok(Arc::clone(pair));
    }
    let pair = Arc::new(first_eigenpair(grid, s, p, DEFAULT_TOL, Normalization::L2Unit)?);
    eigen_cache().lock().expect("eigen cache poisoned").insert(key, Arc::clone(&pair));
    Ok(pair)
}

pub fn blowup_case(scenario: Scenario) -> Option<BlowupCase> {
    match scenario {
        Scenario::BlowupA => Some(BlowupCase::A),
        Scenario::BlowupB => Some(BlowupCase::B),
        Scenario::BlowupC => Some(BlowupCase::C),
        Scenario::BlowupD => Some(BlowupCase::D),
        _ => None,
    }
}

/// Decay exponent `r` of the envelope `M/(1 + t^{α/r})`.
pub fn decay_rate(scenario: Scenario, r: &Reaction) -> Option<f64> {
    match scenario {
        Scenario::DecayA | Scenario::DecayB => Some(r.m),
        Scenario::DecayC => Some(r.q - 1.0),
        _ => None,
    }
}

fn needs_lambda(scenario: Scenario) -> bool {
    matches!(
        scenario,
        Scenario::BlowupA | Scenario::BlowupB | Scenario::GlobalA | Scenario::GlobalB | Scenario::GlobalE
    )
}

/// A condition that is reported but never gates a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoCheck {
    pub clause: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    /// Operator eigenvalue λ₁(Ω) when a clause needed it.
    pub lambda1: Option<f64>,
    /// `min [u]^p / ‖u‖_p^p` when a clause needed it.
    pub quotient_min: Option<f64>,
    pub clauses: Vec<String>,
    pub info: Vec<InfoCheck>,
    /// `sp > N`, the embedding regime of the Morrey-type bound.
    pub sp_above_dimension: bool,
    /// `sp < N`, the regime of the global existence theory.
    pub sp_below_dimension: bool,
}

fn clauses(cfg: &ScenarioConfig, lambda1: Option<f64>) -> Vec<(String, bool)> {
    let r = &cfg.reaction;
    let (g, mu, m, q, p) = (r.gamma, r.mu, r.m, r.q, cfg.frac.p);
    let l = lambda1.unwrap_or(f64::NAN);
    let own = |list: Vec<(&str, bool)>| list.into_iter().map(|(c, ok)| (c.to_string(), ok)).collect();
    match cfg.scenario {
        Scenario::Compare => {
            let regimes: Vec<String> = ComparisonRegime::ALL.iter().map(|x| x.name().to_string()).collect();
            vec![(
                format!("(γ, μ, m, q) in one of the regimes {}", regimes.join(", ")),
                r.comparison_regime().is_some(),
            )]
        }
        Scenario::BlowupA | Scenario::BlowupB | Scenario::BlowupC | Scenario::BlowupD => {
            let case = blowup_case(cfg.scenario).expect("blow-up scenario");
            case.clauses(r, p, lambda1).into_iter().map(|(c, ok)| (c.to_string(), ok)).collect()
        }
        Scenario::GlobalA => own(vec![
            ("p = m + 1 = q > 2", eq(p, m + 1.0) && eq(p, q) && p > 2.0),
            ("0 < γ + μ ≤ λ₁(Ω)", g + mu > 0.0 && g + mu <= l),
        ]),
        Scenario::GlobalB => own(vec![
            ("p = q or p = m + 1", eq(p, q) || eq(p, m + 1.0)),
            ("0 ≤ γ ≤ λ₁(Ω)", g >= 0.0 && g <= l),
            ("0 ≤ μ ≤ λ₁(Ω)", mu >= 0.0 && mu <= l),
        ]),
        Scenario::GlobalC => own(vec![("p ≤ m + q", p <= m + q)]),
        Scenario::GlobalD => own(vec![
            ("p ≥ 2", p >= 2.0),
            ("m > 1", m > 1.0),
            ("q ≥ 1", q >= 1.0),
            ("γ ≤ 0", g <= 0.0),
            ("μ ≤ 0", mu <= 0.0),
        ]),
        Scenario::GlobalE => own(vec![("p = q", eq(p, q)), ("m > 1", m > 1.0), ("γ ≤ 0", g <= 0.0), ("μ > 0", mu > 0.0)]),
        Scenario::DecayA => own(vec![("m = q - 1 > 0", eq(m, q - 1.0) && m > 0.0), ("γ + μ < 0", g + mu < 0.0)]),
        Scenario::DecayB => own(vec![("m > 0", m > 0.0), ("q > 1", q > 1.0), ("γ < 0", g < 0.0), ("μ = 0", mu == 0.0)]),
        Scenario::DecayC => own(vec![("m > 0", m > 0.0), ("q > 1", q > 1.0), ("γ = 0", g == 0.0), ("μ < 0", mu < 0.0)]),
        Scenario::Eigen | Scenario::Verify => Vec::new(),
    }
}

/// Gates a configuration on its scenario's hypotheses. The error names every
/// failed clause, e.g. `blowup-a requires λ₁(Ω) ≥ μ`.
pub fn check_hypotheses(cfg: &ScenarioConfig) -> Result<HypothesisCheck> {
    let (lambda1, quotient_min) = if needs_lambda(cfg.scenario) {
        let pair = cached_eigenpair(&cfg.grid()?, cfg.frac.s, cfg.frac.p)?;
        (Some(pair.lambda1), Some(pair.quotient_min))
    } else {
        (None, None)
    };
    let all = clauses(cfg, lambda1);
    let failed: Vec<&str> = all.iter().filter(|(_, ok)| !ok).map(|(c, _)| c.as_str()).collect();
    if !failed.is_empty() {
        return Err(Error::Hypothesis { scenario: cfg.scenario.name().to_string(), clause: failed.join(", ") });
    }
    let mut info = Vec::new();
    if cfg.scenario == Scenario::GlobalE {
        let c = kernel_constant(1, cfg.frac.s, cfg.frac.p)?;
        let qm = quotient_min.expect("computed for global-e");
        info.push(InfoCheck { clause: "C(1, s, p) ≥ μ λ₁(Ω)".into(), holds: c >= cfg.reaction.mu * qm });
    }
    let sp = cfg.frac.s * cfg.frac.p;
    Ok(HypothesisCheck {
        lambda1,
        quotient_min,
        clauses: all.into_iter().map(|(c, _)| c).collect(),
        info,
        sp_above_dimension: sp > 1.0,
        sp_below_dimension: sp < 1.0,
    })
}
