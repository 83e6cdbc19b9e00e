use crate::error::{Error, Result};
use crate::fractime::calculus::L1Stencil;
use crate::fractime::mesh::{ScalarHistory, TimeMesh};

const MAX_PICARD: usize = 50;
const PICARD_TOL: f64 = 1e-12;
const MAX_MONOTONE: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeStatus {
    Completed,
    /// `|z|` left `[-cap, cap]` while solving for the node at `t_detect`.
    BlewUp { t_detect: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracOdeSolution {
    /// Accepted nodes; shorter than the mesh when the run blew up.
    pub history: ScalarHistory,
    pub status: OdeStatus,
}

impl FracOdeSolution {
    pub fn blew_up(&self) -> bool {
        matches!(self.status, OdeStatus::BlewUp { .. })
    }

    pub fn t_detect(&self) -> Option<f64> {
        match self.status {
            OdeStatus::BlewUp { t_detect } => Some(t_detect),
            OdeStatus::Completed => None,
        }
    }
}

/// Solves the scalar problem `D^α z = rhs(z)`, `z(0) = z0` by the L1 scheme.
///
/// Each node is implicit in `z`; the equation
/// `c_n (z - z_{n-1}) + H_n = rhs(z)` is solved by Picard iteration started
/// from the previous value. An iterate beyond `blowup_cap` ends the run with
/// [`OdeStatus::BlewUp`]. Failing to settle within 50 iterations is a
/// [`Error::StepFailure`] (the caller should refine the mesh) unless the
/// iterates are still moving monotonically, in which case the iteration
/// continues until it either settles or crosses the cap.
pub fn frac_ode_solve(
    rhs: impl Fn(f64) -> f64,
    z0: f64,
    alpha: f64,
    mesh: &TimeMesh,
    blowup_cap: f64,
) -> Result<FracOdeSolution> {
    if !z0.is_finite() {
        return Err(Error::Parameter(format!("z0 = {z0} must be finite")));
    }
    if !(blowup_cap > z0.abs()) {
        return Err(Error::Parameter(format!(
            "blow-up cap {blowup_cap} must exceed |z0| = {}",
            z0.abs()
        )));
    }
    let mut stencil = L1Stencil::new(alpha)?;
    let t = mesh.nodes();
    let mut z = Vec::with_capacity(t.len());
    z.push(z0);
    let mut row = Vec::with_capacity(t.len());

    for n in 1..t.len() {
        stencil.row(t, n, &mut row);
        let self_coeff = row[n - 1];
        let hist: f64 = (1..n).map(|k| row[k - 1] * (z[k] - z[k - 1])).sum();
        let prev = z[n - 1];

        let mut cur = prev;
        let mut last_inc = 0.0f64;
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            let next = prev + (rhs(cur) - hist) / self_coeff;
            if !next.is_finite() || next.abs() > blowup_cap {
                let history = ScalarHistory::from_parts(t[..n].to_vec(), z)?;
                return Ok(FracOdeSolution {
                    history,
                    status: OdeStatus::BlewUp { t_detect: t[n] },
                });
            }
            let inc = next - cur;
            if inc.abs() <= PICARD_TOL * next.abs().max(1.0) {
                cur = next;
                break;
            }
            // Monotone iterates either creep towards a root close to the fold
            // of the implicit equation or run away past it; both are followed
            // until they settle or cross the cap.
            let monotone = iterations > 1 && inc.signum() == last_inc.signum();
            if (iterations >= MAX_PICARD && !monotone) || iterations >= MAX_MONOTONE {
                return Err(Error::StepFailure {
                    t: t[n],
                    iterations,
                });
            }
            last_inc = inc;
            cur = next;
        }
        z.push(cur);
    }
    Ok(FracOdeSolution {
        history: ScalarHistory::new(mesh, z)?,
        status: OdeStatus::Completed,
    })
}

/// Reruns [`frac_ode_solve`] on uniform meshes, doubling the step count after
/// each step failure (at most `max_refinements` times).
pub fn frac_ode_solve_refining(
    rhs: impl Fn(f64) -> f64,
    z0: f64,
    alpha: f64,
    t_final: f64,
    n_steps: usize,
    blowup_cap: f64,
    max_refinements: usize,
) -> Result<FracOdeSolution> {
    let mut n = n_steps;
    let mut last_err = None;
    for _ in 0..=max_refinements {
        let mesh = TimeMesh::uniform(t_final, n)?;
        match frac_ode_solve(&rhs, z0, alpha, &mesh, blowup_cap) {
            Ok(sol) => return Ok(sol),
            Err(e @ Error::StepFailure { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        n *= 2;
    }
    Err(last_err.expect("at least one attempt"))
}
