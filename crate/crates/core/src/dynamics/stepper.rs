use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::dynamics::reaction::Reaction;
use crate::error::{Error, Result};
use crate::fracspace::{
    apply_fplap, assemble_weights, gagliardo_pow, kernel_constant, linear_operator_matrix, lp_norm,
    Field, FracParams, Grid1D, KernelWeights,
};
use crate::fractime::{L1Stencil, TimeMesh};

/// Knobs of the implicit L1 time stepper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// A sup-norm above this ends the run as a blow-up.
    pub blowup_threshold: f64,
    /// Fixed-point stopping rule: `‖Δu‖∞ ≤ tol · max(1, ‖u‖∞)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Iteration budget while every cell keeps moving in the same direction.
    pub max_monotone_iter: usize,
    /// Step halvings allowed within one mesh interval.
    pub max_halvings: usize,
    pub max_frames: usize,
    /// Evaluate the nonlocal operator at the previous node instead of the new one.
    pub explicit_nonlocal: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            blowup_threshold: 1e8,
            tol: 1e-10,
            max_iter: 50,
            max_monotone_iter: 5000,
            max_halvings: 12,
            max_frames: 512,
            explicit_nonlocal: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    /// `t_detect` is the last node before the blow-up criterion fired.
    BlewUp { t_detect: f64 },
    StepFailed { t: f64 },
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlewUp { .. } => "blew-up",
            RunStatus::StepFailed { .. } => "step-failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeDiagnostics {
    pub t: f64,
    pub l2: f64,
    pub sup: f64,
    /// `[u]^p`.
    pub gagliardo_p: f64,
    /// L² norm of the discrete Caputo derivative at the node.
    pub dalpha_l2: f64,
}

/// A run of the time-space fractional problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub mesh: TimeMesh,
    pub params: FracParams,
    pub reaction: Reaction,
    /// One entry per accepted node (mesh nodes plus any inserted by step halving).
    pub diagnostics: Vec<NodeDiagnostics>,
    /// Stride-subsampled frames; always contains the first and last accepted node.
    pub frame_times: Vec<f64>,
    pub frames: Vec<Field>,
    pub status: RunStatus,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.t).collect()
    }

    pub fn l2_series(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.l2).collect()
    }

    pub fn sup_series(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.sup).collect()
    }

    pub fn blew_up(&self) -> bool {
        matches!(self.status, RunStatus::BlewUp { .. })
    }

    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn t_detect(&self) -> Option<f64> {
        match self.status {
            RunStatus::BlewUp { t_detect } => Some(t_detect),
            _ => None,
        }
    }

    /// Smallest cell value over all retained frames.
    pub fn min_value(&self) -> f64 {
        self.frames.iter().map(Field::min).fold(f64::INFINITY, f64::min)
    }

    pub fn last_frame(&self) -> &Field {
        self.frames.last().expect("trajectory has the initial frame")
    }
}

pub(crate) enum NodeOutcome {
    Converged(Vec<f64>),
    Diverged,
    Failed { iterations: usize },
}

/// The algebraic problem at one node: find `x` with
/// `c x + A(x) = rhs + f(x)` in some coordinate system.
pub(crate) trait NodeSystem {
    fn solve(&mut self, c: f64, rhs: &[f64], prev: &[f64], opts: &SolverOptions) -> Result<NodeOutcome>;
    fn physical(&self, x: &[f64]) -> Vec<f64>;
}

const NEWTON_MAX_ITER: usize = 100;

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped fixed-point iteration `v ← v + θ (G(v) - v)`, `θ` dropping from 1
/// to 1/2 once the increments stop shrinking. Iterates that keep moving in
/// the same direction cell by cell get the larger `max_monotone_iter` budget.
pub(crate) fn fixed_point(
    start: &[f64],
    opts: &SolverOptions,
    mut map: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<NodeOutcome> {
    let mut v = start.to_vec();
    let mut theta = 1.0;
    let mut last_norm = f64::INFINITY;
    let mut last_signs: Vec<i8> = Vec::new();
    let budget = opts.max_iter.max(opts.max_monotone_iter);
    for it in 1..=budget {
        let g = map(&v)?;
        let next: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a + theta * (b - a)).collect();
        if next.iter().any(|x| !x.is_finite()) || sup(&next) > opts.blowup_threshold {
            return Ok(NodeOutcome::Diverged);
        }
        let inc: Vec<f64> = next.iter().zip(&v).map(|(a, b)| a - b).collect();
        let norm = sup(&inc);
        if norm <= opts.tol * sup(&next).max(1.0) {
            return Ok(NodeOutcome::Converged(next));
        }
        let signs: Vec<i8> = inc.iter().map(|d| d.partial_cmp(&0.0).map_or(0, |o| o as i8)).collect();
        let monotone = signs == last_signs;
        if norm > last_norm && !monotone {
            theta = 0.5;
        }
        if it >= opts.max_iter && !monotone {
            return Ok(NodeOutcome::Failed { iterations: it });
        }
        last_norm = norm;
        last_signs = signs;
        v = next;
    }
    Ok(NodeOutcome::Failed { iterations: budget })
}

/// Cell-value unknowns; the nonlocal operator is linearized around the
/// current iterate (`|v_i - v_j|^{p-2}` frozen), absorbing reaction terms
/// enter the matrix diagonal and source terms are lagged.
pub(crate) struct NodalSystem<'a> {
    weights: &'a KernelWeights,
    params: FracParams,
    reaction: Reaction,
    coeff: f64,
    linear: Option<DMatrix<f64>>,
    factor_cache: Option<(f64, Cholesky<f64, Dyn>)>,
}

impl<'a> NodalSystem<'a> {
    pub(crate) fn new(weights: &'a KernelWeights, params: FracParams, reaction: Reaction) -> Result<Self> {
        let coeff = kernel_constant(1, params.s, params.p)? / weights.grid().h();
        let linear = if params.p == 2.0 { Some(linear_operator_matrix(weights)?) } else { None };
        Ok(Self { weights, params, reaction, coeff, linear, factor_cache: None })
    }

    fn operator_matrix(&self, v: &[f64]) -> DMatrix<f64> {
        if let Some(m) = &self.linear {
            return m.clone();
        }
        let n = v.len();
        let p = self.params.p;
        let w = self.weights.offsets();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut diag = self.weights.exterior()[i] * v[i].abs().powf(p - 2.0);
            for j in 0..n {
                if j != i {
                    let k = w[i.abs_diff(j)] * (v[i] - v[j]).abs().powf(p - 2.0);
                    m[(i, j)] = -self.coeff * k;
                    diag += k;
                }
            }
            m[(i, i)] = self.coeff * diag;
        }
        m
    }

    fn solve_linear(&mut self, mut m: DMatrix<f64>, rhs: Vec<f64>, cacheable: Option<f64>) -> Result<Vec<f64>> {
        let b = DVector::from_vec(rhs);
        if let (Some(c), Some((cached, chol))) = (cacheable, &self.factor_cache) {
            if *cached == c {
                return Ok(chol.solve(&b).data.into());
            }
        }
        let n = m.nrows();
        match Cholesky::new(m.clone()) {
            Some(chol) => {
                let x = chol.solve(&b).data.into();
                if let Some(c) = cacheable {
                    self.factor_cache = Some((c, chol));
                }
                Ok(x)
            }
            None => {
                // Only reachable through round-off; the matrix is a
                // symmetric M-matrix with positive diagonal.
                for i in 0..n {
                    m[(i, i)] *= 1.0 + 1e-14;
                }
                m.lu()
                    .solve(&b)
                    .map(|x| x.data.into())
                    .ok_or_else(|| Error::Shape("singular step matrix".into()))
            }
        }
    }
}

impl NodalSystem<'_> {
    fn residual(&self, c: f64, rhs: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let ax = apply_fplap(&Field::new(*self.weights.grid(), x.to_vec())?, self.weights, &self.params)?;
        Ok((0..x.len()).map(|i| c * x[i] + ax.values()[i] - rhs[i] - self.reaction.eval(x[i])).collect())
    }

    /// Damped Newton on `c x + A(x) - f(x) = rhs`, used when the linearized
    /// iteration stalls (it can cycle for `p > 2`). `A'(x)` is `p - 1` times
    /// the frozen-weight matrix.
    fn newton(&mut self, c: f64, rhs: &[f64], start: &[f64], opts: &SolverOptions) -> Result<NodeOutcome> {
        let r = self.reaction;
        let p = self.params.p;
        let tiny = 1e-8 * sup(start).max(1.0);
        let mut x = start.to_vec();
        let mut f = self.residual(c, rhs, &x)?;
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for it in 1..=NEWTON_MAX_ITER {
            let mut jac = self.operator_matrix(&x) * (p - 1.0);
            for (i, &xi) in x.iter().enumerate() {
                let a = xi.abs().max(tiny);
                let df = r.gamma * r.m * a.powf(r.m - 1.0) + r.mu * (r.q - 1.0) * a.powf(r.q - 2.0);
                jac[(i, i)] += c - df;
            }
            let Some(delta) = jac.lu().solve(&DVector::from_column_slice(&f)) else {
                return Ok(NodeOutcome::Failed { iterations: it });
            };
            let f0 = norm(&f);
            let mut step = 1.0;
            loop {
                let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a - step * d).collect();
                if trial.iter().any(|v| !v.is_finite()) || sup(&trial) > opts.blowup_threshold {
                    return Ok(NodeOutcome::Diverged);
                }
                let ft = self.residual(c, rhs, &trial)?;
                if norm(&ft) <= (1.0 - 1e-4 * step) * f0 || step < 1e-6 {
                    let moved = step * sup(delta.as_slice());
                    x = trial;
                    f = ft;
                    if moved <= opts.tol * sup(&x).max(1.0) {
                        return Ok(NodeOutcome::Converged(x));
                    }
                    break;
                }
                step *= 0.5;
            }
        }
        Ok(NodeOutcome::Failed { iterations: NEWTON_MAX_ITER })
    }
}

impl NodeSystem for NodalSystem<'_> {
    fn solve(&mut self, c: f64, rhs: &[f64], prev: &[f64], opts: &SolverOptions) -> Result<NodeOutcome> {
        let reaction = self.reaction;
        let floor = 1e-12 * sup(prev).max(1.0);
        if opts.explicit_nonlocal {
            let grid = *self.weights.grid();
            let a_prev = apply_fplap(&Field::new(grid, prev.to_vec())?, self.weights, &self.params)?;
            let a_prev = a_prev.into_values();
            return fixed_point(prev, opts, |v| {
                Ok((0..v.len())
                    .map(|i| {
                        (rhs[i] + reaction.source(v[i]) - a_prev[i])
                            / (c + reaction.sink_coefficient(v[i], floor))
                    })
                    .collect())
            });
        }
        let constant_matrix = self.linear.is_some() && !reaction.has_sinks();
        let outcome = fixed_point(prev, opts, |v| {
            let mut m = self.operator_matrix(v);
            for i in 0..v.len() {
                m[(i, i)] += c + reaction.sink_coefficient(v[i], floor);
            }
            let b: Vec<f64> = (0..v.len()).map(|i| rhs[i] + reaction.source(v[i])).collect();
            self.solve_linear(m, b, constant_matrix.then_some(c))
        })?;
        match outcome {
            NodeOutcome::Failed { iterations } if self.linear.is_none() => {
                Ok(match self.newton(c, rhs, prev, opts)? {
                    NodeOutcome::Failed { iterations: extra } => NodeOutcome::Failed { iterations: iterations + extra },
                    other => other,
                })
            }
            other => Ok(other),
        }
    }

    fn physical(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

pub(crate) struct RunOutput {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dalpha: Vec<Vec<f64>>,
    pub status: RunStatus,
}

/// The L1 time loop shared by the nodal and modal discretizations.
pub(crate) fn integrate(
    system: &mut impl NodeSystem,
    x0: Vec<f64>,
    alpha: f64,
    mesh: &TimeMesh,
    opts: &SolverOptions,
) -> Result<RunOutput> {
    let mut stencil = L1Stencil::new(alpha)?;
    let nodes = mesh.nodes();
    let dim = x0.len();
    let mut times = vec![0.0];
    let mut states = vec![x0];
    let mut dalpha = vec![vec![0.0; dim]];
    let mut sups = vec![sup(&system.physical(&states[0]))];
    let mut row = Vec::new();
    let mut status = RunStatus::Completed;

    let mut j = 1;
    let mut halvings = 0;
    let mut dt_try = nodes[1] - nodes[0];
    while j < nodes.len() {
        let t_last = *times.last().unwrap();
        let target = nodes[j];
        let mut t_new = if halvings == 0 { target } else { (t_last + dt_try).min(target) };
        if target - t_new <= 1e-12 * (target - t_last) {
            t_new = target;
        }
        times.push(t_new);
        let n = times.len() - 1;
        stencil.row(&times, n, &mut row);
        let c = row[n - 1];
        let mut hist = vec![0.0; dim];
        for k in 1..n {
            let ck = row[k - 1];
            for (h, (a, b)) in hist.iter_mut().zip(states[k].iter().zip(&states[k - 1])) {
                *h += ck * (a - b);
            }
        }
        let prev = &states[n - 1];
        let rhs: Vec<f64> = prev.iter().zip(&hist).map(|(u, h)| c * u - h).collect();
        match system.solve(c, &rhs, prev, opts)? {
            NodeOutcome::Converged(x) => {
                let s = sup(&system.physical(&x));
                if s > opts.blowup_threshold {
                    times.pop();
                    status = RunStatus::BlewUp { t_detect: t_last };
                    break;
                }
                let d: Vec<f64> = x.iter().zip(prev).zip(&hist).map(|((a, b), h)| c * (a - b) + h).collect();
                states.push(x);
                dalpha.push(d);
                sups.push(s);
                if let Some(t_detect) = doubling_cascade(&times, &sups) {
                    status = RunStatus::BlewUp { t_detect };
                    break;
                }
                if t_new == target {
                    j += 1;
                    halvings = 0;
                    if j < nodes.len() {
                        dt_try = nodes[j] - nodes[j - 1];
                    }
                }
            }
            outcome => {
                // No bounded root at this step size: halve, and call it a
                // blow-up only if the iterates still run away at the finest step.
                times.pop();
                halvings += 1;
                if halvings > opts.max_halvings {
                    status = match outcome {
                        NodeOutcome::Diverged => RunStatus::BlewUp { t_detect: t_last },
                        _ => RunStatus::StepFailed { t: t_new },
                    };
                    break;
                }
                dt_try = (t_new - t_last) / 2.0;
            }
        }
    }
    Ok(RunOutput { times, states, dalpha, status })
}

/// Three consecutive sup-norm ratios above 2 on strictly shrinking accepted
/// steps; returns the node just before the cascade.
fn doubling_cascade(times: &[f64], sups: &[f64]) -> Option<f64> {
    let n = sups.len();
    if n < 5 {
        return None;
    }
    let ratios_grow = (n - 3..n).all(|k| sups[k - 1] > 0.0 && sups[k] > 2.0 * sups[k - 1]);
    let dts: Vec<f64> = (n - 3..n).map(|k| times[k] - times[k - 1]).collect();
    let shrinking = dts.windows(2).all(|w| w[1] < w[0]);
    (ratios_grow && shrinking).then(|| times[n - 4])
}

pub(crate) fn build_trajectory(
    system: &impl NodeSystem,
    out: RunOutput,
    weights: &KernelWeights,
    params: FracParams,
    reaction: Reaction,
    mesh: &TimeMesh,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    let grid = *weights.grid();
    let mut diagnostics = Vec::with_capacity(out.times.len());
    let mut physical = Vec::with_capacity(out.times.len());
    for ((t, x), d) in out.times.iter().zip(&out.states).zip(&out.dalpha) {
        let u = Field::new(grid, system.physical(x))?;
        let du = Field::new(grid, system.physical(d))?;
        diagnostics.push(NodeDiagnostics {
            t: *t,
            l2: lp_norm(&u, 2.0)?,
            sup: u.sup_norm(),
            gagliardo_p: gagliardo_pow(&u, weights, params.p)?,
            dalpha_l2: lp_norm(&du, 2.0)?,
        });
        physical.push(u);
    }
    let count = physical.len();
    let stride = count.div_ceil(opts.max_frames.max(2) - 1).max(1);
    let mut frame_times = Vec::new();
    let mut frames = Vec::new();
    for (k, u) in physical.into_iter().enumerate() {
        if k % stride == 0 || k == count - 1 {
            frame_times.push(out.times[k]);
            frames.push(u);
        }
    }
    Ok(Trajectory {
        grid,
        mesh: mesh.clone(),
        params,
        reaction,
        diagnostics,
        frame_times,
        frames,
        status: out.status,
    })
}

fn check_run(u0: &Field, weights: &KernelWeights, params: &FracParams, reaction: &Reaction, opts: &SolverOptions) -> Result<()> {
    params.validate()?;
    reaction.validate()?;
    if u0.grid() != weights.grid() || weights.s() != params.s || weights.p() != params.p {
        return Err(Error::Shape("kernel weights do not match the initial field and parameters".into()));
    }
    if u0.values().iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("initial data must be finite".into()));
    }
    if !(opts.blowup_threshold > u0.sup_norm()) {
        return Err(Error::Parameter(format!(
            "blow-up threshold {} must exceed sup|u0| = {}",
            opts.blowup_threshold,
            u0.sup_norm()
        )));
    }
    Ok(())
}

/// Solves `D^α u + (-Δ)^s_p u = γ|u|^{m-1}u + μ|u|^{q-2}u` with zero
/// exterior data by the implicit L1 scheme, default solver options.
pub fn solve_pde(
    u0: &Field,
    params: &FracParams,
    reaction: &Reaction,
    mesh: &TimeMesh,
    blowup_threshold: f64,
) -> Result<Trajectory> {
    let weights = assemble_weights(u0.grid(), params.s, params.p)?;
    let opts = SolverOptions { blowup_threshold, ..SolverOptions::default() };
    solve_pde_with(u0, &weights, params, reaction, mesh, &opts)
}

/// [`solve_pde`] on preassembled weights with explicit options.
pub fn solve_pde_with(
    u0: &Field,
    weights: &KernelWeights,
    params: &FracParams,
    reaction: &Reaction,
    mesh: &TimeMesh,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    check_run(u0, weights, params, reaction, opts)?;
    let mut system = NodalSystem::new(weights, *params, *reaction)?;
    let out = integrate(&mut system, u0.values().to_vec(), params.alpha, mesh, opts)?;
    build_trajectory(&system, out, weights, *params, *reaction, mesh, opts)
}

/// Advances the accepted history `(times[k], history[k])` to `t_new` by one
/// implicit L1 step.
pub fn step_l1(
    times: &[f64],
    history: &[Field],
    t_new: f64,
    weights: &KernelWeights,
    params: &FracParams,
    reaction: &Reaction,
    opts: &SolverOptions,
) -> Result<Field> {
    let last = history
        .last()
        .ok_or_else(|| Error::InsufficientData("step needs the initial frame".into()))?;
    if times.len() != history.len() {
        return Err(Error::Shape(format!("{} times for {} frames", times.len(), history.len())));
    }
    if !(t_new > times[times.len() - 1]) {
        return Err(Error::Parameter(format!("t_new = {t_new} does not advance the history")));
    }
    check_run(last, weights, params, reaction, opts)?;
    let mut all_times = times.to_vec();
    all_times.push(t_new);
    let n = all_times.len() - 1;
    let mut stencil = L1Stencil::new(params.alpha)?;
    let mut row = Vec::new();
    stencil.row(&all_times, n, &mut row);
    let c = row[n - 1];
    let prev = last.values();
    let mut rhs: Vec<f64> = prev.iter().map(|u| c * u).collect();
    for k in 1..n {
        for (r, (a, b)) in rhs.iter_mut().zip(history[k].values().iter().zip(history[k - 1].values())) {
            *r -= row[k - 1] * (a - b);
        }
    }
    let mut system = NodalSystem::new(weights, *params, *reaction)?;
    match system.solve(c, &rhs, prev, opts)? {
        NodeOutcome::Converged(x) => Field::new(*last.grid(), x),
        NodeOutcome::Diverged => Err(Error::Threshold { t: t_new, threshold: opts.blowup_threshold }),
        NodeOutcome::Failed { iterations } => Err(Error::StepFailure { t: t_new, iterations }),
    }
}
