use nalgebra::DMatrix;

use crate::dynamics::reaction::Reaction;
use crate::dynamics::stepper::{
    build_trajectory, fixed_point, integrate, solve_pde_with, NodeOutcome, NodeSystem,
    SolverOptions, Trajectory,
};
use crate::eigen::linear_spectrum;
use crate::error::{Error, Result};
use crate::fracspace::{assemble_weights, Field, FracParams, KernelWeights};
use crate::fractime::TimeMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GalerkinBasis {
    /// Cell indicators; the Galerkin system is the nodal one itself.
    Nodal,
    /// Leading eigenfunctions of the linear (p = 2) operator.
    Spectral,
}

/// Coefficients `v_j` of `u = Σ v_j ω_j` for L²-orthonormal modes `ω_j`.
struct ModalSystem {
    modes: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    reaction: Reaction,
    h: f64,
}

impl ModalSystem {
    fn project(&self, u: &[f64]) -> Vec<f64> {
        (0..self.modes.ncols())
            .map(|j| self.h * self.modes.column(j).iter().zip(u).map(|(w, x)| w * x).sum::<f64>())
            .collect()
    }
}

impl NodeSystem for ModalSystem {
    fn solve(&mut self, c: f64, rhs: &[f64], prev: &[f64], opts: &SolverOptions) -> Result<NodeOutcome> {
        let linear = self.reaction.gamma == 0.0 && self.reaction.mu == 0.0;
        let solve_with = |force: &[f64]| -> Vec<f64> {
            (0..rhs.len()).map(|j| (rhs[j] + force[j]) / (c + self.eigenvalues[j])).collect()
        };
        if linear {
            return Ok(NodeOutcome::Converged(solve_with(&vec![0.0; rhs.len()])));
        }
        fixed_point(prev, opts, |v| {
            let u = self.physical(v);
            let f: Vec<f64> = u.iter().map(|&x| self.reaction.eval(x)).collect();
            Ok(solve_with(&self.project(&f)))
        })
    }

    fn physical(&self, x: &[f64]) -> Vec<f64> {
        let n = self.modes.nrows();
        let mut u = vec![0.0; n];
        for (j, xj) in x.iter().enumerate() {
            for (ui, w) in u.iter_mut().zip(self.modes.column(j).iter()) {
                *ui += xj * w;
            }
        }
        u
    }
}

/// Galerkin approximation `u_n = Σ_{j ≤ n_modes} v_j(t) ω_j(x)`; the
/// coefficient system is integrated with the same L1 loop as [`solve_pde`].
///
/// [`solve_pde`]: crate::dynamics::solve_pde
pub fn galerkin_solve(
    u0: &Field,
    params: &FracParams,
    reaction: &Reaction,
    mesh: &TimeMesh,
    n_modes: usize,
    basis: GalerkinBasis,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    let weights = assemble_weights(u0.grid(), params.s, params.p)?;
    galerkin_solve_with(u0, &weights, params, reaction, mesh, n_modes, basis, opts)
}

#[allow(clippy::too_many_arguments)]
pub fn galerkin_solve_with(
    u0: &Field,
    weights: &KernelWeights,
    params: &FracParams,
    reaction: &Reaction,
    mesh: &TimeMesh,
    n_modes: usize,
    basis: GalerkinBasis,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    let n = u0.len();
    if n_modes == 0 || n_modes > n {
        return Err(Error::Parameter(format!("n_modes = {n_modes} outside 1..={n}")));
    }
    match basis {
        GalerkinBasis::Nodal => {
            if n_modes != n {
                return Err(Error::Parameter(format!(
                    "the nodal basis has exactly {n} functions, {n_modes} requested"
                )));
            }
            solve_pde_with(u0, weights, params, reaction, mesh, opts)
        }
        GalerkinBasis::Spectral => {
            if params.p != 2.0 {
                return Err(Error::Parameter(format!(
                    "spectral basis needs the linear operator (p = 2), got p = {}",
                    params.p
                )));
            }
            params.validate()?;
            reaction.validate()?;
            if u0.grid() != weights.grid() || weights.s() != params.s || weights.p() != params.p {
                return Err(Error::Shape("kernel weights do not match the initial field".into()));
            }
            let (values, vectors) = linear_spectrum(weights)?;
            let h = u0.grid().h();
            let modes = vectors.columns(0, n_modes).into_owned() / h.sqrt();
            let mut system = ModalSystem {
                modes,
                eigenvalues: values[..n_modes].to_vec(),
                reaction: *reaction,
                h,
            };
            let x0 = system.project(u0.values());
            let out = integrate(&mut system, x0, params.alpha, mesh, opts)?;
            build_trajectory(&system, out, weights, *params, *reaction, mesh, opts)
        }
    }
}
