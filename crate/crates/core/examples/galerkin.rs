//! Spectral Galerkin truncation against the full nodal solve.

use fraclab::dynamics::{galerkin_solve, solve_pde, GalerkinBasis, Reaction, SolverOptions};
use fraclab::fracspace::{lp_norm, Field, FracParams, Grid1D};
use fraclab::fractime::TimeMesh;

fn main() -> fraclab::Result<()> {
    let grid = Grid1D::new(0.0, 1.0, 40)?;
    let params = FracParams::new(0.5, 0.5, 2.0)?;
    let reaction = Reaction::new(-1.0, 0.0, 2.0, 2.0)?;
    let mesh = TimeMesh::uniform(1.0, 50)?;
    let u0 = Field::from_fn(grid, |x| if (0.2..0.6).contains(&x) { 1.0 } else { 0.0 });
    let reference = solve_pde(&u0, &params, &reaction, &mesh, 1e8)?;
    let target = reference.last_frame();
    for modes in [1, 2, 4, 8, 16, 40] {
        let traj = galerkin_solve(&u0, &params, &reaction, &mesh, modes, GalerkinBasis::Spectral, &SolverOptions::default())?;
        let diff: Vec<f64> = traj.last_frame().values().iter().zip(target.values()).map(|(a, b)| a - b).collect();
        println!("{modes:>3} modes: L2 distance to nodal at t = 1: {:.3e}", lp_norm(&Field::new(grid, diff)?, 2.0)?);
    }
    Ok(())
}
