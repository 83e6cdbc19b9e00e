//! Blow-up: the predicted time bound, the scalar subsolution ODE under mesh
//! refinement, and a PDE run started from a multiple of the first eigenfunction.

use fraclab::dynamics::{predict_blowup, solve_pde, subsolution_z, Reaction};
use fraclab::eigen::{first_eigenpair, Normalization, DEFAULT_TOL};
use fraclab::fracspace::{FracParams, Grid1D};
use fraclab::fractime::{frac_ode_solve, TimeMesh};

fn main() -> fraclab::Result<()> {
    let alpha = 0.3;
    let reaction = Reaction::new(1.0, 0.0, 2.0, 2.0)?;
    let pred = predict_blowup(&reaction, alpha, 2.0, None)?;
    println!("case ({}): T* = {:.12} (exponent {})", pred.case.letter(), pred.t_star, pred.exponent);

    let b = pred.b;
    println!("subsolution z(t) = b/(b - t)^2: z(0) = {:.6}, z(b/2) = {:.6}", subsolution_z(0.0, 2.0, alpha)?, subsolution_z(0.5 * b, 2.0, alpha)?);
    for n in [250, 1000, 4000] {
        let mesh = TimeMesh::uniform(2.0 * b, n)?;
        let sol = frac_ode_solve(|z| 2.0 * z.abs().powf(1.5), 1.0 / b, alpha, &mesh, 1e8)?;
        println!("  D^a z = 2 z^1.5, n = {n:>5}: status {:?}", sol.status);
    }

    let grid = Grid1D::new(0.0, 1.0, 32)?;
    let params = FracParams::new(alpha, 0.5, 2.0)?;
    let xi = first_eigenpair(&grid, 0.5, 2.0, DEFAULT_TOL, Normalization::L2Unit)?.eigenfunction;
    for amplitude in [1.0, 4.0, 8.0] {
        let u0 = xi.scaled(amplitude / xi.sup_norm());
        let traj = solve_pde(&u0, &params, &reaction, &TimeMesh::uniform(1.0, 200)?, 1e8)?;
        println!(
            "PDE, sup u0 = {amplitude}: {} after {} nodes, last sup {:.4e}",
            traj.status.label(),
            traj.diagnostics.len(),
            traj.sup_series().last().unwrap()
        );
    }
    Ok(())
}
