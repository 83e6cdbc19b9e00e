//! Ordered initial data stay ordered in each sign regime of the reaction.

use fraclab::dynamics::{compare_runs, solve_pde, Reaction};
use fraclab::fracspace::{Field, FracParams, Grid1D};
use fraclab::fractime::TimeMesh;

fn main() -> fraclab::Result<()> {
    let grid = Grid1D::new(0.0, 1.0, 48)?;
    let params = FracParams::new(0.6, 0.5, 2.5)?;
    let mesh = TimeMesh::graded(2.0, 80, 1.5)?;
    let lower = Field::from_fn(grid, |x| 0.6 * (std::f64::consts::PI * x).sin());
    let upper = Field::from_fn(grid, |x| 0.6 * (std::f64::consts::PI * x).sin() + 0.2 * x * (1.0 - x) + 0.05);
    for reaction in [
        Reaction::new(0.5, 0.5, 2.0, 2.5)?,
        Reaction::new(-1.0, -1.0, 0.5, 1.5)?,
        Reaction::new(1.0, -1.0, 1.5, 1.5)?,
        Reaction::new(-1.0, 0.5, 0.5, 2.5)?,
    ] {
        let u = solve_pde(&lower, &params, &reaction, &mesh, 1e8)?;
        let v = solve_pde(&upper, &params, &reaction, &mesh, 1e8)?;
        let report = compare_runs(&u, &v, 1e-9)?;
        println!(
            "{:<12} max (u - v)+ = {:.2e} over {} frames, min u = {:.4e}",
            report.regime.name(),
            report.max_violation,
            report.frames_compared,
            u.min_value()
        );
    }
    Ok(())
}
