//! Algebraic decay under absorption: fits M in sup|u| <= M/(1 + t^{alpha/r})
//! for the scalar equation and for the PDE.

use fraclab::dynamics::{decay_fit, decay_fit_scalar, solve_pde, Reaction};
use fraclab::fracspace::{Field, FracParams, Grid1D};
use fraclab::fractime::{frac_ode_solve, TimeMesh};

fn main() -> fraclab::Result<()> {
    let alpha = 0.5;
    let mesh = TimeMesh::uniform(50.0, 2000)?;
    let sol = frac_ode_solve(|v| -v * v, 1.0, alpha, &mesh, 1e8)?;
    let env = decay_fit_scalar(&sol.history, alpha, 2.0)?;
    println!("D^a v = -v^2: M = {:.4}, tail max {:.4}, earlier max {:.4}, bounded {}", env.m_est, env.tail_max, env.early_max, env.bounded);
    for t in [1.0, 10.0, 50.0] {
        let k = sol.history.times().iter().position(|&s| s >= t).unwrap();
        println!("  v({t}) = {:.5}", sol.history.values()[k]);
    }

    let grid = Grid1D::new(0.0, 1.0, 32)?;
    let params = FracParams::new(alpha, 0.5, 2.0)?;
    let u0 = Field::from_fn(grid, |x| 4.0 * x * (1.0 - x));
    for (label, reaction, r) in [
        ("gamma < 0, mu = 0", Reaction::new(-1.0, 0.0, 2.0, 2.0)?, 2.0),
        ("gamma = 0, mu < 0", Reaction::new(0.0, -1.0, 1.0, 2.5)?, 1.5),
    ] {
        let traj = solve_pde(&u0, &params, &reaction, &TimeMesh::uniform(20.0, 200)?, 1e8)?;
        let env = decay_fit(&traj, alpha, r)?;
        println!("PDE {label}: M = {:.4}, bounded {}", env.m_est, env.bounded);
    }
    Ok(())
}
