//! Fractional calculus in time: special functions, the L1 Caputo scheme,
//! Riemann-Liouville integrals and a scalar fractional ODE integrator.

mod calculus;
mod mesh;
mod ode;
mod special;

pub(crate) use calculus::L1Stencil;
pub use calculus::{
    caputo_l1, gronwall_envelope, integration_by_parts_residual, inversion_residual, l1_weights,
    rl_integral, rl_integral_right,
};
pub use mesh::{ScalarHistory, TimeMesh};
pub use ode::{frac_ode_solve, frac_ode_solve_refining, FracOdeSolution, OdeStatus};
pub use special::{gamma_fn, mittag_leffler, recip_gamma, ML_SERIES_LIMIT};
