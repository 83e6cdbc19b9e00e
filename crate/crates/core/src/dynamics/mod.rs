//! Time stepping of the full nonlinear problem, the theorem scenarios built
//! on it (comparison, blow-up, decay) and the supporting inequalities.

mod galerkin;
mod inequalities;
mod reaction;
mod scenarios;
mod stepper;

pub use galerkin::{galerkin_solve, galerkin_solve_with, GalerkinBasis};
pub use inequalities::{
    alikhanov_entry, inequality_suite, monotonicity_entry, young_constant, InequalityEntry,
    InequalityReport, SLACK_TOL,
};
pub use reaction::{reaction_eval, ComparisonRegime, Reaction};
pub use scenarios::{
    compare_runs, decay_fit, decay_fit_scalar, predict_blowup, predict_blowup_case, subsolution_z,
    BlowupCase, BlowupPrediction, ComparisonReport, DecayEnvelope,
};
pub use stepper::{
    solve_pde, solve_pde_with, step_l1, NodeDiagnostics, RunStatus, SolverOptions, Trajectory,
};
