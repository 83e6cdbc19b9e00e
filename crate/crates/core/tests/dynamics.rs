use fraclab::dynamics::*;
use fraclab::eigen::{first_eigenpair, linear_spectrum, Normalization};
use fraclab::fracspace::*;
use fraclab::fractime::{gamma_fn, TimeMesh};
use fraclab::Error;
use statrs::function::erf::erfc;

fn unit_grid(n: usize) -> Grid1D {
    Grid1D::new(0.0, 1.0, n).unwrap()
}

fn bump(grid: Grid1D, amp: f64) -> Field {
    Field::from_fn(grid, |x| amp * 4.0 * x * (1.0 - x))
}

/// `E_{1/2}(-x) = exp(x²) erfc(x)`.
fn ml_half_oracle(x: f64) -> f64 {
    (x * x).exp() * erfc(x)
}

#[test]
fn nodal_galerkin_is_the_pde_solver() {
    let grid = unit_grid(16);
    let params = FracParams::new(0.6, 0.4, 2.5).unwrap();
    let r = Reaction::new(-1.0, 0.5, 2.0, 2.5).unwrap();
    let mesh = TimeMesh::graded(1.0, 30, 2.0).unwrap();
    let u0 = bump(grid, 1.0);
    let opts = SolverOptions::default();
    let a = solve_pde(&u0, &params, &r, &mesh, opts.blowup_threshold).unwrap();
    let b = galerkin_solve(&u0, &params, &r, &mesh, 16, GalerkinBasis::Nodal, &opts).unwrap();
    assert_eq!(a, b);
    assert!(galerkin_solve(&u0, &params, &r, &mesh, 8, GalerkinBasis::Nodal, &opts).is_err());
}

#[test]
fn linear_spectral_modes_relax_like_mittag_leffler() {
    let grid = unit_grid(32);
    let params = FracParams::new(0.5, 0.5, 2.0).unwrap();
    let weights = assemble_weights(&grid, 0.5, 2.0).unwrap();
    let (values, vectors) = linear_spectrum(&weights).unwrap();
    let mode = |j: usize| Field::new(grid, vectors.column(j).iter().map(|v| v / grid.h().sqrt()).collect()).unwrap();
    let (w0, w1) = (mode(0), mode(1));
    let coeffs = [1.0, 0.5];
    let u0 = Field::new(grid, w0.values().iter().zip(w1.values()).map(|(a, b)| a + 0.5 * b).collect()).unwrap();
    let opts = SolverOptions::default();
    let mut errors = Vec::new();
    for steps in [64, 128, 256] {
        let mesh = TimeMesh::graded(1.0, steps, TimeMesh::default_grading(0.5)).unwrap();
        let traj = galerkin_solve_with(&u0, &weights, &params, &Reaction::zero(), &mesh, 4, GalerkinBasis::Spectral, &opts)
            .unwrap();
        assert_eq!(traj.frames.len(), steps + 1);
        let mut worst = 0.0f64;
        for (t, frame) in traj.frame_times.iter().zip(&traj.frames) {
            for (j, w) in [&w0, &w1].into_iter().enumerate() {
                let exact = coeffs[j] * ml_half_oracle(values[j] * t.sqrt());
                worst = worst.max((l2_inner(frame, w).unwrap() - exact).abs());
            }
        }
        errors.push(worst);
    }
    for w in errors.windows(2) {
        assert!(w[1] < w[0], "{errors:?}");
    }
    assert!(errors[2] < 1e-3, "{errors:?}");
}

#[test]
fn spectral_truncation_converges_to_nodal() {
    let grid = unit_grid(24);
    let params = FracParams::new(0.5, 0.5, 2.0).unwrap();
    let r = Reaction::new(-1.0, 0.0, 2.0, 2.0).unwrap();
    let mesh = TimeMesh::uniform(1.0, 40).unwrap();
    let u0 = Field::from_fn(grid, |x| (std::f64::consts::PI * x).sin() + 0.5 * (3.0 * std::f64::consts::PI * x).sin());
    let opts = SolverOptions::default();
    let reference = solve_pde(&u0, &params, &r, &mesh, 1e8).unwrap();
    let target = reference.last_frame().clone();
    let mut errs = Vec::new();
    for modes in [1, 3, 6, 12, 24] {
        let traj = galerkin_solve(&u0, &params, &r, &mesh, modes, GalerkinBasis::Spectral, &opts).unwrap();
        let diff: Vec<f64> = traj.last_frame().values().iter().zip(target.values()).map(|(a, b)| a - b).collect();
        errs.push(lp_norm(&Field::new(grid, diff).unwrap(), 2.0).unwrap());
    }
    for w in errs.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "{errs:?}");
    }
    assert!(errs[4] < 1e-8, "{errs:?}");
    let p3 = FracParams::new(0.5, 0.5, 3.0).unwrap();
    assert!(galerkin_solve(&u0, &p3, &r, &mesh, 4, GalerkinBasis::Spectral, &opts).is_err());
}

#[test]
fn one_step_matches_newton_oracle() {
    let grid = unit_grid(8);
    let params = FracParams::new(0.4, 0.6, 3.0).unwrap();
    let r = Reaction::new(0.7, -0.4, 1.5, 1.5).unwrap();
    let weights = assemble_weights(&grid, params.s, params.p).unwrap();
    let u0 = bump(grid, 1.2);
    let dt = 0.05;
    let opts = SolverOptions::default();
    let u1 = step_l1(&[0.0], std::slice::from_ref(&u0), dt, &weights, &params, &r, &opts).unwrap();

    let c = 1.0 / (gamma_fn(2.0 - params.alpha).unwrap() * dt.powf(params.alpha));
    let residual = |x: &[f64]| -> Vec<f64> {
        let field = Field::new(grid, x.to_vec()).unwrap();
        let ax = apply_fplap(&field, &weights, &params).unwrap();
        (0..8)
            .map(|i| {
                let react = r.gamma * x[i].abs().powf(r.m - 1.0) * x[i] + r.mu * x[i].abs().powf(r.q - 2.0) * x[i];
                c * (x[i] - u0.values()[i]) + ax.values()[i] - react
            })
            .collect()
    };
    let mut x = u0.values().to_vec();
    for _ in 0..50 {
        let f = residual(&x);
        let mut jac = nalgebra::DMatrix::zeros(8, 8);
        for j in 0..8 {
            let eps = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += eps;
            let fp = residual(&xp);
            for i in 0..8 {
                jac[(i, j)] = (fp[i] - f[i]) / eps;
            }
        }
        let delta = jac.lu().solve(&nalgebra::DVector::from_vec(f)).unwrap();
        for (xi, d) in x.iter_mut().zip(delta.iter()) {
            *xi -= d;
        }
    }
    assert!(residual(&x).iter().all(|v| v.abs() < 1e-9));
    for (a, b) in u1.values().iter().zip(&x) {
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }
}

#[test]
fn step_reports_threshold_and_bad_input() {
    let grid = unit_grid(8);
    let params = FracParams::new(0.3, 0.5, 2.0).unwrap();
    let weights = assemble_weights(&grid, 0.5, 2.0).unwrap();
    let r = Reaction::new(1.0, 0.0, 3.0, 2.0).unwrap();
    let u0 = bump(grid, 50.0);
    let opts = SolverOptions { blowup_threshold: 1e3, ..SolverOptions::default() };
    let err = step_l1(&[0.0], std::slice::from_ref(&u0), 0.5, &weights, &params, &r, &opts).unwrap_err();
    assert!(matches!(err, Error::Threshold { .. }), "{err:?}");
    assert!(step_l1(&[0.0], std::slice::from_ref(&u0), 0.0, &weights, &params, &r, &opts).is_err());
    assert!(step_l1(&[0.0, 0.1], std::slice::from_ref(&u0), 0.2, &weights, &params, &r, &opts).is_err());
}

#[test]
fn eigen_dominated_data_blow_up_and_small_data_does_not() {
    let grid = unit_grid(32);
    let params = FracParams::new(0.3, 0.5, 2.0).unwrap();
    let r = Reaction::new(1.0, 0.0, 2.0, 2.0).unwrap();
    let pair = first_eigenpair(&grid, 0.5, 2.0, 1e-8, Normalization::L2Unit).unwrap();
    let xi = &pair.eigenfunction;
    let mesh = TimeMesh::uniform(1.0, 200).unwrap();
    let big = solve_pde(&xi.scaled(8.0 / xi.sup_norm()), &params, &r, &mesh, 1e8).unwrap();
    assert!(big.blew_up());
    assert!(big.diagnostics.len() > 1);
    let t = big.t_detect().unwrap();
    assert!(t > 0.0 && t < 1.0);
    let small = solve_pde(&xi.scaled(0.5 / xi.sup_norm()), &params, &r, &mesh, 1e8).unwrap();
    assert!(small.completed());
    assert!(small.sup_series().last().unwrap() < &0.5);
}

#[test]
fn comparison_rejects_mismatched_or_unordered_runs() {
    let grid = unit_grid(8);
    let params = FracParams::new(0.5, 0.5, 2.0).unwrap();
    let r = Reaction::new(-1.0, -1.0, 1.0, 2.0).unwrap();
    let mesh = TimeMesh::uniform(0.5, 10).unwrap();
    let lo = solve_pde(&bump(grid, 0.5), &params, &r, &mesh, 1e8).unwrap();
    let hi = solve_pde(&bump(grid, 1.0), &params, &r, &mesh, 1e8).unwrap();
    let rep = compare_runs(&lo, &hi, 1e-9).unwrap();
    assert!(rep.ordered);
    assert_eq!(rep.regime, ComparisonRegime::Sinks);
    assert_eq!(rep.frames_compared, 11);
    assert!(matches!(compare_runs(&hi, &lo, 1e-9), Err(Error::Precondition(_))));
    let other = solve_pde(&bump(grid, 1.0), &params, &r, &TimeMesh::uniform(0.5, 5).unwrap(), 1e8).unwrap();
    assert!(matches!(compare_runs(&lo, &other, 1e-9), Err(Error::Precondition(_))));
    let mixed = Reaction::new(1.0, 1.0, 0.5, 1.5).unwrap();
    let a = solve_pde(&bump(grid, 0.5), &params, &mixed, &mesh, 1e8).unwrap();
    let b = solve_pde(&bump(grid, 1.0), &params, &mixed, &mesh, 1e8).unwrap();
    assert!(matches!(compare_runs(&a, &b, 1e-9), Err(Error::Regime(_))));
}

#[test]
fn sink_runs_stay_positive_and_decay() {
    let grid = unit_grid(16);
    let params = FracParams::new(0.5, 0.5, 2.0).unwrap();
    let r = Reaction::new(-1.0, 0.0, 2.0, 2.0).unwrap();
    let mesh = TimeMesh::uniform(10.0, 100).unwrap();
    let traj = solve_pde(&bump(grid, 1.0), &params, &r, &mesh, 1e8).unwrap();
    assert!(traj.completed());
    assert!(traj.min_value() >= 0.0);
    let env = decay_fit(&traj, 0.5, 2.0).unwrap();
    assert!(env.bounded);
    let sup = traj.sup_series();
    assert!(sup.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn frames_are_subsampled() {
    let grid = unit_grid(8);
    let params = FracParams::new(0.5, 0.5, 2.0).unwrap();
    let mesh = TimeMesh::uniform(1.0, 1200).unwrap();
    let opts = SolverOptions { max_frames: 100, ..SolverOptions::default() };
    let weights = assemble_weights(&grid, 0.5, 2.0).unwrap();
    let traj = solve_pde_with(&bump(grid, 1.0), &weights, &params, &Reaction::zero(), &mesh, &opts).unwrap();
    assert_eq!(traj.diagnostics.len(), 1201);
    assert!(traj.frames.len() <= 100);
    assert_eq!(traj.frame_times[0], 0.0);
    assert_eq!(*traj.frame_times.last().unwrap(), 1.0);
}
