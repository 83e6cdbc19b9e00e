//! First eigenpair of the discrete fractional p-Laplacian by constrained
//! Rayleigh quotient minimization, with the scaling, monotonicity and
//! Poincaré-type cross-checks built on it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fracspace::{
    apply_fplap, assemble_weights, gagliardo_pow, geometric_quantity, kernel_constant,
    linear_operator_matrix, lp_norm, signed_pow, Field, FracParams, Grid1D, KernelWeights,
};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-6;
const MAX_ITER: usize = 60_000;
const ARMIJO_C: f64 = 1e-4;
const ARMIJO_MEMORY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    #[serde(rename = "L2-unit")]
    L2Unit,
    #[serde(rename = "Lp-unit")]
    LpUnit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Eigenvalue of the operator: `(-Δ)^s_p ξ = λ₁ |ξ|^{p-2} ξ`.
    pub lambda1: f64,
    /// `min [u]^p / ‖u‖_p^p`, equal to `2 λ₁ / C_{1,s,p}`.
    pub quotient_min: f64,
    pub eigenfunction: Field,
    pub normalization: Normalization,
    /// `‖Aξ - λ₁ φ(ξ)‖₂ / ‖λ₁ φ(ξ)‖₂`.
    pub residual: f64,
    pub iterations: usize,
}

/// `[u]^p / ‖u‖_p^p`.
pub fn rayleigh_quotient(u: &Field, weights: &KernelWeights, p: f64) -> Result<f64> {
    let denom = lp_norm(u, p)?.powf(p);
    if denom == 0.0 {
        return Err(Error::UndefinedQuotient);
    }
    Ok(gagliardo_pow(u, weights, p)? / denom)
}

/// Assembles the weights for `grid` and calls [`first_eigenpair_with`].
pub fn first_eigenpair(
    grid: &Grid1D,
    s: f64,
    p: f64,
    tol: f64,
    mode: Normalization,
) -> Result<EigenPair> {
    let weights = assemble_weights(grid, s, p)?;
    first_eigenpair_with(&weights, tol, mode)
}

struct Evaluation {
    quotient: f64,
    grad: Vec<f64>,
    au: Field,
}

fn evaluate(u: &Field, weights: &KernelWeights, params: &FracParams, c: f64) -> Result<Evaluation> {
    let p = params.p;
    let au = apply_fplap(u, weights, params)?;
    let h = u.grid().h();
    let denom: f64 = h * u.values().iter().map(|x| x.abs().powf(p)).sum::<f64>();
    let numer = 2.0 / c * h * au.values().iter().zip(u.values()).map(|(a, x)| a * x).sum::<f64>();
    let quotient = numer / denom;
    let grad = au
        .values()
        .iter()
        .zip(u.values())
        .map(|(a, x)| p * (2.0 / c * a - quotient * signed_pow(*x, p)) / denom)
        .collect();
    Ok(Evaluation { quotient, grad, au })
}

fn normalize_lp(v: &mut [f64], h: f64, p: f64) {
    let norm = (h * v.iter().map(|x| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p);
    v.iter_mut().for_each(|x| *x /= norm);
}

fn residual_of(ev: &Evaluation, u: &Field, lambda: f64, p: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, x) in ev.au.values().iter().zip(u.values()) {
        let target = lambda * signed_pow(*x, p);
        num += (a - target).powi(2);
        den += target * target;
    }
    (num / den).sqrt()
}

/// Minimizes the Rayleigh quotient on the Lp-unit sphere by projected
/// gradient descent: Barzilai-Borwein trial steps, nonmonotone Armijo
/// backtracking, renormalization after every step.
///
/// Stops when the relative eigenvalue change drops below `tol` and the
/// relative eigen-residual below `1e-6`.
pub fn first_eigenpair_with(
    weights: &KernelWeights,
    tol: f64,
    mode: Normalization,
) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    let grid = *weights.grid();
    let (s, p) = (weights.s(), weights.p());
    let params = FracParams { alpha: 0.5, s, p };
    let c = kernel_constant(1, s, p)?;
    let h = grid.h();
    let (a, len) = (grid.a(), grid.length());

    let mut u = Field::from_fn(grid, |x| (std::f64::consts::PI * (x - a) / len).sin());
    normalize_lp(u.values_mut(), h, p);
    let mut ev = evaluate(&u, weights, &params, c)?;
    let mut history = vec![ev.quotient];
    let gnorm0 = (h * ev.grad.iter().map(|g| g * g).sum::<f64>()).sqrt();
    let mut step = 1e-2 / gnorm0.max(1e-300);
    let mut prev_lambda = f64::INFINITY;
    let mut best = (ev.quotient, u.clone());

    for iter in 1..=MAX_ITER {
        let gnorm2 = h * ev.grad.iter().map(|g| g * g).sum::<f64>();
        let reference = history.iter().rev().take(ARMIJO_MEMORY).fold(f64::MIN, |m, &q| m.max(q));
        let mut t = step;
        let (next, next_ev) = loop {
            let mut cand: Vec<f64> =
                u.values().iter().zip(&ev.grad).map(|(x, g)| x - t * g).collect();
            normalize_lp(&mut cand, h, p);
            let cand = Field::new(grid, cand)?;
            let cand_ev = evaluate(&cand, weights, &params, c)?;
            if cand_ev.quotient <= reference - ARMIJO_C * t * gnorm2 || t < 1e-30 {
                break (cand, cand_ev);
            }
            t *= 0.5;
        };
        let sk: Vec<f64> = next.values().iter().zip(u.values()).map(|(a, b)| a - b).collect();
        let yk: Vec<f64> = next_ev.grad.iter().zip(&ev.grad).map(|(a, b)| a - b).collect();
        let sy: f64 = sk.iter().zip(&yk).map(|(a, b)| a * b).sum();
        let ss: f64 = sk.iter().map(|a| a * a).sum();
        step = if sy > 0.0 { ss / sy } else { 2.0 * t };

        u = next;
        ev = next_ev;
        history.push(ev.quotient);
        if ev.quotient < best.0 {
            best = (ev.quotient, u.clone());
        }
        let lambda = 0.5 * c * ev.quotient;
        let change = ((lambda - prev_lambda) / lambda).abs();
        prev_lambda = lambda;
        if change < tol {
            let residual = residual_of(&ev, &u, lambda, p);
            if residual < RESIDUAL_TOL {
                return Ok(finish(u, ev.quotient, c, residual, iter, mode, p));
            }
        }
    }
    let (q, bu) = best;
    let bev = evaluate(&bu, weights, &params, c)?;
    Err(Error::Convergence {
        iterations: MAX_ITER,
        best_lambda: 0.5 * c * q,
        residual: residual_of(&bev, &bu, 0.5 * c * q, p),
    })
}

fn finish(
    mut u: Field,
    quotient: f64,
    c: f64,
    residual: f64,
    iterations: usize,
    mode: Normalization,
    p: f64,
) -> EigenPair {
    let mean: f64 = u.values().iter().sum();
    if mean < 0.0 {
        u.values_mut().iter_mut().for_each(|x| *x = -*x);
    }
    let h = u.grid().h();
    let q = match mode {
        Normalization::L2Unit => 2.0,
        Normalization::LpUnit => p,
    };
    normalize_lp(u.values_mut(), h, q);
    EigenPair {
        lambda1: 0.5 * c * quotient,
        quotient_min: quotient,
        eigenfunction: u,
        normalization: mode,
        residual,
        iterations,
    }
}

/// Full spectrum of the p = 2 operator from a dense symmetric eigensolve:
/// eigenvalues ascending, eigenvectors as matching columns (Euclidean unit).
pub fn linear_spectrum(weights: &KernelWeights) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let m = linear_operator_matrix(weights)?;
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v: DVector<f64> = eig.eigenvectors.column(i).into_owned();
        if v.sum() < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    Ok((values, vectors))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    pub k: f64,
    /// `e` in `λ₁(kΩ) = k^e λ₁(Ω)`; 0 when `k = 1`.
    pub exponent: f64,
    pub indeterminate: bool,
    pub lambda_base: f64,
    pub lambda_scaled: f64,
    /// The dimensional prediction `-sp`.
    pub predicted: f64,
}

/// Empirical scaling exponent of λ₁ under the dilation `Ω → kΩ`, from two
/// eigensolves with the same number of cells.
pub fn scaling_exponent(grid: &Grid1D, k: f64, s: f64, p: f64) -> Result<ScalingReport> {
    if !(0.5..=4.0).contains(&k) {
        return Err(Error::Parameter(format!("dilation factor {k} outside [0.5, 4]")));
    }
    let base = first_eigenpair(grid, s, p, DEFAULT_TOL, Normalization::LpUnit)?;
    if k == 1.0 {
        return Ok(ScalingReport {
            k,
            exponent: 0.0,
            indeterminate: true,
            lambda_base: base.lambda1,
            lambda_scaled: base.lambda1,
            predicted: -s * p,
        });
    }
    let scaled = first_eigenpair(&grid.dilate(k)?, s, p, DEFAULT_TOL, Normalization::LpUnit)?;
    Ok(ScalingReport {
        k,
        exponent: (scaled.lambda1 / base.lambda1).ln() / k.ln(),
        indeterminate: false,
        lambda_base: base.lambda1,
        lambda_scaled: scaled.lambda1,
        predicted: -s * p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareReport {
    pub lambda1: f64,
    pub quotient_min: f64,
    /// `1 / 𝓘(Ω)`.
    pub geometric_lower_bound: f64,
    /// `quotient_min / geometric_lower_bound`.
    pub ratio: f64,
    /// `min [u]^p/‖u‖_p^p ≥ 1/𝓘`: the bound read as a lower bound on the quotient.
    pub quotient_bound_holds: bool,
    /// `1 / min [u]^p/‖u‖_p^p ≥ 1/𝓘`: the bound read as one on the Poincaré constant.
    pub constant_bound_holds: bool,
}

/// Compares λ₁ with the geometric bound `1/𝓘(Ω)` in both readings of the
/// inequality.
pub fn poincare_bound_report(grid: &Grid1D, s: f64, p: f64) -> Result<PoincareReport> {
    let pair = first_eigenpair(grid, s, p, DEFAULT_TOL, Normalization::LpUnit)?;
    let bound = 1.0 / geometric_quantity(grid, s, p);
    Ok(PoincareReport {
        lambda1: pair.lambda1,
        quotient_min: pair.quotient_min,
        geometric_lower_bound: bound,
        ratio: pair.quotient_min / bound,
        quotient_bound_holds: pair.quotient_min >= bound,
        constant_bound_holds: 1.0 / pair.quotient_min >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_is_scale_invariant() {
        let g = Grid1D::new(0.0, 1.0, 12).unwrap();
        let w = assemble_weights(&g, 0.4, 3.0).unwrap();
        let u = Field::from_fn(g, |x| x * (1.0 - x) + 0.1 * x);
        let r = rayleigh_quotient(&u, &w, 3.0).unwrap();
        let r2 = rayleigh_quotient(&u.scaled(-2.5), &w, 3.0).unwrap();
        assert!((r - r2).abs() < 1e-13 * r);
        assert_eq!(rayleigh_quotient(&Field::zeros(g), &w, 3.0), Err(Error::UndefinedQuotient));
    }

    #[test]
    fn indicator_quotient_by_hand() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let w = assemble_weights(&g, 0.25, 2.0).unwrap();
        let mut u = Field::zeros(g);
        u.values_mut()[0] = 1.0;
        // [u]^2 = 2 Σ_{j≠0} w_0j + 2 e_0, ‖u‖² = h.
        let seminorm = 2.0 * (w.get(0, 1) + w.get(0, 2) + w.get(0, 3)) + 2.0 * w.exterior()[0];
        let r = rayleigh_quotient(&u, &w, 2.0).unwrap();
        assert!((r - seminorm / 0.25).abs() < 1e-13 * r);
    }

    #[test]
    fn p_two_matches_dense_solve() {
        let g = Grid1D::new(-1.0, 1.0, 64).unwrap();
        let w = assemble_weights(&g, 0.3, 2.0).unwrap();
        let pair = first_eigenpair_with(&w, DEFAULT_TOL, Normalization::L2Unit).unwrap();
        let (vals, _) = linear_spectrum(&w).unwrap();
        assert!(((pair.lambda1 - vals[0]) / vals[0]).abs() < 1e-7);
        assert!(pair.eigenfunction.values().iter().all(|&x| x > 0.0));
        assert!((lp_norm(&pair.eigenfunction, 2.0).unwrap() - 1.0).abs() < 1e-12);
        let c = kernel_constant(1, 0.3, 2.0).unwrap();
        assert!((pair.quotient_min * c / 2.0 - pair.lambda1).abs() < 1e-14 * pair.lambda1);
    }

    #[test]
    fn nonlinear_pair_is_positive_and_normalized() {
        let g = Grid1D::new(0.0, 1.0, 32).unwrap();
        let pair = first_eigenpair(&g, 0.4, 3.0, DEFAULT_TOL, Normalization::LpUnit).unwrap();
        assert!(pair.residual < RESIDUAL_TOL);
        assert!(pair.eigenfunction.values().iter().all(|&x| x > 0.0));
        assert!((lp_norm(&pair.eigenfunction, 3.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_dilation_is_flagged() {
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        let r = scaling_exponent(&g, 1.0, 0.5, 2.0).unwrap();
        assert!(r.indeterminate);
        assert_eq!(r.exponent, 0.0);
        assert!(scaling_exponent(&g, 8.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn geometric_bound_value() {
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        let r = poincare_bound_report(&g, 0.25, 2.0).unwrap();
        assert!((r.geometric_lower_bound - 0.384_900_2).abs() < 1e-7);
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }
}
