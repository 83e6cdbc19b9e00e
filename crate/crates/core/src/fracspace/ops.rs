use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fracspace::grid::{FracParams, Field, Grid1D};
use crate::fracspace::weights::{kernel_constant, KernelWeights};

/// Cell counts from which operator application is split across threads.
const PAR_CELLS: usize = 256;

/// `|r|^{p-2} r`.
#[inline]
pub fn signed_pow(r: f64, p: f64) -> f64 {
    if p == 2.0 {
        r
    } else if r == 0.0 {
        0.0
    } else {
        r.abs().powf(p - 2.0) * r
    }
}

fn check_weights(u: &Field, weights: &KernelWeights) -> Result<()> {
    if u.grid() != weights.grid() {
        return Err(Error::Shape("field and kernel weights use different grids".into()));
    }
    Ok(())
}

fn row_value(u: &[f64], weights: &KernelWeights, p: f64, i: usize) -> f64 {
    let w = weights.offsets();
    let ui = u[i];
    let mut acc = weights.exterior()[i] * signed_pow(ui, p);
    for (j, &uj) in u.iter().enumerate() {
        if j != i {
            acc += w[i.abs_diff(j)] * signed_pow(ui - uj, p);
        }
    }
    acc
}

/// Discrete fractional p-Laplacian with zero exterior data:
/// `out_i = C/h · (Σ_j w_ij φ(u_i - u_j) + e_i φ(u_i))`, `φ(r) = |r|^{p-2} r`.
pub fn apply_fplap(u: &Field, weights: &KernelWeights, params: &FracParams) -> Result<Field> {
    check_weights(u, weights)?;
    if params.s != weights.s() || params.p != weights.p() {
        return Err(Error::Parameter(format!(
            "weights assembled for (s, p) = ({}, {}), operator asked for ({}, {})",
            weights.s(),
            weights.p(),
            params.s,
            params.p
        )));
    }
    let c = kernel_constant(1, params.s, params.p)? / u.grid().h();
    let vals = u.values();
    let p = params.p;
    let out: Vec<f64> = if vals.len() >= PAR_CELLS {
        (0..vals.len()).into_par_iter().map(|i| c * row_value(vals, weights, p, i)).collect()
    } else {
        (0..vals.len()).map(|i| c * row_value(vals, weights, p, i)).collect()
    };
    Field::new(*u.grid(), out)
}

/// `(Σ_{i,j} w_ij |u_i - u_j|^p + 2 Σ_i e_i |u_i|^p)^{1/p}`.
pub fn gagliardo_seminorm(u: &Field, weights: &KernelWeights, p: f64) -> Result<f64> {
    Ok(gagliardo_pow(u, weights, p)?.powf(1.0 / p))
}

/// The p-th power of [`gagliardo_seminorm`], without the final root.
pub fn gagliardo_pow(u: &Field, weights: &KernelWeights, p: f64) -> Result<f64> {
    check_weights(u, weights)?;
    let v = u.values();
    let w = weights.offsets();
    let mut pairs = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            pairs += w[j - i] * (v[i] - v[j]).abs().powf(p);
        }
    }
    let ext: f64 = v.iter().zip(weights.exterior()).map(|(x, e)| e * x.abs().powf(p)).sum();
    Ok(2.0 * pairs + 2.0 * ext)
}

/// `Σ_{i,j} w_ij φ(u_i - u_j)(v_i - v_j) + 2 Σ_i e_i φ(u_i) v_i`; equals
/// `[u]^p` when `v = u`.
pub fn energy_inner_product(u: &Field, v: &Field, weights: &KernelWeights, p: f64) -> Result<f64> {
    u.check_same_grid(v)?;
    check_weights(u, weights)?;
    let (a, b) = (u.values(), v.values());
    let w = weights.offsets();
    let mut pairs = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            pairs += w[j - i] * signed_pow(a[i] - a[j], p) * (b[i] - b[j]);
        }
    }
    let ext: f64 = a
        .iter()
        .zip(b)
        .zip(weights.exterior())
        .map(|((x, y), e)| e * signed_pow(*x, p) * y)
        .sum();
    Ok(2.0 * pairs + 2.0 * ext)
}

/// `(Σ h |u_i|^q)^{1/q}`.
pub fn lp_norm(u: &Field, p_exp: f64) -> Result<f64> {
    if !(p_exp >= 1.0) {
        return Err(Error::Parameter(format!("norm exponent {p_exp} below 1")));
    }
    let h = u.grid().h();
    let sum: f64 = u.values().iter().map(|x| x.abs().powf(p_exp)).sum();
    Ok((h * sum).powf(1.0 / p_exp))
}

/// L² inner product with cell quadrature.
pub fn l2_inner(u: &Field, v: &Field) -> Result<f64> {
    u.check_same_grid(v)?;
    Ok(u.grid().h() * u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum::<f64>())
}

/// `min_r (|Ω| + 2r)^{1+sp} / (2r)` over exterior balls touching the
/// interval, attained at `r* = |Ω| / (2sp)`.
pub fn geometric_quantity(grid: &Grid1D, s: f64, p: f64) -> f64 {
    let sp = s * p;
    sp * grid.length().powf(sp) * ((sp + 1.0) / sp).powf(1.0 + sp)
}

/// Matrix of the p = 2 operator, `C/h · (diag(Σ_j w_ij + e_i) - W)`.
pub fn linear_operator_matrix(weights: &KernelWeights) -> Result<DMatrix<f64>> {
    let n = weights.n();
    let c = kernel_constant(1, weights.s(), 2.0)? / weights.grid().h();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = weights.exterior()[i];
        for j in 0..n {
            if j != i {
                let w = weights.get(i, j);
                m[(i, j)] = -c * w;
                diag += w;
            }
        }
        m[(i, i)] = c * diag;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracspace::weights::assemble_weights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid1D, rng: &mut ChaCha8Rng) -> Field {
        let v = (0..grid.n_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Field::new(grid, v).unwrap()
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let w = assemble_weights(&g, 0.4, 3.0).unwrap();
        let params = FracParams::new(0.5, 0.4, 3.0).unwrap();
        let out = apply_fplap(&Field::zeros(g), &w, &params).unwrap();
        assert!(out.values().iter().all(|&x| x == 0.0));
        assert_eq!(gagliardo_seminorm(&Field::zeros(g), &w, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn bump_is_positive_at_its_cell() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let w = assemble_weights(&g, 0.5, 2.0).unwrap();
        let params = FracParams::new(0.5, 0.5, 2.0).unwrap();
        let mut u = Field::zeros(g);
        u.values_mut()[4] = 1.0;
        let out = apply_fplap(&u, &w, &params).unwrap();
        // Dense double sum: C/h (Σ_j w_4j + e_4) at the bump, -C/h w_4j elsewhere.
        let c = 1.0 / std::f64::consts::PI / g.h();
        let mut diag = w.exterior()[4];
        for j in 0..8 {
            diag += w.get(4, j);
        }
        assert!(out.values()[4] > 0.0);
        assert!((out.values()[4] - c * diag).abs() < 1e-12 * c * diag);
        assert!((out.values()[0] + c * w.get(4, 0)).abs() < 1e-12);
    }

    #[test]
    fn p_two_matches_linear_matrix() {
        let g = Grid1D::new(-1.0, 1.0, 16).unwrap();
        let w = assemble_weights(&g, 0.35, 2.0).unwrap();
        let params = FracParams::new(0.5, 0.35, 2.0).unwrap();
        let m = linear_operator_matrix(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_field(g, &mut rng);
        let out = apply_fplap(&u, &w, &params).unwrap();
        let mv = &m * nalgebra::DVector::from_column_slice(u.values());
        for i in 0..16 {
            assert!((out.values()[i] - mv[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn indicator_seminorm_by_brute_sum() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let w = assemble_weights(&g, 0.25, 2.0).unwrap();
        let mut u = Field::zeros(g);
        u.values_mut()[1] = 1.0;
        let mut brute = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                brute += w.get(i, j) * (u.values()[i] - u.values()[j]).powi(2);
            }
            brute += 2.0 * w.exterior()[i] * u.values()[i].powi(2);
        }
        assert!((gagliardo_seminorm(&u, &w, 2.0).unwrap() - brute.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn homogeneity_and_energy_identities() {
        let g = Grid1D::new(0.0, 2.0, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(s, p) in &[(0.3, 2.0), (0.6, 2.7), (0.45, 4.0)] {
            let w = assemble_weights(&g, s, p).unwrap();
            let params = FracParams::new(0.5, s, p).unwrap();
            let c = kernel_constant(1, s, p).unwrap();
            let u = random_field(g, &mut rng);
            let v = random_field(g, &mut rng);
            let z = random_field(g, &mut rng);
            let su = gagliardo_seminorm(&u, &w, p).unwrap();
            let s3 = gagliardo_seminorm(&u.scaled(-3.0), &w, p).unwrap();
            assert!((s3 - 3.0 * su).abs() < 1e-12 * s3);
            let uu = energy_inner_product(&u, &u, &w, p).unwrap();
            assert!((uu - su.powf(p)).abs() < 1e-12 * uu);
            let (a, b) = (0.7, -1.3);
            let comb = Field::new(g, v.values().iter().zip(z.values()).map(|(x, y)| a * x + b * y).collect())
                .unwrap();
            let lhs = energy_inner_product(&u, &comb, &w, p).unwrap();
            let rhs = a * energy_inner_product(&u, &v, &w, p).unwrap()
                + b * energy_inner_product(&u, &z, &w, p).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
            let au = apply_fplap(&u, &w, &params).unwrap();
            let pairing = l2_inner(&au, &v).unwrap();
            let energy = energy_inner_product(&u, &v, &w, p).unwrap();
            assert!((pairing - 0.5 * c * energy).abs() < 1e-10 * pairing.abs().max(1e-3));
            let neg = apply_fplap(&u.scaled(-1.0), &w, &params).unwrap();
            assert!(neg.values().iter().zip(au.values()).all(|(x, y)| *x == -*y));
        }
    }

    #[test]
    fn lp_norm_values() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        assert_eq!(lp_norm(&Field::zeros(g), 2.0).unwrap(), 0.0);
        let ones = Field::from_fn(g, |_| 1.0);
        for p in [1.0, 2.0, 3.5] {
            assert!((lp_norm(&ones, p).unwrap() - 1.0).abs() < 1e-15);
        }
        let mut ind = Field::zeros(g);
        ind.values_mut()[2] = 1.0;
        assert!((lp_norm(&ind, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(lp_norm(&ind, 0.5).is_err());
    }

    #[test]
    fn geometric_quantity_closed_form_and_scan() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let val = geometric_quantity(&g, 0.25, 2.0);
        assert!((val - 0.5 * 3f64.powf(1.5)).abs() < 1e-14);
        // Golden-section scan over the radius.
        let f = |r: f64| (1.0 + 2.0 * r).powf(1.5) / (2.0 * r);
        let (mut lo, mut hi) = (1e-3, 10.0);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if f(m1) < f(m2) { hi = m2 } else { lo = m1 }
        }
        assert!((f(0.5 * (lo + hi)) - val).abs() < 1e-8);
        let big = geometric_quantity(&g.dilate(3.0).unwrap(), 0.25, 2.0);
        assert!((big - 3f64.powf(0.5) * val).abs() < 1e-12);
    }
}
