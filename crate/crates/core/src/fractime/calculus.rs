//! Discrete Caputo derivative (L1 scheme), Riemann-Liouville integral and the
//! residual checks that tie the two together.

use crate::error::{Error, Result};
use crate::fractime::mesh::ScalarHistory;
use crate::fractime::special::gamma_fn;

/// L1 history weights `b_j = (j+1)^{1-α} - j^{1-α}` for `j = 0..n`.
pub fn l1_weights(alpha: f64, n: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    let e = 1.0 - alpha;
    Ok((0..n)
        .map(|j| {
            let j = j as f64;
            (j + 1.0).powf(e) - j.powf(e)
        })
        .collect())
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1]")))
    }
}

/// Coefficients of the L1 approximation at one node:
/// `D^α u(t_n) ≈ Σ_{k=1}^{n} c_k (u_k - u_{k-1})`.
///
/// Uniform node sets reuse a cached table of `b_j`; anything else (graded
/// meshes, locally halved steps) uses the exact kernel antiderivative on each
/// interval.
#[derive(Debug, Clone)]
pub(crate) struct L1Stencil {
    alpha: f64,
    inv_g2a: f64,
    b: Vec<f64>,
}

impl L1Stencil {
    pub(crate) fn new(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self {
            alpha,
            inv_g2a: 1.0 / gamma_fn(2.0 - alpha)?,
            b: Vec::new(),
        })
    }

    /// Fills `out[k-1] = c_k` for `k = 1..=n`.
    pub(crate) fn row(&mut self, times: &[f64], n: usize, out: &mut Vec<f64>) {
        out.clear();
        if n == 0 {
            return;
        }
        let tn = times[n];
        if self.alpha == 1.0 {
            out.resize(n, 0.0);
            out[n - 1] = 1.0 / (tn - times[n - 1]);
            return;
        }
        if let Some(dt) = uniform_step(&times[..=n]) {
            if self.b.len() < n {
                self.b = l1_weights(self.alpha, n.max(2 * self.b.len())).expect("alpha checked");
            }
            let scale = self.inv_g2a * dt.powf(-self.alpha);
            out.extend((1..=n).map(|k| scale * self.b[n - k]));
            return;
        }
        let e = 1.0 - self.alpha;
        out.extend((1..=n).map(|k| {
            let tau = times[k] - times[k - 1];
            self.inv_g2a * ((tn - times[k - 1]).powf(e) - (tn - times[k]).powf(e)) / tau
        }));
    }
}

fn uniform_step(times: &[f64]) -> Option<f64> {
    let n = times.len() - 1;
    let dt = (times[n] - times[0]) / n as f64;
    times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt)
        .then_some(dt)
}

/// Discrete Caputo derivative at every node. The entry at `t = 0` is 0, the
/// limit of `D^α u` at the origin for continuously differentiable `u`.
pub fn caputo_l1(history: &ScalarHistory, alpha: f64) -> Result<Vec<f64>> {
    if history.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "Caputo derivative needs at least 2 nodes, got {}",
            history.len()
        )));
    }
    let mut stencil = L1Stencil::new(alpha)?;
    let (t, u) = (history.times(), history.values());
    let mut row = Vec::with_capacity(t.len());
    let mut out = vec![0.0; t.len()];
    for n in 1..t.len() {
        stencil.row(t, n, &mut row);
        out[n] = row
            .iter()
            .enumerate()
            .map(|(i, c)| c * (u[i + 1] - u[i]))
            .sum();
    }
    Ok(out)
}

/// Left Riemann-Liouville integral `I^α_{0|t} u` at every node, by product
/// rectangles (right endpoint value on each interval) with the exact kernel
/// antiderivative.
pub fn rl_integral(history: &ScalarHistory, alpha: f64) -> Result<Vec<f64>> {
    check_order(alpha)?;
    let g = gamma_fn(alpha + 1.0)?;
    let (t, u) = (history.times(), history.values());
    let mut out = vec![0.0; t.len()];
    for n in 1..t.len() {
        let tn = t[n];
        out[n] = (1..=n)
            .map(|k| u[k] * ((tn - t[k - 1]).powf(alpha) - (tn - t[k]).powf(alpha)))
            .sum::<f64>()
            / g;
    }
    Ok(out)
}

/// Mirror a history about `T = t_last`: node `j` of the result is node
/// `N - j` of the input, at time `T - t_{N-j}`.
fn reversed(history: &ScalarHistory) -> ScalarHistory {
    let t = history.times();
    let tf = *t.last().expect("nonempty history");
    let times = t.iter().rev().map(|&s| tf - s).collect();
    let values = history.values().iter().rev().copied().collect();
    ScalarHistory::from_parts(times, values).expect("mirrored nodes stay increasing")
}

/// Right Riemann-Liouville integral `I^α_{t|T} u`, computed by running the
/// left-sided quadrature on the time-reversed history.
pub fn rl_integral_right(history: &ScalarHistory, alpha: f64) -> Result<Vec<f64>> {
    let mut out = rl_integral(&reversed(history), alpha)?;
    out.reverse();
    Ok(out)
}

/// `max_n |I^α(D^α u)(t_n) - (u(t_n) - u(0))|` with both discrete operators.
pub fn inversion_residual(history: &ScalarHistory, alpha: f64) -> Result<f64> {
    let d = caputo_l1(history, alpha)?;
    let back = rl_integral(&history.with_values(d), alpha)?;
    let u = history.values();
    Ok(back
        .iter()
        .zip(u)
        .map(|(i, v)| (i - (v - u[0])).abs())
        .fold(0.0, f64::max))
}

/// Residual of the fractional integration-by-parts identity
///
/// ```text
/// ∫ (D^α_{0|t} u) φ dt = ∫ u (𝔻^α_{t|T} φ) dt + [ (I^{1-α}_{t|T} φ) u ]_0^T
/// ```
///
/// where `𝔻^α_{t|T} φ = -d/dt I^{1-α}_{t|T} φ`. The left side uses the
/// trapezoidal rule on the L1 derivative; the right side differentiates the
/// mirrored integral cell by cell and pairs it with cell averages of `u`.
pub fn integration_by_parts_residual(
    u: &ScalarHistory,
    phi: &ScalarHistory,
    alpha: f64,
) -> Result<f64> {
    if u.times() != phi.times() {
        return Err(Error::Shape("u and phi must share one mesh".into()));
    }
    let t = u.times();
    let (uv, pv) = (u.values(), phi.values());
    let du = caputo_l1(u, alpha)?;
    let lhs: f64 = (1..t.len())
        .map(|k| 0.5 * (t[k] - t[k - 1]) * (du[k] * pv[k] + du[k - 1] * pv[k - 1]))
        .sum();

    let g = rl_integral_right(phi, 1.0 - alpha)?;
    let bulk: f64 = (1..t.len())
        .map(|k| (g[k - 1] - g[k]) * 0.5 * (uv[k - 1] + uv[k]))
        .sum();
    let last = t.len() - 1;
    let boundary = g[last] * uv[last] - g[0] * uv[0];
    Ok((lhs - bulk - boundary).abs())
}

/// `phi0 · E_{α,1}(c t^α)`, the fractional Gronwall bound for
/// `φ(t) ≤ φ0 + c ∫_0^t (t-s)^{α-1} φ(s) ds / Γ(α)`.
pub fn gronwall_envelope(phi0: f64, c: f64, alpha: f64, t: f64) -> Result<f64> {
    if phi0 < 0.0 || c < 0.0 || t < 0.0 {
        return Err(Error::Domain(format!(
            "gronwall envelope needs phi0, c, t >= 0 (got {phi0}, {c}, {t})"
        )));
    }
    Ok(phi0 * crate::fractime::special::mittag_leffler(alpha, c * t.powf(alpha))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractime::mesh::TimeMesh;
    use proptest::prelude::*;

    fn hist(n: usize, f: impl Fn(f64) -> f64) -> ScalarHistory {
        ScalarHistory::from_fn(&TimeMesh::uniform(1.0, n).unwrap(), f)
    }

    #[test]
    fn weights_basic_properties() {
        let b = l1_weights(0.5, 10).unwrap();
        assert_eq!(b[0], 1.0);
        assert!((b[1] - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(b.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        assert!(l1_weights(1.0, 3).is_err());
        assert!(l1_weights(0.0, 3).is_err());
    }

    #[test]
    fn caputo_needs_two_nodes() {
        let h = ScalarHistory::from_parts(vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(caputo_l1(&h, 0.5), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn caputo_of_constant_is_exactly_zero() {
        for mesh in [TimeMesh::uniform(3.0, 17).unwrap(), TimeMesh::graded(3.0, 17, 2.5).unwrap()] {
            let d = caputo_l1(&ScalarHistory::from_fn(&mesh, |_| 4.25), 0.37).unwrap();
            assert!(d.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn caputo_of_linear_is_exact() {
        // L1 interpolates piecewise linearly, so u = t is reproduced exactly
        let d = caputo_l1(&hist(64, |t| t), 0.5).unwrap();
        let exact = 1.0 / gamma_fn(1.5).unwrap();
        assert!((d[64] - exact).abs() < 1e-12);
        assert!((exact - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
    }

    #[test]
    fn caputo_of_square_converges() {
        let exact = 2.0 / gamma_fn(2.5).unwrap();
        assert!((exact - 1.504_505_6).abs() < 1e-7);
        let err = |n| (caputo_l1(&hist(n, |t| t * t), 0.5).unwrap()[n] - exact).abs();
        let (e1, e2) = (err(128), err(256));
        assert!(e2 < e1);
        assert!((e1 / e2).log2() > 1.4);
    }

    #[test]
    fn graded_mesh_uses_general_weights() {
        let mesh = TimeMesh::graded(1.0, 200, 2.0).unwrap();
        let d = caputo_l1(&ScalarHistory::from_fn(&mesh, |t| t), 0.5).unwrap();
        let exact = 1.0 / gamma_fn(1.5).unwrap();
        assert!((d[200] - exact).abs() < 1e-12);
    }

    #[test]
    fn alpha_one_is_backward_difference() {
        let h = hist(4, |t| t * t);
        let d = caputo_l1(&h, 1.0).unwrap();
        assert!((d[4] - (1.0 - 0.5625) * 4.0).abs() < 1e-14);
    }

    #[test]
    fn rl_integral_examples() {
        let zero = rl_integral(&hist(16, |_| 0.0), 0.5).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        let one = rl_integral(&hist(16, |_| 1.0), 0.5).unwrap();
        let exact = 1.0 / gamma_fn(1.5).unwrap();
        assert!((one[16] - exact).abs() < 1e-14);
        let lin = rl_integral(&hist(256, |t| t), 0.5).unwrap();
        let exact = 1.0 / gamma_fn(2.5).unwrap();
        assert!((exact - 0.752_252_8).abs() < 1e-7);
        assert!((lin[256] - exact).abs() < 4.0 / 256.0);
    }

    #[test]
    fn right_integral_mirrors_left() {
        // I^α_{t|T} 1 = (T - t)^α / Γ(α + 1)
        let h = hist(32, |_| 1.0);
        let r = rl_integral_right(&h, 0.3).unwrap();
        let g = gamma_fn(1.3).unwrap();
        for (i, &t) in h.times().iter().enumerate() {
            assert!((r[i] - (1.0 - t).powf(0.3) / g).abs() < 1e-13);
        }
    }

    #[test]
    fn inversion_residual_examples() {
        assert_eq!(inversion_residual(&hist(32, |_| 2.0), 0.5).unwrap(), 0.0);
        assert!(inversion_residual(&hist(256, |t| t), 0.5).unwrap() < 0.01);
        let mut prev = f64::INFINITY;
        for n in [32, 64, 128, 256] {
            let r = inversion_residual(&hist(n, f64::sin), 0.5).unwrap();
            assert!(r < prev, "n = {n}: {r} !< {prev}");
            prev = r;
        }
    }

    #[test]
    fn integration_by_parts_examples() {
        let zero = integration_by_parts_residual(&hist(64, |_| 0.0), &hist(64, |t| t), 0.5).unwrap();
        assert_eq!(zero, 0.0);
        let r = integration_by_parts_residual(&hist(256, |t| t), &hist(256, |_| 1.0), 0.5).unwrap();
        assert!(r < 0.02, "{r}");
        let bump = |t: f64| t * (1.0 - t);
        let res = |n| integration_by_parts_residual(&hist(n, bump), &hist(n, bump), 0.5).unwrap();
        let (r1, r2, r3) = (res(64), res(128), res(256));
        assert!(r1 / r2 >= 2.0 && r2 / r3 >= 2.0, "{r1} {r2} {r3}");
    }

    #[test]
    fn integration_by_parts_rejects_mesh_mismatch() {
        assert!(matches!(
            integration_by_parts_residual(&hist(8, |t| t), &hist(9, |t| t), 0.5),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn gronwall_examples() {
        assert_eq!(gronwall_envelope(3.0, 2.0, 0.4, 0.0).unwrap(), 3.0);
        let e = gronwall_envelope(2.0, 1.5, 1.0, 0.7).unwrap();
        assert!((e - 2.0 * (1.05f64).exp()).abs() < 1e-13);
        let v = gronwall_envelope(1.0, 1.0, 0.5, 1.0).unwrap();
        assert!((v - 5.008_980_08).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn rl_integral_is_linear(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            us in prop::collection::vec(-5.0f64..5.0, 12),
            vs in prop::collection::vec(-5.0f64..5.0, 12),
        ) {
            let mesh = TimeMesh::graded(2.0, 11, 1.7).unwrap();
            let hu = ScalarHistory::new(&mesh, us.clone()).unwrap();
            let hv = ScalarHistory::new(&mesh, vs.clone()).unwrap();
            let comb: Vec<f64> = us.iter().zip(&vs).map(|(u, v)| a * u + b * v).collect();
            let lhs = rl_integral(&ScalarHistory::new(&mesh, comb).unwrap(), 0.6).unwrap();
            let iu = rl_integral(&hu, 0.6).unwrap();
            let iv = rl_integral(&hv, 0.6).unwrap();
            for i in 0..12 {
                let rhs = a * iu[i] + b * iv[i];
                prop_assert!((lhs[i] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }

        #[test]
        fn weights_telescope(alpha in 0.01f64..0.99, n in 1usize..400) {
            let b = l1_weights(alpha, n).unwrap();
            let sum: f64 = b.iter().sum();
            prop_assert!((sum - (n as f64).powf(1.0 - alpha)).abs() <= 1e-12 * sum);
        }
    }
}
