use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::reaction::odd_pow;
use crate::error::Result;
use crate::fracspace::{assemble_weights, signed_pow, Grid1D};
use crate::fractime::{caputo_l1, ScalarHistory, TimeMesh};

/// Normalized slack below which an entry fails.
pub const SLACK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityEntry {
    pub name: &'static str,
    pub instances: usize,
    /// Smallest `(rhs - lhs) / scale` over all instances.
    pub min_slack: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub seed: u64,
    pub entries: Vec<InequalityEntry>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    instances: usize,
    min_slack: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, instances: 0, min_slack: f64::INFINITY }
    }

    /// Records `lhs ≤ rhs` relative to `scale`.
    fn record(&mut self, lhs: f64, rhs: f64, scale: f64) {
        let scale = scale.max(f64::MIN_POSITIVE);
        self.min_slack = self.min_slack.min((rhs - lhs) / scale);
    }

    fn finish(self) -> InequalityEntry {
        InequalityEntry {
            name: self.name,
            instances: self.instances,
            min_slack: self.min_slack,
            passed: self.min_slack >= -SLACK_TOL,
        }
    }
}

fn random_history(rng: &mut ChaCha8Rng) -> Result<ScalarHistory> {
    let n = rng.gen_range(4..48);
    let t_final = rng.gen_range(0.1..5.0);
    let mesh = if rng.gen_bool(0.5) {
        TimeMesh::uniform(t_final, n)?
    } else {
        TimeMesh::graded(t_final, n, rng.gen_range(1.0..4.0))?
    };
    let mut x = rng.gen_range(-2.0..2.0);
    let values = (0..=n)
        .map(|_| {
            x += rng.gen_range(-1.0..1.0);
            x
        })
        .collect();
    ScalarHistory::new(&mesh, values)
}

/// `u_n D^α u_n ≥ ½ D^α(u²)_n` for the L1 derivative on random histories.
pub fn alikhanov_entry(rng: &mut ChaCha8Rng, instances: usize) -> Result<InequalityEntry> {
    let mut tally = Tally::new("alikhanov");
    for i in 0..instances {
        let alpha = [0.3, 0.5, 0.8][i % 3];
        let u = random_history(rng)?;
        let du = caputo_l1(&u, alpha)?;
        let du2 = caputo_l1(&u.map(|x| x * x), alpha)?;
        let terms: Vec<(f64, f64)> = u.values().iter().zip(&du).zip(&du2).map(|((x, d), d2)| (0.5 * d2, x * d)).collect();
        let scale = terms.iter().fold(0.0f64, |m, (a, b)| m.max(a.abs() + b.abs()));
        for (lhs, rhs) in terms {
            tally.record(lhs, rhs, scale);
        }
        tally.instances += 1;
    }
    Ok(tally.finish())
}

/// `H'(u_n) D^α u_n ≥ D^α H(u)_n` for the convex `H(w) = (2/p)|w|^{p/2}`.
fn zacher_entry(rng: &mut ChaCha8Rng, instances: usize) -> Result<InequalityEntry> {
    let mut tally = Tally::new("zacher");
    for i in 0..instances {
        let alpha = [0.3, 0.5, 0.8][i % 3];
        let p = rng.gen_range(2.0..6.0);
        let u = random_history(rng)?;
        let hu = u.map(|w| 2.0 / p * w.abs().powf(p / 2.0));
        let du = caputo_l1(&u, alpha)?;
        let dh = caputo_l1(&hu, alpha)?;
        let terms: Vec<(f64, f64)> = u
            .values()
            .iter()
            .zip(&du)
            .zip(&dh)
            .map(|((w, d), dh)| (*dh, signed_pow(*w, p / 2.0) * d))
            .collect();
        let scale = terms.iter().fold(0.0f64, |m, (a, b)| m.max(a.abs() + b.abs()));
        for (lhs, rhs) in terms {
            tally.record(lhs, rhs, scale);
        }
        tally.instances += 1;
    }
    Ok(tally.finish())
}

fn sample_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let a: f64 = rng.gen_range(-5.0..5.0);
    let b = match rng.gen_range(0..10) {
        0 => a,
        1 => 0.0,
        _ => rng.gen_range(-5.0..5.0),
    };
    (a, b)
}

/// `(4/p²) ||a|^{(p-2)/2}a - |b|^{(p-2)/2}b|² ≤ (|a|^{p-2}a - |b|^{p-2}b)(a - b)`.
pub fn monotonicity_entry(rng: &mut ChaCha8Rng, instances: usize) -> InequalityEntry {
    let mut tally = Tally::new("p-monotonicity");
    for _ in 0..instances {
        let p = rng.gen_range(2.0..=6.0);
        let (a, b) = sample_pair(rng);
        let half = |x: f64| odd_pow(x, p / 2.0);
        let lhs = 4.0 / (p * p) * (half(a) - half(b)).powi(2);
        let rhs = (signed_pow(a, p) - signed_pow(b, p)) * (a - b);
        tally.record(lhs, rhs, lhs.abs() + rhs.abs());
        tally.instances += 1;
    }
    tally.finish()
}

/// `||u|^{m-1}u - |v|^{m-1}v| ≤ m max(|u|, |v|)^{m-1} |u - v|` for `m ≥ 1`.
fn lipschitz_entry(rng: &mut ChaCha8Rng, instances: usize) -> InequalityEntry {
    let mut tally = Tally::new("lipschitz");
    for _ in 0..instances {
        let m = rng.gen_range(1.0..=4.0);
        let (u, v) = sample_pair(rng);
        let lhs = (odd_pow(u, m) - odd_pow(v, m)).abs();
        let rhs = m * u.abs().max(v.abs()).powf(m - 1.0) * (u - v).abs();
        tally.record(lhs, rhs, lhs + rhs);
        tally.instances += 1;
    }
    tally.finish()
}

/// Sharp constant of `z^{b+c-1} ≤ ε z^c + C ε^{-(a-b)/(b-1)} z^{a+c-1}`:
/// `C = (1/r)(1 - 1/r)^{r-1}` with `r = (a-1)/(b-1)`.
pub fn young_constant(a: f64, b: f64) -> f64 {
    let r = (a - 1.0) / (b - 1.0);
    (1.0 / r) * (1.0 - 1.0 / r).powf(r - 1.0)
}

fn young_entry(rng: &mut ChaCha8Rng, instances: usize) -> InequalityEntry {
    let mut tally = Tally::new("young");
    for i in 0..instances {
        let b = rng.gen_range(1.05..4.0);
        let a = b + rng.gen_range(0.05..4.0);
        let c = rng.gen_range(1.0..4.0);
        let eps = 10f64.powf(rng.gen_range(-2.0..2.0));
        let z: f64 = if i % 10 == 0 { 0.0 } else { rng.gen_range(0.0..3.0) };
        let lhs = z.powf(b + c - 1.0);
        let rhs = eps * z.powf(c) + young_constant(a, b) * eps.powf(-(a - b) / (b - 1.0)) * z.powf(a + c - 1.0);
        tally.record(lhs, rhs, lhs + rhs);
        tally.instances += 1;
    }
    tally.finish()
}

/// Monotonicity of the discrete operator against the positive part:
/// `Σ w_ij (φ(u_i-u_j) - φ(v_i-v_j))(ψ_i - ψ_j) + 2 Σ e_i (φ(u_i) - φ(v_i)) ψ_i ≥ 0`
/// with `ψ = (u - v)₊`.
fn operator_entry(rng: &mut ChaCha8Rng, instances: usize) -> Result<InequalityEntry> {
    let mut tally = Tally::new("operator-monotonicity");
    for _ in 0..instances {
        let n = rng.gen_range(4..12);
        let s = rng.gen_range(0.1..0.9);
        let p = rng.gen_range(2.0..5.0);
        let grid = Grid1D::new(0.0, rng.gen_range(0.5..3.0), n)?;
        let w = assemble_weights(&grid, s, p)?;
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let psi: Vec<f64> = u.iter().zip(&v).map(|(a, b)| (a - b).max(0.0)).collect();
        let mut total = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let t = w.get(i, j)
                        * (signed_pow(u[i] - u[j], p) - signed_pow(v[i] - v[j], p))
                        * (psi[i] - psi[j]);
                    total += t;
                    scale += t.abs();
                }
            }
            let t = 2.0 * w.exterior()[i] * (signed_pow(u[i], p) - signed_pow(v[i], p)) * psi[i];
            total += t;
            scale += t.abs();
        }
        tally.record(0.0, total, scale);
        tally.instances += 1;
    }
    Ok(tally.finish())
}

/// Evaluates every inequality the comparison, existence and decay arguments
/// rely on over randomized inputs and reports the worst normalized slack.
pub fn inequality_suite(seed: u64) -> Result<InequalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = vec![
        alikhanov_entry(&mut rng, 200)?,
        zacher_entry(&mut rng, 200)?,
        monotonicity_entry(&mut rng, 200),
        lipschitz_entry(&mut rng, 200),
        young_entry(&mut rng, 200),
        operator_entry(&mut rng, 50)?,
    ];
    let passed = entries.iter().all(|e| e.passed);
    Ok(InequalityReport { seed, entries, passed })
}
