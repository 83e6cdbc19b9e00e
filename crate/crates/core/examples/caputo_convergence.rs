//! Order of the L1 Caputo derivative on uniform and graded meshes, with the
//! discrete inversion and integration-by-parts residuals.

use fraclab::fractime::{
    caputo_l1, gamma_fn, integration_by_parts_residual, inversion_residual, ScalarHistory, TimeMesh,
};

fn errors(mesh: &TimeMesh, alpha: f64, beta: f64) -> fraclab::Result<Vec<f64>> {
    // D^alpha t^beta = Γ(beta+1)/Γ(beta+1-alpha) t^{beta-alpha}
    let u = ScalarHistory::from_fn(mesh, |t| t.powf(beta));
    let d = caputo_l1(&u, alpha)?;
    let c = gamma_fn(beta + 1.0)? / gamma_fn(beta + 1.0 - alpha)?;
    Ok(u.times().iter().zip(&d).skip(1).map(|(t, v)| (v - c * t.powf(beta - alpha)).abs()).collect())
}

fn main() -> fraclab::Result<()> {
    let alpha = 0.5;
    println!("u = t^2, alpha = {alpha}");
    println!("{:>6} {:>12} {:>7} {:>12} {:>12}", "n", "max error", "order", "inversion", "by parts");
    let mut last = None;
    for n in [32, 64, 128, 256, 512, 1024] {
        let mesh = TimeMesh::uniform(1.0, n)?;
        let err = errors(&mesh, alpha, 2.0)?.into_iter().fold(0.0, f64::max);
        let u = ScalarHistory::from_fn(&mesh, |t| t * t);
        let phi = ScalarHistory::from_fn(&mesh, |t| (1.0 - t).powi(2));
        let order = last.map_or(String::from("-"), |e: f64| format!("{:.3}", (e / err).log2()));
        println!(
            "{n:>6} {err:>12.4e} {order:>7} {:>12.4e} {:>12.4e}",
            inversion_residual(&u, alpha)?,
            integration_by_parts_residual(&u, &phi, alpha)?
        );
        last = Some(err);
    }

    // A weakly singular u = t^alpha loses order on a uniform mesh; grading recovers it.
    let grading = TimeMesh::default_grading(alpha);
    println!("\nu = t^0.5, error at t = 1: uniform vs graded (r = {grading})");
    for n in [64, 256, 1024] {
        let uniform = *errors(&TimeMesh::uniform(1.0, n)?, alpha, 0.5)?.last().unwrap();
        let graded = *errors(&TimeMesh::graded(1.0, n, grading)?, alpha, 0.5)?.last().unwrap();
        println!("{n:>6} {uniform:>12.4e} {graded:>12.4e}");
    }
    Ok(())
}
