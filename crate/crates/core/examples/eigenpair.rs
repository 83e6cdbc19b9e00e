//! First eigenpair of the fractional p-Laplacian, its scaling under
//! dilation, domain monotonicity and the geometric Poincaré bound.

use fraclab::eigen::{first_eigenpair, poincare_bound_report, scaling_exponent, Normalization, DEFAULT_TOL};
use fraclab::fracspace::Grid1D;

fn main() -> fraclab::Result<()> {
    let grid = Grid1D::new(-1.0, 1.0, 256)?;
    for (s, p) in [(0.5, 2.0), (0.3, 2.5), (0.6, 3.0)] {
        let pair = first_eigenpair(&grid, s, p, DEFAULT_TOL, Normalization::LpUnit)?;
        println!(
            "s = {s}, p = {p}: lambda1 = {:.8}, min quotient = {:.8}, residual {:.1e}, {} iterations",
            pair.lambda1, pair.quotient_min, pair.residual, pair.iterations
        );
    }

    let base = Grid1D::new(0.0, 1.0, 128)?;
    for (s, p) in [(0.5, 2.0), (0.4, 3.0)] {
        let r = scaling_exponent(&base, 2.0, s, p)?;
        println!("dilation by 2, s = {s}, p = {p}: exponent {:.4} (predicted {:.4})", r.exponent, r.predicted);
    }

    println!("nested intervals (0, b) at fixed h = 0.01:");
    for b in [0.5, 1.0, 1.5, 2.0] {
        let g = Grid1D::new(0.0, b, (b * 100.0) as usize)?;
        println!("  b = {b}: lambda1 = {:.6}", first_eigenpair(&g, 0.5, 2.0, DEFAULT_TOL, Normalization::L2Unit)?.lambda1);
    }

    let report = poincare_bound_report(&base, 0.5, 2.5)?;
    println!(
        "geometric bound {:.4}, min quotient {:.4}, lambda1 {:.4}: quotient bound {}, operator bound {}",
        report.geometric_lower_bound, report.quotient_min, report.lambda1, report.quotient_bound_holds, report.constant_bound_holds
    );
    Ok(())
}
