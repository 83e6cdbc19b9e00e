//! Mittag-Leffler values across the series/asymptotic switch and the
//! fractional Gronwall envelope built on them.

use fraclab::fractime::{gronwall_envelope, mittag_leffler, ML_SERIES_LIMIT};

fn main() -> fraclab::Result<()> {
    println!("{:>6} {:>8} {:>22}", "alpha", "z", "E_alpha(z)");
    for alpha in [0.3, 0.5, 0.8, 1.0] {
        for z in [0.0, 0.5, 1.0, 2.0, 5.0] {
            println!("{alpha:>6} {z:>8} {:>22.14e}", mittag_leffler(alpha, z)?);
        }
    }
    // Series below the switch, asymptotic expansion above it.
    for alpha in [0.8, 1.0] {
        let below = mittag_leffler(alpha, ML_SERIES_LIMIT * (1.0 - 1e-12))?;
        let above = mittag_leffler(alpha, ML_SERIES_LIMIT)?;
        println!("alpha = {alpha}: across z = {ML_SERIES_LIMIT} relative jump {:.2e}", (above - below).abs() / above);
    }
    // e^1 at alpha = 1 and e·erfc(-1) at alpha = 1/2.
    println!("E_1(1)   = {:.15}", mittag_leffler(1.0, 1.0)?);
    println!("E_1/2(1) = {:.15}", mittag_leffler(0.5, 1.0)?);

    println!("\nGronwall envelope phi0 E_a(c t^a), phi0 = 1, c = 2:");
    for t in [0.0, 0.25, 0.5, 1.0, 2.0] {
        println!("  t = {t:<5} {:.6}", gronwall_envelope(1.0, 2.0, 0.5, t)?);
    }
    Ok(())
}
