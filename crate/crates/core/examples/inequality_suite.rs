//! Randomized check of the discrete inequalities behind the comparison,
//! existence and decay arguments.

use fraclab::dynamics::{inequality_suite, young_constant};

fn main() -> fraclab::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let report = inequality_suite(seed)?;
    for e in &report.entries {
        println!("{:<22} {:>4} instances, min slack {:>10.3e}  {}", e.name, e.instances, e.min_slack, if e.passed { "ok" } else { "VIOLATED" });
    }
    println!("Young constant for (a, b) = (4, 2): {:.6}", young_constant(4.0, 2.0));
    println!("seed {seed}: {}", if report.passed { "all hold" } else { "violations found" });
    Ok(())
}
