//! Assembles the interaction weights of the discrete fractional p-Laplacian,
//! caches them on disk, and evaluates the operator and its energy.

use fraclab::fracspace::{
    apply_fplap, energy_inner_product, gagliardo_seminorm, kernel_constant, Field, FracParams,
    Grid1D, KernelWeights,
};

fn main() -> fraclab::Result<()> {
    let grid = Grid1D::new(-1.0, 1.0, 200)?;
    let params = FracParams::new(0.5, 0.4, 3.0)?;
    println!("C(1, s, p) = {:.12}", kernel_constant(1, params.s, params.p)?);

    let dir = std::env::temp_dir().join("fraclab-weights");
    std::fs::create_dir_all(&dir)?;
    let weights = KernelWeights::load_or_assemble(&dir, &grid, params.s, params.p)?;
    println!("cache file: {}", KernelWeights::cache_path(&dir, &grid, params.s, params.p).display());
    println!("offsets 1..5: {:?}", &weights.offsets()[1..5]);
    println!("exterior weight at the edge / centre: {:.6e} / {:.6e}", weights.exterior()[0], weights.exterior()[100]);

    let u = Field::from_fn(grid, |x| (1.0 - x * x).max(0.0).powf(params.s));
    let au = apply_fplap(&u, &weights, &params)?;
    println!("[u]_(s,p) = {:.8}", gagliardo_seminorm(&u, &weights, params.p)?);
    println!("<A u, u>  = {:.8}", energy_inner_product(&u, &u, &weights, params.p)?);
    println!("(A u) at x = {:.3}: {:.6}", grid.center(100), au.values()[100]);
    Ok(())
}
