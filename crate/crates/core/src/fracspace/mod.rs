//! Nonlocal machinery in space: cell grids, exact kernel weights, the
//! discrete fractional p-Laplacian and the associated seminorms.

mod grid;
mod ops;
mod weights;

pub use grid::{Field, FracParams, Grid1D};
pub use ops::{
    apply_fplap, energy_inner_product, gagliardo_pow, gagliardo_seminorm, geometric_quantity,
    l2_inner, linear_operator_matrix, lp_norm, signed_pow,
};
pub use weights::{assemble_weights, kernel_constant, KernelWeights};
