use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform cell grid on the interval `(a, b)`. Fields defined on it are
/// implicitly zero outside the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Parameter(format!("interval ({a}, {b}) is empty or not finite")));
        }
        if n_cells == 0 {
            return Err(Error::Parameter("grid needs at least one cell".into()));
        }
        Ok(Self { a, b, n_cells })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        self.length() / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.h()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// The grid on `(k a, k b)` with the same number of cells.
    pub fn dilate(&self, k: f64) -> Result<Self> {
        Self::new(k * self.a, k * self.b, self.n_cells)
    }
}

/// Exponents `(α, s, p)` of the time-space fractional problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub alpha: f64,
    pub s: f64,
    pub p: f64,
}

impl FracParams {
    pub fn new(alpha: f64, s: f64, p: f64) -> Result<Self> {
        let params = Self { alpha, s, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Parameter(format!("s = {} outside (0, 1)", self.s)));
        }
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!("p = {} must be at least 2", self.p)));
        }
        Ok(())
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }
}

/// Cell values of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![0.0; grid.n_cells()] }
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.centers().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape("fields live on different grids".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.centers(), vec![-0.75, -0.25, 0.25, 0.75]);
        assert!(Grid1D::new(1.0, 1.0, 4).is_err());
        assert!(Grid1D::new(0.0, 1.0, 0).is_err());
        let d = g.dilate(2.0).unwrap();
        assert_eq!((d.a(), d.b()), (-2.0, 2.0));
    }

    #[test]
    fn params_ranges() {
        assert!(FracParams::new(0.5, 0.5, 2.0).is_ok());
        assert!(FracParams::new(1.0, 0.5, 2.0).is_err());
        assert!(FracParams::new(0.5, 0.0, 2.0).is_err());
        assert!(FracParams::new(0.5, 0.5, 1.5).is_err());
    }

    #[test]
    fn field_shape_is_checked() {
        let g = Grid1D::new(0.0, 1.0, 3).unwrap();
        assert!(Field::new(g, vec![1.0; 2]).is_err());
        let f = Field::from_fn(g, |x| x);
        assert_eq!(f.len(), 3);
        assert!((f.sup_norm() - 5.0 / 6.0).abs() < 1e-15);
    }
}
