use crate::error::{Error, Result};

/// Time nodes `t_j = t_final * (j / n_steps)^grading` on `[0, t_final]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    t_final: f64,
    grading: f64,
    nodes: Vec<f64>,
}

impl TimeMesh {
    pub fn uniform(t_final: f64, n_steps: usize) -> Result<Self> {
        Self::graded(t_final, n_steps, 1.0)
    }

    pub fn graded(t_final: f64, n_steps: usize, grading: f64) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::Parameter(format!("t_final = {t_final} must be positive")));
        }
        if n_steps == 0 {
            return Err(Error::Parameter("n_steps must be positive".into()));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::Parameter(format!("grading = {grading} must be >= 1")));
        }
        let n = n_steps as f64;
        let mut nodes: Vec<f64> = (0..=n_steps)
            .map(|j| t_final * (j as f64 / n).powf(grading))
            .collect();
        nodes[n_steps] = t_final;
        Ok(Self {
            t_final,
            grading,
            nodes,
        })
    }

    /// Grading `2/alpha` capped at 4, which concentrates nodes in the
    /// `t^alpha` initial layer.
    pub fn default_grading(alpha: f64) -> f64 {
        (2.0 / alpha).clamp(1.0, 4.0)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn is_uniform(&self) -> bool {
        self.grading == 1.0
    }
}

/// Samples of a scalar function of time at strictly increasing nodes
/// starting from `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarHistory {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ScalarHistory {
    pub fn new(mesh: &TimeMesh, values: Vec<f64>) -> Result<Self> {
        Self::from_parts(mesh.nodes().to_vec(), values)
    }

    pub fn from_fn(mesh: &TimeMesh, f: impl Fn(f64) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|&t| f(t)).collect();
        Self {
            times: mesh.nodes().to_vec(),
            values,
        }
    }

    /// Builds a history on arbitrary nodes, e.g. a truncated or locally
    /// refined mesh.
    pub fn from_parts(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} nodes but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.first().is_some_and(|&t| t != 0.0) {
            return Err(Error::Parameter("history must start at t = 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("time nodes must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    /// Same nodes, values mapped pointwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.times.len());
        Self {
            times: self.times.clone(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes_follow_power_law() {
        let m = TimeMesh::graded(2.0, 8, 3.0).unwrap();
        assert_eq!(m.nodes()[0], 0.0);
        assert_eq!(m.nodes()[8], 2.0);
        for (j, &t) in m.nodes().iter().enumerate() {
            assert_eq!(t, 2.0 * (j as f64 / 8.0).powf(3.0));
        }
        assert!(m.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn default_grading_is_capped() {
        assert_eq!(TimeMesh::default_grading(0.3), 4.0);
        assert_eq!(TimeMesh::default_grading(0.8), 2.5);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(TimeMesh::uniform(0.0, 4).is_err());
        assert!(TimeMesh::uniform(1.0, 0).is_err());
        assert!(TimeMesh::graded(1.0, 4, 0.5).is_err());
        assert!(ScalarHistory::from_parts(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(ScalarHistory::from_parts(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }
}
