use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracspace::Field;

/// Reaction `γ|u|^{m-1}u + μ|u|^{q-2}u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub gamma: f64,
    pub mu: f64,
    pub m: f64,
    pub q: f64,
}

/// `|u|^{e-1} u` with `0 ↦ 0`.
#[inline]
pub(crate) fn odd_pow(u: f64, e: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else if e == 1.0 {
        u
    } else {
        u.abs().powf(e - 1.0) * u
    }
}

/// The four sign regimes in which sub- and supersolutions stay ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComparisonRegime {
    /// `m ≥ 1, q ≥ 2, γ ≥ 0, μ ≥ 0`
    #[serde(rename = "sources")]
    Sources,
    /// `m > 0, q ≥ 1, γ ≤ 0, μ ≤ 0`
    #[serde(rename = "sinks")]
    Sinks,
    /// `m ≥ 1, q ≥ 1, γ ≥ 0, μ ≤ 0`
    #[serde(rename = "source-sink")]
    SourceSink,
    /// `m > 0, q ≥ 2, γ ≤ 0, μ ≥ 0`
    #[serde(rename = "sink-source")]
    SinkSource,
}

impl ComparisonRegime {
    pub const ALL: [ComparisonRegime; 4] = [
        ComparisonRegime::Sources,
        ComparisonRegime::Sinks,
        ComparisonRegime::SourceSink,
        ComparisonRegime::SinkSource,
    ];

    pub fn holds(self, r: &Reaction) -> bool {
        let (g, mu, m, q) = (r.gamma, r.mu, r.m, r.q);
        match self {
            Self::Sources => m >= 1.0 && q >= 2.0 && g >= 0.0 && mu >= 0.0,
            Self::Sinks => m > 0.0 && q >= 1.0 && g <= 0.0 && mu <= 0.0,
            Self::SourceSink => m >= 1.0 && q >= 1.0 && g >= 0.0 && mu <= 0.0,
            Self::SinkSource => m > 0.0 && q >= 2.0 && g <= 0.0 && mu >= 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sources => "sources",
            Self::Sinks => "sinks",
            Self::SourceSink => "source-sink",
            Self::SinkSource => "sink-source",
        }
    }
}

impl Reaction {
    pub fn new(gamma: f64, mu: f64, m: f64, q: f64) -> Result<Self> {
        let r = Self { gamma, mu, m, q };
        r.validate()?;
        Ok(r)
    }

    pub fn zero() -> Self {
        Self { gamma: 0.0, mu: 0.0, m: 1.0, q: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) {
            return Err(Error::Parameter(format!("m = {} must be positive", self.m)));
        }
        if !(self.q >= 1.0) {
            return Err(Error::Parameter(format!("q = {} must be at least 1", self.q)));
        }
        if !(self.gamma.is_finite() && self.mu.is_finite()) {
            return Err(Error::Parameter("reaction coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.gamma * odd_pow(u, self.m) + self.mu * odd_pow(u, self.q - 1.0)
    }

    /// Terms with positive coefficient.
    pub(crate) fn source(&self, u: f64) -> f64 {
        let mut f = 0.0;
        if self.gamma > 0.0 {
            f += self.gamma * odd_pow(u, self.m);
        }
        if self.mu > 0.0 {
            f += self.mu * odd_pow(u, self.q - 1.0);
        }
        f
    }

    /// `a(v) ≥ 0` with `sink(u) = -a(u) u`; evaluated at `|v| ≥ floor` so the
    /// coefficient stays finite for exponents below the linear one.
    pub(crate) fn sink_coefficient(&self, v: f64, floor: f64) -> f64 {
        let x = v.abs().max(floor);
        let mut a = 0.0;
        if self.gamma < 0.0 {
            a -= self.gamma * if self.m == 1.0 { 1.0 } else { x.powf(self.m - 1.0) };
        }
        if self.mu < 0.0 {
            a -= self.mu * if self.q == 2.0 { 1.0 } else { x.powf(self.q - 2.0) };
        }
        a
    }

    pub fn has_sinks(&self) -> bool {
        self.gamma < 0.0 || self.mu < 0.0
    }

    /// First comparison regime this reaction belongs to.
    pub fn comparison_regime(&self) -> Option<ComparisonRegime> {
        ComparisonRegime::ALL.into_iter().find(|r| r.holds(self))
    }
}

/// Pointwise reaction term.
pub fn reaction_eval(u: &Field, reaction: &Reaction) -> Result<Field> {
    reaction.validate()?;
    Ok(u.map(|x| reaction.eval(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracspace::Grid1D;

    #[test]
    fn pointwise_values() {
        let g = Grid1D::new(0.0, 1.0, 2).unwrap();
        let u = Field::new(g, vec![-2.0, 0.0]).unwrap();
        let a = reaction_eval(&u, &Reaction::new(1.0, 0.0, 2.0, 2.0).unwrap()).unwrap();
        assert_eq!(a.values(), &[-4.0, 0.0]);
        let b = reaction_eval(&u.scaled(-1.0), &Reaction::new(0.0, 1.0, 1.0, 3.0).unwrap()).unwrap();
        assert_eq!(b.values(), &[4.0, 0.0]);
        let sub = Reaction { gamma: -1.0, mu: -1.0, m: 0.5, q: 1.0 };
        assert_eq!(sub.eval(0.0), 0.0);
        assert!(Reaction::new(1.0, 1.0, 0.0, 2.0).is_err());
        assert!(Reaction::new(1.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn splitting_reassembles_the_reaction() {
        let r = Reaction::new(1.5, -0.7, 2.0, 3.5).unwrap();
        for u in [-3.0, -0.2, 0.4, 2.0] {
            let split = r.source(u) - r.sink_coefficient(u, 0.0) * u;
            assert!((split - r.eval(u)).abs() < 1e-14);
        }
    }

    #[test]
    fn regimes() {
        let r = Reaction::new(1.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(r.comparison_regime(), Some(ComparisonRegime::Sources));
        let r = Reaction::new(-1.0, -1.0, 0.5, 1.5).unwrap();
        assert_eq!(r.comparison_regime(), Some(ComparisonRegime::Sinks));
        let r = Reaction::new(1.0, -1.0, 2.0, 1.5).unwrap();
        assert_eq!(r.comparison_regime(), Some(ComparisonRegime::SourceSink));
        let r = Reaction::new(-1.0, 1.0, 0.5, 2.5).unwrap();
        assert_eq!(r.comparison_regime(), Some(ComparisonRegime::SinkSource));
        let r = Reaction::new(1.0, 1.0, 0.5, 2.5).unwrap();
        assert_eq!(r.comparison_regime(), None);
    }
}
