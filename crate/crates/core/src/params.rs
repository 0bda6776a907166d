//! Problem description shared by solvers and experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// External potential of the evolution equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// No potential: free dispersion.
    #[default]
    None,
    /// Isotropic harmonic potential |x|^2 / 2.
    Harmonic,
}

/// Semiclassical problem parameters.
///
/// The nonlinearity power must satisfy `sigma > 2/n` (short-range regime;
/// the scattering operator and the epsilon-sweep asymptotics both need it).
/// Supported dimensions are 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Spatial dimension n (1 or 2).
    pub n: usize,
    /// Nonlinearity exponent sigma in |u|^{2 sigma} u.
    pub sigma: f64,
    /// Semiclassical parameter, in (0, 1].
    pub eps: f64,
    /// External potential.
    pub potential: Potential,
    /// Final time of the scenario.
    pub t_final: f64,
}

impl Params {
    pub fn new(n: usize, sigma: f64, eps: f64, potential: Potential, t_final: f64) -> Result<Params> {
        let p = Params { n, sigma, eps, potential, t_final };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 2 {
            return Err(Error::BadDimension(self.n));
        }
        let bound = 2.0 / self.n as f64;
        if !(self.sigma > bound) {
            return Err(Error::SigmaTooSmall { sigma: self.sigma, bound });
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::BadParams(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if !self.t_final.is_finite() {
            return Err(Error::BadParams(format!("t_final must be finite, got {}", self.t_final)));
        }
        Ok(())
    }

    /// Coupling strength eps^{n sigma} in front of the nonlinearity.
    pub fn coupling(&self) -> f64 {
        self.eps.powf(self.n as f64 * self.sigma)
    }

    pub fn with_eps(mut self, eps: f64) -> Params {
        self.eps = eps;
        self
    }
}
