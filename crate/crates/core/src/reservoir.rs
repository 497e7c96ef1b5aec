//! Lorentzian reservoir parameters and the Bell-like initial state family.

use serde::{Deserialize, Serialize};

use crate::correlations::XState;
use crate::error::{Error, Result};

/// Coupling regime of a Lorentzian reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `gamma0 > lambda / 2`: the excited amplitude oscillates.
    Strong,
    Weak,
}

/// Lorentzian spectral density with strength `gamma0` and width `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirParams {
    gamma0: f64,
    lambda: f64,
}

impl ReservoirParams {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::InvalidConfig(format!("gamma0 must be positive, got {gamma0}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { gamma0, lambda })
    }

    /// Reservoir with `gamma0 = 1`, i.e. every rate and time in units of `gamma0`.
    pub fn scaled(lambda_over_gamma0: f64) -> Result<Self> {
        Self::new(1.0, lambda_over_gamma0)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn regime(&self) -> Regime {
        if self.gamma0 > 0.5 * self.lambda {
            Regime::Strong
        } else {
            Regime::Weak
        }
    }

    /// Pseudomode coupling `sqrt(gamma0 * lambda / 2)`.
    pub fn omega0(&self) -> f64 {
        (0.5 * self.gamma0 * self.lambda).sqrt()
    }
}

/// `alpha |00> + sqrt(1 - alpha^2) |11>`, parametrized by `alpha^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellLikeInitial {
    alpha2: f64,
}

impl BellLikeInitial {
    pub fn new(alpha2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha2) {
            return Err(Error::InvalidConfig(format!("alpha2 must lie in [0, 1], got {alpha2}")));
        }
        Ok(Self { alpha2 })
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    /// Population of `|11>`, `1 - alpha^2`.
    pub fn kappa(&self) -> f64 {
        1.0 - self.alpha2
    }

    /// Amplitudes on `|00>` and `|11>`.
    pub fn amplitudes(&self) -> (f64, f64) {
        (self.alpha2.sqrt(), self.kappa().sqrt())
    }

    pub fn xstate(&self) -> XState {
        let (c0, c1) = self.amplitudes();
        XState::new(self.alpha2, 0.0, self.kappa(), c0 * c1, 0.0).expect("Bell-like states are valid X states")
    }
}
