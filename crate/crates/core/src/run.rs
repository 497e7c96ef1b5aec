//! One trajectory from a Bell-like initial state, in units where `gamma0 = 1`.

use serde::{Deserialize, Serialize};

use crate::analysis::TrajectoryRecord;
use crate::common::{grid_steps, propagate_common, IntegratorConfig, IntegratorHealth};
use crate::error::{Error, Result};
use crate::independent::propagate_independent;
use crate::reservoir::{BellLikeInitial, ReservoirParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Environment {
    Independent,
    Common,
}

impl Environment {
    pub fn as_str(self) -> &'static str {
        match self {
            Environment::Independent => "independent",
            Environment::Common => "common",
        }
    }
}

impl std::str::FromStr for Environment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Environment::Independent),
            "common" => Ok(Environment::Common),
            other => Err(Error::Parse(format!("unknown environment {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub env: Environment,
    pub alpha2: f64,
    pub lambda_over_gamma0: f64,
    pub t_max: f64,
    pub dt: f64,
    pub record_every: usize,
}

impl RunSpec {
    pub fn reservoir(&self) -> Result<ReservoirParams> {
        ReservoirParams::scaled(self.lambda_over_gamma0)
    }

    pub fn initial(&self) -> Result<BellLikeInitial> {
        BellLikeInitial::new(self.alpha2)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig::new(self.dt, self.t_max, self.record_every)
    }

    /// Checks every parameter without running anything.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::InvalidConfig(_) => e,
            other => Error::InvalidConfig(other.to_string()),
        };
        let r = self.reservoir().map_err(as_config)?;
        self.initial().map_err(as_config)?;
        match self.env {
            Environment::Common => self.integrator().validate(&r),
            Environment::Independent => {
                let cfg = self.integrator();
                if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
                    return Err(Error::InvalidConfig(format!("dt must be positive, got {}", cfg.dt)));
                }
                if !(cfg.t_max.is_finite() && cfg.t_max > 0.0) {
                    return Err(Error::InvalidConfig(format!("t_max must be positive, got {}", cfg.t_max)));
                }
                if cfg.record_every == 0 {
                    return Err(Error::InvalidConfig("record_every must be at least 1".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub spec: RunSpec,
    pub records: Vec<TrajectoryRecord>,
    /// Present for common-reservoir runs.
    pub health: Option<IntegratorHealth>,
}

/// Runs the trajectory; recorded times are `k dt` for `k` a multiple of
/// `record_every`.
pub fn run(spec: &RunSpec) -> Result<RunOutput> {
    spec.validate()?;
    let r = spec.reservoir()?;
    let init = spec.initial()?;
    match spec.env {
        Environment::Independent => {
            let steps = grid_steps(spec.t_max, spec.dt);
            let records = (0..=steps)
                .step_by(spec.record_every)
                .map(|k| {
                    let t = k as f64 * spec.dt;
                    TrajectoryRecord::from_xstate(t, propagate_independent(&init, &r, t)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RunOutput { spec: *spec, records, health: None })
        }
        Environment::Common => {
            let traj = propagate_common(&init, &r, &spec.integrator())?;
            let records = traj
                .times
                .iter()
                .zip(&traj.states)
                .map(|(&t, &x)| TrajectoryRecord::from_xstate(t, x))
                .collect::<Result<Vec<_>>>()?;
            Ok(RunOutput { spec: *spec, records, health: Some(traj.health) })
        }
    }
}
