//! Closed-form dynamics of the Bell-like state under two identical,
//! independent Lorentzian amplitude-damping reservoirs at zero temperature.
//!
//! Each qubit's excited amplitude is multiplied by `q(t)`, the solution of
//! `q'' + lambda q' + (gamma0 lambda / 2) q = 0` with `q(0) = 1`, `q'(0) = 0`.
//! With `P = q^2` the two-qubit populations and the `|00><11|` coherence follow
//! from the product of the two single-qubit channels.

use std::f64::consts::PI;

use crate::correlations::XState;
use crate::error::{Error, Result};
use crate::reservoir::{BellLikeInitial, Regime, ReservoirParams};

/// Below this ratio `d~ / lambda` the weak-regime formula is replaced by its
/// critically damped limit.
const CRITICAL_RATIO: f64 = 1e-7;

/// Excited-state amplitude factor `q(t)`.
pub fn amplitude_q(t: f64, r: &ReservoirParams) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    let (g, l) = (r.gamma0(), r.lambda());
    let q = match r.regime() {
        Regime::Strong => {
            let d = (2.0 * g * l - l * l).sqrt();
            let (s, c) = (0.5 * d * t).sin_cos();
            (-0.5 * l * t).exp() * (c + (l / d) * s)
        }
        Regime::Weak => {
            let dt = (l * l - 2.0 * g * l).max(0.0).sqrt();
            if dt < CRITICAL_RATIO * l {
                (1.0 + 0.5 * l * t) * (-0.5 * l * t).exp()
            } else {
                // e^{-lt/2}[cosh(x) + (l/d~) sinh(x)] written without overflowing terms.
                let ratio = l / dt;
                0.5 * ((1.0 + ratio) * (0.5 * (dt - l) * t).exp() + (1.0 - ratio) * (-0.5 * (dt + l) * t).exp())
            }
        }
    };
    Ok(q)
}

/// `P(t) = q(t)^2`, the surviving excited population of one qubit.
pub fn excited_population(t: f64, r: &ReservoirParams) -> Result<f64> {
    amplitude_q(t, r).map(|q| q * q)
}

/// Two-qubit X state at time `t`.
pub fn propagate_independent(init: &BellLikeInitial, r: &ReservoirParams, t: f64) -> Result<XState> {
    let p = excited_population(t, r)?;
    let kappa = init.kappa();
    let (alpha, beta) = init.amplitudes();
    let d = kappa * p * p;
    let b = kappa * p * (1.0 - p);
    let a = init.alpha2() + kappa * (1.0 - p) * (1.0 - p);
    let w = alpha * beta * p;
    XState::new(a, b, d, w, 0.0)
}

/// Zeros `t_n = 2 [n pi - arctan(d / lambda)] / d`, `n = 1..=n_max`, of `q`.
pub fn vanish_times(r: &ReservoirParams, n_max: usize) -> Result<Vec<f64>> {
    if r.regime() != Regime::Strong {
        return Err(Error::UnsupportedRegime("q(t) has no periodic zeros unless gamma0 > lambda / 2".into()));
    }
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let (g, l) = (r.gamma0(), r.lambda());
    let d = (2.0 * g * l - l * l).sqrt();
    let phase = (d / l).atan();
    Ok((1..=n_max).map(|n| 2.0 * (n as f64 * PI - phase) / d).collect())
}
