//! Self-checks run by `nmdiscord validate`.
//!
//! Each suite compares a production code path against an independent route to
//! the same number. [`ValidationHooks`] inject deliberate faults so the suites
//! themselves can be shown to fail.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::common::{halving_difference, single_qubit_amplitude, IntegratorConfig, PseudomodeCoupling};
use crate::correlations::{
    branch_conditional_entropies, conditional_entropy_after_measurement, discord_numeric, discord_x_analytic_impl,
    MeasurementAngles, XState,
};
use crate::error::Result;
use crate::independent::{amplitude_q, excited_population, vanish_times};
use crate::qmatrix::Subsystem;
use crate::reservoir::{BellLikeInitial, ReservoirParams};
use crate::run::{run, Environment, RunSpec};

pub const DISCORD_AGREEMENT_TOL: f64 = 1e-6;
pub const BRANCH_AGREEMENT_TOL: f64 = 1e-9;
pub const CALIBRATION_TOL: f64 = 1e-6;
pub const VANISH_TIME_TOL: f64 = 1e-9;
pub const HALVING_TOL: f64 = 1e-8;
const RANDOM_STATES: usize = 200;

/// Fault injection for the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationHooks {
    /// Multiplies the pseudomode coupling used by the calibration suite.
    pub omega_scale: f64,
    /// Negates the `D2` conditional entropy in the analytic discord.
    pub flip_d2_sign: bool,
}

impl Default for ValidationHooks {
    fn default() -> Self {
        Self { omega_scale: 1.0, flip_d2_sign: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Observations that do not affect the verdict.
    pub notes: Vec<String>,
}

fn outcome(name: &str, passed: bool, detail: String) -> SuiteOutcome {
    SuiteOutcome { name: name.into(), passed, detail, notes: Vec::new() }
}

/// States visited by representative trajectories of both environments.
fn trajectory_states() -> Result<Vec<XState>> {
    let mut states = Vec::new();
    for (env, alpha2, lambda, dt) in [
        (Environment::Independent, 0.1, 0.01, 0.01),
        (Environment::Independent, 1.0 / 3.0, 0.01, 0.01),
        (Environment::Independent, 0.5, 0.01, 0.01),
        (Environment::Common, 0.0, 0.1, 0.01),
        (Environment::Common, 1.0 / 3.0, 0.1, 0.01),
        (Environment::Common, 1.0 / 3.0, 1.0, 0.01),
    ] {
        let spec = RunSpec { env, alpha2, lambda_over_gamma0: lambda, t_max: 60.0, dt, record_every: 100 };
        states.extend(run(&spec)?.records.iter().map(|r| r.x));
    }
    Ok(states)
}

#[derive(Default)]
struct AgreementStats {
    states: usize,
    branch_mismatches: usize,
    worst_branch_error: f64,
    bound_violations: usize,
    /// Analytic minus optimized discord.
    worst_gap: f64,
    above_tol: usize,
}

impl AgreementStats {
    fn add(&mut self, x: &XState, flip_d2_sign: bool) -> Result<()> {
        let rho = x.to_density_matrix()?;
        let at = |theta: f64, phi: f64| {
            conditional_entropy_after_measurement(&rho, MeasurementAngles::wrapped(theta, phi), Subsystem::B)
        };
        let cond1 = at(0.0, 0.0)?;
        let cond2 = at(FRAC_PI_4, 0.0)?.min(at(FRAC_PI_4, FRAC_PI_2)?);
        let (c1, c2) = branch_conditional_entropies(x, flip_d2_sign);
        let err = (c1 - cond1).abs().max((c2 - cond2).abs());
        self.worst_branch_error = self.worst_branch_error.max(err);
        if err > BRANCH_AGREEMENT_TOL {
            self.branch_mismatches += 1;
        }

        let analytic = discord_x_analytic_impl(x, flip_d2_sign).discord;
        let gap = analytic - discord_numeric(&rho)?;
        if gap < -BRANCH_AGREEMENT_TOL {
            self.bound_violations += 1;
        }
        self.worst_gap = self.worst_gap.max(gap.abs());
        if gap.abs() > DISCORD_AGREEMENT_TOL {
            self.above_tol += 1;
        }
        self.states += 1;
        Ok(())
    }

    fn passed(&self) -> bool {
        self.branch_mismatches == 0 && self.bound_violations == 0
    }

    fn summary(&self) -> String {
        format!(
            "{} states: max branch error {:.3e}, {} branch mismatches, {} states where the optimizer ends above \
             min(D1, D2)",
            self.states, self.worst_branch_error, self.branch_mismatches, self.bound_violations
        )
    }

    fn gap_note(&self, label: &str) -> String {
        format!(
            "{label}: {}/{} states with |min(D1, D2) - D_opt| > {DISCORD_AGREEMENT_TOL:e}, max {:.3e}",
            self.above_tol, self.states, self.worst_gap
        )
    }
}

/// Analytic discord against direct evaluation of the measurement problem.
///
/// Passing requires each branch value to equal the conditional entropy
/// computed numerically at its critical angles, and the full optimization to
/// never end above `min(D1, D2)`. How far the optimum falls below the two
/// critical branches is reported in the notes: for some X states the optimal
/// measurement lies strictly between them.
pub fn analytic_vs_numeric(seed: u64, hooks: &ValidationHooks) -> Result<SuiteOutcome> {
    let mut traj = AgreementStats::default();
    for x in trajectory_states()? {
        traj.add(&x, hooks.flip_d2_sign)?;
    }
    let mut random = AgreementStats::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_STATES {
        random.add(&XState::random(&mut rng), hooks.flip_d2_sign)?;
    }
    let mut out = outcome(
        "analytic-vs-numeric",
        traj.passed() && random.passed(),
        format!("trajectories: {}; random (seed {seed}): {}", traj.summary(), random.summary()),
    );
    out.notes.push(traj.gap_note("trajectory states"));
    out.notes.push(random.gap_note(&format!("random states (seed {seed})")));
    Ok(out)
}

/// Single qubit coupled to the pseudomode against the closed-form amplitude.
pub fn pseudomode_calibration(hooks: &ValidationHooks) -> Result<SuiteOutcome> {
    let mut worst = 0.0f64;
    for lambda in [0.1, 1.0, 10.0] {
        let r = ReservoirParams::scaled(lambda)?;
        let cfg = IntegratorConfig::new(IntegratorConfig::max_dt(&r), 50.0, 1);
        let coupling = PseudomodeCoupling::from_reservoir(&r).with_omega_scale(hooks.omega_scale);
        for (t, q) in single_qubit_amplitude(coupling, &cfg)? {
            worst = worst.max((q - amplitude_q(t, &r)?).abs());
        }
    }
    Ok(outcome(
        "pseudomode-calibration",
        worst <= CALIBRATION_TOL,
        format!("max |q_pseudomode - q| = {worst:.3e} over [0, 50] for lambda in {{0.1, 1, 10}}"),
    ))
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let sign_lo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form zeros of `q` against sign changes located by scanning.
pub fn vanishing_times() -> Result<SuiteOutcome> {
    let mut worst = 0.0f64;
    let mut worst_population = 0.0f64;
    for lambda in [0.01, 0.1, 1.0] {
        let r = ReservoirParams::scaled(lambda)?;
        let tn = vanish_times(&r, 3)?;
        let q = |t: f64| amplitude_q(t, &r).unwrap_or(f64::NAN);
        let step = 1e-3 * tn[0];
        let mut found = Vec::new();
        let mut t = 0.0;
        while found.len() < tn.len() && t < 2.0 * tn[tn.len() - 1] {
            if q(t) * q(t + step) < 0.0 {
                found.push(bisect_root(q, t, t + step));
            }
            t += step;
        }
        for (a, b) in tn.iter().zip(&found) {
            worst = worst.max((a - b).abs());
            worst_population = worst_population.max(excited_population(*a, &r)?);
        }
    }
    Ok(outcome(
        "vanishing-times",
        worst <= VANISH_TIME_TOL && worst_population <= 1e-12,
        format!("max |t_n - root| = {worst:.3e}, max P(t_n) = {worst_population:.3e}"),
    ))
}

/// Change of common-reservoir trajectories when `dt` is halved.
pub fn rk4_halving() -> Result<SuiteOutcome> {
    let mut worst = 0.0f64;
    for lambda in [0.1, 1.0, 10.0] {
        let r = ReservoirParams::scaled(lambda)?;
        let dt = IntegratorConfig::max_dt(&r).min(0.01);
        for alpha2 in [0.0, 1.0 / 3.0, 0.5] {
            let init = BellLikeInitial::new(alpha2)?;
            let cfg = IntegratorConfig::new(dt, 10.0, 1);
            worst = worst.max(halving_difference(&init, &r, &cfg)?);
        }
    }
    Ok(outcome("rk4-halving", worst <= HALVING_TOL, format!("max change of recorded X-state entries = {worst:.3e}")))
}

/// Runs every suite in a fixed order.
pub fn run_all(seed: u64, hooks: &ValidationHooks) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![analytic_vs_numeric(seed, hooks)?, pseudomode_calibration(hooks)?, vanishing_times()?, rk4_halving()?])
}
