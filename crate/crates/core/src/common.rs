//! Exact dynamics of two qubits sharing one Lorentzian reservoir.
//!
//! The symmetric subspace `{|00>, |+>, |11>}` behaves as a three-level ladder
//! `{g, m, e}` with lowering operator `sqrt(2) (|g><m| + |m><e|)`, while `|->`
//! decouples and keeps its population. The Lorentzian reservoir is replaced by
//! one damped harmonic pseudomode `A` (coupling `Omega0 = sqrt(gamma0 lambda /
//! 2)`, Lindblad rate `2 lambda` on `A`), and the joint ladder + pseudomode
//! state is integrated with classical fixed-step RK4 in the resonant frame:
//!
//! ```text
//! H = sqrt(2) Omega0 (|m><g| (x) A + |e><m| (x) A + h.c.)
//! L[rho] = -i[H, rho] + 2 lambda (A rho A^dag - {A^dag A, rho} / 2)
//! ```
//!
//! The Bell-like initial state carries at most two excitations and neither
//! term raises the excitation number, so a Fock cutoff of 2 is exact.

use num_complex::Complex64 as C64;

use crate::correlations::XState;
use crate::error::{Error, Result};
use crate::qmatrix::{hermitian_eigenvalues, partial_trace_dims, ComplexMatrix, Subsystem};
use crate::reservoir::{BellLikeInitial, ReservoirParams};

pub const LADDER_DIM: usize = 3;
/// Exact cutoff for initial states in the span of `|00>` and `|11>`.
pub const DEFAULT_FOCK_CUTOFF: usize = 2;
/// Largest allowed `dt` as a fraction of the fastest time scale.
pub const MAX_DT_FRACTION: f64 = 0.02;

pub const TRACE_DRIFT_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const COHERENCE_IMAG_TOL: f64 = 1e-8;
const EXCITATION_SLACK: f64 = 1e-12;

/// Pseudomode parameters standing in for a Lorentzian reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudomodeCoupling {
    /// Single-qubit coupling to the pseudomode.
    pub omega0: f64,
    /// Amplitude decay rate of the pseudomode; the Lindblad rate is twice this.
    pub decay: f64,
}

impl PseudomodeCoupling {
    pub fn from_reservoir(r: &ReservoirParams) -> Self {
        Self { omega0: r.omega0(), decay: r.lambda() }
    }

    pub fn with_omega_scale(self, scale: f64) -> Self {
        Self { omega0: self.omega0 * scale, ..self }
    }
}

fn annihilation(fock_dim: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(fock_dim);
    for n in 1..fock_dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn number_diag(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_diag(&(0..dim).map(|n| n as f64).collect::<Vec<_>>())
}

/// Time-independent Lindblad generator stored as the effective
/// non-Hermitian part `K = -iH - sum_j L_j^dag L_j / 2` plus the jump
/// operators `L_j` (rates folded in).
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    k_eff: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
    excitation: ComplexMatrix,
}

impl LindbladGenerator {
    /// `jumps` holds `(rate, L)` pairs; `excitation` is the conserved-or-decaying
    /// total excitation operator used for health checks.
    pub fn new(hamiltonian: &ComplexMatrix, jumps: &[(f64, ComplexMatrix)], excitation: ComplexMatrix) -> Self {
        let n = hamiltonian.dim();
        let mut k_eff = hamiltonian.scale(C64::new(0.0, -1.0));
        let mut scaled = Vec::with_capacity(jumps.len());
        for (rate, l) in jumps {
            assert_eq!(l.dim(), n, "jump operator dimension");
            let l = l.scale_real(rate.sqrt());
            k_eff.add_scaled(&(&l.adjoint() * &l), -0.5);
            scaled.push(l);
        }
        Self { k_eff, jumps: scaled, excitation }
    }

    pub fn dim(&self) -> usize {
        self.k_eff.dim()
    }

    pub fn excitation_operator(&self) -> &ComplexMatrix {
        &self.excitation
    }

    /// `L[rho]` for Hermitian `rho`; uses `rho K^dag = (K rho)^dag`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let k_rho = &self.k_eff * rho;
        let mut out = &k_rho + &k_rho.adjoint();
        for l in &self.jumps {
            // L rho L^dag = (L (L rho)^dag)^dag keeps the sparse factor on the left.
            let l_rho = l * rho;
            out = &out + &(l * &l_rho.adjoint()).adjoint();
        }
        out
    }

    pub fn rk4_step(&self, rho: &ComplexMatrix, dt: f64) -> ComplexMatrix {
        let k1 = self.apply(rho);
        let mut y = rho.clone();
        y.add_scaled(&k1, 0.5 * dt);
        let k2 = self.apply(&y);
        let mut y = rho.clone();
        y.add_scaled(&k2, 0.5 * dt);
        let k3 = self.apply(&y);
        let mut y = rho.clone();
        y.add_scaled(&k3, dt);
        let k4 = self.apply(&y);

        let mut next = rho.clone();
        next.add_scaled(&k1, dt / 6.0);
        next.add_scaled(&k2, dt / 3.0);
        next.add_scaled(&k3, dt / 3.0);
        next.add_scaled(&k4, dt / 6.0);
        next
    }

    pub fn total_excitation(&self, rho: &ComplexMatrix) -> f64 {
        (&self.excitation * rho).trace().re
    }
}

/// Ladder (x) pseudomode generator with Fock states `0..=fock_cutoff`.
pub fn build_ladder_generator(coupling: PseudomodeCoupling, fock_cutoff: usize) -> LindbladGenerator {
    let fock = fock_cutoff + 1;
    let a = annihilation(fock);
    let mut raise = ComplexMatrix::zeros(LADDER_DIM);
    raise[(1, 0)] = C64::new(1.0, 0.0);
    raise[(2, 1)] = C64::new(1.0, 0.0);
    let g = std::f64::consts::SQRT_2 * coupling.omega0;
    let absorb = raise.kron(&a);
    let h = (&absorb + &absorb.adjoint()).scale_real(g);
    let jump = ComplexMatrix::identity(LADDER_DIM).kron(&a);
    let excitation = &number_diag(LADDER_DIM).kron(&ComplexMatrix::identity(fock))
        + &ComplexMatrix::identity(LADDER_DIM).kron(&number_diag(fock));
    LindbladGenerator::new(&h, &[(2.0 * coupling.decay, jump)], excitation)
}

/// Generator for both qubits in a common reservoir, with the exact Fock cutoff.
pub fn build_common_generator(r: &ReservoirParams) -> LindbladGenerator {
    build_ladder_generator(PseudomodeCoupling::from_reservoir(r), DEFAULT_FOCK_CUTOFF)
}

/// One qubit (`g`, `e`) coupled to the pseudomode with strength `Omega0`.
pub fn build_single_qubit_generator(coupling: PseudomodeCoupling, fock_cutoff: usize) -> LindbladGenerator {
    let fock = fock_cutoff + 1;
    let a = annihilation(fock);
    let mut raise = ComplexMatrix::zeros(2);
    raise[(1, 0)] = C64::new(1.0, 0.0);
    let absorb = raise.kron(&a);
    let h = (&absorb + &absorb.adjoint()).scale_real(coupling.omega0);
    let jump = ComplexMatrix::identity(2).kron(&a);
    let excitation =
        &number_diag(2).kron(&ComplexMatrix::identity(fock)) + &ComplexMatrix::identity(2).kron(&number_diag(fock));
    LindbladGenerator::new(&h, &[(2.0 * coupling.decay, jump)], excitation)
}

/// Fixed-step RK4 settings, in the same time units as the reservoir rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    pub record_every: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_max: f64, record_every: usize) -> Self {
        Self { dt, t_max, record_every }
    }

    /// `0.02 * min(1/lambda, 1/Omega0, 1/gamma0)`.
    pub fn max_dt(r: &ReservoirParams) -> f64 {
        MAX_DT_FRACTION * (1.0 / r.lambda()).min(1.0 / r.omega0()).min(1.0 / r.gamma0())
    }

    pub fn validate(&self, r: &ReservoirParams) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidConfig(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        let max = Self::max_dt(r);
        if self.dt > max * (1.0 + 1e-9) {
            return Err(Error::InvalidConfig(format!(
                "dt = {} exceeds the stability bound {max} for lambda = {}",
                self.dt,
                r.lambda()
            )));
        }
        Ok(())
    }

    /// Number of RK4 steps; `t_max` is snapped to the grid when it is within
    /// round-off of a multiple of `dt`.
    pub fn steps(&self) -> usize {
        grid_steps(self.t_max, self.dt)
    }
}

pub(crate) fn grid_steps(t_max: f64, dt: f64) -> usize {
    let ratio = t_max / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        ratio.floor() as usize
    }
}

/// Joint ladder + pseudomode state, plus the population of the decoupled `|->`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    rho: ComplexMatrix,
    p_minus: f64,
    fock_dim: usize,
}

impl LadderState {
    /// `(alpha|g> + sqrt(1 - alpha^2)|e>) (x) |0>` with an empty `|->`.
    pub fn bell_like(init: &BellLikeInitial, fock_cutoff: usize) -> Self {
        let fock_dim = fock_cutoff + 1;
        let (c_g, c_e) = init.amplitudes();
        let mut psi = vec![C64::new(0.0, 0.0); LADDER_DIM * fock_dim];
        psi[0] = C64::new(c_g, 0.0);
        psi[2 * fock_dim] = C64::new(c_e, 0.0);
        Self { rho: ComplexMatrix::outer(&psi), p_minus: 0.0, fock_dim }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn total_trace(&self) -> f64 {
        self.rho.trace().re + self.p_minus
    }

    /// Ladder state with the pseudomode traced out.
    pub fn ladder(&self) -> ComplexMatrix {
        partial_trace_dims(&self.rho, LADDER_DIM, self.fock_dim, Subsystem::B).expect("ladder dimensions")
    }

    /// Two-qubit X state: `a = sigma_gg`, `d = sigma_ee`,
    /// `b = (sigma_mm + p_-)/2`, `z = (sigma_mm - p_-)/2`, `w = Re sigma_ge`.
    pub fn reduce(&self, t: f64) -> Result<XState> {
        let s = self.ladder();
        let ge = s[(0, 2)];
        if ge.im.abs() > COHERENCE_IMAG_TOL {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("<g|sigma|e> acquired an imaginary part {:.3e}", ge.im),
            });
        }
        let stray = s[(0, 1)].norm().max(s[(1, 2)].norm());
        if stray > COHERENCE_IMAG_TOL {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("single-excitation coherence {stray:.3e} breaks the X form"),
            });
        }
        let mm = s[(1, 1)].re;
        XState::new(s[(0, 0)].re, 0.5 * (mm + self.p_minus), s[(2, 2)].re, ge.re, 0.5 * (mm - self.p_minus))
            .map_err(|e| Error::IntegrationFailure { t, reason: e.to_string() })
    }
}

/// Worst deviations observed while integrating.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegratorHealth {
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_error: f64,
    /// Largest increase of the total excitation between records; should be <= 0.
    pub max_excitation_increase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommonTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<XState>,
    pub excitation: Vec<f64>,
    pub health: IntegratorHealth,
}

/// Integrates the common-reservoir dynamics and reduces every recorded step
/// to a two-qubit X state.
pub fn propagate_common(
    init: &BellLikeInitial,
    r: &ReservoirParams,
    cfg: &IntegratorConfig,
) -> Result<CommonTrajectory> {
    cfg.validate(r)?;
    propagate_common_with(init, PseudomodeCoupling::from_reservoir(r), cfg, DEFAULT_FOCK_CUTOFF)
}

/// [`propagate_common`] with explicit pseudomode parameters and Fock cutoff.
/// Performs no step-size validation.
pub fn propagate_common_with(
    init: &BellLikeInitial,
    coupling: PseudomodeCoupling,
    cfg: &IntegratorConfig,
    fock_cutoff: usize,
) -> Result<CommonTrajectory> {
    if cfg.record_every == 0 {
        return Err(Error::InvalidConfig("record_every must be at least 1".into()));
    }
    let generator = build_ladder_generator(coupling, fock_cutoff);
    let mut state = LadderState::bell_like(init, fock_cutoff);
    let trace0 = state.total_trace();
    let steps = cfg.steps();

    let mut out = CommonTrajectory {
        times: Vec::with_capacity(steps / cfg.record_every + 1),
        states: Vec::with_capacity(steps / cfg.record_every + 1),
        excitation: Vec::with_capacity(steps / cfg.record_every + 1),
        health: IntegratorHealth { min_eigenvalue: f64::INFINITY, ..Default::default() },
    };
    for k in 0..=steps {
        if k > 0 {
            state.rho = generator.rk4_step(&state.rho, cfg.dt);
        }
        if k % cfg.record_every != 0 {
            continue;
        }
        let t = k as f64 * cfg.dt;
        record_step(&generator, &state, t, trace0, &mut out)?;
    }
    Ok(out)
}

fn record_step(
    generator: &LindbladGenerator,
    state: &LadderState,
    t: f64,
    trace0: f64,
    out: &mut CommonTrajectory,
) -> Result<()> {
    let fail = |reason: String| Error::IntegrationFailure { t, reason };
    let h = &mut out.health;

    let drift = (state.total_trace() - trace0).abs();
    h.max_trace_drift = h.max_trace_drift.max(drift);
    if drift > TRACE_DRIFT_TOL {
        return Err(fail(format!("trace drifted by {drift:.3e}")));
    }
    let herm = state.rho.hermiticity_error();
    h.max_hermiticity_error = h.max_hermiticity_error.max(herm);
    let min_ev = hermitian_eigenvalues(&state.rho).map_err(|e| fail(e.to_string()))?[0];
    h.min_eigenvalue = h.min_eigenvalue.min(min_ev);
    if min_ev < -POSITIVITY_TOL {
        return Err(fail(format!("negative eigenvalue {min_ev:.3e}")));
    }
    let n = generator.total_excitation(&state.rho);
    if let Some(&prev) = out.excitation.last() {
        h.max_excitation_increase = h.max_excitation_increase.max(n - prev);
        if n > prev + EXCITATION_SLACK {
            return Err(fail(format!("total excitation increased from {prev} to {n}")));
        }
    }
    let x = state.reduce(t)?;
    out.times.push(t);
    out.states.push(x);
    out.excitation.push(n);
    Ok(())
}

/// Signed excited amplitude of one qubit coupled to the pseudomode, recovered
/// as `2 Re <e|sigma|g>` from the initial state `(|g> + |e>)/sqrt(2) (x) |0>`.
pub fn single_qubit_amplitude(coupling: PseudomodeCoupling, cfg: &IntegratorConfig) -> Result<Vec<(f64, f64)>> {
    if cfg.record_every == 0 || !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(Error::InvalidConfig("dt must be positive and record_every >= 1".into()));
    }
    const FOCK_CUTOFF: usize = 1;
    let fock = FOCK_CUTOFF + 1;
    let generator = build_single_qubit_generator(coupling, FOCK_CUTOFF);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![C64::new(0.0, 0.0); 2 * fock];
    psi[0] = C64::new(s, 0.0);
    psi[fock] = C64::new(s, 0.0);
    let mut rho = ComplexMatrix::outer(&psi);

    let steps = cfg.steps();
    let mut out = Vec::with_capacity(steps / cfg.record_every + 1);
    for k in 0..=steps {
        if k > 0 {
            rho = generator.rk4_step(&rho, cfg.dt);
        }
        if k % cfg.record_every == 0 {
            let sigma = partial_trace_dims(&rho, 2, fock, Subsystem::B)?;
            out.push((k as f64 * cfg.dt, 2.0 * sigma[(1, 0)].re));
        }
    }
    Ok(out)
}

/// Largest change of any recorded X-state entry when `dt` is halved.
pub fn halving_difference(init: &BellLikeInitial, r: &ReservoirParams, cfg: &IntegratorConfig) -> Result<f64> {
    let coarse = propagate_common(init, r, cfg)?;
    let fine_cfg = IntegratorConfig { dt: 0.5 * cfg.dt, t_max: cfg.t_max, record_every: 2 * cfg.record_every };
    let fine = propagate_common(init, r, &fine_cfg)?;
    if coarse.states.len() != fine.states.len() {
        return Err(Error::InvalidConfig("halved grid does not align with the original".into()));
    }
    let diff = coarse
        .states
        .iter()
        .zip(&fine.states)
        .map(|(x, y)| {
            [x.a() - y.a(), x.b() - y.b(), x.d() - y.d(), x.w() - y.w(), x.z() - y.z()]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max);
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{concurrence_x, discord_x_analytic};
    use crate::independent::amplitude_q;
    use crate::qmatrix::DensityMatrix;

    fn res(l: f64) -> ReservoirParams {
        ReservoirParams::scaled(l).unwrap()
    }

    fn random_ladder_density(seed: u64) -> ComplexMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 9;
        let g = ComplexMatrix::from_vec(
            n,
            (0..n * n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        )
        .unwrap();
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        m.scale_real(1.0 / tr)
    }

    #[test]
    fn generator_is_trace_preserving() {
        let generator = build_common_generator(&res(0.1));
        for seed in 0..10 {
            let rho = random_ladder_density(seed);
            DensityMatrix::new(rho.clone()).unwrap();
            assert!(generator.apply(&rho).trace().norm() <= 1e-12);
        }
    }

    #[test]
    fn ground_state_is_stationary() {
        let generator = build_common_generator(&res(0.1));
        let mut ground = ComplexMatrix::zeros(9);
        ground[(0, 0)] = C64::new(1.0, 0.0);
        assert_eq!(generator.apply(&ground).frobenius_norm(), 0.0);
    }

    #[test]
    fn single_qubit_pseudomode_reproduces_closed_form() {
        for l in [0.1, 1.0, 10.0] {
            let r = res(l);
            let cfg = IntegratorConfig::new(IntegratorConfig::max_dt(&r), 50.0, 1);
            let series = single_qubit_amplitude(PseudomodeCoupling::from_reservoir(&r), &cfg).unwrap();
            let err = series.iter().map(|&(t, q)| (q - amplitude_q(t, &r).unwrap()).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-6, "lambda = {l}: max error {err:e}");
        }
    }

    #[test]
    fn perturbed_coupling_breaks_calibration() {
        let r = res(0.1);
        let cfg = IntegratorConfig::new(0.02, 50.0, 1);
        let coupling = PseudomodeCoupling::from_reservoir(&r).with_omega_scale(1.05);
        let err = single_qubit_amplitude(coupling, &cfg)
            .unwrap()
            .iter()
            .map(|&(t, q)| (q - amplitude_q(t, &r).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err > 1e-3);
    }

    #[test]
    fn step_size_bound() {
        let r = res(0.1);
        assert!((IntegratorConfig::max_dt(&r) - 0.02).abs() < 1e-15);
        assert!(IntegratorConfig::new(0.02, 10.0, 1).validate(&r).is_ok());
        assert!(IntegratorConfig::new(0.03, 10.0, 1).validate(&r).is_err());
        assert!(IntegratorConfig::new(0.002, 10.0, 1).validate(&res(10.0)).is_ok());
        assert!(IntegratorConfig::new(0.005, 10.0, 1).validate(&res(10.0)).is_err());
        assert!(IntegratorConfig::new(0.01, 10.0, 0).validate(&r).is_err());
        assert!(IntegratorConfig::new(0.01, -1.0, 1).validate(&r).is_err());
    }

    #[test]
    fn initial_record_is_the_bell_like_state() {
        let init = BellLikeInitial::new(1.0 / 3.0).unwrap();
        let traj = propagate_common(&init, &res(0.1), &IntegratorConfig::new(0.01, 1.0, 10)).unwrap();
        assert_eq!(traj.times.len(), 11);
        let x0 = traj.states[0];
        let expected = init.xstate();
        for (a, b) in
            [(x0.a(), expected.a()), (x0.d(), expected.d()), (x0.w(), expected.w()), (x0.b(), 0.0), (x0.z(), 0.0)]
        {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn ground_state_trajectory_is_constant() {
        let init = BellLikeInitial::new(1.0).unwrap();
        let traj = propagate_common(&init, &res(0.1), &IntegratorConfig::new(0.01, 20.0, 5)).unwrap();
        for x in &traj.states {
            assert_eq!(*x, XState::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap());
            assert!(discord_x_analytic(x).discord.abs() <= 1e-12);
        }
    }

    #[test]
    fn doubly_excited_start_never_entangles() {
        let init = BellLikeInitial::new(0.0).unwrap();
        let traj = propagate_common(&init, &res(0.1), &IntegratorConfig::new(0.01, 50.0, 5)).unwrap();
        assert!(traj.states.iter().all(|x| concurrence_x(x) <= 1e-9));
        let peak = traj.states.iter().map(|x| discord_x_analytic(x).discord).fold(0.0, f64::max);
        assert!(peak > 0.01);
    }

    #[test]
    fn cutoff_two_is_exact() {
        let init = BellLikeInitial::new(0.2).unwrap();
        let r = res(0.1);
        let cfg = IntegratorConfig::new(0.01, 20.0, 10);
        let coupling = PseudomodeCoupling::from_reservoir(&r);
        let two = propagate_common_with(&init, coupling, &cfg, 2).unwrap();
        let three = propagate_common_with(&init, coupling, &cfg, 3).unwrap();
        for (x, y) in two.states.iter().zip(&three.states) {
            let diff = [x.a() - y.a(), x.b() - y.b(), x.d() - y.d(), x.w() - y.w(), x.z() - y.z()]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(diff <= 1e-14, "cutoff 3 differs by {diff:e}");
        }
    }

    #[test]
    fn integrator_health_and_convergence() {
        let r = res(0.1);
        let cfg = IntegratorConfig::new(0.01, 20.0, 2);
        for alpha2 in [0.0, 0.2, 0.5, 0.8] {
            let init = BellLikeInitial::new(alpha2).unwrap();
            let traj = propagate_common(&init, &r, &cfg).unwrap();
            assert!(traj.health.max_trace_drift <= 1e-8);
            assert!(traj.health.min_eigenvalue >= -1e-8);
            assert!(traj.health.max_excitation_increase <= 1e-12);
            assert!(traj.excitation.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            assert!(halving_difference(&init, &r, &cfg).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn decoupled_population_enters_b_and_z() {
        let mut state = LadderState::bell_like(&BellLikeInitial::new(1.0).unwrap(), 2);
        state.rho = state.rho.scale_real(0.6);
        state.p_minus = 0.4;
        let x = state.reduce(0.0).unwrap();
        assert!((x.a() - 0.6).abs() < 1e-15);
        assert!((x.b() - 0.2).abs() < 1e-15 && (x.z() + 0.2).abs() < 1e-15);
        assert!((state.total_trace() - 1.0).abs() < 1e-15);
    }
}
