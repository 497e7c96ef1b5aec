//! Mutual information, measurement-based classical correlations, quantum
//! discord, concurrence and entanglement of formation for two qubits.
//!
//! Two routes to the discord are provided. [`discord_x_analytic`] evaluates
//! the two critical-point branches of the conditional entropy for the real,
//! symmetric X family (`rho_22 = rho_33`): computational-basis measurement
//! (`D1`) and equatorial measurement at `theta = pi/4`, `phi = n pi/2` (`D2`).
//! [`discord_numeric`] maximizes over all projective measurements with a
//! grid + pattern search and works for any two-qubit state.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{
    binary_entropy, entropy_2x2, partial_trace, shannon_bits, vn_entropy, ComplexMatrix, DensityMatrix, Subsystem,
};

/// Slack allowed on the sign of populations and on the block positivity.
pub const XSTATE_POSITIVITY_SLACK: f64 = 1e-12;
pub const XSTATE_TRACE_TOL: f64 = 1e-9;

const GRID_THETA: usize = 129;
const GRID_PHI: usize = 257;
const ANGLE_TOL: f64 = 1e-8;
const REFINE_STARTS: usize = 4;
const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

/// Real X state
///
/// ```text
/// | a 0 0 w |
/// | 0 b z 0 |
/// | 0 z b 0 |
/// | w 0 0 d |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    a: f64,
    b: f64,
    d: f64,
    w: f64,
    z: f64,
}

impl XState {
    pub fn new(a: f64, b: f64, d: f64, w: f64, z: f64) -> Result<Self> {
        Self::with_slack(a, b, d, w, z, XSTATE_POSITIVITY_SLACK)
    }

    /// Like [`XState::new`] with a caller-chosen positivity slack, for values
    /// that went through a lossy text format.
    pub fn with_slack(a: f64, b: f64, d: f64, w: f64, z: f64, slack: f64) -> Result<Self> {
        let all = [a, b, d, w, z];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite X-state entry in {all:?}")));
        }
        let trace = a + 2.0 * b + d;
        if (trace - 1.0).abs() > XSTATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("X-state trace a + 2b + d = {trace:.12}")));
        }
        if a < -slack || b < -slack || d < -slack {
            return Err(Error::InvalidState(format!("negative population in (a, b, d) = ({a}, {b}, {d})")));
        }
        if w * w > a * d + slack {
            return Err(Error::InvalidState(format!("outer block not positive: w^2 = {} > ad = {}", w * w, a * d)));
        }
        if z.abs() > b + slack {
            return Err(Error::InvalidState(format!("inner block not positive: |z| = {} > b = {b}", z.abs())));
        }
        Ok(Self { a, b, d, w, z })
    }

    /// Extracts the X parameters from a 4x4 density matrix.
    ///
    /// Requires vanishing non-X entries, `rho_22 = rho_33` and real
    /// coherences (all within `tol`).
    pub fn from_density_matrix(rho: &DensityMatrix, tol: f64) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
        }
        let m = rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let on_x = i == j || i + j == 3;
                if !on_x && m[(i, j)].norm() > tol {
                    return Err(Error::InvalidState(format!("entry ({i}, {j}) breaks the X form")));
                }
            }
        }
        if (m[(1, 1)].re - m[(2, 2)].re).abs() > tol {
            return Err(Error::InvalidState("rho_22 != rho_33".into()));
        }
        if m[(0, 3)].im.abs() > tol || m[(1, 2)].im.abs() > tol {
            return Err(Error::InvalidState("X-state coherences must be real".into()));
        }
        let b = 0.5 * (m[(1, 1)].re + m[(2, 2)].re);
        Self::new(m[(0, 0)].re, b, m[(3, 3)].re, m[(0, 3)].re, m[(1, 2)].re)
    }

    /// Uniform on the simplex `a + 2b + d = 1`, then `w` uniform in
    /// `[-sqrt(ad), sqrt(ad)]` and `z` uniform in `[-b, b]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let (u, v): (f64, f64) = (rng.gen(), rng.gen());
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let a = lo;
        let b = 0.5 * (hi - lo);
        let d = 1.0 - hi;
        let wmax = (a * d).sqrt();
        let w = rng.gen_range(-1.0..=1.0) * wmax;
        let z = rng.gen_range(-1.0..=1.0) * b;
        Self::new(a, b, d, w, z).expect("sampler stays inside the positivity region")
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let (a, b, d, w, z) = (self.a, self.b, self.d, self.w, self.z);
        ComplexMatrix::from_real_rows(&[&[a, 0.0, 0.0, w], &[0.0, b, z, 0.0], &[0.0, z, b, 0.0], &[w, 0.0, 0.0, d]])
            .expect("4x4 layout")
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }

    /// Closed-form spectrum: `(a+d)/2 +- sqrt((a-d)^2/4 + w^2)` and `b +- z`.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mean = 0.5 * (self.a + self.d);
        let r = (0.5 * (self.a - self.d)).hypot(self.w);
        [mean + r, mean - r, self.b + self.z, self.b - self.z]
    }

    /// Both marginals are `diag(a + b, b + d)`.
    pub fn marginal_entropy(&self) -> f64 {
        shannon_bits(&[self.a + self.b, self.b + self.d])
    }

    pub fn entropy(&self) -> f64 {
        shannon_bits(&self.eigenvalues())
    }

    pub fn purity(&self) -> f64 {
        let (a, b, d, w, z) = (self.a, self.b, self.d, self.w, self.z);
        a * a + d * d + 2.0 * (b * b + w * w + z * z)
    }
}

/// Projective measurement `{|1><1|, |2><2|}` with
/// `|1> = cos(theta)|0> + e^{i phi} sin(theta)|1>` and
/// `|2> = sin(theta)|0> - e^{i phi} cos(theta)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    theta: f64,
    phi: f64,
}

impl MeasurementAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Domain(format!("measurement angles out of range: theta = {theta}, phi = {phi}")));
        }
        Ok(Self { theta, phi })
    }

    /// Maps arbitrary angles onto the canonical ranges. Shifting `theta` by
    /// `pi` only changes the global phase of both kets.
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(PI);
        let mut p = phi.rem_euclid(2.0 * PI);
        if t >= PI {
            t = 0.0;
        }
        if p >= 2.0 * PI {
            p = 0.0;
        }
        Self { theta: t, phi: p }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    fn kets(theta: f64, phi: f64) -> [[C64; 2]; 2] {
        let e = C64::from_polar(1.0, phi);
        let (s, c) = theta.sin_cos();
        [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
    }
}

/// Which critical branch attains the discord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    D1,
    D2,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::D1 => "D1",
            Branch::D2 => "D2",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D1" => Ok(Branch::D1),
            "D2" => Ok(Branch::D2),
            other => Err(Error::Parse(format!("unknown branch label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordResult {
    pub discord: f64,
    pub branch: Branch,
    pub d1_value: f64,
    pub d2_value: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    Ok(())
}

/// `S(rho_A) + S(rho_B) - S(rho)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let sa = vn_entropy(&partial_trace(rho, Subsystem::B)?)?;
    let sb = vn_entropy(&partial_trace(rho, Subsystem::A)?)?;
    Ok(sa + sb - vn_entropy(rho)?)
}

/// Unnormalized conditional state of the unmeasured qubit after projecting
/// `measured` onto `ket`: `(M_00, M_11, M_01)`.
fn conditional_block(m: &ComplexMatrix, ket: &[C64; 2], measured: Subsystem) -> (f64, f64, C64) {
    let idx = |free: usize, probe: usize| match measured {
        Subsystem::B => 2 * free + probe,
        Subsystem::A => 2 * probe + free,
    };
    let entry = |i: usize, j: usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..2 {
            for l in 0..2 {
                acc += ket[k].conj() * ket[l] * m[(idx(i, k), idx(j, l))];
            }
        }
        acc
    };
    (entry(0, 0).re, entry(1, 1).re, entry(0, 1))
}

fn conditional_entropy_raw(m: &ComplexMatrix, theta: f64, phi: f64, measured: Subsystem) -> f64 {
    MeasurementAngles::kets(theta, phi)
        .iter()
        .map(|ket| {
            let (m00, m11, m01) = conditional_block(m, ket, measured);
            let p = m00 + m11;
            if p < MIN_OUTCOME_PROBABILITY {
                0.0
            } else {
                p * entropy_2x2(m00 / p, m11 / p, m01 / p)
            }
        })
        .sum()
}

/// `sum_k p_k S(rho_k)` for the projective measurement `angles` on `measured`.
///
/// The post-measurement state factorizes as `sigma_k (x) |k><k|`, so its
/// entropy is that of the 2x2 conditional state `sigma_k`.
pub fn conditional_entropy_after_measurement(
    rho: &DensityMatrix,
    angles: MeasurementAngles,
    measured: Subsystem,
) -> Result<f64> {
    require_two_qubits(rho)?;
    Ok(conditional_entropy_raw(rho.matrix(), angles.theta, angles.phi, measured))
}

/// Minimizes the conditional entropy over all projective measurements on
/// `measured`; returns `(min, theta, phi)`.
fn minimize_conditional_entropy(m: &ComplexMatrix, measured: Subsystem) -> (f64, f64, f64) {
    let dtheta = PI / (GRID_THETA - 1) as f64;
    let dphi = 2.0 * PI / (GRID_PHI - 1) as f64;
    let mut grid = Vec::with_capacity(GRID_THETA * GRID_PHI);
    for i in 0..GRID_THETA {
        let theta = i as f64 * dtheta;
        for j in 0..GRID_PHI {
            let phi = j as f64 * dphi;
            grid.push((conditional_entropy_raw(m, theta, phi, measured), theta, phi));
        }
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut best = grid[0];
    for &start in grid.iter().take(REFINE_STARTS) {
        let refined = pattern_search(m, measured, start, dtheta);
        if refined.0 < best.0 {
            best = refined;
        }
    }
    best
}

/// Compass search on `(theta, phi)`, halving the step until it drops below
/// [`ANGLE_TOL`].
fn pattern_search(
    m: &ComplexMatrix,
    measured: Subsystem,
    start: (f64, f64, f64),
    initial_step: f64,
) -> (f64, f64, f64) {
    let (mut f, mut theta, mut phi) = start;
    let mut step = initial_step;
    while step >= ANGLE_TOL {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = conditional_entropy_raw(m, theta + dt, phi + dp, measured);
            if cand < f {
                f = cand;
                theta += dt;
                phi += dp;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (f, theta, phi)
}

/// Classical correlation `sup_{Pi} [S(rho_unmeasured) - S(rho | {Pi})]` and
/// the maximizing angles.
pub fn classical_correlation_numeric(rho: &DensityMatrix, measured: Subsystem) -> Result<(f64, MeasurementAngles)> {
    require_two_qubits(rho)?;
    let unmeasured = partial_trace(rho, measured)?;
    let s_unmeasured = vn_entropy(&unmeasured)?;
    let (min_cond, theta, phi) = minimize_conditional_entropy(rho.matrix(), measured);
    Ok((s_unmeasured - min_cond, MeasurementAngles::wrapped(theta, phi)))
}

/// Mutual information minus the classical correlation with measurement on B.
pub fn discord_numeric(rho: &DensityMatrix) -> Result<f64> {
    let mi = mutual_information(rho)?;
    let (q, _) = classical_correlation_numeric(rho, Subsystem::B)?;
    Ok(mi - q)
}

/// `-x log2(x / total)`, zero when `x` vanishes.
#[inline]
fn neg_x_log2_ratio(x: f64, total: f64) -> f64 {
    if x <= 0.0 || total <= 0.0 {
        0.0
    } else {
        -x * (x / total).log2()
    }
}

/// Conditional entropies of the two critical branches.
pub(crate) fn branch_conditional_entropies(x: &XState, flip_d2_sign: bool) -> (f64, f64) {
    let (a, b, d, w, z) = (x.a, x.b, x.d, x.w, x.z);
    let cond1 = neg_x_log2_ratio(a, a + b)
        + neg_x_log2_ratio(b, a + b)
        + neg_x_log2_ratio(d, b + d)
        + neg_x_log2_ratio(b, b + d);
    let s = z.abs() + w.abs();
    let gamma = ((a - d) * (a - d) + 4.0 * s * s).sqrt().min(1.0);
    let mut cond2 = binary_entropy(0.5 * (1.0 + gamma));
    if flip_d2_sign {
        cond2 = -cond2;
    }
    (cond1, cond2)
}

pub(crate) fn discord_x_analytic_impl(x: &XState, flip_d2_sign: bool) -> DiscordResult {
    let sa = x.marginal_entropy();
    let sab = x.entropy();
    let (cond1, cond2) = branch_conditional_entropies(x, flip_d2_sign);
    let d1 = sa - sab + cond1;
    let d2 = sa - sab + cond2;
    let (discord, branch) = if d2 < d1 { (d2, Branch::D2) } else { (d1, Branch::D1) };
    let mutual_information = 2.0 * sa - sab;
    DiscordResult {
        discord,
        branch,
        d1_value: d1,
        d2_value: d2,
        classical_correlation: mutual_information - discord,
        mutual_information,
    }
}

/// Discord of a real symmetric X state as `min(D1, D2)`.
///
/// `D1` measures in the computational basis, `D2` at `theta = pi/4` with the
/// better of `phi = 0, pi/2`, which yields `Gamma^2 = (a-d)^2 + 4(|z|+|w|)^2`.
/// For a small fraction of X states the optimal measurement lies between the
/// two critical sets, in which case this overestimates the discord slightly;
/// [`discord_numeric`] is the reference.
pub fn discord_x_analytic(x: &XState) -> DiscordResult {
    discord_x_analytic_impl(x, false)
}

/// Unclipped entanglement witness `2 max(|z| - sqrt(ad), |w| - b)`.
///
/// Negative values mean the state is strictly inside the separable region.
pub fn concurrence_witness(x: &XState) -> f64 {
    let l1 = x.z.abs() - (x.a.max(0.0) * x.d.max(0.0)).sqrt();
    let l2 = x.w.abs() - x.b;
    2.0 * l1.max(l2)
}

/// Concurrence `2 max(0, |z| - sqrt(ad), |w| - b)`.
pub fn concurrence_x(x: &XState) -> f64 {
    concurrence_witness(x).clamp(0.0, 1.0)
}

/// Entanglement of formation from the concurrence.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&c) {
        return Err(Error::Domain(format!("concurrence must lie in [0, 1], got {c}")));
    }
    let c = c.clamp(0.0, 1.0);
    let g = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(binary_entropy(g))
}
