//! Event detection over uniformly sampled trajectories: isolated discord
//! zeros, sudden changes of discord (branch switches), entanglement sudden
//! death with its revivals, and sudden birth of discord.

use serde::{Deserialize, Serialize};

use crate::correlations::{
    concurrence_witness, concurrence_x, discord_x_analytic, eof_from_concurrence, Branch, XState,
};
use crate::error::{Error, Result};

/// `|d1 - d2|` at or below this is treated as a tie with no branch information.
pub const BRANCH_TIE_TOL: f64 = 1e-10;
/// Largest discord discontinuity still counted as a kink.
pub const KINK_MAX_JUMP: f64 = 1e-4;
/// Required ratio between the slope change at a kink and the local slope noise.
pub const KINK_SLOPE_RATIO: f64 = 5.0;
/// Slopes on each side of a switch used to estimate the local noise.
const NOISE_WINDOW: usize = 4;

/// Everything computed at one recorded time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub x: XState,
    pub discord: f64,
    pub d1: f64,
    pub d2: f64,
    pub classical_corr: f64,
    pub mutual_info: f64,
    pub branch: Branch,
    pub concurrence: f64,
    pub eof: f64,
    pub purity: f64,
}

impl TrajectoryRecord {
    pub fn from_xstate(t: f64, x: XState) -> Result<Self> {
        let dr = discord_x_analytic(&x);
        let concurrence = concurrence_x(&x);
        Ok(Self {
            t,
            x,
            discord: dr.discord,
            d1: dr.d1_value,
            d2: dr.d2_value,
            classical_corr: dr.classical_correlation,
            mutual_info: dr.mutual_information,
            branch: dr.branch,
            concurrence,
            eof: eof_from_concurrence(concurrence)?,
            purity: x.purity(),
        })
    }

    /// Signed entanglement witness; negative strictly inside the separable set.
    pub fn witness(&self) -> f64 {
        concurrence_witness(&self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventTolerances {
    /// Discord at or below this (bits) counts as zero.
    pub discord_zero: f64,
    /// Concurrence at or below this counts as zero.
    pub concurrence: f64,
    /// Discord level (bits) that marks a sudden birth.
    pub birth_threshold: f64,
}

impl Default for EventTolerances {
    fn default() -> Self {
        Self { discord_zero: 1e-6, concurrence: 1e-9, birth_threshold: 0.01 }
    }
}

/// Result of a discord-zero scan.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ZeroScan {
    /// Times of isolated zeros (the sample closest to the minimum).
    pub isolated: Vec<f64>,
    /// Stretches where the discord stays below tolerance without a single dip.
    pub intervals: Vec<(f64, f64)>,
}

/// Maximal runs `[start, end]` (inclusive indices) where `pred` holds.
fn runs(n: usize, pred: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..n {
        match (pred(i), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, n - 1));
    }
    out
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// True for a run that falls to its minimum and rises again, allowing a
/// single repeated value at the bottom.
fn is_single_dip(v: &[f64]) -> bool {
    let m = argmin(v);
    let (down, up) = (&v[..=m], &v[m..]);
    // argmin returns the first minimum, so a tie can only follow it
    let up = if up.len() >= 2 && up[1] == up[0] { &up[1..] } else { up };
    strictly_decreasing(down) && strictly_increasing(up)
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// Isolated zeros and zero-intervals of the discord.
///
/// Each maximal run with `discord <= tol` is classified on its own. Runs of at
/// most three samples and runs shaped as a single dip are isolated zeros,
/// reported at their minimum. Anything else is a zero-interval. Runs touching
/// either end of the series that only rise away from (or fall towards) that
/// end describe the initial or asymptotic state and are not reported.
pub fn find_discord_zeros(series: &[TrajectoryRecord], tol: f64) -> Result<ZeroScan> {
    if series.is_empty() {
        return Err(Error::Domain("cannot scan an empty series".into()));
    }
    let n = series.len();
    let values: Vec<f64> = series.iter().map(|r| r.discord).collect();
    let mut scan = ZeroScan::default();
    for (s, e) in runs(n, |i| values[i] <= tol) {
        let v = &values[s..=e];
        let at_start = s == 0;
        let at_end = e == n - 1;
        if at_start && !at_end && strictly_increasing(v) {
            continue;
        }
        if at_end && !at_start && strictly_decreasing(v) {
            continue;
        }
        if !at_start && !at_end && (v.len() <= 3 || is_single_dip(v)) {
            scan.isolated.push(series[s + argmin(v)].t);
        } else {
            scan.intervals.push((series[s].t, series[e].t));
        }
    }
    Ok(scan)
}

/// One change of the minimizing branch between two determined samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSwitch {
    /// Midpoint of the two samples that bracket the flip.
    pub t: f64,
    /// Where `d1 - d2` changes sign, by linear interpolation.
    pub t_cross: f64,
    pub from: Branch,
    pub to: Branch,
    /// Difference of the left and right linear extrapolations at `t_cross`.
    pub jump: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    /// Largest change between adjacent one-sided slopes near the switch.
    pub noise: f64,
    /// `jump <= 1e-4` and `|slope_right - slope_left| >= 5 noise`.
    pub is_kink: bool,
}

fn slope(series: &[TrajectoryRecord], i: usize) -> f64 {
    (series[i + 1].discord - series[i].discord) / (series[i + 1].t - series[i].t)
}

fn switch_diagnostics(
    series: &[TrajectoryRecord],
    left: usize,
    right: usize,
    from: Branch,
    to: Branch,
) -> BranchSwitch {
    let (l, r) = (&series[left], &series[right]);
    let t = 0.5 * (l.t + r.t);
    let (gl, gr) = (l.d1 - l.d2, r.d1 - r.d2);
    let t_cross = l.t + gl / (gl - gr) * (r.t - l.t);
    let n = series.len();
    let slope_left = if left >= 1 { slope(series, left - 1) } else { f64::NAN };
    let slope_right = if right + 1 < n { slope(series, right) } else { f64::NAN };
    // Evaluated at the midpoint instead, a continuous kink would show a
    // spurious jump of up to |slope_right - slope_left| * dt / 2.
    let from_left = l.discord + slope_left * (t_cross - l.t);
    let from_right = r.discord - slope_right * (r.t - t_cross);
    let jump = (from_left - from_right).abs();

    // Adjacent slope differences on each side, not straddling the switch cell.
    let mut noise = 0.0f64;
    let lo = left.saturating_sub(NOISE_WINDOW);
    for i in lo..left.saturating_sub(1) {
        noise = noise.max((slope(series, i + 1) - slope(series, i)).abs());
    }
    let hi = (right + NOISE_WINDOW).min(n.saturating_sub(2));
    for i in right..hi {
        noise = noise.max((slope(series, i + 1) - slope(series, i)).abs());
    }
    let is_kink =
        jump.is_finite() && jump <= KINK_MAX_JUMP && (slope_right - slope_left).abs() >= KINK_SLOPE_RATIO * noise;
    BranchSwitch { t, t_cross, from, to, jump, slope_left, slope_right, noise, is_kink }
}

/// Every change of the minimizing branch, with kink diagnostics.
///
/// Samples where `|d1 - d2| <= 1e-10` carry no branch information and are
/// skipped; a switch is reported between the last and the next determined
/// samples.
pub fn find_branch_switches(series: &[TrajectoryRecord]) -> Vec<BranchSwitch> {
    let mut out = Vec::new();
    let mut last: Option<(usize, Branch)> = None;
    for (i, r) in series.iter().enumerate() {
        if (r.d1 - r.d2).abs() <= BRANCH_TIE_TOL {
            continue;
        }
        let b = if r.d2 < r.d1 { Branch::D2 } else { Branch::D1 };
        if let Some((j, prev)) = last {
            if prev != b {
                out.push(switch_diagnostics(series, j, i, prev, b));
            }
        }
        last = Some((i, b));
    }
    out
}

/// Entanglement sudden death intervals.
///
/// A maximal run with `concurrence <= tol` counts when it spans more than two
/// grid steps and the signed witness drops below `-tol` somewhere in it. The
/// second condition separates a true separable stretch from a tangential zero,
/// where the concurrence touches zero quadratically and stays below `tol` for
/// several samples without the state ever leaving the entangled boundary.
pub fn find_esd_intervals(series: &[TrajectoryRecord], tol: f64) -> Vec<(f64, f64)> {
    if series.len() < 2 {
        return Vec::new();
    }
    let step = (series[series.len() - 1].t - series[0].t) / (series.len() - 1) as f64;
    runs(series.len(), |i| series[i].concurrence <= tol)
        .into_iter()
        .filter(|&(s, e)| {
            series[e].t - series[s].t > 2.0 * step * (1.0 + 1e-9) && series[s..=e].iter().any(|r| r.witness() < -tol)
        })
        .map(|(s, e)| (series[s].t, series[e].t))
        .collect()
}

/// Right endpoints of ESD intervals after which entanglement returns.
pub fn entanglement_revival_times(series: &[TrajectoryRecord], intervals: &[(f64, f64)]) -> Vec<f64> {
    let horizon = series.last().map_or(f64::NEG_INFINITY, |r| r.t);
    intervals.iter().filter(|&&(_, end)| end < horizon).map(|&(_, end)| end).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "t", rename_all = "snake_case")]
pub enum DiscordBirth {
    Born(f64),
    Never,
    /// The discord already starts at or above the threshold (or no data).
    NotApplicable,
}

/// First time the discord exceeds `threshold`, for runs that start below it.
pub fn detect_discord_birth(series: &[TrajectoryRecord], threshold: f64) -> DiscordBirth {
    match series.first() {
        None => DiscordBirth::NotApplicable,
        Some(r) if r.discord >= threshold => DiscordBirth::NotApplicable,
        Some(_) => {
            series.iter().find(|r| r.discord > threshold).map_or(DiscordBirth::Never, |r| DiscordBirth::Born(r.t))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub discord_zero_times: Vec<f64>,
    pub discord_zero_intervals: Vec<(f64, f64)>,
    pub branch_switch_times: Vec<f64>,
    pub branch_switches: Vec<BranchSwitch>,
    pub esd_intervals: Vec<(f64, f64)>,
    pub entanglement_revival_times: Vec<f64>,
    pub discord_birth_time: Option<f64>,
    pub discord_birth: DiscordBirth,
    pub tolerances: EventTolerances,
}

pub fn detect_events(series: &[TrajectoryRecord], tol: &EventTolerances) -> Result<EventReport> {
    let zeros = find_discord_zeros(series, tol.discord_zero)?;
    let switches = find_branch_switches(series);
    let esd = find_esd_intervals(series, tol.concurrence);
    let revivals = entanglement_revival_times(series, &esd);
    let birth = detect_discord_birth(series, tol.birth_threshold);
    Ok(EventReport {
        discord_zero_times: zeros.isolated,
        discord_zero_intervals: zeros.intervals,
        branch_switch_times: switches.iter().map(|s| s.t).collect(),
        branch_switches: switches,
        esd_intervals: esd,
        entanglement_revival_times: revivals,
        discord_birth_time: match birth {
            DiscordBirth::Born(t) => Some(t),
            _ => None,
        },
        discord_birth: birth,
        tolerances: *tol,
    })
}
