//! Quantum discord, classical correlations and entanglement of two qubits
//! under exact non-Markovian amplitude damping.
//!
//! Two environments are supported: independent Lorentzian reservoirs (closed
//! form) and a single common Lorentzian reservoir (three-level ladder coupled
//! to a damped pseudomode, integrated with fixed-step RK4). Trajectories are
//! turned into [`analysis::TrajectoryRecord`]s and scanned for discord zeros,
//! sudden changes, entanglement sudden death and sudden birth of discord.

pub mod analysis;
pub mod common;
pub mod correlations;
pub mod error;
pub mod export;
pub mod independent;
pub mod qmatrix;
pub mod reservoir;
pub mod run;
pub mod validation;

pub use analysis::{EventReport, EventTolerances, TrajectoryRecord};
pub use common::{IntegratorConfig, LadderState};
pub use correlations::{Branch, DiscordResult, MeasurementAngles, XState};
pub use error::{Error, Result};
pub use qmatrix::{ComplexMatrix, DensityMatrix, Subsystem};
pub use reservoir::{BellLikeInitial, Regime, ReservoirParams};
pub use run::{Environment, RunOutput, RunSpec};

pub use num_complex::Complex64 as C64;
