//! Electron-nuclear spin dynamics for adiabatic NOVEL polarization transfer.
//!
//! Frequencies are angular (rad/s), times in seconds, lengths in metres.

pub mod block;
pub mod constants;
pub mod ensemble;
pub mod error;
pub mod leakage;
pub mod operators;
pub mod propagate;
pub mod schedule;
pub mod state;
pub mod system;

pub use block::{block_model, leakage_rates_c, lz_gamma, lz_probability, magnetization_analytic, BlockModel, LeakageRates};
pub use constants::PhysConstants;
pub use ensemble::{
    diffusion_constant, diffusion_time, polarization_bound, repeat_experiment, simulate_cloud, CloudSpec, DiffusionParams, RepetitionModel,
    RepetitionOutcome,
};
pub use error::{Error, Result};
pub use leakage::{crossing_time, leakage_trace, tilted_frame, tilted_leakage_rates, LeakageTrace, TiltedFrame};
pub use operators::{CMatrix, ElectronAxis, OperatorMatrix};
pub use propagate::{propagate, propagate_with, PropagateOptions, Trajectory};
pub use schedule::{ahp_schedule, min_sweep_time, SweepDirection, SweepSchedule};
pub use state::{initial_state, locked_state, observables, Observables, QuantumState};
pub use system::{build_rotating_hamiltonian, HyperfineParams, NucleusSpec, SystemSpec};
