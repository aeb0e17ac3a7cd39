//! Fixtures shared by the benchmarks.

use std::f64::consts::TAU;

use adnovel_core::{locked_state, QuantumState, SweepDirection, SweepSchedule, SystemSpec};

pub const OMEGA_0N: f64 = TAU * 51e6;

/// Single-nucleus amplitude sweep with `A = 0.1 w0n`.
pub fn single_sweep(c_over_w0n: f64) -> (SystemSpec, SweepSchedule, QuantumState) {
    let spec = SystemSpec::single(OMEGA_0N, 0.1 * OMEGA_0N, c_over_w0n * OMEGA_0N);
    let sched = SweepSchedule::linear(OMEGA_0N, TAU * 20e6, 2e-6, SweepDirection::LowToHigh);
    let rho0 = locked_state(&spec, sched.amplitude(0.0));
    (spec, sched, rho0)
}

/// Electron with `k` nuclei on a coupling ladder, no dipolar terms.
pub fn cloud(k: usize) -> (SystemSpec, SweepSchedule, QuantumState) {
    let nuclei = (0..k)
        .map(|i| adnovel_core::NucleusSpec::from_couplings(TAU * 5e6 / (i + 1) as f64, 0.0))
        .collect();
    let spec = SystemSpec::new(OMEGA_0N, nuclei);
    let sched = SweepSchedule::linear(OMEGA_0N, TAU * 20e6, 4e-6, SweepDirection::LowToHigh);
    let rho0 = locked_state(&spec, sched.amplitude(0.0));
    (spec, sched, rho0)
}
