//! Piecewise-constant propagation with step-doubling error control.
//!
//! Each substep applies `U = exp(-i H(t_mid) dt)` exactly, so the evolution is
//! unitary at any step size. The output grid is fixed by `n_steps`; the number
//! of substeps per output interval doubles until the reported observables stop
//! moving by more than `tol`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::operators::{unitary_step, CMatrix, ElectronAxis};
use crate::schedule::{ScheduleKind, SweepSchedule};
use crate::state::{electron_product_state, observables, Observables, QuantumState, StateDefects};
use crate::system::{HamiltonianParts, SystemSpec};

/// Upper bound on substeps per output interval.
pub const DEFAULT_MAX_SUBSTEPS: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateOptions {
    /// Number of output intervals; the trajectory has `n_steps + 1` samples.
    pub n_steps: usize,
    pub tol: f64,
    pub max_substeps: usize,
    /// Keep the full density matrix at every output time.
    pub keep_states: bool,
}

impl PropagateOptions {
    pub fn new(n_steps: usize, tol: f64) -> Self {
        Self {
            n_steps,
            tol,
            max_substeps: DEFAULT_MAX_SUBSTEPS,
            keep_states: false,
        }
    }

    pub fn keep_states(mut self) -> Self {
        self.keep_states = true;
        self
    }
}

/// Evidence that the accepted trajectory is converged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub tol: f64,
    /// Substeps per output interval of the accepted run.
    pub substeps: usize,
    /// Largest observable change between the accepted run and the one at half the substeps.
    pub max_change: f64,
}

/// Worst invariant violations seen over the output samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_hermitian_error: f64,
    pub max_purity_drift: f64,
}

impl InvariantReport {
    pub fn within_bounds(&self) -> bool {
        StateDefects {
            trace_error: self.max_trace_error,
            min_eigenvalue: self.min_eigenvalue,
            hermitian_error: self.max_hermitian_error,
        }
        .ok()
            && self.max_purity_drift <= 1e-8
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Output states when requested through [`PropagateOptions::keep_states`], else empty.
    pub states: Vec<QuantumState>,
    pub observables: Vec<Observables>,
    pub final_state: QuantumState,
    pub certificate: ConvergenceCertificate,
    pub invariants: InvariantReport,
}

impl Trajectory {
    pub fn nuclear(&self, index: usize) -> Vec<f64> {
        self.observables.iter().map(|o| o.nuclear_z[index]).collect()
    }

    pub fn total_nuclear(&self) -> Vec<f64> {
        self.observables.iter().map(Observables::total_nuclear).collect()
    }

    pub fn electron_x(&self) -> Vec<f64> {
        self.observables.iter().map(|o| o.electron_x).collect()
    }

    pub fn final_observables(&self) -> &Observables {
        self.observables.last().expect("trajectory has at least two samples")
    }

    pub fn stride(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Total nuclear polarization averaged over the last [`SETTLE_FRACTION`] of the samples.
    pub fn settled_total(&self) -> f64 {
        tail_mean(&self.total_nuclear(), SETTLE_FRACTION)
    }

    /// Time at which the total nuclear polarization first reaches half of
    /// [`Trajectory::settled_total`], linearly interpolated between samples.
    pub fn transfer_midpoint(&self) -> Option<f64> {
        let p = self.total_nuclear();
        let half = 0.5 * self.settled_total();
        let i = p.iter().position(|&v| v >= half)?;
        if i == 0 {
            return Some(self.times[0]);
        }
        let f = (half - p[i - 1]) / (p[i] - p[i - 1]);
        Some(self.times[i - 1] + f * (self.times[i] - self.times[i - 1]))
    }
}

/// Fraction of a sweep over which the settled polarization is averaged.
pub const SETTLE_FRACTION: f64 = 0.05;

/// Mean of the last `fraction` of `values`, at least one sample.
pub fn tail_mean(values: &[f64], fraction: f64) -> f64 {
    let n = ((values.len() as f64 * fraction).ceil() as usize).clamp(1, values.len());
    values[values.len() - n..].iter().sum::<f64>() / n as f64
}

/// Trapezoidal time average of a sampled series.
pub fn time_average(times: &[f64], values: &[f64]) -> f64 {
    let span = times[times.len() - 1] - times[0];
    let area: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    area / span
}

struct Run {
    observables: Vec<Observables>,
    states: Vec<QuantumState>,
    final_state: CMatrix,
    invariants: InvariantReport,
}

struct Engine<'a> {
    parts: HamiltonianParts,
    schedule: &'a SweepSchedule,
    rho0: CMatrix,
    n_steps: usize,
    keep_states: bool,
}

impl Engine<'_> {
    fn hamiltonian(&self, t: f64) -> CMatrix {
        self.parts.at(self.schedule.amplitude(t), -self.schedule.detuning(t))
    }

    fn run(&self, substeps: usize) -> Run {
        let t_total = self.schedule.t_total();
        let total = self.n_steps * substeps;
        let dt = t_total / total as f64;
        let fixed = self.schedule.is_stationary().then(|| unitary_step(&self.hamiltonian(0.0), dt));

        let mut rho = self.rho0.clone();
        let purity0 = crate::operators::trace_product(&rho, &rho).re;
        let mut report = InvariantReport {
            max_trace_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_hermitian_error: 0.0,
            max_purity_drift: 0.0,
        };
        let mut obs = Vec::with_capacity(self.n_steps + 1);
        let mut states = Vec::new();
        let mut record = |rho: &CMatrix, report: &mut InvariantReport, obs: &mut Vec<Observables>| {
            let state = QuantumState {
                entries: rho.clone(),
                axis: ElectronAxis::Z,
            };
            let d = state.defects();
            report.max_trace_error = report.max_trace_error.max(d.trace_error);
            report.min_eigenvalue = report.min_eigenvalue.min(d.min_eigenvalue);
            report.max_hermitian_error = report.max_hermitian_error.max(d.hermitian_error);
            report.max_purity_drift = report.max_purity_drift.max((state.purity() - purity0).abs());
            obs.push(observables(&state));
            if self.keep_states {
                states.push(state);
            }
        };
        record(&rho, &mut report, &mut obs);
        for step in 0..total {
            let u = match &fixed {
                Some(u) => u.clone(),
                None => unitary_step(&self.hamiltonian((step as f64 + 0.5) * dt), dt),
            };
            rho = &u * &rho * u.adjoint();
            if (step + 1) % substeps == 0 {
                record(&rho, &mut report, &mut obs);
            }
        }
        Run {
            observables: obs,
            states,
            final_state: rho,
            invariants: report,
        }
    }
}

fn max_change(a: &[Observables], b: &[Observables]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.to_vec().into_iter().zip(y.to_vec()).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// Propagates `rho0` under `schedule` and returns a converged trajectory sampled on
/// `n_steps + 1` equally spaced times.
pub fn propagate(
    spec: &SystemSpec,
    schedule: &SweepSchedule,
    rho0: &QuantumState,
    n_steps: usize,
    tol: f64,
) -> Result<Trajectory> {
    propagate_with(spec, schedule, rho0, &PropagateOptions::new(n_steps, tol))
}

pub fn propagate_with(
    spec: &SystemSpec,
    schedule: &SweepSchedule,
    rho0: &QuantumState,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    if opts.n_steps < 2 {
        return Err(invalid("propagation", "n_steps must be at least 2"));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("propagation", "tol must be positive"));
    }
    schedule.validate()?;
    let parts = HamiltonianParts::new(spec)?;
    if rho0.dim() != spec.dim() {
        return Err(invalid(
            "propagation",
            format!("state dimension {} does not match system dimension {}", rho0.dim(), spec.dim()),
        ));
    }
    let engine = Engine {
        parts,
        schedule,
        rho0: rho0.in_axis(ElectronAxis::Z).entries,
        n_steps: opts.n_steps,
        keep_states: opts.keep_states,
    };

    let mut substeps = 1;
    let mut coarse = engine.run(substeps);
    let mut previous_change = f64::INFINITY;
    loop {
        let fine = engine.run(2 * substeps);
        let change = max_change(&coarse.observables, &fine.observables);
        if change < opts.tol {
            let t_total = schedule.t_total();
            let times = (0..=opts.n_steps)
                .map(|i| t_total * i as f64 / opts.n_steps as f64)
                .collect();
            return Ok(Trajectory {
                times,
                states: fine.states,
                observables: fine.observables,
                final_state: QuantumState {
                    entries: fine.final_state,
                    axis: ElectronAxis::Z,
                },
                certificate: ConvergenceCertificate {
                    tol: opts.tol,
                    substeps: 2 * substeps,
                    max_change: change,
                },
                invariants: fine.invariants,
            });
        }
        if 4 * substeps > opts.max_substeps {
            return Err(Error::Convergence {
                tol: opts.tol,
                substeps: 2 * substeps,
                last_change: change,
                previous_change,
                last_iterates: Box::new((
                    coarse.observables.last().map(Observables::to_vec).unwrap_or_default(),
                    fine.observables.last().map(Observables::to_vec).unwrap_or_default(),
                )),
            });
        }
        previous_change = change;
        coarse = fine;
        substeps *= 2;
    }
}

/// Final state of a bare electron driven through an adiabatic half passage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhpOutcome {
    pub bloch: [f64; 3],
    /// Unit vector of the local effective field at the end of the pulse.
    pub field_axis: [f64; 3],
    /// Angle between the final Bloch vector and `+x`, degrees.
    pub tip_from_x_deg: f64,
    /// Angle between the final Bloch vector and the local effective field, degrees.
    pub tip_from_field_deg: f64,
    pub certificate: ConvergenceCertificate,
}

/// Output samples and tolerance used by [`simulate_ahp_rotation`].
pub const AHP_STEPS: usize = 200;
pub const AHP_TOL: f64 = 1e-7;

/// Drives a single electron from `|up>_Z` through `schedule` with its peak Rabi
/// amplitude replaced by the local value `omega_1max_local`.
pub fn simulate_ahp_rotation(omega_1max_local: f64, schedule: &SweepSchedule) -> Result<AhpOutcome> {
    simulate_ahp_rotation_with_offset(omega_1max_local, 0.0, schedule, AHP_STEPS, AHP_TOL)
}

/// As [`simulate_ahp_rotation`], for an electron whose resonance is shifted by `offset`.
pub fn simulate_ahp_rotation_with_offset(
    omega_1max_local: f64,
    offset: f64,
    schedule: &SweepSchedule,
    n_steps: usize,
    tol: f64,
) -> Result<AhpOutcome> {
    let SweepSchedule::Ahp(params) = schedule else {
        return Err(invalid("schedule", "adiabatic rotation needs an AHP schedule"));
    };
    let local = schedule.scaled_amplitude(omega_1max_local / params.omega_1max);
    let spec = SystemSpec::new(1.0, vec![]).with_offset(offset);
    let rho0 = electron_product_state(0, [0.0, 0.0, 1.0]);
    let traj = propagate(&spec, &local, &rho0, n_steps, tol)?;
    let bloch = traj.final_state.electron_bloch();
    let t_end = local.t_total();
    let (fx, fz) = (local.amplitude(t_end), offset - local.detuning(t_end));
    let norm = fx.hypot(fz);
    let field_axis = [fx / norm, 0.0, fz / norm];
    Ok(AhpOutcome {
        bloch,
        field_axis,
        tip_from_x_deg: angle_deg(bloch, [1.0, 0.0, 0.0]),
        tip_from_field_deg: angle_deg(bloch, field_axis),
        certificate: traj.certificate,
    })
}

/// Full electron-nuclear propagation through an AHP, hyperfine terms included.
pub fn simulate_ahp_full_system(
    spec: &SystemSpec,
    schedule: &SweepSchedule,
    n_steps: usize,
    tol: f64,
) -> Result<Trajectory> {
    if schedule.kind() != ScheduleKind::Ahp {
        return Err(invalid("schedule", "adiabatic rotation needs an AHP schedule"));
    }
    let rho0 = electron_product_state(spec.k(), [0.0, 0.0, 1.0]);
    propagate(spec, schedule, &rho0, n_steps, tol)
}

fn angle_deg(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos().to_degrees()
}
