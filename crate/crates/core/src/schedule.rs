//! Microwave amplitude and frequency programs.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// Number of grid points used to differentiate a schedule numerically.
pub const ADIABATICITY_GRID: usize = 20_000;

/// `sech(beta) = 0.01`: the AHP starts at 1% of its peak amplitude.
pub fn ahp_beta() -> f64 {
    100.0_f64.acosh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDirection {
    /// `w1e(t) = w0n - dw (2t/T - 1)`, from `w0n + dw` down to `w0n - dw`.
    HighToLow,
    /// `w1e(t) = w0n + dw (2t/T - 1)`, from `w0n - dw` up to `w0n + dw`.
    LowToHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    ConstantLock,
    LinearSweep,
    Ahp,
}

/// Adiabatic half passage: `w1(s) = w1max sech(beta (s - 1))`,
/// `wc(s) - w0e = alpha tanh(beta (s - 1))` with `s = t / T_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhpParams {
    pub omega_1max: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t_s: f64,
    /// Holds the pulse at this fixed `s` for the whole duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeze_at: Option<f64>,
}

/// A time-parametrized microwave program. Amplitudes and detunings in rad/s, times in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepSchedule {
    ConstantLock {
        omega_1e: f64,
        t_total: f64,
    },
    LinearSweep {
        omega_0n: f64,
        delta_omega: f64,
        t_sweep: f64,
        direction: SweepDirection,
    },
    Ahp(AhpParams),
}

impl SweepSchedule {
    pub fn constant(omega_1e: f64, t_total: f64) -> Self {
        Self::ConstantLock { omega_1e, t_total }
    }

    pub fn linear(omega_0n: f64, delta_omega: f64, t_sweep: f64, direction: SweepDirection) -> Self {
        Self::LinearSweep {
            omega_0n,
            delta_omega,
            t_sweep,
            direction,
        }
    }

    pub fn kind(&self) -> ScheduleKind {
        match self {
            Self::ConstantLock { .. } => ScheduleKind::ConstantLock,
            Self::LinearSweep { .. } => ScheduleKind::LinearSweep,
            Self::Ahp(_) => ScheduleKind::Ahp,
        }
    }

    pub fn t_total(&self) -> f64 {
        match *self {
            Self::ConstantLock { t_total, .. } => t_total,
            Self::LinearSweep { t_sweep, .. } => t_sweep,
            Self::Ahp(p) => p.t_s,
        }
    }

    /// True when neither amplitude nor detuning depends on time.
    pub fn is_stationary(&self) -> bool {
        match self {
            Self::ConstantLock { .. } => true,
            Self::LinearSweep { .. } => false,
            Self::Ahp(p) => p.freeze_at.is_some(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.t_total();
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid("schedule", format!("duration must be positive, got {t}")));
        }
        match *self {
            Self::ConstantLock { omega_1e, .. } => {
                if !(omega_1e >= 0.0) {
                    return Err(invalid("schedule", "lock amplitude must be non-negative"));
                }
            }
            Self::LinearSweep {
                omega_0n, delta_omega, ..
            } => {
                if !(delta_omega > 0.0) {
                    return Err(invalid("schedule", "sweep half-width must be positive"));
                }
                if !(omega_0n >= delta_omega) {
                    return Err(invalid("schedule", "sweep would drive the amplitude negative"));
                }
            }
            Self::Ahp(p) => {
                if !(p.omega_1max > 0.0 && p.alpha > 0.0 && p.beta > 0.0) {
                    return Err(invalid("schedule", "AHP parameters must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Microwave Rabi amplitude `w1e(t)`.
    pub fn amplitude(&self, t: f64) -> f64 {
        match *self {
            Self::ConstantLock { omega_1e, .. } => omega_1e,
            Self::LinearSweep {
                omega_0n,
                delta_omega,
                t_sweep,
                direction,
            } => {
                let ramp = delta_omega * (2.0 * t / t_sweep - 1.0);
                match direction {
                    SweepDirection::HighToLow => omega_0n - ramp,
                    SweepDirection::LowToHigh => omega_0n + ramp,
                }
            }
            Self::Ahp(p) => p.omega_1max / (p.beta * (p.s(t) - 1.0)).cosh(),
        }
    }

    /// Carrier offset `wc(t) - w0e`; zero except for AHP.
    pub fn detuning(&self, t: f64) -> f64 {
        match *self {
            Self::Ahp(p) => p.alpha * (p.beta * (p.s(t) - 1.0)).tanh(),
            _ => 0.0,
        }
    }

    /// Copy with the Rabi amplitude multiplied by `factor` (local B1 inhomogeneity).
    pub fn scaled_amplitude(&self, factor: f64) -> Self {
        match *self {
            Self::ConstantLock { omega_1e, t_total } => Self::ConstantLock {
                omega_1e: omega_1e * factor,
                t_total,
            },
            Self::LinearSweep {
                omega_0n,
                delta_omega,
                t_sweep,
                direction,
            } => Self::LinearSweep {
                omega_0n: omega_0n * factor,
                delta_omega: delta_omega * factor,
                t_sweep,
                direction,
            },
            Self::Ahp(p) => Self::Ahp(AhpParams {
                omega_1max: p.omega_1max * factor,
                ..p
            }),
        }
    }

    /// Copy that holds the pulse at its `s = 0` values (AHP only; others unchanged).
    pub fn frozen_at_start(&self) -> Self {
        match *self {
            Self::Ahp(p) => Self::Ahp(AhpParams {
                freeze_at: Some(0.0),
                ..p
            }),
            other => other,
        }
    }
}

impl AhpParams {
    fn s(&self, t: f64) -> f64 {
        self.freeze_at.unwrap_or(t / self.t_s)
    }
}

pub fn ahp_schedule(omega_1max: f64, alpha: f64, t_s: f64) -> Result<SweepSchedule> {
    if !(omega_1max > 0.0 && alpha > 0.0 && t_s > 0.0) {
        return Err(domain("AHP amplitude, sweep width and duration must be positive"));
    }
    Ok(SweepSchedule::Ahp(AhpParams {
        omega_1max,
        alpha,
        beta: ahp_beta(),
        t_s,
        freeze_at: None,
    }))
}

/// Shortest AHP duration allowed by the adiabaticity bound, `beta alpha / w1max^2`.
pub fn min_sweep_time(alpha: f64, omega_1max: f64) -> Result<f64> {
    if !(alpha >= 0.0 && omega_1max > 0.0) {
        return Err(domain("alpha must be non-negative and w1max positive"));
    }
    Ok(ahp_beta() * alpha / (omega_1max * omega_1max))
}

/// Minimum over the pulse of `w_eff(t) / |d theta / dt|`, where `theta` is the
/// polar angle of the effective field `(w1(t), 0, offset - detuning(t))`.
/// Returns `+inf` when the field direction never changes.
pub fn adiabaticity_margin(schedule: &SweepSchedule, omega_0e_offset: f64) -> f64 {
    let n = ADIABATICITY_GRID;
    let t_total = schedule.t_total();
    let dt = t_total / (n - 1) as f64;
    let field = |t: f64| (schedule.amplitude(t), omega_0e_offset - schedule.detuning(t));
    let theta: Vec<f64> = (0..n)
        .map(|i| {
            let (x, z) = field(i as f64 * dt);
            x.atan2(z)
        })
        .collect();
    let mut margin = f64::INFINITY;
    for i in 0..n {
        let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let rate = ((theta[hi] - theta[lo]) / ((hi - lo) as f64 * dt)).abs();
        if rate == 0.0 {
            continue;
        }
        let (x, z) = field(i as f64 * dt);
        margin = margin.min(x.hypot(z) / rate);
    }
    margin
}
