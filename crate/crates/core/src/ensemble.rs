//! Nuclear clouds, the lumped repetition model and diffusion estimates.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::operators::ElectronAxis;
use crate::propagate::{propagate, Trajectory};
use crate::schedule::SweepSchedule;
use crate::state::initial_state;
use crate::system::SystemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudSpec {
    pub system: SystemSpec,
    pub labels: Vec<String>,
}

impl CloudSpec {
    pub fn new(system: SystemSpec, labels: Vec<String>) -> Result<Self> {
        let cloud = Self { system, labels };
        cloud.validate()?;
        Ok(cloud)
    }

    /// Labels `n1`, `n2`, ... for each nucleus.
    pub fn unlabeled(system: SystemSpec) -> Result<Self> {
        let labels = (1..=system.k()).map(|i| format!("n{i}")).collect();
        Self::new(system, labels)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.system.k() == 0 {
            return Err(invalid("cloud", "needs at least one nucleus"));
        }
        if self.labels.len() != self.system.k() {
            return Err(invalid(
                "cloud",
                format!("{} labels for {} nuclei", self.labels.len(), self.system.k()),
            ));
        }
        Ok(())
    }
}

/// Propagates the cloud from an x-polarized electron and fully mixed nuclei.
pub fn simulate_cloud(cloud: &CloudSpec, schedule: &SweepSchedule, n_steps: usize, tol: f64) -> Result<Trajectory> {
    cloud.validate()?;
    let rho0 = initial_state(&cloud.system, ElectronAxis::X);
    propagate(&cloud.system, schedule, &rho0, n_steps, tol)
}

/// Largest total nuclear polarization `sum_i <sigma_z^i>` reachable by any unitary
/// from a fully polarized electron and `k` fully mixed nuclei.
///
/// Equals the mean of the `2^k` largest eigenvalues of `1 (x) sum_i sigma_z^i`; this
/// is 1 for `k <= 2`.
pub fn polarization_bound(k: usize) -> f64 {
    let mut binom = 1.0;
    let mut remaining = (1u64 << k) as f64;
    let mut acc = 0.0;
    for m in 0..=k {
        if m > 0 {
            binom *= (k + 1 - m) as f64 / m as f64;
        }
        let take = (2.0 * binom).min(remaining);
        acc += take * (k as f64 - 2.0 * m as f64);
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    acc / (1u64 << k) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionModel {
    pub gamma_1e: f64,
    pub gamma_1bulk: f64,
    pub p_e: f64,
    pub t_s: f64,
    pub t_sweep: f64,
    pub t_off: f64,
    pub n_max: usize,
    pub transfer_efficiency: f64,
    /// Cloud and bulk spin counts; only their ratio enters.
    pub cloud_size: f64,
    pub bulk_size: f64,
    #[serde(default)]
    pub t_1n: Option<f64>,
}

impl RepetitionModel {
    pub fn t_cycle(&self) -> f64 {
        self.t_s + self.t_sweep + self.t_off
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("gamma_1e", self.gamma_1e),
            ("gamma_1bulk", self.gamma_1bulk),
            ("t_s", self.t_s),
            ("t_sweep", self.t_sweep),
            ("t_off", self.t_off),
        ];
        for (name, v) in nonneg {
            if v.is_nan() || v < 0.0 {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.p_e) {
            return Err(invalid("p_e", format!("must lie in [0, 1], got {}", self.p_e)));
        }
        if !(0.0..=1.0).contains(&self.transfer_efficiency) {
            return Err(invalid(
                "transfer_efficiency",
                format!("must lie in [0, 1], got {}", self.transfer_efficiency),
            ));
        }
        if !(self.cloud_size > 0.0 && self.bulk_size > 0.0) || !self.cloud_size.is_finite() {
            return Err(invalid("reservoir sizes", "must be positive"));
        }
        if let Some(t1n) = self.t_1n {
            if !(t1n > 0.0) {
                return Err(invalid("t_1n", format!("must be positive, got {t1n}")));
            }
        }
        Ok(())
    }

    /// Fraction of `T_1n` used by `n` cycles, if `T_1n` is known.
    pub fn budget_fraction(&self, n: usize) -> Option<f64> {
        self.t_1n.map(|t1n| n as f64 * self.t_cycle() / t1n)
    }
}

/// Largest allowed `N T_cycle / T_1n`.
pub const BUDGET_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionOutcome {
    /// Cloud polarization right after the transfer of round `r` (index `r - 1`).
    pub p_cloud: Vec<f64>,
    /// Bulk polarization at the end of round `r`.
    pub p_bulk: Vec<f64>,
    /// Electron polarization at the start of round `r`.
    pub p_electron: Vec<f64>,
    pub transferred: Vec<f64>,
    pub mean_cloud: f64,
    pub budget_fraction: Option<f64>,
}

fn decay(rate: f64, t: f64) -> f64 {
    if rate == 0.0 || t == 0.0 {
        1.0
    } else {
        (-rate * t).exp()
    }
}

/// Iterates the electron / cloud / bulk recurrence for `n` rounds.
///
/// Each round moves `transfer_efficiency * max(p_electron - p_cloud, 0)` from the
/// electron to the cloud. During `t_off` the electron relaxes toward `p_e` and
/// the cloud and bulk relax toward their common size-weighted mean, which
/// conserves `cloud_size * p_cloud + bulk_size * p_bulk`.
pub fn repeat_experiment(model: &RepetitionModel, n: usize) -> Result<RepetitionOutcome> {
    model.validate()?;
    if n == 0 || n > model.n_max {
        return Err(invalid("repetitions", format!("need 1 <= N <= {}, got {n}", model.n_max)));
    }
    let budget_fraction = model.budget_fraction(n);
    if let Some(f) = budget_fraction {
        if f > BUDGET_LIMIT {
            return Err(invalid(
                "repetitions",
                format!("N T_cycle is {f:.3} T_1n, limit {BUDGET_LIMIT}"),
            ));
        }
    }
    let e_decay = decay(model.gamma_1e, model.t_off);
    let ratio = model.cloud_size / model.bulk_size;
    let x_decay = decay(model.gamma_1bulk * (1.0 + ratio), model.t_off);
    let (mut electron, mut cloud, mut bulk) = (model.p_e, 0.0_f64, 0.0_f64);
    let mut out = RepetitionOutcome {
        p_cloud: Vec::with_capacity(n),
        p_bulk: Vec::with_capacity(n),
        p_electron: Vec::with_capacity(n),
        transferred: Vec::with_capacity(n),
        mean_cloud: 0.0,
        budget_fraction,
    };
    for _ in 0..n {
        out.p_electron.push(electron);
        let moved = model.transfer_efficiency * (electron - cloud).max(0.0);
        electron -= moved;
        cloud += moved;
        out.p_cloud.push(cloud);
        out.transferred.push(moved);
        electron = model.p_e + (electron - model.p_e) * e_decay;
        if x_decay < 1.0 {
            let mean = (cloud * ratio + bulk) / (1.0 + ratio);
            let gap = (cloud - bulk) * x_decay;
            cloud = mean + gap / (1.0 + ratio);
            bulk = mean - gap * ratio / (1.0 + ratio);
        }
        out.p_bulk.push(bulk);
    }
    out.mean_cloud = out.p_cloud.iter().sum::<f64>() / n as f64;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    /// Mean proton spacing (m). Ignored when `rho_n` is set.
    pub a: f64,
    pub t2: f64,
    /// Sample depth (m).
    pub l: f64,
    #[serde(default)]
    pub rho_n: Option<f64>,
    #[serde(default = "default_dim")]
    pub dim: u32,
}

fn default_dim() -> u32 {
    1
}

impl DiffusionParams {
    pub fn new(a: f64, t2: f64, l: f64) -> Self {
        Self { a, t2, l, rho_n: None, dim: 1 }
    }

    pub fn spacing(&self) -> f64 {
        self.rho_n.map_or(self.a, |rho| rho.powf(-1.0 / 3.0))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("spacing", self.spacing()), ("t2", self.t2), ("depth", self.l)] {
            if !(v > 0.0) || v.is_nan() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(1..=3).contains(&self.dim) {
            return Err(domain(format!("dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        Ok(())
    }
}

/// `a^2 / (50 T2)` in m^2/s.
pub fn diffusion_constant(params: &DiffusionParams) -> Result<f64> {
    params.validate()?;
    let a = params.spacing();
    Ok(a * a / (50.0 * params.t2))
}

/// `L^2 / (2 dim D)` with `D` from [`diffusion_constant`].
pub fn diffusion_time(params: &DiffusionParams) -> Result<f64> {
    let d = diffusion_constant(params)?;
    diffusion_time_for(params.l, d, params.dim)
}

/// `L^2 / (2 dim D)` for an externally supplied `D`.
pub fn diffusion_time_for(l: f64, d: f64, dim: u32) -> Result<f64> {
    if !(l > 0.0) || d.is_nan() || d <= 0.0 || dim == 0 {
        return Err(domain(format!("need positive depth, D and dimension, got {l}, {d}, {dim}")));
    }
    Ok(l * l / (2.0 * dim as f64 * d))
}
