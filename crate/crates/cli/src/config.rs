//! JSON run configuration. Frequencies are ordinary frequencies in MHz and are
//! converted to angular units by [`RunConfig::resolve`].

use std::path::PathBuf;

use adnovel_core::schedule::ahp_schedule;
use adnovel_core::system::thermal_polarization;
use adnovel_core::{
    initial_state, locked_state, ElectronAxis, NucleusSpec, PhysConstants, QuantumState, SweepDirection,
    SweepSchedule, SystemSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::presets;

/// rad/s per MHz.
pub const MHZ: f64 = std::f64::consts::TAU * 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub omega_0n_mhz: f64,
    pub a_mhz: Vec<f64>,
    pub c_mhz: Vec<f64>,
    #[serde(default)]
    pub delta_omega0_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipolar_mhz: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0_t: Option<f64>,
    #[serde(default)]
    pub initial: InitialState,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Electron along the local effective field.
    #[default]
    Locked,
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleBlock {
    Constant {
        omega_1e_mhz: f64,
        t_total_us: f64,
    },
    Linear {
        delta_omega_mhz: f64,
        t_sweep_us: f64,
        #[serde(default = "default_direction")]
        direction: SweepDirection,
    },
    Ahp {
        omega_1max_mhz: f64,
        alpha_mhz: f64,
        t_s_ns: f64,
    },
}

fn default_direction() -> SweepDirection {
    SweepDirection::HighToLow
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    AMhz,
    CMhz,
    DeltaOmega0Mhz,
    Omega0nMhz,
    Omega1eMhz,
    TTotalUs,
    DeltaOmegaMhz,
    TSweepUs,
}

impl ScanParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::AMhz => "a_mhz",
            Self::CMhz => "c_mhz",
            Self::DeltaOmega0Mhz => "delta_omega0_mhz",
            Self::Omega0nMhz => "omega_0n_mhz",
            Self::Omega1eMhz => "omega_1e_mhz",
            Self::TTotalUs => "t_total_us",
            Self::DeltaOmegaMhz => "delta_omega_mhz",
            Self::TSweepUs => "t_sweep_us",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Keep every `stride`-th sample of a trajectory.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn default_stride() -> usize {
    1
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            path: None,
            stride: 1,
            n_steps: None,
            tol: None,
        }
    }
}

pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-6;

/// A validated explicit configuration in angular units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: SystemSpec,
    pub schedule: SweepSchedule,
    pub initial: InitialState,
    pub n_steps: usize,
    pub tol: f64,
    pub stride: usize,
    /// Thermal electron and nuclear polarizations when field and temperature are given.
    pub thermal: Option<(f64, f64)>,
}

impl Resolved {
    pub fn initial_state(&self) -> QuantumState {
        match self.initial {
            InitialState::Locked => locked_state(&self.spec, self.schedule.amplitude(0.0)),
            InitialState::X => initial_state(&self.spec, ElectronAxis::X),
            InitialState::Z => initial_state(&self.spec, ElectronAxis::Z),
        }
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(path, format!("must be positive and finite, got {v}")))
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(path, format!("must be finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| CliError::validation("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            system: None,
            schedule: None,
            scan: None,
            output: OutputBlock::default(),
        }
    }

    pub fn n_steps(&self) -> usize {
        self.output.n_steps.unwrap_or(DEFAULT_STEPS)
    }

    pub fn tol(&self) -> f64 {
        self.output.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn validate(&self) -> Result<()> {
        let explicit = self.system.is_some() || self.schedule.is_some() || self.scan.is_some();
        match (&self.preset, explicit) {
            (Some(_), true) => {
                return Err(CliError::validation(
                    "preset",
                    "a preset excludes system, schedule and scan blocks",
                ))
            }
            (Some(name), false) => {
                if presets::find(name).is_none() {
                    return Err(CliError::validation("preset", format!("unknown preset {name:?}")));
                }
            }
            (None, _) => {
                if self.system.is_none() {
                    return Err(CliError::validation("system", "required without a preset"));
                }
                if self.schedule.is_none() {
                    return Err(CliError::validation("schedule", "required without a preset"));
                }
            }
        }
        if self.output.stride == 0 {
            return Err(CliError::validation("output.stride", "must be at least 1"));
        }
        if let Some(n) = self.output.n_steps {
            if n < 2 {
                return Err(CliError::validation("output.n_steps", format!("must be at least 2, got {n}")));
            }
        }
        if let Some(tol) = self.output.tol {
            positive("output.tol", tol)?;
        }
        if let Some(scan) = &self.scan {
            if scan.values.is_empty() {
                return Err(CliError::validation("scan.values", "grid is empty"));
            }
            for (i, v) in scan.values.iter().enumerate() {
                finite(&format!("scan.values[{i}]"), *v)?;
            }
        }
        if self.preset.is_none() {
            self.resolve()?;
        }
        Ok(())
    }

    /// Converts the explicit blocks to angular units and validates them.
    pub fn resolve(&self) -> Result<Resolved> {
        let sys = self
            .system
            .as_ref()
            .ok_or_else(|| CliError::validation("system", "required without a preset"))?;
        let sched = self
            .schedule
            .as_ref()
            .ok_or_else(|| CliError::validation("schedule", "required without a preset"))?;
        positive("system.omega_0n_mhz", sys.omega_0n_mhz)?;
        finite("system.delta_omega0_mhz", sys.delta_omega0_mhz)?;
        if sys.a_mhz.len() != sys.c_mhz.len() {
            return Err(CliError::validation(
                "system.c_mhz",
                format!("{} values for {} nuclei", sys.c_mhz.len(), sys.a_mhz.len()),
            ));
        }
        for (i, (a, c)) in sys.a_mhz.iter().zip(&sys.c_mhz).enumerate() {
            finite(&format!("system.a_mhz[{i}]"), *a)?;
            finite(&format!("system.c_mhz[{i}]"), *c)?;
        }
        let nuclei = sys
            .a_mhz
            .iter()
            .zip(&sys.c_mhz)
            .map(|(a, c)| NucleusSpec::from_couplings(a * MHZ, c * MHZ))
            .collect();
        let mut spec = SystemSpec::new(sys.omega_0n_mhz * MHZ, nuclei).with_offset(sys.delta_omega0_mhz * MHZ);
        if let Some(d) = &sys.dipolar_mhz {
            spec = spec.with_dipolar(d.iter().map(|row| row.iter().map(|x| x * MHZ).collect()).collect());
        }
        spec.validate().map_err(|e| prefixed("system", e))?;
        let thermal = match (sys.b0_t, sys.temperature_k) {
            (Some(b0), Some(temp)) => {
                positive("system.b0_t", b0)?;
                positive("system.temperature_k", temp)?;
                let k = PhysConstants::default();
                let pe = thermal_polarization(k.electron_larmor(b0), temp, &k).map_err(|e| prefixed("system", e))?;
                let pn = thermal_polarization(k.nuclear_larmor(b0), temp, &k).map_err(|e| prefixed("system", e))?;
                Some((pe, pn))
            }
            (None, None) => None,
            _ => {
                return Err(CliError::validation(
                    "system.temperature_k",
                    "b0_t and temperature_k must be given together",
                ))
            }
        };
        let schedule = match *sched {
            ScheduleBlock::Constant { omega_1e_mhz, t_total_us } => {
                finite("schedule.omega_1e_mhz", omega_1e_mhz)?;
                positive("schedule.t_total_us", t_total_us)?;
                SweepSchedule::constant(omega_1e_mhz * MHZ, t_total_us * 1e-6)
            }
            ScheduleBlock::Linear {
                delta_omega_mhz,
                t_sweep_us,
                direction,
            } => {
                positive("schedule.delta_omega_mhz", delta_omega_mhz)?;
                positive("schedule.t_sweep_us", t_sweep_us)?;
                SweepSchedule::linear(spec.omega_0n, delta_omega_mhz * MHZ, t_sweep_us * 1e-6, direction)
            }
            ScheduleBlock::Ahp {
                omega_1max_mhz,
                alpha_mhz,
                t_s_ns,
            } => {
                positive("schedule.omega_1max_mhz", omega_1max_mhz)?;
                positive("schedule.alpha_mhz", alpha_mhz)?;
                positive("schedule.t_s_ns", t_s_ns)?;
                ahp_schedule(omega_1max_mhz * MHZ, alpha_mhz * MHZ, t_s_ns * 1e-9).map_err(|e| prefixed("schedule", e))?
            }
        };
        schedule.validate().map_err(|e| prefixed("schedule", e))?;
        Ok(Resolved {
            spec,
            schedule,
            initial: sys.initial,
            n_steps: self.n_steps(),
            tol: self.tol(),
            stride: self.output.stride,
            thermal,
        })
    }

    /// A copy with `parameter` set to `value`, for one scan point.
    pub fn with_parameter(&self, parameter: ScanParameter, value: f64) -> Result<Self> {
        let mut c = self.clone();
        c.scan = None;
        let sys = c.system.as_mut().ok_or_else(|| CliError::validation("system", "missing"))?;
        let sched = c.schedule.as_mut().ok_or_else(|| CliError::validation("schedule", "missing"))?;
        let first = |v: &mut Vec<f64>, path: &str| -> Result<()> {
            match v.first_mut() {
                Some(x) => {
                    *x = value;
                    Ok(())
                }
                None => Err(CliError::validation(path, "scan needs at least one nucleus")),
            }
        };
        match (parameter, sched) {
            (ScanParameter::AMhz, _) => first(&mut sys.a_mhz, "system.a_mhz")?,
            (ScanParameter::CMhz, _) => first(&mut sys.c_mhz, "system.c_mhz")?,
            (ScanParameter::DeltaOmega0Mhz, _) => sys.delta_omega0_mhz = value,
            (ScanParameter::Omega0nMhz, _) => sys.omega_0n_mhz = value,
            (ScanParameter::Omega1eMhz, ScheduleBlock::Constant { omega_1e_mhz, .. }) => *omega_1e_mhz = value,
            (ScanParameter::TTotalUs, ScheduleBlock::Constant { t_total_us, .. }) => *t_total_us = value,
            (ScanParameter::DeltaOmegaMhz, ScheduleBlock::Linear { delta_omega_mhz, .. }) => *delta_omega_mhz = value,
            (ScanParameter::TSweepUs, ScheduleBlock::Linear { t_sweep_us, .. }) => *t_sweep_us = value,
            (p, _) => {
                return Err(CliError::validation(
                    "scan.parameter",
                    format!("{} does not apply to this schedule kind", p.name()),
                ))
            }
        }
        Ok(c)
    }
}

fn prefixed(block: &str, e: adnovel_core::Error) -> CliError {
    match CliError::from(e) {
        CliError::Validation { path, reason } => CliError::validation(format!("{block}.{path}"), reason),
        other => other,
    }
}
