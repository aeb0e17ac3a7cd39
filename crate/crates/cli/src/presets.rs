//! Pinned parameter sets for the figure reproductions.
//!
//! Every number that is not fixed by the model itself is pinned here and
//! listed in [`PresetInfo::pins`].

use adnovel_core::ensemble::{polarization_bound, RepetitionOutcome};
use adnovel_core::leakage::{crossing_time, leakage_trace, LeakageTrace};
use adnovel_core::propagate::{simulate_ahp_rotation, time_average, AhpOutcome};
use adnovel_core::schedule::ahp_schedule;
use adnovel_core::system::thermal_polarization;
use adnovel_core::{
    locked_state, min_sweep_time, propagate, repeat_experiment, simulate_cloud, CloudSpec,
    NucleusSpec, PhysConstants, RepetitionModel, SweepDirection, SweepSchedule, SystemSpec, Trajectory,
};
use rayon::prelude::*;

use crate::config::MHZ;
use crate::error::Result;
use crate::table::{Certificate, Column, ResultTable};

pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub pins: &'static [&'static str],
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "fig4",
        summary: "four-proton cloud, amplitude sweep against constant lock",
        pins: &[
            "w0n = 51 MHz, sweep 31 -> 71 MHz over 2 us",
            "A = 4.7, 5.6, -0.059, 1.83343 MHz; C = -1.56, 8.8, -0.029, -0.017 MHz",
            "d_01 = d_23 = 20 kHz, every other pair 2 kHz",
            "constant lock at w1e = w0n for the same 2 us",
            "electron starts along x, nuclei fully mixed",
        ],
    },
    PresetInfo {
        name: "fig5",
        summary: "settled nuclear polarization against A for three sweep times",
        pins: &[
            "w0n = 50 MHz, dw = 20 MHz, sweep low to high",
            "A = 0.25, 0.5, 1, 2, 3, 4, 5, 6 MHz; C = 0",
            "T_sweep = 0.5, 2, 8 us",
        ],
    },
    PresetInfo {
        name: "fig6",
        summary: "time-averaged constant-lock polarization over (A, C)",
        pins: &[
            "w0n = w1e = 51 MHz",
            "A / w0n = 0.02, 0.05, 0.1, 0.2, 0.3; C / w0n = 0, 0.25, 0.5, 0.75, 1",
            "average over 20 flip-flop periods 4 pi / A",
            "default 400 output steps per point",
        ],
    },
    PresetInfo {
        name: "fig7",
        summary: "nuclear polarization during the sweep for several C",
        pins: &[
            "w0n = 51 MHz, A = 0.1 w0n, dw = 20 MHz, T_sweep = 2 us, sweep low to high",
            "C / w0n = 0, 0.1, 0.5, 1",
            "electron locked along the nuclear-state dependent effective field",
        ],
    },
    PresetInfo {
        name: "fig8",
        summary: "tilted-frame leakage amplitudes and polarization with an electron offset",
        pins: &[
            "w0n = 51 MHz, A = 0.1 w0n, C = 0, offset = 0.5 w0n",
            "dw = 20 MHz, T_sweep = 2 us, sweep low to high",
            "electron locked along the effective field",
        ],
    },
    PresetInfo {
        name: "fig9",
        summary: "cloud polarization over repeated polarize and wait cycles",
        pins: &[
            "transfer efficiency = settled fig7 polarization at C = 0",
            "p_e = thermal electron polarization at 1.2 T and 0.3 K",
            "gamma_1e = 1000 /s, t_off = 20 ms, gamma_1bulk = 10, 100, 1000 /s",
            "cloud / bulk size = 4 / 4000, 200 rounds",
        ],
    },
    PresetInfo {
        name: "appendixA",
        summary: "adiabatic half passage tip error against local amplitude",
        pins: &[
            "w1max = 150 MHz, alpha = 80 MHz, beta = acosh(100)",
            "T_s = 100 x minimum sweep time",
            "amplitude scale factors 0.6, 0.8, 1.0, 1.2, 1.4",
        ],
    },
];

pub fn find(name: &str) -> Option<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Plain-text reference of every preset and its pinned values.
pub fn reference() -> String {
    let mut s = String::new();
    for p in PRESETS {
        s.push_str(&format!("{}: {}\n", p.name, p.summary));
        for pin in p.pins {
            s.push_str(&format!("  - {pin}\n"));
        }
    }
    s
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub n_steps: Option<usize>,
    pub tol: f64,
}

impl Options {
    fn steps(&self, default: usize) -> usize {
        self.n_steps.unwrap_or(default)
    }
}

pub const SWEEP_STEPS: usize = 200;
const FIG6_STEPS: usize = 400;

pub fn fig7_omega_0n() -> f64 {
    51.0 * MHZ
}

pub fn fig7_schedule() -> SweepSchedule {
    SweepSchedule::linear(fig7_omega_0n(), 20.0 * MHZ, 2e-6, SweepDirection::LowToHigh)
}

pub const FIG7_SHIFTS: [f64; 4] = [0.0, 0.1, 0.5, 1.0];

/// One locked sweep of a single nucleus with `A = 0.1 w0n`.
pub fn fig7_run(c_over_w0n: f64, offset_over_w0n: f64, opts: &Options) -> Result<Trajectory> {
    let wn = fig7_omega_0n();
    let spec = SystemSpec::single(wn, 0.1 * wn, c_over_w0n * wn).with_offset(offset_over_w0n * wn);
    let sched = fig7_schedule();
    let rho0 = locked_state(&spec, sched.amplitude(0.0));
    Ok(propagate(&spec, &sched, &rho0, opts.steps(SWEEP_STEPS), opts.tol)?)
}

pub fn fig7(opts: &Options) -> Result<ResultTable> {
    let runs = FIG7_SHIFTS
        .par_iter()
        .map(|&c| fig7_run(c, 0.0, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![Column::new("t", "us")];
    cols.extend(FIG7_SHIFTS.iter().map(|c| Column::new(format!("P_n(C={c}w0n)"), "")));
    let mut t = ResultTable::new(cols, opts.tol, opts.steps(SWEEP_STEPS));
    let series: Vec<Vec<f64>> = runs.iter().map(|r| r.total_nuclear()).collect();
    for (i, time) in runs[0].times.iter().enumerate() {
        let mut row = vec![time * 1e6];
        row.extend(series.iter().map(|s| s[i]));
        t.push(&row);
    }
    for (c, r) in FIG7_SHIFTS.iter().zip(&runs) {
        t.info(&format!("settled(C={c}w0n)"), r.settled_total());
        if let Some(m) = r.transfer_midpoint() {
            t.info(&format!("midpoint_us(C={c}w0n)"), m * 1e6);
        }
        if let Some(tc) = crossing_time(0.5 * c * fig7_omega_0n(), &fig7_schedule(), fig7_omega_0n())? {
            t.info(&format!("crossing_us(C={c}w0n)"), tc * 1e6);
        }
    }
    t.metadata.certificate = Certificate::merge(runs.iter().map(|r| Certificate::from(&r.certificate)));
    Ok(t)
}

pub struct Fig8 {
    pub trace: LeakageTrace,
    pub run: Trajectory,
    pub t_star: f64,
}

pub fn fig8_run(opts: &Options) -> Result<Fig8> {
    let wn = fig7_omega_0n();
    let spec = SystemSpec::single(wn, 0.1 * wn, 0.0).with_offset(0.5 * wn);
    let sched = fig7_schedule();
    let run = fig7_run(0.0, 0.5, opts)?;
    let trace = leakage_trace(&spec, &sched, run.times.len())?;
    let t_star = crossing_time(spec.delta_omega0, &sched, wn)?.expect("crossing inside the sweep");
    Ok(Fig8 { trace, run, t_star })
}

pub const FIG8_COLUMNS: [&str; 4] = ["G(Phi+,Psi+)", "G(Phi-,Psi-)", "G(Phi+,Psi-)", "G(Phi-,Psi+)"];

pub fn fig8(opts: &Options) -> Result<ResultTable> {
    let f = fig8_run(opts)?;
    let mut cols = vec![Column::new("t", "us")];
    cols.extend(FIG8_COLUMNS.iter().map(|c| Column::new(*c, "")));
    cols.push(Column::new("P_n", ""));
    let mut t = ResultTable::new(cols, opts.tol, opts.steps(SWEEP_STEPS));
    let p = f.run.total_nuclear();
    for (i, (time, r)) in f.trace.times.iter().zip(&f.trace.rates).enumerate() {
        let mut row = vec![time * 1e6];
        row.extend(r.as_array());
        row.push(p[i]);
        t.push(&row);
    }
    t.info("t_star_us", f.t_star * 1e6);
    t.info("settled", f.run.settled_total());
    if let Some(m) = f.run.transfer_midpoint() {
        t.info("midpoint_us", m * 1e6);
    }
    t.metadata.certificate = Some(Certificate::from(&f.run.certificate));
    Ok(t)
}

pub const FIG5_A_MHZ: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
pub const FIG5_T_US: [f64; 3] = [0.5, 2.0, 8.0];

pub fn fig5_point(a_mhz: f64, t_us: f64, opts: &Options) -> Result<Trajectory> {
    let wn = 50.0 * MHZ;
    let spec = SystemSpec::single(wn, a_mhz * MHZ, 0.0);
    let sched = SweepSchedule::linear(wn, 20.0 * MHZ, t_us * 1e-6, SweepDirection::LowToHigh);
    let rho0 = locked_state(&spec, sched.amplitude(0.0));
    Ok(propagate(&spec, &sched, &rho0, opts.steps(SWEEP_STEPS), opts.tol)?)
}

pub fn fig5(opts: &Options) -> Result<ResultTable> {
    let grid: Vec<(f64, f64)> = FIG5_A_MHZ
        .iter()
        .flat_map(|&a| FIG5_T_US.iter().map(move |&t| (a, t)))
        .collect();
    let runs: Vec<Result<Trajectory>> = grid.par_iter().map(|&(a, t)| fig5_point(a, t, opts)).collect();
    let mut cols = vec![Column::new("A", "MHz")];
    cols.extend(FIG5_T_US.iter().map(|t| Column::new(format!("P_n(T={t}us)"), "")));
    let mut table = ResultTable::new(cols, opts.tol, opts.steps(SWEEP_STEPS));
    let mut certs = Vec::new();
    for (i, a) in FIG5_A_MHZ.iter().enumerate() {
        let chunk = &runs[i * FIG5_T_US.len()..(i + 1) * FIG5_T_US.len()];
        let mut row = vec![*a];
        let mut errors = Vec::new();
        for r in chunk {
            match r {
                Ok(tr) => {
                    row.push(tr.settled_total());
                    certs.push(Certificate::from(&tr.certificate));
                }
                Err(e) => {
                    row.push(f64::NAN);
                    errors.push(e.to_string());
                }
            }
        }
        if errors.is_empty() {
            table.push(&row);
        } else {
            table.push_error(&row, errors.join("; "));
        }
    }
    table.metadata.certificate = Certificate::merge(certs);
    Ok(table)
}

pub const FIG6_A: [f64; 5] = [0.02, 0.05, 0.1, 0.2, 0.3];
pub const FIG6_C: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Time-averaged nuclear polarization of a constant lock at `w1e = w0n`.
pub fn fig6_point(a_over_w0n: f64, c_over_w0n: f64, opts: &Options) -> Result<(f64, Certificate)> {
    let wn = fig7_omega_0n();
    let a = a_over_w0n * wn;
    let spec = SystemSpec::single(wn, a, c_over_w0n * wn);
    let window = 20.0 * 2.0 * std::f64::consts::TAU / a;
    let sched = SweepSchedule::constant(wn, window);
    let rho0 = locked_state(&spec, wn);
    let tr = propagate(&spec, &sched, &rho0, opts.steps(FIG6_STEPS), opts.tol)?;
    Ok((time_average(&tr.times, &tr.total_nuclear()), Certificate::from(&tr.certificate)))
}

pub fn fig6(opts: &Options) -> Result<ResultTable> {
    let grid: Vec<(f64, f64)> = FIG6_A
        .iter()
        .flat_map(|&a| FIG6_C.iter().map(move |&c| (a, c)))
        .collect();
    let points: Vec<_> = grid.par_iter().map(|&(a, c)| fig6_point(a, c, opts)).collect();
    let cols = vec![Column::new("A/w0n", ""), Column::new("C/w0n", ""), Column::new("P_avg", "")];
    let mut t = ResultTable::new(cols, opts.tol, opts.steps(FIG6_STEPS));
    let mut certs = Vec::new();
    for (&(a, c), p) in grid.iter().zip(points) {
        match p {
            Ok((avg, cert)) => {
                t.push(&[a, c, avg]);
                certs.push(cert);
            }
            Err(e) => t.push_error(&[a, c], e.to_string()),
        }
    }
    t.metadata.certificate = Certificate::merge(certs);
    Ok(t)
}

pub fn fig4_system() -> SystemSpec {
    let a = [4.7, 5.6, -0.059, 1.83343];
    let c = [-1.56, 8.8, -0.029, -0.017];
    let nuclei = a.iter().zip(&c).map(|(a, c)| NucleusSpec::from_couplings(a * MHZ, c * MHZ)).collect();
    let mut d = vec![vec![0.0; 4]; 4];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = 0.002 * MHZ;
            }
        }
    }
    for (i, j) in [(0, 1), (2, 3)] {
        d[i][j] = 0.02 * MHZ;
        d[j][i] = 0.02 * MHZ;
    }
    SystemSpec::new(fig7_omega_0n(), nuclei).with_dipolar(d)
}

pub struct Fig4 {
    pub swept: Trajectory,
    pub locked: Trajectory,
}

impl Fig4 {
    pub fn swept_final(&self) -> f64 {
        *self.swept.total_nuclear().last().expect("non-empty")
    }

    pub fn locked_average(&self) -> f64 {
        time_average(&self.locked.times, &self.locked.total_nuclear())
    }
}

pub fn fig4_run(opts: &Options) -> Result<Fig4> {
    let labels = ["H1", "H2", "H3", "H4"].iter().map(|s| s.to_string()).collect();
    let cloud = CloudSpec::new(fig4_system(), labels)?;
    let wn = fig7_omega_0n();
    let n = opts.steps(SWEEP_STEPS);
    let (swept, locked) = rayon::join(
        || simulate_cloud(&cloud, &SweepSchedule::linear(wn, 20.0 * MHZ, 2e-6, SweepDirection::LowToHigh), n, opts.tol),
        || simulate_cloud(&cloud, &SweepSchedule::constant(wn, 2e-6), n, opts.tol),
    );
    Ok(Fig4 {
        swept: swept?,
        locked: locked?,
    })
}

pub fn fig4(opts: &Options) -> Result<ResultTable> {
    let f = fig4_run(opts)?;
    let mut cols = vec![Column::new("t", "us")];
    cols.extend((1..=4).map(|i| Column::new(format!("P_H{i}"), "")));
    cols.push(Column::new("P_total", ""));
    cols.push(Column::new("P_total_lock", ""));
    let mut t = ResultTable::new(cols, opts.tol, opts.steps(SWEEP_STEPS));
    let lock = f.locked.total_nuclear();
    for (i, (time, o)) in f.swept.times.iter().zip(&f.swept.observables).enumerate() {
        let mut row = vec![time * 1e6];
        row.extend(&o.nuclear_z);
        row.push(o.total_nuclear());
        row.push(lock[i]);
        t.push(&row);
    }
    t.info("final_total", f.swept_final());
    t.info("lock_average", f.locked_average());
    t.info("unitary_bound", polarization_bound(4));
    t.metadata.certificate = Certificate::merge([&f.swept, &f.locked].map(|r| Certificate::from(&r.certificate)));
    Ok(t)
}

pub const FIG9_BULK_RATES: [f64; 3] = [1000.0, 100.0, 10.0];
pub const FIG9_ROUNDS: usize = 200;

pub fn fig9_model(transfer_efficiency: f64, gamma_1bulk: f64) -> Result<RepetitionModel> {
    let k = PhysConstants::default();
    let p_e = thermal_polarization(k.electron_larmor(1.2), 0.3, &k)?;
    let gamma_1e = 1e3;
    Ok(RepetitionModel {
        gamma_1e,
        gamma_1bulk,
        p_e,
        t_s: 3e-9,
        t_sweep: 2e-6,
        t_off: 20.0 / gamma_1e,
        n_max: FIG9_ROUNDS,
        transfer_efficiency,
        cloud_size: 4.0,
        bulk_size: 4000.0,
        t_1n: None,
    })
}

pub struct Fig9 {
    pub efficiency: f64,
    pub models: Vec<RepetitionModel>,
    pub outcomes: Vec<RepetitionOutcome>,
}

pub fn fig9_run(opts: &Options) -> Result<Fig9> {
    let efficiency = fig7_run(0.0, 0.0, opts)?.settled_total().clamp(0.0, 1.0);
    let models = FIG9_BULK_RATES
        .iter()
        .map(|&g| fig9_model(efficiency, g))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = models
        .iter()
        .map(|m| repeat_experiment(m, FIG9_ROUNDS).map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig9 {
        efficiency,
        models,
        outcomes,
    })
}

pub fn fig9(opts: &Options) -> Result<ResultTable> {
    let f = fig9_run(opts)?;
    let mut cols = vec![Column::new("round", "")];
    cols.extend(FIG9_BULK_RATES.iter().map(|g| Column::new(format!("P_cloud(g1bulk={g})"), "")));
    let mut t = ResultTable::new(cols, opts.tol, opts.steps(SWEEP_STEPS));
    for r in 0..FIG9_ROUNDS {
        let mut row = vec![(r + 1) as f64];
        row.extend(f.outcomes.iter().map(|o| o.p_cloud[r]));
        t.push(&row);
    }
    t.info("transfer_efficiency", f.efficiency);
    t.info("p_e", f.models[0].p_e);
    for (g, o) in FIG9_BULK_RATES.iter().zip(&f.outcomes) {
        t.info(&format!("mean_cloud(g1bulk={g})"), o.mean_cloud);
    }
    Ok(t)
}

pub const AHP_SCALES: [f64; 5] = [0.6, 0.8, 1.0, 1.2, 1.4];

pub fn ahp_w1max() -> f64 {
    150.0 * MHZ
}

pub fn ahp_alpha() -> f64 {
    80.0 * MHZ
}

pub fn appendix_a_schedule() -> Result<SweepSchedule> {
    let t_min = min_sweep_time(ahp_alpha(), ahp_w1max())?;
    Ok(ahp_schedule(ahp_w1max(), ahp_alpha(), 100.0 * t_min)?)
}

pub fn appendix_a_run(scales: &[f64]) -> Result<Vec<AhpOutcome>> {
    let sched = appendix_a_schedule()?;
    scales
        .par_iter()
        .map(|s| simulate_ahp_rotation(s * ahp_w1max(), &sched).map_err(Into::into))
        .collect()
}

pub fn appendix_a(_opts: &Options) -> Result<ResultTable> {
    let outs = appendix_a_run(&AHP_SCALES)?;
    let cols = vec![
        Column::new("scale", ""),
        Column::new("w1max_local", "MHz"),
        Column::new("tip_from_field", "deg"),
        Column::new("tip_from_x", "deg"),
    ];
    let mut t = ResultTable::new(cols, adnovel_core::propagate::AHP_TOL, adnovel_core::propagate::AHP_STEPS);
    for (s, o) in AHP_SCALES.iter().zip(&outs) {
        t.push(&[*s, s * ahp_w1max() / MHZ, o.tip_from_field_deg, o.tip_from_x_deg]);
    }
    let t_min = min_sweep_time(ahp_alpha(), ahp_w1max())?;
    t.info("min_sweep_time_ns", t_min * 1e9);
    t.info("t_s_ns", 100.0 * t_min * 1e9);
    t.metadata.certificate = Certificate::merge(outs.iter().map(|o| Certificate::from(&o.certificate)));
    Ok(t)
}

/// Runs a preset by name.
pub fn run(name: &str, opts: &Options) -> Result<ResultTable> {
    match name {
        "fig4" => fig4(opts),
        "fig5" => fig5(opts),
        "fig6" => fig6(opts),
        "fig7" => fig7(opts),
        "fig8" => fig8(opts),
        "fig9" => fig9(opts),
        "appendixA" => appendix_a(opts),
        other => Err(crate::error::CliError::validation("preset", format!("unknown preset {other:?}"))),
    }
}
