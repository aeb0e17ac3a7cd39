//! Robustness against a local electron offset `delta_omega0`.
//!
//! With an offset the electron is locked along the effective field
//! `x' = cos(theta_s) x + sin(theta_s) z`, `tan(theta_s) = delta_omega0 / w1e`.
//! Rewriting the Hamiltonian with the electron quantized along `x'` gives the
//! same block structure as the on-resonance case with `w1e -> w_eff` and
//! `A -> A cos(theta_s)`, plus a residual that couples the ZQ and DQ blocks.

use serde::{Deserialize, Serialize};

use crate::block::{block_model, ratio, BlockModel, LeakageRates};
use crate::error::{domain, invalid, Result};
use crate::operators::{hermitian_eigen, CMatrix};
use crate::schedule::SweepSchedule;
use crate::system::{build_rotating_hamiltonian, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedFrame {
    pub theta_s: f64,
    pub omega_eff: f64,
    pub psi_t: f64,
    pub phi_t: f64,
    pub omega_dq_t: f64,
    pub omega_zq_t: f64,
}

impl TiltedFrame {
    pub fn block(&self, omega_0n: f64, a: f64) -> BlockModel {
        block_model(self.omega_eff, omega_0n, a * self.theta_s.cos())
    }
}

pub fn tilted_frame(delta_omega0: f64, omega_1e: f64, omega_0n: f64, a: f64) -> Result<TiltedFrame> {
    if !(omega_1e > 0.0) {
        return Err(domain(format!("Rabi frequency must be positive, got {omega_1e}")));
    }
    let theta_s = delta_omega0.atan2(omega_1e);
    let omega_eff = delta_omega0.hypot(omega_1e);
    let m = block_model(omega_eff, omega_0n, a * theta_s.cos());
    Ok(TiltedFrame {
        theta_s,
        omega_eff,
        psi_t: m.psi_dq,
        phi_t: m.phi_zq,
        omega_dq_t: m.omega_dq,
        omega_zq_t: m.omega_zq,
    })
}

/// Time at which `sqrt(delta_omega0^2 + w1e(t)^2) = w0n` along a linear sweep, or
/// `None` when no such time exists in `[0, T]`.
pub fn crossing_time(delta_omega0: f64, schedule: &SweepSchedule, omega_0n: f64) -> Result<Option<f64>> {
    if !matches!(schedule, SweepSchedule::LinearSweep { .. }) {
        return Err(invalid("schedule", "crossing time is defined for linear sweeps"));
    }
    if delta_omega0.abs() >= omega_0n {
        return Ok(None);
    }
    let target = (omega_0n * omega_0n - delta_omega0 * delta_omega0).sqrt();
    let t_total = schedule.t_total();
    let (start, end) = (schedule.amplitude(0.0), schedule.amplitude(t_total));
    let t = t_total * (target - start) / (end - start);
    Ok((0.0..=t_total).contains(&t).then_some(t))
}

/// Tilted-frame leakage amplitudes:
///
/// ```text
/// same  = |A sin(ts) sin(psi - phi) + C cos(ts) cos(psi + phi)| / |4 (Omega_DQ - Omega_ZQ)|
/// cross = |A sin(ts) cos(psi - phi) + C cos(ts) sin(psi + phi)| / |4 (Omega_DQ + Omega_ZQ)|
/// ```
///
/// with all angles and eigenvalues taken in the tilted frame.
pub fn tilted_leakage_rates(a: f64, c: f64, delta_omega0: f64, omega_1e: f64, omega_0n: f64) -> Result<LeakageRates> {
    let f = tilted_frame(delta_omega0, omega_1e, omega_0n, a)?;
    let (st, ct) = f.theta_s.sin_cos();
    let (diff, sum) = (f.psi_t - f.phi_t, f.psi_t + f.phi_t);
    let mut degenerate = false;
    let same = ratio(
        a * st * diff.sin() + c * ct * sum.cos(),
        4.0 * (f.omega_dq_t - f.omega_zq_t),
        &mut degenerate,
    );
    let cross = ratio(
        a * st * diff.cos() + c * ct * sum.sin(),
        4.0 * (f.omega_dq_t + f.omega_zq_t),
        &mut degenerate,
    );
    Ok(LeakageRates::from_pairs(same, cross, degenerate))
}

/// Leakage amplitudes sampled along a linear sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageTrace {
    pub times: Vec<f64>,
    pub rates: Vec<LeakageRates>,
}

impl LeakageTrace {
    pub fn same_branch(&self) -> Vec<f64> {
        self.rates.iter().map(LeakageRates::same_branch).collect()
    }

    pub fn cross_branch(&self) -> Vec<f64> {
        self.rates.iter().map(LeakageRates::cross_branch).collect()
    }
}

/// Evaluates [`tilted_leakage_rates`] for the first nucleus of `spec` at
/// `n_points` equally spaced instants of a linear sweep.
pub fn leakage_trace(spec: &SystemSpec, schedule: &SweepSchedule, n_points: usize) -> Result<LeakageTrace> {
    if !matches!(schedule, SweepSchedule::LinearSweep { .. }) {
        return Err(invalid("schedule", "leakage traces are defined for linear sweeps"));
    }
    if n_points < 2 {
        return Err(invalid("leakage trace", "need at least two points"));
    }
    let nucleus = spec
        .nuclei
        .first()
        .ok_or_else(|| invalid("system", "leakage trace needs a nucleus"))?;
    let t_total = schedule.t_total();
    let times: Vec<f64> = (0..n_points)
        .map(|i| t_total * i as f64 / (n_points - 1) as f64)
        .collect();
    let rates = times
        .iter()
        .map(|&t| {
            tilted_leakage_rates(
                nucleus.hyperfine.a,
                nucleus.hyperfine.c,
                spec.delta_omega0,
                schedule.amplitude(t),
                spec.omega_0n,
            )
        })
        .collect::<Result<_>>()?;
    Ok(LeakageTrace { times, rates })
}

/// First-order mixing `|<Phi|H1|Psi>| / |E_Phi - E_Psi|` computed numerically from the
/// tilted-frame eigenvectors of a single electron-nuclear pair.
///
/// `H0 = w_eff Sx' + w0n Iz + A cos(ts) Sz' Ix` and `H1` is the rest of the
/// rotating-frame Hamiltonian. Only the block-coupling part of `H1` contributes.
pub fn first_order_mixing(a: f64, c: f64, delta_omega0: f64, omega_1e: f64, omega_0n: f64) -> Result<LeakageRates> {
    let spec = SystemSpec::single(omega_0n, a, c).with_offset(delta_omega0);
    let h = build_rotating_hamiltonian(&spec, omega_1e)?.entries;
    let theta = delta_omega0.atan2(omega_1e);
    // electron eigenvectors of Sx' = cos(t) Sx + sin(t) Sz, as columns of w (x) 1
    let (s, co) = (0.5 * theta).sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let up = [r * (co + s), r * (co - s)];
    let dn = [r * (co - s), -r * (co + s)];
    let w = CMatrix::from_fn(4, 4, |i, j| {
        if i % 2 != j % 2 {
            return num_complex::Complex64::new(0.0, 0.0);
        }
        let col = if j < 2 { &up } else { &dn };
        num_complex::Complex64::new(col[i / 2], 0.0)
    });
    let ht = w.adjoint() * &h * &w;
    let block = |i: usize, j: usize| CMatrix::from_row_slice(2, 2, &[ht[(i, i)], ht[(i, j)], ht[(j, i)], ht[(j, j)]]);
    // remove the in-block part of C Sz Iz = C sin(t) Sx' Iz so the blocks hold H0 only
    let shift = num_complex::Complex64::new(c * theta.sin() / 4.0, 0.0);
    let mut dq = block(0, 3);
    let mut zq = block(1, 2);
    dq[(0, 0)] -= shift;
    dq[(1, 1)] -= shift;
    zq[(0, 0)] += shift;
    zq[(1, 1)] += shift;
    let (e_dq, v_dq) = hermitian_eigen(&dq);
    let (e_zq, v_zq) = hermitian_eigen(&zq);
    let order = |e: &[f64]| if e[0] >= e[1] { (0, 1) } else { (1, 0) };
    let (dq_plus, dq_minus) = order(&e_dq);
    let (zq_plus, zq_minus) = order(&e_zq);
    let element = |dq_col: usize, zq_col: usize| {
        let rows = [0usize, 3];
        let cols = [1usize, 2];
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (p, &ri) in rows.iter().enumerate() {
            for (q, &ci) in cols.iter().enumerate() {
                acc += v_dq[(p, dq_col)].conj() * ht[(ri, ci)] * v_zq[(q, zq_col)];
            }
        }
        acc.norm()
    };
    let mut degenerate = false;
    let mut amp = |dq_col: usize, zq_col: usize| {
        let gap = e_dq[dq_col] - e_zq[zq_col];
        ratio(element(dq_col, zq_col), gap, &mut degenerate)
    };
    let pp = amp(dq_plus, zq_plus);
    let mm = amp(dq_minus, zq_minus);
    let pm = amp(dq_minus, zq_plus);
    let mp = amp(dq_plus, zq_minus);
    Ok(LeakageRates {
        phi_plus_psi_plus: pp,
        phi_minus_psi_minus: mm,
        phi_plus_psi_minus: pm,
        phi_minus_psi_plus: mp,
        degenerate,
    })
}
