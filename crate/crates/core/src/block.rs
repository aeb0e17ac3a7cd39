//! Closed-form zero-/double-quantum analytics for one electron and one nucleus.
//!
//! With `C = 0` and no electron offset the rotating-frame Hamiltonian splits into
//! two pseudo-spin blocks in the XZ basis:
//!
//! ```text
//! H_DQ = (w1e + w0n)/2 sz + A/4 sx     on {|up Up>, |dn Dn>}
//! H_ZQ = (w1e - w0n)/2 sz + A/4 sx     on {|up Dn>, |dn Up>}
//! ```
//!
//! Each block has eigenvalues `±Omega` and a quantization angle measured from
//! its pseudo-spin z axis.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockModel {
    pub omega_1e: f64,
    pub omega_0n: f64,
    pub a: f64,
    /// Positive eigenvalue of the DQ block.
    pub omega_dq: f64,
    /// Positive eigenvalue of the ZQ block.
    pub omega_zq: f64,
    /// DQ quantization angle `atan2(A/2, w1e + w0n)`.
    pub psi_dq: f64,
    /// ZQ quantization angle `atan2(A/2, w1e - w0n)`; passes through `pi/2` on resonance.
    pub phi_zq: f64,
}

pub fn block_model(omega_1e: f64, omega_0n: f64, a: f64) -> BlockModel {
    let sum = omega_1e + omega_0n;
    let diff = omega_1e - omega_0n;
    BlockModel {
        omega_1e,
        omega_0n,
        a,
        omega_dq: 0.5 * sum.hypot(a / 2.0),
        omega_zq: 0.5 * diff.hypot(a / 2.0),
        psi_dq: (a / 2.0).atan2(sum),
        phi_zq: (a / 2.0).atan2(diff),
    }
}

impl BlockModel {
    /// Angular frequency at which a block population oscillates: the full
    /// splitting `2 Omega` between its two eigenvalues.
    pub fn dq_oscillation(&self) -> f64 {
        2.0 * self.omega_dq
    }

    pub fn zq_oscillation(&self) -> f64 {
        2.0 * self.omega_zq
    }

    /// Flip-flop period of the ZQ block.
    pub fn zq_period(&self) -> f64 {
        std::f64::consts::TAU / self.zq_oscillation()
    }
}

/// Nuclear polarization `Tr[(1 (x) sigma_z) rho(t)]` under a constant lock, starting
/// from `|up>_X <up| (x) 1/2`.
///
/// Each block carries half the initial polarization, so the result is half the
/// difference of the DQ and ZQ pseudo-spin polarizations.
pub fn magnetization_analytic(model: &BlockModel, t: f64) -> f64 {
    let (s_psi, s_phi) = (model.psi_dq.sin().powi(2), model.phi_zq.sin().powi(2));
    let dq = (1.0 - s_psi) + (model.dq_oscillation() * t).cos() * s_psi;
    let zq = (1.0 - s_phi) + (model.zq_oscillation() * t).cos() * s_phi;
    0.5 * (dq - zq)
}

/// Long-time average of [`magnetization_analytic`].
pub fn magnetization_time_average(model: &BlockModel) -> f64 {
    0.5 * (model.psi_dq.cos().powi(2) - model.phi_zq.cos().powi(2))
}

/// Landau-Zener exponent `gamma = (A/4)^2 / |d(w1e - w0n)/dt|` for a linear sweep of
/// half-width `delta_omega` over `t_sweep`.
pub fn lz_gamma(a: f64, delta_omega: f64, t_sweep: f64) -> Result<f64> {
    if !(t_sweep > 0.0) {
        return Err(domain(format!("sweep time must be positive, got {t_sweep}")));
    }
    if !(delta_omega > 0.0) {
        return Err(domain(format!("sweep half-width must be positive, got {delta_omega}")));
    }
    let coupling = a / 4.0;
    Ok(coupling * coupling * t_sweep / (2.0 * delta_omega))
}

/// Probability `exp(-2 pi gamma)` of remaining in the initial ZQ diabatic state.
pub fn lz_probability(a: f64, delta_omega: f64, t_sweep: f64) -> Result<f64> {
    Ok((-std::f64::consts::TAU * lz_gamma(a, delta_omega, t_sweep)?).exp())
}

/// Perturbative mixing amplitudes between the ZQ eigenstates `Phi±` and the DQ
/// eigenstates `Psi±`. Values are magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageRates {
    pub phi_plus_psi_plus: f64,
    pub phi_minus_psi_minus: f64,
    pub phi_plus_psi_minus: f64,
    pub phi_minus_psi_plus: f64,
    /// Set when `Omega_DQ = Omega_ZQ`; the same-branch pair is then `+inf`.
    pub degenerate: bool,
}

impl LeakageRates {
    pub(crate) fn from_pairs(same: f64, cross: f64, degenerate: bool) -> Self {
        Self {
            phi_plus_psi_plus: same,
            phi_minus_psi_minus: same,
            phi_plus_psi_minus: cross,
            phi_minus_psi_plus: cross,
            degenerate,
        }
    }

    /// Same-branch transitions `Phi± <-> Psi±`.
    pub fn same_branch(&self) -> f64 {
        self.phi_plus_psi_plus
    }

    /// Cross-branch transitions `Phi± <-> Psi∓`.
    pub fn cross_branch(&self) -> f64 {
        self.phi_plus_psi_minus
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.phi_plus_psi_plus,
            self.phi_minus_psi_minus,
            self.phi_plus_psi_minus,
            self.phi_minus_psi_plus,
        ]
    }
}

/// `(num / den)` as a magnitude, `+inf` with the flag raised when `den == 0`.
pub(crate) fn ratio(num: f64, den: f64, degenerate: &mut bool) -> f64 {
    if den == 0.0 {
        *degenerate = true;
        f64::INFINITY
    } else {
        (num / den).abs()
    }
}

/// Leakage out of the ZQ block induced by the `C Sz Iz` term:
/// `(C/4) |sin(psi - phi) / (Omega_DQ - Omega_ZQ)|` and `(C/4) |cos(psi - phi) / (Omega_DQ + Omega_ZQ)|`.
pub fn leakage_rates_c(model: &BlockModel, c: f64) -> LeakageRates {
    let quarter = c.abs() / 4.0;
    let delta = model.psi_dq - model.phi_zq;
    let mut degenerate = false;
    let same = ratio(quarter * delta.sin(), model.omega_dq - model.omega_zq, &mut degenerate);
    let cross = ratio(quarter * delta.cos(), model.omega_dq + model.omega_zq, &mut degenerate);
    LeakageRates::from_pairs(same, cross, degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{hermitian_eigen, ElectronAxis};
    use crate::system::{build_rotating_hamiltonian, SystemSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    #[test]
    fn no_mixing_gives_bare_splitting() {
        let m = block_model(1.3, 1.0, 0.0);
        assert_relative_eq!(m.omega_zq, 0.15, max_relative = 1e-14);
        assert_eq!(m.phi_zq, 0.0);
        assert_eq!(m.psi_dq, 0.0);
    }

    #[test]
    fn on_resonance_reduction() {
        let m = block_model(2.0, 2.0, 0.4);
        assert_relative_eq!(m.omega_zq, 0.1, max_relative = 1e-14);
        assert_relative_eq!(m.phi_zq, FRAC_PI_2, max_relative = 1e-15);
        let wn = TAU * 51e6;
        let m = block_model(wn, wn, TAU * 10e6);
        assert_relative_eq!(m.omega_zq, TAU * 2.5e6, max_relative = 1e-14);
    }

    #[test]
    fn quantization_angle_is_continuous_through_resonance() {
        let below = block_model(0.999, 1.0, 0.1).phi_zq;
        let above = block_model(1.001, 1.0, 0.1).phi_zq;
        assert!(below > FRAC_PI_2 && above < FRAC_PI_2);
        assert!(below - above < 0.05);
    }

    #[test]
    fn eigenvalues_match_hamiltonian_blocks() {
        for (w1, wn, a) in [(1.0, 1.0, 0.1), (0.7, 1.0, 0.3), (2.0, 1.0, -0.5)] {
            let m = block_model(w1, wn, a);
            let h = build_rotating_hamiltonian(&SystemSpec::single(wn, a, 0.0), w1)
                .unwrap()
                .in_axis(ElectronAxis::X)
                .entries;
            let pick = |i: usize, j: usize| {
                nalgebra::DMatrix::from_row_slice(2, 2, &[h[(i, i)], h[(i, j)], h[(j, i)], h[(j, j)]])
            };
            let (dq, _) = hermitian_eigen(&pick(0, 3));
            let (zq, _) = hermitian_eigen(&pick(1, 2));
            let max = |v: &[f64]| v.iter().copied().fold(f64::MIN, f64::max);
            let min = |v: &[f64]| v.iter().copied().fold(f64::MAX, f64::min);
            assert!((max(&dq) - m.omega_dq).abs() < 1e-12 && (min(&dq) + m.omega_dq).abs() < 1e-12);
            assert!((max(&zq) - m.omega_zq).abs() < 1e-12 && (min(&zq) + m.omega_zq).abs() < 1e-12);
        }
    }

    #[test]
    fn magnetization_starts_at_zero_and_vanishes_without_mixing() {
        let m = block_model(1.0, 1.0, 0.1);
        assert!(magnetization_analytic(&m, 0.0).abs() < 1e-15);
        let m0 = block_model(1.05, 1.0, 0.0);
        for t in [0.0, 1.0, 17.3, 1e3] {
            assert_eq!(magnetization_analytic(&m0, t), 0.0);
        }
    }

    #[test]
    fn resonant_intermediate_regime_averages_to_half() {
        let m = block_model(1.0, 1.0, 0.1);
        let peak = magnetization_analytic(&m, m.zq_period() / 2.0);
        assert!(peak > 0.99 && peak <= 1.0);
        assert!((magnetization_time_average(&m) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn lz_limits_and_errors() {
        assert_eq!(lz_probability(0.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(lz_probability(1.0, 1.0, 1e6).unwrap() < 1e-100);
        assert!(lz_probability(1.0, 0.0, 1.0).is_err());
        assert!(lz_probability(1.0, 1.0, -1.0).is_err());
        let wn = TAU * 51e6;
        let p = lz_probability(0.1 * wn, TAU * 20e6, 2e-6).unwrap();
        assert!(p < 0.05, "{p}");
    }

    #[test]
    fn leakage_vanishes_without_shift_or_angle_difference() {
        let m = block_model(1.0, 1.0, 0.1);
        assert_eq!(leakage_rates_c(&m, 0.0).as_array(), [0.0; 4]);
        let mut same = m;
        same.phi_zq = same.psi_dq;
        assert_eq!(leakage_rates_c(&same, 0.2).same_branch(), 0.0);
    }

    #[test]
    fn leakage_intermediate_limit_bounded_by_shift_over_sum() {
        let (w1, wn, a, c) = (1.0, 1.0, 0.1, 0.01);
        let r = leakage_rates_c(&block_model(w1, wn, a), c);
        let scale = c / (w1 + wn);
        assert!(r.cross_branch() <= scale && r.same_branch() <= scale);
        assert!(r.same_branch() > 0.1 * scale);
        assert!(!r.degenerate);
    }

    #[test]
    fn leakage_degenerate_denominator_is_flagged() {
        let r = leakage_rates_c(&block_model(0.0, 1.0, 0.1), 0.1);
        assert!(r.degenerate);
        assert!(r.same_branch().is_infinite());
    }

    proptest! {
        #[test]
        fn leakage_even_in_shift(w1 in 0.1f64..3.0, a in -0.5f64..0.5, c in 0.0f64..0.5) {
            let m = block_model(w1, 1.0, a);
            prop_assert_eq!(leakage_rates_c(&m, c), leakage_rates_c(&m, -c));
        }

        #[test]
        fn magnetization_bounded(w1 in 0.1f64..3.0, a in -2.0f64..2.0, t in 0.0f64..100.0) {
            let v = magnetization_analytic(&block_model(w1, 1.0, a), t);
            prop_assert!((-1.0..=1.0).contains(&v));
        }
    }
}
