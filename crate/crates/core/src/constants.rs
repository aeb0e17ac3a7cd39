use serde::{Deserialize, Serialize};

/// Physical constants in SI units. Gyromagnetic ratios are magnitudes in rad/s/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysConstants {
    pub mu0: f64,
    pub hbar: f64,
    pub kb: f64,
    pub gamma_e: f64,
    pub gamma_n: f64,
}

impl PhysConstants {
    /// CODATA 2018 values with a proton as the nuclear species.
    pub const PROTON: PhysConstants = PhysConstants {
        mu0: 1.256_637_062_12e-6,
        hbar: 1.054_571_817e-34,
        kb: 1.380_649e-23,
        gamma_e: 1.760_859_630_23e11,
        gamma_n: 2.675_221_874_4e8,
    };

    /// Heteronuclear dipolar prefactor `mu0 * gamma_e * gamma_n * hbar / (4 pi r^3)` in rad/s.
    pub fn electron_nuclear_kernel(&self, r: f64) -> f64 {
        self.mu0 / (4.0 * std::f64::consts::PI) * self.gamma_e * self.gamma_n * self.hbar / r.powi(3)
    }

    /// Homonuclear dipolar prefactor `mu0 * gamma_n^2 * hbar / (4 pi r^3)` in rad/s.
    pub fn nuclear_nuclear_kernel(&self, r: f64) -> f64 {
        self.mu0 / (4.0 * std::f64::consts::PI) * self.gamma_n * self.gamma_n * self.hbar / r.powi(3)
    }

    pub fn electron_larmor(&self, b0: f64) -> f64 {
        self.gamma_e * b0
    }

    pub fn nuclear_larmor(&self, b0: f64) -> f64 {
        self.gamma_n * b0
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::PROTON
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_positive_and_ratio_matches_proton() {
        let c = PhysConstants::PROTON;
        for v in [c.mu0, c.hbar, c.kb, c.gamma_e, c.gamma_n] {
            assert!(v > 0.0);
        }
        let ratio = c.gamma_e / c.gamma_n;
        assert!((ratio / 658.0 - 1.0).abs() < 0.01, "ratio {ratio}");
    }
}
