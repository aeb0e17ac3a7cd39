use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysConstants;
use crate::error::{domain, invalid, Result};
use crate::operators::{spin_op, spin_pair, CMatrix, ElectronAxis, OperatorMatrix, Pauli};

/// Largest supported cloud (Hilbert dimension 128).
pub const MAX_NUCLEI: usize = 6;

/// Pseudo-secular hyperfine couplings of one nucleus, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineParams {
    /// Energy-mixing coupling multiplying `Sz (cos phi Ix + sin phi Iy)`.
    pub a: f64,
    /// Energy-shifting coupling multiplying `Sz Iz`.
    pub c: f64,
    /// Azimuth of the transverse coupling, in `[0, 2 pi)`.
    pub phi_hf: f64,
}

impl HyperfineParams {
    pub fn new(a: f64, c: f64) -> Self {
        Self { a, c, phi_hf: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.c.is_finite() {
            return Err(invalid("hyperfine", "couplings must be finite"));
        }
        if !(0.0..TAU).contains(&self.phi_hf) {
            return Err(invalid("hyperfine", format!("phi_hf {} outside [0, 2pi)", self.phi_hf)));
        }
        Ok(())
    }
}

/// Position of a nucleus relative to the electron, in spherical coordinates
/// with the polar axis along the static field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spherical {
    pub r: f64,
    pub theta: f64,
    pub varphi: f64,
}

impl Spherical {
    pub fn cartesian(&self) -> [f64; 3] {
        let st = self.theta.sin();
        [
            self.r * st * self.varphi.cos(),
            self.r * st * self.varphi.sin(),
            self.r * self.theta.cos(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NucleusSpec {
    pub hyperfine: HyperfineParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Spherical>,
    /// Isotropic-contact contribution to `C` (rad/s); only used for the geometry cross-check.
    #[serde(default)]
    pub fermi_contact_zz: f64,
}

impl NucleusSpec {
    pub fn from_couplings(a: f64, c: f64) -> Self {
        Self {
            hyperfine: HyperfineParams::new(a, c),
            position: None,
            fermi_contact_zz: 0.0,
        }
    }

    pub fn from_position(position: Spherical, fermi_contact_zz: f64, constants: &PhysConstants) -> Result<Self> {
        Ok(Self {
            hyperfine: hyperfine_from_geometry(&position, fermi_contact_zz, constants)?,
            position: Some(position),
            fermi_contact_zz,
        })
    }
}

/// One electron and `k` nuclei in the microwave rotating frame. All rates in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub omega_0n: f64,
    pub omega_0e: f64,
    /// Fixed local offset of the electron resonance.
    #[serde(default)]
    pub delta_omega0: f64,
    pub nuclei: Vec<NucleusSpec>,
    /// Symmetric `k x k` homonuclear couplings `d_ij` with zero diagonal.
    #[serde(default)]
    pub dipolar: Vec<Vec<f64>>,
}

impl SystemSpec {
    /// A bare system with no dipolar couplings among the nuclei.
    pub fn new(omega_0n: f64, nuclei: Vec<NucleusSpec>) -> Self {
        let k = nuclei.len();
        Self {
            omega_0n,
            omega_0e: 0.0,
            delta_omega0: 0.0,
            nuclei,
            dipolar: vec![vec![0.0; k]; k],
        }
    }

    /// One nucleus with couplings `a`, `c` and `phi_hf = 0`.
    pub fn single(omega_0n: f64, a: f64, c: f64) -> Self {
        Self::new(omega_0n, vec![NucleusSpec::from_couplings(a, c)])
    }

    pub fn with_offset(mut self, delta_omega0: f64) -> Self {
        self.delta_omega0 = delta_omega0;
        self
    }

    pub fn with_dipolar(mut self, dipolar: Vec<Vec<f64>>) -> Self {
        self.dipolar = dipolar;
        self
    }

    pub fn k(&self) -> usize {
        self.nuclei.len()
    }

    pub fn n_spins(&self) -> usize {
        self.k() + 1
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_0n > 0.0) {
            return Err(invalid("system", "omega_0n must be positive"));
        }
        if !self.delta_omega0.is_finite() {
            return Err(invalid("system", "delta_omega0 must be finite"));
        }
        let k = self.k();
        if k > MAX_NUCLEI {
            return Err(invalid("system", format!("{k} nuclei exceeds the cap of {MAX_NUCLEI}")));
        }
        for (i, n) in self.nuclei.iter().enumerate() {
            n.hyperfine.validate()?;
            if let Some(pos) = &n.position {
                if !(pos.r > 0.0) {
                    return Err(invalid("system", format!("nucleus {i}: R must be positive")));
                }
                let geo = hyperfine_from_geometry(pos, n.fermi_contact_zz, &PhysConstants::PROTON)?;
                let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300);
                if !close(geo.a, n.hyperfine.a) || !close(geo.c, n.hyperfine.c) {
                    return Err(invalid(
                        "system",
                        format!("nucleus {i}: couplings disagree with its position"),
                    ));
                }
            }
        }
        if self.dipolar.len() != k || self.dipolar.iter().any(|row| row.len() != k) {
            return Err(invalid("system", format!("dipolar matrix must be {k}x{k}")));
        }
        for i in 0..k {
            if self.dipolar[i][i] != 0.0 {
                return Err(invalid("system", "dipolar diagonal must be zero"));
            }
            for j in 0..i {
                if self.dipolar[i][j] != self.dipolar[j][i] || !self.dipolar[i][j].is_finite() {
                    return Err(invalid("system", "dipolar matrix must be symmetric and finite"));
                }
            }
        }
        Ok(())
    }
}

/// Pseudo-secular couplings of a nucleus at `position`:
/// `A = 3/2 K sin 2theta`, `C = K (3 cos^2 theta - 1) + Fzz` with `K = mu0 ge gn hbar / 4 pi R^3`.
pub fn hyperfine_from_geometry(
    position: &Spherical,
    fermi_contact_zz: f64,
    constants: &PhysConstants,
) -> Result<HyperfineParams> {
    if !(position.r > 0.0) {
        return Err(domain(format!("R must be positive, got {}", position.r)));
    }
    let k = constants.electron_nuclear_kernel(position.r);
    let ct = position.theta.cos();
    Ok(HyperfineParams {
        a: 1.5 * k * (2.0 * position.theta).sin(),
        c: k * (3.0 * ct * ct - 1.0) + fermi_contact_zz,
        phi_hf: position.varphi.rem_euclid(TAU),
    })
}

/// Secular homonuclear couplings `d_ij = -K_ij (3 cos^2 theta_ij - 1) / 2` from nuclear positions.
pub fn dipolar_from_positions(positions: &[Spherical], constants: &PhysConstants) -> Result<Vec<Vec<f64>>> {
    let k = positions.len();
    let xyz: Vec<[f64; 3]> = positions.iter().map(Spherical::cartesian).collect();
    let mut d = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..i {
            let r = [xyz[i][0] - xyz[j][0], xyz[i][1] - xyz[j][1], xyz[i][2] - xyz[j][2]];
            let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            if !(dist > 0.0) {
                return Err(domain(format!("nuclei {j} and {i} coincide")));
            }
            let cos = r[2] / dist;
            let v = -constants.nuclear_nuclear_kernel(dist) * (3.0 * cos * cos - 1.0) / 2.0;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(d)
}

/// Boltzmann polarization `tanh(hbar omega / 2 kB T)` of a spin-1/2 with splitting `omega`.
pub fn thermal_polarization(omega: f64, temperature: f64, constants: &PhysConstants) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(domain(format!("temperature must be positive, got {temperature}")));
    }
    Ok((constants.hbar * omega / (2.0 * constants.kb * temperature)).tanh())
}

/// Operators reused at every time step of a propagation.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    /// Everything that does not depend on the microwave field.
    pub stationary: CMatrix,
    /// Electron `Sx (x) 1`, multiplied by the Rabi frequency.
    pub electron_sx: CMatrix,
    /// Electron `Sz (x) 1`, multiplied by any extra instantaneous detuning.
    pub electron_sz: CMatrix,
}

impl HamiltonianParts {
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_spins();
        let re = |x: f64| Complex64::new(x, 0.0);
        let electron_sz = spin_op(Pauli::Z, 0, n);
        let electron_sx = spin_op(Pauli::X, 0, n);
        let mut h = &electron_sz * re(spec.delta_omega0);
        for (i, nuc) in spec.nuclei.iter().enumerate() {
            let site = i + 1;
            let hf = &nuc.hyperfine;
            h += spin_op(Pauli::Z, site, n) * re(spec.omega_0n);
            h += spin_pair(Pauli::Z, 0, Pauli::X, site, n) * re(hf.a * hf.phi_hf.cos());
            h += spin_pair(Pauli::Z, 0, Pauli::Y, site, n) * re(hf.a * hf.phi_hf.sin());
            h += spin_pair(Pauli::Z, 0, Pauli::Z, site, n) * re(hf.c);
        }
        for i in 0..spec.k() {
            for j in (i + 1)..spec.k() {
                let d = spec.dipolar[i][j];
                if d == 0.0 {
                    continue;
                }
                let (a, b) = (i + 1, j + 1);
                h += spin_pair(Pauli::Z, a, Pauli::Z, b, n) * re(2.0 * d);
                h -= spin_pair(Pauli::X, a, Pauli::X, b, n) * re(d);
                h -= spin_pair(Pauli::Y, a, Pauli::Y, b, n) * re(d);
            }
        }
        Ok(Self {
            stationary: h,
            electron_sx,
            electron_sz,
        })
    }

    /// `H = stationary + omega_1e Sx + extra_detuning Sz`, Z basis.
    pub fn at(&self, omega_1e: f64, extra_detuning: f64) -> CMatrix {
        let mut h = self.stationary.clone();
        h += &self.electron_sx * Complex64::new(omega_1e, 0.0);
        if extra_detuning != 0.0 {
            h += &self.electron_sz * Complex64::new(extra_detuning, 0.0);
        }
        h
    }
}

/// Rotating-frame Hamiltonian at a fixed Rabi frequency, electron factor in the Z basis.
pub fn build_rotating_hamiltonian(spec: &SystemSpec, omega_1e: f64) -> Result<OperatorMatrix> {
    let parts = HamiltonianParts::new(spec)?;
    OperatorMatrix::new(parts.at(omega_1e, 0.0), ElectronAxis::Z)
}

/// Spherical position from a radius in metres and angles in degrees.
pub fn shell_position(r: f64, theta_deg: f64, varphi_deg: f64) -> Spherical {
    Spherical {
        r,
        theta: theta_deg * PI / 180.0,
        varphi: varphi_deg * PI / 180.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::change_electron_basis;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const C: PhysConstants = PhysConstants::PROTON;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn geometry_zero_polar_angle_has_no_mixing() {
        for r in [1e-10, 2e-10, 5e-10] {
            let hf = hyperfine_from_geometry(&shell_position(r, 0.0, 30.0), 0.0, &C).unwrap();
            assert!(hf.a.abs() < 1e-6);
        }
    }

    #[test]
    fn geometry_equatorial_shift_is_minus_kernel() {
        let r = 3e-10;
        let hf = hyperfine_from_geometry(&shell_position(r, 90.0, 0.0), 0.0, &C).unwrap();
        assert_relative_eq!(hf.c, -C.electron_nuclear_kernel(r), max_relative = 1e-12);
    }

    #[test]
    fn geometry_two_angstrom_proton_mixing_is_megahertz_scale() {
        // K = mu0 ge gn hbar / (4 pi R^3) evaluated independently of the kernel helper.
        let r: f64 = 2e-10;
        let k = 1e-7 * 1.256_637_062_12e-6 / (4e-7 * PI) * C.gamma_e * C.gamma_n * C.hbar / r.powi(3);
        let hf = hyperfine_from_geometry(&shell_position(r, 45.0, 0.0), 0.0, &C).unwrap();
        assert_relative_eq!(hf.a, 1.5 * k, max_relative = 1e-9);
        let half_a_mhz = hf.a / 2.0 / TAU / 1e6;
        assert!((3.0..10.0).contains(&half_a_mhz), "A/2 = {half_a_mhz} MHz");
    }

    #[test]
    fn geometry_rejects_non_positive_radius() {
        assert!(hyperfine_from_geometry(&shell_position(0.0, 10.0, 0.0), 0.0, &C).is_err());
        assert!(hyperfine_from_geometry(&shell_position(-1e-10, 10.0, 0.0), 0.0, &C).is_err());
    }

    #[test]
    fn thermal_polarization_limits() {
        assert!(thermal_polarization(1e9, 1e12, &C).unwrap() < 1e-4);
        assert!(thermal_polarization(1e9, 0.0, &C).is_err());
        let pe = thermal_polarization(TAU * 33e9, 0.3, &C).unwrap();
        assert!((0.98..0.99).contains(&pe), "{pe}");
        let pn = thermal_polarization(TAU * 51e6, 0.3, &C).unwrap();
        assert!((0.003..0.005).contains(&pn), "{pn}");
    }

    #[test]
    fn bare_electron_hamiltonian() {
        let spec = SystemSpec::new(1.0, vec![]).with_offset(0.3);
        let h = build_rotating_hamiltonian(&spec, 2.0).unwrap();
        let expect = spin_op(Pauli::Z, 0, 1) * Complex64::new(0.3, 0.0)
            + spin_op(Pauli::X, 0, 1) * Complex64::new(2.0, 0.0);
        assert!(close(&h.entries, &expect, 1e-15));
    }

    #[test]
    fn uncoupled_pair_is_diagonal_in_xz_basis() {
        let (w1, wn) = (3.0, 2.0);
        let spec = SystemSpec::single(wn, 0.0, 0.0);
        let h = build_rotating_hamiltonian(&spec, w1).unwrap().in_axis(ElectronAxis::X);
        let diag = [(w1 + wn) / 2.0, (w1 - wn) / 2.0, (-w1 + wn) / 2.0, (-w1 - wn) / 2.0];
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { diag[i] } else { 0.0 };
                assert!((h.entries[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_nucleus_matches_block_pattern() {
        let (w1, wn, a) = (1.1, 1.0, 0.1);
        let spec = SystemSpec::single(wn, a, 0.0);
        let h = build_rotating_hamiltonian(&spec, w1).unwrap().in_axis(ElectronAxis::X);
        let z = 0.0;
        #[rustfmt::skip]
        let expect = [
            (w1 + wn) / 2.0, z, z, a / 4.0,
            z, (w1 - wn) / 2.0, a / 4.0, z,
            z, a / 4.0, (-w1 + wn) / 2.0, z,
            a / 4.0, z, z, (-w1 - wn) / 2.0,
        ];
        let expect = CMatrix::from_row_slice(4, 4, &expect.map(|x| Complex64::new(x, 0.0)));
        assert!(close(&h.entries, &expect, 1e-15));
    }

    #[test]
    fn block_projectors_commute_without_shift_terms() {
        let spec = SystemSpec::single(1.0, 0.37, 0.0);
        let h = build_rotating_hamiltonian(&spec, 0.8).unwrap().in_axis(ElectronAxis::X).entries;
        let one = Complex64::new(1.0, 0.0);
        let mut p_dq = CMatrix::zeros(4, 4);
        p_dq[(0, 0)] = one;
        p_dq[(3, 3)] = one;
        let p_zq = CMatrix::identity(4, 4) - &p_dq;
        for p in [p_dq, p_zq] {
            let comm = &h * &p - &p * &h;
            assert!(comm.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn dipolar_term_is_secular_form() {
        let d = 0.7;
        let spec = SystemSpec::new(1.0, vec![NucleusSpec::from_couplings(0.0, 0.0); 2])
            .with_dipolar(vec![vec![0.0, d], vec![d, 0.0]]);
        let h0 = build_rotating_hamiltonian(&SystemSpec::new(1.0, spec.nuclei.clone()), 0.0).unwrap();
        let h = build_rotating_hamiltonian(&spec, 0.0).unwrap();
        let n = 3;
        let mut expect = spin_pair(Pauli::Z, 1, Pauli::Z, 2, n) * Complex64::new(3.0 * d, 0.0);
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            expect -= spin_pair(p, 1, p, 2, n) * Complex64::new(d, 0.0);
        }
        assert!(close(&(h.entries - h0.entries), &expect, 1e-15));
    }

    #[test]
    fn dipolar_from_positions_is_symmetric_with_zero_diagonal() {
        let pos = [shell_position(2e-10, 30.0, 0.0), shell_position(3e-10, 80.0, 120.0), shell_position(2.5e-10, 140.0, 250.0)];
        let d = dipolar_from_positions(&pos, &C).unwrap();
        for i in 0..3 {
            assert_eq!(d[i][i], 0.0);
            for j in 0..3 {
                assert_eq!(d[i][j], d[j][i]);
            }
        }
        assert!(d[1][0].abs() > 0.0);
    }

    #[test]
    fn validation_catches_bad_specs() {
        assert!(SystemSpec::single(0.0, 0.1, 0.0).validate().is_err());
        let mut s = SystemSpec::single(1.0, 0.1, 0.0);
        s.nuclei[0].hyperfine.phi_hf = 7.0;
        assert!(s.validate().is_err());
        let s = SystemSpec::new(1.0, vec![NucleusSpec::from_couplings(0.1, 0.0); 7]);
        assert!(s.validate().is_err());
        let s = SystemSpec::new(1.0, vec![NucleusSpec::from_couplings(0.1, 0.0); 2])
            .with_dipolar(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(s.validate().is_err());
        let pos = shell_position(2e-10, 40.0, 10.0);
        let mut n = NucleusSpec::from_position(pos, 0.0, &C).unwrap();
        assert!(SystemSpec::new(1.0, vec![n.clone()]).validate().is_ok());
        n.hyperfine.a *= 1.0 + 1e-6;
        assert!(SystemSpec::new(1.0, vec![n]).validate().is_err());
    }

    #[test]
    fn x_basis_change_roundtrips_operator() {
        let spec = SystemSpec::single(1.0, 0.2, 0.05).with_offset(0.1);
        let h = build_rotating_hamiltonian(&spec, 0.9).unwrap();
        let back = change_electron_basis(&h.in_axis(ElectronAxis::X).entries);
        assert!(close(&back, &h.entries, 1e-14));
    }

    proptest! {
        #[test]
        fn geometry_scales_as_inverse_cube(r in 1e-10f64..1e-9, theta in 0.0f64..PI) {
            let p1 = Spherical { r, theta, varphi: 0.0 };
            let p2 = Spherical { r: 2.0 * r, theta, varphi: 0.0 };
            let h1 = hyperfine_from_geometry(&p1, 0.0, &C).unwrap();
            let h2 = hyperfine_from_geometry(&p2, 0.0, &C).unwrap();
            prop_assert!((h1.a - 8.0 * h2.a).abs() <= 1e-12 * h1.a.abs().max(1.0));
            prop_assert!((h1.c - 8.0 * h2.c).abs() <= 1e-12 * h1.c.abs().max(1.0));
        }

        #[test]
        fn hamiltonian_is_hermitian_and_linear(
            w1 in -5.0f64..5.0, d0 in -2.0f64..2.0,
            a in -1.0f64..1.0, c in -1.0f64..1.0, phi in 0.0f64..6.28,
        ) {
            let mut spec = SystemSpec::single(1.0, a, c).with_offset(d0);
            spec.nuclei[0].hyperfine.phi_hf = phi;
            let h = build_rotating_hamiltonian(&spec, w1).unwrap();
            prop_assert!(h.is_hermitian(1e-12));
            // superposition in (w1, d0, a, c) around the nuclear Zeeman term
            let base = build_rotating_hamiltonian(&SystemSpec::single(1.0, 0.0, 0.0), 0.0).unwrap().entries;
            let mut parts = base.clone();
            let mut s1 = SystemSpec::single(1.0, a, 0.0);
            s1.nuclei[0].hyperfine.phi_hf = phi;
            for (s, w) in [
                (SystemSpec::single(1.0, 0.0, 0.0), w1),
                (SystemSpec::single(1.0, 0.0, 0.0).with_offset(d0), 0.0),
                (s1, 0.0),
                (SystemSpec::single(1.0, 0.0, c), 0.0),
            ] {
                parts += build_rotating_hamiltonian(&s, w).unwrap().entries - &base;
            }
            prop_assert!(close(&parts, &h.entries, 1e-12));
        }

        #[test]
        fn thermal_polarization_monotone(w in 1e6f64..1e12, t in 0.01f64..100.0) {
            let p = thermal_polarization(w, t, &C).unwrap();
            prop_assert!(thermal_polarization(w * 1.5, t, &C).unwrap() >= p);
            prop_assert!(thermal_polarization(w, t * 1.5, &C).unwrap() <= p);
        }
    }
}
