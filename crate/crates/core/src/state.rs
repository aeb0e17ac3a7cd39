use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::operators::{
    change_electron_basis, hermitian_defect, hermitian_eigen, kron_all, pauli_op, trace_product, CMatrix,
    ElectronAxis, Pauli,
};
use crate::system::SystemSpec;

pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Density matrix over the electron ⊗ nuclei register.
///
/// `axis` records the basis the electron factor is written in; see
/// [`crate::operators`] for the full ordering convention.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub entries: CMatrix,
    pub axis: ElectronAxis,
}

/// Electron polarization along the rotating-frame x axis and each nucleus along z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub electron_x: f64,
    pub nuclear_z: Vec<f64>,
}

impl Observables {
    pub fn total_nuclear(&self) -> f64 {
        self.nuclear_z.iter().sum()
    }

    /// Flattened `[electron_x, nuclear_z...]`.
    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.electron_x).chain(self.nuclear_z.iter().copied()).collect()
    }
}

/// Deviations of a state from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateDefects {
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub hermitian_error: f64,
}

impl StateDefects {
    pub fn ok(&self) -> bool {
        self.trace_error <= TRACE_TOL && self.min_eigenvalue >= -POSITIVITY_TOL && self.hermitian_error <= 1e-12
    }
}

impl QuantumState {
    pub fn new(entries: CMatrix, axis: ElectronAxis) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() || !n.is_power_of_two() || n < 2 {
            return Err(invalid("state", format!("bad dimension {}x{}", n, entries.ncols())));
        }
        let state = Self { entries, axis };
        let d = state.defects();
        if !d.ok() {
            return Err(invalid("state", format!("not a density matrix: {d:?}")));
        }
        Ok(state)
    }

    /// `|psi><psi|` for a normalized vector given in the `axis` basis.
    pub fn pure(amplitudes: &[Complex64], axis: ElectronAxis) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("state", format!("vector norm {norm} is not 1")));
        }
        Self::new(&v * v.adjoint(), axis)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn in_axis(&self, axis: ElectronAxis) -> Self {
        if axis == self.axis {
            return self.clone();
        }
        Self {
            entries: change_electron_basis(&self.entries),
            axis,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.entries, &self.entries).re
    }

    pub fn defects(&self) -> StateDefects {
        let (vals, _) = hermitian_eigen(&self.entries);
        StateDefects {
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: vals.iter().copied().fold(f64::INFINITY, f64::min),
            hermitian_error: hermitian_defect(&self.entries),
        }
    }

    /// `Tr(O rho)` for an operator given in the Z basis.
    pub fn expect(&self, op_z_basis: &CMatrix) -> f64 {
        let rho = self.in_axis(ElectronAxis::Z);
        trace_product(op_z_basis, &rho.entries).re
    }

    /// Population of a basis vector of the `axis` representation.
    pub fn population(&self, index: usize, axis: ElectronAxis) -> f64 {
        self.in_axis(axis).entries[(index, index)].re
    }

    /// Electron Bloch vector `(Tr sx rho, Tr sy rho, Tr sz rho)`.
    pub fn electron_bloch(&self) -> [f64; 3] {
        let n = self.n_spins();
        [Pauli::X, Pauli::Y, Pauli::Z].map(|p| self.expect(&pauli_op(p, 0, n)))
    }
}

/// Product state with the electron pure along `electron_axis` and the nuclei fully mixed.
/// Returned in the Z representation.
pub fn initial_state(spec: &SystemSpec, electron_axis: ElectronAxis) -> QuantumState {
    let bloch = match electron_axis {
        ElectronAxis::Z => [0.0, 0.0, 1.0],
        ElectronAxis::X => [1.0, 0.0, 0.0],
    };
    electron_product_state(spec.k(), bloch)
}

/// Electron spin-locked along the local effective field, nuclei fully mixed.
///
/// For each nuclear Zeeman configuration `m` the electron points along
/// `omega_1e x + (delta_omega0 + sum_i C_i m_i) z`, which is what an adiabatic half
/// passage ending at amplitude `omega_1e` leaves behind.
pub fn locked_state(spec: &SystemSpec, omega_1e: f64) -> QuantumState {
    let k = spec.k();
    let n = 1usize << k;
    let mut entries = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        let dz = spec.delta_omega0
            + spec
                .nuclei
                .iter()
                .enumerate()
                .map(|(i, nuc)| {
                    let up = (j >> (k - 1 - i)) & 1 == 0;
                    if up { 0.5 * nuc.hyperfine.c } else { -0.5 * nuc.hyperfine.c }
                })
                .sum::<f64>();
        let norm = omega_1e.hypot(dz);
        let (bx, bz) = if norm == 0.0 { (1.0, 0.0) } else { (omega_1e / norm, dz / norm) };
        let w = 0.5 / n as f64;
        entries[(j, j)] = Complex64::new(w * (1.0 + bz), 0.0);
        entries[(n + j, n + j)] = Complex64::new(w * (1.0 - bz), 0.0);
        entries[(j, n + j)] = Complex64::new(w * bx, 0.0);
        entries[(n + j, j)] = Complex64::new(w * bx, 0.0);
    }
    QuantumState {
        entries,
        axis: ElectronAxis::Z,
    }
}

/// Electron with unit Bloch vector `bloch`, `k` fully mixed nuclei.
pub fn electron_product_state(k: usize, bloch: [f64; 3]) -> QuantumState {
    let half = Complex64::new(0.5, 0.0);
    let electron = (Pauli::I.matrix()
        + Pauli::X.matrix() * Complex64::new(bloch[0], 0.0)
        + Pauli::Y.matrix() * Complex64::new(bloch[1], 0.0)
        + Pauli::Z.matrix() * Complex64::new(bloch[2], 0.0))
        * half;
    let mut factors = vec![electron];
    factors.extend((0..k).map(|_| Pauli::I.matrix() * half));
    QuantumState {
        entries: kron_all(&factors),
        axis: ElectronAxis::Z,
    }
}

/// Electron x polarization and per-nucleus z polarization.
pub fn observables(state: &QuantumState) -> Observables {
    let n = state.n_spins();
    let rho = state.in_axis(ElectronAxis::Z);
    Observables {
        electron_x: rho.expect(&pauli_op(Pauli::X, 0, n)),
        nuclear_z: (1..n).map(|s| rho.expect(&pauli_op(Pauli::Z, s, n))).collect(),
    }
}

/// Pseudo-spin polarizations `(Tr sigma_z^DQ rho, Tr sigma_z^ZQ rho)` of a one-nucleus state.
///
/// In the XZ basis `DQ = span{|up Up>, |dn Dn>}` and `ZQ = span{|up Dn>, |dn Up>}`.
pub fn block_polarizations(state: &QuantumState) -> Result<(f64, f64)> {
    if state.dim() != 4 {
        return Err(invalid("state", "block polarizations need exactly one nucleus"));
    }
    let x = state.in_axis(ElectronAxis::X);
    let p = |i: usize| x.entries[(i, i)].re;
    Ok((p(0) - p(3), p(1) - p(2)))
}

/// Projector expectations `(Tr P_DQ rho, Tr P_ZQ rho)` of a one-nucleus state.
pub fn block_weights(state: &QuantumState) -> Result<(f64, f64)> {
    if state.dim() != 4 {
        return Err(invalid("state", "block weights need exactly one nucleus"));
    }
    let x = state.in_axis(ElectronAxis::X);
    let p = |i: usize| x.entries[(i, i)].re;
    Ok((p(0) + p(3), p(1) + p(2)))
}
