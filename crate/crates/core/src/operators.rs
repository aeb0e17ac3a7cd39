//! Dense complex operators on the electron ⊗ nuclei Hilbert space.
//!
//! Basis convention: the electron is the leftmost tensor factor and the
//! nuclei follow in list order. Each factor is ordered (up, down), so basis
//! index `i` has the electron in bit `k` and nucleus `j` in bit `k - 1 - j`.
//! The electron factor is expressed either in its Z eigenbasis or its X
//! eigenbasis with `|up>_X = (|up> + |down>)/sqrt 2`; nuclei are always in Z.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;

/// Which eigenbasis the electron tensor factor is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElectronAxis {
    Z,
    X,
}

/// Single-spin Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let e = match self {
            Pauli::I => [o, z, z, o],
            Pauli::X => [z, o, o, z],
            Pauli::Y => [z, -i, i, z],
            Pauli::Z => [o, z, z, -o],
        };
        CMatrix::from_row_slice(2, 2, &e)
    }
}

/// A dense operator together with the electron-axis tag of its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub axis: ElectronAxis,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix, axis: ElectronAxis) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() {
            return Err(invalid("operator", format!("non-square {}x{}", n, entries.ncols())));
        }
        if !n.is_power_of_two() || n < 2 {
            return Err(invalid("operator", format!("dimension {n} is not a power of two")));
        }
        Ok(Self { entries, axis })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermitian_defect(&self.entries) < tol
    }

    /// The same operator written with the electron factor in `axis`.
    pub fn in_axis(&self, axis: ElectronAxis) -> Self {
        if axis == self.axis {
            return self.clone();
        }
        Self {
            entries: change_electron_basis(&self.entries),
            axis,
        }
    }
}

/// `max |M - M^dagger|` over all entries.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Kronecker product of a list of factors, leftmost first.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut it = factors.iter();
    let first = it.next().cloned().unwrap_or_else(|| CMatrix::identity(1, 1));
    it.fold(first, |acc, f| acc.kronecker(f))
}

/// Spin-1/2 operator `sigma/2` acting on `site` (0 = electron) of an `n_spins` register.
pub fn spin_op(p: Pauli, site: usize, n_spins: usize) -> CMatrix {
    pauli_op(p, site, n_spins) * Complex64::new(0.5, 0.0)
}

/// Pauli operator acting on `site` of an `n_spins` register.
pub fn pauli_op(p: Pauli, site: usize, n_spins: usize) -> CMatrix {
    assert!(site < n_spins, "site {site} out of range for {n_spins} spins");
    let factors: Vec<CMatrix> = (0..n_spins)
        .map(|s| if s == site { p.matrix() } else { Pauli::I.matrix() })
        .collect();
    kron_all(&factors)
}

/// Product of two single-site spin operators on distinct sites.
pub fn spin_pair(p: Pauli, a: usize, q: Pauli, b: usize, n_spins: usize) -> CMatrix {
    assert!(a != b && a < n_spins && b < n_spins);
    let factors: Vec<CMatrix> = (0..n_spins)
        .map(|s| {
            if s == a {
                p.matrix() * Complex64::new(0.5, 0.0)
            } else if s == b {
                q.matrix() * Complex64::new(0.5, 0.0)
            } else {
                Pauli::I.matrix()
            }
        })
        .collect();
    kron_all(&factors)
}

/// Conjugates by a Hadamard on the electron factor. The map is its own inverse,
/// so it converts Z-basis matrices to X-basis ones and back.
pub fn change_electron_basis(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let half = n / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_fn(n, n, |i, j| {
        if i % half != j % half {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if i >= half && j >= half { -1.0 } else { 1.0 };
        Complex64::new(sign * s, 0.0)
    });
    &h * m * &h
}

/// Hermitian eigendecomposition. Eigenvalues are real, eigenvectors are columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `exp(-i H dt)` for Hermitian `H`, through its eigendecomposition.
pub fn unitary_step(h: &CMatrix, dt: f64) -> CMatrix {
    let n = h.nrows();
    if n == 2 {
        return unitary_step_2x2(h, dt);
    }
    let (vals, vecs) = hermitian_eigen(h);
    let mut scaled = vecs.clone();
    for (j, lam) in vals.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lam * dt);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * vecs.adjoint()
}

/// Closed form for a single spin: `H = h0 I + h . sigma`.
fn unitary_step_2x2(h: &CMatrix, dt: f64) -> CMatrix {
    let h0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let hz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let hx = h[(1, 0)].re;
    let hy = h[(1, 0)].im;
    let norm = (hx * hx + hy * hy + hz * hz).sqrt();
    let global = Complex64::from_polar(1.0, -h0 * dt);
    let (c, s) = ((norm * dt).cos(), (norm * dt).sin());
    let i = Complex64::new(0.0, 1.0);
    if norm == 0.0 {
        return CMatrix::identity(2, 2) * global;
    }
    let (nx, ny, nz) = (hx / norm, hy / norm, hz / norm);
    // exp(-i theta n.sigma) = cos theta - i sin theta n.sigma
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0) - i * s * nz,
            -i * s * Complex64::new(nx, -ny),
            -i * s * Complex64::new(nx, ny),
            Complex64::new(c, 0.0) + i * s * nz,
        ],
    );
    m * global
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
