//! Density matrices, partial trace and Uhlmann fidelity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::state::PureState;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A Hermitian, unit-trace, positive-semidefinite operator over one or
/// two qubits.
///
/// Eigenvalues in `[−1e-10, 0)` are treated as numerical roundoff and
/// clipped to zero wherever a matrix function is evaluated; anything
/// below that floor is rejected at construction.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Builds a density matrix from row-major entries, enforcing
    /// Hermiticity (1e-12), unit trace (1e-12) and eigenvalues above
    /// `−1e-10`. The stored matrix is symmetrised and trace-normalised.
    pub fn new(qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        if qubits != 1 && qubits != 2 {
            return Err(Error::invalid(format!(
                "qubit count must be 1 or 2, got {qubits}"
            )));
        }
        let dim = 1 << qubits;
        if entries.len() != dim * dim {
            return Err(Error::shape(format!(
                "expected {} entries for a {qubits}-qubit density matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::invalid(
                "density matrix entries must be finite".to_string(),
            ));
        }
        for r in 0..dim {
            for c in 0..dim {
                let delta = (entries[r * dim + c] - entries[c * dim + r].conj()).norm();
                if delta > HERMITICITY_TOL {
                    return Err(Error::invalid(format!(
                        "matrix is not Hermitian (deviation {delta:e})"
                    )));
                }
            }
        }
        let trace: f64 = (0..dim).map(|i| entries[i * dim + i].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid(format!("trace is {trace}, expected 1")));
        }
        // Symmetrise and renormalise so downstream math sees an exactly
        // Hermitian, unit-trace operator.
        let mut sym = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                sym[r * dim + c] =
                    (entries[r * dim + c] + entries[c * dim + r].conj()) / 2.0 / trace;
            }
        }
        let rho = Self {
            qubits,
            entries: sym,
        };
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState) -> Self {
        let dim = state.dim();
        let amps = state.amplitudes();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Self {
            qubits: state.qubit_count(),
            entries,
        }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(qubits: usize) -> Self {
        assert!(qubits == 1 || qubits == 2);
        let dim = 1 << qubits;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self { qubits, entries }
    }

    /// Diagonal density matrix from a classical distribution.
    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        let dim = populations.len();
        let qubits = match dim {
            2 => 1,
            4 => 2,
            _ => return Err(Error::shape("diagonal length must be 2 or 4".to_string())),
        };
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for (i, &p) in populations.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(p, 0.0);
        }
        Self::new(qubits, entries)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i).re).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self.entry(r, c) * self.entry(c, r)).re;
            }
        }
        acc
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = to_na(&self.entries, self.dim()).symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// `Re tr(M·ρ)` for a Hermitian operator given as row-major entries.
    pub fn expectation(&self, op: &[Complex64]) -> f64 {
        let n = self.dim();
        assert_eq!(op.len(), n * n, "operator dimension mismatch");
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (op[r * n + c] * self.entry(c, r)).re;
            }
        }
        acc
    }

    /// Bloch vector `(x, y, z)` of a one-qubit state.
    pub fn bloch_vector(&self) -> [f64; 3] {
        assert_eq!(self.qubits, 1, "bloch_vector requires a 1-qubit state");
        let x = 2.0 * self.entry(0, 1).re;
        let y = 2.0 * self.entry(1, 0).im;
        let z = self.entry(0, 0).re - self.entry(1, 1).re;
        [x, y, z]
    }

    /// Largest elementwise deviation from another density matrix.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.qubits, other.qubits);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Traces out one qubit of a two-qubit state, keeping `keep` (0 = signal,
/// 1 = target). Trace and Hermiticity are preserved.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    if rho.qubit_count() != 2 {
        return Err(Error::shape(
            "partial_trace requires a 2-qubit density matrix".to_string(),
        ));
    }
    if keep > 1 {
        return Err(Error::QubitIndexOutOfRange {
            index: keep,
            qubits: 2,
        });
    }
    let mut entries = vec![Complex64::ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::ZERO;
            for t in 0..2 {
                let (r, c) = if keep == 1 {
                    // Sum over the signal qubit (MSB).
                    (t * 2 + i, t * 2 + j)
                } else {
                    // Sum over the target qubit (LSB).
                    (i * 2 + t, j * 2 + t)
                };
                acc += rho.entry(r, c);
            }
            entries[i * 2 + j] = acc;
        }
    }
    DensityMatrix::new(1, entries)
}

/// Uhlmann fidelity `F(ρ, σ) = [tr √(√ρ · σ · √ρ)]²`, clamped to `[0, 1]`.
///
/// Matrix square roots are taken by Hermitian eigendecomposition with
/// eigenvalues in `[−1e-10, 0)` clipped to zero; inputs below that floor
/// cannot be constructed as [`DensityMatrix`] values.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.qubit_count() != sigma.qubit_count() {
        return Err(Error::shape(
            "fidelity requires equal-dimension density matrices".to_string(),
        ));
    }
    let dim = rho.dim();
    let sqrt_rho = hermitian_sqrt(&to_na(&rho.entries, dim));
    let inner = &sqrt_rho * to_na(&sigma.entries, dim) * &sqrt_rho;
    let eig = inner.symmetric_eigen();
    let trace_sqrt: f64 = clipped_sqrt_eigenvalues(eig.eigenvalues.as_slice())
        .into_iter()
        .sum();
    Ok((trace_sqrt * trace_sqrt).clamp(0.0, 1.0))
}

/// √λ with eigenvalues at roundoff scale zeroed: for rank-deficient
/// states the eigensolver returns ~1e-16 noise in the null space, and
/// √1e-16 = 1e-8 would otherwise dominate the error.
fn clipped_sqrt_eigenvalues(eigenvalues: &[f64]) -> Vec<f64> {
    let largest = eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let floor = 1e-14 * largest.max(1e-300);
    eigenvalues
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .collect()
}

fn to_na(entries: &[Complex64], dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(dim, dim, entries)
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = m.clone().symmetric_eigen();
    let sqrt_vals = clipped_sqrt_eigenvalues(eig.eigenvalues.as_slice());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &s) in sqrt_vals.iter().enumerate() {
        for i in 0..m.nrows() {
            scaled[(i, j)] *= Complex64::new(s, 0.0);
        }
    }
    &scaled * v.adjoint()
}
