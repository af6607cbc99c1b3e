//! Single-qubit quantum state tomography: Pauli-basis measurement,
//! linear reconstruction and projection onto the physical set.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quantum::{fidelity, sample_counts, DensityMatrix, ProbVector};
use crate::rng::SimRng;

/// Measurement basis for a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    /// Row-major entries of the Pauli operator.
    pub fn operator(self) -> [Complex64; 4] {
        match self {
            PauliBasis::X => [
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ONE,
                Complex64::ZERO,
            ],
            PauliBasis::Y => [
                Complex64::ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::ZERO,
            ],
            PauliBasis::Z => [
                Complex64::ONE,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(-1.0, 0.0),
            ],
        }
    }
}

/// Measurement budget: exact expectation values or a finite number of
/// shots per basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

/// Pauli expectation values `⟨X⟩, ⟨Y⟩, ⟨Z⟩` of one qubit. Shot noise may
/// push components slightly outside `[−1, 1]`; reconstruction projects
/// that away.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
pub struct PauliExpectations {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Expectation value `tr(σ_basis·ρ)`, exactly or estimated from
/// `(n₊ − n₋)/shots` over sampled outcomes.
pub fn measure_expectation(
    rho: &DensityMatrix,
    basis: PauliBasis,
    shots: Shots,
    rng: &mut SimRng,
) -> f64 {
    assert_eq!(rho.qubit_count(), 1, "tomography measures one qubit");
    let exact = rho.expectation(&basis.operator());
    match shots {
        Shots::Exact => exact,
        Shots::Finite(0) => 0.0,
        Shots::Finite(n) => {
            let p_plus = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
            let p =
                ProbVector::new(vec![p_plus, 1.0 - p_plus]).expect("valid binomial distribution");
            let counts = sample_counts(&p, n, rng);
            (counts[0] as f64 - counts[1] as f64) / n as f64
        }
    }
}

/// Measures all three Pauli expectations of a one-qubit state.
pub fn measure_all(rho: &DensityMatrix, shots: Shots, rng: &mut SimRng) -> PauliExpectations {
    PauliExpectations {
        x: measure_expectation(rho, PauliBasis::X, shots, rng),
        y: measure_expectation(rho, PauliBasis::Y, shots, rng),
        z: measure_expectation(rho, PauliBasis::Z, shots, rng),
    }
}

/// Linear reconstruction `ρ = (I + xσ_x + yσ_y + zσ_z)/2`, with the Bloch
/// vector clipped to unit norm (`r → r/max(1, ‖r‖)`) so the output is
/// always physical.
pub fn reconstruct(expectations: &PauliExpectations) -> Result<DensityMatrix> {
    let raw = [expectations.x, expectations.y, expectations.z];
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(crate::error::Error::invalid(
            "Pauli expectations must be finite".to_string(),
        ));
    }
    let norm = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
    let scale = 1.0 / norm.max(1.0);
    let [x, y, z] = [raw[0] * scale, raw[1] * scale, raw[2] * scale];
    let entries = vec![
        Complex64::new((1.0 + z) / 2.0, 0.0),
        Complex64::new(x / 2.0, -y / 2.0),
        Complex64::new(x / 2.0, y / 2.0),
        Complex64::new((1.0 - z) / 2.0, 0.0),
    ];
    DensityMatrix::new(1, entries)
}

/// Measures all three bases, reconstructs, and returns the fidelity of
/// the reconstruction against the input state.
pub fn tomography_roundtrip(rho: &DensityMatrix, shots: Shots, rng: &mut SimRng) -> Result<f64> {
    let reconstruction = reconstruct(&measure_all(rho, shots, rng))?;
    fidelity(rho, &reconstruction)
}

/// Two-qubit Pauli operator `σ_a ⊗ σ_b` (identity where `None`),
/// row-major.
fn two_qubit_operator(a: Option<PauliBasis>, b: Option<PauliBasis>) -> [Complex64; 16] {
    let identity = [
        Complex64::ONE,
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::ONE,
    ];
    let left = a.map_or(identity, PauliBasis::operator);
    let right = b.map_or(identity, PauliBasis::operator);
    let mut out = [Complex64::ZERO; 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(i * 2 + k) * 4 + (j * 2 + l)] = left[i * 2 + j] * right[k * 2 + l];
                }
            }
        }
    }
    out
}

/// The 15 two-qubit Pauli expectations `⟨σ_a ⊗ σ_b⟩` with `(a, b)`
/// running over `{I, X, Y, Z}²` minus the identity pair, in row-major
/// `(a, b)` order. Exact expectations only; this reconstruction is an
/// optional extra beyond the single-qubit workflow.
pub fn measure_two_qubit(rho: &DensityMatrix) -> Vec<f64> {
    assert_eq!(
        rho.qubit_count(),
        2,
        "two-qubit tomography needs a 2-qubit state"
    );
    let axes = [
        None,
        Some(PauliBasis::X),
        Some(PauliBasis::Y),
        Some(PauliBasis::Z),
    ];
    let mut out = Vec::with_capacity(15);
    for (i, &a) in axes.iter().enumerate() {
        for (j, &b) in axes.iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            out.push(rho.expectation(&two_qubit_operator(a, b)));
        }
    }
    out
}

/// Linear two-qubit reconstruction
/// `ρ = (I⊗I + Σ c_ab·σ_a⊗σ_b)/4`, projected onto the physical set by
/// clipping negative eigenvalues to zero and renormalising the trace.
pub fn reconstruct_two_qubit(expectations: &[f64]) -> Result<DensityMatrix> {
    if expectations.len() != 15 {
        return Err(crate::error::Error::shape(format!(
            "two-qubit tomography takes 15 Pauli expectations, got {}",
            expectations.len()
        )));
    }
    if expectations.iter().any(|v| !v.is_finite()) {
        return Err(crate::error::Error::invalid(
            "Pauli expectations must be finite".to_string(),
        ));
    }
    let axes = [
        None,
        Some(PauliBasis::X),
        Some(PauliBasis::Y),
        Some(PauliBasis::Z),
    ];
    let mut entries = vec![Complex64::ZERO; 16];
    for d in 0..4 {
        entries[d * 4 + d] = Complex64::new(0.25, 0.0);
    }
    let mut index = 0;
    for (i, &a) in axes.iter().enumerate() {
        for (j, &b) in axes.iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            let op = two_qubit_operator(a, b);
            let c = expectations[index];
            index += 1;
            for (e, o) in entries.iter_mut().zip(op.iter()) {
                *e += o * (c / 4.0);
            }
        }
    }
    // Eigenvalue clipping + renormalisation.
    let raw = nalgebra::DMatrix::from_row_slice(4, 4, &entries);
    let hermitian = (raw.clone() + raw.adjoint()) / Complex64::new(2.0, 0.0);
    let eig = hermitian.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(crate::error::Error::invalid(
            "reconstruction collapsed to the zero operator".to_string(),
        ));
    }
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &l) in clipped.iter().enumerate() {
        for i in 0..4 {
            scaled[(i, j)] *= Complex64::new(l / total, 0.0);
        }
    }
    let projected = &scaled * v.adjoint();
    DensityMatrix::new(2, projected.transpose().as_slice().to_vec())
}

/// JSON export of a density matrix as separate real and imaginary parts,
/// row-major.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DensityMatrixJson {
    pub qubits: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for DensityMatrixJson {
    fn from(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let re = (0..n)
            .map(|r| (0..n).map(|c| rho.entry(r, c).re).collect())
            .collect();
        let im = (0..n)
            .map(|r| (0..n).map(|c| rho.entry(r, c).im).collect())
            .collect();
        Self {
            qubits: rho.qubit_count(),
            re,
            im,
        }
    }
}

impl DensityMatrixJson {
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let n = 1usize << self.qubits;
        if self.re.len() != n || self.im.len() != n {
            return Err(crate::error::Error::shape(
                "density matrix JSON has wrong row count".to_string(),
            ));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (re_row, im_row) in self.re.iter().zip(&self.im) {
            if re_row.len() != n || im_row.len() != n {
                return Err(crate::error::Error::shape(
                    "density matrix JSON has wrong column count".to_string(),
                ));
            }
            for (re, im) in re_row.iter().zip(im_row) {
                entries.push(Complex64::new(*re, *im));
            }
        }
        DensityMatrix::new(self.qubits, entries)
    }
}
