//! Unitary matrices and single-qubit gate constructors.

use num_complex::Complex64;

use crate::error::{Error, Result};

const UNITARITY_TOL: f64 = 1e-12;

/// A dense unitary matrix of dimension 2 (one qubit) or 4 (two qubits),
/// stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Builds a matrix from row-major entries, verifying `U·U† = I` to
    /// within `1e-12` elementwise.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::invalid(format!(
                "unitary dimension must be 2 or 4, got {dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::shape(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let u = Self { dim, entries };
        let err = u.unitarity_error();
        if !(err <= UNITARITY_TOL) {
            return Err(Error::invalid(format!(
                "matrix is not unitary (max |UU† − I| = {err:e})"
            )));
        }
        Ok(u)
    }

    pub(crate) fn new_unchecked(dim: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::ONE;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        Self { dim: n, entries }
    }

    /// Multiplies every entry by `e^{i·phase}`.
    pub fn scaled_by_phase(&self, phase: f64) -> Self {
        let factor = Complex64::from_polar(1.0, phase);
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Largest elementwise deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let mut s = Complex64::ZERO;
                for k in 0..n {
                    s += self.entries[r * n + k] * self.entries[c * n + k].conj();
                }
                let expected = if r == c {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                worst = worst.max((s - expected).norm());
            }
        }
        worst
    }

    /// Frobenius norm of the difference `self − other`.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance of `self` to `e^{iγ}·other` minimised over the
    /// global phase γ.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        // tr(other† · self) points along e^{iγ} at the optimum.
        let n = self.dim;
        let mut overlap = Complex64::ZERO;
        for r in 0..n {
            for c in 0..n {
                overlap += other.entries[r * n + c].conj() * self.entries[r * n + c];
            }
        }
        if overlap.norm() < 1e-300 {
            return self.frobenius_distance(other);
        }
        let phase = overlap.arg();
        self.frobenius_distance(&other.scaled_by_phase(phase))
    }

    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.distance_up_to_phase(other) <= tol
    }
}

impl std::ops::Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * rhs.entries[k * n + c];
                }
            }
        }
        UnitaryMatrix { dim: n, entries }
    }
}

fn check_finite_angle(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "rotation angle must be finite, got {theta}"
        )))
    }
}

/// `R_y(θ) = [[cos(θ/2), −sin(θ/2)], [sin(θ/2), cos(θ/2)]]`.
pub fn ry(theta: f64) -> Result<UnitaryMatrix> {
    check_finite_angle(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(UnitaryMatrix::new_unchecked(
        2,
        vec![
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    ))
}

/// `R_z(θ) = diag(e^{−iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> Result<UnitaryMatrix> {
    check_finite_angle(theta)?;
    Ok(UnitaryMatrix::new_unchecked(
        2,
        vec![
            Complex64::from_polar(1.0, -theta / 2.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::from_polar(1.0, theta / 2.0),
        ],
    ))
}

/// The Hadamard gate.
pub fn hadamard() -> UnitaryMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryMatrix::new_unchecked(
        2,
        vec![
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ],
    )
}

/// `R_z(θ_z2)·R_y(θ_y)·R_z(θ_z1)` — any SU(2) transformation, with the
/// rightmost factor applied first.
pub fn su2(theta_z1: f64, theta_y: f64, theta_z2: f64) -> Result<UnitaryMatrix> {
    Ok(&(&rz(theta_z2)? * &ry(theta_y)?) * &rz(theta_z1)?)
}

/// Angles of a ZYZ factorisation `U = e^{i·phase}·R_z(z2)·R_y(y)·R_z(z1)`.
///
/// Convention: `y ∈ [0, π]`, `z1, z2 ∈ [−π, π)`; when `y` is 0 or π the
/// factorisation is degenerate and `z2` is fixed to 0.
#[derive(Clone, Copy, Debug)]
pub struct ZyzDecomposition {
    pub z1: f64,
    pub y: f64,
    pub z2: f64,
    pub phase: f64,
}

/// Wraps an angle into `[−π, π)`.
fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta.rem_euclid(two_pi);
    if t >= std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

/// Decomposes a 2×2 unitary into `e^{iφ}·R_z(z2)·R_y(y)·R_z(z1)`.
pub fn zyz_angles(u: &UnitaryMatrix) -> Result<ZyzDecomposition> {
    if u.dim() != 2 {
        return Err(Error::shape(
            "zyz decomposition requires a 2x2 matrix".to_string(),
        ));
    }
    let err = u.unitarity_error();
    if !(err <= 1e-9) {
        return Err(Error::invalid(format!(
            "zyz input is not unitary (max |UU† − I| = {err:e})"
        )));
    }
    // Reduce to SU(2): det(e^{−iγ}U) = 1 for γ = arg(det U)/2.
    let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
    let gamma = det.arg() / 2.0;
    let unit = Complex64::from_polar(1.0, -gamma);
    let a = unit * u.get(0, 0);
    let b = unit * u.get(1, 0);
    // In SU(2): a = cos(y/2)·e^{−i(z1+z2)/2}, b = sin(y/2)·e^{−i(z1−z2)/2}.
    let y = 2.0 * b.norm().atan2(a.norm());
    let (z1, z2) = if b.norm() < 1e-12 {
        (wrap_angle(-2.0 * a.arg()), 0.0)
    } else if a.norm() < 1e-12 {
        (wrap_angle(-2.0 * b.arg()), 0.0)
    } else {
        (
            wrap_angle(-(a.arg() + b.arg())),
            wrap_angle(b.arg() - a.arg()),
        )
    };
    // Angle wrapping may have flipped the sign of a factor; recover the
    // exact phase from the overlap with the reconstructed product.
    let product = su2(z1, y, z2)?;
    let mut overlap = Complex64::ZERO;
    for r in 0..2 {
        for c in 0..2 {
            overlap += product.get(r, c).conj() * u.get(r, c);
        }
    }
    Ok(ZyzDecomposition {
        z1,
        y,
        z2,
        phase: overlap.arg(),
    })
}
