//! Pure states over one or two qubits.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::prob::ProbVector;
use super::unitary::UnitaryMatrix;

const NORM_TOL: f64 = 1e-9;

/// A normalised complex amplitude vector over the computational basis.
///
/// The signal (control) qubit is the most significant bit of the basis
/// index: a two-qubit state is `[|00⟩, |01⟩, |10⟩, |11⟩]`.
#[derive(Clone, Debug)]
pub struct PureState {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from amplitudes, which must be normalised to within
    /// `1e-9`; the stored amplitudes are renormalised exactly.
    pub fn new(qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if qubits != 1 && qubits != 2 {
            return Err(Error::invalid(format!(
                "qubit count must be 1 or 2, got {qubits}"
            )));
        }
        if amps.len() != 1 << qubits {
            return Err(Error::shape(format!(
                "expected {} amplitudes for {qubits} qubit(s), got {}",
                1 << qubits,
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "amplitudes are not normalised (norm = {norm})"
            )));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { qubits, amps })
    }

    /// The all-zeros computational basis state.
    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(qubits: usize, index: usize) -> Self {
        assert!(qubits == 1 || qubits == 2);
        assert!(index < (1 << qubits));
        let mut amps = vec![Complex64::ZERO; 1 << qubits];
        amps[index] = Complex64::ONE;
        Self { qubits, amps }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a unitary of matching dimension to the whole register.
    pub fn apply(&self, u: &UnitaryMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::shape(format!(
                "cannot apply a {}x{} unitary to a {}-dimensional state",
                u.dim(),
                u.dim(),
                self.dim()
            )));
        }
        let n = self.dim();
        let mut amps = vec![Complex64::ZERO; n];
        for (r, amp) in amps.iter_mut().enumerate() {
            for c in 0..n {
                *amp += u.get(r, c) * self.amps[c];
            }
        }
        Ok(Self {
            qubits: self.qubits,
            amps,
        })
    }

    /// Born-rule probabilities `pᵢ = |aᵢ|²`.
    pub fn probabilities(&self) -> ProbVector {
        ProbVector::new(self.amps.iter().map(|a| a.norm_sqr()).collect())
            .expect("squared amplitudes of a normalised state form a probability vector")
    }

    /// Compares two states ignoring global phase: each state is rescaled
    /// so that its first amplitude of non-negligible magnitude is real
    /// and positive before the elementwise comparison.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.qubits != other.qubits {
            return false;
        }
        let canon = |s: &Self| -> Vec<Complex64> {
            let pivot = s.amps.iter().find(|a| a.norm() > 1e-12);
            match pivot {
                Some(p) => {
                    let unit = Complex64::from_polar(1.0, -p.arg());
                    s.amps.iter().map(|a| a * unit).collect()
                }
                None => s.amps.clone(),
            }
        };
        canon(self)
            .iter()
            .zip(canon(other).iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Applies a single-qubit gate to one qubit of a register.
///
/// Qubit 0 is the signal/control (most significant bit); for a two-qubit
/// state this is `gate ⊗ I` for qubit 0 and `I ⊗ gate` for qubit 1.
pub fn apply_single(state: &PureState, gate: &UnitaryMatrix, qubit: usize) -> Result<PureState> {
    if gate.dim() != 2 {
        return Err(Error::shape(format!(
            "apply_single requires a 2x2 gate, got {}x{}",
            gate.dim(),
            gate.dim()
        )));
    }
    if qubit >= state.qubit_count() {
        return Err(Error::QubitIndexOutOfRange {
            index: qubit,
            qubits: state.qubit_count(),
        });
    }
    if state.qubit_count() == 1 {
        return state.apply(gate);
    }
    // Stride over the untouched qubit: qubit 0 pairs indices (t, t+2),
    // qubit 1 pairs (2s, 2s+1).
    let mut amps = state.amplitudes().to_vec();
    let (pairs, stride): ([usize; 2], usize) = if qubit == 0 { ([0, 1], 2) } else { ([0, 2], 1) };
    for base in pairs {
        let i0 = base;
        let i1 = base + stride;
        let a0 = amps[i0];
        let a1 = amps[i1];
        amps[i0] = gate.get(0, 0) * a0 + gate.get(0, 1) * a1;
        amps[i1] = gate.get(1, 0) * a0 + gate.get(1, 1) * a1;
    }
    Ok(PureState { qubits: 2, amps })
}

/// Applies `V` to the target qubit when the control is `|0⟩` and `U` when
/// it is `|1⟩`: the block-diagonal two-qubit unitary `diag(V, U)`.
pub fn controlled_pair(
    state: &PureState,
    v: &UnitaryMatrix,
    u: &UnitaryMatrix,
) -> Result<PureState> {
    if state.qubit_count() != 2 {
        return Err(Error::shape(
            "controlled_pair requires a 2-qubit state".to_string(),
        ));
    }
    if v.dim() != 2 || u.dim() != 2 {
        return Err(Error::shape(
            "controlled_pair requires 2x2 branch unitaries".to_string(),
        ));
    }
    let mut entries = vec![Complex64::ZERO; 16];
    for r in 0..2 {
        for c in 0..2 {
            entries[r * 4 + c] = v.get(r, c);
            entries[(r + 2) * 4 + (c + 2)] = u.get(r, c);
        }
    }
    state.apply(&UnitaryMatrix::new_unchecked(4, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{hadamard, ry, rz, su2};
    use crate::rng::seeded;
    use rand::Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn random_state(rng: &mut crate::rng::SimRng, qubits: usize) -> PureState {
        let n = 1 << qubits;
        let raw: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        PureState::new(qubits, raw.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    fn random_su2(rng: &mut crate::rng::SimRng) -> UnitaryMatrix {
        su2(
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
        )
        .unwrap()
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let mut rng = seeded(1);
        let s = random_state(&mut rng, 2);
        let out = apply_single(&s, &UnitaryMatrix::identity(2), 1).unwrap();
        for (a, b) in s.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let s = apply_single(&PureState::zero(1), &hadamard(), 0).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn double_flip_restores_state_up_to_phase() {
        let mut rng = seeded(2);
        let s = random_state(&mut rng, 2);
        let x = ry(PI).unwrap();
        let once = apply_single(&s, &x, 0).unwrap();
        let twice = apply_single(&once, &x, 0).unwrap();
        assert!(twice.approx_eq_up_to_phase(&s, 1e-12));
    }

    #[test]
    fn qubit_index_out_of_range() {
        let s = PureState::zero(1);
        assert!(apply_single(&s, &hadamard(), 1).is_err());
    }

    #[test]
    fn controlled_pair_identity_branches() {
        let mut rng = seeded(3);
        let s = random_state(&mut rng, 2);
        let out =
            controlled_pair(&s, &UnitaryMatrix::identity(2), &UnitaryMatrix::identity(2)).unwrap();
        assert!(out.approx_eq_up_to_phase(&s, 1e-12));
    }

    #[test]
    fn controlled_flip_builds_bell_state() {
        // (|00⟩+|10⟩)/√2 with V=I, U=X → (|00⟩+|11⟩)/√2.
        let s = PureState::new(
            2,
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::ZERO,
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::ZERO,
            ],
        )
        .unwrap();
        let x = ry(PI).unwrap();
        let out = controlled_pair(&s, &UnitaryMatrix::identity(2), &x).unwrap();
        let bell = PureState::new(
            2,
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        assert!(out.approx_eq_up_to_phase(&bell, 1e-12));
    }

    #[test]
    fn controlled_pair_matches_block_matrix_oracle() {
        // Oracle: assemble the 4×4 block matrix by hand and multiply.
        let mut rng = seeded(4);
        for _ in 0..100 {
            let s = random_state(&mut rng, 2);
            let v = random_su2(&mut rng);
            let u = random_su2(&mut rng);
            let out = controlled_pair(&s, &v, &u).unwrap();

            let mut expected = [Complex64::ZERO; 4];
            let a = s.amplitudes();
            for r in 0..2 {
                for c in 0..2 {
                    expected[r] += v.get(r, c) * a[c];
                    expected[r + 2] += u.get(r, c) * a[c + 2];
                }
            }
            for (got, want) in out.amplitudes().iter().zip(expected.iter()) {
                assert!((got - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn born_probabilities_examples() {
        let p = PureState::basis(2, 0).probabilities();
        assert_eq!(p.values(), &[1.0, 0.0, 0.0, 0.0]);

        let bell = PureState::new(
            2,
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let p = bell.probabilities();
        assert!((p.values()[0] - 0.5).abs() < 1e-15);
        assert!((p.values()[3] - 0.5).abs() < 1e-15);

        let amps: Vec<Complex64> = [0.1f64, 0.2, 0.3, 0.4]
            .iter()
            .map(|p| Complex64::new(p.sqrt(), 0.0))
            .collect();
        let s = PureState::new(2, amps).unwrap();
        for (got, want) in s.probabilities().values().iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_preserves_norm() {
        let mut rng = seeded(5);
        for _ in 0..200 {
            let s = random_state(&mut rng, 2);
            let g = random_su2(&mut rng);
            let qubit = rng.random_range(0..2);
            let out = apply_single(&s, &g, qubit).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
            let p = out.probabilities();
            assert!((p.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalised_amplitudes_rejected() {
        let amps = vec![Complex64::ONE, Complex64::ONE];
        assert!(PureState::new(1, amps).is_err());
    }

    #[test]
    fn rz_on_control_commutes_with_controlled_pair() {
        // The source relative phase and the first post-circuit shifter on
        // the signal qubit are the same physical degree of freedom.
        let mut rng = seeded(6);
        for _ in 0..50 {
            let s = random_state(&mut rng, 2);
            let v = random_su2(&mut rng);
            let u = random_su2(&mut rng);
            let phase = rz(rng.random_range(-PI..PI)).unwrap();
            let a = apply_single(&controlled_pair(&s, &v, &u).unwrap(), &phase, 0).unwrap();
            let b = controlled_pair(&apply_single(&s, &phase, 0).unwrap(), &v, &u).unwrap();
            assert!(a.approx_eq_up_to_phase(&b, 1e-12));
        }
    }
}
