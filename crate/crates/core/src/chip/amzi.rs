//! AMZI transfer matrices and the post-selected coincidence law.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::UnitaryMatrix;

/// Which photon of the pair traverses the AMZI. The free spectral range
/// is twice the pair's wavelength difference, so the two photons see arm
/// phases that differ by π.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Photon {
    Signal,
    Idler,
}

/// Input port of the AMZI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryPort {
    A,
    B,
}

/// Transfer matrix of the AMZI at heater phase `phi`, including the
/// global phase prefactor:
///
/// ```text
/// U_s = e^{i(φ+π)/2}  [[ sin(φ/2),  cos(φ/2)], [cos(φ/2), −sin(φ/2)]]
/// U_i = e^{i(φ+2π)/2} [[ cos(φ/2),  sin(φ/2)], [sin(φ/2), −cos(φ/2)]]
/// ```
pub fn amzi_transfer(phi: f64, photon: Photon) -> Result<UnitaryMatrix> {
    if !phi.is_finite() {
        return Err(Error::invalid(format!(
            "AMZI phase must be finite, got {phi}"
        )));
    }
    let (s, c) = (phi / 2.0).sin_cos();
    let (prefactor, m) = match photon {
        Photon::Signal => (
            Complex64::from_polar(1.0, (phi + std::f64::consts::PI) / 2.0),
            [s, c, c, -s],
        ),
        Photon::Idler => (
            Complex64::from_polar(1.0, (phi + 2.0 * std::f64::consts::PI) / 2.0),
            [c, s, s, -c],
        ),
    };
    let entries = m.iter().map(|&x| prefactor * x).collect();
    Ok(UnitaryMatrix::new_unchecked(2, entries))
}

/// Coincidence rate `C(φ) = c_max·sin⁴(φ/2)`, maximal when signal and
/// idler are deterministically separated.
pub fn coincidence_rate(phi: f64, c_max: f64) -> Result<f64> {
    if !(c_max >= 0.0) {
        return Err(Error::invalid(format!(
            "maximum coincidence rate must be non-negative, got {c_max}"
        )));
    }
    Ok(c_max * (phi / 2.0).sin().powi(4))
}

/// Coincidence success probability derived from the transfer matrices
/// rather than the closed form: both photons enter the given port, the
/// `c_s†·d_i†` term is post-selected, and its squared amplitude returned.
/// Equals `sin⁴(φ/2)` for port a and `cos⁴(φ/2)` for port b.
pub fn derive_coincidence_from_state(phi: f64, port: EntryPort) -> f64 {
    let us = amzi_transfer(phi, Photon::Signal).expect("finite phase");
    let ui = amzi_transfer(phi, Photon::Idler).expect("finite phase");
    let input = match port {
        EntryPort::A => 0,
        EntryPort::B => 1,
    };
    // a†_j → Σ_k U_{kj}·m†_k; keep signal in output c (row 0) and idler
    // in output d (row 1).
    let amplitude = us.get(0, input) * ui.get(1, input);
    amplitude.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;
    use std::f64::consts::PI;

    #[test]
    fn signal_at_pi_is_fully_bar() {
        let u = amzi_transfer(PI, Photon::Signal).unwrap();
        assert!(u.get(0, 1).norm() < 1e-15);
        assert!(u.get(1, 0).norm() < 1e-15);
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-15);
        assert!((u.get(1, 1).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn idler_at_zero_is_diagonal_dominant() {
        let u = amzi_transfer(0.0, Photon::Idler).unwrap();
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-15);
        assert!(u.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn transfer_matrices_are_unitary() {
        let mut rng = seeded(41);
        for _ in 0..200 {
            let phi = rng.random_range(-2.0 * PI..2.0 * PI);
            assert!(
                amzi_transfer(phi, Photon::Signal)
                    .unwrap()
                    .unitarity_error()
                    < 1e-12
            );
            assert!(amzi_transfer(phi, Photon::Idler).unwrap().unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn idler_shifted_by_pi_is_z_conjugate_of_signal() {
        // Substituting φ → φ+π in the idler matrix reproduces the signal
        // matrix exactly up to conjugation by Z = diag(1, −1); in
        // particular the two agree elementwise in magnitude, which is
        // what the post-selected coincidence law sees.
        let mut rng = seeded(42);
        for _ in 0..100 {
            let phi = rng.random_range(-2.0 * PI..2.0 * PI);
            let us = amzi_transfer(phi, Photon::Signal).unwrap();
            let ui = amzi_transfer(phi + PI, Photon::Idler).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    let sign = if r == c { 1.0 } else { -1.0 };
                    assert!((ui.get(r, c) - us.get(r, c) * sign).norm() < 1e-12);
                    assert!((ui.get(r, c).norm() - us.get(r, c).norm()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coincidence_rate_examples() {
        assert_eq!(coincidence_rate(0.0, 3000.0).unwrap(), 0.0);
        assert!((coincidence_rate(PI, 3000.0).unwrap() - 3000.0).abs() < 1e-9);
        // sin⁴(π/4) = 1/4.
        assert!((coincidence_rate(PI / 2.0, 3000.0).unwrap() - 750.0).abs() < 1e-9);
        assert!(coincidence_rate(0.3, -1.0).is_err());
    }

    #[test]
    fn derived_coincidence_examples() {
        assert!((derive_coincidence_from_state(PI, EntryPort::A) - 1.0).abs() < 1e-12);
        assert!((derive_coincidence_from_state(0.0, EntryPort::B) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_coincidence_matches_closed_form() {
        let mut rng = seeded(43);
        for _ in 0..100 {
            let phi = rng.random_range(-2.0 * PI..2.0 * PI);
            let derived = derive_coincidence_from_state(phi, EntryPort::A);
            let closed = coincidence_rate(phi, 1.0).unwrap();
            assert!((derived - closed).abs() < 1e-12);
            let derived_b = derive_coincidence_from_state(phi, EntryPort::B);
            assert!((derived_b - (phi / 2.0).cos().powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn derived_coincidence_matches_on_dense_grid() {
        // 10⁻³ grid over [0, 2π].
        let steps = (2.0 * PI / 1e-3) as usize;
        for k in 0..=steps {
            let phi = k as f64 * 1e-3;
            let derived = derive_coincidence_from_state(phi, EntryPort::A);
            assert!((derived - (phi / 2.0).sin().powi(4)).abs() < 1e-12);
        }
    }
}
