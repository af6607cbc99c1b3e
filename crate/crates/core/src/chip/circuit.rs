//! Chip configuration, the amplitude-tunable entangled source, the full
//! equivalent circuit, and broken-shifter compensation.
//!
//! The physical-to-logical mapping of the 14 phase shifters is not
//! enumerated by the hardware's datasheet figure, so it is declared here
//! as a constant table (an assumption, kept auditable):
//!
//! | shifter | role |
//! |---------|------|
//! | θ1–θ3   | `V = R_z(θ3)·R_y(θ2)·R_z(θ1)` on the target when the control is `\|0⟩` |
//! | θ4–θ6   | `U = R_z(θ6)·R_y(θ5)·R_z(θ4)` on the target when the control is `\|1⟩` |
//! | θ7      | relative path phase `e^{iθ7}` on the U branch |
//! | θ8–θ10  | output chain on the signal qubit, `R_z(θ8)` first |
//! | θ11     | broken: applies a fixed unknown unitary, its set value is inert |
//! | θ12–θ14 | output chain on the idler qubit, `R_z(θ12)·R_y(θ13)·R_z(θ14)` |
//!
//! `R_z(θ8)` commutes with the controlled section, which is why the same
//! knob appears both as the entangled-source relative phase and as the
//! first signal output gate.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::quantum::{
    apply_single, controlled_pair, ry, rz, su2, zyz_angles, ProbVector, PureState, UnitaryMatrix,
};
use crate::rng::seeded;

use super::amzi::coincidence_rate;

/// Number of programmable phase shifters on the chip.
pub const SHIFTER_COUNT: usize = 14;

/// Index (1-based) of the broken phase shifter.
const BROKEN_INDEX: usize = 11;

/// Seed of the default broken-shifter unitary.
pub const DEFAULT_BROKEN_SEED: u64 = 0xB70C;

/// Default maximum coincidence rate per source, counts/s.
pub const DEFAULT_MAX_RATE: f64 = 3000.0;

/// Amplitudes `(α, β)` of the path-entangled source state
/// `α|0_s⟩|0_i⟩ + β|1_s⟩|1_i⟩`.
#[derive(Clone, Copy, Debug)]
pub struct SourceAmplitudes {
    alpha: Complex64,
    beta: Complex64,
}

impl SourceAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "source amplitudes are not normalised (|α|²+|β|² = {norm})"
            )));
        }
        let scale = norm.sqrt();
        Ok(Self {
            alpha: alpha / scale,
            beta: beta / scale,
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// The source rotation angle φ with `tan φ = |β|/|α|`, in `[0, π/2]`.
    pub fn rotation_angle(&self) -> f64 {
        self.beta.norm().atan2(self.alpha.norm())
    }
}

/// Entangled-source amplitudes for AMZI phases `(φ1, φ2)` and signal
/// phase `θ8`: with `Cᵢ = c_maxᵢ·sin⁴(φᵢ/2)` and `tan φ = √(C2/C1)`,
/// returns `α = e^{iθ8}·cos φ`, `β = sin φ`.
pub fn source_state(
    phi1: f64,
    phi2: f64,
    theta8: f64,
    c_max1: f64,
    c_max2: f64,
) -> Result<SourceAmplitudes> {
    if !theta8.is_finite() {
        return Err(Error::invalid("θ8 must be finite".to_string()));
    }
    let c1 = coincidence_rate(phi1, c_max1)?;
    let c2 = coincidence_rate(phi2, c_max2)?;
    if c1 <= 0.0 && c2 <= 0.0 {
        return Err(Error::invalid(
            "both sources are dark; no post-selected photons".to_string(),
        ));
    }
    let angle = c2.sqrt().atan2(c1.sqrt());
    let alpha = Complex64::from_polar(angle.cos(), theta8);
    let beta = Complex64::new(angle.sin(), 0.0);
    SourceAmplitudes::new(alpha, beta)
}

/// The broken phase shifter θ11: a fixed, unknown 2×2 unitary. Read-only
/// after construction.
#[derive(Clone, Debug)]
pub struct BrokenShifter {
    unitary: UnitaryMatrix,
}

impl BrokenShifter {
    /// A broken shifter stuck at a reproducible pseudo-random unitary.
    pub fn seeded(seed: u64) -> Self {
        let mut rng = seeded(seed);
        let z1 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let y = rng.random_range(0.0..std::f64::consts::PI);
        let z2 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let phase = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        Self {
            unitary: su2(z1, y, z2)
                .expect("finite angles")
                .scaled_by_phase(phase),
        }
    }

    /// A chip whose θ11 happens to be stuck at the identity.
    pub fn identity() -> Self {
        Self {
            unitary: UnitaryMatrix::identity(2),
        }
    }

    /// An arbitrary stuck unitary.
    pub fn from_unitary(unitary: UnitaryMatrix) -> Result<Self> {
        if unitary.dim() != 2 {
            return Err(Error::shape(
                "broken shifter unitary must be 2x2".to_string(),
            ));
        }
        Ok(Self { unitary })
    }

    pub fn index(&self) -> usize {
        BROKEN_INDEX
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }
}

impl Default for BrokenShifter {
    fn default() -> Self {
        Self::seeded(DEFAULT_BROKEN_SEED)
    }
}

/// The 14 shifter settings, the two AMZI phases, the per-source maximum
/// coincidence rates and the broken shifter that parameterise the chip.
#[derive(Clone, Debug)]
pub struct ChipConfiguration {
    amzi_phases: (f64, f64),
    shifter_phases: [f64; SHIFTER_COUNT],
    max_rates: (f64, f64),
    broken: BrokenShifter,
}

impl ChipConfiguration {
    pub fn new(
        amzi_phases: (f64, f64),
        shifter_phases: [f64; SHIFTER_COUNT],
        broken: BrokenShifter,
    ) -> Result<Self> {
        if !amzi_phases.0.is_finite() || !amzi_phases.1.is_finite() {
            return Err(Error::invalid("AMZI phases must be finite".to_string()));
        }
        if shifter_phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("shifter phases must be finite".to_string()));
        }
        Ok(Self {
            amzi_phases,
            shifter_phases,
            max_rates: (DEFAULT_MAX_RATE, DEFAULT_MAX_RATE),
            broken,
        })
    }

    pub fn with_max_rates(mut self, c_max1: f64, c_max2: f64) -> Result<Self> {
        if !(c_max1 >= 0.0) || !(c_max2 >= 0.0) {
            return Err(Error::invalid(
                "maximum coincidence rates must be non-negative".to_string(),
            ));
        }
        self.max_rates = (c_max1, c_max2);
        Ok(self)
    }

    pub fn amzi_phases(&self) -> (f64, f64) {
        self.amzi_phases
    }

    /// Shifter phase by 1-based index θ1..θ14. The value stored for the
    /// broken shifter θ11 is inert: the hardware applies its stuck
    /// unitary no matter what is programmed.
    pub fn shifter_phase(&self, index: usize) -> f64 {
        assert!(
            (1..=SHIFTER_COUNT).contains(&index),
            "shifter index out of range"
        );
        self.shifter_phases[index - 1]
    }

    pub fn set_shifter_phase(&mut self, index: usize, phase: f64) -> Result<()> {
        assert!(
            (1..=SHIFTER_COUNT).contains(&index),
            "shifter index out of range"
        );
        if !phase.is_finite() {
            return Err(Error::invalid("shifter phase must be finite".to_string()));
        }
        self.shifter_phases[index - 1] = phase;
        Ok(())
    }

    pub fn broken(&self) -> &BrokenShifter {
        &self.broken
    }

    pub fn max_rates(&self) -> (f64, f64) {
        self.max_rates
    }

    /// Post-selected coincidence rates `(C1, C2)` of the two sources.
    pub fn source_rates(&self) -> Result<(f64, f64)> {
        Ok((
            coincidence_rate(self.amzi_phases.0, self.max_rates.0)?,
            coincidence_rate(self.amzi_phases.1, self.max_rates.1)?,
        ))
    }

    fn v_unitary(&self) -> Result<UnitaryMatrix> {
        su2(
            self.shifter_phase(1),
            self.shifter_phase(2),
            self.shifter_phase(3),
        )
    }

    fn u_unitary(&self) -> Result<UnitaryMatrix> {
        Ok(su2(
            self.shifter_phase(4),
            self.shifter_phase(5),
            self.shifter_phase(6),
        )?
        .scaled_by_phase(self.shifter_phase(7)))
    }

    fn signal_output_chain(&self) -> Result<UnitaryMatrix> {
        // Physical order R_z(θ8), R_y(θ9), R_z(θ10), then the broken θ11.
        let chain = &(&rz(self.shifter_phase(10))? * &ry(self.shifter_phase(9))?)
            * &rz(self.shifter_phase(8))?;
        Ok(self.broken.unitary() * &chain)
    }

    fn idler_output_chain(&self) -> Result<UnitaryMatrix> {
        su2(
            self.shifter_phase(12),
            self.shifter_phase(13),
            self.shifter_phase(14),
        )
    }

    /// Runs the post-selected equivalent circuit: entangled source,
    /// controlled `V`/`U`, then the per-qubit output chains.
    pub fn prepare_state(&self) -> Result<PureState> {
        let (c1, c2) = self.source_rates()?;
        if c1 <= 0.0 && c2 <= 0.0 {
            return Err(Error::invalid(
                "both sources are dark; no post-selected photons".to_string(),
            ));
        }
        // cos φ·|00⟩ + sin φ·|11⟩ is R_y(2φ) on the signal followed by
        // the controlled flip inherent in the crossing; build it directly.
        let angle = c2.sqrt().atan2(c1.sqrt());
        let source = PureState::new(
            2,
            vec![
                Complex64::new(angle.cos(), 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(angle.sin(), 0.0),
            ],
        )?;
        let after_cu = controlled_pair(&source, &self.v_unitary()?, &self.u_unitary()?)?;
        let after_signal = apply_single(&after_cu, &self.signal_output_chain()?, 0)?;
        apply_single(&after_signal, &self.idler_output_chain()?, 1)
    }
}

impl Default for ChipConfiguration {
    /// Balanced sources, all shifters at zero, default broken unitary.
    fn default() -> Self {
        Self::new(
            (std::f64::consts::PI, std::f64::consts::PI),
            [0.0; SHIFTER_COUNT],
            BrokenShifter::default(),
        )
        .expect("finite defaults")
    }
}

/// Offsets `(θ8⁰, θ9⁰, θ10⁰)` cancelling a broken shifter:
/// `R_z(θ10⁰)·R_y(θ9⁰)·R_z(θ8⁰) = U_brok†` up to global phase, so the
/// full output chain collapses to the identity.
pub fn compensate_broken_shifter(u_brok: &UnitaryMatrix) -> Result<(f64, f64, f64)> {
    let d = zyz_angles(&u_brok.adjoint())?;
    Ok((d.z1, d.y, d.z2))
}

/// AMZI phases `(φ1, φ2)` realising a source rotation angle
/// `φ ∈ [0, π/2]` (so `cos φ·|00⟩ + sin φ·|11⟩`) for the given maximum
/// rates: one AMZI is parked at full transmission and the other solved
/// from `tan φ = √(C2/C1)`.
pub fn solve_source_phases(source_angle: f64, c_max1: f64, c_max2: f64) -> Result<(f64, f64)> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&source_angle) {
        return Err(Error::invalid(format!(
            "source angle must lie in [0, π/2], got {source_angle}"
        )));
    }
    if !(c_max1 > 0.0) || !(c_max2 > 0.0) {
        return Err(Error::invalid(
            "maximum coincidence rates must be positive".to_string(),
        ));
    }
    let tan = source_angle.tan();
    if source_angle <= std::f64::consts::FRAC_PI_4 {
        // C1 at maximum: sin⁴(φ2/2) = (c1/c2)·tan²φ.
        let ratio = (c_max1 / c_max2) * tan * tan;
        if ratio > 1.0 + 1e-12 {
            return Err(Error::invalid(
                "source angle unreachable at these maximum rates".to_string(),
            ));
        }
        Ok((std::f64::consts::PI, 2.0 * ratio.min(1.0).powf(0.25).asin()))
    } else {
        // C2 at maximum: sin⁴(φ1/2) = (c2/c1)/tan²φ.
        let ratio = (c_max2 / c_max1) / (tan * tan);
        if ratio > 1.0 + 1e-12 {
            return Err(Error::invalid(
                "source angle unreachable at these maximum rates".to_string(),
            ));
        }
        Ok((2.0 * ratio.min(1.0).powf(0.25).asin(), std::f64::consts::PI))
    }
}

/// Chip settings that prepare a state with probabilities
/// `[p0, p1, p2, p3]`: the source angle splits `p0+p1` against `p2+p3`,
/// the `R_y` inside `V` splits `p0 : p1`, the one inside `U` splits
/// `p2 : p3` (the target enters the `U` branch in `|1⟩`), and the signal
/// output chain is set to compensation so the broken shifter drops out.
pub fn configuration_for_probabilities(
    target: &ProbVector,
    broken: BrokenShifter,
    max_rates: (f64, f64),
) -> Result<ChipConfiguration> {
    if target.len() != 4 {
        return Err(Error::shape(
            "chip state preparation needs a 4-outcome target".to_string(),
        ));
    }
    let p = target.values();
    let source_angle = (p[2] + p[3]).sqrt().atan2((p[0] + p[1]).sqrt());
    let (phi1, phi2) = solve_source_phases(source_angle, max_rates.0, max_rates.1)?;
    let theta_v = p[1].sqrt().atan2(p[0].sqrt()) * 2.0;
    let theta_u = p[2].sqrt().atan2(p[3].sqrt()) * 2.0;
    let (t8, t9, t10) = compensate_broken_shifter(broken.unitary())?;

    let mut shifters = [0.0; SHIFTER_COUNT];
    shifters[1] = theta_v; // θ2
    shifters[4] = theta_u; // θ5
    shifters[7] = t8; // θ8
    shifters[8] = t9; // θ9
    shifters[9] = t10; // θ10
    ChipConfiguration::new((phi1, phi2), shifters, broken)?.with_max_rates(max_rates.0, max_rates.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::hadamard;
    use crate::rng::seeded;
    use rand::Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn balanced_sources_give_equal_amplitudes() {
        let s = source_state(PI, PI, 0.0, 3000.0, 3000.0).unwrap();
        assert!((s.alpha().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.beta().re - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn dark_second_source_gives_product_state() {
        let s = source_state(PI, 0.0, 0.4, 3000.0, 3000.0).unwrap();
        assert!((s.alpha() - Complex64::from_polar(1.0, 0.4)).norm() < 1e-12);
        assert!(s.beta().norm() < 1e-12);
    }

    #[test]
    fn rate_ratio_sets_populations() {
        // C1 : C2 = 0.7 : 0.3 → |α|² = 0.7.
        // sin⁴(φ/2) = r solves as φ = 2·asin(r^{1/4}).
        let phi1 = 2.0 * 0.7f64.powf(0.25).asin();
        let phi2 = 2.0 * 0.3f64.powf(0.25).asin();
        let s = source_state(phi1, phi2, 0.0, 3000.0, 3000.0).unwrap();
        assert!((s.alpha().norm_sqr() - 0.7).abs() < 1e-12);
        assert!((s.beta().norm_sqr() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn both_sources_dark_rejected() {
        assert!(source_state(0.0, 0.0, 0.0, 3000.0, 3000.0).is_err());
    }

    #[test]
    fn theta8_changes_only_alpha_phase() {
        let mut rng = seeded(51);
        for _ in 0..100 {
            let phi1 = rng.random_range(0.1..PI);
            let phi2 = rng.random_range(0.1..PI);
            let t8 = rng.random_range(-PI..PI);
            let base = source_state(phi1, phi2, 0.0, 3000.0, 3000.0).unwrap();
            let shifted = source_state(phi1, phi2, t8, 3000.0, 3000.0).unwrap();
            assert!((shifted.alpha().norm() - base.alpha().norm()).abs() < 1e-12);
            assert!((shifted.beta() - base.beta()).norm() < 1e-12);
            let total = shifted.alpha().norm_sqr() + shifted.beta().norm_sqr();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_configuration_prepares_ground_state() {
        // R_y(φ) = I means a dark second source; with V = U = I and an
        // unbroken chip the output is |00⟩.
        let config =
            ChipConfiguration::new((PI, 0.0), [0.0; SHIFTER_COUNT], BrokenShifter::identity())
                .unwrap();
        let state = config.prepare_state().unwrap();
        assert!(state.approx_eq_up_to_phase(&PureState::zero(2), 1e-12));
    }

    #[test]
    fn balanced_identity_configuration_prepares_bell_state() {
        let config =
            ChipConfiguration::new((PI, PI), [0.0; SHIFTER_COUNT], BrokenShifter::identity())
                .unwrap();
        let state = config.prepare_state().unwrap();
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
        assert!(state.approx_eq_up_to_phase(&bell, 1e-12));
    }

    #[test]
    fn compensated_broken_shifter_drops_out_of_probabilities() {
        // The same settings on a broken chip with compensated θ8–θ10
        // reproduce the unbroken Bell-state probabilities.
        let broken = BrokenShifter::default();
        let (t8, t9, t10) = compensate_broken_shifter(broken.unitary()).unwrap();
        let mut shifters = [0.0; SHIFTER_COUNT];
        shifters[7] = t8;
        shifters[8] = t9;
        shifters[9] = t10;
        let config = ChipConfiguration::new((PI, PI), shifters, broken).unwrap();
        let p = config.prepare_state().unwrap().probabilities();
        assert!((p.get(0) - 0.5).abs() < 1e-12);
        assert!((p.get(3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn compensation_composes_to_identity() {
        // U_brok = I admits (0, 0, 0).
        let (t8, t9, t10) = compensate_broken_shifter(&UnitaryMatrix::identity(2)).unwrap();
        let composed = &UnitaryMatrix::identity(2) * &su2(t8, t9, t10).unwrap();
        assert!(composed.approx_eq_up_to_phase(&UnitaryMatrix::identity(2), 1e-12));
        assert!(t9.abs() < 1e-12);

        // A diagonal broken unitary is cancelled by θ8 alone.
        let u = rz(0.7).unwrap();
        let (t8, t9, t10) = compensate_broken_shifter(&u).unwrap();
        assert!((t8 + 0.7).abs() < 1e-12);
        assert!(t9.abs() < 1e-12);
        let composed = &u * &su2(t8, t9, t10).unwrap();
        assert!(composed.approx_eq_up_to_phase(&UnitaryMatrix::identity(2), 1e-12));
    }

    #[test]
    fn compensation_with_offsets_matches_effective_gate() {
        // With offsets (dθ8, dθ9) the chain equals
        // R_z(−θ8⁰)·R_y(dθ9)·R_z(θ8⁰+dθ8) up to global phase.
        let mut rng = seeded(52);
        for _ in 0..200 {
            let broken = BrokenShifter::seeded(rng.random());
            let (t8, t9, t10) = compensate_broken_shifter(broken.unitary()).unwrap();
            let d8 = rng.random_range(-PI..PI);
            let d9 = rng.random_range(-PI..PI);
            let chain = &(broken.unitary() * &rz(t10).unwrap())
                * &(&ry(t9 + d9).unwrap() * &rz(t8 + d8).unwrap());
            let effective = &(&rz(-t8).unwrap() * &ry(d9).unwrap()) * &rz(t8 + d8).unwrap();
            assert!(
                chain.distance_up_to_phase(&effective) < 1e-9,
                "distance {}",
                chain.distance_up_to_phase(&effective)
            );
        }
    }

    #[test]
    fn solve_source_phases_roundtrip() {
        let mut rng = seeded(53);
        for _ in 0..300 {
            let angle = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
            let (phi1, phi2) = solve_source_phases(angle, 3000.0, 3000.0).unwrap();
            let c1 = coincidence_rate(phi1, 3000.0).unwrap();
            let c2 = coincidence_rate(phi2, 3000.0).unwrap();
            let achieved = c2.sqrt().atan2(c1.sqrt());
            assert!(
                (achieved - angle).abs() < 1e-9,
                "angle {angle} vs achieved {achieved}"
            );
        }
    }

    #[test]
    fn probability_recipe_reaches_targets() {
        let mut rng = seeded(54);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let target = ProbVector::new(raw.into_iter().map(|x| x / sum).collect()).unwrap();
            let config = configuration_for_probabilities(
                &target,
                BrokenShifter::default(),
                (DEFAULT_MAX_RATE, DEFAULT_MAX_RATE),
            )
            .unwrap();
            let p = config.prepare_state().unwrap().probabilities();
            for (got, want) in p.values().iter().zip(target.values()) {
                assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
            }
        }
    }

    #[test]
    fn probability_recipe_handles_degenerate_targets() {
        for target in [
            ProbVector::point_mass(4, 0),
            ProbVector::point_mass(4, 3),
            ProbVector::new(vec![0.0, 0.0, 0.5, 0.5]).unwrap(),
        ] {
            let config = configuration_for_probabilities(
                &target,
                BrokenShifter::identity(),
                (DEFAULT_MAX_RATE, DEFAULT_MAX_RATE),
            )
            .unwrap();
            let p = config.prepare_state().unwrap().probabilities();
            for (got, want) in p.values().iter().zip(target.values()) {
                assert!((got - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn prepare_state_output_is_normalised() {
        let mut rng = seeded(55);
        for _ in 0..100 {
            let mut shifters = [0.0; SHIFTER_COUNT];
            for s in shifters.iter_mut() {
                *s = rng.random_range(-PI..PI);
            }
            let config = ChipConfiguration::new(
                (rng.random_range(0.2..PI), rng.random_range(0.2..PI)),
                shifters,
                BrokenShifter::default(),
            )
            .unwrap();
            let state = config.prepare_state().unwrap();
            assert!((state.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prepared_plus_state_via_v_hadamard() {
        // Dark second source and V = H prepares |0⟩⊗|+⟩.
        let (t8, t9, t10) = compensate_broken_shifter(BrokenShifter::default().unitary()).unwrap();
        let h = zyz_angles(&hadamard()).unwrap();
        let mut shifters = [0.0; SHIFTER_COUNT];
        shifters[0] = h.z1;
        shifters[1] = h.y;
        shifters[2] = h.z2;
        shifters[7] = t8;
        shifters[8] = t9;
        shifters[9] = t10;
        let config = ChipConfiguration::new((PI, 0.0), shifters, BrokenShifter::default()).unwrap();
        let p = config.prepare_state().unwrap().probabilities();
        assert!((p.get(0) - 0.5).abs() < 1e-12);
        assert!((p.get(1) - 0.5).abs() < 1e-12);
    }
}
