//! Physical model of the two-qubit photonic chip.
//!
//! The chip holds two spiral photon-pair sources, two asymmetric
//! Mach–Zehnder interferometers (AMZIs) that set the entangled-state
//! amplitudes under frequency post-selection, a path-expansion
//! controlled-unitary section, and per-qubit output gates built from
//! phase shifters and MZIs. One phase shifter (θ11) is broken and stuck
//! at an unknown fixed unitary; its effect is cancelled by offsetting
//! θ8–θ10 (see [`compensate_broken_shifter`]).

mod amzi;
mod calibration;
mod circuit;

pub use amzi::{amzi_transfer, coincidence_rate, derive_coincidence_from_state, EntryPort, Photon};
pub use calibration::{
    current_for_phase, fit_calibration, read_calibration_csv, CalibrationFit, CalibrationSample,
    HeaterCalibration,
};
pub use circuit::{
    compensate_broken_shifter, configuration_for_probabilities, solve_source_phases, source_state,
    BrokenShifter, ChipConfiguration, SourceAmplitudes, DEFAULT_BROKEN_SEED, DEFAULT_MAX_RATE,
    SHIFTER_COUNT,
};
