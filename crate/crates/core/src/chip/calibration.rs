//! Heater calibration: fitting `a·sin⁴(α·I² + β) + b` to measured
//! coincidence fringes and inverting the phase map.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One calibration measurement: heater drive current against the
/// measured coincidence rate.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
pub struct CalibrationSample {
    pub current_ma: f64,
    pub counts_per_s: f64,
}

/// Fitted coefficients of the fringe model `a·sin⁴(α·I² + β) + b`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
pub struct HeaterCalibration {
    /// Fringe amplitude in counts/s.
    pub a: f64,
    /// Phase per squared milliamp, rad/mA².
    pub alpha: f64,
    /// Phase offset in radians, canonicalised to `[0, π)` (the fringe has
    /// period π in its argument).
    pub beta: f64,
    /// Background counts/s.
    pub b: f64,
}

impl HeaterCalibration {
    pub fn new(a: f64, alpha: f64, beta: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::invalid(format!(
                "fringe amplitude must be positive, got {a}"
            )));
        }
        if !(b >= 0.0) {
            return Err(Error::invalid(format!(
                "background must be non-negative, got {b}"
            )));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::invalid(
                "calibration coefficients must be finite".to_string(),
            ));
        }
        Ok(Self { a, alpha, beta, b })
    }

    /// Model prediction at the given drive current.
    pub fn predicted_counts(&self, current_ma: f64) -> f64 {
        self.a
            * (self.alpha * current_ma * current_ma + self.beta)
                .sin()
                .powi(4)
            + self.b
    }

    /// Optical phase at the given drive current: `α·I² + β`.
    pub fn phase_at(&self, current_ma: f64) -> f64 {
        self.alpha * current_ma * current_ma + self.beta
    }
}

/// Fit result: the calibration plus the root-mean-square residual.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
pub struct CalibrationFit {
    #[serde(flatten)]
    pub calibration: HeaterCalibration,
    pub rms: f64,
}

/// Least-squares fit of `(a, α, β, b)`.
///
/// The sin⁴ fringe is multimodal in `(α, β)`, so the fit first grid
/// searches those two (solving `(a, b)` linearly at each grid point) and
/// then refines all four parameters with Levenberg–Marquardt.
pub fn fit_calibration(samples: &[CalibrationSample]) -> Result<CalibrationFit> {
    if samples.len() < 8 {
        return Err(Error::invalid(format!(
            "calibration requires at least 8 samples spanning a fringe, got {}",
            samples.len()
        )));
    }
    if samples
        .iter()
        .any(|s| !s.current_ma.is_finite() || !s.counts_per_s.is_finite())
    {
        return Err(Error::invalid(
            "calibration samples must be finite".to_string(),
        ));
    }
    let u: Vec<f64> = samples
        .iter()
        .map(|s| s.current_ma * s.current_ma)
        .collect();
    let y: Vec<f64> = samples.iter().map(|s| s.counts_per_s).collect();

    let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if y_max - y_min <= 1e-9 * y_max.abs().max(1.0) {
        return Err(Error::FitFailure(
            "counts are constant; no fringe to fit".to_string(),
        ));
    }
    let u_min = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let u_max = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let u_span = u_max - u_min;
    if u_span <= 0.0 {
        return Err(Error::FitFailure(
            "all samples share one drive current".to_string(),
        ));
    }

    // Coarse grid over (α, β).
    let n = samples.len() as f64;
    let sweep_min = std::f64::consts::FRAC_PI_2;
    let sweep_max = std::f64::consts::PI * n;
    let alpha_steps = 400;
    let beta_steps = 64;
    let mut best: Option<(f64, [f64; 4])> = None;
    for i in 0..alpha_steps {
        let t = i as f64 / (alpha_steps - 1) as f64;
        let alpha = sweep_min * (sweep_max / sweep_min).powf(t) / u_span;
        for j in 0..beta_steps {
            let beta = std::f64::consts::PI * j as f64 / beta_steps as f64;
            if let Some((a, b, sse)) = linear_amplitude_fit(&u, &y, alpha, beta) {
                if a > 0.0 && best.as_ref().is_none_or(|(best_sse, _)| sse < *best_sse) {
                    best = Some((sse, [a, alpha, beta, b]));
                }
            }
        }
    }
    let (_, mut params) =
        best.ok_or_else(|| Error::FitFailure("no admissible fringe seed found".to_string()))?;

    // Levenberg–Marquardt refinement.
    let mut lambda = 1e-3;
    let mut sse = residual_sse(&u, &y, &params);
    for _ in 0..200 {
        let (jtj, jtr) = normal_equations(&u, &y, &params);
        let mut improved = false;
        for _ in 0..20 {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [
                params[0] + step[0],
                params[1] + step[1],
                params[2] + step[2],
                params[3] + step[3],
            ];
            let trial_sse = residual_sse(&u, &y, &trial);
            if trial_sse.is_finite() && trial_sse < sse {
                let rel = (sse - trial_sse) / sse.max(1e-300);
                params = trial;
                sse = trial_sse;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-14 {
                    break;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }

    // Canonicalise: α > 0 (sin⁴(αu+β) = sin⁴(−αu−β)), β ∈ [0, π).
    if params[1] < 0.0 {
        params[1] = -params[1];
        params[2] = -params[2];
    }
    params[2] = params[2].rem_euclid(std::f64::consts::PI);
    if params[0] <= 0.0 {
        return Err(Error::FitFailure(format!(
            "fit collapsed to non-positive amplitude {}",
            params[0]
        )));
    }
    let calibration = HeaterCalibration::new(params[0], params[1], params[2], params[3].max(0.0))?;
    Ok(CalibrationFit {
        calibration,
        rms: (sse / samples.len() as f64).sqrt(),
    })
}

/// For fixed (α, β) the model is linear in (a, b); solve that 2×2 least
/// squares and return the residual.
fn linear_amplitude_fit(u: &[f64], y: &[f64], alpha: f64, beta: f64) -> Option<(f64, f64, f64)> {
    let n = u.len() as f64;
    let mut sf = 0.0;
    let mut sff = 0.0;
    let mut sfy = 0.0;
    let mut sy = 0.0;
    let basis: Vec<f64> = u
        .iter()
        .map(|&ui| (alpha * ui + beta).sin().powi(4))
        .collect();
    for (f, yi) in basis.iter().zip(y) {
        sf += f;
        sff += f * f;
        sfy += f * yi;
        sy += yi;
    }
    let det = n * sff - sf * sf;
    if det.abs() < 1e-12 {
        return None;
    }
    let a = (n * sfy - sf * sy) / det;
    let b = (sy - a * sf) / n;
    let sse: f64 = basis
        .iter()
        .zip(y)
        .map(|(f, yi)| {
            let r = a * f + b - yi;
            r * r
        })
        .sum();
    Some((a, b, sse))
}

fn residual_sse(u: &[f64], y: &[f64], p: &[f64; 4]) -> f64 {
    u.iter()
        .zip(y)
        .map(|(&ui, &yi)| {
            let r = p[0] * (p[1] * ui + p[2]).sin().powi(4) + p[3] - yi;
            r * r
        })
        .sum()
}

fn normal_equations(u: &[f64], y: &[f64], p: &[f64; 4]) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for (&ui, &yi) in u.iter().zip(y) {
        let theta = p[1] * ui + p[2];
        let (s, c) = theta.sin_cos();
        let s3c = 4.0 * p[0] * s.powi(3) * c;
        let row = Vector4::new(s.powi(4), s3c * ui, s3c, 1.0);
        let r = p[0] * s.powi(4) + p[3] - yi;
        jtj += row * row.transpose();
        jtr += row * r;
    }
    (jtj, jtr)
}

/// Smallest non-negative drive current whose phase `α·I² + β` equals
/// `phi_target` modulo 2π.
pub fn current_for_phase(cal: &HeaterCalibration, phi_target: f64) -> Result<f64> {
    if !(cal.alpha > 0.0) {
        return Err(Error::invalid(format!(
            "phase coefficient must be positive, got {}",
            cal.alpha
        )));
    }
    if !phi_target.is_finite() {
        return Err(Error::invalid("target phase must be finite".to_string()));
    }
    let delta = (phi_target - cal.beta).rem_euclid(2.0 * std::f64::consts::PI);
    Ok((delta / cal.alpha).sqrt())
}

/// Reads calibration samples from CSV with the header
/// `current_mA,counts_per_s`.
pub fn read_calibration_csv(path: &std::path::Path) -> Result<Vec<CalibrationSample>> {
    let text = std::fs::read_to_string(path)?;
    parse_calibration_csv(&text)
}

fn parse_calibration_csv(text: &str) -> Result<Vec<CalibrationSample>> {
    let mut samples = Vec::new();
    let mut offset = 0u64;
    let mut saw_header = false;
    for line in text.lines() {
        let line_offset = offset;
        offset += line.len() as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if !saw_header {
            if trimmed != "current_mA,counts_per_s" {
                return Err(Error::ParseError {
                    offset: line_offset,
                    message: format!(
                        "expected header `current_mA,counts_per_s`, found `{trimmed}`"
                    ),
                });
            }
            saw_header = true;
            continue;
        }
        let mut fields = trimmed.split(',');
        let (Some(cur), Some(cnt), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::ParseError {
                offset: line_offset,
                message: format!("expected two comma-separated fields, found `{trimmed}`"),
            });
        };
        let current_ma: f64 = cur.trim().parse().map_err(|e| Error::ParseError {
            offset: line_offset,
            message: format!("bad current `{cur}`: {e}"),
        })?;
        let counts_per_s: f64 = cnt.trim().parse().map_err(|e| Error::ParseError {
            offset: line_offset,
            message: format!("bad counts `{cnt}`: {e}"),
        })?;
        samples.push(CalibrationSample {
            current_ma,
            counts_per_s,
        });
    }
    if !saw_header {
        return Err(Error::ParseError {
            offset: 0,
            message: "empty calibration file".to_string(),
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child, seeded};
    use rand::Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    fn synthetic_fringe(
        a: f64,
        alpha: f64,
        beta: f64,
        b: f64,
        noise: f64,
        seed: u64,
    ) -> Vec<CalibrationSample> {
        let mut rng = seeded(seed);
        let gauss = Normal::new(0.0, 1.0).unwrap();
        (0..=120)
            .map(|k| {
                let current_ma = k as f64 * 0.25;
                let clean = a * (alpha * current_ma * current_ma + beta).sin().powi(4) + b;
                let counts = clean * (1.0 + noise * gauss.sample(&mut rng));
                CalibrationSample {
                    current_ma,
                    counts_per_s: counts,
                }
            })
            .collect()
    }

    #[test]
    fn noiseless_fit_recovers_parameters() {
        let samples = synthetic_fringe(3000.0, 0.05, 0.3, 20.0, 0.0, 0);
        let fit = fit_calibration(&samples).unwrap();
        let cal = fit.calibration;
        assert!((cal.a - 3000.0).abs() / 3000.0 < 1e-6, "a = {}", cal.a);
        assert!(
            (cal.alpha - 0.05).abs() / 0.05 < 1e-6,
            "alpha = {}",
            cal.alpha
        );
        assert!((cal.beta - 0.3).abs() / 0.3 < 1e-6, "beta = {}", cal.beta);
        assert!((cal.b - 20.0).abs() / 20.0 < 1e-4, "b = {}", cal.b);
        assert!(fit.rms < 1e-4, "rms = {}", fit.rms);
    }

    #[test]
    fn one_percent_noise_keeps_amplitude_within_three_percent() {
        for seed in 0..20 {
            let samples =
                synthetic_fringe(3000.0, 0.05, 0.3, 20.0, 0.01, child(100, seed).random());
            let fit = fit_calibration(&samples).unwrap();
            let rel = (fit.calibration.a - 3000.0).abs() / 3000.0;
            assert!(rel < 0.03, "seed {seed}: relative amplitude error {rel}");
        }
    }

    #[test]
    fn constant_counts_fail() {
        let samples: Vec<CalibrationSample> = (0..20)
            .map(|k| CalibrationSample {
                current_ma: k as f64,
                counts_per_s: 100.0,
            })
            .collect();
        assert!(matches!(
            fit_calibration(&samples),
            Err(Error::FitFailure(_))
        ));
    }

    #[test]
    fn too_few_samples_rejected() {
        let samples = synthetic_fringe(3000.0, 0.05, 0.3, 20.0, 0.0, 0);
        assert!(fit_calibration(&samples[..5]).is_err());
    }

    #[test]
    fn current_for_phase_examples() {
        let cal = HeaterCalibration::new(3000.0, 0.05, 0.3, 20.0).unwrap();
        assert!(current_for_phase(&cal, 0.3).unwrap().abs() < 1e-12);

        let cal0 = HeaterCalibration::new(3000.0, 0.05, 0.0, 0.0).unwrap();
        let i = current_for_phase(&cal0, PI).unwrap();
        assert!((i - (PI / 0.05).sqrt()).abs() < 1e-12);

        let mut rng = seeded(5);
        for _ in 0..200 {
            let phi = rng.random_range(-10.0..10.0);
            let i = current_for_phase(&cal, phi).unwrap();
            assert!(i >= 0.0);
            let achieved = cal.phase_at(i);
            let wrapped = (achieved - phi).rem_euclid(2.0 * PI);
            assert!(wrapped < 1e-9 || (2.0 * PI - wrapped) < 1e-9);
        }
    }

    #[test]
    fn current_for_phase_requires_positive_alpha() {
        let cal = HeaterCalibration {
            a: 1.0,
            alpha: -0.05,
            beta: 0.0,
            b: 0.0,
        };
        assert!(current_for_phase(&cal, 1.0).is_err());
    }

    #[test]
    fn csv_parsing_roundtrip_and_errors() {
        let good = "current_mA,counts_per_s\n0.0,20.0\n1.0,25.5\n";
        let samples = parse_calibration_csv(good).unwrap();
        assert_eq!(samples.len(), 2);
        assert!((samples[1].counts_per_s - 25.5).abs() < 1e-12);

        assert!(parse_calibration_csv("bad_header\n1,2\n").is_err());
        assert!(parse_calibration_csv("current_mA,counts_per_s\n1,2,3\n").is_err());
        let err = parse_calibration_csv("current_mA,counts_per_s\n1,abc\n").unwrap_err();
        assert!(matches!(err, Error::ParseError { offset: 24, .. }), "{err}");
    }

    #[test]
    fn calibration_json_layout() {
        let fit = CalibrationFit {
            calibration: HeaterCalibration::new(3000.0, 0.05, 0.3, 20.0).unwrap(),
            rms: 0.5,
        };
        let json = serde_json::to_value(fit).unwrap();
        for key in ["a", "alpha", "beta", "b", "rms"] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }
}
