//! The three adversarial trainers: quantum state learning, classical
//! distribution loading, and compressed-image generation with a hybrid
//! classical/quantum generator.
//!
//! All quantum parameters are standard rotation angles, so their
//! gradients are exact under the parameter-shift rule; classical critic
//! gradients come from [`crate::nn`] backpropagation, and the hybrid
//! generator's classical head is differentiated by central finite
//! differences because the quantum layer sits between it and the loss.

mod distribution;
mod history;
mod images;
mod state_learning;

pub use distribution::{
    distribution_generator, solve_distribution_angles, train_distribution,
    train_distribution_with_init, DistributionOutcome, HqcGanConfig, DISTRIBUTION_PARAMS,
};
pub use history::{EpochRecord, TrainingHistory};
pub use images::{
    hybrid_generator, train_images, train_images_with_init, HybridGenerator, ImageGanConfig,
    ImageGanInit, ImageGanOutcome,
};
pub use state_learning::{
    measurement_operator, mixed_target, plus_state_generator_params, pqgan_generator, pqgan_loss,
    pure_target, train_pqgan, train_pqgan_with_init, PqGanConfig, PqGanOutcome,
    PQGAN_DISCRIMINATOR_PARAMS, PQGAN_GENERATOR_PARAMS,
};

use crate::error::{Error, Result};
use crate::quantum::ProbVector;

/// Parameter-shift gradient `[f(θ+π/2·e_i) − f(θ−π/2·e_i)]/2`, exact for
/// losses that are degree-1 trigonometric in each rotation angle.
pub fn parameter_shift_grad<F>(loss_fn: F, theta: &[f64], index: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    assert!(index < theta.len(), "parameter index out of range");
    let shift = std::f64::consts::FRAC_PI_2;
    let mut plus = theta.to_vec();
    plus[index] += shift;
    let mut minus = theta.to_vec();
    minus[index] -= shift;
    Ok((loss_fn(&plus)? - loss_fn(&minus)?) / 2.0)
}

/// Full parameter-shift gradient vector.
pub fn parameter_shift_gradient<F>(loss_fn: F, theta: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    (0..theta.len())
        .map(|i| parameter_shift_grad(&loss_fn, theta, i))
        .collect()
}

/// Central finite-difference gradient `[L(θ+ε) − L(θ−ε)]/(2ε)` per
/// parameter.
pub fn finite_difference_grad<F>(mut loss_fn: F, params: &[f64], epsilon: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!(
            "finite-difference step must be positive, got {epsilon}"
        )));
    }
    let mut grads = Vec::with_capacity(params.len());
    let mut work = params.to_vec();
    for i in 0..params.len() {
        let original = work[i];
        work[i] = original + epsilon;
        let plus = loss_fn(&work)?;
        work[i] = original - epsilon;
        let minus = loss_fn(&work)?;
        work[i] = original;
        grads.push((plus - minus) / (2.0 * epsilon));
    }
    Ok(grads)
}

/// Floor applied to the generated distribution before the KLD so exact
/// zeros (rotations at multiples of π) stay finite.
pub const KLD_SMOOTHING: f64 = 1e-9;

/// Kullback–Leibler divergence `Σ pᵢ·ln(pᵢ/qᵢ)` with `0·ln 0 = 0`,
/// directed as KLD(target ‖ generated); `q` is clamped elementwise to at
/// least [`KLD_SMOOTHING`] and renormalised.
pub fn kld(p: &ProbVector, q: &ProbVector) -> f64 {
    assert_eq!(p.len(), q.len(), "distribution length mismatch");
    let smoothed: Vec<f64> = q.values().iter().map(|&v| v.max(KLD_SMOOTHING)).collect();
    let total: f64 = smoothed.iter().sum();
    p.values()
        .iter()
        .zip(&smoothed)
        .map(|(&pi, &qi)| {
            if pi > 0.0 {
                pi * (pi / (qi / total)).ln()
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn shift_rule_exact_for_sine() {
        let grad = parameter_shift_grad(|t| Ok(t[0].sin()), &[0.0], 0).unwrap();
        assert!((grad - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_rule_zero_for_constant() {
        let grad = parameter_shift_grad(|_| Ok(2.5), &[0.7, 0.1], 1).unwrap();
        assert_eq!(grad, 0.0);
    }

    #[test]
    fn finite_difference_exact_for_quadratic() {
        let grads = finite_difference_grad(|t| Ok(t[0] * t[0]), &[1.0], 0.02).unwrap();
        assert!((grads[0] - 2.0).abs() < 1e-12);
        let grads = finite_difference_grad(|_| Ok(7.0), &[1.0, 2.0], 0.02).unwrap();
        assert_eq!(grads, vec![0.0, 0.0]);
    }

    #[test]
    fn finite_difference_rejects_bad_step() {
        assert!(finite_difference_grad(|t| Ok(t[0]), &[1.0], 0.0).is_err());
    }

    #[test]
    fn kld_examples() {
        let p = ProbVector::uniform(4);
        assert!(kld(&p, &p).abs() < 1e-12);

        let point = ProbVector::point_mass(4, 0);
        assert!((kld(&point, &ProbVector::uniform(4)) - 4.0f64.ln()).abs() < 1e-12);

        let half = ProbVector::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!((kld(&half, &ProbVector::uniform(4)) - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn kld_non_negative_and_zero_iff_equal() {
        let mut rng = seeded(71);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let p = ProbVector::new(raw.iter().map(|x| x / sum).collect()).unwrap();
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let q = ProbVector::new(raw.iter().map(|x| x / sum).collect()).unwrap();
            let d = kld(&p, &q);
            assert!(d >= 0.0);
            assert!(kld(&p, &p) < 1e-12);
            if d < 1e-12 {
                for (a, b) in p.values().iter().zip(q.values()) {
                    assert!((a - b).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn kld_handles_zero_generated_bins() {
        let target = ProbVector::uniform(4);
        let generated = ProbVector::point_mass(4, 2);
        let d = kld(&target, &generated);
        assert!(d.is_finite());
        assert!(d > 0.0);
    }
}
