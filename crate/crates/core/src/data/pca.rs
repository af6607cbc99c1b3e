//! PCA compression to three features, the inverse reconstruction, and
//! the bijective feature-to-probability map.
//!
//! PCA features are signed; the probability map needs non-negative
//! entries, so each feature is min-max normalised to `[0, 1]` using the
//! extrema recorded over the training set before the augmentation
//! `x' = [x_norm, 0.5]` and `pᵢ = x'ᵢ/Σx'ᵢ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::ProbVector;

/// Fitted PCA basis plus the per-feature normalisation ranges.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal principal components, one vector per feature.
    pub components: Vec<Vec<f64>>,
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
}

/// Fits a `k`-component PCA by singular value decomposition of the
/// centred data matrix and records per-feature extrema over the
/// training set.
pub fn pca_fit(images: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    if k == 0 {
        return Err(Error::invalid(
            "component count must be positive".to_string(),
        ));
    }
    if images.len() < k + 1 {
        return Err(Error::invalid(format!(
            "PCA needs at least {} images, got {}",
            k + 1,
            images.len()
        )));
    }
    let dim = images[0].len();
    if dim < k || images.iter().any(|img| img.len() != dim) {
        return Err(Error::shape(
            "images must share one dimension of at least k pixels".to_string(),
        ));
    }

    let n = images.len();
    let mut mean = vec![0.0; dim];
    for image in images {
        for (m, &p) in mean.iter_mut().zip(image) {
            *m += p / n as f64;
        }
    }
    let mut centred = DMatrix::<f64>::zeros(n, dim);
    for (r, image) in images.iter().enumerate() {
        for (c, (&p, &m)) in image.iter().zip(&mean).enumerate() {
            centred[(r, c)] = p - m;
        }
    }

    let svd = centred.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let leading = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > leading * 1e-10 && s > 1e-12)
        .count();
    if rank < k {
        return Err(Error::FitFailure(format!(
            "data spans only {rank} directions of non-zero variance, need {k}"
        )));
    }
    let components: Vec<Vec<f64>> = (0..k)
        .map(|j| v_t.row(j).iter().copied().collect())
        .collect();

    let mut model = PcaModel {
        mean,
        components,
        feature_min: vec![f64::INFINITY; k],
        feature_max: vec![f64::NEG_INFINITY; k],
    };
    for image in images {
        let f = model.transform(image)?;
        for ((lo, hi), v) in model
            .feature_min
            .iter_mut()
            .zip(&mut model.feature_max)
            .zip(&f)
        {
            *lo = lo.min(*v);
            *hi = hi.max(*v);
        }
    }
    for (lo, hi) in model.feature_min.iter().zip(&model.feature_max) {
        if !(hi - lo > 0.0) {
            return Err(Error::FitFailure(
                "a feature has zero spread over the training set".to_string(),
            ));
        }
    }
    Ok(model)
}

impl PcaModel {
    pub fn feature_count(&self) -> usize {
        self.components.len()
    }

    pub fn pixel_count(&self) -> usize {
        self.mean.len()
    }

    /// Projects a centred image onto the components.
    pub fn transform(&self, image: &[f64]) -> Result<Vec<f64>> {
        if image.len() != self.mean.len() {
            return Err(Error::shape(format!(
                "expected {} pixels, got {}",
                self.mean.len(),
                image.len()
            )));
        }
        Ok(self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .zip(image)
                    .zip(&self.mean)
                    .map(|((c, p), m)| c * (p - m))
                    .sum()
            })
            .collect())
    }

    /// `mean + Σ fᵢ·componentᵢ`.
    pub fn inverse(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.feature_count() {
            return Err(Error::shape(format!(
                "expected {} features, got {}",
                self.feature_count(),
                features.len()
            )));
        }
        let mut image = self.mean.clone();
        for (f, comp) in features.iter().zip(&self.components) {
            for (px, c) in image.iter_mut().zip(comp) {
                *px += f * c;
            }
        }
        Ok(image)
    }

    fn normalise(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.feature_count() {
            return Err(Error::shape("feature length mismatch".to_string()));
        }
        Ok(features
            .iter()
            .zip(&self.feature_min)
            .zip(&self.feature_max)
            .map(|((f, lo), hi)| (f - lo) / (hi - lo))
            .collect())
    }

    /// Maps features to the 4-point distribution
    /// `x' = [x_norm, 0.5]`, `pᵢ = x'ᵢ/Σx'ᵢ`. Features must lie inside
    /// the recorded training ranges (the map's bijective domain).
    pub fn feature_to_prob(&self, features: &[f64]) -> Result<ProbVector> {
        if self.feature_count() != 3 {
            return Err(Error::shape(
                "the probability map expects 3 features".to_string(),
            ));
        }
        let norm = self.normalise(features)?;
        if norm.iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
            return Err(Error::invalid(
                "features fall outside the recorded training ranges".to_string(),
            ));
        }
        let mut augmented = norm;
        augmented.push(0.5);
        let total: f64 = augmented.iter().sum();
        ProbVector::new(
            augmented
                .into_iter()
                .map(|v| (v / total).max(0.0))
                .collect(),
        )
    }

    /// Inverse of [`Self::feature_to_prob`]: `x_normᵢ = 0.5·pᵢ/p₃`,
    /// then de-normalisation.
    pub fn prob_to_feature(&self, p: &ProbVector) -> Result<Vec<f64>> {
        if self.feature_count() != 3 {
            return Err(Error::shape(
                "the probability map expects 3 features".to_string(),
            ));
        }
        if p.len() != 4 {
            return Err(Error::shape(
                "the probability map inverts 4-point distributions".to_string(),
            ));
        }
        let anchor = p.get(3);
        if anchor <= 0.0 {
            return Err(Error::InversionFailure(
                "the augmented component p₃ is zero; the map is not invertible here".to_string(),
            ));
        }
        Ok((0..3)
            .map(|i| {
                let norm = 0.5 * p.get(i) / anchor;
                self.feature_min[i] + norm * (self.feature_max[i] - self.feature_min[i])
            })
            .collect())
    }
}

/// Thresholds pixels to bits: `pixel ≥ threshold → 1`.
pub fn binarize(image: &[f64], threshold: f64) -> Vec<u8> {
    image.iter().map(|&p| u8::from(p >= threshold)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    /// Images lying exactly in a 3-dimensional affine subspace.
    fn rank3_dataset(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = seeded(seed);
        let basis: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let offset: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        (0..n)
            .map(|_| {
                let coeffs: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                (0..dim)
                    .map(|j| {
                        offset[j]
                            + coeffs
                                .iter()
                                .zip(&basis)
                                .map(|(c, b)| c * b[j])
                                .sum::<f64>()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn exact_rank_three_data_reconstructs() {
        let images = rank3_dataset(40, 50, 1);
        let model = pca_fit(&images, 3).unwrap();
        for image in &images {
            let back = model.inverse(&model.transform(image).unwrap()).unwrap();
            for (a, b) in image.iter().zip(&back) {
                assert!(
                    (a - b).abs() < 1e-8,
                    "reconstruction error {}",
                    (a - b).abs()
                );
            }
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let images = rank3_dataset(40, 50, 2);
        let model = pca_fit(&images, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = model.components[i]
                    .iter()
                    .zip(&model.components[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "⟨c{i}, c{j}⟩ = {dot}");
            }
        }
    }

    #[test]
    fn reconstruction_error_non_increasing_in_k() {
        // Full-rank noisy data; PCA optimality makes the residual shrink
        // as components are added.
        let mut rng = seeded(3);
        let images: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..40).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let mut previous = f64::INFINITY;
        for k in 1..=3 {
            let model = pca_fit(&images, k).unwrap();
            let total: f64 = images
                .iter()
                .map(|img| {
                    let back = model.inverse(&model.transform(img).unwrap()).unwrap();
                    img.iter()
                        .zip(&back)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .sum();
            assert!(
                total <= previous + 1e-9,
                "k = {k}: residual {total} grew past {previous}"
            );
            previous = total;
        }
    }

    #[test]
    fn mean_image_maps_to_zero_features() {
        let images = rank3_dataset(25, 30, 4);
        let model = pca_fit(&images, 3).unwrap();
        let features = model.transform(&model.mean.clone()).unwrap();
        assert!(features.iter().all(|f| f.abs() < 1e-10));
        let back = model.inverse(&features).unwrap();
        for (a, b) in model.mean.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_deficient_data_fails() {
        // All images on a line: only one direction of variance.
        let base: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let images: Vec<Vec<f64>> = (0..10)
            .map(|i| base.iter().map(|&b| b * i as f64).collect())
            .collect();
        assert!(matches!(pca_fit(&images, 3), Err(Error::FitFailure(_))));
    }

    #[test]
    fn probability_map_examples() {
        // A model with symmetric ranges so normalised features are easy
        // to dial in.
        let model = PcaModel {
            mean: vec![0.0; 4],
            components: vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            feature_min: vec![-1.0; 3],
            feature_max: vec![1.0; 3],
        };
        // x_norm = (0.5, 0.5, 0.5) → uniform.
        let p = model.feature_to_prob(&[0.0, 0.0, 0.0]).unwrap();
        for &v in p.values() {
            assert!((v - 0.25).abs() < 1e-12);
        }
        // x_norm = (0, 0, 0) → all mass on the anchor.
        let p = model.feature_to_prob(&[-1.0, -1.0, -1.0]).unwrap();
        assert_eq!(p.values(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn probability_map_roundtrips() {
        let images = rank3_dataset(40, 50, 5);
        let model = pca_fit(&images, 3).unwrap();
        let mut rng = seeded(6);
        for _ in 0..1000 {
            let features: Vec<f64> = (0..3)
                .map(|i| rng.random_range(model.feature_min[i]..model.feature_max[i]))
                .collect();
            let p = model.feature_to_prob(&features).unwrap();
            let back = model.prob_to_feature(&p).unwrap();
            for (a, b) in features.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10, "roundtrip error {}", (a - b).abs());
            }
        }
    }

    #[test]
    fn inversion_fails_on_zero_anchor() {
        let images = rank3_dataset(40, 50, 7);
        let model = pca_fit(&images, 3).unwrap();
        let p = ProbVector::new(vec![0.5, 0.3, 0.2, 0.0]).unwrap();
        assert!(matches!(
            model.prob_to_feature(&p),
            Err(Error::InversionFailure(_))
        ));
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize(&[0.0, 0.0], 0.35), vec![0, 0]);
        assert_eq!(binarize(&[0.4, 0.6], 0.5), vec![0, 1]);
        // Idempotent under the same threshold.
        let image = [0.1, 0.34, 0.35, 0.9];
        let once = binarize(&image, 0.35);
        let as_floats: Vec<f64> = once.iter().map(|&b| b as f64).collect();
        assert_eq!(binarize(&as_floats, 0.35), once);
    }

    #[test]
    fn model_json_roundtrip() {
        let images = rank3_dataset(25, 30, 8);
        let model = pca_fit(&images, 3).unwrap();
        let text = serde_json::to_string(&model).unwrap();
        let parsed: PcaModel = serde_json::from_str(&text).unwrap();
        assert_eq!(model.mean, parsed.mean);
        assert_eq!(model.components, parsed.components);
        assert_eq!(model.feature_min, parsed.feature_min);
        assert_eq!(model.feature_max, parsed.feature_max);
    }
}
