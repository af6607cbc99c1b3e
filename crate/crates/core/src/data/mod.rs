//! Target-distribution construction, MNIST ingestion, PCA compression
//! and the feature-to-probability map.

mod distributions;
mod fixture;
mod mnist;
mod pca;

pub use distributions::{build_target, DistributionKind, DistributionSpec, TRUNCATION_INTERVAL};
pub use fixture::{digit_images, FIXTURE_IMAGES_PER_DIGIT, IMAGE_PIXELS, IMAGE_SIDE};
pub use mnist::{load_mnist_idx, write_idx_images, write_idx_labels, MnistImage};
pub use pca::{binarize, pca_fit, PcaModel};

use crate::quantum::ProbVector;

/// CSV export of a 4-point distribution with the header
/// `bin,probability`.
pub fn distribution_csv(p: &ProbVector) -> String {
    let mut out = String::from("bin,probability\n");
    for (bin, value) in p.values().iter().enumerate() {
        out.push_str(&format!("{bin},{value}\n"));
    }
    out
}
