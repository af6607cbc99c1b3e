//! Optional JSON config file. Precedence: command-line flags, then the
//! file, then built-in defaults.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Default root for output directories; the `QGAN_OUT_DIR`
    /// environment variable is consulted when this is absent.
    pub output_dir: Option<std::path::PathBuf>,
    #[serde(default)]
    pub learn_state: LearnStateConfig,
    #[serde(default)]
    pub load_distribution: LoadDistributionConfig,
    #[serde(default)]
    pub gen_images: GenImagesConfig,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnStateConfig {
    pub rounds: Option<usize>,
    pub epochs: Option<usize>,
    pub lr_g: Option<f64>,
    pub lr_d: Option<f64>,
    pub d_steps_per_g_step: Option<usize>,
    pub init_std: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadDistributionConfig {
    pub rounds: Option<usize>,
    pub epochs: Option<usize>,
    pub lr_g: Option<f64>,
    pub lr_c: Option<f64>,
    pub lambda: Option<f64>,
    pub c_steps: Option<usize>,
    pub init_std: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenImagesConfig {
    pub rounds: Option<usize>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub lr_nn: Option<f64>,
    pub lr_q: Option<f64>,
    pub lr_c: Option<f64>,
    pub fd_epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub fixture_count: Option<usize>,
    pub eval_samples: Option<usize>,
    pub binarize_threshold: Option<f64>,
}

pub fn load(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}
