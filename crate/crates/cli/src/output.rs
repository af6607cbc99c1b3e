//! Output directory resolution: `--out` flag, then the config file's
//! `output_dir`, then `$QGAN_OUT_DIR`, then `./runs`, each with the
//! experiment name appended for the non-flag sources.

use std::path::{Path, PathBuf};

use anyhow::Context;

pub fn resolve(flag: Option<&Path>, config_root: Option<&Path>, experiment: &str) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    let root = config_root
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("QGAN_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(experiment)
}

pub fn prepare(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
}
