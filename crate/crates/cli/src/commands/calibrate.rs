//! `calibrate`: fit the fringe model to a measured current/counts CSV.

use clap::Args as ClapArgs;
use serde_json::json;

use photonic_qgan::chip::{fit_calibration, read_calibration_csv};

use crate::config::FileConfig;
use crate::manifest::ManifestBuilder;
use crate::{output, UsageError};

#[derive(ClapArgs)]
pub struct Args {
    /// CSV with header `current_mA,counts_per_s`.
    #[arg(long)]
    input: std::path::PathBuf,

    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

pub fn run(args: Args, file_config: &FileConfig) -> anyhow::Result<()> {
    if !args.input.exists() {
        return Err(UsageError(format!(
            "input file {} does not exist",
            args.input.display()
        ))
        .into());
    }
    let samples = read_calibration_csv(&args.input)?;
    let fit = fit_calibration(&samples)?;

    let dir = output::resolve(
        args.out.as_deref(),
        file_config.output_dir.as_deref(),
        "calibrate",
    );
    output::prepare(&dir)?;
    let mut manifest = ManifestBuilder::new(
        "calibrate",
        json!({ "input": args.input.display().to_string(), "samples": samples.len() }),
        Vec::new(),
    );
    manifest.write_output(
        &dir.join("calibration.json"),
        serde_json::to_string_pretty(&fit)?,
    )?;

    // Dense model curve over the measured current range, for plotting.
    let lo = samples
        .iter()
        .map(|s| s.current_ma)
        .fold(f64::INFINITY, f64::min);
    let hi = samples
        .iter()
        .map(|s| s.current_ma)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut curve = String::from("current_mA,counts_per_s\n");
    let points = 500;
    for i in 0..=points {
        let current = lo + (hi - lo) * i as f64 / points as f64;
        curve.push_str(&format!(
            "{},{}\n",
            current,
            fit.calibration.predicted_counts(current)
        ));
    }
    manifest.write_output(&dir.join("fitted_curve.csv"), curve)?;
    manifest.finalise(&dir)?;
    println!(
        "calibrate: a = {:.6}, alpha = {:.8}, beta = {:.8}, b = {:.6}, rms = {:.4} → {}",
        fit.calibration.a,
        fit.calibration.alpha,
        fit.calibration.beta,
        fit.calibration.b,
        fit.rms,
        dir.display()
    );
    Ok(())
}
