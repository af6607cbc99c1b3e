//! `learn-state`: PQ-GAN single-qubit state learning.

use clap::Args as ClapArgs;
use serde::Serialize;
use serde_json::json;

use photonic_qgan::gan::{mixed_target, pure_target, train_pqgan, PqGanConfig, PqGanOutcome};
use photonic_qgan::quantum::{fidelity, DensityMatrix};
use photonic_qgan::rng::child;
use photonic_qgan::tomography::{measure_all, reconstruct, DensityMatrixJson, Shots};

use crate::config::FileConfig;
use crate::manifest::ManifestBuilder;
use crate::{output, svg, UsageError};

use super::round_seeds;

#[derive(ClapArgs)]
pub struct Args {
    /// Target state: `pure` (|+⟩⟨+|), `mixed` (0.7|0⟩⟨0|+0.3|1⟩⟨1|), or a
    /// path to a density-matrix JSON file ({qubits, re, im}).
    #[arg(long, default_value = "pure")]
    target: String,

    #[arg(long)]
    rounds: Option<usize>,

    #[arg(long)]
    epochs: Option<usize>,

    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Tomography budget for the final-state reconstruction: `exact` or a
    /// shot count per basis.
    #[arg(long, default_value = "exact")]
    shots: String,

    /// Output directory.
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// Also render SVG quick-look charts.
    #[arg(long)]
    svg: bool,
}

fn parse_shots(text: &str) -> Result<Shots, UsageError> {
    if text == "exact" {
        return Ok(Shots::Exact);
    }
    text.parse::<u64>().map(Shots::Finite).map_err(|_| {
        UsageError(format!(
            "--shots takes `exact` or a shot count, got `{text}`"
        ))
    })
}

fn parse_target(text: &str) -> anyhow::Result<DensityMatrix> {
    match text {
        "pure" => Ok(pure_target()),
        "mixed" => Ok(mixed_target()),
        path => {
            let contents = std::fs::read_to_string(path).map_err(|e| {
                UsageError(format!(
                    "--target `{path}` is not pure/mixed or a readable file: {e}"
                ))
            })?;
            let parsed: DensityMatrixJson = serde_json::from_str(&contents).map_err(|e| {
                UsageError(format!(
                    "target file {path} is not a density-matrix JSON: {e}"
                ))
            })?;
            let rho = parsed
                .to_density_matrix()
                .map_err(|e| UsageError(format!("target in {path} is not physical: {e}")))?;
            if rho.qubit_count() != 1 {
                return Err(UsageError("state learning targets one qubit".to_string()).into());
            }
            Ok(rho)
        }
    }
}

#[derive(Serialize)]
struct RoundSummary {
    seed: u64,
    final_fidelity: f64,
    best_fidelity: f64,
    final_generator_loss: f64,
    theta_g: Vec<f64>,
    theta_d: Vec<f64>,
}

pub fn run(args: Args, file_config: &FileConfig) -> anyhow::Result<()> {
    let shots = parse_shots(&args.shots)?;
    let sigma = parse_target(&args.target)?;
    let section = &file_config.learn_state;
    let config = PqGanConfig {
        lr_g: section.lr_g.unwrap_or(0.02),
        lr_d: section.lr_d.unwrap_or(0.1),
        epochs: args.epochs.or(section.epochs).unwrap_or(200),
        d_steps_per_g_step: section.d_steps_per_g_step.unwrap_or(3),
        rounds: args.rounds.or(section.rounds).unwrap_or(5),
        init_std: section.init_std.unwrap_or(0.2),
    };
    config.validate()?;

    let dir = output::resolve(
        args.out.as_deref(),
        file_config.output_dir.as_deref(),
        "learn-state",
    );
    output::prepare(&dir)?;
    let seeds = round_seeds(args.seed, config.rounds);
    let mut manifest = ManifestBuilder::new(
        "learn-state",
        json!({
            "target": args.target,
            "shots": args.shots,
            "base_seed": args.seed,
            "trainer": config,
        }),
        seeds.clone(),
    );

    let mut outcomes: Vec<PqGanOutcome> = Vec::new();
    for (round, &seed) in seeds.iter().enumerate() {
        let outcome = train_pqgan(&config, &sigma, seed)?;
        manifest.write_output(
            &dir.join(format!("round_{round}.csv")),
            outcome.history.to_csv(),
        )?;
        if args.svg {
            let fidelities: Vec<f64> = outcome.history.records.iter().map(|r| r.metric).collect();
            let losses: Vec<f64> = outcome
                .history
                .records
                .iter()
                .map(|r| r.discriminator_loss)
                .collect();
            let chart = svg::line_chart(
                &format!("state learning, round {round}"),
                &[
                    ("fidelity", &fidelities[..]),
                    ("negative D loss", &losses[..]),
                ],
            );
            manifest.write_output(&dir.join(format!("round_{round}.svg")), chart)?;
        }

        // Tomography of the final generated state under the requested
        // shot budget, against the exact target.
        let mut tomo_rng = child(seed, 0xF1DE);
        let reconstructed = reconstruct(&measure_all(&outcome.final_state, shots, &mut tomo_rng))?;
        let tomography = json!({
            "shots": args.shots,
            "target": DensityMatrixJson::from(&sigma),
            "generated": DensityMatrixJson::from(&outcome.final_state),
            "reconstructed": DensityMatrixJson::from(&reconstructed),
            "fidelity_reconstructed_vs_target": fidelity(&reconstructed, &sigma)?,
            "fidelity_generated_vs_target": outcome.final_fidelity,
        });
        manifest.write_output(
            &dir.join(format!("tomography_round_{round}.json")),
            serde_json::to_string_pretty(&tomography)?,
        )?;
        outcomes.push(outcome);
    }

    let finals: Vec<f64> = outcomes.iter().map(|o| o.final_fidelity).collect();
    let bests: Vec<f64> = outcomes.iter().map(|o| o.best_fidelity).collect();
    let summary = json!({
        "rounds": config.rounds,
        "epochs": config.epochs,
        "mean_final_fidelity": mean(&finals),
        "std_final_fidelity": std(&finals),
        "median_final_fidelity": median(&finals),
        "mean_best_fidelity": mean(&bests),
        "std_best_fidelity": std(&bests),
        "per_round": outcomes
            .iter()
            .zip(&seeds)
            .map(|(o, &seed)| RoundSummary {
                seed,
                final_fidelity: o.final_fidelity,
                best_fidelity: o.best_fidelity,
                final_generator_loss: o.history.final_record().generator_loss,
                theta_g: o.theta_g.clone(),
                theta_d: o.theta_d.clone(),
            })
            .collect::<Vec<_>>(),
    });
    manifest.write_output(
        &dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    manifest.finalise(&dir)?;
    println!(
        "learn-state: {} rounds × {} epochs, mean final fidelity {:.4} ± {:.4} → {}",
        config.rounds,
        config.epochs,
        mean(&finals),
        std(&finals),
        dir.display()
    );
    Ok(())
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite metrics"));
    sorted[sorted.len() / 2]
}
