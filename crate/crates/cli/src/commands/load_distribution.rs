//! `load-distribution`: HQC-GAN distribution loading.

use clap::Args as ClapArgs;
use serde_json::json;

use photonic_qgan::data::{build_target, distribution_csv, DistributionSpec};
use photonic_qgan::gan::{train_distribution, DistributionOutcome, HqcGanConfig};
use photonic_qgan::quantum::ProbVector;
use photonic_qgan::rng::child;

use crate::config::FileConfig;
use crate::manifest::ManifestBuilder;
use crate::{output, svg, UsageError};

use super::learn_state::{mean, median, std};
use super::round_seeds;

#[derive(ClapArgs)]
pub struct Args {
    /// Target family: normal, lognormal, or bimodal.
    #[arg(long, default_value = "normal")]
    dist: String,

    #[arg(long)]
    rounds: Option<usize>,

    #[arg(long)]
    epochs: Option<usize>,

    #[arg(long, default_value_t = 11)]
    seed: u64,

    #[arg(long)]
    out: Option<std::path::PathBuf>,

    #[arg(long)]
    svg: bool,
}

fn parse_spec(text: &str) -> Result<DistributionSpec, UsageError> {
    match text {
        "normal" => Ok(DistributionSpec::paper_normal()),
        "lognormal" => Ok(DistributionSpec::paper_lognormal()),
        "bimodal" => Ok(DistributionSpec::paper_bimodal()),
        other => Err(UsageError(format!(
            "--dist takes normal, lognormal or bimodal, got `{other}`"
        ))),
    }
}

pub fn run(args: Args, file_config: &FileConfig) -> anyhow::Result<()> {
    let spec = parse_spec(&args.dist)?;
    let section = &file_config.load_distribution;
    let config = HqcGanConfig {
        lr_g: section.lr_g.unwrap_or(0.08),
        lr_c: section.lr_c.unwrap_or(0.1),
        lambda: section.lambda.unwrap_or(0.5),
        epochs: args.epochs.or(section.epochs).unwrap_or(500),
        c_steps: section.c_steps.unwrap_or(3),
        rounds: args.rounds.or(section.rounds).unwrap_or(5),
        init_std: section.init_std.unwrap_or(0.2),
        ..HqcGanConfig::default()
    };
    config.validate()?;

    let dir = output::resolve(
        args.out.as_deref(),
        file_config.output_dir.as_deref(),
        "load-distribution",
    );
    output::prepare(&dir)?;

    // The sampled target is part of the experiment: derive its stream
    // from the base seed so the whole command is reproducible.
    let target = build_target(&spec, &mut child(args.seed, 0xD157))?;
    let seeds = round_seeds(args.seed, config.rounds);
    let mut manifest = ManifestBuilder::new(
        "load-distribution",
        json!({
            "dist": args.dist,
            "spec": spec,
            "base_seed": args.seed,
            "trainer": config,
        }),
        seeds.clone(),
    );
    manifest.write_output(&dir.join("target.csv"), distribution_csv(&target))?;

    let mut outcomes: Vec<DistributionOutcome> = Vec::new();
    for (round, &seed) in seeds.iter().enumerate() {
        let outcome = train_distribution(&config, &target, seed)?;
        manifest.write_output(
            &dir.join(format!("round_{round}.csv")),
            outcome.history.to_csv(),
        )?;
        manifest.write_output(
            &dir.join(format!("generated_round_{round}.csv")),
            distribution_csv(&outcome.final_distribution),
        )?;
        if args.svg {
            let klds: Vec<f64> = outcome.history.records.iter().map(|r| r.metric).collect();
            let losses: Vec<f64> = outcome
                .history
                .records
                .iter()
                .map(|r| r.discriminator_loss)
                .collect();
            let chart = svg::line_chart(
                &format!("{} loading, round {round}", args.dist),
                &[("KLD", &klds[..]), ("critic loss", &losses[..])],
            );
            manifest.write_output(&dir.join(format!("round_{round}.svg")), chart)?;
        }
        outcomes.push(outcome);
    }

    // Mean of the final generated distributions across rounds.
    let mut mean_generated = [0.0f64; 4];
    for outcome in &outcomes {
        for (acc, v) in mean_generated
            .iter_mut()
            .zip(outcome.final_distribution.values())
        {
            *acc += v / outcomes.len() as f64;
        }
    }
    let mean_generated = ProbVector::new(mean_generated.to_vec())?;
    manifest.write_output(
        &dir.join("generated_mean.csv"),
        distribution_csv(&mean_generated),
    )?;

    let final_klds: Vec<f64> = outcomes
        .iter()
        .map(|o| o.history.final_record().metric)
        .collect();
    let summary = json!({
        "dist": args.dist,
        "rounds": config.rounds,
        "epochs": config.epochs,
        "target": target.values(),
        "mean_generated": mean_generated.values(),
        "final_kld_per_round": final_klds,
        "median_final_kld": median(&final_klds),
        "mean_final_kld": mean(&final_klds),
        "std_final_kld": std(&final_klds),
        "per_round": outcomes
            .iter()
            .zip(&seeds)
            .map(|(o, &seed)| json!({
                "seed": seed,
                "final_kld": o.history.final_record().metric,
                "theta_g": o.theta_g,
                "critic": o.critic,
            }))
            .collect::<Vec<_>>(),
    });
    manifest.write_output(
        &dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    manifest.finalise(&dir)?;
    println!(
        "load-distribution ({}): median final KLD {:.4} over {} rounds → {}",
        args.dist,
        median(&final_klds),
        config.rounds,
        dir.display()
    );
    Ok(())
}
