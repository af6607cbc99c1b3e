//! `gen-images`: hybrid-generator training on compressed digit images.

use clap::Args as ClapArgs;
use serde_json::json;

use photonic_qgan::data::{
    binarize, digit_images, load_mnist_idx, pca_fit, PcaModel, FIXTURE_IMAGES_PER_DIGIT, IMAGE_SIDE,
};
use photonic_qgan::gan::{train_images, ImageGanConfig, ImageGanOutcome};
use photonic_qgan::quantum::ProbVector;

use crate::config::FileConfig;
use crate::manifest::ManifestBuilder;
use crate::{output, pgm, svg, UsageError};

use super::learn_state::{mean, median, std};
use super::round_seeds;

#[derive(ClapArgs)]
pub struct Args {
    /// Digit to learn.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=9))]
    digit: u8,

    /// Comma-separated MNIST IDX paths `images,labels`.
    #[arg(long, conflicts_with = "fixture")]
    mnist: Option<String>,

    /// Use the bundled deterministic digit fixture instead of IDX files.
    #[arg(long)]
    fixture: bool,

    #[arg(long)]
    epochs: Option<usize>,

    #[arg(long)]
    batch: Option<usize>,

    #[arg(long)]
    rounds: Option<usize>,

    #[arg(long, default_value_t = 5)]
    seed: u64,

    /// Binarization threshold for the rendered images.
    #[arg(long)]
    threshold: Option<f64>,

    #[arg(long)]
    out: Option<std::path::PathBuf>,

    #[arg(long)]
    svg: bool,
}

fn load_dataset(args: &Args, fixture_count: usize) -> anyhow::Result<Vec<Vec<f64>>> {
    if args.fixture {
        return Ok(digit_images(args.digit, fixture_count, 0x5EED));
    }
    let Some(spec) = &args.mnist else {
        return Err(UsageError("provide --fixture or --mnist <images,labels>".to_string()).into());
    };
    let Some((images_path, labels_path)) = spec.split_once(',') else {
        return Err(UsageError(format!("--mnist takes `images,labels`, got `{spec}`")).into());
    };
    let (images_path, labels_path) = (
        std::path::Path::new(images_path),
        std::path::Path::new(labels_path),
    );
    for path in [images_path, labels_path] {
        if !path.exists() {
            return Err(
                UsageError(format!("dataset file {} does not exist", path.display())).into(),
            );
        }
    }
    let dataset = load_mnist_idx(images_path, labels_path)?;
    let filtered: Vec<Vec<f64>> = dataset
        .into_iter()
        .filter(|img| img.label == args.digit)
        .map(|img| img.pixels)
        .collect();
    if filtered.is_empty() {
        return Err(UsageError(format!("no images of digit {} in the dataset", args.digit)).into());
    }
    Ok(filtered)
}

fn feature_csv(model: &PcaModel, samples: &[ProbVector]) -> anyhow::Result<String> {
    let mut out = String::from("x0,x1,x2\n");
    for p in samples {
        let f = model.prob_to_feature(p)?;
        out.push_str(&format!("{},{},{}\n", f[0], f[1], f[2]));
    }
    Ok(out)
}

pub fn run(args: Args, file_config: &FileConfig) -> anyhow::Result<()> {
    let section = &file_config.gen_images;
    let config = ImageGanConfig {
        lr_nn: section.lr_nn.unwrap_or(0.02),
        lr_q: section.lr_q.unwrap_or(0.08),
        lr_c: section.lr_c.unwrap_or(0.02),
        batch_size: args.batch.or(section.batch_size).unwrap_or(5),
        epochs: args.epochs.or(section.epochs).unwrap_or(200),
        rounds: args.rounds.or(section.rounds).unwrap_or(5),
        fd_epsilon: section.fd_epsilon.unwrap_or(0.02),
        lambda: section.lambda.unwrap_or(0.5),
        eval_samples: section.eval_samples.unwrap_or(200),
        ..ImageGanConfig::default()
    };
    config.validate()?;
    let threshold = args
        .threshold
        .or(section.binarize_threshold)
        .unwrap_or(0.35);
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(UsageError(format!("--threshold must lie in (0, 1), got {threshold}")).into());
    }
    let fixture_count = section.fixture_count.unwrap_or(FIXTURE_IMAGES_PER_DIGIT);

    let images = load_dataset(&args, fixture_count)?;
    let model = pca_fit(&images, 3)?;
    let dataset: Vec<ProbVector> = images
        .iter()
        .map(|img| model.feature_to_prob(&model.transform(img)?))
        .collect::<photonic_qgan::Result<_>>()?;

    let dir = output::resolve(
        args.out.as_deref(),
        file_config.output_dir.as_deref(),
        "gen-images",
    );
    output::prepare(&dir)?;
    let seeds = round_seeds(args.seed, config.rounds);
    let mut manifest = ManifestBuilder::new(
        "gen-images",
        json!({
            "digit": args.digit,
            "source": if args.fixture { "fixture".to_string() } else { args.mnist.clone().unwrap_or_default() },
            "dataset_size": dataset.len(),
            "threshold": threshold,
            "base_seed": args.seed,
            "trainer": config,
        }),
        seeds.clone(),
    );
    manifest.write_output(
        &dir.join("pca_model.json"),
        serde_json::to_string_pretty(&model)?,
    )?;

    let mut outcomes: Vec<ImageGanOutcome> = Vec::new();
    for (round, &seed) in seeds.iter().enumerate() {
        let outcome = train_images(&config, &dataset, seed)?;
        manifest.write_output(
            &dir.join(format!("round_{round}.csv")),
            outcome.history.to_csv(),
        )?;
        manifest.write_output(
            &dir.join(format!("generated_features_round_{round}.csv")),
            feature_csv(&model, &outcome.sample_bank)?,
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
                &format!("digit {} learning, round {round}", args.digit),
                &[("KLD", &klds[..]), ("critic loss", &losses[..])],
            );
            manifest.write_output(&dir.join(format!("round_{round}.svg")), chart)?;
        }
        outcomes.push(outcome);
    }

    // Binarized side-by-side reconstructions: the first eight real images
    // against eight samples generated by the last round.
    let samples = 8.min(dataset.len());
    let mut tiles: Vec<Vec<f64>> = Vec::new();
    for image in images.iter().take(samples) {
        tiles.push(
            binarize(image, threshold)
                .iter()
                .map(|&b| b as f64)
                .collect(),
        );
    }
    let bank = &outcomes.last().expect("at least one round").sample_bank;
    for p in bank.iter().take(samples) {
        let reconstructed = model.inverse(&model.prob_to_feature(p)?)?;
        tiles.push(
            binarize(&reconstructed, threshold)
                .iter()
                .map(|&b| b as f64)
                .collect(),
        );
    }
    for (j, tile) in tiles.iter().take(samples).enumerate() {
        manifest.write_output(
            &dir.join(format!("real_{j}.pgm")),
            pgm::image_to_pgm(tile, IMAGE_SIDE, IMAGE_SIDE),
        )?;
    }
    for (j, tile) in tiles.iter().skip(samples).enumerate() {
        manifest.write_output(
            &dir.join(format!("generated_{j}.pgm")),
            pgm::image_to_pgm(tile, IMAGE_SIDE, IMAGE_SIDE),
        )?;
    }
    manifest.write_output(
        &dir.join("grid.pgm"),
        pgm::grid_to_pgm(&tiles, IMAGE_SIDE, IMAGE_SIDE, samples),
    )?;

    let final_klds: Vec<f64> = outcomes
        .iter()
        .map(|o| o.history.final_record().metric)
        .collect();
    let final_losses: Vec<f64> = outcomes
        .iter()
        .map(|o| o.history.final_record().discriminator_loss)
        .collect();
    let summary = json!({
        "digit": args.digit,
        "rounds": config.rounds,
        "epochs": config.epochs,
        "dataset_size": dataset.len(),
        "final_kld_per_round": final_klds,
        "median_final_kld": median(&final_klds),
        "mean_final_kld": mean(&final_klds),
        "std_final_kld": std(&final_klds),
        "final_critic_loss_per_round": final_losses,
        "per_round": outcomes
            .iter()
            .zip(&seeds)
            .map(|(o, &seed)| json!({
                "seed": seed,
                "final_kld": o.history.final_record().metric,
                "quantum": o.generator.quantum,
                "head": photonic_qgan::nn::NetworkCheckpoint::from(&o.generator.head),
                "critic": o.critic,
            }))
            .collect::<Vec<_>>(),
        "dataset_mean": outcomes.last().map(|_| {
            let mut acc = [0.0f64; 4];
            for p in &dataset {
                for (a, v) in acc.iter_mut().zip(p.values()) {
                    *a += v / dataset.len() as f64;
                }
            }
            acc.to_vec()
        }),
        "mean_generated_last_round": outcomes.last().map(|o| o.mean_generated.values().to_vec()),
    });
    manifest.write_output(
        &dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    manifest.finalise(&dir)?;
    println!(
        "gen-images (digit {}): median final KLD {:.4} over {} rounds → {}",
        args.digit,
        median(&final_klds),
        config.rounds,
        dir.display()
    );
    Ok(())
}
