//! Per-epoch training records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One epoch of adversarial training. For state learning the metric is
/// the fidelity against the target; for the WGAN tasks it is the KLD of
/// the target against the generated distribution.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub generator_loss: f64,
    pub discriminator_loss: f64,
    pub metric: f64,
    /// Snapshot of the trainable parameters after this epoch.
    pub parameters: Vec<f64>,
}

/// The full trace of one training round.
///
/// Records hold one entry per trained epoch; a zero-epoch run keeps a
/// single evaluation-only record labelled epoch 0.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TrainingHistory {
    pub seed: u64,
    pub records: Vec<EpochRecord>,
}

impl TrainingHistory {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            seed,
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, record: EpochRecord) -> Result<()> {
        if !record.generator_loss.is_finite()
            || !record.discriminator_loss.is_finite()
            || !record.metric.is_finite()
            || record.parameters.iter().any(|p| !p.is_finite())
        {
            return Err(Error::TrainingAborted {
                epoch: record.epoch,
                details: format!(
                    "non-finite record (loss_g = {}, loss_d = {}, metric = {})",
                    record.generator_loss, record.discriminator_loss, record.metric
                ),
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn final_record(&self) -> &EpochRecord {
        self.records
            .last()
            .expect("training histories hold at least one record")
    }

    /// The record with the largest metric (used for best-epoch fidelity).
    pub fn best_metric_record(&self) -> &EpochRecord {
        self.records
            .iter()
            .max_by(|a, b| a.metric.partial_cmp(&b.metric).expect("finite metrics"))
            .expect("training histories hold at least one record")
    }

    /// Standard deviation of the metric over the final `window` records.
    pub fn metric_std_over_last(&self, window: usize) -> f64 {
        let n = self.records.len();
        let slice = &self.records[n.saturating_sub(window)..];
        let count = slice.len() as f64;
        let mean = slice.iter().map(|r| r.metric).sum::<f64>() / count;
        (slice.iter().map(|r| (r.metric - mean).powi(2)).sum::<f64>() / count).sqrt()
    }

    /// CSV export with the stable header `epoch,loss_g,loss_d,metric`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,loss_g,loss_d,metric\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.epoch, r.generator_loss, r.discriminator_loss, r.metric
            ));
        }
        out
    }
}
