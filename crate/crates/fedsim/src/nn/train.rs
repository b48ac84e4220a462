//! Local training loop: shuffle, batch, forward/backward/step.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::nn::loss::bce_loss;
use crate::nn::model::{Batch, MlpModel, Mode};

/// Row-index batches for one epoch. The last batch may be smaller than
/// `batch_size`; a trailing batch of a single row is merged into the previous
/// batch so train-mode batch statistics stay defined.
pub fn batch_boundaries(n: usize, batch_size: usize) -> Vec<(usize, usize)> {
    let mut bounds = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + batch_size).min(n);
        bounds.push((start, end));
        start = end;
    }
    if bounds.len() >= 2 {
        let (last_start, last_end) = *bounds.last().unwrap();
        if last_end - last_start == 1 {
            bounds.pop();
            bounds.last_mut().unwrap().1 = last_end;
        }
    }
    bounds
}

impl MlpModel {
    /// Run `epochs` full passes over `data`: each pass shuffles the row order
    /// with the model's generator, slices it into batches and applies
    /// forward / backward / Adam per batch. Returns the mean batch loss of
    /// the final epoch.
    pub fn train_epochs(&mut self, data: &Batch, epochs: usize, batch_size: usize) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::Config("training data is empty".into()));
        }
        if epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        let n = data.len();
        let mut last_epoch_loss = 0.0;
        for _ in 0..epochs {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(self.rng_mut());
            let bounds = batch_boundaries(n, batch_size);
            let mut epoch_loss = 0.0;
            for &(start, end) in &bounds {
                let idx = &order[start..end];
                let features = data.features.select_rows(idx);
                let labels: Vec<f64> = idx.iter().map(|&i| data.labels[i]).collect();
                let batch = Batch::new(features, labels)?;
                let (preds, cache) = self.forward(&batch, Mode::Train)?;
                epoch_loss += bce_loss(&preds, &batch.labels)?;
                let grad = self.backward(&cache, &batch.labels)?;
                self.adam_step(&grad)?;
            }
            last_epoch_loss = epoch_loss / bounds.len() as f64;
        }
        Ok(last_epoch_loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries_merge_trailing_singleton() {
        assert_eq!(batch_boundaries(100, 32), vec![(0, 32), (32, 64), (64, 96), (96, 100)]);
        assert_eq!(batch_boundaries(33, 32), vec![(0, 33)]);
        assert_eq!(batch_boundaries(65, 32), vec![(0, 32), (32, 65)]);
        assert_eq!(batch_boundaries(1, 32), vec![(0, 1)]);
        assert_eq!(batch_boundaries(32, 32), vec![(0, 32)]);
    }
}
