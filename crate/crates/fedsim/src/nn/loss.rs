//! Binary cross-entropy.

use crate::error::{Error, Result};

/// Predictions are clamped away from {0, 1} before the log.
pub const BCE_CLAMP: f64 = 1e-7;

fn check_lengths(predictions: &[f64], labels: &[f64]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Shape("empty prediction vector".into()));
    }
    Ok(())
}

/// Mean of `-[y ln p + (1 - y) ln(1 - p)]` with `p` clamped to
/// `[BCE_CLAMP, 1 - BCE_CLAMP]`.
pub fn bce_loss(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    check_lengths(predictions, labels)?;
    let n = predictions.len() as f64;
    let mut total = 0.0;
    for (&p, &y) in predictions.iter().zip(labels) {
        let p = p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    Ok(total / n)
}

/// Gradient of `bce_loss` with respect to each prediction.
///
/// Where the clamp is active the loss is locally constant in `p`, so the
/// gradient is zero there; this keeps finite differences and analytic
/// gradients in agreement even under saturation.
pub fn bce_grad(predictions: &[f64], labels: &[f64]) -> Result<Vec<f64>> {
    check_lengths(predictions, labels)?;
    let n = predictions.len() as f64;
    Ok(predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            if (BCE_CLAMP..=1.0 - BCE_CLAMP).contains(&p) {
                (p - y) / (p * (1.0 - p)) / n
            } else {
                0.0
            }
        })
        .collect())
}
