//! Binary-classification evaluation: confusion matrix, accuracy, precision,
//! recall and F1. Label 1 (attack) is the positive class; a prediction counts
//! as positive when it is >= the threshold. Any 0/0 metric is reported as 0.0
//! with the degenerate flag set so result tables never hide undefined cells.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub threshold: f64,
    pub n_samples: usize,
    /// True when any metric hit a 0/0 case and was reported as 0.0.
    pub degenerate: bool,
}

/// Tally predicted-vs-actual counts at the given threshold.
pub fn confusion(predictions: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let mut cm = ConfusionMatrix { tp: 0, fp: 0, tn: 0, fn_: 0 };
    for (&p, &y) in predictions.iter().zip(labels) {
        let positive = p >= threshold;
        match (positive, y) {
            (true, 1) => cm.tp += 1,
            (true, _) => cm.fp += 1,
            (false, 1) => cm.fn_ += 1,
            (false, _) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Derive the four scores from a confusion matrix.
pub fn report(cm: &ConfusionMatrix, threshold: f64) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Shape("empty confusion matrix".into()));
    }
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| -> f64 {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let accuracy = (cm.tp + cm.tn) as f64 / total as f64;
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = if precision + recall == 0.0 {
        degenerate = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MetricsReport { accuracy, precision, recall, f1, threshold, n_samples: total, degenerate })
}

/// Convenience: confusion + report in one call.
pub fn evaluate(predictions: &[f64], labels: &[u8], threshold: f64) -> Result<MetricsReport> {
    report(&confusion(predictions, labels, threshold)?, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_split() {
        let cm = confusion(&[0.9, 0.1], &[1, 0], 0.5).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 1, fp: 0, tn: 1, fn_: 0 });
        let r = report(&cm, 0.5).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 1.0);
        assert_eq!(r.f1, 1.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn threshold_boundary_counts_positive() {
        let cm = confusion(&[0.5], &[0], 0.5).unwrap();
        assert_eq!(cm.fp, 1);
        assert_eq!(cm.total(), 1);
    }

    #[test]
    fn hand_tallied_example() {
        let cm = confusion(&[0.6, 0.4, 0.7, 0.2], &[1, 1, 0, 0], 0.5).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 1, fp: 1, tn: 1, fn_: 1 });
        let r = report(&cm, 0.5).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.precision, 0.5);
        assert_eq!(r.recall, 0.5);
        assert_eq!(r.f1, 0.5);
    }

    #[test]
    fn zero_over_zero_yields_zero_with_flag() {
        let cm = ConfusionMatrix { tp: 0, fp: 0, tn: 1, fn_: 2 };
        let r = report(&cm, 0.5).unwrap();
        assert_eq!(r.precision, 0.0);
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.f1, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(confusion(&[0.1], &[1, 0], 0.5).is_err());
    }

    #[test]
    fn empty_matrix_rejected() {
        let cm = ConfusionMatrix { tp: 0, fp: 0, tn: 0, fn_: 0 };
        assert!(report(&cm, 0.5).is_err());
    }
}
