//! Data pipeline: CSV ingestion, imputation, encoding, standardization,
//! SMOTE, copula augmentation, stratified splitting, client partitioning and
//! a synthetic generator for desk-scale experiments.
//!
//! The pipeline order is fixed: impute -> encode -> (augment) -> 80/20 split
//! -> standardize fitted on train -> SMOTE on train only -> partition. Test
//! rows never influence a fitted statistic.

mod copula;
mod encode;
mod scale;
mod schema;
mod smote;
mod split;
mod synth;
mod table;

pub use copula::copula_augment;
pub use encode::encode;
pub use scale::{apply_standardize, fit_standardize, ScalerParams};
pub use schema::{ColumnRole, FeatureSchema};
pub use smote::smote;
pub use split::{
    default_benign_ramp, partition_iid, partition_noniid, split, Partition, PartitionStrategy,
};
pub use synth::synth_evcs_dataset;
pub use table::{load_csv, ColumnValues, RawColumn, RawTable};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::Batch;

/// Fully numeric feature matrix with binary labels (0 = benign, 1 = attack).
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Dataset> {
        if features.rows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows vs {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.cols() != feature_names.len() {
            return Err(Error::Shape(format!(
                "{} feature columns vs {} names",
                features.cols(),
                feature_names.len()
            )));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::Data("labels must be 0 or 1".into()));
        }
        Ok(Dataset { features, labels, feature_names })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn class_indices(&self, class: u8) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &y)| y == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// (benign, attack) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let attack = self.labels.iter().filter(|&&y| y == 1).count();
        (self.labels.len() - attack, attack)
    }

    pub fn push_row(&mut self, row: &[f64], label: u8) {
        self.features.push_row(row);
        self.labels.push(label);
    }

    /// View as one training batch with f64 labels.
    pub fn to_batch(&self) -> Result<Batch> {
        Batch::new(
            self.features.clone(),
            self.labels.iter().map(|&y| f64::from(y)).collect(),
        )
    }
}
