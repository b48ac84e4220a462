//! Standardization fitted on training data only.
//!
//! Uses the population (biased) standard deviation. Zero-variance columns are
//! assigned std = 1 and flagged, which maps them to all zeros.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Indices of columns whose variance was zero at fit time.
    pub constant_columns: Vec<usize>,
}

pub fn fit_standardize(train: &Dataset) -> ScalerParams {
    let n = train.n_rows() as f64;
    let d = train.n_features();
    let mut means = vec![0.0; d];
    for row in train.features.iter_rows() {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut vars = vec![0.0; d];
    for row in train.features.iter_rows() {
        for ((s, &v), &m) in vars.iter_mut().zip(row).zip(&means) {
            let c = v - m;
            *s += c * c;
        }
    }
    let mut constant_columns = Vec::new();
    let mut stds = Vec::with_capacity(d);
    for (j, s) in vars.iter().enumerate() {
        let std = (s / n).sqrt();
        if std == 0.0 {
            constant_columns.push(j);
            stds.push(1.0);
        } else {
            stds.push(std);
        }
    }
    if !constant_columns.is_empty() {
        log::warn!("standardize: {} constant column(s) flagged", constant_columns.len());
    }
    ScalerParams { means, stds, constant_columns }
}

pub fn apply_standardize(ds: &Dataset, sp: &ScalerParams) -> Result<Dataset> {
    if ds.n_features() != sp.means.len() {
        return Err(Error::Shape(format!(
            "{} features vs scaler fitted on {}",
            ds.n_features(),
            sp.means.len()
        )));
    }
    let mut out = ds.clone();
    for i in 0..out.features.rows() {
        let row = out.features.row_mut(i);
        for ((v, &m), &s) in row.iter_mut().zip(&sp.means).zip(&sp.stds) {
            *v = (*v - m) / s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn two_col(rows: &[Vec<f64>]) -> Dataset {
        Dataset::new(
            Matrix::from_rows(rows),
            vec![0; rows.len()],
            (0..rows[0].len()).map(|j| format!("f{j}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn population_std_on_two_points() {
        // column [2, 4]: mean 3, population std 1, transformed [-1, 1]
        let ds = two_col(&[vec![2.0], vec![4.0]]);
        let sp = fit_standardize(&ds);
        assert_eq!(sp.means, vec![3.0]);
        assert_eq!(sp.stds, vec![1.0]);
        let out = apply_standardize(&ds, &sp).unwrap();
        assert_eq!(out.features.data(), &[-1.0, 1.0]);
    }

    #[test]
    fn constant_column_flagged_and_zeroed() {
        let ds = two_col(&[vec![5.0, 1.0], vec![5.0, 3.0], vec![5.0, 2.0]]);
        let sp = fit_standardize(&ds);
        assert_eq!(sp.constant_columns, vec![0]);
        let out = apply_standardize(&ds, &sp).unwrap();
        assert!(out.features.iter_rows().all(|r| r[0] == 0.0));
    }

    #[test]
    fn transform_of_training_set_centers_to_zero() {
        let ds = two_col(&[vec![1.0, 10.0], vec![2.0, 30.0], vec![4.0, 50.0], vec![9.0, 20.0]]);
        let sp = fit_standardize(&ds);
        let out = apply_standardize(&ds, &sp).unwrap();
        let refit = fit_standardize(&out);
        for m in refit.means {
            assert!(m.abs() < 1e-9);
        }
        for s in refit.stds {
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
