//! Gaussian-copula augmentation, fitted per class so synthetic rows never
//! flip labels.
//!
//! Per class: features are rank-transformed to standard normal scores
//! (average rank / (n + 1) through the normal quantile), their correlation
//! matrix is estimated, correlated normals are drawn through a Cholesky
//! factor, and each coordinate is mapped back through linear interpolation
//! between the observed order statistics. Inversion cannot extrapolate, so
//! synthetic values stay inside the observed per-class range.

use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seeds;

const INITIAL_RIDGE: f64 = 1e-6;
const MAX_RIDGE: f64 = 1e-2;

/// Average ranks (1-based, ties averaged).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share the average
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation matrix; zero-variance columns get an identity row.
fn correlation(scores: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = scores.len();
    let n = scores[0].len() as f64;
    let means: Vec<f64> = scores.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    let sds: Vec<f64> = scores
        .iter()
        .zip(&means)
        .map(|(c, &m)| (c.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / n).sqrt())
        .collect();
    let mut corr = vec![vec![0.0; d]; d];
    for j in 0..d {
        corr[j][j] = 1.0;
        for k in j + 1..d {
            let value = if sds[j] == 0.0 || sds[k] == 0.0 {
                0.0
            } else {
                let cov = scores[j]
                    .iter()
                    .zip(&scores[k])
                    .map(|(&a, &b)| (a - means[j]) * (b - means[k]))
                    .sum::<f64>()
                    / n;
                cov / (sds[j] * sds[k])
            };
            corr[j][k] = value;
            corr[k][j] = value;
        }
    }
    corr
}

/// Lower-triangular Cholesky factor; None if the matrix is not positive
/// definite.
fn cholesky(matrix: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = matrix.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = matrix[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_with_ridge(corr: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut ridge = INITIAL_RIDGE;
    loop {
        let mut regularized = corr.to_vec();
        for (j, row) in regularized.iter_mut().enumerate() {
            row[j] += ridge;
        }
        if let Some(l) = cholesky(&regularized) {
            return Ok(l);
        }
        ridge *= 10.0;
        if ridge > MAX_RIDGE {
            return Err(Error::Numerical(
                "correlation matrix not factorable even at ridge 1e-2".into(),
            ));
        }
    }
}

/// Inverse empirical CDF: linear interpolation between order statistics at
/// plotting positions i/(n+1); clamped to the observed range.
fn empirical_quantile(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len();
    let np1 = (n + 1) as f64;
    let first = 1.0 / np1;
    let last = n as f64 / np1;
    if u <= first {
        return sorted[0];
    }
    if u >= last {
        return sorted[n - 1];
    }
    let pos = u * np1; // in (1, n)
    let lo = pos.floor() as usize; // 1-based order statistic index
    let frac = pos - lo as f64;
    sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1])
}

/// Append `ceil(fraction * n_class)` synthetic rows per class.
pub fn copula_augment(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config("copula: fraction must be in (0, 1]".into()));
    }
    let d = ds.n_features();
    let mut out = ds.clone();
    let standard_normal = Normal::new(0.0, 1.0).expect("unit normal");

    for class in [0u8, 1u8] {
        let idx = ds.class_indices(class);
        let n = idx.len();
        if n < 10 {
            return Err(Error::Data(format!(
                "copula: class {class} has {n} row(s); need at least 10"
            )));
        }
        // per-feature columns for this class
        let columns: Vec<Vec<f64>> = (0..d)
            .map(|j| idx.iter().map(|&i| ds.features.get(i, j)).collect())
            .collect();
        // normal scores via average ranks
        let scores: Vec<Vec<f64>> = columns
            .iter()
            .map(|col| {
                average_ranks(col)
                    .into_iter()
                    .map(|r| standard_normal.inverse_cdf(r / (n as f64 + 1.0)))
                    .collect()
            })
            .collect();
        let corr = correlation(&scores);
        let chol = cholesky_with_ridge(&corr)?;

        let sorted_columns: Vec<Vec<f64>> = columns
            .iter()
            .map(|col| {
                let mut s = col.clone();
                s.sort_by(|a, b| a.partial_cmp(b).unwrap());
                s
            })
            .collect();

        let n_synthetic = (fraction * n as f64).ceil() as usize;
        let mut rng = seeds::rng(seed, &[seeds::tag::COPULA, u64::from(class)]);
        for _ in 0..n_synthetic {
            let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut row = Vec::with_capacity(d);
            for (j, chol_row) in chol.iter().enumerate() {
                let z: f64 = chol_row[..=j].iter().zip(&g).map(|(&l, &gv)| l * gv).sum();
                let u = standard_normal.cdf(z);
                row.push(empirical_quantile(&sorted_columns[j], u));
            }
            out.push_row(&row, class);
        }
    }
    Ok(out)
}
