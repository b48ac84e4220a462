//! Synthetic minority oversampling.
//!
//! Synthetic rows are drawn on the segment between a minority sample and one
//! of its k nearest minority neighbors: `s = x + u * (x_nn - x)`, `u` uniform
//! in [0, 1]. Rows are generated until the class counts are equal.

use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seeds;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

pub fn smote(ds: &Dataset, k: usize, seed: u64) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::Config("smote: k must be >= 1".into()));
    }
    let (benign, attack) = ds.class_counts();
    if benign == attack {
        return Ok(ds.clone());
    }
    let minority_class: u8 = u8::from(attack < benign);
    let need = benign.abs_diff(attack);
    let minority_idx = ds.class_indices(minority_class);
    let m = minority_idx.len();
    if m < 2 {
        return Err(Error::Data(format!(
            "smote: minority class has {m} sample(s); need at least 2"
        )));
    }
    let k_eff = k.min(m - 1);

    // k nearest minority neighbors per minority row (ties by index order)
    let mut neighbors: Vec<Vec<usize>> = Vec::with_capacity(m);
    for (i, &row_i) in minority_idx.iter().enumerate() {
        let mut dists: Vec<(f64, usize)> = minority_idx
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, &row_j)| {
                (squared_distance(ds.features.row(row_i), ds.features.row(row_j)), j)
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        neighbors.push(dists.into_iter().take(k_eff).map(|(_, j)| j).collect());
    }

    let mut rng = seeds::rng(seed, &[seeds::tag::SMOTE]);
    let mut out = ds.clone();
    for _ in 0..need {
        let base = rng.random_range(0..m);
        let nn = neighbors[base][rng.random_range(0..k_eff)];
        let u: f64 = rng.random();
        let x = ds.features.row(minority_idx[base]);
        let x_nn = ds.features.row(minority_idx[nn]);
        let row: Vec<f64> = x.iter().zip(x_nn).map(|(&a, &b)| a + u * (b - a)).collect();
        out.push_row(&row, minority_class);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn dataset(rows: &[(Vec<f64>, u8)]) -> Dataset {
        Dataset::new(
            Matrix::from_rows(&rows.iter().map(|(r, _)| r.clone()).collect::<Vec<_>>()),
            rows.iter().map(|(_, y)| *y).collect(),
            (0..rows[0].0.len()).map(|j| format!("f{j}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn balanced_input_is_a_no_op() {
        let ds = dataset(&[
            (vec![0.0, 0.0], 0),
            (vec![1.0, 1.0], 0),
            (vec![2.0, 2.0], 1),
            (vec![3.0, 3.0], 1),
        ]);
        let out = smote(&ds, 5, 1).unwrap();
        assert_eq!(out.n_rows(), 4);
        assert_eq!(out.features.data(), ds.features.data());
    }

    #[test]
    fn balances_counts_exactly() {
        // 10 majority / 4 minority -> 6 synthetic rows
        let mut rows = Vec::new();
        for i in 0..10 {
            rows.push((vec![i as f64, 10.0], 0u8));
        }
        for i in 0..4 {
            rows.push((vec![i as f64, -10.0], 1u8));
        }
        let ds = dataset(&rows);
        let out = smote(&ds, 5, 7).unwrap();
        let (b, a) = out.class_counts();
        assert_eq!((b, a), (10, 10));
        assert_eq!(out.n_rows(), 20);
    }

    #[test]
    fn synthetic_rows_lie_on_minority_segments() {
        let mut rows = Vec::new();
        for i in 0..12 {
            rows.push((vec![i as f64 * 0.1, 1.0 + i as f64], 0u8));
        }
        let minority = [
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.5, 2.0],
            vec![2.0, 1.5],
            vec![1.5, -1.0],
        ];
        for mrow in &minority {
            rows.push((mrow.clone(), 1u8));
        }
        let ds = dataset(&rows);
        let out = smote(&ds, 3, 42).unwrap();
        // every appended row solves s = x + u (x' - x) for some minority pair, u in [0,1]
        for s in ds.n_rows()..out.n_rows() {
            let srow = out.features.row(s);
            let mut found = false;
            'pairs: for x in &minority {
                for xp in &minority {
                    let dx = xp[0] - x[0];
                    let u = if dx.abs() > 1e-12 { (srow[0] - x[0]) / dx } else { f64::NAN };
                    if u.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&u) {
                        let expect_y = x[1] + u * (xp[1] - x[1]);
                        if (srow[1] - expect_y).abs() < 1e-9 {
                            found = true;
                            break 'pairs;
                        }
                    }
                }
            }
            assert!(found, "synthetic row {srow:?} not on any minority segment");
        }
    }

    #[test]
    fn tiny_minority_is_an_error() {
        let ds = dataset(&[(vec![0.0], 0), (vec![1.0], 0), (vec![2.0], 1)]);
        assert!(matches!(smote(&ds, 5, 0), Err(Error::Data(_))));
    }

    #[test]
    fn deterministic_in_seed() {
        let mut rows = Vec::new();
        for i in 0..9 {
            rows.push((vec![i as f64], 0u8));
        }
        rows.push((vec![100.0], 1u8));
        rows.push((vec![101.0], 1u8));
        rows.push((vec![102.0], 1u8));
        let ds = dataset(&rows);
        let a = smote(&ds, 2, 5).unwrap();
        let b = smote(&ds, 2, 5).unwrap();
        assert_eq!(a.features.data(), b.features.data());
    }
}
