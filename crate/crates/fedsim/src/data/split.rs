//! Stratified train/test split and client partitioning.

use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionStrategy {
    Iid,
    NonIidProportion,
}

/// Assignment of training-row indices to clients. Index lists are disjoint
/// and cover every training row.
#[derive(Debug, Clone)]
pub struct Partition {
    pub assignments: Vec<Vec<usize>>,
    pub strategy: PartitionStrategy,
    pub proportions: Option<Vec<f64>>,
}

impl Partition {
    pub fn n_clients(&self) -> usize {
        self.assignments.len()
    }
}

/// Stratified split: each class is shuffled and split `train_fraction` /
/// `1 - train_fraction`, with the train share rounded down per class.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if ds.is_empty() {
        return Err(Error::Config("split: dataset is empty".into()));
    }
    if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
        return Err(Error::Config("split: train_fraction must be in (0, 1)".into()));
    }
    let mut rng = seeds::rng(seed, &[seeds::tag::SPLIT]);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in [0u8, 1u8] {
        let mut idx = ds.class_indices(class);
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 5 {
            log::warn!(
                "split: class {class} has only {} row(s); stratification is degenerate",
                idx.len()
            );
        }
        idx.shuffle(&mut rng);
        let n_train = (train_fraction * idx.len() as f64).floor() as usize;
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    Ok((ds.select_rows(&train_idx), ds.select_rows(&test_idx)))
}

/// Shuffle rows and deal them round-robin; shard sizes differ by at most one.
pub fn partition_iid(train: &Dataset, n_clients: usize, seed: u64) -> Result<Partition> {
    if n_clients == 0 {
        return Err(Error::Config("partition: need at least one client".into()));
    }
    if train.n_rows() < n_clients {
        return Err(Error::Partition(format!(
            "{} training rows cannot cover {n_clients} clients",
            train.n_rows()
        )));
    }
    let mut rng = seeds::rng(seed, &[seeds::tag::PARTITION]);
    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    order.shuffle(&mut rng);
    let mut assignments = vec![Vec::new(); n_clients];
    for (pos, idx) in order.into_iter().enumerate() {
        assignments[pos % n_clients].push(idx);
    }
    Ok(Partition { assignments, strategy: PartitionStrategy::Iid, proportions: None })
}

/// Default non-IID schedule: benign fraction ramps linearly from 0.1 to 0.9
/// across clients.
pub fn default_benign_ramp(n_clients: usize) -> Vec<f64> {
    if n_clients == 1 {
        return vec![0.5];
    }
    (0..n_clients)
        .map(|i| 0.1 + 0.8 * i as f64 / (n_clients - 1) as f64)
        .collect()
}

/// Equal-size shards (±1 row) whose per-client benign share approximates
/// `benign_fractions` as closely as the class pools allow, via a greedy
/// largest-remainder allocation.
pub fn partition_noniid(
    train: &Dataset,
    n_clients: usize,
    benign_fractions: &[f64],
    seed: u64,
) -> Result<Partition> {
    if n_clients == 0 {
        return Err(Error::Config("partition: need at least one client".into()));
    }
    if benign_fractions.len() != n_clients {
        return Err(Error::Config(format!(
            "{} benign fractions for {n_clients} clients",
            benign_fractions.len()
        )));
    }
    if benign_fractions.iter().any(|f| !(0.05..=0.95).contains(f)) {
        return Err(Error::Config("benign fractions must lie in [0.05, 0.95]".into()));
    }
    if train.n_rows() < n_clients {
        return Err(Error::Partition(format!(
            "{} training rows cannot cover {n_clients} clients",
            train.n_rows()
        )));
    }

    let n = train.n_rows();
    let base = n / n_clients;
    let extra = n % n_clients;
    let sizes: Vec<usize> = (0..n_clients).map(|i| base + usize::from(i < extra)).collect();

    let mut rng = seeds::rng(seed, &[seeds::tag::PARTITION]);
    let mut benign_pool = train.class_indices(0);
    let mut attack_pool = train.class_indices(1);
    benign_pool.shuffle(&mut rng);
    attack_pool.shuffle(&mut rng);
    let total_benign = benign_pool.len();

    // floor the targets, then hand out the remaining benign rows (or claw
    // back the deficit) by largest fractional remainder, capped per shard
    let targets: Vec<f64> = benign_fractions
        .iter()
        .zip(&sizes)
        .map(|(&f, &s)| f * s as f64)
        .collect();
    let mut benign_counts: Vec<i64> = targets.iter().map(|t| t.floor() as i64).collect();
    let remainders: Vec<f64> = targets
        .iter()
        .zip(&benign_counts)
        .map(|(t, &b)| t - b as f64)
        .collect();
    let mut surplus = total_benign as i64 - benign_counts.iter().sum::<i64>();
    let mut by_remainder_desc: Vec<usize> = (0..n_clients).collect();
    by_remainder_desc.sort_by(|&a, &b| {
        remainders[b].partial_cmp(&remainders[a]).unwrap().then(a.cmp(&b))
    });
    while surplus != 0 {
        let mut progressed = false;
        if surplus > 0 {
            for &i in &by_remainder_desc {
                if surplus == 0 {
                    break;
                }
                if benign_counts[i] < sizes[i] as i64 {
                    benign_counts[i] += 1;
                    surplus -= 1;
                    progressed = true;
                }
            }
        } else {
            for &i in by_remainder_desc.iter().rev() {
                if surplus == 0 {
                    break;
                }
                if benign_counts[i] > 0 {
                    benign_counts[i] -= 1;
                    surplus += 1;
                    progressed = true;
                }
            }
        }
        if !progressed {
            return Err(Error::Partition(format!(
                "cannot absorb benign surplus of {surplus} rows within shard caps"
            )));
        }
    }

    for (i, (&b, &s)) in benign_counts.iter().zip(&sizes).enumerate() {
        let attack = s as i64 - b;
        if b < 2 || attack < 2 {
            return Err(Error::Partition(format!(
                "client {i} would get {b} benign / {attack} attack rows; \
                 every shard needs at least 2 of each class (fraction {:.3}, shard size {s})",
                benign_fractions[i]
            )));
        }
    }

    let mut assignments = Vec::with_capacity(n_clients);
    let mut b_at = 0usize;
    let mut a_at = 0usize;
    for (&b, &s) in benign_counts.iter().zip(&sizes) {
        let b = b as usize;
        let a = s - b;
        let mut shard = benign_pool[b_at..b_at + b].to_vec();
        shard.extend_from_slice(&attack_pool[a_at..a_at + a]);
        b_at += b;
        a_at += a;
        assignments.push(shard);
    }
    debug_assert_eq!(b_at, benign_pool.len());
    debug_assert_eq!(a_at, attack_pool.len());

    Ok(Partition {
        assignments,
        strategy: PartitionStrategy::NonIidProportion,
        proportions: Some(benign_fractions.to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn labeled_dataset(benign: usize, attack: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..benign {
            rows.push(vec![i as f64, 0.0]);
            labels.push(0u8);
        }
        for i in 0..attack {
            rows.push(vec![i as f64, 1.0]);
            labels.push(1u8);
        }
        Dataset::new(Matrix::from_rows(&rows), labels, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn split_even_classes() {
        let ds = labeled_dataset(50, 50);
        let (train, test) = split(&ds, 0.8, 3).unwrap();
        assert_eq!(train.n_rows(), 80);
        assert_eq!(test.n_rows(), 20);
        assert_eq!(train.class_counts(), (40, 40));
        assert_eq!(test.class_counts(), (10, 10));
    }

    #[test]
    fn split_rounds_per_class() {
        // 103 rows 60/43 -> train 82 (48 + 34), test 21 (12 + 9)
        let ds = labeled_dataset(60, 43);
        let (train, test) = split(&ds, 0.8, 9).unwrap();
        assert_eq!(train.n_rows(), 82);
        assert_eq!(test.n_rows(), 21);
        assert_eq!(train.class_counts(), (48, 34));
        assert_eq!(test.class_counts(), (12, 9));
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let ds = labeled_dataset(30, 20);
        let (tr1, te1) = split(&ds, 0.8, 5).unwrap();
        let (tr2, _) = split(&ds, 0.8, 5).unwrap();
        assert_eq!(tr1.features.data(), tr2.features.data());
        assert_eq!(tr1.n_rows() + te1.n_rows(), ds.n_rows());
    }

    #[test]
    fn iid_shard_sizes() {
        let ds = labeled_dataset(60, 40);
        let p = partition_iid(&ds, 10, 4).unwrap();
        assert!(p.assignments.iter().all(|a| a.len() == 10));

        let ds = labeled_dataset(61, 40);
        let p = partition_iid(&ds, 10, 4).unwrap();
        let mut sizes: Vec<usize> = p.assignments.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![10, 10, 10, 10, 10, 10, 10, 10, 10, 11]);
    }

    #[test]
    fn iid_is_an_exact_partition() {
        let ds = labeled_dataset(33, 29);
        let p = partition_iid(&ds, 7, 11).unwrap();
        let mut all: Vec<usize> = p.assignments.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..62).collect::<Vec<_>>());
    }

    #[test]
    fn noniid_solves_the_book_example() {
        // 100 rows 50/50, fractions [0.2, 0.8] -> 10/40 and 40/10
        let ds = labeled_dataset(50, 50);
        let p = partition_noniid(&ds, 2, &[0.2, 0.8], 1).unwrap();
        let count = |shard: &[usize], class: u8| {
            shard.iter().filter(|&&i| ds.labels[i] == class).count()
        };
        assert_eq!(p.assignments[0].len(), 50);
        assert_eq!(p.assignments[1].len(), 50);
        assert_eq!(count(&p.assignments[0], 0), 10);
        assert_eq!(count(&p.assignments[0], 1), 40);
        assert_eq!(count(&p.assignments[1], 0), 40);
        assert_eq!(count(&p.assignments[1], 1), 10);
    }

    #[test]
    fn noniid_symmetric_fractions_reduce_to_balanced() {
        let ds = labeled_dataset(50, 50);
        let p = partition_noniid(&ds, 2, &[0.5, 0.5], 1).unwrap();
        for shard in &p.assignments {
            let benign = shard.iter().filter(|&&i| ds.labels[i] == 0).count();
            assert_eq!(benign, 25);
            assert_eq!(shard.len(), 50);
        }
    }

    #[test]
    fn noniid_is_an_exact_partition() {
        let ds = labeled_dataset(100, 100);
        let p = partition_noniid(&ds, 5, &default_benign_ramp(5), 7).unwrap();
        let mut all: Vec<usize> = p.assignments.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..200).collect::<Vec<_>>());
    }

    #[test]
    fn noniid_spreads_pool_surplus_within_caps() {
        // benign pool larger than the ramp targets: surplus spreads across
        // clients instead of failing, as long as every shard keeps >= 2 of
        // each class
        let ds = labeled_dataset(120, 80);
        let p = partition_noniid(&ds, 5, &[0.3, 0.4, 0.5, 0.6, 0.7], 7).unwrap();
        let mut all: Vec<usize> = p.assignments.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..200).collect::<Vec<_>>());
        for shard in &p.assignments {
            let benign = shard.iter().filter(|&&i| ds.labels[i] == 0).count();
            let attack = shard.len() - benign;
            assert!(benign >= 2 && attack >= 2);
        }
    }

    #[test]
    fn noniid_infeasible_targets_error() {
        // 3 benign rows cannot give two clients >= 2 benign each
        let ds = labeled_dataset(3, 97);
        let err = partition_noniid(&ds, 2, &[0.05, 0.05], 1).unwrap_err();
        assert!(matches!(err, Error::Partition(_)));
    }

    #[test]
    fn fractions_out_of_range_rejected() {
        let ds = labeled_dataset(50, 50);
        assert!(partition_noniid(&ds, 2, &[0.01, 0.5], 1).is_err());
    }

    #[test]
    fn ramp_endpoints() {
        let ramp = default_benign_ramp(10);
        assert!((ramp[0] - 0.1).abs() < 1e-12);
        assert!((ramp[9] - 0.9).abs() < 1e-12);
        assert_eq!(default_benign_ramp(1), vec![0.5]);
    }
}
