use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FeatureDataset, NUM_CLASSES};
use crate::error::{Error, Result};

/// One leave-one-session-out fold.
#[derive(Debug, Clone)]
pub struct Fold {
    pub session: String,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub train: FeatureDataset,
    pub test: FeatureDataset,
}

/// One fold per distinct session (sorted by session name); each fold tests on
/// exactly that session's rows and trains on the rest.
pub fn loso_splits(data: &FeatureDataset) -> Result<Vec<Fold>> {
    let sessions = data.session_names();
    if sessions.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "leave-one-session-out needs at least 2 sessions, found {}",
            sessions.len()
        )));
    }
    Ok(sessions
        .into_iter()
        .map(|session| {
            let (test_indices, train_indices): (Vec<usize>, Vec<usize>) =
                (0..data.len()).partition(|&i| data.sessions()[i] == session);
            Fold {
                train: data.subset(&train_indices),
                test: data.subset(&test_indices),
                session,
                train_indices,
                test_indices,
            }
        })
        .collect())
}

/// Class-stratified random split into `(dev, test)` where `dev` receives
/// `dev_fraction` of the rows.
///
/// The dev total is `round(N · dev_fraction)`, spread over classes by largest
/// remainder, so each class's share is within one sample of proportional.
/// Every non-empty class keeps at least one row on each side.
pub fn stratified_split(
    data: &FeatureDataset,
    dev_fraction: f64,
    seed: u64,
) -> Result<(FeatureDataset, FeatureDataset)> {
    if !(dev_fraction > 0.0 && dev_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split fraction {dev_fraction} must lie in (0, 1)"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES];
    for (i, l) in data.labels().iter().enumerate() {
        by_class[l.index()].push(i);
    }
    if let Some((c, _)) = by_class
        .iter()
        .enumerate()
        .find(|(_, rows)| rows.len() == 1)
    {
        return Err(Error::InvalidArgument(format!(
            "class {c} has fewer than 2 samples; cannot stratify"
        )));
    }

    let exact: Vec<f64> = by_class.iter().map(|r| r.len() as f64 * dev_fraction).collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let total = (data.len() as f64 * dev_fraction).round() as usize;
    let mut order: Vec<usize> = (0..NUM_CLASSES).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut missing = total.saturating_sub(quota.iter().sum());
    for &c in order.iter().cycle().take(NUM_CLASSES * 2) {
        if missing == 0 {
            break;
        }
        if quota[c] < by_class[c].len() && (exact[c] - exact[c].floor()) > 0.0 {
            quota[c] += 1;
            missing -= 1;
        }
    }
    for (q, rows) in quota.iter_mut().zip(&by_class) {
        if !rows.is_empty() {
            *q = (*q).clamp(1, rows.len() - 1);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = Vec::new();
    let mut test = Vec::new();
    for (rows, &q) in by_class.iter().zip(&quota) {
        let mut rows = rows.clone();
        rows.shuffle(&mut rng);
        dev.extend_from_slice(&rows[..q]);
        test.extend_from_slice(&rows[q..]);
    }
    dev.sort_unstable();
    test.sort_unstable();
    Ok((data.subset(&dev), data.subset(&test)))
}
