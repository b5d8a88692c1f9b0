use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[t][p]` = number of rows with true class `t` predicted as `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn add(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n_classes() != self.n_classes() {
            return Err(Error::shape("confusion matrix classes", self.n_classes(), other.n_classes()));
        }
        for (a, b) in self.counts.iter_mut().flatten().zip(other.counts.iter().flatten()) {
            *a += b;
        }
        Ok(())
    }

    /// Recall per class, `None` where the class has no true rows.
    pub fn recalls(&self) -> Vec<Option<f64>> {
        (0..self.n_classes())
            .map(|c| {
                let support = self.row_sum(c);
                (support > 0).then(|| self.counts[c][c] as f64 / support as f64)
            })
            .collect()
    }

    /// Classes with no true rows; they are left out of [`uar`].
    pub fn empty_classes(&self) -> Vec<usize> {
        (0..self.n_classes()).filter(|&c| self.row_sum(c) == 0).collect()
    }
}

pub fn confusion(truth: &[usize], predicted: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::shape("confusion predictions", truth.len(), predicted.len()));
    }
    let mut cm = ConfusionMatrix::new(n_classes);
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::InvalidArgument(format!(
                "class index out of range: truth {t}, predicted {p}, classes {n_classes}"
            )));
        }
        cm.add(t, p);
    }
    Ok(cm)
}

/// Unweighted average recall: the plain mean of per-class recalls over the
/// classes that occur in the true labels.
pub fn uar(cm: &ConfusionMatrix) -> Result<f64> {
    let recalls: Vec<f64> = cm.recalls().into_iter().flatten().collect();
    if recalls.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
