//! Loss functions. Each returns the batch-mean loss and its gradient with
//! respect to the prediction it was given.

use super::{softmax_rows, Matrix};
use crate::error::{Error, Result};

/// Probabilities are clamped to `[BCE_EPS, 1 - BCE_EPS]` before taking logs.
pub const BCE_EPS: f64 = 1e-7;

/// Mean over samples of the squared L2 distance between rows.
pub fn mse_loss(prediction: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if prediction.shape() != target.shape() {
        return Err(Error::shape(
            "mse_loss",
            format!("{:?}", target.shape()),
            format!("{:?}", prediction.shape()),
        ));
    }
    let n = prediction.rows().max(1) as f64;
    let diff = prediction.zip_map(target, |p, t| p - t)?;
    let loss = diff.as_slice().iter().map(|d| d * d).sum::<f64>() / n;
    let grad = diff.map(|d| 2.0 * d / n);
    Ok((loss, grad))
}

/// Binary cross-entropy, mean over entries.
///
/// Probabilities outside `(0, 1)` are clamped to `[BCE_EPS, 1 - BCE_EPS]`; the
/// gradient is evaluated at the clamped value.
pub fn bce_loss(prob: &[f64], label: &[f64]) -> Result<(f64, Vec<f64>)> {
    if prob.len() != label.len() {
        return Err(Error::shape("bce_loss", label.len(), prob.len()));
    }
    let n = prob.len().max(1) as f64;
    let mut loss = 0.0;
    let grad = prob
        .iter()
        .zip(label)
        .map(|(&p, &y)| {
            let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
            loss -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
            (-y / p + (1.0 - y) / (1.0 - p)) / n
        })
        .collect();
    Ok((loss / n, grad))
}

/// Softmax cross-entropy against hard class indices.
pub fn softmax_ce_loss(logits: &Matrix, class_index: &[usize]) -> Result<(f64, Matrix)> {
    if class_index.len() != logits.rows() {
        return Err(Error::shape("softmax_ce_loss labels", logits.rows(), class_index.len()));
    }
    if let Some(&bad) = class_index.iter().find(|&&c| c >= logits.cols()) {
        return Err(Error::InvalidArgument(format!(
            "class index {bad} out of range for {} classes",
            logits.cols()
        )));
    }
    let mut targets = Matrix::zeros(logits.rows(), logits.cols());
    for (r, &c) in class_index.iter().enumerate() {
        targets.set(r, c, 1.0);
    }
    softmax_ce_soft_loss(logits, &targets)
}

/// Softmax cross-entropy against per-row target distributions (soft labels,
/// e.g. mixed one-hot vectors). Gradient is `(softmax - target) / batch`.
pub fn softmax_ce_soft_loss(logits: &Matrix, targets: &Matrix) -> Result<(f64, Matrix)> {
    if logits.shape() != targets.shape() {
        return Err(Error::shape(
            "softmax_ce_soft_loss",
            format!("{:?}", logits.shape()),
            format!("{:?}", targets.shape()),
        ));
    }
    let n = logits.rows().max(1) as f64;
    let mut loss = 0.0;
    for r in 0..logits.rows() {
        let z = logits.row(r);
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        let t = targets.row(r);
        let mass: f64 = t.iter().sum();
        let dot: f64 = z.iter().zip(t).map(|(a, b)| a * b).sum();
        loss += mass * lse - dot;
    }
    let probs = softmax_rows(logits);
    let grad = probs.zip_map(targets, |p, t| (p - t) / n)?;
    Ok((loss / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        let p = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let t = Matrix::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(mse_loss(&p, &t).unwrap().0, 25.0);
        let (l, g) = mse_loss(&t, &t).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.as_slice().iter().all(|&v| v == 0.0));
        assert!(mse_loss(&p, &Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn bce_examples() {
        let (l, _) = bce_loss(&[0.5], &[1.0]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
        let (l, _) = bce_loss(&[1.0 - 1e-12], &[1.0]).unwrap();
        assert!(l < 1e-6);
        // clamped, not NaN
        let (l, g) = bce_loss(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(l.is_finite() && g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn uniform_logits_give_ln_classes() {
        let logits = Matrix::zeros(3, 4);
        let (l, g) = softmax_ce_loss(&logits, &[0, 1, 3]).unwrap();
        assert!((l - 4f64.ln()).abs() < 1e-12);
        for row in g.row_iter() {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
        assert!(softmax_ce_loss(&logits, &[0, 4, 1]).is_err());
    }
}
