use serde::{Deserialize, Serialize};

use super::{Gradients, Mlp};
use crate::error::{Error, Result};

/// Bias-corrected Adam state for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_count: u64,
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    /// Zeroed accumulators shaped like `shapes` (one entry per parameter tensor).
    pub fn with_shapes(learning_rate: f64, shapes: impl IntoIterator<Item = usize>) -> Self {
        let first_moment: Vec<Vec<f64>> = shapes.into_iter().map(|n| vec![0.0; n]).collect();
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step_count: 0,
            second_moment: first_moment.clone(),
            first_moment,
        }
    }

    pub fn for_mlp(learning_rate: f64, mlp: &Mlp) -> Self {
        Self::with_shapes(learning_rate, mlp.param_slices().iter().map(|s| s.len()))
    }

    pub fn shapes(&self) -> Vec<usize> {
        self.first_moment.iter().map(Vec::len).collect()
    }

    /// One Adam update of `params` in place.
    pub fn step(&mut self, params: Vec<&mut [f64]>, grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::shape(
                "adam_step tensors",
                self.first_moment.len(),
                format!("{} params / {} grads", params.len(), grads.len()),
            ));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != self.first_moment[i].len() || g.len() != p.len() {
                return Err(Error::shape(
                    format!("adam_step tensor {i}"),
                    self.first_moment[i].len(),
                    format!("{} params / {} grads", p.len(), g.len()),
                ));
            }
        }

        self.step_count += 1;
        let t = self.step_count as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2) = (self.beta1, self.beta2);
        for ((p, g), (m, v)) in params
            .into_iter()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(self.second_moment.iter_mut()))
        {
            for j in 0..p.len() {
                let gj = g[j];
                m[j] = b1 * m[j] + (1.0 - b1) * gj;
                v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
                let m_hat = m[j] / c1;
                let v_hat = v[j] / c2;
                p[j] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }

    pub fn step_mlp(&mut self, mlp: &mut Mlp, grads: &Gradients) -> Result<()> {
        let g = grads.slices();
        self.step(mlp.param_slices_mut(), &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![0.3, -1.2, 4.0];
        let mut s = AdamState::with_shapes(1e-2, [3]);
        for _ in 0..5 {
            s.step(vec![&mut p], &[&[0.0, 0.0, 0.0]]).unwrap();
        }
        assert_eq!(p, vec![0.3, -1.2, 4.0]);
        assert_eq!(s.step_count, 5);
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let lr = 1e-3;
        let mut p = vec![1.0, 1.0];
        let mut s = AdamState::with_shapes(lr, [2]);
        s.step(vec![&mut p], &[&[0.5, -7.0]]).unwrap();
        assert!((p[0] - (1.0 - lr)).abs() < 1e-10);
        assert!((p[1] - (1.0 + lr)).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let mut p = vec![0.0; 2];
        let mut s = AdamState::with_shapes(1e-3, [3]);
        assert!(s.step(vec![&mut p], &[&[0.0, 0.0]]).is_err());
    }
}
