use serde::{Deserialize, Serialize};

use super::Matrix;

/// Default negative-side slope for leaky ReLU units.
pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    LeakyRelu { slope: f64 },
    Relu,
    Sigmoid,
    Linear,
    /// Row-wise softmax.
    Softmax,
}

impl Activation {
    pub fn leaky_relu() -> Self {
        Activation::LeakyRelu {
            slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    pub(crate) fn tag(&self) -> u8 {
        match self {
            Activation::LeakyRelu { .. } => 0,
            Activation::Relu => 1,
            Activation::Sigmoid => 2,
            Activation::Linear => 3,
            Activation::Softmax => 4,
        }
    }

    pub(crate) fn from_tag(tag: u8, slope: f64) -> Option<Self> {
        Some(match tag {
            0 => Activation::LeakyRelu { slope },
            1 => Activation::Relu,
            2 => Activation::Sigmoid,
            3 => Activation::Linear,
            4 => Activation::Softmax,
            _ => return None,
        })
    }

    pub fn apply(&self, z: &Matrix) -> Matrix {
        match *self {
            Activation::LeakyRelu { slope } => z.map(|v| if v > 0.0 { v } else { slope * v }),
            Activation::Relu => z.map(|v| v.max(0.0)),
            Activation::Sigmoid => z.map(sigmoid),
            Activation::Linear => z.clone(),
            Activation::Softmax => softmax_rows(z),
        }
    }

    /// Gradient w.r.t. the pre-activation `z`, given `a = apply(z)` and the
    /// upstream gradient w.r.t. `a`.
    pub fn backward(&self, z: &Matrix, a: &Matrix, grad_a: &Matrix) -> Matrix {
        match *self {
            Activation::LeakyRelu { slope } => {
                let mut g = grad_a.clone();
                for (gv, &zv) in g.as_mut_slice().iter_mut().zip(z.as_slice()) {
                    if zv <= 0.0 {
                        *gv *= slope;
                    }
                }
                g
            }
            Activation::Relu => {
                let mut g = grad_a.clone();
                for (gv, &zv) in g.as_mut_slice().iter_mut().zip(z.as_slice()) {
                    if zv <= 0.0 {
                        *gv = 0.0;
                    }
                }
                g
            }
            Activation::Sigmoid => {
                let mut g = grad_a.clone();
                for (gv, &s) in g.as_mut_slice().iter_mut().zip(a.as_slice()) {
                    *gv *= s * (1.0 - s);
                }
                g
            }
            Activation::Linear => grad_a.clone(),
            Activation::Softmax => {
                // dz = s ⊙ (g − <g, s>) per row
                let mut g = grad_a.clone();
                for r in 0..g.rows() {
                    let s = a.row(r);
                    let dot: f64 = grad_a.row(r).iter().zip(s).map(|(x, y)| x * y).sum();
                    for (gv, &sv) in g.row_mut(r).iter_mut().zip(s) {
                        *gv = sv * (*gv - dot);
                    }
                }
                g
            }
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable row-wise softmax (max subtraction).
pub fn softmax_rows(z: &Matrix) -> Matrix {
    let mut out = z.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}
