//! Fully connected networks with per-layer activations and inverted dropout.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{init_weights, Activation, Matrix};
use crate::error::{Error, Result};

/// `y = activation(x · W + b)` with `W` stored as `in_dim × out_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        Self {
            weights: init_weights(in_dim, out_dim, rng),
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn param_count(&self) -> usize {
        self.weights.as_slice().len() + self.bias.len()
    }

    fn pre_activation(&self, x: &Matrix) -> Result<Matrix> {
        let mut z = x.matmul(&self.weights)?;
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&self.bias) {
                *v += b;
            }
        }
        Ok(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
    dropout_rate: f64,
    /// Dropout is applied to the output of each listed layer, before the next one.
    dropout_after: Vec<usize>,
}

/// Everything `backward` needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input fed to each layer (after any dropout on the previous output).
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
    post: Vec<Matrix>,
    masks: Vec<Option<Matrix>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.post.last().expect("non-empty network")
    }

    /// Pre-activation `x·W + b` of every layer, first layer first.
    pub fn pre_activations(&self) -> &[Matrix] {
        &self.pre
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Parameter gradients, laid out like [`Mlp::param_slices`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

impl Gradients {
    pub fn slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.slices().concat()
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights.scale(factor);
            l.bias.iter_mut().for_each(|b| *b *= factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }
}

impl Mlp {
    pub fn new(layers: Vec<DenseLayer>, dropout_rate: f64, dropout_after: Vec<usize>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("an Mlp needs at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::Config(format!(
                    "layer {i} outputs {} units but layer {} expects {}",
                    pair[0].out_dim(),
                    i + 1,
                    pair[1].in_dim()
                )));
            }
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.out_dim() {
                return Err(Error::Config(format!(
                    "layer {i}: bias has {} entries for {} outputs",
                    l.bias.len(),
                    l.out_dim()
                )));
            }
        }
        if !(0.0..=1.0).contains(&dropout_rate) {
            return Err(Error::Config(format!(
                "dropout rate {dropout_rate} outside [0, 1]"
            )));
        }
        if let Some(&bad) = dropout_after.iter().find(|&&p| p + 1 >= layers.len()) {
            return Err(Error::Config(format!(
                "dropout position {bad} is not between two layers"
            )));
        }
        let mut dropout_after = dropout_after;
        dropout_after.sort_unstable();
        dropout_after.dedup();
        Ok(Self {
            layers,
            dropout_rate,
            dropout_after,
        })
    }

    /// Randomly initialised network through `dims` (`dims.len() - 1` layers).
    /// `hidden` is used for every layer but the last, which gets `output`.
    pub fn with_dims<R: Rng + ?Sized>(
        dims: &[usize],
        hidden: Activation,
        output: Activation,
        dropout_rate: f64,
        dropout_after: Vec<usize>,
        rng: &mut R,
    ) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::Config(format!("invalid layer dims {dims:?}")));
        }
        let n = dims.len() - 1;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let act = if i + 1 == n { output } else { hidden };
                DenseLayer::new(w[0], w[1], act, rng)
            })
            .collect();
        Self::new(layers, dropout_rate, dropout_after)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn dropout_rate(&self) -> f64 {
        self.dropout_rate
    }

    pub fn dropout_after(&self) -> &[usize] {
        &self.dropout_after
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    pub fn param_slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.param_slices().concat()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::shape("Mlp::set_flat_params", self.param_count(), flat.len()));
        }
        let mut offset = 0;
        for s in self.param_slices_mut() {
            s.copy_from_slice(&flat[offset..offset + s.len()]);
            offset += s.len();
        }
        Ok(())
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.in_dim() {
            return Err(Error::LayerInput {
                layer: 0,
                expected: self.in_dim(),
                found: x.cols(),
            });
        }
        Ok(())
    }

    /// Forward pass. Dropout is active only when `dropout` carries a random
    /// source; kept units are scaled by `1 / (1 - rate)` so eval mode needs no
    /// rescaling.
    pub fn forward(&self, x: &Matrix, mut dropout: Option<&mut dyn RngCore>) -> Result<ForwardCache> {
        self.check_input(x)?;
        let n = self.layers.len();
        let mut cache = ForwardCache {
            inputs: Vec::with_capacity(n),
            pre: Vec::with_capacity(n),
            post: Vec::with_capacity(n),
            masks: Vec::with_capacity(n),
        };
        let mut input = x.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.pre_activation(&input)?;
            let a = layer.activation.apply(&z);
            let mask = match dropout.as_deref_mut() {
                Some(rng) if self.dropout_rate > 0.0 && self.dropout_after.contains(&i) => {
                    Some(dropout_mask(a.rows(), a.cols(), self.dropout_rate, rng))
                }
                _ => None,
            };
            let next = match &mask {
                Some(m) => a.zip_map(m, |v, k| v * k)?,
                None => a.clone(),
            };
            cache.inputs.push(input);
            cache.pre.push(z);
            cache.post.push(a);
            cache.masks.push(mask);
            input = next;
        }
        Ok(cache)
    }

    /// Eval-mode output without keeping a cache.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        let mut a = x.clone();
        for layer in &self.layers {
            let z = layer.pre_activation(&a)?;
            a = layer.activation.apply(&z);
        }
        Ok(a)
    }

    /// Parameter gradients for the upstream gradient `grad_output` (w.r.t. the
    /// network output).
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<Gradients> {
        let (grads, _) = self.backprop(cache, grad_output, true, false)?;
        Ok(grads.expect("requested"))
    }

    /// Parameter gradients plus the gradient w.r.t. the network input.
    pub fn backward_with_input(
        &self,
        cache: &ForwardCache,
        grad_output: &Matrix,
    ) -> Result<(Gradients, Matrix)> {
        let (grads, input) = self.backprop(cache, grad_output, true, true)?;
        Ok((grads.expect("requested"), input.expect("requested")))
    }

    /// Gradient w.r.t. the network input only; parameter gradients are skipped.
    pub fn input_gradient(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<Matrix> {
        let (_, input) = self.backprop(cache, grad_output, false, true)?;
        Ok(input.expect("requested"))
    }

    fn backprop(
        &self,
        cache: &ForwardCache,
        grad_output: &Matrix,
        want_params: bool,
        want_input: bool,
    ) -> Result<(Option<Gradients>, Option<Matrix>)> {
        let n = self.layers.len();
        if cache.pre.len() != n {
            return Err(Error::shape("backward: cache layers", n, cache.pre.len()));
        }
        for (i, (layer, z)) in self.layers.iter().zip(&cache.pre).enumerate() {
            if z.cols() != layer.out_dim() {
                return Err(Error::shape(
                    format!("backward: cache for layer {i}"),
                    layer.out_dim(),
                    z.cols(),
                ));
            }
        }
        if grad_output.shape() != cache.output().shape() {
            return Err(Error::shape(
                "backward: grad_output",
                format!("{:?}", cache.output().shape()),
                format!("{:?}", grad_output.shape()),
            ));
        }

        let mut layer_grads = Vec::with_capacity(if want_params { n } else { 0 });
        let mut grad = grad_output.clone();
        let mut input_grad = None;
        for i in (0..n).rev() {
            let layer = &self.layers[i];
            if let Some(mask) = &cache.masks[i] {
                grad = grad.zip_map(mask, |g, k| g * k)?;
            }
            let dz = layer.activation.backward(&cache.pre[i], &cache.post[i], &grad);
            if want_params {
                layer_grads.push(LayerGrad {
                    weights: cache.inputs[i].t_matmul(&dz)?,
                    bias: dz.column_sums(),
                });
            }
            if i > 0 {
                grad = dz.matmul_t(&layer.weights)?;
            } else if want_input {
                input_grad = Some(dz.matmul_t(&layer.weights)?);
            }
        }
        let grads = want_params.then(|| {
            layer_grads.reverse();
            Gradients {
                layers: layer_grads,
            }
        });
        Ok((grads, input_grad))
    }
}

fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut dyn RngCore) -> Matrix {
    let keep_scale = if rate < 1.0 { 1.0 / (1.0 - rate) } else { 0.0 };
    let data = (0..rows * cols)
        .map(|_| {
            if rng.random::<f64>() < rate {
                0.0
            } else {
                keep_scale
            }
        })
        .collect();
    Matrix::from_vec(rows, cols, data).expect("length matches")
}
