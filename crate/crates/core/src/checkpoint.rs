//! Binary checkpoint container.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic           6 bytes  "MIXGAN"
//! format_version  u32
//! config_len      u32      followed by the model config as UTF-8 JSON
//! epoch           u64      training epochs completed
//! network × 3     encoder, generator, discriminator, see below
//! has_optimizers  u8       0 or 1
//! adam × 4        (if present) autoencoder-encoder, autoencoder-generator,
//!                 generator (adversarial), discriminator
//! sha256          32 bytes over everything above
//! ```
//!
//! A network block is `dropout_rate f64, n_dropout u32, positions u32…,
//! n_layers u32`, then per layer `activation_tag u8, leaky_slope f64,
//! in_dim u32, out_dim u32, weights f64[in·out] (row-major), bias f64[out]`.
//! Activation tags: 0 leaky ReLU, 1 ReLU, 2 sigmoid, 3 linear, 4 softmax.
//!
//! An Adam block is `learning_rate, beta1, beta2, epsilon: f64, step_count u64,
//! n_tensors u32`, then per tensor `len u32, first_moment f64[len],
//! second_moment f64[len]`.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{MixGanConfig, MixGanModel};
use crate::nn::{Activation, AdamState, DenseLayer, Matrix, Mlp};
use crate::training::OptimizerStates;

pub const MAGIC: &[u8; 6] = b"MIXGAN";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint config does not match: {0}")]
    ConfigMismatch(String),
}

type CkResult<T> = std::result::Result<T, CheckpointError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelCheckpoint {
    pub format_version: u32,
    pub model: MixGanModel,
    pub optimizers: Option<OptimizerStates>,
    pub epoch: u64,
}

impl ModelCheckpoint {
    pub fn new(model: MixGanModel, optimizers: Option<OptimizerStates>, epoch: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            model,
            optimizers,
            epoch,
        }
    }

    pub fn config(&self) -> &MixGanConfig {
        self.model.config()
    }

    /// Fails unless the stored model was built with exactly `expected`.
    pub fn check_config(&self, expected: &MixGanConfig) -> CkResult<()> {
        let found = self.config();
        if found == expected {
            return Ok(());
        }
        let mut diffs = Vec::new();
        if found.input_dim != expected.input_dim {
            diffs.push(format!("input_dim {} vs {}", found.input_dim, expected.input_dim));
        }
        if found.latent_dim != expected.latent_dim {
            diffs.push(format!("latent_dim {} vs {}", found.latent_dim, expected.latent_dim));
        }
        if found.encoder_hidden != expected.encoder_hidden {
            diffs.push(format!(
                "encoder_hidden {:?} vs {:?}",
                found.encoder_hidden, expected.encoder_hidden
            ));
        }
        if found.discriminator_hidden != expected.discriminator_hidden {
            diffs.push(format!(
                "discriminator_hidden {:?} vs {:?}",
                found.discriminator_hidden, expected.discriminator_hidden
            ));
        }
        if diffs.is_empty() {
            diffs.push("dropout_rate or leaky_slope differ".into());
        }
        Err(CheckpointError::ConfigMismatch(format!(
            "stored vs requested: {}",
            diffs.join(", ")
        )))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(MAGIC);
        w.u32(self.format_version);
        let config = serde_json::to_vec(self.config()).expect("config serialises");
        w.u32(config.len() as u32);
        w.buf.extend_from_slice(&config);
        w.u64(self.epoch);
        for net in [&self.model.encoder, &self.model.generator, &self.model.discriminator] {
            w.network(net);
        }
        match &self.optimizers {
            Some(o) => {
                w.u8(1);
                for s in o.in_order() {
                    w.adam(s);
                }
            }
            None => w.u8(0),
        }
        let digest = Sha256::digest(&w.buf);
        w.buf.extend_from_slice(&digest);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> CkResult<Self> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(CheckpointError::Corrupt("missing MIXGAN magic".into()));
        }
        if bytes.len() < MAGIC.len() + 4 + 32 {
            return Err(CheckpointError::Corrupt("truncated header".into()));
        }
        let (body, stored) = bytes.split_at(bytes.len() - 32);
        let mut r = Reader { buf: body, pos: MAGIC.len() };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(CheckpointError::Version {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        if Sha256::digest(body).as_slice() != stored {
            return Err(CheckpointError::Corrupt("checksum mismatch".into()));
        }
        let config_len = r.u32()? as usize;
        let config: MixGanConfig = serde_json::from_slice(r.take(config_len)?)
            .map_err(|e| CheckpointError::Corrupt(format!("config block: {e}")))?;
        let epoch = r.u64()?;
        let encoder = r.network()?;
        let generator = r.network()?;
        let discriminator = r.network()?;
        let optimizers = match r.u8()? {
            0 => None,
            1 => Some(OptimizerStates::from_order([r.adam()?, r.adam()?, r.adam()?, r.adam()?])),
            other => return Err(CheckpointError::Corrupt(format!("optimizer flag {other}"))),
        };
        if r.pos != body.len() {
            return Err(CheckpointError::Corrupt(format!(
                "{} trailing bytes",
                body.len() - r.pos
            )));
        }
        let model = MixGanModel::from_parts(config, encoder, generator, discriminator)
            .map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
        Ok(Self {
            format_version: version,
            model,
            optimizers,
            epoch,
        })
    }
}

pub fn save_checkpoint(checkpoint: &ModelCheckpoint, path: impl AsRef<Path>) -> CkResult<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint.to_bytes()).map_err(|source| CheckpointError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> CkResult<ModelCheckpoint> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| CheckpointError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ModelCheckpoint::from_bytes(&bytes)
}

/// Loads and checks the stored config against `expected`.
pub fn load_checkpoint_for(path: impl AsRef<Path>, expected: &MixGanConfig) -> CkResult<ModelCheckpoint> {
    let ck = load_checkpoint(path)?;
    ck.check_config(expected)?;
    Ok(ck)
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.f64(v);
        }
    }

    fn network(&mut self, net: &Mlp) {
        self.f64(net.dropout_rate());
        self.u32(net.dropout_after().len() as u32);
        for &p in net.dropout_after() {
            self.u32(p as u32);
        }
        self.u32(net.layers().len() as u32);
        for layer in net.layers() {
            self.u8(layer.activation.tag());
            let slope = match layer.activation {
                Activation::LeakyRelu { slope } => slope,
                _ => 0.0,
            };
            self.f64(slope);
            self.u32(layer.in_dim() as u32);
            self.u32(layer.out_dim() as u32);
            self.f64s(layer.weights.as_slice());
            self.f64s(&layer.bias);
        }
    }

    fn adam(&mut self, s: &AdamState) {
        self.f64(s.learning_rate);
        self.f64(s.beta1);
        self.f64(s.beta2);
        self.f64(s.epsilon);
        self.u64(s.step_count);
        self.u32(s.first_moment.len() as u32);
        for (m, v) in s.first_moment.iter().zip(&s.second_moment) {
            self.u32(m.len() as u32);
            self.f64s(m);
            self.f64s(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> CkResult<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| CheckpointError::Corrupt(format!("unexpected end of file at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> CkResult<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> CkResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> CkResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> CkResult<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64s(&mut self, n: usize) -> CkResult<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| CheckpointError::Corrupt("size overflow".into()))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn network(&mut self) -> CkResult<Mlp> {
        let dropout_rate = self.f64()?;
        let n_drop = self.u32()? as usize;
        let positions = (0..n_drop)
            .map(|_| self.u32().map(|p| p as usize))
            .collect::<CkResult<Vec<_>>>()?;
        let n_layers = self.u32()? as usize;
        let mut layers = Vec::new();
        for _ in 0..n_layers {
            let tag = self.u8()?;
            let slope = self.f64()?;
            let activation = Activation::from_tag(tag, slope)
                .ok_or_else(|| CheckpointError::Corrupt(format!("unknown activation tag {tag}")))?;
            let in_dim = self.u32()? as usize;
            let out_dim = self.u32()? as usize;
            let weights = Matrix::from_vec(in_dim, out_dim, self.f64s(in_dim * out_dim)?)
                .map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
            let bias = self.f64s(out_dim)?;
            layers.push(DenseLayer {
                weights,
                bias,
                activation,
            });
        }
        Mlp::new(layers, dropout_rate, positions).map_err(|e| CheckpointError::Corrupt(e.to_string()))
    }

    fn adam(&mut self) -> CkResult<AdamState> {
        let learning_rate = self.f64()?;
        let beta1 = self.f64()?;
        let beta2 = self.f64()?;
        let epsilon = self.f64()?;
        let step_count = self.u64()?;
        let n = self.u32()? as usize;
        let mut first_moment = Vec::new();
        let mut second_moment = Vec::new();
        for _ in 0..n {
            let len = self.u32()? as usize;
            first_moment.push(self.f64s(len)?);
            second_moment.push(self.f64s(len)?);
        }
        Ok(AdamState {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            step_count,
            first_moment,
            second_moment,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config(latent_dim: usize) -> MixGanConfig {
        MixGanConfig {
            input_dim: 9,
            latent_dim,
            encoder_hidden: vec![7, 5],
            discriminator_hidden: vec![6, 6],
            ..Default::default()
        }
    }

    fn checkpoint(latent_dim: usize) -> ModelCheckpoint {
        let model = MixGanModel::new(config(latent_dim), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let opt = OptimizerStates::new(&model, &crate::training::TrainConfig::default());
        ModelCheckpoint::new(model, Some(opt), 12)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let ck = checkpoint(2);
        let bytes = ck.to_bytes();
        let back = ModelCheckpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn corrupted_magic() {
        let mut bytes = checkpoint(2).to_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            ModelCheckpoint::from_bytes(&bytes),
            Err(CheckpointError::Corrupt(_))
        ));
    }

    #[test]
    fn flipped_payload_byte() {
        let mut bytes = checkpoint(2).to_bytes();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        assert!(matches!(
            ModelCheckpoint::from_bytes(&bytes),
            Err(CheckpointError::Corrupt(_))
        ));
        let truncated = &checkpoint(2).to_bytes()[..40];
        assert!(matches!(
            ModelCheckpoint::from_bytes(truncated),
            Err(CheckpointError::Corrupt(_))
        ));
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = checkpoint(2).to_bytes();
        bytes[6..10].copy_from_slice(&7u32.to_le_bytes());
        assert!(matches!(
            ModelCheckpoint::from_bytes(&bytes),
            Err(CheckpointError::Version { found: 7, expected: 1 })
        ));
    }

    #[test]
    fn latent_mismatch_refused() {
        let ck = checkpoint(2);
        assert!(ck.check_config(&config(2)).is_ok());
        match ck.check_config(&config(25)) {
            Err(CheckpointError::ConfigMismatch(msg)) => assert!(msg.contains("latent_dim")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn io_error_is_distinct() {
        assert!(matches!(
            load_checkpoint("/nonexistent/dir/model.ckpt"),
            Err(CheckpointError::Io { .. })
        ));
    }
}
