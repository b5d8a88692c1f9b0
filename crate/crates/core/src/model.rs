//! Encoder / generator / discriminator networks.
//!
//! The generator doubles as the autoencoder's decoder: it consumes the
//! encoder's latent code rather than a random prior.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, Matrix, Mlp, DEFAULT_LEAKY_SLOPE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixGanConfig {
    pub input_dim: usize,
    pub latent_dim: usize,
    /// Encoder hidden widths; the generator uses them in reverse.
    pub encoder_hidden: Vec<usize>,
    pub discriminator_hidden: Vec<usize>,
    pub dropout_rate: f64,
    pub leaky_slope: f64,
}

impl Default for MixGanConfig {
    fn default() -> Self {
        Self {
            input_dim: 1582,
            latent_dim: 2,
            encoder_hidden: vec![1000, 500],
            discriminator_hidden: vec![1000, 1000],
            dropout_rate: 0.5,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
        }
    }
}

impl MixGanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.latent_dim == 0 {
            return Err(Error::Config("model.input_dim and model.latent_dim must be positive".into()));
        }
        if self.encoder_hidden.is_empty() || self.encoder_hidden.contains(&0) {
            return Err(Error::Config("model.encoder_hidden must list positive widths".into()));
        }
        if self.discriminator_hidden.is_empty() || self.discriminator_hidden.contains(&0) {
            return Err(Error::Config(
                "model.discriminator_hidden must list positive widths".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.dropout_rate) {
            return Err(Error::Config("model.dropout_rate must lie in [0, 1]".into()));
        }
        if !self.leaky_slope.is_finite() {
            return Err(Error::Config("model.leaky_slope must be finite".into()));
        }
        Ok(())
    }

    fn hidden_activation(&self) -> Activation {
        Activation::LeakyRelu {
            slope: self.leaky_slope,
        }
    }

    /// Dropout sits between the first and second hidden layers, when there are two.
    fn dropout_positions(hidden: &[usize]) -> Vec<usize> {
        if hidden.len() >= 2 {
            vec![0]
        } else {
            vec![]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixGanModel {
    config: MixGanConfig,
    pub encoder: Mlp,
    pub generator: Mlp,
    pub discriminator: Mlp,
}

impl MixGanModel {
    /// Encoder `input → hidden… → latent` (linear code), generator
    /// `latent → reversed hidden… → input` (linear output), discriminator
    /// `input → disc hidden… → 1` (sigmoid). Leaky ReLU on every hidden layer.
    pub fn new<R: Rng + ?Sized>(config: MixGanConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let hidden = config.hidden_activation();

        let mut enc_dims = vec![config.input_dim];
        enc_dims.extend(&config.encoder_hidden);
        enc_dims.push(config.latent_dim);
        let encoder = Mlp::with_dims(
            &enc_dims,
            hidden,
            Activation::Linear,
            config.dropout_rate,
            MixGanConfig::dropout_positions(&config.encoder_hidden),
            rng,
        )?;

        let gen_dims: Vec<usize> = enc_dims.iter().rev().copied().collect();
        let generator = Mlp::with_dims(
            &gen_dims,
            hidden,
            Activation::Linear,
            config.dropout_rate,
            MixGanConfig::dropout_positions(&config.encoder_hidden),
            rng,
        )?;

        let mut disc_dims = vec![config.input_dim];
        disc_dims.extend(&config.discriminator_hidden);
        disc_dims.push(1);
        let discriminator = Mlp::with_dims(&disc_dims, hidden, Activation::Sigmoid, 0.0, vec![], rng)?;

        Ok(Self {
            config,
            encoder,
            generator,
            discriminator,
        })
    }

    /// Reassembles a model from stored networks, checking they fit `config`.
    pub fn from_parts(config: MixGanConfig, encoder: Mlp, generator: Mlp, discriminator: Mlp) -> Result<Self> {
        config.validate()?;
        let checks = [
            ("encoder input", encoder.in_dim(), config.input_dim),
            ("encoder output", encoder.out_dim(), config.latent_dim),
            ("generator input", generator.in_dim(), config.latent_dim),
            ("generator output", generator.out_dim(), config.input_dim),
            ("discriminator input", discriminator.in_dim(), config.input_dim),
            ("discriminator output", discriminator.out_dim(), 1),
        ];
        for (what, found, expected) in checks {
            if found != expected {
                return Err(Error::shape(format!("MixGanModel {what}"), expected, found));
            }
        }
        Ok(Self {
            config,
            encoder,
            generator,
            discriminator,
        })
    }

    pub fn config(&self) -> &MixGanConfig {
        &self.config
    }

    pub fn param_count(&self) -> usize {
        self.encoder.param_count() + self.generator.param_count() + self.discriminator.param_count()
    }

    /// Latent codes `z_e = E(x)`. `dropout` selects train mode.
    pub fn encode(&self, x: &Matrix, dropout: Option<&mut dyn RngCore>) -> Result<Matrix> {
        check_cols("encode", x, self.config.input_dim)?;
        match dropout {
            Some(rng) => Ok(self.encoder.forward(x, Some(rng))?.output().clone()),
            None => self.encoder.predict(x),
        }
    }

    /// Synthetic samples `G(z)`.
    pub fn generate(&self, z: &Matrix, dropout: Option<&mut dyn RngCore>) -> Result<Matrix> {
        check_cols("generate", z, self.config.latent_dim)?;
        match dropout {
            Some(rng) => Ok(self.generator.forward(z, Some(rng))?.output().clone()),
            None => self.generator.predict(z),
        }
    }

    /// `G(E(x))` in eval mode.
    pub fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        self.generate(&self.encode(x, None)?, None)
    }

    /// Probability that each row is a real sample.
    pub fn discriminate(&self, x: &Matrix) -> Result<Vec<f64>> {
        check_cols("discriminate", x, self.config.input_dim)?;
        Ok(self.discriminator.predict(x)?.into_vec())
    }
}

fn check_cols(what: &str, x: &Matrix, expected: usize) -> Result<()> {
    if x.cols() != expected {
        return Err(Error::shape(format!("{what} input columns"), expected, x.cols()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> MixGanConfig {
        MixGanConfig {
            input_dim: 12,
            latent_dim: 3,
            encoder_hidden: vec![10, 6],
            discriminator_hidden: vec![8, 8],
            ..Default::default()
        }
    }

    #[test]
    fn default_encoder_param_count() {
        let cfg = MixGanConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = MixGanModel::new(cfg, &mut rng).unwrap();
        let expected = 1582 * 1000 + 1000 + 1000 * 500 + 500 + 500 * 2 + 2;
        assert_eq!(m.encoder.param_count(), expected);
        // mirrored generator
        let dims: Vec<usize> = m.generator.layers().iter().map(|l| l.out_dim()).collect();
        assert_eq!(dims, vec![500, 1000, 1582]);
        assert_eq!(m.encoder.dropout_after(), &[0]);
        assert_eq!(m.discriminator.dropout_rate(), 0.0);
    }

    #[test]
    fn latent_25_sizes_generator_input() {
        let cfg = MixGanConfig {
            latent_dim: 25,
            ..small()
        };
        let m = MixGanModel::new(cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(m.generator.in_dim(), 25);
    }

    #[test]
    fn same_seed_same_model() {
        let a = MixGanModel::new(small(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = MixGanModel::new(small(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shape_chain() {
        let m = MixGanModel::new(small(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let x = Matrix::filled(7, 12, 0.5);
        let z = m.encode(&x, None).unwrap();
        assert_eq!(z.shape(), (7, 3));
        assert_eq!(z, m.encode(&x, None).unwrap());
        let xh = m.generate(&z, None).unwrap();
        assert_eq!(xh.shape(), (7, 12));
        let p = m.discriminate(&xh).unwrap();
        assert_eq!(p.len(), 7);
        assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
        assert!(m.encode(&Matrix::zeros(1, 11), None).is_err());
        assert!(m.generate(&Matrix::zeros(1, 12), None).is_err());
    }

    #[test]
    fn invalid_config() {
        let bad = MixGanConfig {
            latent_dim: 0,
            ..small()
        };
        assert!(MixGanModel::new(bad, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
