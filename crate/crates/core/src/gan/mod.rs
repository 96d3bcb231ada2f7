//! Generative adversarial trajectory model with social pooling.
//!
//! The generator embeds per-step displacements of every vehicle in a scene,
//! encodes each vehicle with a shared LSTM, pools neighbor hidden states
//! through an elementwise max, and decodes future displacements from a
//! noise-conditioned LSTM whose initial hidden state is `[context; z]`.
//! Working in displacements (and relative positions in the pool) makes the
//! whole pipeline translation covariant by construction.

mod discriminator;
mod generator;
mod persist;
mod train;

pub use discriminator::{DiscForward, DiscriminatorModel};
pub use generator::{DecodeRollout, GeneratorModel, SceneEncoding};
pub use persist::{load_gan, read_checkpoint_meta, save_gan, GanCheckpoint};
pub use train::{evaluate_ade_fde, generate_windows, split_dataset, GanMetrics, GanTrainer, TrainError};

use serde::{Deserialize, Serialize};

/// Architecture and training hyper-parameters of the trajectory GAN.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GanConfig {
    /// Observation sequence length `o_l`.
    pub observed_len: usize,
    /// Prediction sequence length `p_l`.
    pub future_len: usize,
    /// Embedding width for position displacements.
    pub embed_dim: usize,
    /// Encoder LSTM hidden size.
    pub hidden_dim: usize,
    /// Pooled context size.
    pub pool_dim: usize,
    /// Noise vector size.
    pub noise_dim: usize,
    /// Relative positions are scaled by this before entering the pool MLP.
    pub pool_distance_scale: f64,
    pub batch_size: usize,
    pub lr_generator: f64,
    pub lr_discriminator: f64,
    /// Weight of the adversarial term in the generator loss.
    pub adversarial_weight: f64,
    /// Number of noise draws for the variety (best-of-k) loss.
    pub variety_samples: usize,
    pub iterations: u64,
    /// Fraction of windows held out for evaluation.
    pub holdout_fraction: f64,
}

impl Default for GanConfig {
    fn default() -> Self {
        GanConfig {
            observed_len: 8,
            future_len: 8,
            embed_dim: 64,
            hidden_dim: 64,
            pool_dim: 64,
            noise_dim: 8,
            pool_distance_scale: 0.02,
            batch_size: 8,
            lr_generator: 1e-3,
            lr_discriminator: 1e-3,
            adversarial_weight: 1.0,
            variety_samples: 4,
            iterations: 2000,
            holdout_fraction: 0.1,
        }
    }
}

impl GanConfig {
    /// Decoder hidden size: pooled context concatenated with noise.
    pub fn decoder_hidden(&self) -> usize {
        self.pool_dim + self.noise_dim
    }
}
