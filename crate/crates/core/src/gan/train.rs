//! Adversarial training loop: non-saturating discriminator updates plus a
//! best-of-k variety displacement loss for the generator.

use rand::Rng;
use thiserror::Error;

use crate::data::{displacement_errors, SceneWindow};
use crate::nn::{clip_global_norm, Adam, Tensor, GRAD_CLIP_NORM};
use crate::seeding::{derive_rng, stream};

use super::discriminator::DiscriminatorModel;
use super::generator::GeneratorModel;
use super::GanConfig;

#[derive(Debug, Clone, Copy)]
pub struct GanMetrics {
    pub iteration: u64,
    pub loss_generator: f64,
    pub loss_discriminator: f64,
    pub ade: f64,
    pub fde: f64,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("non-finite {what} at iteration {iteration}")]
    NonFinite { what: &'static str, iteration: u64 },
    #[error("empty batch")]
    EmptyBatch,
}

pub struct GanTrainer {
    pub generator: GeneratorModel,
    pub discriminator: DiscriminatorModel,
    pub cfg: GanConfig,
    pub adam_generator: Adam,
    pub adam_discriminator: Adam,
    pub iteration: u64,
    pub seed: u64,
}

impl GanTrainer {
    pub fn new(cfg: GanConfig, seed: u64) -> Self {
        let mut init_rng = derive_rng(seed, stream::GAN_NOISE, u64::MAX);
        GanTrainer {
            generator: GeneratorModel::new(cfg.clone(), &mut init_rng),
            discriminator: DiscriminatorModel::new(cfg.clone(), &mut init_rng),
            adam_generator: Adam::new(cfg.lr_generator),
            adam_discriminator: Adam::new(cfg.lr_discriminator),
            cfg,
            iteration: 0,
            seed,
        }
    }

    /// One adversarial step over a batch of scene windows: discriminator
    /// update on real-vs-generated cross-entropy, then generator update on
    /// the weighted adversarial term plus the variety displacement loss.
    pub fn train_step(&mut self, batch: &[&SceneWindow]) -> Result<GanMetrics, TrainError> {
        if batch.is_empty() {
            return Err(TrainError::EmptyBatch);
        }
        let iteration = self.iteration;
        let mut rng = derive_rng(self.seed, stream::GAN_NOISE, iteration);
        let p_l = self.cfg.future_len;
        let batch_scale = 1.0 / batch.len() as f64;

        // Discriminator update.
        self.discriminator.zero_grad();
        let mut loss_d = 0.0;
        for window in batch {
            let n = window.vehicle_count() as f64;
            let real = DiscriminatorModel::window_displacements(&window.observed, &window.future);
            let fwd_real = self.discriminator.forward(&real);
            let mut grad_real = Tensor::zeros(1, window.vehicle_count());
            for j in 0..window.vehicle_count() {
                let p = fwd_real.probs[(0, j)];
                loss_d += -(p.max(1e-12)).ln() / n * batch_scale;
                grad_real[(0, j)] = (p - 1.0) / n * batch_scale;
            }
            self.discriminator.backward(&fwd_real, &grad_real);

            let enc = self.generator.encode_scene(&window.observed);
            let z = self.generator.sample_noise(&mut rng);
            let rollout = self.generator.decode_future(&enc, &z, p_l);
            let fake = DiscriminatorModel::window_displacements(
                &window.observed,
                &rollout.positions_per_vehicle(),
            );
            let fwd_fake = self.discriminator.forward(&fake);
            let mut grad_fake = Tensor::zeros(1, window.vehicle_count());
            for j in 0..window.vehicle_count() {
                let p = fwd_fake.probs[(0, j)];
                loss_d += -((1.0 - p).max(1e-12)).ln() / n * batch_scale;
                grad_fake[(0, j)] = p / n * batch_scale;
            }
            self.discriminator.backward(&fwd_fake, &grad_fake);
        }
        if !loss_d.is_finite() {
            return Err(TrainError::NonFinite { what: "discriminator loss", iteration });
        }
        let mut d_params = self.discriminator.params();
        clip_global_norm(&mut d_params, GRAD_CLIP_NORM);
        self.adam_discriminator.step(d_params);

        // Generator update.
        self.generator.zero_grad();
        let mut loss_g = 0.0;
        let mut ade_sum = 0.0;
        let mut fde_sum = 0.0;
        for window in batch {
            let n = window.vehicle_count();
            let enc = self.generator.encode_scene(&window.observed);

            // Best-of-k variety rollout.
            let mut best: Option<(f64, usize)> = None;
            let mut rollouts = Vec::with_capacity(self.cfg.variety_samples);
            for k in 0..self.cfg.variety_samples.max(1) {
                let z = self.generator.sample_noise(&mut rng);
                let rollout = self.generator.decode_future(&enc, &z, p_l);
                let loss = variety_loss(&rollout.positions, &window.future);
                if best.map_or(true, |(b, _)| loss < b) {
                    best = Some((loss, k));
                }
                rollouts.push(rollout);
            }
            let (variety, best_idx) = best.unwrap();
            let rollout = &rollouts[best_idx];
            loss_g += variety * batch_scale;

            // Position-space gradients fold into per-step delta gradients by
            // suffix summation (a delta moves every later position).
            let norm = 2.0 / (p_l as f64 * n as f64) * batch_scale;
            let mut delta_grads = vec![Tensor::zeros(2, n); p_l];
            let mut suffix = Tensor::zeros(2, n);
            for s in (0..p_l).rev() {
                let pos = &rollout.positions[s];
                let grad_pos = Tensor::from_fn(2, n, |row, j| {
                    let truth = window.future[j][s];
                    let diff = if row == 0 { pos[(0, j)] - truth.0 } else { pos[(1, j)] - truth.1 };
                    diff * norm
                });
                suffix.add_assign(&grad_pos);
                delta_grads[s] = suffix.clone();
            }

            // Adversarial term through a frozen-discriminator pass.
            if self.cfg.adversarial_weight > 0.0 {
                let fake = DiscriminatorModel::window_displacements(
                    &window.observed,
                    &rollout.positions_per_vehicle(),
                );
                let fwd = self.discriminator.forward(&fake);
                let mut grad_logits = Tensor::zeros(1, n);
                for j in 0..n {
                    let p = fwd.probs[(0, j)];
                    loss_g += self.cfg.adversarial_weight * -(p.max(1e-12)).ln() / n as f64 * batch_scale;
                    grad_logits[(0, j)] =
                        self.cfg.adversarial_weight * (p - 1.0) / n as f64 * batch_scale;
                }
                let input_grads = self.discriminator.backward(&fwd, &grad_logits);
                for s in 0..p_l {
                    delta_grads[s].add_assign(&input_grads[self.cfg.observed_len + s]);
                }
            }

            self.generator.backward(&enc, rollout, &delta_grads);

            let (ade, fde) = displacement_errors(&rollout.positions_per_vehicle(), &window.future)
                .expect("matching shapes");
            ade_sum += ade * batch_scale;
            fde_sum += fde * batch_scale;
        }
        if !loss_g.is_finite() {
            return Err(TrainError::NonFinite { what: "generator loss", iteration });
        }
        let mut g_params = self.generator.params();
        clip_global_norm(&mut g_params, GRAD_CLIP_NORM);
        self.adam_generator.step(g_params);
        // Discriminator gradients polluted by the generator pass are dropped.
        self.discriminator.zero_grad();

        self.iteration += 1;
        Ok(GanMetrics {
            iteration,
            loss_generator: loss_g,
            loss_discriminator: loss_d,
            ade: ade_sum,
            fde: fde_sum,
        })
    }

    /// Runs `iterations` steps over the dataset with per-iteration seeded
    /// batch selection; invokes `on_metrics` after every step.
    pub fn train(
        &mut self,
        dataset: &[SceneWindow],
        iterations: u64,
        mut on_metrics: impl FnMut(&GanMetrics),
    ) -> Result<(), TrainError> {
        assert!(!dataset.is_empty(), "dataset must be non-empty");
        for _ in 0..iterations {
            let mut batch_rng = derive_rng(self.seed, stream::GAN_BATCH, self.iteration);
            let batch: Vec<&SceneWindow> = (0..self.cfg.batch_size)
                .map(|_| &dataset[batch_rng.random_range(0..dataset.len())])
                .collect();
            let metrics = self.train_step(&batch)?;
            on_metrics(&metrics);
        }
        Ok(())
    }
}

/// Mean squared Euclidean position error of one rollout.
fn variety_loss(positions: &[Tensor], future: &[Vec<(f64, f64)>]) -> f64 {
    let n = future.len();
    let p_l = positions.len();
    let mut total = 0.0;
    for (s, pos) in positions.iter().enumerate() {
        for (j, track) in future.iter().enumerate() {
            let (tx, ty) = track[s];
            total += (pos[(0, j)] - tx).powi(2) + (pos[(1, j)] - ty).powi(2);
        }
    }
    total / (n * p_l) as f64
}

/// Deterministic single-sample ADE/FDE of the generator over a set of
/// windows (noise derived from the window index).
pub fn evaluate_ade_fde(gen: &GeneratorModel, windows: &[&SceneWindow], seed: u64) -> (f64, f64) {
    assert!(!windows.is_empty());
    let mut ade_sum = 0.0;
    let mut fde_sum = 0.0;
    for (idx, window) in windows.iter().enumerate() {
        let enc = gen.encode_scene(&window.observed);
        let mut rng = derive_rng(seed, stream::GAN_NOISE, idx as u64);
        let z = gen.sample_noise(&mut rng);
        let rollout = gen.decode_future(&enc, &z, gen.cfg.future_len);
        let (ade, fde) = displacement_errors(&rollout.positions_per_vehicle(), &window.future)
            .expect("matching shapes");
        ade_sum += ade;
        fde_sum += fde;
    }
    (ade_sum / windows.len() as f64, fde_sum / windows.len() as f64)
}

/// Splits windows into (train, holdout) index sets, seeded.
pub fn split_dataset(count: usize, holdout_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..count).collect();
    let mut rng = derive_rng(seed, stream::DATA_SPLIT, 0);
    // Fisher-Yates.
    for i in (1..indices.len()).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
    let holdout_len = ((count as f64 * holdout_fraction).round() as usize).clamp(1, count.saturating_sub(1).max(1));
    let holdout = indices[..holdout_len].to_vec();
    let train = indices[holdout_len..].to_vec();
    (train, holdout)
}

/// Generated windows for inspection/testing: encode each window, roll out
/// once with seeded noise, and return predicted futures per window.
pub fn generate_windows(
    gen: &GeneratorModel,
    windows: &[&SceneWindow],
    seed: u64,
) -> Vec<Vec<Vec<(f64, f64)>>> {
    windows
        .iter()
        .enumerate()
        .map(|(idx, window)| {
            let enc = gen.encode_scene(&window.observed);
            let mut rng = derive_rng(seed, stream::GAN_NOISE, idx as u64);
            let z = gen.sample_noise(&mut rng);
            gen.decode_future(&enc, &z, gen.cfg.future_len).positions_per_vehicle()
        })
        .collect()
}
