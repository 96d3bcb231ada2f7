//! Checkpointing for the trajectory GAN: model weights, optimizer moments,
//! iteration counter and seed, so interrupted training resumes exactly.

use std::path::Path;

use crate::nn::{tensor_from_array, tensor_to_array, Adam, ArrayMap, NamedArray, Tensor, WeightsError};

use super::discriminator::DiscriminatorModel;
use super::generator::GeneratorModel;
use super::train::GanTrainer;
use super::GanConfig;

/// What a GAN weight file contains besides the raw arrays.
#[derive(Debug, Clone)]
pub struct GanCheckpoint {
    pub iteration: u64,
    pub seed: u64,
    pub cfg: GanConfig,
}

fn config_arrays(cfg: &GanConfig) -> Vec<NamedArray> {
    vec![
        NamedArray::scalar("cfg.observed_len", cfg.observed_len as f64),
        NamedArray::scalar("cfg.future_len", cfg.future_len as f64),
        NamedArray::scalar("cfg.embed_dim", cfg.embed_dim as f64),
        NamedArray::scalar("cfg.hidden_dim", cfg.hidden_dim as f64),
        NamedArray::scalar("cfg.pool_dim", cfg.pool_dim as f64),
        NamedArray::scalar("cfg.noise_dim", cfg.noise_dim as f64),
        NamedArray::scalar("cfg.pool_distance_scale", cfg.pool_distance_scale),
        NamedArray::scalar("cfg.batch_size", cfg.batch_size as f64),
        NamedArray::scalar("cfg.lr_generator", cfg.lr_generator),
        NamedArray::scalar("cfg.lr_discriminator", cfg.lr_discriminator),
        NamedArray::scalar("cfg.adversarial_weight", cfg.adversarial_weight),
        NamedArray::scalar("cfg.variety_samples", cfg.variety_samples as f64),
        NamedArray::scalar("cfg.iterations", cfg.iterations as f64),
        NamedArray::scalar("cfg.holdout_fraction", cfg.holdout_fraction),
    ]
}

fn config_from_map(map: &ArrayMap) -> Result<GanConfig, WeightsError> {
    Ok(GanConfig {
        observed_len: map.scalar("cfg.observed_len")? as usize,
        future_len: map.scalar("cfg.future_len")? as usize,
        embed_dim: map.scalar("cfg.embed_dim")? as usize,
        hidden_dim: map.scalar("cfg.hidden_dim")? as usize,
        pool_dim: map.scalar("cfg.pool_dim")? as usize,
        noise_dim: map.scalar("cfg.noise_dim")? as usize,
        pool_distance_scale: map.scalar("cfg.pool_distance_scale")?,
        batch_size: map.scalar("cfg.batch_size")? as usize,
        lr_generator: map.scalar("cfg.lr_generator")?,
        lr_discriminator: map.scalar("cfg.lr_discriminator")?,
        adversarial_weight: map.scalar("cfg.adversarial_weight")?,
        variety_samples: map.scalar("cfg.variety_samples")? as usize,
        iterations: map.scalar("cfg.iterations")? as u64,
        holdout_fraction: map.scalar("cfg.holdout_fraction")?,
    })
}

fn generator_entries(gen: &GeneratorModel) -> Vec<(&'static str, &Tensor)> {
    vec![
        ("gen.embed.weight", &gen.embed.weight),
        ("gen.embed.bias", &gen.embed.bias),
        ("gen.encoder.w_x", &gen.encoder.w_x),
        ("gen.encoder.w_h", &gen.encoder.w_h),
        ("gen.encoder.bias", &gen.encoder.bias),
        ("gen.pool.weight", &gen.pool.weight),
        ("gen.pool.bias", &gen.pool.bias),
        ("gen.pool_placeholder", &gen.pool_placeholder),
        ("gen.dec_embed.weight", &gen.dec_embed.weight),
        ("gen.dec_embed.bias", &gen.dec_embed.bias),
        ("gen.decoder.w_x", &gen.decoder.w_x),
        ("gen.decoder.w_h", &gen.decoder.w_h),
        ("gen.decoder.bias", &gen.decoder.bias),
        ("gen.head.weight", &gen.head.weight),
        ("gen.head.bias", &gen.head.bias),
    ]
}

fn discriminator_entries(disc: &DiscriminatorModel) -> Vec<(&'static str, &Tensor)> {
    vec![
        ("disc.embed.weight", &disc.embed.weight),
        ("disc.embed.bias", &disc.embed.bias),
        ("disc.encoder.w_x", &disc.encoder.w_x),
        ("disc.encoder.w_h", &disc.encoder.w_h),
        ("disc.encoder.bias", &disc.encoder.bias),
        ("disc.head.weight", &disc.head.weight),
        ("disc.head.bias", &disc.head.bias),
    ]
}

fn load_into(target: &mut Tensor, map: &ArrayMap, name: &str) -> Result<(), WeightsError> {
    *target = tensor_from_array(map, name, target.rows(), target.cols())?;
    Ok(())
}

fn adam_arrays(prefix: &str, adam: &Adam) -> Vec<NamedArray> {
    let (step, first, second) = adam.export_state();
    let mut arrays = vec![NamedArray::scalar_bits(format!("{prefix}.step"), step)];
    for (i, t) in first.iter().enumerate() {
        arrays.push(tensor_to_array(&format!("{prefix}.m.{i}"), t));
    }
    for (i, t) in second.iter().enumerate() {
        arrays.push(tensor_to_array(&format!("{prefix}.v.{i}"), t));
    }
    arrays
}

fn adam_from_map(
    prefix: &str,
    map: &ArrayMap,
    adam: &mut Adam,
    shapes: &[(usize, usize)],
) -> Result<(), WeightsError> {
    let step = map.scalar_bits(&format!("{prefix}.step"))?;
    if step == 0 {
        return Ok(()); // fresh optimizer: no moments were saved
    }
    let mut first = Vec::with_capacity(shapes.len());
    let mut second = Vec::with_capacity(shapes.len());
    for (i, &(rows, cols)) in shapes.iter().enumerate() {
        first.push(tensor_from_array(map, &format!("{prefix}.m.{i}"), rows, cols)?);
        second.push(tensor_from_array(map, &format!("{prefix}.v.{i}"), rows, cols)?);
    }
    adam.import_state(step, first, second);
    Ok(())
}

pub fn save_gan(path: &Path, trainer: &GanTrainer) -> Result<(), WeightsError> {
    let mut arrays = config_arrays(&trainer.cfg);
    arrays.push(NamedArray::scalar_bits("meta.iteration", trainer.iteration));
    arrays.push(NamedArray::scalar_bits("meta.seed", trainer.seed));
    for (name, t) in generator_entries(&trainer.generator) {
        arrays.push(tensor_to_array(name, t));
    }
    for (name, t) in discriminator_entries(&trainer.discriminator) {
        arrays.push(tensor_to_array(name, t));
    }
    if trainer.adam_generator.step_count() > 0 {
        arrays.extend(adam_arrays("adam_g", &trainer.adam_generator));
        arrays.extend(adam_arrays("adam_d", &trainer.adam_discriminator));
    } else {
        arrays.push(NamedArray::scalar_bits("adam_g.step", 0));
        arrays.push(NamedArray::scalar_bits("adam_d.step", 0));
    }
    crate::nn::weights::save(path, &arrays)
}

pub fn load_gan(path: &Path) -> Result<GanTrainer, WeightsError> {
    let map = ArrayMap::new(crate::nn::weights::load(path)?);
    let cfg = config_from_map(&map)?;
    let seed = map.scalar_bits("meta.seed")?;
    let mut trainer = GanTrainer::new(cfg, seed);
    trainer.iteration = map.scalar_bits("meta.iteration")?;

    let gen = &mut trainer.generator;
    load_into(&mut gen.embed.weight, &map, "gen.embed.weight")?;
    load_into(&mut gen.embed.bias, &map, "gen.embed.bias")?;
    load_into(&mut gen.encoder.w_x, &map, "gen.encoder.w_x")?;
    load_into(&mut gen.encoder.w_h, &map, "gen.encoder.w_h")?;
    load_into(&mut gen.encoder.bias, &map, "gen.encoder.bias")?;
    load_into(&mut gen.pool.weight, &map, "gen.pool.weight")?;
    load_into(&mut gen.pool.bias, &map, "gen.pool.bias")?;
    load_into(&mut gen.pool_placeholder, &map, "gen.pool_placeholder")?;
    load_into(&mut gen.dec_embed.weight, &map, "gen.dec_embed.weight")?;
    load_into(&mut gen.dec_embed.bias, &map, "gen.dec_embed.bias")?;
    load_into(&mut gen.decoder.w_x, &map, "gen.decoder.w_x")?;
    load_into(&mut gen.decoder.w_h, &map, "gen.decoder.w_h")?;
    load_into(&mut gen.decoder.bias, &map, "gen.decoder.bias")?;
    load_into(&mut gen.head.weight, &map, "gen.head.weight")?;
    load_into(&mut gen.head.bias, &map, "gen.head.bias")?;

    let disc = &mut trainer.discriminator;
    load_into(&mut disc.embed.weight, &map, "disc.embed.weight")?;
    load_into(&mut disc.embed.bias, &map, "disc.embed.bias")?;
    load_into(&mut disc.encoder.w_x, &map, "disc.encoder.w_x")?;
    load_into(&mut disc.encoder.w_h, &map, "disc.encoder.w_h")?;
    load_into(&mut disc.encoder.bias, &map, "disc.encoder.bias")?;
    load_into(&mut disc.head.weight, &map, "disc.head.weight")?;
    load_into(&mut disc.head.bias, &map, "disc.head.bias")?;

    let g_shapes: Vec<(usize, usize)> =
        trainer.generator.params().iter().map(|(p, _)| p.shape()).collect();
    adam_from_map("adam_g", &map, &mut trainer.adam_generator, &g_shapes)?;
    let d_shapes: Vec<(usize, usize)> =
        trainer.discriminator.params().iter().map(|(p, _)| p.shape()).collect();
    adam_from_map("adam_d", &map, &mut trainer.adam_discriminator, &d_shapes)?;
    Ok(trainer)
}

/// Metadata without reconstructing the models.
pub fn read_checkpoint_meta(path: &Path) -> Result<GanCheckpoint, WeightsError> {
    let map = ArrayMap::new(crate::nn::weights::load(path)?);
    Ok(GanCheckpoint {
        iteration: map.scalar_bits("meta.iteration")?,
        seed: map.scalar_bits("meta.seed")?,
        cfg: config_from_map(&map)?,
    })
}
