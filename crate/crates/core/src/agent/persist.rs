//! Agent checkpoints: both networks plus a metadata block (config hash,
//! training iteration count, environment mode).

use std::path::Path;

use thiserror::Error;

use crate::env::TrafficMode;
use crate::nn::{tensor_from_array, tensor_to_array, ArrayMap, NamedArray, Tensor, WeightsError};

use super::qnet::QNetwork;
use super::trainer::{Agent, AgentConfig};

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error("checkpoint incompatible with requested network:\n{}", .0.join("\n"))]
    ShapeDiff(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct CheckpointMeta {
    pub train_steps: u64,
    pub env_mode: Option<TrafficMode>,
    pub config_hash: u64,
    pub obs_dim: usize,
    pub hidden_dim: usize,
}

/// FNV-1a over the debug rendering of the config; advisory provenance only.
pub fn config_hash(cfg: &AgentConfig) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in format!("{cfg:?}").bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn mode_tag(mode: Option<TrafficMode>) -> f64 {
    match mode {
        None => 0.0,
        Some(TrafficMode::Idm) => 1.0,
        Some(TrafficMode::Gan) => 2.0,
    }
}

fn tag_mode(tag: f64) -> Option<TrafficMode> {
    match tag as i64 {
        1 => Some(TrafficMode::Idm),
        2 => Some(TrafficMode::Gan),
        _ => None,
    }
}

fn net_entries<'a>(prefix: &str, net: &'a QNetwork) -> Vec<(String, &'a Tensor)> {
    vec![
        (format!("{prefix}.input.weight_mu"), &net.input.weight_mu),
        (format!("{prefix}.input.weight_sigma"), &net.input.weight_sigma),
        (format!("{prefix}.input.bias_mu"), &net.input.bias_mu),
        (format!("{prefix}.input.bias_sigma"), &net.input.bias_sigma),
        (format!("{prefix}.hidden.weight_mu"), &net.hidden.weight_mu),
        (format!("{prefix}.hidden.weight_sigma"), &net.hidden.weight_sigma),
        (format!("{prefix}.hidden.bias_mu"), &net.hidden.bias_mu),
        (format!("{prefix}.hidden.bias_sigma"), &net.hidden.bias_sigma),
        (format!("{prefix}.value_head.weight"), &net.value_head.weight),
        (format!("{prefix}.value_head.bias"), &net.value_head.bias),
        (format!("{prefix}.advantage_head.weight"), &net.advantage_head.weight),
        (format!("{prefix}.advantage_head.bias"), &net.advantage_head.bias),
    ]
}

fn load_net(prefix: &str, net: &mut QNetwork, map: &ArrayMap) -> Result<(), CheckpointError> {
    // Collect every field mismatch before refusing.
    let mut diffs = Vec::new();
    {
        let expected = net_entries(prefix, net);
        for (name, tensor) in &expected {
            match map.get(name) {
                Err(_) => diffs.push(format!("missing array '{name}'")),
                Ok(arr) => {
                    let want = vec![tensor.rows() as u64, tensor.cols() as u64];
                    if arr.dims != want {
                        diffs.push(format!("'{name}': checkpoint {:?} vs expected {:?}", arr.dims, want));
                    }
                }
            }
        }
    }
    if !diffs.is_empty() {
        return Err(CheckpointError::ShapeDiff(diffs));
    }
    macro_rules! load {
        ($field:expr, $name:expr) => {
            $field = tensor_from_array(map, &format!("{prefix}.{}", $name), $field.rows(), $field.cols())?;
        };
    }
    load!(net.input.weight_mu, "input.weight_mu");
    load!(net.input.weight_sigma, "input.weight_sigma");
    load!(net.input.bias_mu, "input.bias_mu");
    load!(net.input.bias_sigma, "input.bias_sigma");
    load!(net.hidden.weight_mu, "hidden.weight_mu");
    load!(net.hidden.weight_sigma, "hidden.weight_sigma");
    load!(net.hidden.bias_mu, "hidden.bias_mu");
    load!(net.hidden.bias_sigma, "hidden.bias_sigma");
    load!(net.value_head.weight, "value_head.weight");
    load!(net.value_head.bias, "value_head.bias");
    load!(net.advantage_head.weight, "advantage_head.weight");
    load!(net.advantage_head.bias, "advantage_head.bias");
    Ok(())
}

pub fn save_agent(path: &Path, agent: &Agent, env_mode: Option<TrafficMode>) -> Result<(), CheckpointError> {
    let cfg = &agent.cfg;
    let mut arrays = vec![
        NamedArray::scalar_bits("meta.train_steps", agent.train_steps),
        NamedArray::scalar("meta.env_mode", mode_tag(env_mode)),
        NamedArray::scalar_bits("meta.config_hash", config_hash(cfg)),
        NamedArray::scalar("meta.obs_dim", agent.obs_dim() as f64),
        NamedArray::scalar("meta.hidden_dim", cfg.hidden_dim as f64),
        NamedArray::scalar("cfg.discount", cfg.discount),
        NamedArray::scalar("cfg.lr", cfg.lr),
        NamedArray::scalar("cfg.batch_size", cfg.batch_size as f64),
        NamedArray::scalar("cfg.replay_capacity", cfg.replay_capacity as f64),
        NamedArray::scalar("cfg.target_sync_period", cfg.target_sync_period as f64),
        NamedArray::scalar("cfg.priority_alpha", cfg.priority_alpha),
        NamedArray::scalar("cfg.beta_start", cfg.beta_start),
        NamedArray::scalar("cfg.beta_end", cfg.beta_end),
        NamedArray::scalar("cfg.beta_anneal_steps", cfg.beta_anneal_steps as f64),
        NamedArray::scalar("cfg.warmup_steps", cfg.warmup_steps as f64),
    ];
    for (name, tensor) in net_entries("online", &agent.online) {
        arrays.push(tensor_to_array(&name, tensor));
    }
    for (name, tensor) in net_entries("target", &agent.target) {
        arrays.push(tensor_to_array(&name, tensor));
    }
    crate::nn::weights::save(path, &arrays)?;
    Ok(())
}

pub fn read_agent_meta(path: &Path) -> Result<CheckpointMeta, CheckpointError> {
    let map = ArrayMap::new(crate::nn::weights::load(path)?);
    Ok(CheckpointMeta {
        train_steps: map.scalar_bits("meta.train_steps")?,
        env_mode: tag_mode(map.scalar("meta.env_mode")?),
        config_hash: map.scalar_bits("meta.config_hash")?,
        obs_dim: map.scalar("meta.obs_dim")? as usize,
        hidden_dim: map.scalar("meta.hidden_dim")? as usize,
    })
}

/// Restores an agent exactly as saved (weights, both networks, counters);
/// replay contents are not persisted.
pub fn load_agent(path: &Path, cfg: AgentConfig, seed: u64) -> Result<(Agent, CheckpointMeta), CheckpointError> {
    let map = ArrayMap::new(crate::nn::weights::load(path)?);
    let meta = CheckpointMeta {
        train_steps: map.scalar_bits("meta.train_steps")?,
        env_mode: tag_mode(map.scalar("meta.env_mode")?),
        config_hash: map.scalar_bits("meta.config_hash")?,
        obs_dim: map.scalar("meta.obs_dim")? as usize,
        hidden_dim: map.scalar("meta.hidden_dim")? as usize,
    };
    let cfg = AgentConfig { hidden_dim: meta.hidden_dim, ..cfg };
    let mut agent = Agent::new(meta.obs_dim, cfg, seed);
    load_net("online", &mut agent.online, &map)?;
    load_net("target", &mut agent.target, &map)?;
    agent.train_steps = meta.train_steps;
    Ok((agent, meta))
}

/// Transfer learning entry point: pretrained weights, fresh everything else.
/// The loaded online network seeds both networks of the new agent.
pub fn transfer_init(path: &Path, cfg: AgentConfig, seed: u64) -> Result<Agent, CheckpointError> {
    let (loaded, _) = load_agent(path, cfg.clone(), seed)?;
    Ok(Agent::transfer_from(&loaded, cfg, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Mode;

    fn small_agent() -> Agent {
        let cfg = AgentConfig { hidden_dim: 16, ..Default::default() };
        Agent::new(9, cfg, 3)
    }

    #[test]
    fn save_load_roundtrip_preserves_eval_policy() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.tgsm");
        let agent = small_agent();
        save_agent(&path, &agent, Some(TrafficMode::Idm)).unwrap();
        let (loaded, meta) = load_agent(&path, agent.cfg.clone(), 99).unwrap();
        assert_eq!(meta.env_mode, Some(TrafficMode::Idm));
        assert_eq!(meta.config_hash, config_hash(&agent.cfg));
        let obs: Vec<f64> = (0..9).map(|i| (i as f64) * 0.1 - 0.4).collect();
        assert_eq!(agent.online.q_values(&obs, Mode::Eval), loaded.online.q_values(&obs, Mode::Eval));
    }

    #[test]
    fn transfer_resets_buffer_and_optimizer() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.tgsm");
        let agent = small_agent();
        save_agent(&path, &agent, Some(TrafficMode::Idm)).unwrap();
        let transferred = transfer_init(&path, agent.cfg.clone(), 1).unwrap();
        assert_eq!(transferred.buffer.len(), 0);
        assert_eq!(transferred.adam.step_count(), 0);
        assert_eq!(transferred.train_steps, 0);
        let obs: Vec<f64> = vec![0.2; 9];
        assert_eq!(agent.online.q_values(&obs, Mode::Eval), transferred.online.q_values(&obs, Mode::Eval));
    }

    #[test]
    fn shape_mismatch_lists_every_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.tgsm");
        let agent = small_agent();
        save_agent(&path, &agent, None).unwrap();
        // Pretend the checkpoint was for a different observation size.
        let map = ArrayMap::new(crate::nn::weights::load(&path).unwrap());
        let mut other = QNetwork::new(12, 16, &mut crate::seeding::derive_rng(0, 0, 0));
        let err = load_net("online", &mut other, &map).unwrap_err();
        match err {
            CheckpointError::ShapeDiff(diffs) => {
                assert!(diffs.iter().any(|d| d.contains("input.weight_mu")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
