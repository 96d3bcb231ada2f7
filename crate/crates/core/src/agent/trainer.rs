//! Double-Q training loop with prioritized replay, Huber loss, importance
//! weighting and periodic hard target synchronization.

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::Action;
use crate::nn::{clip_global_norm, Adam, Mode, Tensor, GRAD_CLIP_NORM};
use crate::seeding::{derive_rng, stream};

use super::qnet::{argmax_action, QNetwork};
use super::replay::{ReplayBuffer, ReplayError, Transition};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentConfig {
    pub discount: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    /// Hard target-network sync period in train steps.
    pub target_sync_period: u64,
    pub priority_alpha: f64,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Train steps over which beta anneals from start to end.
    pub beta_anneal_steps: u64,
    /// Transitions collected before updates begin.
    pub warmup_steps: usize,
    pub hidden_dim: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            discount: 0.95,
            lr: 1e-4,
            batch_size: 64,
            replay_capacity: 100_000,
            target_sync_period: 2_000,
            priority_alpha: 0.6,
            beta_start: 0.4,
            beta_end: 1.0,
            beta_anneal_steps: 100_000,
            warmup_steps: 1_000,
            hidden_dim: 256,
        }
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("non-finite loss at train step {0}")]
    NonFiniteLoss(u64),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// Double-Q targets: the online network selects the next action, the target
/// network evaluates it. Terminal transitions bootstrap to the reward.
/// In train mode both networks should carry freshly resampled noise.
pub fn td_targets(
    transitions: &[&Transition],
    online: &QNetwork,
    target: &QNetwork,
    discount: f64,
    mode: Mode,
) -> Vec<f64> {
    let obs_dim = online.obs_dim;
    let batch = transitions.len();
    let next = Tensor::from_fn(obs_dim, batch, |row, b| transitions[b].next_state[row]);
    let q_online = online.forward(&next, mode).q;
    let q_target = target.forward(&next, mode).q;
    transitions
        .iter()
        .enumerate()
        .map(|(b, t)| {
            if t.done {
                t.reward
            } else {
                let mut qs = [0.0; Action::COUNT];
                for (a, q) in qs.iter_mut().enumerate() {
                    *q = q_online[(a, b)];
                }
                let chosen = argmax_action(&qs).index();
                t.reward + discount * q_target[(chosen, b)]
            }
        })
        .collect()
}

fn huber(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        0.5 * x * x
    } else {
        x.abs() - 0.5
    }
}

fn huber_grad(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Q-learning agent: online and target noisy dueling networks plus a
/// prioritized replay buffer. Exploration comes from the noisy layers alone.
pub struct Agent {
    pub cfg: AgentConfig,
    pub online: QNetwork,
    pub target: QNetwork,
    pub buffer: ReplayBuffer,
    pub adam: Adam,
    pub train_steps: u64,
    rng: ChaCha8Rng,
}

impl Agent {
    pub fn new(obs_dim: usize, cfg: AgentConfig, seed: u64) -> Self {
        let mut init_rng = derive_rng(seed, stream::AGENT_TRAIN, u64::MAX);
        let online = QNetwork::new(obs_dim, cfg.hidden_dim, &mut init_rng);
        let mut target = QNetwork::new(obs_dim, cfg.hidden_dim, &mut init_rng);
        target.copy_from(&online);
        Agent {
            buffer: ReplayBuffer::new(cfg.replay_capacity, cfg.priority_alpha),
            adam: Adam::new(cfg.lr),
            online,
            target,
            cfg,
            train_steps: 0,
            rng: derive_rng(seed, stream::AGENT_TRAIN, 0),
        }
    }

    pub fn obs_dim(&self) -> usize {
        self.online.obs_dim
    }

    /// Greedy action: train mode resamples layer noise (the exploration
    /// mechanism), eval mode is the deterministic policy.
    pub fn select_action(&mut self, obs: &[f64], mode: Mode) -> Action {
        if mode == Mode::Train {
            self.online.resample_noise(&mut self.rng);
        }
        argmax_action(&self.online.q_values(obs, mode))
    }

    pub fn observe(&mut self, transition: Transition) {
        self.buffer.push(transition);
    }

    fn beta(&self) -> f64 {
        let progress = (self.train_steps as f64 / self.cfg.beta_anneal_steps as f64).min(1.0);
        self.cfg.beta_start + (self.cfg.beta_end - self.cfg.beta_start) * progress
    }

    /// One prioritized double-Q update. Returns `None` while the buffer is
    /// still warming up.
    pub fn train_step(&mut self) -> Result<Option<f64>, AgentError> {
        if self.buffer.len() < self.cfg.warmup_steps.max(self.cfg.batch_size) {
            return Ok(None);
        }
        let batch_size = self.cfg.batch_size;
        let (indices, weights) = self.buffer.sample(batch_size, self.beta(), &mut self.rng)?;
        let transitions: Vec<&Transition> = indices.iter().map(|&i| self.buffer.get(i)).collect();

        self.online.resample_noise(&mut self.rng);
        self.target.resample_noise(&mut self.rng);
        let targets = td_targets(&transitions, &self.online, &self.target, self.cfg.discount, Mode::Train);

        let obs_dim = self.online.obs_dim;
        let states = Tensor::from_fn(obs_dim, batch_size, |row, b| transitions[b].state[row]);
        let actions: Vec<usize> = transitions.iter().map(|t| t.action).collect();

        self.online.resample_noise(&mut self.rng);
        let fwd = self.online.forward(&states, Mode::Train);

        let mut loss = 0.0;
        let mut grad_q = Tensor::zeros(Action::COUNT, batch_size);
        let mut td_errors = Vec::with_capacity(batch_size);
        for b in 0..batch_size {
            let delta = fwd.q[(actions[b], b)] - targets[b];
            td_errors.push(delta);
            loss += weights[b] * huber(delta) / batch_size as f64;
            grad_q[(actions[b], b)] = weights[b] * huber_grad(delta) / batch_size as f64;
        }
        if !loss.is_finite() {
            return Err(AgentError::NonFiniteLoss(self.train_steps));
        }
        self.online.zero_grad();
        self.online.backward(&fwd, &grad_q);
        let mut params = self.online.params();
        clip_global_norm(&mut params, GRAD_CLIP_NORM);
        self.adam.step(params);

        self.buffer.update_priorities(&indices, &td_errors);
        self.train_steps += 1;
        if self.train_steps % self.cfg.target_sync_period == 0 {
            self.target.copy_from(&self.online);
        }
        Ok(Some(loss))
    }

    pub fn sync_target(&mut self) {
        self.target.copy_from(&self.online);
    }

    /// Fresh agent carrying over only the network weights of `source`:
    /// replay buffer, optimizer state and step counters start from scratch.
    pub fn transfer_from(source: &Agent, cfg: AgentConfig, seed: u64) -> Agent {
        let mut agent = Agent::new(source.obs_dim(), cfg, seed);
        agent.online.copy_from(&source.online);
        agent.target.copy_from(&source.online);
        agent
    }
}
