//! Rainbow-style Q-learning: noisy dueling networks, double-Q targets,
//! prioritized replay with importance weighting, and transfer learning
//! between traffic regimes.

mod persist;
mod qnet;
mod replay;
mod trainer;

pub use persist::{
    config_hash, load_agent, read_agent_meta, save_agent, transfer_init, CheckpointError,
    CheckpointMeta,
};
pub use qnet::{argmax_action, QForward, QNetwork};
pub use replay::{ReplayBuffer, ReplayError, Transition};
pub use trainer::{td_targets, Agent, AgentConfig, AgentError};
