//! Highway traffic simulation with rule-based and generative background
//! drivers, plus a noisy dueling Q-learning agent for lane-change decisions.
//!
//! The crate is organized around the simulation pipeline:
//!
//! - [`scenario`]: road geometry, vehicle population and seeded world setup
//! - [`dynamics`]: kinematic bicycle integration and two-point steering
//! - [`idm`] / [`mobil`]: rule-based longitudinal and lane-change models
//! - [`stochastic`]: empirical lane-change frequency/duration overlay
//! - [`nn`]: tensors, layers, optimizers, gradient checking, weight files
//! - [`data`]: trajectory ingest, resampling, grouping and windowing
//! - [`gan`]: social-pooling trajectory generator and discriminator
//! - [`env`]: the lane-change MDP over either traffic regime
//! - [`agent`]: prioritized-replay noisy dueling Q-learning

pub mod nn;
pub mod seeding;

pub mod scenario;

pub mod dynamics;

pub mod idm;

pub mod mobil;

pub mod stochastic;

pub mod traffic;

pub mod data;

pub mod gan;

pub mod env;

pub mod agent;
