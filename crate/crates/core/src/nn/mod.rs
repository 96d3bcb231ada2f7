//! Minimal dense/recurrent neural toolkit shared by the trajectory generator
//! and the Q-learning agent: 64-bit tensors, hand-written backward passes,
//! Adam, finite-difference gradient checking, and a binary weight container.

pub mod adam;
pub mod gradcheck;
pub mod linear;
pub mod lstm;
pub mod noisy;
pub mod tensor;
pub mod weights;

pub use adam::{clip_global_norm, global_grad_norm, Adam};
pub use gradcheck::{grad_check, GradCheckReport, GradCheckable};
pub use linear::{relu, relu_backward, sigmoid, LinearLayer};
pub use lstm::{LstmCache, LstmCell, LstmState, RecurrentCell};
pub use noisy::NoisyLinearLayer;
pub use tensor::Tensor;
pub use weights::{ArrayMap, NamedArray, WeightsError};

/// Whether a forward pass should sample noise (training) or be deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Gradient norm cap used by every training loop in the crate.
pub const GRAD_CLIP_NORM: f64 = 10.0;

/// Helpers to move tensors in and out of the weight container.
pub fn tensor_to_array(name: &str, t: &Tensor) -> NamedArray {
    NamedArray::new(name, vec![t.rows() as u64, t.cols() as u64], t.data().to_vec())
}

pub fn tensor_from_array(map: &ArrayMap, name: &str, rows: usize, cols: usize) -> Result<Tensor, WeightsError> {
    let arr = map.get_shaped(name, &[rows as u64, cols as u64])?;
    Ok(Tensor::from_vec(rows, cols, arr.data.clone()))
}
