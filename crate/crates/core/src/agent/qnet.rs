//! Noisy dueling Q-network: two noisy hidden layers with ReLU, then plain
//! value and advantage heads combined as `Q = V + A - mean(A)`.

use rand::Rng;

use crate::env::Action;
use crate::nn::{relu, relu_backward, LinearLayer, Mode, NoisyLinearLayer, Tensor};

pub struct QNetwork {
    pub obs_dim: usize,
    pub hidden_dim: usize,
    pub input: NoisyLinearLayer,
    pub hidden: NoisyLinearLayer,
    pub value_head: LinearLayer,
    pub advantage_head: LinearLayer,
}

/// Forward caches for one batch pass.
pub struct QForward {
    x: Tensor,
    pre1: Tensor,
    act1: Tensor,
    pre2: Tensor,
    act2: Tensor,
    mode: Mode,
    /// `(actions, batch)` Q-values.
    pub q: Tensor,
}

impl QNetwork {
    pub fn new(obs_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> Self {
        QNetwork {
            obs_dim,
            hidden_dim,
            input: NoisyLinearLayer::new(hidden_dim, obs_dim, rng),
            hidden: NoisyLinearLayer::new(hidden_dim, hidden_dim, rng),
            value_head: LinearLayer::new(1, hidden_dim, rng),
            advantage_head: LinearLayer::new(Action::COUNT, hidden_dim, rng),
        }
    }

    /// Draws fresh factorized noise for both noisy layers.
    pub fn resample_noise(&mut self, rng: &mut impl Rng) {
        self.input.resample_noise(rng);
        self.hidden.resample_noise(rng);
    }

    /// Batch forward; `x` is `(obs_dim, batch)`. Train mode uses the current
    /// noise (resample beforehand), eval mode is deterministic.
    pub fn forward(&self, x: &Tensor, mode: Mode) -> QForward {
        assert_eq!(x.rows(), self.obs_dim, "observation length mismatch");
        let pre1 = self.input.forward(x, mode);
        let act1 = relu(&pre1);
        let pre2 = self.hidden.forward(&act1, mode);
        let act2 = relu(&pre2);
        let value = self.value_head.forward(&act2);
        let advantage = self.advantage_head.forward(&act2);

        let batch = x.cols();
        let mut q = Tensor::zeros(Action::COUNT, batch);
        for b in 0..batch {
            let mut mean = 0.0;
            for a in 0..Action::COUNT {
                mean += advantage[(a, b)];
            }
            mean /= Action::COUNT as f64;
            for a in 0..Action::COUNT {
                q[(a, b)] = value[(0, b)] + advantage[(a, b)] - mean;
            }
        }
        QForward { x: x.clone(), pre1, act1, pre2, act2, mode, q }
    }

    /// Convenience single-observation Q-values.
    pub fn q_values(&self, obs: &[f64], mode: Mode) -> [f64; Action::COUNT] {
        let fwd = self.forward(&Tensor::column(obs), mode);
        let mut out = [0.0; Action::COUNT];
        for (a, o) in out.iter_mut().enumerate() {
            *o = fwd.q[(a, 0)];
        }
        out
    }

    /// Backward from a gradient on the Q outputs; accumulates parameter
    /// gradients. Must be called with the mode (and noise) of the forward.
    pub fn backward(&mut self, fwd: &QForward, grad_q: &Tensor) {
        let batch = grad_q.cols();
        // Q = V + A - mean(A): value gets the column sum, advantages get the
        // mean-centered gradient.
        let mut grad_value = Tensor::zeros(1, batch);
        let mut grad_adv = Tensor::zeros(Action::COUNT, batch);
        for b in 0..batch {
            let mut sum = 0.0;
            for a in 0..Action::COUNT {
                sum += grad_q[(a, b)];
            }
            grad_value[(0, b)] = sum;
            let mean = sum / Action::COUNT as f64;
            for a in 0..Action::COUNT {
                grad_adv[(a, b)] = grad_q[(a, b)] - mean;
            }
        }
        let mut grad_act2 = self.value_head.backward(&fwd.act2, &grad_value);
        grad_act2.add_assign(&self.advantage_head.backward(&fwd.act2, &grad_adv));
        let grad_pre2 = relu_backward(&fwd.pre2, &grad_act2);
        let grad_act1 = self.hidden.backward(&fwd.act1, &grad_pre2, fwd.mode);
        let grad_pre1 = relu_backward(&fwd.pre1, &grad_act1);
        self.input.backward(&fwd.x, &grad_pre1, fwd.mode);
    }

    pub fn zero_grad(&mut self) {
        self.input.zero_grad();
        self.hidden.zero_grad();
        self.value_head.zero_grad();
        self.advantage_head.zero_grad();
    }

    pub fn params(&mut self) -> Vec<(&mut Tensor, &mut Tensor)> {
        let mut params = self.input.params();
        params.extend(self.hidden.params());
        params.extend(self.value_head.params());
        params.extend(self.advantage_head.params());
        params
    }

    /// Hard copy of all parameters from another network of the same shape.
    pub fn copy_from(&mut self, other: &QNetwork) {
        self.input.weight_mu = other.input.weight_mu.clone();
        self.input.weight_sigma = other.input.weight_sigma.clone();
        self.input.bias_mu = other.input.bias_mu.clone();
        self.input.bias_sigma = other.input.bias_sigma.clone();
        self.hidden.weight_mu = other.hidden.weight_mu.clone();
        self.hidden.weight_sigma = other.hidden.weight_sigma.clone();
        self.hidden.bias_mu = other.hidden.bias_mu.clone();
        self.hidden.bias_sigma = other.hidden.bias_sigma.clone();
        self.value_head.weight = other.value_head.weight.clone();
        self.value_head.bias = other.value_head.bias.clone();
        self.advantage_head.weight = other.advantage_head.weight.clone();
        self.advantage_head.bias = other.advantage_head.bias.clone();
    }
}

/// Greedy action with ties broken toward the lowest index.
pub fn argmax_action(q: &[f64; Action::COUNT]) -> Action {
    let mut best = 0;
    for a in 1..Action::COUNT {
        if q[a] > q[best] {
            best = a;
        }
    }
    Action::from_index(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_outputs_zero_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let mut net = QNetwork::new(5, 16, &mut rng);
        for (p, _) in net.params() {
            p.fill(0.0);
        }
        let q = net.q_values(&[0.1, -0.2, 0.3, 0.4, -0.5], Mode::Eval);
        assert_eq!(q, [0.0; 3]);
    }

    #[test]
    fn eval_mode_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut net = QNetwork::new(4, 32, &mut rng);
        let obs = [0.5, -0.5, 0.25, 1.0];
        let q1 = net.q_values(&obs, Mode::Eval);
        net.resample_noise(&mut rng);
        let q2 = net.q_values(&obs, Mode::Eval);
        assert_eq!(q1, q2);
    }

    #[test]
    fn advantage_shift_leaves_q_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut net = QNetwork::new(4, 32, &mut rng);
        let obs = [0.5, -0.5, 0.25, 1.0];
        let before = net.q_values(&obs, Mode::Eval);
        for v in net.advantage_head.bias.data_mut() {
            *v += 3.5;
        }
        let after = net.q_values(&obs, Mode::Eval);
        for (b, a) in before.iter().zip(&after) {
            assert!((b - a).abs() < 1e-12, "{b} vs {a}");
        }
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax_action(&[1.0, 0.0, 0.0]), Action::KeepLane);
        assert_eq!(argmax_action(&[0.0, 0.0, 0.0]), Action::KeepLane);
        assert_eq!(argmax_action(&[0.0, 2.0, 2.0]), Action::ChangeLeft);
        assert_eq!(argmax_action(&[-1.0, -0.5, 0.0]), Action::ChangeRight);
    }

    #[test]
    fn positive_scaling_preserves_argmax() {
        let q = [0.2, -0.4, 0.9];
        let scaled = [q[0] * 7.5, q[1] * 7.5, q[2] * 7.5];
        assert_eq!(argmax_action(&q), argmax_action(&scaled));
    }
}
