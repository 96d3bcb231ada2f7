//! Trajectory discriminator: displacement embedding, recurrent encoder over
//! the full observed-plus-future sequence, sigmoid classifier per vehicle.

use rand::Rng;

use crate::nn::{relu, relu_backward, sigmoid, LinearLayer, LstmCache, LstmCell, LstmState, Tensor};

use super::GanConfig;

pub struct DiscriminatorModel {
    pub cfg: GanConfig,
    pub embed: LinearLayer,
    pub encoder: LstmCell,
    pub head: LinearLayer,
}

/// Forward caches plus per-vehicle probabilities.
pub struct DiscForward {
    disp: Vec<Tensor>,
    embed_pre: Vec<Tensor>,
    caches: Vec<LstmCache>,
    final_hidden: Tensor,
    /// Classifier logits `(1, N)`.
    pub logits: Tensor,
    /// Probability each vehicle trajectory is real, `(1, N)`.
    pub probs: Tensor,
}

impl DiscriminatorModel {
    pub fn new(cfg: GanConfig, rng: &mut impl Rng) -> Self {
        let embed = LinearLayer::new(cfg.embed_dim, 2, rng);
        let encoder = LstmCell::new(cfg.embed_dim, cfg.hidden_dim, rng);
        let head = LinearLayer::new(1, cfg.hidden_dim, rng);
        DiscriminatorModel { cfg, embed, encoder, head }
    }

    /// Scores a full trajectory (observed followed by future) per vehicle.
    /// Input: per-step displacement tensors `(2, N)`; the caller builds them
    /// so generated displacements stay connected to the generator graph.
    pub fn forward(&self, disp: &[Tensor]) -> DiscForward {
        let n = disp[0].cols();
        let mut state = LstmState::zeros(self.cfg.hidden_dim, n);
        let mut embed_pre = Vec::with_capacity(disp.len());
        let mut caches = Vec::with_capacity(disp.len());
        for d in disp {
            let pre = self.embed.forward(d);
            let (next, cache) = self.encoder.forward_step(&relu(&pre), &state);
            embed_pre.push(pre);
            caches.push(cache);
            state = next;
        }
        let logits = self.head.forward(&state.h);
        let probs = logits.map(sigmoid);
        DiscForward { disp: disp.to_vec(), embed_pre, caches, final_hidden: state.h, logits, probs }
    }

    /// Backward from a gradient on the logits; accumulates parameter
    /// gradients and returns the gradient on every input displacement step
    /// (used by the generator update).
    pub fn backward(&mut self, fwd: &DiscForward, grad_logits: &Tensor) -> Vec<Tensor> {
        let n = fwd.logits.cols();
        let steps = fwd.caches.len();
        let mut grad_h = self.head.backward(&fwd.final_hidden, grad_logits);
        let mut grad_c = Tensor::zeros(self.cfg.hidden_dim, n);
        let mut input_grads = vec![Tensor::zeros(2, n); steps];
        for t in (0..steps).rev() {
            let (grad_x, grad_h_prev, grad_c_prev) =
                self.encoder.backward_step(&fwd.caches[t], &grad_h, &grad_c);
            let grad_embedded = relu_backward(&fwd.embed_pre[t], &grad_x);
            input_grads[t] = self.embed.backward(&fwd.disp[t], &grad_embedded);
            grad_h = grad_h_prev;
            grad_c = grad_c_prev;
        }
        input_grads
    }

    pub fn zero_grad(&mut self) {
        self.embed.zero_grad();
        self.encoder.zero_grad();
        self.head.zero_grad();
    }

    pub fn params(&mut self) -> Vec<(&mut Tensor, &mut Tensor)> {
        let mut params = self.embed.params();
        params.extend(self.encoder.params());
        params.extend(self.head.params());
        params
    }

    /// Full-trajectory displacement steps for a window: zero at the first
    /// frame, then consecutive differences across observed and future.
    pub fn window_displacements(observed: &[Vec<(f64, f64)>], future: &[Vec<(f64, f64)>]) -> Vec<Tensor> {
        let n = observed.len();
        let total: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|j| observed[j].iter().chain(future[j].iter()).copied().collect())
            .collect();
        let steps = total[0].len();
        (0..steps)
            .map(|t| {
                Tensor::from_fn(2, n, |row, j| {
                    if t == 0 {
                        0.0
                    } else {
                        let (x1, y1) = total[j][t];
                        let (x0, y0) = total[j][t - 1];
                        if row == 0 { x1 - x0 } else { y1 - y0 }
                    }
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities_are_in_the_open_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let cfg = GanConfig { embed_dim: 8, hidden_dim: 8, pool_dim: 8, ..Default::default() };
        let disc = DiscriminatorModel::new(cfg, &mut rng);
        for k in 0..20 {
            let disp: Vec<Tensor> =
                (0..16).map(|t| Tensor::from_fn(2, 3, |i, j| ((t + i + j + k) as f64 * 1.7).sin() * 3.0)).collect();
            let fwd = disc.forward(&disp);
            for &p in fwd.probs.data() {
                assert!(p > 0.0 && p < 1.0, "p = {p}");
                assert!((0.1..0.9).contains(&p) || p.is_finite());
            }
        }
    }

    #[test]
    fn window_displacements_connect_observed_and_future() {
        let observed = vec![vec![(0.0, 0.0), (1.0, 0.5)]];
        let future = vec![vec![(3.0, 1.0), (6.0, 1.5)]];
        let disp = DiscriminatorModel::window_displacements(&observed, &future);
        assert_eq!(disp.len(), 4);
        assert_eq!(disp[0].data(), &[0.0, 0.0]);
        assert_eq!(disp[1].data(), &[1.0, 0.5]);
        assert_eq!(disp[2].data(), &[2.0, 0.5]); // junction step
        assert_eq!(disp[3].data(), &[3.0, 0.5]);
    }
}
