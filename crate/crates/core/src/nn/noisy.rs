//! Noisy linear layer with factorized Gaussian noise.
//!
//! The effective weight in train mode is `mu + sigma ⊙ (f(eps_out) f(eps_in)ᵀ)`
//! with `f(u) = sign(u)·sqrt(|u|)`; eval mode uses `mu` alone, so evaluation is
//! a pure function of the input.

use rand::Rng;
use rand_distr::StandardNormal;

use super::tensor::Tensor;
use super::Mode;

pub struct NoisyLinearLayer {
    pub weight_mu: Tensor,
    pub weight_sigma: Tensor,
    pub bias_mu: Tensor,
    pub bias_sigma: Tensor,
    pub grad_weight_mu: Tensor,
    pub grad_weight_sigma: Tensor,
    pub grad_bias_mu: Tensor,
    pub grad_bias_sigma: Tensor,
    /// Factorized noise from the latest `resample_noise`.
    eps_out: Vec<f64>,
    eps_in: Vec<f64>,
}

impl NoisyLinearLayer {
    /// Standard noisy-net init: mu uniform in `±1/sqrt(in)`, sigma at `0.5/sqrt(in)`.
    pub fn new(out_dim: usize, in_dim: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let sigma0 = 0.5 / (in_dim as f64).sqrt();
        NoisyLinearLayer {
            weight_mu: Tensor::from_fn(out_dim, in_dim, |_, _| rng.random_range(-bound..bound)),
            weight_sigma: Tensor::from_fn(out_dim, in_dim, |_, _| sigma0),
            bias_mu: Tensor::from_fn(out_dim, 1, |_, _| rng.random_range(-bound..bound)),
            bias_sigma: Tensor::from_fn(out_dim, 1, |_, _| sigma0),
            grad_weight_mu: Tensor::zeros(out_dim, in_dim),
            grad_weight_sigma: Tensor::zeros(out_dim, in_dim),
            grad_bias_mu: Tensor::zeros(out_dim, 1),
            grad_bias_sigma: Tensor::zeros(out_dim, 1),
            eps_out: vec![0.0; out_dim],
            eps_in: vec![0.0; in_dim],
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weight_mu.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.weight_mu.cols()
    }

    pub fn resample_noise(&mut self, rng: &mut impl Rng) {
        fn squash(u: f64) -> f64 {
            u.signum() * u.abs().sqrt()
        }
        for e in self.eps_out.iter_mut() {
            *e = squash(rng.sample(StandardNormal));
        }
        for e in self.eps_in.iter_mut() {
            *e = squash(rng.sample(StandardNormal));
        }
    }

    fn eps_weight(&self, i: usize, j: usize) -> f64 {
        self.eps_out[i] * self.eps_in[j]
    }

    /// Effective weight matrix for the given mode with the current noise.
    pub fn effective_weight(&self, mode: Mode) -> Tensor {
        match mode {
            Mode::Eval => self.weight_mu.clone(),
            Mode::Train => Tensor::from_fn(self.out_dim(), self.in_dim(), |i, j| {
                self.weight_mu[(i, j)] + self.weight_sigma[(i, j)] * self.eps_weight(i, j)
            }),
        }
    }

    fn effective_bias(&self, mode: Mode) -> Tensor {
        match mode {
            Mode::Eval => self.bias_mu.clone(),
            Mode::Train => Tensor::from_fn(self.out_dim(), 1, |i, _| {
                self.bias_mu[(i, 0)] + self.bias_sigma[(i, 0)] * self.eps_out[i]
            }),
        }
    }

    /// Noise is NOT resampled here; callers resample once per forward in train
    /// mode so the matching backward sees the same noise.
    pub fn forward(&self, x: &Tensor, mode: Mode) -> Tensor {
        let mut y = self.effective_weight(mode).matmul(x);
        y.add_col_broadcast(&self.effective_bias(mode));
        y
    }

    /// Backward for the same `mode` (and noise) used in the forward pass.
    pub fn backward(&mut self, x: &Tensor, grad_out: &Tensor, mode: Mode) -> Tensor {
        let grad_w = grad_out.matmul_nt(x);
        let grad_b = grad_out.row_sums();
        match mode {
            Mode::Eval => {
                self.grad_weight_mu.add_assign(&grad_w);
                self.grad_bias_mu.add_assign(&grad_b);
            }
            Mode::Train => {
                for i in 0..self.out_dim() {
                    for j in 0..self.in_dim() {
                        let g = grad_w[(i, j)];
                        self.grad_weight_mu[(i, j)] += g;
                        self.grad_weight_sigma[(i, j)] += g * self.eps_weight(i, j);
                    }
                    self.grad_bias_mu[(i, 0)] += grad_b[(i, 0)];
                    self.grad_bias_sigma[(i, 0)] += grad_b[(i, 0)] * self.eps_out[i];
                }
            }
        }
        self.effective_weight(mode).matmul_tn(grad_out)
    }

    pub fn zero_grad(&mut self) {
        self.grad_weight_mu.fill(0.0);
        self.grad_weight_sigma.fill(0.0);
        self.grad_bias_mu.fill(0.0);
        self.grad_bias_sigma.fill(0.0);
    }

    pub fn params(&mut self) -> Vec<(&mut Tensor, &mut Tensor)> {
        vec![
            (&mut self.weight_mu, &mut self.grad_weight_mu),
            (&mut self.weight_sigma, &mut self.grad_weight_sigma),
            (&mut self.bias_mu, &mut self.grad_bias_mu),
            (&mut self.bias_sigma, &mut self.grad_bias_sigma),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_sigma_matches_plain_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut layer = NoisyLinearLayer::new(4, 3, &mut rng);
        layer.weight_sigma.fill(0.0);
        layer.bias_sigma.fill(0.0);
        layer.resample_noise(&mut rng);
        let x = Tensor::from_fn(3, 5, |i, j| (i as f64 - j as f64) * 0.3);
        let train = layer.forward(&x, Mode::Train);
        let eval = layer.forward(&x, Mode::Eval);
        for (a, b) in train.data().iter().zip(eval.data()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn eval_mode_ignores_noise_resampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut layer = NoisyLinearLayer::new(4, 3, &mut rng);
        let x = Tensor::from_fn(3, 2, |i, j| (i + j) as f64 * 0.1);
        let y1 = layer.forward(&x, Mode::Eval);
        layer.resample_noise(&mut rng);
        let y2 = layer.forward(&x, Mode::Eval);
        assert_eq!(y1, y2);
    }

    #[test]
    fn train_mode_noise_changes_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut layer = NoisyLinearLayer::new(4, 3, &mut rng);
        let x = Tensor::from_fn(3, 2, |i, j| (i + j) as f64 * 0.1);
        layer.resample_noise(&mut rng);
        let y1 = layer.forward(&x, Mode::Train);
        layer.resample_noise(&mut rng);
        let y2 = layer.forward(&x, Mode::Train);
        assert_ne!(y1, y2);
    }
}
