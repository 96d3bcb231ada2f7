//! Adam optimizer with bias correction and global-norm gradient clipping.

use super::tensor::Tensor;

pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    first_moment: Vec<Tensor>,
    second_moment: Vec<Tensor>,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn reset(&mut self) {
        self.step = 0;
        self.first_moment.clear();
        self.second_moment.clear();
    }

    /// Applies one update to `(param, grad)` pairs and zeroes the gradients.
    /// The pairs must be passed in the same order on every call.
    pub fn step(&mut self, mut params: Vec<(&mut Tensor, &mut Tensor)>) {
        if self.first_moment.is_empty() {
            for (p, _) in &params {
                self.first_moment.push(Tensor::zeros(p.rows(), p.cols()));
                self.second_moment.push(Tensor::zeros(p.rows(), p.cols()));
            }
        }
        assert_eq!(params.len(), self.first_moment.len(), "parameter list changed between steps");
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for (idx, (param, grad)) in params.iter_mut().enumerate() {
            assert_eq!(param.shape(), self.first_moment[idx].shape(), "parameter shape changed");
            let m = &mut self.first_moment[idx];
            let v = &mut self.second_moment[idx];
            for (((p, g), m), v) in param
                .data_mut()
                .iter_mut()
                .zip(grad.data_mut().iter_mut())
                .zip(m.data_mut())
                .zip(v.data_mut())
            {
                *m = self.beta1 * *m + (1.0 - self.beta1) * *g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * *g * *g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
                *g = 0.0;
            }
        }
    }

    /// Roundtrip access to the optimizer state so training can resume exactly.
    pub fn export_state(&self) -> (u64, Vec<Tensor>, Vec<Tensor>) {
        (self.step, self.first_moment.clone(), self.second_moment.clone())
    }

    pub fn import_state(&mut self, step: u64, first: Vec<Tensor>, second: Vec<Tensor>) {
        self.step = step;
        self.first_moment = first;
        self.second_moment = second;
    }
}

/// L2 norm over a set of gradient tensors.
pub fn global_grad_norm(grads: &[&Tensor]) -> f64 {
    grads.iter().map(|g| g.sum_squares()).sum::<f64>().sqrt()
}

/// Scales all gradients down so their joint norm is at most `max_norm`.
pub fn clip_global_norm(params: &mut Vec<(&mut Tensor, &mut Tensor)>, max_norm: f64) {
    let norm: f64 = params.iter().map(|(_, g)| g.sum_squares()).sum::<f64>().sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        for (_, g) in params.iter_mut() {
            g.scale_assign(scale);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut adam = Adam::new(0.01);
        let mut p = Tensor::from_vec(2, 1, vec![1.5, -0.5]);
        let mut g = Tensor::zeros(2, 1);
        let before = p.clone();
        adam.step(vec![(&mut p, &mut g)]);
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        // With constant gradient g, bias-corrected m_hat = g and v_hat = g^2,
        // so the first update is -lr * g/|g| up to eps.
        let mut adam = Adam::new(0.001);
        let mut p = Tensor::from_vec(3, 1, vec![0.0, 1.0, -2.0]);
        let mut g = Tensor::from_vec(3, 1, vec![4.0, -0.25, 100.0]);
        let expected: Vec<f64> = p
            .data()
            .iter()
            .zip(g.data())
            .map(|(p, g)| p - 0.001 * g.signum())
            .collect();
        adam.step(vec![(&mut p, &mut g)]);
        for (have, want) in p.data().iter().zip(&expected) {
            assert!((have - want).abs() < 1e-6, "{have} vs {want}");
        }
    }

    #[test]
    fn identical_runs_stay_identical() {
        let run = || {
            let mut adam = Adam::new(0.01);
            let mut p = Tensor::from_vec(2, 2, vec![0.1, 0.2, 0.3, 0.4]);
            for k in 0..50 {
                let mut g = Tensor::from_fn(2, 2, |i, j| ((k + i + j) as f64).sin());
                adam.step(vec![(&mut p, &mut g)]);
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn clipping_caps_global_norm() {
        let mut p1 = Tensor::zeros(2, 1);
        let mut g1 = Tensor::from_vec(2, 1, vec![30.0, 40.0]);
        let mut params = vec![(&mut p1, &mut g1)];
        clip_global_norm(&mut params, 10.0);
        let norm = params[0].1.sum_squares().sqrt();
        assert!((norm - 10.0).abs() < 1e-12);
    }
}
