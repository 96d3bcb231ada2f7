//! Fully connected layer with hand-written backward pass.

use rand::Rng;

use super::tensor::Tensor;

/// `y = W x + b` over a `(in, batch)` input.
pub struct LinearLayer {
    pub weight: Tensor,
    pub bias: Tensor,
    pub grad_weight: Tensor,
    pub grad_bias: Tensor,
}

impl LinearLayer {
    /// Uniform init in `±1/sqrt(in_dim)` for weights and bias. A nonzero
    /// bias keeps ReLU pre-activations off the exact kink for zero inputs.
    pub fn new(out_dim: usize, in_dim: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weight = Tensor::from_fn(out_dim, in_dim, |_, _| rng.random_range(-bound..bound));
        let bias = Tensor::from_fn(out_dim, 1, |_, _| rng.random_range(-bound..bound));
        LinearLayer {
            grad_weight: Tensor::zeros(out_dim, in_dim),
            grad_bias: Tensor::zeros(out_dim, 1),
            weight,
            bias,
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn forward(&self, x: &Tensor) -> Tensor {
        let mut y = self.weight.matmul(x);
        y.add_col_broadcast(&self.bias);
        y
    }

    /// Accumulates parameter gradients and returns the gradient w.r.t. the input.
    /// `x` must be the input that produced the upstream gradient.
    pub fn backward(&mut self, x: &Tensor, grad_out: &Tensor) -> Tensor {
        self.grad_weight.add_assign(&grad_out.matmul_nt(x));
        self.grad_bias.add_assign(&grad_out.row_sums());
        self.weight.matmul_tn(grad_out)
    }

    pub fn zero_grad(&mut self) {
        self.grad_weight.fill(0.0);
        self.grad_bias.fill(0.0);
    }

    pub fn params(&mut self) -> Vec<(&mut Tensor, &mut Tensor)> {
        vec![
            (&mut self.weight, &mut self.grad_weight),
            (&mut self.bias, &mut self.grad_bias),
        ]
    }
}

/// ReLU forward; the input is needed again for the backward mask.
pub fn relu(x: &Tensor) -> Tensor {
    x.map(|v| v.max(0.0))
}

/// Routes the upstream gradient through the ReLU mask of `pre` (the pre-activation).
pub fn relu_backward(pre: &Tensor, grad_out: &Tensor) -> Tensor {
    assert_eq!(pre.shape(), grad_out.shape());
    let mut g = grad_out.clone();
    for (g, &p) in g.data_mut().iter_mut().zip(pre.data()) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
    g
}

pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_weights_pass_input_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut layer = LinearLayer::new(3, 3, &mut rng);
        layer.weight = Tensor::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 });
        layer.bias.fill(0.0);
        let x = Tensor::from_vec(3, 2, vec![1.0, -1.0, 2.0, 0.5, 3.0, 0.0]);
        assert_eq!(layer.forward(&x), x);
    }

    #[test]
    fn zero_weights_output_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut layer = LinearLayer::new(2, 4, &mut rng);
        layer.weight.fill(0.0);
        layer.bias = Tensor::column(&[0.7, -0.3]);
        let x = Tensor::from_fn(4, 3, |i, j| (i + j) as f64);
        let y = layer.forward(&x);
        for j in 0..3 {
            assert_eq!(y[(0, j)], 0.7);
            assert_eq!(y[(1, j)], -0.3);
        }
    }

    #[test]
    fn relu_mask_blocks_negative_gradient() {
        let pre = Tensor::from_vec(2, 2, vec![1.0, -1.0, 0.0, 2.0]);
        let g = Tensor::from_vec(2, 2, vec![5.0, 5.0, 5.0, 5.0]);
        let back = relu_backward(&pre, &g);
        assert_eq!(back.data(), &[5.0, 0.0, 0.0, 5.0]);
    }
}
