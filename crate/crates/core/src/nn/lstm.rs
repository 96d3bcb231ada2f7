//! LSTM cell with gate caching for backpropagation through time.
//!
//! Gate parameters are packed row-wise in the order `[input, forget,
//! candidate, output]`, so one matrix product per step covers all four gates.
//! A batch column is one independent sequence (or one vehicle of a scene).

use rand::Rng;

use super::linear::sigmoid;
use super::tensor::Tensor;

pub struct LstmCell {
    input_size: usize,
    hidden_size: usize,
    /// `(4H, input)` input-to-gates weights.
    pub w_x: Tensor,
    /// `(4H, H)` hidden-to-gates weights.
    pub w_h: Tensor,
    /// `(4H, 1)` gate biases.
    pub bias: Tensor,
    pub grad_w_x: Tensor,
    pub grad_w_h: Tensor,
    pub grad_bias: Tensor,
}

/// Hidden and cell state, `(H, batch)` each.
#[derive(Clone)]
pub struct LstmState {
    pub h: Tensor,
    pub c: Tensor,
}

impl LstmState {
    pub fn zeros(hidden_size: usize, batch: usize) -> Self {
        LstmState { h: Tensor::zeros(hidden_size, batch), c: Tensor::zeros(hidden_size, batch) }
    }
}

/// Everything the backward step needs from the matching forward step.
pub struct LstmCache {
    x: Tensor,
    h_prev: Tensor,
    c_prev: Tensor,
    gate_i: Tensor,
    gate_f: Tensor,
    gate_g: Tensor,
    gate_o: Tensor,
    tanh_c: Tensor,
}

impl LstmCell {
    pub fn new(input_size: usize, hidden_size: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (hidden_size as f64).sqrt();
        let mut bias = Tensor::zeros(4 * hidden_size, 1);
        // Forget-gate bias starts at 1 so early training does not wipe the cell state.
        for i in hidden_size..2 * hidden_size {
            bias[(i, 0)] = 1.0;
        }
        LstmCell {
            input_size,
            hidden_size,
            w_x: Tensor::from_fn(4 * hidden_size, input_size, |_, _| rng.random_range(-bound..bound)),
            w_h: Tensor::from_fn(4 * hidden_size, hidden_size, |_, _| rng.random_range(-bound..bound)),
            bias,
            grad_w_x: Tensor::zeros(4 * hidden_size, input_size),
            grad_w_h: Tensor::zeros(4 * hidden_size, hidden_size),
            grad_bias: Tensor::zeros(4 * hidden_size, 1),
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn forward_step(&self, x: &Tensor, state: &LstmState) -> (LstmState, LstmCache) {
        assert_eq!(x.rows(), self.input_size);
        let h = self.hidden_size;
        let mut pre = self.w_x.matmul(x);
        pre.add_assign(&self.w_h.matmul(&state.h));
        pre.add_col_broadcast(&self.bias);

        let gate_i = pre.slice_rows(0, h).map(sigmoid);
        let gate_f = pre.slice_rows(h, 2 * h).map(sigmoid);
        let gate_g = pre.slice_rows(2 * h, 3 * h).map(f64::tanh);
        let gate_o = pre.slice_rows(3 * h, 4 * h).map(sigmoid);

        let c = gate_f.hadamard(&state.c).add(&gate_i.hadamard(&gate_g));
        let tanh_c = c.map(f64::tanh);
        let h_new = gate_o.hadamard(&tanh_c);

        let cache = LstmCache {
            x: x.clone(),
            h_prev: state.h.clone(),
            c_prev: state.c.clone(),
            gate_i,
            gate_f,
            gate_g,
            gate_o,
            tanh_c,
        };
        (LstmState { h: h_new, c }, cache)
    }

    /// One step of backpropagation through time. `grad_h`/`grad_c` are the
    /// gradients flowing into this step's output state; returns gradients for
    /// the input and the previous state. Parameter gradients accumulate.
    pub fn backward_step(
        &mut self,
        cache: &LstmCache,
        grad_h: &Tensor,
        grad_c: &Tensor,
    ) -> (Tensor, Tensor, Tensor) {
        let grad_o = grad_h.hadamard(&cache.tanh_c);
        // dL/dc includes the path through h = o * tanh(c).
        let mut grad_cell = grad_c.clone();
        for ((gc, &gh), (&o, &tc)) in grad_cell
            .data_mut()
            .iter_mut()
            .zip(grad_h.data())
            .zip(cache.gate_o.data().iter().zip(cache.tanh_c.data()))
        {
            *gc += gh * o * (1.0 - tc * tc);
        }

        let grad_f = grad_cell.hadamard(&cache.c_prev);
        let grad_i = grad_cell.hadamard(&cache.gate_g);
        let grad_g = grad_cell.hadamard(&cache.gate_i);
        let grad_c_prev = grad_cell.hadamard(&cache.gate_f);

        let pre_i = sigmoid_backward(&cache.gate_i, &grad_i);
        let pre_f = sigmoid_backward(&cache.gate_f, &grad_f);
        let pre_g = tanh_backward(&cache.gate_g, &grad_g);
        let pre_o = sigmoid_backward(&cache.gate_o, &grad_o);

        let grad_pre = Tensor::vstack(&Tensor::vstack(&pre_i, &pre_f), &Tensor::vstack(&pre_g, &pre_o));

        self.grad_w_x.add_assign(&grad_pre.matmul_nt(&cache.x));
        self.grad_w_h.add_assign(&grad_pre.matmul_nt(&cache.h_prev));
        self.grad_bias.add_assign(&grad_pre.row_sums());

        let grad_x = self.w_x.matmul_tn(&grad_pre);
        let grad_h_prev = self.w_h.matmul_tn(&grad_pre);
        (grad_x, grad_h_prev, grad_c_prev)
    }

    pub fn zero_grad(&mut self) {
        self.grad_w_x.fill(0.0);
        self.grad_w_h.fill(0.0);
        self.grad_bias.fill(0.0);
    }

    pub fn params(&mut self) -> Vec<(&mut Tensor, &mut Tensor)> {
        vec![
            (&mut self.w_x, &mut self.grad_w_x),
            (&mut self.w_h, &mut self.grad_w_h),
            (&mut self.bias, &mut self.grad_bias),
        ]
    }
}

fn sigmoid_backward(activated: &Tensor, grad: &Tensor) -> Tensor {
    let mut out = grad.clone();
    for (g, &a) in out.data_mut().iter_mut().zip(activated.data()) {
        *g *= a * (1.0 - a);
    }
    out
}

fn tanh_backward(activated: &Tensor, grad: &Tensor) -> Tensor {
    let mut out = grad.clone();
    for (g, &a) in out.data_mut().iter_mut().zip(activated.data()) {
        *g *= 1.0 - a * a;
    }
    out
}

/// Stateful convenience wrapper: owns the cell parameters together with a
/// running `(h, c)` state, advancing it one input at a time.
pub struct RecurrentCell {
    pub cell: LstmCell,
    pub state: LstmState,
}

impl RecurrentCell {
    pub fn new(input_size: usize, hidden_size: usize, batch: usize, rng: &mut impl Rng) -> Self {
        RecurrentCell {
            cell: LstmCell::new(input_size, hidden_size, rng),
            state: LstmState::zeros(hidden_size, batch),
        }
    }

    /// Advances the internal state and returns the new hidden state.
    pub fn step(&mut self, x: &Tensor) -> Tensor {
        let (state, _) = self.cell.forward_step(x, &self.state);
        self.state = state;
        self.state.h.clone()
    }

    pub fn reset(&mut self, batch: usize) {
        self.state = LstmState::zeros(self.cell.hidden_size, batch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_give_zero_hidden_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cell = RecurrentCell::new(3, 5, 2, &mut rng);
        cell.cell.w_x.fill(0.0);
        cell.cell.w_h.fill(0.0);
        cell.cell.bias.fill(0.0);
        let x = Tensor::from_fn(3, 2, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
        let h = cell.step(&x);
        assert_eq!(h, Tensor::zeros(5, 2));
    }

    #[test]
    fn gates_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cell = LstmCell::new(4, 6, &mut rng);
        let mut state = LstmState::zeros(6, 3);
        for step in 0..20 {
            let x = Tensor::from_fn(4, 3, |i, j| ((step + i + j) as f64 * 1.3).sin() * 2.0);
            let (next, cache) = cell.forward_step(&x, &state);
            for &v in cache.gate_i.data().iter().chain(cache.gate_f.data()).chain(cache.gate_o.data()) {
                assert!(v > 0.0 && v < 1.0);
            }
            for &v in cache.gate_g.data() {
                assert!(v > -1.0 && v < 1.0);
            }
            state = next;
        }
    }

    #[test]
    fn batch_columns_are_independent_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cell = LstmCell::new(2, 4, &mut rng);
        let xs: Vec<Tensor> = (0..6)
            .map(|t| Tensor::from_fn(2, 2, |i, j| ((t * 2 + i) as f64 + j as f64 * 7.0).cos()))
            .collect();

        let mut batched = LstmState::zeros(4, 2);
        for x in &xs {
            batched = cell.forward_step(x, &batched).0;
        }
        // Re-run column 1 alone.
        let mut single = LstmState::zeros(4, 1);
        for x in &xs {
            single = cell.forward_step(&x.col(1), &single).0;
        }
        for i in 0..4 {
            assert!((batched.h[(i, 1)] - single.h[(i, 0)]).abs() < 1e-12);
        }
    }
}
