//! Trajectory generator: displacement embedding, per-vehicle recurrent
//! encoder, social max-pooling, and an autoregressive noise-conditioned
//! decoder emitting per-step displacements.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::nn::{relu, relu_backward, LinearLayer, LstmCache, LstmCell, LstmState, Tensor};

use super::GanConfig;

pub struct GeneratorModel {
    pub cfg: GanConfig,
    /// Displacement embedding for the encoder input.
    pub embed: LinearLayer,
    pub encoder: LstmCell,
    /// Pool MLP over `[scaled relative position; neighbor hidden]`.
    pub pool: LinearLayer,
    /// Learned context stand-in for single-vehicle scenes.
    pub pool_placeholder: Tensor,
    pub grad_pool_placeholder: Tensor,
    /// Displacement embedding for the decoder input.
    pub dec_embed: LinearLayer,
    pub decoder: LstmCell,
    /// Maps decoder hidden state to a 2-D displacement.
    pub head: LinearLayer,
}

/// Encoder-side caches, reusable across several decode rollouts.
pub struct SceneEncoding {
    vehicle_count: usize,
    /// Input displacements per observed step, `(2, N)` each.
    disp: Vec<Tensor>,
    /// Pre-activations of the encoder embedding per step.
    embed_pre: Vec<Tensor>,
    enc_caches: Vec<LstmCache>,
    /// Final encoder hidden state `(H, N)`.
    pub final_hidden: Tensor,
    /// Per-vehicle pool MLP inputs `(2 + H, N - 1)`.
    pool_inputs: Vec<Tensor>,
    pool_pre: Vec<Tensor>,
    /// Winning column per (vehicle, pool row).
    pool_argmax: Vec<Vec<usize>>,
    /// Pooled context `(P, N)`.
    pub context: Tensor,
    /// Last observed position per vehicle `(2, N)`.
    pub last_position: Tensor,
    /// Last observed displacement per vehicle `(2, N)`.
    last_disp: Tensor,
}

/// Decoder-side caches for one noise draw.
pub struct DecodeRollout {
    /// Noise broadcast to `(Z, N)`.
    pub z: Tensor,
    inputs: Vec<Tensor>,
    embed_pre: Vec<Tensor>,
    caches: Vec<LstmCache>,
    hiddens: Vec<Tensor>,
    /// Emitted per-step displacements, `(2, N)` each.
    pub deltas: Vec<Tensor>,
    /// Absolute predicted positions, `(2, N)` each.
    pub positions: Vec<Tensor>,
}

impl DecodeRollout {
    pub fn steps(&self) -> usize {
        self.deltas.len()
    }

    /// Positions as per-vehicle sequences, matching `SceneWindow::future`.
    pub fn positions_per_vehicle(&self) -> Vec<Vec<(f64, f64)>> {
        let n = self.positions.first().map_or(0, Tensor::cols);
        (0..n)
            .map(|j| self.positions.iter().map(|p| (p[(0, j)], p[(1, j)])).collect())
            .collect()
    }
}

impl GeneratorModel {
    pub fn new(cfg: GanConfig, rng: &mut impl Rng) -> Self {
        let embed = LinearLayer::new(cfg.embed_dim, 2, rng);
        let encoder = LstmCell::new(cfg.embed_dim, cfg.hidden_dim, rng);
        let pool = LinearLayer::new(cfg.pool_dim, 2 + cfg.hidden_dim, rng);
        let pool_placeholder = Tensor::from_fn(cfg.pool_dim, 1, |_, _| rng.random_range(-0.1..0.1));
        let dec_embed = LinearLayer::new(cfg.embed_dim, 2, rng);
        let decoder = LstmCell::new(cfg.embed_dim, cfg.decoder_hidden(), rng);
        let head = LinearLayer::new(2, cfg.decoder_hidden(), rng);
        GeneratorModel {
            grad_pool_placeholder: Tensor::zeros(cfg.pool_dim, 1),
            cfg,
            embed,
            encoder,
            pool,
            pool_placeholder,
            dec_embed,
            decoder,
            head,
        }
    }

    /// Embedding of a single position displacement (the `phi` feature map).
    pub fn embed_position(&self, dx: f64, dy: f64) -> Tensor {
        relu(&self.embed.forward(&Tensor::from_vec(2, 1, vec![dx, dy])))
    }

    /// Converts per-vehicle observed positions into per-step displacement
    /// tensors; the first step has zero displacement.
    fn displacement_steps(observed: &[Vec<(f64, f64)>]) -> Vec<Tensor> {
        let n = observed.len();
        let len = observed[0].len();
        (0..len)
            .map(|t| {
                Tensor::from_fn(2, n, |row, j| {
                    if t == 0 {
                        0.0
                    } else {
                        let (x1, y1) = observed[j][t];
                        let (x0, y0) = observed[j][t - 1];
                        if row == 0 { x1 - x0 } else { y1 - y0 }
                    }
                })
            })
            .collect()
    }

    /// Runs the shared-weight encoder over every vehicle and pools neighbor
    /// states into per-vehicle contexts.
    pub fn encode_scene(&self, observed: &[Vec<(f64, f64)>]) -> SceneEncoding {
        let n = observed.len();
        assert!(n >= 1, "scene must contain at least one vehicle");
        let steps = observed[0].len();
        assert!(steps >= 1);
        assert!(observed.iter().all(|o| o.len() == steps), "ragged observation window");

        let disp = Self::displacement_steps(observed);
        let mut embed_pre = Vec::with_capacity(steps);
        let mut enc_caches = Vec::with_capacity(steps);
        let mut state = LstmState::zeros(self.cfg.hidden_dim, n);
        for d in &disp {
            let pre = self.embed.forward(d);
            let (next, cache) = self.encoder.forward_step(&relu(&pre), &state);
            embed_pre.push(pre);
            enc_caches.push(cache);
            state = next;
        }
        let final_hidden = state.h.clone();

        let last_position = Tensor::from_fn(2, n, |row, j| {
            let (x, y) = observed[j][steps - 1];
            if row == 0 { x } else { y }
        });
        let (context, pool_inputs, pool_pre, pool_argmax) =
            self.social_pool(&final_hidden, &last_position);

        SceneEncoding {
            vehicle_count: n,
            disp: disp.clone(),
            embed_pre,
            enc_caches,
            final_hidden,
            pool_inputs,
            pool_pre,
            pool_argmax,
            context,
            last_position,
            last_disp: disp.last().unwrap().clone(),
        }
    }

    /// Elementwise max over neighbor contributions
    /// `relu(W [scaled r_ij; h_j] + b)`. Single-vehicle scenes use the
    /// learned placeholder since a max over nothing is undefined.
    #[allow(clippy::type_complexity)]
    pub fn social_pool(
        &self,
        hidden: &Tensor,
        positions: &Tensor,
    ) -> (Tensor, Vec<Tensor>, Vec<Tensor>, Vec<Vec<usize>>) {
        let n = hidden.cols();
        let p = self.cfg.pool_dim;
        let h = self.cfg.hidden_dim;
        let scale = self.cfg.pool_distance_scale;
        let mut context = Tensor::zeros(p, n);
        let mut pool_inputs = Vec::with_capacity(n);
        let mut pool_pre = Vec::with_capacity(n);
        let mut pool_argmax = Vec::with_capacity(n);

        for i in 0..n {
            if n == 1 {
                context.set_col(i, &self.pool_placeholder);
                pool_inputs.push(Tensor::zeros(2 + h, 0));
                pool_pre.push(Tensor::zeros(p, 0));
                pool_argmax.push(Vec::new());
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let input = Tensor::from_fn(2 + h, others.len(), |row, col| {
                let j = others[col];
                match row {
                    0 => (positions[(0, j)] - positions[(0, i)]) * scale,
                    1 => (positions[(1, j)] - positions[(1, i)]) * scale,
                    _ => hidden[(row - 2, j)],
                }
            });
            let pre = self.pool.forward(&input);
            let activated = relu(&pre);
            let mut winners = Vec::with_capacity(p);
            for row in 0..p {
                let mut best_col = 0;
                let mut best = f64::NEG_INFINITY;
                for (col, &v) in activated.row(row).iter().enumerate() {
                    if v > best {
                        best = v;
                        best_col = col;
                    }
                }
                context[(row, i)] = best;
                winners.push(best_col);
            }
            pool_inputs.push(input);
            pool_pre.push(pre);
            pool_argmax.push(winners);
        }
        (context, pool_inputs, pool_pre, pool_argmax)
    }

    /// Draws a scene noise vector, shared by every vehicle in the scene.
    pub fn sample_noise(&self, rng: &mut impl Rng) -> Tensor {
        Tensor::from_fn(self.cfg.noise_dim, 1, |_, _| rng.sample(StandardNormal))
    }

    /// Autoregressive rollout of `steps` future displacements. The decoder
    /// starts from hidden state `[context; z]` (zero cell state) and is fed
    /// the previous emitted displacement, bootstrapped with the last
    /// observed one.
    pub fn decode_future(&self, enc: &SceneEncoding, z: &Tensor, steps: usize) -> DecodeRollout {
        let n = enc.vehicle_count;
        assert_eq!(z.rows(), self.cfg.noise_dim);
        assert_eq!(z.cols(), 1, "one noise vector per scene");
        let z_broadcast = Tensor::from_fn(self.cfg.noise_dim, n, |row, _| z[(row, 0)]);
        let h0 = Tensor::vstack(&enc.context, &z_broadcast);
        let mut state = LstmState { h: h0, c: Tensor::zeros(self.cfg.decoder_hidden(), n) };

        let mut rollout = DecodeRollout {
            z: z_broadcast,
            inputs: Vec::with_capacity(steps),
            embed_pre: Vec::with_capacity(steps),
            caches: Vec::with_capacity(steps),
            hiddens: Vec::with_capacity(steps),
            deltas: Vec::with_capacity(steps),
            positions: Vec::with_capacity(steps),
        };
        let mut prev_disp = enc.last_disp.clone();
        let mut position = enc.last_position.clone();
        for _ in 0..steps {
            let pre = self.dec_embed.forward(&prev_disp);
            let (next, cache) = self.decoder.forward_step(&relu(&pre), &state);
            let delta = self.head.forward(&next.h);
            position = position.add(&delta);

            rollout.inputs.push(prev_disp.clone());
            rollout.embed_pre.push(pre);
            rollout.caches.push(cache);
            rollout.hiddens.push(next.h.clone());
            rollout.deltas.push(delta.clone());
            rollout.positions.push(position.clone());

            prev_disp = delta;
            state = next;
        }
        rollout
    }

    /// Backpropagates `delta_grads` (one `(2, N)` gradient per emitted step,
    /// already scaled) through decoder, pool and encoder, accumulating
    /// parameter gradients.
    pub fn backward(&mut self, enc: &SceneEncoding, dec: &DecodeRollout, delta_grads: &[Tensor]) {
        let n = enc.vehicle_count;
        let steps = dec.steps();
        assert_eq!(delta_grads.len(), steps);

        let mut grad_h = Tensor::zeros(self.cfg.decoder_hidden(), n);
        let mut grad_c = Tensor::zeros(self.cfg.decoder_hidden(), n);
        // The emitted delta at step s feeds the decoder input at step s+1.
        let mut grad_from_next_input = Tensor::zeros(2, n);
        for s in (0..steps).rev() {
            let grad_delta = delta_grads[s].add(&grad_from_next_input);
            grad_h.add_assign(&self.head.backward(&dec.hiddens[s], &grad_delta));
            let (grad_x, grad_h_prev, grad_c_prev) =
                self.decoder.backward_step(&dec.caches[s], &grad_h, &grad_c);
            let grad_embedded = relu_backward(&dec.embed_pre[s], &grad_x);
            grad_from_next_input = self.dec_embed.backward(&dec.inputs[s], &grad_embedded);
            grad_h = grad_h_prev;
            grad_c = grad_c_prev;
        }
        // grad_from_next_input now holds the gradient on the last observed
        // displacement: input data, no parameters behind it.

        // Split the initial-hidden gradient into context and (discarded) noise.
        let grad_context = grad_h.slice_rows(0, self.cfg.pool_dim);
        let mut grad_enc_hidden = Tensor::zeros(self.cfg.hidden_dim, n);
        for i in 0..n {
            if n == 1 {
                for row in 0..self.cfg.pool_dim {
                    self.grad_pool_placeholder[(row, 0)] += grad_context[(row, i)];
                }
                continue;
            }
            // Route each context row's gradient to the winning contribution.
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let mut grad_activated = Tensor::zeros(self.cfg.pool_dim, others.len());
            for row in 0..self.cfg.pool_dim {
                grad_activated[(row, enc.pool_argmax[i][row])] += grad_context[(row, i)];
            }
            let grad_pre = relu_backward(&enc.pool_pre[i], &grad_activated);
            let grad_input = self.pool.backward(&enc.pool_inputs[i], &grad_pre);
            // Rows 0..2 are relative positions (input data); the rest flow
            // back into the neighbors' encoder hidden states.
            for (col, &j) in others.iter().enumerate() {
                for row in 0..self.cfg.hidden_dim {
                    grad_enc_hidden[(row, j)] += grad_input[(row + 2, col)];
                }
            }
        }

        // Encoder BPTT; only the final hidden state receives a gradient.
        let mut grad_h = grad_enc_hidden;
        let mut grad_c = Tensor::zeros(self.cfg.hidden_dim, n);
        for t in (0..enc.enc_caches.len()).rev() {
            let (grad_x, grad_h_prev, grad_c_prev) =
                self.encoder.backward_step(&enc.enc_caches[t], &grad_h, &grad_c);
            let grad_embedded = relu_backward(&enc.embed_pre[t], &grad_x);
            self.embed.backward(&enc.disp[t], &grad_embedded);
            grad_h = grad_h_prev;
            grad_c = grad_c_prev;
        }
    }

    pub fn zero_grad(&mut self) {
        self.embed.zero_grad();
        self.encoder.zero_grad();
        self.pool.zero_grad();
        self.grad_pool_placeholder.fill(0.0);
        self.dec_embed.zero_grad();
        self.decoder.zero_grad();
        self.head.zero_grad();
    }

    pub fn params(&mut self) -> Vec<(&mut Tensor, &mut Tensor)> {
        let mut params = self.embed.params();
        params.extend(self.encoder.params());
        params.extend(self.pool.params());
        params.push((&mut self.pool_placeholder, &mut self.grad_pool_placeholder));
        params.extend(self.dec_embed.params());
        params.extend(self.decoder.params());
        params.extend(self.head.params());
        params
    }

    /// One-step prediction for live simulation: encodes the last `o_l`
    /// positions of every scene vehicle, decodes a single step with fresh
    /// noise, and returns the next position per vehicle.
    pub fn generate_next_position(
        &self,
        history: &[Vec<(f64, f64)>],
        rng: &mut impl Rng,
    ) -> Vec<(f64, f64)> {
        let enc = self.encode_scene(history);
        let z = self.sample_noise(rng);
        let rollout = self.decode_future(&enc, &z, 1);
        let pos = &rollout.positions[0];
        (0..history.len()).map(|j| (pos[(0, j)], pos[(1, j)])).collect()
    }
}
