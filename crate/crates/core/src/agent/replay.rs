//! Prioritized experience replay over a ring buffer, with a segment tree
//! carrying both subtree sums (for proportional sampling) and subtree
//! minima (for the importance-weight normalizer).

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("buffer holds {len} transitions, cannot sample a batch of {batch}")]
    NotEnoughData { len: usize, batch: usize },
}

/// Segment tree over leaf priorities; internal nodes keep (sum, min).
struct SegmentTree {
    leaf_count: usize,
    sums: Vec<f64>,
    mins: Vec<f64>,
}

impl SegmentTree {
    fn new(capacity: usize) -> Self {
        let leaf_count = capacity.next_power_of_two();
        SegmentTree {
            leaf_count,
            sums: vec![0.0; 2 * leaf_count],
            mins: vec![f64::INFINITY; 2 * leaf_count],
        }
    }

    fn set(&mut self, idx: usize, value: f64) {
        let mut node = self.leaf_count + idx;
        self.sums[node] = value;
        self.mins[node] = value;
        while node > 1 {
            node /= 2;
            self.sums[node] = self.sums[2 * node] + self.sums[2 * node + 1];
            self.mins[node] = self.mins[2 * node].min(self.mins[2 * node + 1]);
        }
    }

    fn total(&self) -> f64 {
        self.sums[1]
    }

    fn min(&self) -> f64 {
        self.mins[1]
    }

    fn leaf(&self, idx: usize) -> f64 {
        self.sums[self.leaf_count + idx]
    }

    /// Index of the leaf where the prefix sum reaches `target`.
    fn find_prefix(&self, mut target: f64) -> usize {
        let mut node = 1;
        while node < self.leaf_count {
            let left = 2 * node;
            if target < self.sums[left] {
                node = left;
            } else {
                target -= self.sums[left];
                node = left + 1;
            }
        }
        node - self.leaf_count
    }
}

/// Priority exponent is applied when priorities are stored; sampling is then
/// proportional to the stored value. New transitions enter at the maximum
/// priority seen so far so they are trained on at least once.
pub struct ReplayBuffer {
    capacity: usize,
    storage: Vec<Transition>,
    next_slot: usize,
    tree: SegmentTree,
    alpha: f64,
    max_priority: f64,
    priority_epsilon: f64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, alpha: f64) -> Self {
        assert!(capacity > 0);
        ReplayBuffer {
            capacity,
            storage: Vec::with_capacity(capacity.min(1 << 20)),
            next_slot: 0,
            tree: SegmentTree::new(capacity),
            alpha,
            max_priority: 1.0,
            priority_epsilon: 1e-6,
        }
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        self.storage.clear();
        self.next_slot = 0;
        self.tree = SegmentTree::new(self.capacity);
        self.max_priority = 1.0;
    }

    pub fn push(&mut self, transition: Transition) {
        let idx = self.next_slot;
        if self.storage.len() < self.capacity {
            self.storage.push(transition);
        } else {
            self.storage[idx] = transition;
        }
        self.tree.set(idx, self.max_priority.powf(self.alpha));
        self.next_slot = (idx + 1) % self.capacity;
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.storage[idx]
    }

    /// Sampling probability of slot `idx`: `p_i^alpha / sum p^alpha`.
    pub fn probability(&self, idx: usize) -> f64 {
        self.tree.leaf(idx) / self.tree.total()
    }

    /// Stratified proportional sample. Returns slot indices and importance
    /// weights `(N * P(i))^-beta`, normalized by the maximum weight over the
    /// whole buffer.
    pub fn sample(
        &self,
        batch: usize,
        beta: f64,
        rng: &mut impl Rng,
    ) -> Result<(Vec<usize>, Vec<f64>), ReplayError> {
        let n = self.len();
        if n < batch {
            return Err(ReplayError::NotEnoughData { len: n, batch });
        }
        let total = self.tree.total();
        let segment = total / batch as f64;
        let mut indices = Vec::with_capacity(batch);
        for k in 0..batch {
            let target = segment * (k as f64 + rng.random_range(0.0..1.0));
            let idx = self.tree.find_prefix(target.min(total * (1.0 - 1e-12)));
            indices.push(idx.min(n - 1));
        }
        // Max weight corresponds to the minimum probability over the buffer.
        let min_prob = self.tree.min() / total;
        let max_weight = (n as f64 * min_prob).powf(-beta);
        let weights = indices
            .iter()
            .map(|&i| {
                let p = self.tree.leaf(i) / total;
                (n as f64 * p).powf(-beta) / max_weight
            })
            .collect();
        Ok((indices, weights))
    }

    /// Refreshes priorities to `|td_error| + eps` (exponent applied inside).
    pub fn update_priorities(&mut self, indices: &[usize], td_errors: &[f64]) {
        assert_eq!(indices.len(), td_errors.len());
        for (&idx, &td) in indices.iter().zip(td_errors) {
            let priority = td.abs() + self.priority_epsilon;
            self.max_priority = self.max_priority.max(priority);
            self.tree.set(idx, priority.powf(self.alpha));
        }
    }

    /// Root-vs-leaves consistency of the priority tree.
    pub fn tree_consistency_error(&self) -> f64 {
        let leaf_sum: f64 = (0..self.len()).map(|i| self.tree.leaf(i)).sum();
        (leaf_sum - self.tree.total()).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn transition(tag: f64) -> Transition {
        Transition { state: vec![tag], action: 0, reward: tag, next_state: vec![tag], done: false }
    }

    #[test]
    fn equal_priorities_sample_uniformly() {
        let mut buffer = ReplayBuffer::new(8, 0.6);
        for i in 0..4 {
            buffer.push(transition(i as f64));
        }
        for i in 0..4 {
            assert!((buffer.probability(i) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_zero_flattens_any_priorities() {
        let mut buffer = ReplayBuffer::new(8, 0.0);
        for i in 0..4 {
            buffer.push(transition(i as f64));
        }
        buffer.update_priorities(&[0, 1, 2, 3], &[10.0, 1.0, 0.1, 5.0]);
        for i in 0..4 {
            assert!((buffer.probability(i) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn three_to_one_priorities_sample_in_ratio() {
        let mut buffer = ReplayBuffer::new(2, 1.0);
        buffer.push(transition(0.0));
        buffer.push(transition(1.0));
        // alpha = 1: stored priorities are the raw values.
        buffer.update_priorities(&[0, 1], &[3.0 - 1e-6, 1.0 - 1e-6]);
        assert!((buffer.probability(0) - 0.75).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mut counts = [0u32; 2];
        for _ in 0..100_000 {
            let (indices, _) = buffer.sample(1, 1.0, &mut rng).unwrap();
            counts[indices[0]] += 1;
        }
        let freq0 = counts[0] as f64 / 100_000.0;
        assert!((freq0 - 0.75).abs() < 0.01, "frequency {freq0}");
    }

    #[test]
    fn sampling_before_enough_data_errors() {
        let mut buffer = ReplayBuffer::new(16, 0.6);
        buffer.push(transition(0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        assert!(matches!(
            buffer.sample(4, 0.4, &mut rng),
            Err(ReplayError::NotEnoughData { len: 1, batch: 4 })
        ));
    }

    #[test]
    fn tree_sum_matches_leaves_after_many_updates() {
        let mut buffer = ReplayBuffer::new(64, 0.6);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for i in 0..500 {
            buffer.push(transition(i as f64));
            let idx = i % 64.min(buffer.len());
            buffer.update_priorities(&[idx], &[rng.random_range(0.0..50.0)]);
        }
        assert!(buffer.tree_consistency_error() < 1e-9);
    }

    #[test]
    fn importance_weights_are_normalized() {
        let mut buffer = ReplayBuffer::new(8, 1.0);
        for i in 0..8 {
            buffer.push(transition(i as f64));
        }
        buffer.update_priorities(&[0, 1, 2, 3, 4, 5, 6, 7], &[8.0, 4.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (_, weights) = buffer.sample(8, 0.7, &mut rng).unwrap();
        assert!(weights.iter().all(|&w| w > 0.0 && w <= 1.0 + 1e-12));
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut buffer = ReplayBuffer::new(4, 0.6);
        for i in 0..6 {
            buffer.push(transition(i as f64));
        }
        assert_eq!(buffer.len(), 4);
        let rewards: Vec<f64> = (0..4).map(|i| buffer.get(i).reward).collect();
        assert_eq!(rewards, vec![4.0, 5.0, 2.0, 3.0]);
    }
}
