//! Seeded Lloyd's algorithm with k-means++ initialization, used to group
//! vehicles into interacting scenes by spatial proximity.

use rand::Rng;

use crate::seeding::{derive_rng, stream};

/// Clusters 2-D positions into `k` groups. Deterministic for a fixed seed;
/// iterates until the assignment is stable or 100 iterations.
pub fn kmeans_group(positions: &[(f64, f64)], k: usize, seed: u64) -> Vec<usize> {
    assert!(k >= 1, "k must be at least 1");
    assert!(k <= positions.len(), "k may not exceed the number of points");
    let mut rng = derive_rng(seed, stream::DATA_SPLIT, k as u64);

    // k-means++ seeding: first center uniform, then proportional to squared
    // distance from the nearest chosen center.
    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(k);
    centers.push(positions[rng.random_range(0..positions.len())]);
    let mut dist2: Vec<f64> = positions.iter().map(|p| squared(*p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total <= 0.0 {
            // All remaining points coincide with a center; pick any.
            rng.random_range(0..positions.len())
        } else {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = positions.len() - 1;
            for (i, &d) in dist2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        };
        centers.push(positions[next]);
        for (d, p) in dist2.iter_mut().zip(positions) {
            *d = d.min(squared(*p, *centers.last().unwrap()));
        }
    }

    let mut assignment = vec![0usize; positions.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(positions) {
            let best = centers
                .iter()
                .enumerate()
                .min_by(|(_, c1), (_, c2)| squared(*p, **c1).partial_cmp(&squared(*p, **c2)).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            if best != *a {
                *a = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (&a, p) in assignment.iter().zip(positions) {
            sums[a].0 += p.0;
            sums[a].1 += p.1;
            sums[a].2 += 1;
        }
        for (center, (sx, sy, count)) in centers.iter_mut().zip(sums) {
            if count > 0 {
                *center = (sx / count as f64, sy / count as f64);
            }
        }
    }
    assignment
}

fn squared(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Within-cluster sum of squared distances for a given assignment.
pub fn within_cluster_ss(positions: &[(f64, f64)], assignment: &[usize], k: usize) -> f64 {
    let mut sums = vec![(0.0, 0.0, 0usize); k];
    for (&a, p) in assignment.iter().zip(positions) {
        sums[a].0 += p.0;
        sums[a].1 += p.1;
        sums[a].2 += 1;
    }
    let centers: Vec<(f64, f64)> = sums
        .iter()
        .map(|&(sx, sy, c)| if c > 0 { (sx / c as f64, sy / c as f64) } else { (0.0, 0.0) })
        .collect();
    assignment.iter().zip(positions).map(|(&a, p)| squared(*p, centers[a])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_separated_clouds_split_perfectly() {
        let mut positions = Vec::new();
        for i in 0..10 {
            positions.push((i as f64 * 0.5, 0.0));
        }
        for i in 0..10 {
            positions.push((1000.0 + i as f64 * 0.5, 0.0));
        }
        let labels = kmeans_group(&positions, 2, 1);
        let first = labels[0];
        assert!(labels[..10].iter().all(|&l| l == first));
        assert!(labels[10..].iter().all(|&l| l != first));
    }

    #[test]
    fn k_one_collapses_to_single_cluster() {
        let positions: Vec<(f64, f64)> = (0..7).map(|i| (i as f64, -(i as f64))).collect();
        let labels = kmeans_group(&positions, 1, 3);
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn k_equal_n_gives_zero_within_cluster_distance() {
        let positions: Vec<(f64, f64)> = (0..6).map(|i| (i as f64 * 10.0, i as f64)).collect();
        let labels = kmeans_group(&positions, positions.len(), 5);
        let mut seen = labels.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), positions.len(), "every point its own cluster");
        assert!(within_cluster_ss(&positions, &labels, positions.len()) < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let positions: Vec<(f64, f64)> =
            (0..40).map(|i| ((i as f64 * 13.7).sin() * 50.0, (i as f64 * 7.3).cos() * 50.0)).collect();
        assert_eq!(kmeans_group(&positions, 4, 9), kmeans_group(&positions, 4, 9));
    }

    #[test]
    fn objective_no_worse_than_random_assignment() {
        let positions: Vec<(f64, f64)> =
            (0..60).map(|i| ((i % 3) as f64 * 200.0 + (i as f64 * 3.1).sin(), (i as f64 * 1.7).cos())).collect();
        let labels = kmeans_group(&positions, 3, 2);
        let fitted = within_cluster_ss(&positions, &labels, 3);
        let naive: Vec<usize> = (0..positions.len()).map(|i| i % 3).collect();
        let baseline = within_cluster_ss(&positions, &naive, 3);
        assert!(fitted <= baseline);
    }
}
