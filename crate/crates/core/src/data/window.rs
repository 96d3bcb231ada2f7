//! Sliding observation/prediction windows over grouped, resampled tracks.

use std::collections::HashMap;

use super::resample::ResampledTrack;
use super::SceneWindow;
use crate::data::kmeans_group;

/// Cuts stride-1 sliding windows of `o_l` observed plus `p_l` future frames
/// out of each group. A vehicle joins a window only if its track covers the
/// whole span; windows with no vehicle are discarded.
pub fn window_scenes(
    tracks: &[ResampledTrack],
    groups: &HashMap<u64, usize>,
    observed_len: usize,
    future_len: usize,
) -> Vec<SceneWindow> {
    assert!(observed_len >= 1 && future_len >= 1);
    let window_len = (observed_len + future_len) as i64;
    let mut by_group: HashMap<usize, Vec<&ResampledTrack>> = HashMap::new();
    for track in tracks {
        if let Some(&g) = groups.get(&track.vehicle_id) {
            by_group.entry(g).or_default().push(track);
        }
    }

    let mut group_ids: Vec<usize> = by_group.keys().copied().collect();
    group_ids.sort_unstable();

    let mut windows = Vec::new();
    for g in group_ids {
        let members = &by_group[&g];
        let first = members.iter().map(|t| t.start_frame).min().unwrap();
        let last = members.iter().map(|t| t.end_frame()).max().unwrap();
        let dt = members[0].dt;
        for start in first..=(last - window_len) {
            let mut scene = SceneWindow { vehicle_ids: Vec::new(), observed: Vec::new(), future: Vec::new(), dt };
            for track in members {
                if track.start_frame <= start && track.end_frame() >= start + window_len {
                    let base = (start - track.start_frame) as usize;
                    scene.vehicle_ids.push(track.vehicle_id);
                    scene.observed.push(track.points[base..base + observed_len].to_vec());
                    scene
                        .future
                        .push(track.points[base + observed_len..base + observed_len + future_len].to_vec());
                }
            }
            if !scene.vehicle_ids.is_empty() {
                windows.push(scene);
            }
        }
    }
    windows
}

#[derive(Debug, Clone, Copy)]
pub struct DatasetParams {
    pub observed_len: usize,
    pub future_len: usize,
    /// Frames between window start positions.
    pub stride: usize,
    /// Scene size cap: `k = ceil(present / group_divisor)` clusters.
    pub group_divisor: usize,
    pub kmeans_seed: u64,
}

impl Default for DatasetParams {
    fn default() -> Self {
        DatasetParams { observed_len: 8, future_len: 8, stride: 1, group_divisor: 12, kmeans_seed: 0 }
    }
}

/// Full windowing pipeline: at each window start the vehicles present for
/// the whole span are grouped by proximity (k-means on their positions at
/// the start frame) and each group becomes one scene window.
pub fn build_scene_dataset(tracks: &[ResampledTrack], params: &DatasetParams) -> Vec<SceneWindow> {
    let window_len = (params.observed_len + params.future_len) as i64;
    let Some(first) = tracks.iter().map(|t| t.start_frame).min() else {
        return Vec::new();
    };
    let last = tracks.iter().map(|t| t.end_frame()).max().unwrap();

    let mut windows = Vec::new();
    let mut start = first;
    while start + window_len <= last {
        let present: Vec<&ResampledTrack> = tracks
            .iter()
            .filter(|t| t.start_frame <= start && t.end_frame() >= start + window_len)
            .collect();
        if !present.is_empty() {
            let positions: Vec<(f64, f64)> =
                present.iter().map(|t| t.at_frame(start).unwrap()).collect();
            let k = present.len().div_ceil(params.group_divisor).max(1);
            let labels = kmeans_group(&positions, k, params.kmeans_seed.wrapping_add(start as u64));
            for cluster in 0..k {
                let mut scene = SceneWindow {
                    vehicle_ids: Vec::new(),
                    observed: Vec::new(),
                    future: Vec::new(),
                    dt: present[0].dt,
                };
                for (track, &label) in present.iter().zip(&labels) {
                    if label != cluster {
                        continue;
                    }
                    let base = (start - track.start_frame) as usize;
                    scene.vehicle_ids.push(track.vehicle_id);
                    scene.observed.push(track.points[base..base + params.observed_len].to_vec());
                    scene.future.push(
                        track.points
                            [base + params.observed_len..base + params.observed_len + params.future_len]
                            .to_vec(),
                    );
                }
                if !scene.vehicle_ids.is_empty() {
                    windows.push(scene);
                }
            }
        }
        start += params.stride as i64;
    }
    windows
}
