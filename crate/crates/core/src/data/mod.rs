//! Recorded-trajectory ingest and preparation: parsing (NGSIM or native
//! CSV), resampling onto the simulation clock, k-means scene grouping,
//! observation/prediction windowing, and displacement metrics.

mod kmeans;
mod metrics;
mod parse;
mod resample;
mod synthetic;
mod window;

pub use kmeans::{kmeans_group, within_cluster_ss};
pub use metrics::displacement_errors;
pub use parse::{parse_trajectories, parse_trajectories_reader, write_native, TrajectoryFormat};
pub use resample::{resample, ResampledTrack};
pub use synthetic::synthetic_rule_driver_records;
pub use window::{build_scene_dataset, window_scenes, DatasetParams};

use thiserror::Error;

/// One recorded sample of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub vehicle_id: u64,
    /// Sample time [s]; strictly increasing per vehicle.
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// A group of vehicles observed together for `o_l` frames with `p_l` known
/// future frames, all on the same uniform clock.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneWindow {
    pub vehicle_ids: Vec<u64>,
    /// Per-vehicle observed positions, each of length `o_l`.
    pub observed: Vec<Vec<(f64, f64)>>,
    /// Per-vehicle future positions, each of length `p_l`.
    pub future: Vec<Vec<(f64, f64)>>,
    pub dt: f64,
}

impl SceneWindow {
    pub fn vehicle_count(&self) -> usize {
        self.vehicle_ids.len()
    }

    pub fn observed_len(&self) -> usize {
        self.observed.first().map_or(0, Vec::len)
    }

    pub fn future_len(&self) -> usize {
        self.future.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("vehicle {vehicle_id}: timestamps not strictly increasing at t={t}")]
    NonMonotoneTime { vehicle_id: u64, t: f64 },
    #[error("missing column '{0}' in header")]
    MissingColumn(&'static str),
    #[error("prediction and truth shapes differ: {0}")]
    ShapeMismatch(String),
    #[error("empty dataset")]
    Empty,
}
