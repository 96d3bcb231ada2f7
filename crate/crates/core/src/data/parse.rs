//! CSV readers for recorded trajectories.
//!
//! Native format: header `vehicle_id,t,x_m,y_m`, one row per sample.
//! NGSIM format: columns `Vehicle_ID,Frame_ID,Local_X,Local_Y` (any others
//! ignored), feet converted to meters and 10 Hz frames to seconds. Some
//! NGSIM sites put the longitudinal axis in `Local_X`, others in `Local_Y`;
//! `swap_axes` flips them so x is always the travel direction.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use super::{DataError, TrajectoryRecord};

const FEET_TO_METERS: f64 = 0.3048;
const NGSIM_FRAME_SECONDS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Native,
    Ngsim { swap_axes: bool },
}

pub fn parse_trajectories(path: &Path, format: TrajectoryFormat) -> Result<Vec<TrajectoryRecord>, DataError> {
    let file = std::fs::File::open(path)?;
    parse_trajectories_reader(file, format)
}

pub fn parse_trajectories_reader(
    reader: impl Read,
    format: TrajectoryFormat,
) -> Result<Vec<TrajectoryRecord>, DataError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv.headers().map_err(csv_error)?.clone();
    let col = |name: &'static str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(DataError::MissingColumn(name))
    };

    let mut records = Vec::new();
    match format {
        TrajectoryFormat::Native => {
            if csv.headers().map_err(csv_error)?.len() == 0 {
                return Ok(records);
            }
            let (ci, ct, cx, cy) = (col("vehicle_id")?, col("t")?, col("x_m")?, col("y_m")?);
            for row in csv.records() {
                let row = row.map_err(csv_error)?;
                let line = row.position().map_or(0, |p| p.line());
                records.push(TrajectoryRecord {
                    vehicle_id: field(&row, ci, line)?,
                    t: field(&row, ct, line)?,
                    x: field(&row, cx, line)?,
                    y: field(&row, cy, line)?,
                });
            }
        }
        TrajectoryFormat::Ngsim { swap_axes } => {
            let (ci, cf, cx, cy) = (col("Vehicle_ID")?, col("Frame_ID")?, col("Local_X")?, col("Local_Y")?);
            for row in csv.records() {
                let row = row.map_err(csv_error)?;
                let line = row.position().map_or(0, |p| p.line());
                let vehicle_id: u64 = field(&row, ci, line)?;
                let frame: u64 = field(&row, cf, line)?;
                let local_x: f64 = field::<f64>(&row, cx, line)? * FEET_TO_METERS;
                let local_y: f64 = field::<f64>(&row, cy, line)? * FEET_TO_METERS;
                // NGSIM's Local_X is lateral and Local_Y longitudinal at most
                // sites; map longitudinal onto x unless told otherwise.
                let (x, y) = if swap_axes { (local_x, local_y) } else { (local_y, local_x) };
                records.push(TrajectoryRecord { vehicle_id, t: frame as f64 * NGSIM_FRAME_SECONDS, x, y });
            }
        }
    }

    check_monotone(&records)?;
    Ok(records)
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, idx: usize, line: u64) -> Result<T, DataError> {
    let raw = row.get(idx).ok_or(DataError::MalformedRow { line, message: format!("missing field {idx}") })?;
    raw.trim().parse().map_err(|_| DataError::MalformedRow {
        line,
        message: format!("cannot parse '{}'", raw.trim()),
    })
}

fn csv_error(e: csv::Error) -> DataError {
    let line = match e.position() {
        Some(p) => p.line(),
        None => 0,
    };
    DataError::MalformedRow { line, message: e.to_string() }
}

fn check_monotone(records: &[TrajectoryRecord]) -> Result<(), DataError> {
    let mut last_t: HashMap<u64, f64> = HashMap::new();
    for r in records {
        if let Some(&prev) = last_t.get(&r.vehicle_id) {
            if r.t <= prev {
                return Err(DataError::NonMonotoneTime { vehicle_id: r.vehicle_id, t: r.t });
            }
        }
        last_t.insert(r.vehicle_id, r.t);
    }
    Ok(())
}

/// Writes records in the native CSV format.
pub fn write_native(w: &mut impl Write, records: &[TrajectoryRecord]) -> std::io::Result<()> {
    writeln!(w, "vehicle_id,t,x_m,y_m")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.vehicle_id, r.t, r.x, r.y)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_row_parses_identically() {
        let csv = "vehicle_id,t,x_m,y_m\n7,1.5,30.0,3.5\n";
        let records = parse_trajectories_reader(csv.as_bytes(), TrajectoryFormat::Native).unwrap();
        assert_eq!(records, vec![TrajectoryRecord { vehicle_id: 7, t: 1.5, x: 30.0, y: 3.5 }]);
    }

    #[test]
    fn ngsim_units_convert_feet_and_frames() {
        let csv = "Vehicle_ID,Frame_ID,Total_Frames,Local_X,Local_Y\n3,20,100,10.0,250.0\n";
        let records = parse_trajectories_reader(csv.as_bytes(), TrajectoryFormat::Ngsim { swap_axes: false }).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.vehicle_id, 3);
        assert!((r.t - 2.0).abs() < 1e-12);
        // Local_Y (longitudinal) lands on x; Local_X = 10 ft = 3.048 m on y.
        assert!((r.y - 3.048).abs() < 1e-12);
        assert!((r.x - 250.0 * 0.3048).abs() < 1e-12);
    }

    #[test]
    fn ngsim_axis_swap_flag() {
        let csv = "Vehicle_ID,Frame_ID,Local_X,Local_Y\n3,10,10.0,250.0\n";
        let records = parse_trajectories_reader(csv.as_bytes(), TrajectoryFormat::Ngsim { swap_axes: true }).unwrap();
        assert!((records[0].x - 3.048).abs() < 1e-12);
    }

    #[test]
    fn empty_file_is_empty_list() {
        let records = parse_trajectories_reader("vehicle_id,t,x_m,y_m\n".as_bytes(), TrajectoryFormat::Native).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let csv = "vehicle_id,t,x_m,y_m\n1,0.0,5.0,2.0\n1,abc,6.0,2.0\n";
        let err = parse_trajectories_reader(csv.as_bytes(), TrajectoryFormat::Native).unwrap_err();
        match err {
            DataError::MalformedRow { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_monotone_timestamps_rejected() {
        let csv = "vehicle_id,t,x_m,y_m\n1,0.5,5.0,2.0\n1,0.5,6.0,2.0\n";
        let err = parse_trajectories_reader(csv.as_bytes(), TrajectoryFormat::Native).unwrap_err();
        assert!(matches!(err, DataError::NonMonotoneTime { vehicle_id: 1, .. }));
    }

    #[test]
    fn native_roundtrip_is_exact() {
        let records = vec![
            TrajectoryRecord { vehicle_id: 1, t: 0.1, x: 1.25, y: 6.0 },
            TrajectoryRecord { vehicle_id: 1, t: 0.2, x: 2.5, y: 6.0 },
            TrajectoryRecord { vehicle_id: 9, t: 0.1, x: -3.75, y: 10.0 },
        ];
        let mut buf = Vec::new();
        write_native(&mut buf, &records).unwrap();
        let parsed = parse_trajectories_reader(buf.as_slice(), TrajectoryFormat::Native).unwrap();
        assert_eq!(parsed, records);
    }
}
