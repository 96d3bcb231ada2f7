//! Displacement error metrics for trajectory prediction.

use super::DataError;

/// Average and final displacement error between predicted and true
/// per-vehicle position sequences.
///
/// ADE averages the Euclidean error over every step of every vehicle; FDE
/// averages it over the last step only.
pub fn displacement_errors(
    predicted: &[Vec<(f64, f64)>],
    truth: &[Vec<(f64, f64)>],
) -> Result<(f64, f64), DataError> {
    if predicted.len() != truth.len() {
        return Err(DataError::ShapeMismatch(format!(
            "{} predicted vehicles vs {} true",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(DataError::Empty);
    }
    let mut total = 0.0;
    let mut steps = 0usize;
    let mut final_total = 0.0;
    for (p, t) in predicted.iter().zip(truth) {
        if p.len() != t.len() || p.is_empty() {
            return Err(DataError::ShapeMismatch(format!(
                "sequence lengths {} vs {}",
                p.len(),
                t.len()
            )));
        }
        for (a, b) in p.iter().zip(t) {
            total += ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            steps += 1;
        }
        let (a, b) = (p.last().unwrap(), t.last().unwrap());
        final_total += ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    }
    Ok((total / steps as f64, final_total / predicted.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction_is_zero() {
        let truth = vec![vec![(0.0, 0.0), (1.0, 1.0)], vec![(5.0, 5.0), (6.0, 5.0)]];
        let (ade, fde) = displacement_errors(&truth, &truth).unwrap();
        assert_eq!((ade, fde), (0.0, 0.0));
    }

    #[test]
    fn constant_offset_gives_equal_ade_fde() {
        let truth: Vec<Vec<(f64, f64)>> = vec![(0..8).map(|k| (k as f64, 0.0)).collect()];
        let predicted: Vec<Vec<(f64, f64)>> = vec![(0..8).map(|k| (k as f64 + 3.0, 0.0)).collect()];
        let (ade, fde) = displacement_errors(&predicted, &truth).unwrap();
        assert!((ade - 3.0).abs() < 1e-12);
        assert!((fde - 3.0).abs() < 1e-12);
    }

    #[test]
    fn linearly_growing_error() {
        // Errors 0.0, 0.1, ..., 0.7 over eight steps.
        let truth: Vec<Vec<(f64, f64)>> = vec![(0..8).map(|k| (k as f64, 0.0)).collect()];
        let predicted: Vec<Vec<(f64, f64)>> =
            vec![(0..8).map(|k| (k as f64 + 0.1 * k as f64, 0.0)).collect()];
        let (ade, fde) = displacement_errors(&predicted, &truth).unwrap();
        assert!((ade - 0.35).abs() < 1e-12, "ade {ade}");
        assert!((fde - 0.7).abs() < 1e-12, "fde {fde}");
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = vec![vec![(0.0, 0.0)]];
        let b = vec![vec![(0.0, 0.0), (1.0, 0.0)]];
        assert!(displacement_errors(&a, &b).is_err());
    }
}
