//! Central finite-difference verification of analytic gradients.

use super::tensor::Tensor;

/// A model under gradient test: a scalar loss over a set of parameter
/// tensors addressable by index.
pub trait GradCheckable {
    /// Scalar loss for the current parameter values. Must be deterministic
    /// (freeze any noise before checking).
    fn loss(&mut self) -> f64;
    fn param_count(&self) -> usize;
    fn param_mut(&mut self, idx: usize) -> &mut Tensor;
    fn param_name(&self, idx: usize) -> String;
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst_param: String,
    pub worst_index: usize,
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }
}

/// Compares `analytic` (one tensor per parameter, same order) against central
/// finite differences of the model loss with step `h`.
pub fn grad_check<M: GradCheckable>(model: &mut M, analytic: &[Tensor], h: f64) -> GradCheckReport {
    assert_eq!(model.param_count(), analytic.len());
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_param: String::new(),
        worst_index: 0,
        checked: 0,
    };
    for idx in 0..model.param_count() {
        assert_eq!(
            model.param_mut(idx).shape(),
            analytic[idx].shape(),
            "analytic gradient shape mismatch for {}",
            model.param_name(idx)
        );
        for e in 0..analytic[idx].len() {
            let original = model.param_mut(idx).data()[e];
            model.param_mut(idx).data_mut()[e] = original + h;
            let plus = model.loss();
            model.param_mut(idx).data_mut()[e] = original - h;
            let minus = model.loss();
            model.param_mut(idx).data_mut()[e] = original;

            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[idx].data()[e];
            // Mixed relative/absolute error: the 1e-3 guard keeps the
            // finite-difference noise floor (~1e-9 for O(1) losses) from
            // dominating elements whose true gradient is tiny.
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs() + 1e-3);
            report.checked += 1;
            if rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst_param = model.param_name(idx);
                report.worst_index = e;
            }
        }
    }
    report
}
