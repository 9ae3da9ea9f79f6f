//! Central-difference gradient oracle.
//!
//! This is the reference every analytic gradient in the crate is judged
//! against. It treats the objective as a black box, so it stays valid no
//! matter how the analytic paths are refactored; keep it free of any calls
//! into the gradient code it checks.

use nalgebra::DVector;

use crate::error::GmError;

/// Default probe step. The free energy is quadratic in beliefs and in the
/// temporal scale, so central differences at this step are exact up to
/// floating-point roundoff for those variables.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Gradient of `f` at `point` by central differences, one coordinate at a
/// time: (f(x + h e_i) - f(x - h e_i)) / 2h.
pub fn fd_oracle<F>(f: F, point: &DVector<f64>, step: f64) -> Result<DVector<f64>, GmError>
where
    F: Fn(&DVector<f64>) -> Result<f64, GmError>,
{
    if !(step.is_finite() && step > 0.0) {
        return Err(GmError::OracleFailure("step must be positive and finite"));
    }
    let mut grad = DVector::zeros(point.len());
    let mut probe = point.clone();
    for i in 0..point.len() {
        let x = point[i];
        probe[i] = x + step;
        let f_plus = f(&probe)?;
        probe[i] = x - step;
        let f_minus = f(&probe)?;
        probe[i] = x;
        let g = (f_plus - f_minus) / (2.0 * step);
        if !g.is_finite() {
            return Err(GmError::OracleFailure("non-finite difference quotient"));
        }
        grad[i] = g;
    }
    Ok(grad)
}
