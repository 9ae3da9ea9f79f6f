//! Precision (inverse covariance) matrices and the temporal scale.
//!
//! Every experiment in practice runs with diagonal matrices, so the diagonal
//! representation is the default and stays O(n); a dense variant is kept for
//! generality. Precisions are stored and updated directly, never inverted
//! back into covariances.

use nalgebra::{DMatrix, DVector};

use crate::error::GmError;

/// Tolerance used when checking that a dense matrix is symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default lower bound for learned temporal-scale diagonals.
pub const DEFAULT_BETA_FLOOR: f64 = 0.5;

/// Symmetric positive-definite matrix, diagonal by default.
#[derive(Debug, Clone, PartialEq)]
pub enum PrecisionMatrix {
    Diagonal(DVector<f64>),
    Dense(DMatrix<f64>),
}

impl PrecisionMatrix {
    /// Diagonal matrix from its diagonal entries.
    pub fn diagonal(diag: DVector<f64>) -> Self {
        PrecisionMatrix::Diagonal(diag)
    }

    /// `scale * I` in the diagonal representation.
    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        PrecisionMatrix::Diagonal(DVector::from_element(n, scale))
    }

    pub fn dense(m: DMatrix<f64>) -> Self {
        PrecisionMatrix::Dense(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            PrecisionMatrix::Diagonal(d) => d.len(),
            PrecisionMatrix::Dense(m) => m.nrows(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, PrecisionMatrix::Diagonal(_))
    }

    /// Copy of the main diagonal.
    pub fn diag(&self) -> DVector<f64> {
        match self {
            PrecisionMatrix::Diagonal(d) => d.clone(),
            PrecisionMatrix::Dense(m) => m.diagonal(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            PrecisionMatrix::Diagonal(d) => DMatrix::from_diagonal(d),
            PrecisionMatrix::Dense(m) => m.clone(),
        }
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            PrecisionMatrix::Diagonal(d) => d.component_mul(v),
            PrecisionMatrix::Dense(m) => m * v,
        }
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&self.mul_vec(v))
    }

    /// Natural log of the determinant.
    ///
    /// Computed from the LU decomposition so that it stays a smooth function
    /// of every entry, which the finite-difference oracle relies on. A
    /// non-positive determinant means the log-determinant is undefined.
    pub fn log_det(&self) -> Result<f64, GmError> {
        match self {
            PrecisionMatrix::Diagonal(d) => {
                let mut acc = 0.0;
                for &x in d.iter() {
                    if x <= 0.0 {
                        return Err(GmError::NotPositiveDefinite {
                            context: "log_det of diagonal precision",
                        });
                    }
                    acc += x.ln();
                }
                Ok(acc)
            }
            PrecisionMatrix::Dense(m) => {
                let det = m.clone().lu().determinant();
                if det <= 0.0 || !det.is_finite() {
                    return Err(GmError::NotPositiveDefinite {
                        context: "log_det of dense precision",
                    });
                }
                Ok(det.ln())
            }
        }
    }

    /// Inverse, in the same representation.
    pub fn inverse(&self) -> Result<PrecisionMatrix, GmError> {
        match self {
            PrecisionMatrix::Diagonal(d) => {
                if d.iter().any(|&x| x == 0.0) {
                    return Err(GmError::NotPositiveDefinite {
                        context: "inverse of diagonal precision",
                    });
                }
                Ok(PrecisionMatrix::Diagonal(d.map(|x| 1.0 / x)))
            }
            PrecisionMatrix::Dense(m) => m
                .clone()
                .try_inverse()
                .map(PrecisionMatrix::Dense)
                .ok_or(GmError::NotPositiveDefinite {
                    context: "inverse of dense precision",
                }),
        }
    }

    /// Check symmetry, positive definiteness and the diagonal floor.
    pub fn validate_spd(&self, context: &'static str, floor: f64) -> Result<(), GmError> {
        let diag = self.diag();
        for (i, &x) in diag.iter().enumerate() {
            if !x.is_finite() {
                return Err(GmError::NonFinite { context });
            }
            if x < floor {
                return Err(GmError::BelowFloor {
                    context,
                    index: i,
                    value: x,
                    floor,
                });
            }
        }
        match self {
            PrecisionMatrix::Diagonal(d) => {
                // Positive diagonal is sufficient for a diagonal matrix.
                if d.iter().any(|&x| x <= 0.0) {
                    return Err(GmError::NotPositiveDefinite { context });
                }
            }
            PrecisionMatrix::Dense(m) => {
                if m.iter().any(|x| !x.is_finite()) {
                    return Err(GmError::NonFinite { context });
                }
                let max_asym = (m - m.transpose()).amax();
                if max_asym > SYMMETRY_TOL {
                    return Err(GmError::NotSymmetric {
                        context,
                        tol: SYMMETRY_TOL,
                    });
                }
                if m.clone().cholesky().is_none() {
                    return Err(GmError::NotPositiveDefinite { context });
                }
            }
        }
        Ok(())
    }

    /// Re-symmetrise and clamp the spectrum from below.
    ///
    /// For the diagonal representation this is an elementwise max. A dense
    /// matrix is replaced by ½(M + Mᵀ) with its eigenvalues floored, which
    /// keeps gradient steps on learned precisions positive definite.
    pub fn reconditioned(&self, floor: f64) -> PrecisionMatrix {
        match self {
            PrecisionMatrix::Diagonal(d) => PrecisionMatrix::Diagonal(d.map(|x| x.max(floor))),
            PrecisionMatrix::Dense(m) => {
                let sym = (m + m.transpose()) * 0.5;
                let mut eig = sym.symmetric_eigen();
                for ev in eig.eigenvalues.iter_mut() {
                    *ev = ev.max(floor);
                }
                PrecisionMatrix::Dense(eig.recompose())
            }
        }
    }

    /// `M - scale * G`, staying diagonal when self is diagonal (the update is
    /// then restricted to the diagonal of `G`).
    pub fn add_scaled_dense(&self, g: &DMatrix<f64>, scale: f64) -> PrecisionMatrix {
        match self {
            PrecisionMatrix::Diagonal(d) => {
                PrecisionMatrix::Diagonal(d + g.diagonal() * scale)
            }
            PrecisionMatrix::Dense(m) => PrecisionMatrix::Dense(m + g * scale),
        }
    }
}

/// The four precision blocks of the generative model, indexed by the error
/// term they weight: observations, observation velocities, and the first- and
/// second-order dynamics priors.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionSet {
    pub pi_o: PrecisionMatrix,
    pub pi_op: PrecisionMatrix,
    pub pi_mu: PrecisionMatrix,
    pub pi_mup: PrecisionMatrix,
}

impl PrecisionSet {
    pub fn new(
        pi_o: PrecisionMatrix,
        pi_op: PrecisionMatrix,
        pi_mu: PrecisionMatrix,
        pi_mup: PrecisionMatrix,
    ) -> Result<Self, GmError> {
        let n = pi_o.dim();
        for (m, context) in [
            (&pi_o, "pi_o"),
            (&pi_op, "pi_op"),
            (&pi_mu, "pi_mu"),
            (&pi_mup, "pi_mup"),
        ] {
            if m.dim() != n {
                return Err(GmError::DimensionMismatch {
                    context: "precision set blocks",
                    expected: n,
                    got: m.dim(),
                });
            }
            m.validate_spd(context, 0.0)?;
        }
        Ok(PrecisionSet {
            pi_o,
            pi_op,
            pi_mu,
            pi_mup,
        })
    }

    /// All four blocks as `scale * I`, the configuration every experiment
    /// starts from.
    pub fn uniform(n: usize, s_o: f64, s_op: f64, s_mu: f64, s_mup: f64) -> Result<Self, GmError> {
        PrecisionSet::new(
            PrecisionMatrix::scaled_identity(n, s_o),
            PrecisionMatrix::scaled_identity(n, s_op),
            PrecisionMatrix::scaled_identity(n, s_mu),
            PrecisionMatrix::scaled_identity(n, s_mup),
        )
    }

    pub fn dim(&self) -> usize {
        self.pi_o.dim()
    }
}

/// Diagonal temporal scale β = τ⁻¹ with a configurable lower bound.
///
/// β couples the dynamics prior to the target: large β means fast expected
/// convergence (aggressive pull of beliefs toward the target), small β means
/// the model expects slow drift and the estimator behaves like a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalScale {
    diag: DVector<f64>,
    floor: f64,
}

impl TemporalScale {
    pub fn new(diag: DVector<f64>, floor: f64) -> Result<Self, GmError> {
        if !floor.is_finite() || floor < 0.0 {
            return Err(GmError::NonFinite {
                context: "temporal scale floor",
            });
        }
        for (i, &x) in diag.iter().enumerate() {
            if !x.is_finite() {
                return Err(GmError::NonFinite {
                    context: "temporal scale diagonal",
                });
            }
            if x < floor {
                return Err(GmError::BelowFloor {
                    context: "temporal scale diagonal",
                    index: i,
                    value: x,
                    floor,
                });
            }
        }
        Ok(TemporalScale { diag, floor })
    }

    /// `value * I` with the default floor of 0.5.
    pub fn uniform(n: usize, value: f64) -> Result<Self, GmError> {
        TemporalScale::new(DVector::from_element(n, value), DEFAULT_BETA_FLOOR)
    }

    /// `value * I` with an explicit floor, for diagnostic modes that run
    /// below the default bound.
    pub fn uniform_with_floor(n: usize, value: f64, floor: f64) -> Result<Self, GmError> {
        TemporalScale::new(DVector::from_element(n, value), floor)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &DVector<f64> {
        &self.diag
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// `β v` (componentwise, since β is diagonal).
    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        self.diag.component_mul(v)
    }

    /// Replace the diagonal, clamping every entry to the floor.
    pub fn with_diag_clamped(&self, diag: DVector<f64>) -> TemporalScale {
        TemporalScale {
            diag: diag.map(|x| x.max(self.floor)),
            floor: self.floor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_log_det_matches_dense() {
        let d = DVector::from_vec(vec![0.5, 2.0, 3.0]);
        let diag = PrecisionMatrix::diagonal(d.clone());
        let dense = PrecisionMatrix::dense(DMatrix::from_diagonal(&d));
        assert_relative_eq!(
            diag.log_det().unwrap(),
            dense.log_det().unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_det_rejects_non_positive_diagonal() {
        let m = PrecisionMatrix::diagonal(DVector::from_vec(vec![1.0, -0.5]));
        assert!(m.log_det().is_err());
    }

    #[test]
    fn validate_rejects_asymmetric_dense() {
        let m = PrecisionMatrix::dense(DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.1, 1.0]));
        assert!(matches!(
            m.validate_spd("test", 0.0),
            Err(GmError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn reconditioned_floors_dense_spectrum() {
        // Symmetric with eigenvalues 3 and -1; flooring at 0.1 must make it PD.
        let m = PrecisionMatrix::dense(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        let fixed = m.reconditioned(0.1);
        fixed.validate_spd("reconditioned", 0.0).unwrap();
        let eig = fixed.to_dense().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&ev| ev >= 0.1 - 1e-12));
    }

    #[test]
    fn temporal_scale_enforces_floor_at_construction() {
        let err = TemporalScale::uniform(2, 0.3);
        assert!(matches!(err, Err(GmError::BelowFloor { .. })));
        let ok = TemporalScale::uniform_with_floor(2, 0.3, 0.0).unwrap();
        assert_eq!(ok.diag()[0], 0.3);
    }

    #[test]
    fn clamped_update_never_crosses_floor() {
        let beta = TemporalScale::uniform(3, 1.0).unwrap();
        let stepped = beta.with_diag_clamped(DVector::from_vec(vec![0.9, 0.1, -2.0]));
        assert_eq!(stepped.diag().as_slice(), &[0.9, 0.5, 0.5]);
    }
}
