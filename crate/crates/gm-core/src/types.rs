//! State containers for beliefs in generalised coordinates of motion.

use nalgebra::{DMatrix, DVector};

use crate::error::GmError;

fn check_all_finite(v: &DVector<f64>, context: &'static str) -> Result<(), GmError> {
    if v.iter().any(|x| !x.is_finite()) {
        Err(GmError::NonFinite { context })
    } else {
        Ok(())
    }
}

/// Belief over a latent state and its first two generalised motions
/// (position, velocity, acceleration estimates).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedBelief {
    pub mu: DVector<f64>,
    pub mu_p: DVector<f64>,
    pub mu_pp: DVector<f64>,
}

impl GeneralizedBelief {
    pub fn new(
        mu: DVector<f64>,
        mu_p: DVector<f64>,
        mu_pp: DVector<f64>,
    ) -> Result<Self, GmError> {
        let n = mu.len();
        if n == 0 {
            return Err(GmError::DimensionMismatch {
                context: "belief dimension",
                expected: 1,
                got: 0,
            });
        }
        for (v, context) in [(&mu_p, "mu_p"), (&mu_pp, "mu_pp")] {
            if v.len() != n {
                return Err(GmError::DimensionMismatch {
                    context,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        check_all_finite(&mu, "mu")?;
        check_all_finite(&mu_p, "mu_p")?;
        check_all_finite(&mu_pp, "mu_pp")?;
        Ok(GeneralizedBelief { mu, mu_p, mu_pp })
    }

    /// All orders zero.
    pub fn zeros(n: usize) -> Self {
        GeneralizedBelief {
            mu: DVector::zeros(n),
            mu_p: DVector::zeros(n),
            mu_pp: DVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn is_finite(&self) -> bool {
        self.mu.iter().all(|x| x.is_finite())
            && self.mu_p.iter().all(|x| x.is_finite())
            && self.mu_pp.iter().all(|x| x.is_finite())
    }
}

/// A position observation together with its observed velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedObservation {
    pub o: DVector<f64>,
    pub o_p: DVector<f64>,
}

impl GeneralizedObservation {
    pub fn new(o: DVector<f64>, o_p: DVector<f64>) -> Result<Self, GmError> {
        if o.len() != o_p.len() || o.is_empty() {
            return Err(GmError::DimensionMismatch {
                context: "observation orders",
                expected: o.len().max(1),
                got: o_p.len(),
            });
        }
        check_all_finite(&o, "o")?;
        check_all_finite(&o_p, "o_p")?;
        Ok(GeneralizedObservation { o, o_p })
    }

    pub fn dim(&self) -> usize {
        self.o.len()
    }
}

/// Desired latent state. The expected velocity at the target is zero, so no
/// higher orders are carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub mu_d: DVector<f64>,
}

impl Target {
    pub fn new(mu_d: DVector<f64>) -> Result<Self, GmError> {
        if mu_d.is_empty() {
            return Err(GmError::DimensionMismatch {
                context: "target dimension",
                expected: 1,
                got: 0,
            });
        }
        check_all_finite(&mu_d, "mu_d")?;
        Ok(Target { mu_d })
    }

    pub fn dim(&self) -> usize {
        self.mu_d.len()
    }
}

/// The four prediction errors of the generative model.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSet {
    /// o - μ
    pub eps_o: DVector<f64>,
    /// o' - μ'
    pub eps_op: DVector<f64>,
    /// μ' - β(μ_d - μ)
    pub eps_mu: DVector<f64>,
    /// μ'' + βμ'
    pub eps_mup: DVector<f64>,
}

impl ErrorSet {
    pub fn dim(&self) -> usize {
        self.eps_o.len()
    }
}

/// Free-energy gradient with respect to each belief order.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefGradient {
    pub d_mu: DVector<f64>,
    pub d_mu_p: DVector<f64>,
    pub d_mu_pp: DVector<f64>,
}

/// Free-energy gradient with respect to each precision block. Gradients are
/// dense even for diagonal precisions because εεᵀ has off-diagonal structure;
/// diagonal updates read only the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionGradient {
    pub d_pi_o: DMatrix<f64>,
    pub d_pi_op: DMatrix<f64>,
    pub d_pi_mu: DMatrix<f64>,
    pub d_pi_mup: DMatrix<f64>,
}
