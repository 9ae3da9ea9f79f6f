//! Variational free energy under the Laplace approximation and its analytic
//! gradients.
//!
//! With prediction errors ε_o = o - μ, ε_o' = o' - μ', ε_μ = μ' - β(μ_d - μ),
//! ε_μ' = μ'' + βμ' and precisions Π_i, the free energy is
//!
//!   F = ½ Σ_i (ε_iᵀ Π_i ε_i - ln det Π_i),  i ∈ {o, o', μ, μ'},
//!
//! where the state-independent constant is dropped. Estimation, control and
//! hyperparameter learning all descend this one scalar, so the gradients here
//! are the load-bearing math of the whole workspace. Each of them is checked
//! against [`crate::fd::fd_oracle`] rather than against any closed-form
//! expectation.

use nalgebra::DVector;

use crate::error::GmError;
use crate::matrix::{PrecisionSet, TemporalScale};
use crate::types::{
    BeliefGradient, ErrorSet, GeneralizedBelief, GeneralizedObservation, PrecisionGradient,
    Target,
};

fn check_dims(
    n: usize,
    got: usize,
    context: &'static str,
) -> Result<(), GmError> {
    if n != got {
        return Err(GmError::DimensionMismatch {
            context,
            expected: n,
            got,
        });
    }
    Ok(())
}

/// The four prediction errors at the current belief.
///
/// β enters as a matrix product, so its units (1/s) carry through to the
/// dynamics errors regardless of dimension.
pub fn compute_errors(
    belief: &GeneralizedBelief,
    obs: &GeneralizedObservation,
    target: &Target,
    beta: &TemporalScale,
) -> Result<ErrorSet, GmError> {
    let n = belief.dim();
    check_dims(n, obs.dim(), "observation vs belief")?;
    check_dims(n, target.dim(), "target vs belief")?;
    check_dims(n, beta.dim(), "temporal scale vs belief")?;

    let eps_o = &obs.o - &belief.mu;
    let eps_op = &obs.o_p - &belief.mu_p;
    let eps_mu = &belief.mu_p - beta.mul_vec(&(&target.mu_d - &belief.mu));
    let eps_mup = &belief.mu_pp + beta.mul_vec(&belief.mu_p);
    Ok(ErrorSet {
        eps_o,
        eps_op,
        eps_mu,
        eps_mup,
    })
}

/// F = ½ Σ_i (ε_iᵀ Π_i ε_i - ln det Π_i).
pub fn free_energy(errors: &ErrorSet, precisions: &PrecisionSet) -> Result<f64, GmError> {
    let n = errors.dim();
    check_dims(n, precisions.dim(), "precision set vs errors")?;

    let blocks = [
        (&errors.eps_o, &precisions.pi_o),
        (&errors.eps_op, &precisions.pi_op),
        (&errors.eps_mu, &precisions.pi_mu),
        (&errors.eps_mup, &precisions.pi_mup),
    ];
    let mut f = 0.0;
    for (eps, pi) in blocks {
        f += 0.5 * (pi.quad_form(eps) - pi.log_det()?);
    }
    Ok(f)
}

/// Gradient of F with respect to the three belief orders:
///
///   ∂F/∂μ   = -Π_o ε_o + β Π_μ ε_μ
///   ∂F/∂μ'  = -Π_o' ε_o' + Π_μ ε_μ + β Π_μ' ε_μ'
///   ∂F/∂μ'' = Π_μ' ε_μ'
///
/// μ'' enters F only through ε_μ', which is why its gradient has a single
/// term.
pub fn grad_belief(
    errors: &ErrorSet,
    precisions: &PrecisionSet,
    beta: &TemporalScale,
) -> Result<BeliefGradient, GmError> {
    let n = errors.dim();
    check_dims(n, precisions.dim(), "precision set vs errors")?;
    check_dims(n, beta.dim(), "temporal scale vs errors")?;

    let pi_o_eps = precisions.pi_o.mul_vec(&errors.eps_o);
    let pi_op_eps = precisions.pi_op.mul_vec(&errors.eps_op);
    let pi_mu_eps = precisions.pi_mu.mul_vec(&errors.eps_mu);
    let pi_mup_eps = precisions.pi_mup.mul_vec(&errors.eps_mup);

    Ok(BeliefGradient {
        d_mu: beta.mul_vec(&pi_mu_eps) - &pi_o_eps,
        d_mu_p: &pi_mu_eps + beta.mul_vec(&pi_mup_eps) - pi_op_eps,
        d_mu_pp: pi_mup_eps,
    })
}

/// Gradient of F with respect to each precision block:
///
///   ∂F/∂Π_i = ½ (ε_i ε_iᵀ - Π_i⁻¹)
///
/// Zero exactly when Π_i⁻¹ equals the instantaneous outer product ε_i ε_iᵀ,
/// which is the fixed point precision learning relaxes toward.
pub fn grad_precision(
    errors: &ErrorSet,
    precisions: &PrecisionSet,
) -> Result<PrecisionGradient, GmError> {
    let n = errors.dim();
    check_dims(n, precisions.dim(), "precision set vs errors")?;

    let block = |eps: &DVector<f64>, pi: &crate::matrix::PrecisionMatrix| {
        pi.inverse()
            .map(|inv| (eps * eps.transpose() - inv.to_dense()) * 0.5)
    };
    Ok(PrecisionGradient {
        d_pi_o: block(&errors.eps_o, &precisions.pi_o)?,
        d_pi_op: block(&errors.eps_op, &precisions.pi_op)?,
        d_pi_mu: block(&errors.eps_mu, &precisions.pi_mu)?,
        d_pi_mup: block(&errors.eps_mup, &precisions.pi_mup)?,
    })
}

/// Gradient of F with respect to the temporal-scale diagonal:
///
///   ∂F/∂β_j = -[Π_μ ε_μ]_j (μ_d - μ)_j + [Π_μ' ε_μ']_j μ'_j
///
/// Vanishes at the target with zero velocity, so a converged run stops
/// adapting β.
pub fn grad_beta(
    errors: &ErrorSet,
    precisions: &PrecisionSet,
    belief: &GeneralizedBelief,
    target: &Target,
) -> Result<DVector<f64>, GmError> {
    let n = errors.dim();
    check_dims(n, precisions.dim(), "precision set vs errors")?;
    check_dims(n, belief.dim(), "belief vs errors")?;
    check_dims(n, target.dim(), "target vs errors")?;

    let pi_mu_eps = precisions.pi_mu.mul_vec(&errors.eps_mu);
    let pi_mup_eps = precisions.pi_mup.mul_vec(&errors.eps_mup);
    let to_target = &target.mu_d - &belief.mu;
    Ok(pi_mup_eps.component_mul(&belief.mu_p) - pi_mu_eps.component_mul(&to_target))
}
