//! Crate-level invariants: the randomized gradient battery and algebraic
//! properties of the free energy that hold for arbitrary inputs.

use gm_core::gradcheck::{run_battery, GradCheckConfig};
use gm_core::{free_energy, ErrorSet, PrecisionMatrix, PrecisionSet};
use nalgebra::DVector;
use proptest::prelude::*;

#[test]
fn gradient_battery_holds_over_the_full_randomized_sweep() {
    let report = run_battery(&GradCheckConfig::default()).expect("battery evaluations");
    assert!(
        report.passed(),
        "analytic gradients disagree with the finite-difference oracle:\n{}",
        report.breaches.join("\n")
    );
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
}

fn diag_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1..5.0f64, n)
}

proptest! {
    // With identity precisions the log-determinants vanish and F collapses
    // to half the summed squared error.
    #[test]
    fn identity_precisions_reduce_to_half_squared_error(
        eo in vec_strategy(3),
        eop in vec_strategy(3),
        emu in vec_strategy(3),
        emup in vec_strategy(3),
    ) {
        let errors = ErrorSet {
            eps_o: DVector::from_vec(eo),
            eps_op: DVector::from_vec(eop),
            eps_mu: DVector::from_vec(emu),
            eps_mup: DVector::from_vec(emup),
        };
        let precisions = PrecisionSet::uniform(3, 1.0, 1.0, 1.0, 1.0).unwrap();
        let f = free_energy(&errors, &precisions).unwrap();
        let expected = 0.5 * (errors.eps_o.norm_squared()
            + errors.eps_op.norm_squared()
            + errors.eps_mu.norm_squared()
            + errors.eps_mup.norm_squared());
        prop_assert!((f - expected).abs() < 1e-10);
    }

    // Relabeling coordinates consistently across errors and precisions must
    // not change the scalar.
    #[test]
    fn free_energy_is_permutation_invariant(
        eo in vec_strategy(4),
        eop in vec_strategy(4),
        emu in vec_strategy(4),
        emup in vec_strategy(4),
        d in diag_strategy(4),
        perm_seed in 0usize..24,
    ) {
        let perms = permutations_of_four();
        let perm = &perms[perm_seed];
        let apply = |v: &[f64]| DVector::from_iterator(4, perm.iter().map(|&i| v[i]));

        let set = |d: &DVector<f64>| PrecisionSet::new(
            PrecisionMatrix::diagonal(d.clone()),
            PrecisionMatrix::diagonal(d.clone()),
            PrecisionMatrix::diagonal(d.clone()),
            PrecisionMatrix::diagonal(d.clone()),
        ).unwrap();

        let base = ErrorSet {
            eps_o: DVector::from_vec(eo.clone()),
            eps_op: DVector::from_vec(eop.clone()),
            eps_mu: DVector::from_vec(emu.clone()),
            eps_mup: DVector::from_vec(emup.clone()),
        };
        let permuted = ErrorSet {
            eps_o: apply(&eo),
            eps_op: apply(&eop),
            eps_mu: apply(&emu),
            eps_mup: apply(&emup),
        };
        let diag = DVector::from_vec(d.clone());
        let f = free_energy(&base, &set(&diag)).unwrap();
        let f_perm = free_energy(&permuted, &set(&apply(&d))).unwrap();
        prop_assert!((f - f_perm).abs() < 1e-10);
    }
}

fn permutations_of_four() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}
