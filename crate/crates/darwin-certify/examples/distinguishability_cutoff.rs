//! The cut-off P̂ = 1 − ½·max_ρ min_k Tr[E_k ρ] for several pointer POVMs,
//! with its certified maximin bracket and dual weights.
//!
//!     cargo run --example distinguishability_cutoff

use darwin_certify::bounds::{distinguishability_bound, projective_bound};
use darwin_certify::qmath::{CMatrix, HermitianMatrix, Povm, C64};

fn main() {
    println!("rank-1 projective bases: p_hat = 1 - 1/(2d)");
    for d in 2..=6 {
        let cutoff = distinguishability_bound(&Povm::computational(d), 1e-8).unwrap();
        println!(
            "  d = {d}: p_hat = {:.9} (closed form {:.9}, gap {:.1e})",
            cutoff.p_hat,
            projective_bound(d),
            cutoff.gap
        );
    }

    // A smeared two-outcome pointer: the maximin flattens at 1/2.
    let e0 = HermitianMatrix::new(CMatrix::from_fn(2, |i, j| {
        if i == j {
            C64::new(if i == 0 { 0.8 } else { 0.2 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
    .unwrap();
    let e1 = HermitianMatrix::identity(2).sub(&e0);
    let pointer = Povm::new(vec![e0, e1]).unwrap();
    let cutoff = distinguishability_bound(&pointer, 1e-9).unwrap();
    println!("\nsmeared two-outcome qubit pointer (0.8/0.2 mixture):");
    println!("  maximin          {:.9}", cutoff.maximin);
    println!("  p_hat            {:.9}", cutoff.p_hat);
    println!("  dual weights     {:?}", cutoff.optimal_weights);
    println!(
        "  witness diag     [{:.6}, {:.6}]",
        cutoff.witness_state.matrix()[(0, 0)].re,
        cutoff.witness_state.matrix()[(1, 1)].re
    );
}
