//! End-to-end certification of the textbook case: a qubit pointer basis
//! broadcast perfectly to three observers.
//!
//!     cargo run --example perfect_broadcast

use darwin_certify::bounds::{classical_objectivity_verdict, distinguishability_bound};
use darwin_certify::channels::{make_broadcast, BroadcastSpec};
use darwin_certify::discrimination::eta;
use darwin_certify::ontology::{build_nc_model, verify_reproduction};
use darwin_certify::qmath::{DensityMatrix, Povm, C64};

fn main() {
    let t = 3;
    let channel = make_broadcast(&BroadcastSpec::symmetric(2, t, 0.0)).unwrap();
    let bob_dims = vec![2; t];

    // Worst-case distinguishability per observer.
    let mut etas = Vec::new();
    for j in 0..t {
        let bob = channel.reduce_to_bob(&bob_dims, j).unwrap();
        let result = eta(&bob, 1e-9).unwrap();
        println!(
            "observer {j}: eta = {:.12} (certified in [{:.12}, {:.12}])",
            result.eta, result.lower, result.upper
        );
        etas.push(result);
    }

    // Pointer cut-off and the verdict.
    let cutoff = distinguishability_bound(channel.pointer(), 1e-8).unwrap();
    println!(
        "cut-off p_hat = {:.12} (maximin {:.12}, gap {:.2e})",
        cutoff.p_hat, cutoff.maximin, cutoff.gap
    );
    let process_eta = etas.iter().map(|e| e.eta).fold(f64::INFINITY, f64::min);
    let verdict = classical_objectivity_verdict(process_eta, &cutoff, (1e-9, 1e-9));
    println!("verdict: {verdict}");

    // Each observer can explain their statistics with an ontological model.
    let preparations = vec![
        DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap(),
        DensityMatrix::basis_state(2, 0),
        DensityMatrix::maximally_mixed(2),
    ];
    let measurements = vec![Povm::computational(2)];
    for j in 0..t {
        let bob = channel.reduce_to_bob(&bob_dims, j).unwrap();
        let model = build_nc_model(&bob, &preparations, &measurements, 1e-8).unwrap();
        let check = verify_reproduction(&model, &bob, &preparations, &measurements, 1e-10).unwrap();
        println!(
            "observer {j}: model replays {} statistics with max residual {:.2e}",
            check.checked, check.max_residual
        );
    }
}
