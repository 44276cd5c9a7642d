//! Builds the explicit noncontextual ontological model for one observer of a
//! noisy broadcast and prints its exported document.
//!
//!     cargo run --example ontological_model

use darwin_certify::channels::{make_broadcast, BroadcastSpec};
use darwin_certify::ontology::{
    build_nc_model, check_context_respect, export_model, verify_reproduction,
};
use darwin_certify::qmath::{DensityMatrix, Povm, C64};

fn main() {
    let channel = make_broadcast(&BroadcastSpec::symmetric(2, 1, 0.2)).unwrap();

    // |+⟩ and |−⟩ share a pointer distribution: one equivalence class.
    let plus = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    let minus = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
    let preparations = vec![plus, minus, DensityMatrix::basis_state(2, 0)];
    let measurements = vec![Povm::computational(2)];

    let model = build_nc_model(&channel, &preparations, &measurements, 1e-8).unwrap();
    println!(
        "ontic space has {} labels; {} preparation classes, {} response rows",
        model.ontic_cardinality(),
        model.mu_table().len(),
        model.xi_table().len()
    );

    let replay =
        verify_reproduction(&model, &channel, &preparations, &measurements, 1e-10).unwrap();
    println!(
        "statistics replay: {} triples, max residual {:.2e}",
        replay.checked, replay.max_residual
    );
    let context = check_context_respect(&model, 1e-10);
    println!(
        "equivalence respect: {} operationally equal pairs, {} failures",
        context.pairs_checked,
        context.failures.len()
    );

    let doc = export_model(&model);
    println!(
        "\nexported model:\n{}",
        serde_json::to_string_pretty(&doc).unwrap()
    );
}
