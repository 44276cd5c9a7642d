//! Detecting spectrum broadcast structure on a joint system∪environment
//! channel and the automatic certification it licenses.
//!
//!     cargo run --example spectrum_broadcasting

use darwin_certify::bounds::projective_bound;
use darwin_certify::channels::{depolarize, is_ssb_form, MeasureAndPrepareChannel};
use darwin_certify::discrimination::eta;
use darwin_certify::qmath::{CMatrix, DensityMatrix, Povm};

fn joint_channel(noise: f64) -> MeasureAndPrepareChannel {
    // Prepared states |k⟩⟨k| ⊗ D(|k⟩⟨k|) ⊗ D(|k⟩⟨k|): system copy plus two
    // environment qubits, optionally blurred.
    let prepared = (0..2)
        .map(|k| {
            let sys = DensityMatrix::basis_state(2, k);
            let env = depolarize(&DensityMatrix::basis_state(2, k), noise);
            sys.tensor(&env).tensor(&env)
        })
        .collect();
    MeasureAndPrepareChannel::new(Povm::computational(2), prepared).unwrap()
}

fn main() {
    let basis = CMatrix::identity(2);

    for noise in [0.0, 0.15] {
        let joint = joint_channel(noise);
        let report = is_ssb_form(&basis, &joint, &[2, 2], 1e-8).unwrap();
        println!(
            "noise = {noise}: spectrum broadcast structure = {}",
            report.is_ssb
        );
        for v in &report.violations {
            println!("  violation: {}", v.description);
        }
        if report.is_ssb {
            println!("  p_hat from the closed form: {}", projective_bound(2));
            for (j, dim) in [2usize, 2, 2].iter().enumerate() {
                let bob = joint.reduce_to_bob(&[2, 2, 2], j).unwrap();
                let result = eta(&bob, 1e-9).unwrap();
                println!(
                    "  observer {j} (dim {dim}): eta = {:.9} ± {:.1e}",
                    result.eta, result.gap
                );
            }
        }
        println!();
    }
}
