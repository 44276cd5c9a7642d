//! Finite environments: circuit simulation, diamond distance to the perfect
//! record, the l1-contextuality bound chain, and the environment-size bound.
//!
//!     cargo run --example finite_environment

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use darwin_certify::bounds::finite_env_deviation_bound;
use darwin_certify::channels::{make_broadcast, simulate_finite_env, BroadcastSpec, FiniteEnvSpec};
use darwin_certify::contextuality::contextuality_distance_bound;
use darwin_certify::qmath::{DensityMatrix, Povm, C64};

fn main() {
    let ideal = make_broadcast(&BroadcastSpec::symmetric(2, 1, 0.0)).unwrap();
    let preparations = vec![
        DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap(),
        DensityMatrix::basis_state(2, 0),
        DensityMatrix::maximally_mixed(2),
    ];
    let measurements = vec![Povm::computational(2)];

    println!("one retained qubit out of N = 3, ideal = perfect record");
    println!("angle        diamond      l1 bound     observed l1");
    for angle in [0.0, FRAC_PI_8, FRAC_PI_4, FRAC_PI_2] {
        let spec = FiniteEnvSpec::uniform(3, vec![0], angle);
        let choi = simulate_finite_env(&spec).unwrap();
        let deviation =
            contextuality_distance_bound(&choi, &ideal, &measurements, &preparations, 1e-8)
                .unwrap();
        println!(
            "{angle:.4}      {:.6}     {:.6}     {:.6}",
            deviation.diamond, deviation.bound, deviation.observed_l1
        );
    }

    println!("\nenvironment-size deviation bound at delta = 0.5, d_A = 2, t = 1:");
    for n in [10_000usize, 100_000, 1_000_000] {
        let bound = finite_env_deviation_bound(2, 1, n, 0.5).unwrap();
        println!("  N = {n:>9}: {bound:.6}");
    }
}
