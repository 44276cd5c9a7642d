//! Minimum-error discrimination: the certified solver against the closed
//! two-state formula and the square-root measurement baseline.
//!
//!     cargo run --example state_discrimination

use darwin_certify::discrimination::{helstrom_two, p_guess, pgm, DiscriminationInstance};
use darwin_certify::qmath::{DensityMatrix, C64};

fn main() {
    let zero = DensityMatrix::basis_state(2, 0);
    let plus = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    let spin_y = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();

    // Two states: solver vs closed form.
    let inst =
        DiscriminationInstance::new(vec![0.5, 0.5], vec![zero.clone(), plus.clone()]).unwrap();
    let result = p_guess(&inst, 1e-10);
    let closed = helstrom_two(0.5, &zero, 0.5, &plus).unwrap();
    println!("|0⟩ vs |+⟩ at equal priors:");
    println!(
        "  solver value   {:.12} (certificate gap {:.2e})",
        result.value, result.gap
    );
    println!("  closed form    {closed:.12}");
    println!("  dual trace     {:.12}", result.dual.trace());

    // Three symmetric states: solver with dual certificate, square-root
    // measurement as a feasible lower baseline.
    let inst = DiscriminationInstance::new(
        vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        vec![zero, plus, spin_y],
    )
    .unwrap();
    let result = p_guess(&inst, 1e-10);
    let (pgm_value, _) = pgm(&inst).unwrap();
    println!("\nthree mutually unbiased pure states at uniform priors:");
    println!("  optimal        {:.12} ± {:.2e}", result.value, result.gap);
    println!("  square-root    {pgm_value:.12}");
    println!(
        "  optimal POVM effects have traces {:?}",
        result
            .povm
            .effects()
            .iter()
            .map(|e| (e.trace() * 1e6).round() / 1e6)
            .collect::<Vec<_>>()
    );
}
