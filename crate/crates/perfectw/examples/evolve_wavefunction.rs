//! Single-photon propagation through the designed lattice.
//!
//! Injects the photon into the middle guide of the `s = 1` array and
//! tracks the per-guide probabilities up to the generation length, where
//! they settle at (1/4, 1/4, 1/2). A middle-guide phase shifter then
//! turns the evolved state into the zero-phase perfect W-state.
//!
//! Run with:
//! ```sh
//! cargo run --example evolve_wavefunction
//! ```

use perfectw::design::{compensating_phase, design_lattice, kz_for, target_state, WTarget};
use perfectw::lattice::{apply_phase_shift, evolve, ModeState};

fn main() -> perfectw::Result<()> {
    let s = 1.0;
    let k = 0.37; // cm⁻¹
    let m = design_lattice(s)?;
    let kz_star = kz_for(s)?;
    let z_star = kz_star / k;
    let psi0 = ModeState::injection(3, 1)?;

    println!("propagation of a middle-guide injection (s = 1, k = {k} cm⁻¹)");
    println!("{:>8} {:>8} {:>8} {:>8} {:>8}", "z_cm", "kz", "p1", "p2", "p3");
    let steps = 12;
    for i in 0..=steps {
        let z = z_star * i as f64 / steps as f64;
        let p = evolve(&psi0, &m, k * z)?.probabilities();
        println!(
            "{:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            z,
            k * z,
            p[0],
            p[1],
            p[2]
        );
    }

    let generated = evolve(&psi0, &m, kz_star)?;
    println!("\nstate at z* (before phase correction):");
    for j in 0..3 {
        let c = generated.amplitude(j);
        println!("  guide {}: {:+.4} {:+.4}i", j + 1, c.re, c.im);
    }

    let phi = compensating_phase(&generated)?;
    let corrected = apply_phase_shift(&generated, 1, phi)?;
    let target = target_state(&WTarget::new(s, 0.0, 0.0)?);
    let overlap = target.overlap(&corrected)?.norm_sqr();
    println!("\nmiddle-guide phase shift φ₂ = {phi:+.4} rad");
    println!("overlap with (|100⟩ + |010⟩ + √2|001⟩)/2:  |⟨W|ψ⟩|² = {overlap:.12}");
    Ok(())
}
