//! Inverse design of a perfect W-state lattice.
//!
//! Given the asymmetry parameter `s`, work out the bond ratio, the
//! normalized and physical generation lengths, the guide separations for
//! a pair of fabrication fit parameters, and the first few recurrence
//! positions with their compensating phases.
//!
//! Run with:
//! ```sh
//! cargo run --example design_lattice
//! ```

use perfectw::design::solve;

fn main() -> perfectw::Result<()> {
    let k = 0.37; // cm⁻¹, characteristic coupling of laser-written guides
    let (d0, d1) = (8.0, 24.0); // µm, separation-law fit parameters

    for s in [1.0, 2.0, 3.0] {
        let sol = solve(s, k, Some((d0, d1)), 4)?;
        println!("s = {s}");
        println!("  bond weights      (γ₁, γ₂) = (1, {:.6})", sol.gamma);
        println!("  generation length kz* = {:.6}  →  z* = {:.4} cm", sol.kz_star, sol.z_star_cm);
        if let Some(seps) = &sol.separations {
            println!("  guide separations d₁ = {:.3} µm, d₂ = {:.3} µm", seps[0], seps[1]);
        }
        let target: Vec<String> = (0..3)
            .map(|j| format!("{:.4}", sol.target.amplitude(j).re))
            .collect();
        println!("  target amplitudes ({})", target.join(", "));
        println!("  recurrences (kz, z cm, middle-guide phase):");
        for r in &sol.recurrence {
            println!(
                "    kz = {:.6}   z = {:.4} cm   φ₂ = {:+.4} rad",
                r.kz, r.z_cm, r.phase_shift
            );
        }
        println!();
    }
    Ok(())
}
