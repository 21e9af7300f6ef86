//! Robustness of the generation scheme against photon loss.
//!
//! Integrates the Lindblad master equation up to the generation length
//! for a grid of loss ratios β/k and reports the Uhlmann fidelity against
//! the lossless perfect W-state. The single-excitation block decays as
//! e^(-2βz), so the fidelity falls slowly and stays high for realistic
//! loss (β/k ≈ 0.01 for ~0.1 dB/cm guides).
//!
//! Run with:
//! ```sh
//! cargo run --example loss_sweep
//! ```

use perfectw::loss::sweep_fidelity_vs_loss;

fn main() -> perfectw::Result<()> {
    let k = 0.37; // cm⁻¹
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 100.0).collect();

    println!("{:>10} {:>12} {:>12}", "beta/k", "F (s=1)", "F (s=2)");
    let sweep1 = sweep_fidelity_vs_loss(1.0, &grid, k)?;
    let sweep2 = sweep_fidelity_vs_loss(2.0, &grid, k)?;
    for (&(ratio, f1), &(_, f2)) in sweep1.iter().zip(sweep2.iter()) {
        println!("{ratio:>10.2} {f1:>12.6} {f2:>12.6}");
    }

    println!(
        "\nat β/k = 0.1 the fidelity is still {:.3} (s=1) / {:.3} (s=2)",
        sweep1.last().unwrap().1,
        sweep2.last().unwrap().1
    );
    Ok(())
}
