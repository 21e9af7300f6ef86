//! Nonlocality of the perfect W-state without and with an inequality.
//!
//! At the Hardy angle (cos²(α/2) = √2·sin²(α/2)) the perfect W-state
//! satisfies a sometimes-always-never chain that no local-hidden-variable
//! assignment can reproduce:
//!
//!   sometimes  k₁ = k₂ = +1 with k₃ = -1 occurs,
//!   always     given k₂ = +1, k₃ = -1, a Z check at site 1 finds the photon,
//!   always     given k₁ = +1, k₃ = -1, a Z check at site 2 finds the photon,
//!   never      the photon is found at two sites at once.
//!
//! The same four probabilities assemble into a Bell-CH expression that
//! must be ≤ 0 locally but is positive here. Away from the Hardy angle
//! the veto events regain weight and the chain collapses.
//!
//! Run with:
//! ```sh
//! cargo run --example hardy_certificate
//! ```

use perfectw::design::{target_state, WTarget};
use perfectw::nonlocality::{
    alpha_star, hardy_certificate, hardy_ladder_report, QubitEmbedding, Rung, RungStatus,
};

fn show(name: &str, rung: Rung) {
    let status = match rung.status {
        RungStatus::Pass => "pass",
        RungStatus::Fail => "FAIL",
        RungStatus::Undefined => "undefined",
    };
    match rung.value {
        Some(v) => println!("  {name:<14} {v:>12.9}   [{status}]"),
        None => println!("  {name:<14} {:>12}   [{status}]", "-"),
    }
}

fn main() -> perfectw::Result<()> {
    let w = QubitEmbedding::from_mode_state(&target_state(&WTarget::new(1.0, 0.0, 0.0)?))?;

    for alpha in [alpha_star(), std::f64::consts::FRAC_PI_2] {
        let at_star = (alpha - alpha_star()).abs() < 1e-12;
        println!(
            "α = {alpha:.6} rad{}",
            if at_star { "  (the Hardy angle)" } else { "  (off the Hardy angle)" }
        );

        let ladder = hardy_ladder_report(&w, alpha)?;
        show("sometimes", ladder.sometimes);
        show("always site 1", ladder.always_site1);
        show("always site 2", ladder.always_site2);
        show("never", ladder.never);

        let cert = hardy_certificate(&w, alpha)?;
        println!("  Bell-CH lhs    {:>12.9}   violated: {}", cert.ch_lhs, cert.violated);
        println!(
            "  (p_hardy = {:.9}, vetoes = {:.2e}, {:.2e}, {:.2e})\n",
            cert.p_hardy, cert.p_veto1, cert.p_veto2, cert.p_veto3
        );
    }

    println!(
        "½·sin⁶(α*/2) = {:.9} — the closed-form Hardy probability at α*",
        0.5 * (0.5 * alpha_star()).sin().powi(6)
    );
    Ok(())
}
