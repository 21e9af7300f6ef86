//! Independent oracles for the integration suites. Nothing here may call
//! into the implementation paths it checks: the matrix exponential is a
//! truncated Taylor series with scaling and squaring, and the measurement
//! oracle expands states in the full 8-dimensional product basis through
//! explicit per-site basis-change matrices.

// each test target compiles this module separately and uses a subset
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use perfectw::nonlocality::{Basis, Outcome};

/// `exp(-i z M)` by Taylor series after scaling by 2⁻¹², then 12
/// squarings.
///
/// Each squaring doubles accumulated rounding, so `s` squarings leave the
/// oracle with error near `2^s·ε`; `s = 12` keeps that around 1e-12, two
/// orders below the 1e-10 agreement this oracle certifies (`s = 20` would
/// itself drift to ~1e-10). Truncation is negligible: the scaled norm is
/// below 2e-3 here.
pub fn expm_taylor_oracle(m: &DMatrix<f64>, z: f64) -> DMatrix<C64> {
    let n = m.nrows();
    let squarings = 12;
    let scale = 2.0_f64.powi(-squarings);
    let a = m.map(|x| C64::new(0.0, -z * x * scale));
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut sum = DMatrix::<C64>::identity(n, n);
    for k in 1..=24 {
        term = (&term * &a) / C64::new(k as f64, 0.0);
        sum += &term;
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Random tridiagonal bond vector with entries in `[0, 2]` for a lattice
/// of `n` guides.
pub fn random_bonds<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n - 1).map(|_| rng.gen_range(0.0..=2.0)).collect()
}

fn site_matrix(basis: Basis, alpha: f64) -> DMatrix<f64> {
    let (sin, cos) = (0.5 * alpha).sin_cos();
    // row 0 = outcome -1 bra, row 1 = outcome +1 bra, over (|0⟩, |1⟩)
    match basis {
        Basis::Z => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
        Basis::K => DMatrix::from_row_slice(2, 2, &[-cos, sin, sin, cos]),
    }
}

/// Joint outcome probability by explicit 8×8 basis change
/// `T = T₁ ⊗ T₂ ⊗ T₃` applied to the full state vector.
pub fn joint_probability_oracle(
    amplitudes: &[C64; 8],
    bases: [Basis; 3],
    alpha: f64,
    outcomes: [Outcome; 3],
) -> f64 {
    let t = site_matrix(bases[0], alpha)
        .kronecker(&site_matrix(bases[1], alpha))
        .kronecker(&site_matrix(bases[2], alpha))
        .map(|x| C64::new(x, 0.0));
    let psi = DMatrix::from_column_slice(8, 1, amplitudes);
    let rotated = t * psi;
    let index = outcomes
        .iter()
        .fold(0usize, |acc, o| (acc << 1) | usize::from(*o == Outcome::Plus));
    rotated[(index, 0)].norm_sqr()
}

/// Random normalized 8-amplitude state.
pub fn random_qubit_amplitudes<R: Rng>(rng: &mut R) -> [C64; 8] {
    let mut amps = [C64::new(0.0, 0.0); 8];
    for a in amps.iter_mut() {
        *a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    amps
}

/// Random normalized 3-mode single-photon amplitudes.
pub fn random_mode_amplitudes<R: Rng>(rng: &mut R) -> Vec<C64> {
    let mut amps: Vec<C64> = (0..3)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    amps
}
