//! Inverse design: from the asymmetry parameter `s` to the lattice that
//! generates the corresponding perfect W-state.
//!
//! For three guides with bond weights `(γ₁, γ₂) = (1, γ)` and the photon
//! injected into the middle guide, the evolved amplitudes are
//! `c₂ = cos(μkz)`, `c₁ = -i sin(μkz)/μ`, `c₃ = -i γ sin(μkz)/μ` with
//! `μ = √(1+γ²)`. Matching `|c_j|²` against the target magnitudes
//! `(1, s, s+1)/(2+2s)` fixes `γ = √(s+1)` and the first generation length
//! `kz* = arctan(√((1+γ²)/s))/√(1+γ²)`.
//!
//! The per-`s` bond-weight laws `γ_j = √j`, `√(2j-1)`, `√(3j-2)` all reduce
//! to `(1, √(s+1))` on three guides, which is the convention used here for
//! every real `s > 0`.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{
    apply_phase_shift, build_coupling_matrix, evolve, CouplingMatrix, CouplingSpec, ModeState,
};

/// Absolute tolerance of the bisection root solves on `kz`.
const ROOT_TOL: f64 = 1e-12;

/// Grid step of the recurrence scan (in `kz`).
const SCAN_STEP: f64 = 1e-4;

/// Target perfect W-state, parameterized by the asymmetry `s` and the two
/// mode phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WTarget {
    s: f64,
    phi1: f64,
    phi2: f64,
}

impl WTarget {
    pub fn new(s: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::invalid("s", format!("asymmetry must be positive, got {s}")));
        }
        if !phi1.is_finite() || !phi2.is_finite() {
            return Err(Error::invalid("phi", "phases must be finite"));
        }
        Ok(WTarget { s, phi1, phi2 })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }
}

/// A recurrence of the target state along the lattice, together with the
/// middle-guide phase shift that turns it into the zero-phase W-state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrencePoint {
    /// Normalized position.
    pub kz: f64,
    /// Physical position in cm for the design's `k`.
    pub z_cm: f64,
    /// Compensating phase on the middle guide, in (-π, π].
    pub phase_shift: f64,
}

/// Complete solution of the inverse problem for one `s`.
#[derive(Debug, Clone)]
pub struct DesignSolution {
    pub s: f64,
    /// Bond ratio γ = γ₂ with γ₁ = 1.
    pub gamma: f64,
    /// First generation length, dimensionless.
    pub kz_star: f64,
    /// Physical generation length in cm.
    pub z_star_cm: f64,
    /// Guide separations `d_j = d₁ - d₀·ln γ_j` when fit parameters were given.
    pub separations: Option<Vec<f64>>,
    /// First few recurrences of the state (the first entry is `kz_star`).
    pub recurrence: Vec<RecurrencePoint>,
    /// The zero-phase target state `(1, √s, √(s+1))/√(2+2s)`.
    pub target: ModeState,
}

/// Bond ratio `γ = √(s+1)` for the three-guide lattice.
pub fn gamma_for(s: f64) -> Result<f64> {
    if s <= 0.0 || !s.is_finite() {
        return Err(Error::invalid("s", format!("asymmetry must be positive, got {s}")));
    }
    Ok((s + 1.0).sqrt())
}

/// Closed-form first generation length
/// `kz* = arctan(√((1+γ²)/s)) / √(1+γ²)`.
pub fn kz_for(s: f64) -> Result<f64> {
    let gamma = gamma_for(s)?;
    let mu_sq = 1.0 + gamma * gamma;
    Ok((mu_sq / s).sqrt().atan() / mu_sq.sqrt())
}

/// The designed unit-`k` lattice `(γ₁, γ₂) = (1, √(s+1))`.
pub fn design_lattice(s: f64) -> Result<CouplingMatrix> {
    let gamma = gamma_for(s)?;
    let spec = CouplingSpec::new(3, vec![1.0, gamma], 1.0)?;
    Ok(build_coupling_matrix(&spec))
}

fn center_probability(m: &CouplingMatrix, kz: f64) -> Result<f64> {
    let psi0 = ModeState::injection(3, 1)?;
    Ok(evolve(&psi0, m, kz)?.probabilities()[1])
}

/// Smallest `kz > 0` at which the center-injection probabilities reach the
/// target magnitudes, found by bisection on `|c₂(kz)|² = s/(2+2s)` inside
/// the bracket `(0, π/(2√(1+γ²)))` using the numeric propagator.
///
/// Independent of [`kz_for`]; the two must agree to 1e-9.
pub fn kz_numeric(s: f64) -> Result<f64> {
    let gamma = gamma_for(s)?;
    let m = design_lattice(s)?;
    let target = s / (2.0 + 2.0 * s);
    let mut lo = 0.0_f64;
    let mut hi = 0.5 * PI / (1.0 + gamma * gamma).sqrt();
    let g_lo = 1.0 - target;
    let g_hi = center_probability(&m, hi)? - target;
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::numeric(
            "bisection bracket failed for the generation length",
            g_hi,
        ));
    }
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if center_probability(&m, mid)? - target > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Converts a normalized length to centimetres: `z = kz / k`.
pub fn physical_length(kz: f64, k: f64) -> Result<f64> {
    if k <= 0.0 || !k.is_finite() {
        return Err(Error::invalid("k", format!("coupling strength must be positive, got {k}")));
    }
    Ok(kz / k)
}

/// Guide separations `d_j = d₁ - d₀·ln γ_j` for the two bonds of the
/// designed lattice (natural logarithm; `d₀`, `d₁` are fabrication fit
/// parameters in the same units as the result).
pub fn separations(s: f64, d0: f64, d1: f64) -> Result<Vec<f64>> {
    if d0 <= 0.0 || !d0.is_finite() {
        return Err(Error::invalid("d0", format!("fit parameter must be positive, got {d0}")));
    }
    if d1 <= 0.0 || !d1.is_finite() {
        return Err(Error::invalid("d1", format!("fit parameter must be positive, got {d1}")));
    }
    let gamma = gamma_for(s)?;
    Ok(vec![d1, d1 - d0 * gamma.ln()])
}

/// Amplitudes `(1, √s·e^{iΦ₁}, √(s+1)·e^{iΦ₂}) / √(2+2s)`.
pub fn target_state(t: &WTarget) -> ModeState {
    let norm = (2.0 + 2.0 * t.s).sqrt();
    let amps = vec![
        C64::new(1.0 / norm, 0.0),
        (C64::i() * t.phi1).exp() * t.s.sqrt() / norm,
        (C64::i() * t.phi2).exp() * (t.s + 1.0).sqrt() / norm,
    ];
    ModeState::new(amps).expect("target amplitudes are normalized by construction")
}

/// First `count` positions `kz > 0` where the center-injection
/// probabilities recur to the target magnitudes (amplitude signs may
/// differ; the compensating phase restores them).
///
/// `s = 1` uses the closed-form roots `√3·kz ∈ {π/3, 2π/3, 4π/3, 5π/3} + 2πm`;
/// other `s` are found by a grid scan polished with bisection.
pub fn recurrence_positions(s: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("count", "need at least one recurrence"));
    }
    gamma_for(s)?;
    if (s - 1.0).abs() < 1e-14 {
        let r3 = 3.0_f64.sqrt();
        let base = [PI / 3.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0, 5.0 * PI / 3.0];
        let mut out = Vec::with_capacity(count);
        let mut period = 0;
        'fill: loop {
            for q in base {
                out.push((q + 2.0 * PI * period as f64) / r3);
                if out.len() == count {
                    break 'fill;
                }
            }
            period += 1;
        }
        return Ok(out);
    }
    scan_recurrences(s, count)
}

/// Grid scan of `|c₂(kz)|² - s/(2+2s)` with bisection polish. The scan
/// reuses one eigendecomposition of the design lattice, so each probe is a
/// three-term phase sum rather than a fresh diagonalization.
fn scan_recurrences(s: f64, count: usize) -> Result<Vec<f64>> {
    let m = design_lattice(s)?;
    let eig = SymmetricEigen::try_new(m.entries().clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numeric("symmetric eigensolver did not converge", f64::NAN))?;
    // |c₂(kz)|² for center injection from M = VΛVᵀ
    let weights: Vec<f64> = (0..3).map(|i| eig.eigenvectors[(1, i)].powi(2)).collect();
    let lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let c2 = |kz: f64| -> f64 {
        let mut a = C64::new(0.0, 0.0);
        for i in 0..3 {
            a += weights[i] * (-C64::i() * lambdas[i] * kz).exp();
        }
        a.norm_sqr()
    };
    let target = s / (2.0 + 2.0 * s);
    let g = |kz: f64| c2(kz) - target;

    let mut roots = Vec::with_capacity(count);
    let mut kz = SCAN_STEP;
    let mut prev = g(kz);
    // four recurrences per oscillation period; cap the scan well past the
    // window that must contain `count` of them
    let mu = (2.0 + s).sqrt();
    let kz_max = (count as f64 / 4.0 + 2.0) * 2.0 * PI / mu;
    while roots.len() < count && kz < kz_max {
        let next_kz = kz + SCAN_STEP;
        let next = g(next_kz);
        if prev == 0.0 {
            roots.push(kz);
        } else if prev.signum() != next.signum() && next != 0.0 {
            let mut lo = kz;
            let mut hi = next_kz;
            let lo_sign = prev.signum();
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        kz = next_kz;
        prev = next;
    }
    if roots.len() < count {
        return Err(Error::numeric(
            format!("found only {} of {count} recurrences in the scan window", roots.len()),
            kz_max,
        ));
    }
    Ok(roots)
}

/// Middle-guide phase shift that aligns `c₂`'s phase with `c₁`'s, turning
/// a generated state into the zero-phase W-state up to a global phase.
/// Defined only where both amplitudes are nonzero.
pub fn compensating_phase(state: &ModeState) -> Result<f64> {
    if state.len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "compensating phase needs a 3-mode state, got {}",
            state.len()
        )));
    }
    let c1 = state.amplitude(0);
    let c2 = state.amplitude(1);
    if c1.norm() < 1e-12 || c2.norm() < 1e-12 {
        return Err(Error::numeric(
            "compensating phase undefined for vanishing amplitude",
            c1.norm().min(c2.norm()),
        ));
    }
    let mut phi = c1.arg() - c2.arg();
    phi = phi.rem_euclid(2.0 * PI);
    if phi > PI {
        phi -= 2.0 * PI;
    }
    Ok(phi)
}

/// Solves the full inverse problem for `s`: lattice ratio, generation
/// length (normalized and physical), optional guide separations, and the
/// first `recurrence_count` recurrences with their compensating phases.
pub fn solve(
    s: f64,
    k: f64,
    geometry: Option<(f64, f64)>,
    recurrence_count: usize,
) -> Result<DesignSolution> {
    let gamma = gamma_for(s)?;
    let kz_star = kz_for(s)?;
    let z_star_cm = physical_length(kz_star, k)?;
    let seps = match geometry {
        Some((d0, d1)) => Some(separations(s, d0, d1)?),
        None => None,
    };
    let m = design_lattice(s)?;
    let psi0 = ModeState::injection(3, 1)?;
    let mut recurrence = Vec::with_capacity(recurrence_count);
    for kz in recurrence_positions(s, recurrence_count)? {
        let evolved = evolve(&psi0, &m, kz)?;
        recurrence.push(RecurrencePoint {
            kz,
            z_cm: physical_length(kz, k)?,
            phase_shift: compensating_phase(&evolved)?,
        });
    }
    let target = target_state(&WTarget::new(s, 0.0, 0.0)?);
    Ok(DesignSolution {
        s,
        gamma,
        kz_star,
        z_star_cm,
        separations: seps,
        recurrence,
        target,
    })
}

/// Generates the state on the designed lattice and applies the
/// compensating phase: the result equals the zero-phase target up to a
/// global phase.
pub fn generate_state(s: f64, kz: f64) -> Result<ModeState> {
    let m = design_lattice(s)?;
    let psi0 = ModeState::injection(3, 1)?;
    let evolved = evolve(&psi0, &m, kz)?;
    let phi = compensating_phase(&evolved)?;
    apply_phase_shift(&evolved, 1, phi)
}
