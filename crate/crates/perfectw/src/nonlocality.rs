//! Hardy-type nonlocality certification of three-mode single-photon
//! states, and the Bell-CH inequality built from the same probabilities.
//!
//! Each guide is a qubit: photon present is `|1⟩`, absent `|0⟩`. A `Z`
//! measurement asks directly for the photon (`z = +1` ⇔ present). A `K`
//! measurement projects onto the rotated pair
//!
//! ```text
//! |k+⟩ = cos(α/2)|1⟩ + sin(α/2)|0⟩
//! |k-⟩ = sin(α/2)|1⟩ - cos(α/2)|0⟩
//! ```
//!
//! obtained by inverting `|1⟩ = cos(α/2)|k+⟩ + sin(α/2)|k-⟩`,
//! `|0⟩ = sin(α/2)|k+⟩ - cos(α/2)|k-⟩` (the transformation is an
//! involutory orthogonal matrix, so it is its own inverse). Outcome `+1`
//! means `|k+⟩`, `-1` means `|k-⟩`.
//!
//! At the angle `α*` with `cos²(α/2) = √2·sin²(α/2)` the perfect W-state
//! shows the sometimes-always-never contradiction with local elements of
//! reality, and the Bell-CH combination
//! `p(k₁+,k₂+,k₃-) - p(z₁-,k₂+,k₃-) - p(k₁+,z₂-,k₃-) - p(z₁+,z₂+,k₃-)`
//! turns positive.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::ModeState;
use crate::loss::DensityMatrix;

/// Threshold above which a CH left-hand side counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-12;

/// Tolerance of the pass/fail decision on the ladder rungs.
pub const RUNG_TOL: f64 = 1e-10;

/// Conditioning probabilities at or below this are reported as undefined.
pub const CONDITION_TOL: f64 = 1e-12;

/// A 3-mode single-photon state written over the 3-qubit computational
/// basis; index bit `2-j` holds qubit `j` (site 1 is the most significant
/// bit, so `|100⟩` sits at index 4).
#[derive(Debug, Clone)]
pub struct QubitEmbedding {
    amplitudes: [C64; 8],
}

impl QubitEmbedding {
    /// Embeds a normalized 3-mode state on the weight-1 kets
    /// `{|100⟩, |010⟩, |001⟩}`.
    pub fn from_mode_state(state: &ModeState) -> Result<Self> {
        if state.len() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "qubit embedding needs 3 modes, got {}",
                state.len()
            )));
        }
        if !state.is_normalized() {
            return Err(Error::invalid("state", "qubit embedding needs a normalized state"));
        }
        let mut amplitudes = [C64::new(0.0, 0.0); 8];
        amplitudes[0b100] = state.amplitude(0);
        amplitudes[0b010] = state.amplitude(1);
        amplitudes[0b001] = state.amplitude(2);
        Ok(QubitEmbedding { amplitudes })
    }

    /// A general normalized 3-qubit state.
    pub fn from_amplitudes(amplitudes: [C64; 8]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(
                "amplitudes",
                format!("state not normalized: Σ|c|² = {norm_sq}"),
            ));
        }
        Ok(QubitEmbedding { amplitudes })
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amplitudes
    }
}

/// Per-site measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Photon-number measurement; `+1` ⇔ photon present.
    Z,
    /// Rotated measurement in the `|k±⟩` pair at the setting's `α`.
    K,
}

/// Measurement outcome, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

use Outcome::{Minus, Plus};

/// Bases chosen at the three sites plus the `K`-basis mixing angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub bases: [Basis; 3],
    pub alpha: f64,
}

impl MeasurementSetting {
    pub fn new(bases: [Basis; 3], alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("got {alpha}")));
        }
        Ok(MeasurementSetting { bases, alpha })
    }

    /// Components `(⟨o|0⟩, ⟨o|1⟩)` of the outcome bra at one site; real by
    /// construction.
    fn site_bra(&self, site: usize, outcome: Outcome) -> [f64; 2] {
        let (sin, cos) = (0.5 * self.alpha).sin_cos();
        match (self.bases[site], outcome) {
            (Basis::Z, Plus) => [0.0, 1.0],
            (Basis::Z, Minus) => [1.0, 0.0],
            (Basis::K, Plus) => [sin, cos],
            (Basis::K, Minus) => [-cos, sin],
        }
    }
}

/// The Hardy angle: `cos²(α/2) = √2·sin²(α/2)`, i.e.
/// `sin²(α/2) = √2 - 1`, on the principal branch `α ∈ (0, π)`.
pub fn alpha_star() -> f64 {
    2.0 * (2.0_f64.sqrt() - 1.0).sqrt().asin()
}

/// Joint probability of one outcome triple:
/// `|⟨o₁| ⊗ ⟨o₂| ⊗ ⟨o₃| ψ⟩|²`.
pub fn joint_probability(
    state: &QubitEmbedding,
    setting: &MeasurementSetting,
    outcomes: [Outcome; 3],
) -> f64 {
    let bras: Vec<[f64; 2]> = (0..3).map(|j| setting.site_bra(j, outcomes[j])).collect();
    let mut amp = C64::new(0.0, 0.0);
    for idx in 0..8 {
        let c = state.amplitudes[idx];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let mut weight = 1.0;
        for (j, bra) in bras.iter().enumerate() {
            let bit = (idx >> (2 - j)) & 1;
            weight *= bra[bit];
        }
        amp += weight * c;
    }
    amp.norm_sqr()
}

/// Same projectors in trace form, `Tr(Π ρ)`, for the lossy vacuum +
/// single-excitation density matrix. The vacuum maps to `|000⟩`, so it
/// answers `z = -1` at every site and can only dilute a violation.
pub fn joint_probability_lossy(
    rho: &DensityMatrix,
    setting: &MeasurementSetting,
    outcomes: [Outcome; 3],
) -> Result<f64> {
    if rho.n_modes() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "lossy certification needs 3 modes, got {}",
            rho.n_modes()
        )));
    }
    // basis index → qubit-space index: vacuum, |100⟩, |010⟩, |001⟩
    const EMBED: [usize; 4] = [0b000, 0b100, 0b010, 0b001];
    let bras: Vec<[f64; 2]> = (0..3).map(|j| setting.site_bra(j, outcomes[j])).collect();
    let weight = |basis_idx: usize| -> f64 {
        let idx = EMBED[basis_idx];
        let mut w = 1.0;
        for (j, bra) in bras.iter().enumerate() {
            let bit = (idx >> (2 - j)) & 1;
            w *= bra[bit];
        }
        w
    };
    let mut p = C64::new(0.0, 0.0);
    for a in 0..4 {
        let wa = weight(a);
        if wa == 0.0 {
            continue;
        }
        for b in 0..4 {
            p += wa * weight(b) * rho.entries()[(a, b)];
        }
    }
    Ok(p.re.max(0.0))
}

/// The four Bell-CH probabilities, their combination, and the violation
/// flag.
#[derive(Debug, Clone, Copy)]
pub struct HardyCertificate {
    /// `p(k₁=+1, k₂=+1, k₃=-1)` — the Hardy "sometimes" event.
    pub p_hardy: f64,
    /// `p(z₁=-1, k₂=+1, k₃=-1)`.
    pub p_veto1: f64,
    /// `p(k₁=+1, z₂=-1, k₃=-1)`.
    pub p_veto2: f64,
    /// `p(z₁=+1, z₂=+1, k₃=-1)`.
    pub p_veto3: f64,
    /// `p_hardy - p_veto1 - p_veto2 - p_veto3`; positive for no local
    /// hidden-variable model.
    pub ch_lhs: f64,
    /// `ch_lhs >` [`VIOLATION_TOL`].
    pub violated: bool,
}

/// Evaluates the Bell-CH combination on `state` at mixing angle `alpha`.
pub fn hardy_certificate(state: &QubitEmbedding, alpha: f64) -> Result<HardyCertificate> {
    use Basis::{K, Z};
    let p_hardy = joint_probability(
        state,
        &MeasurementSetting::new([K, K, K], alpha)?,
        [Plus, Plus, Minus],
    );
    let p_veto1 = joint_probability(
        state,
        &MeasurementSetting::new([Z, K, K], alpha)?,
        [Minus, Plus, Minus],
    );
    let p_veto2 = joint_probability(
        state,
        &MeasurementSetting::new([K, Z, K], alpha)?,
        [Plus, Minus, Minus],
    );
    let p_veto3 = joint_probability(
        state,
        &MeasurementSetting::new([Z, Z, K], alpha)?,
        [Plus, Plus, Minus],
    );
    let ch_lhs = p_hardy - p_veto1 - p_veto2 - p_veto3;
    Ok(HardyCertificate {
        p_hardy,
        p_veto1,
        p_veto2,
        p_veto3,
        ch_lhs,
        violated: ch_lhs > VIOLATION_TOL,
    })
}

/// Outcome of one ladder rung.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RungStatus {
    Pass,
    Fail,
    /// The conditioning event has probability ≤ [`CONDITION_TOL`].
    Undefined,
}

/// A rung's numeric value (absent when undefined) and its verdict.
#[derive(Debug, Clone, Copy)]
pub struct Rung {
    pub value: Option<f64>,
    pub status: RungStatus,
}

/// The sometimes-always-never structure of the Hardy argument.
#[derive(Debug, Clone, Copy)]
pub struct HardyLadderReport {
    /// `p(k₁=+1, k₂=+1, k₃=-1) > 0`.
    pub sometimes: Rung,
    /// `p(z₁=+1 | k₂=+1, k₃=-1) = 1`.
    pub always_site1: Rung,
    /// `p(z₂=+1 | k₁=+1, k₃=-1) = 1`.
    pub always_site2: Rung,
    /// `p(z₁=+1, z₂=+1) = 0`, marginal over site 3.
    pub never: Rung,
}

impl HardyLadderReport {
    /// True when every rung passed.
    pub fn all_pass(&self) -> bool {
        [self.sometimes, self.always_site1, self.always_site2, self.never]
            .iter()
            .all(|r| r.status == RungStatus::Pass)
    }
}

/// Evaluates the three Hardy implications on `state` at mixing angle
/// `alpha`.
pub fn hardy_ladder_report(state: &QubitEmbedding, alpha: f64) -> Result<HardyLadderReport> {
    use Basis::{K, Z};

    let sometimes_value = joint_probability(
        state,
        &MeasurementSetting::new([K, K, K], alpha)?,
        [Plus, Plus, Minus],
    );
    let sometimes = Rung {
        value: Some(sometimes_value),
        status: if sometimes_value > RUNG_TOL {
            RungStatus::Pass
        } else {
            RungStatus::Fail
        },
    };

    let conditional = |z_site: usize| -> Result<Rung> {
        let bases = match z_site {
            0 => [Z, K, K],
            1 => [K, Z, K],
            _ => unreachable!("ladder conditions only on sites 1 and 2"),
        };
        let setting = MeasurementSetting::new(bases, alpha)?;
        let mut hit = [Plus, Plus, Minus];
        let mut miss = [Plus, Plus, Minus];
        miss[z_site] = Minus;
        hit[z_site] = Plus;
        let p_hit = joint_probability(state, &setting, hit);
        let p_miss = joint_probability(state, &setting, miss);
        let total = p_hit + p_miss;
        if total <= CONDITION_TOL {
            return Ok(Rung {
                value: None,
                status: RungStatus::Undefined,
            });
        }
        let value = p_hit / total;
        Ok(Rung {
            value: Some(value),
            status: if (value - 1.0).abs() <= RUNG_TOL {
                RungStatus::Pass
            } else {
                RungStatus::Fail
            },
        })
    };
    let always_site1 = conditional(0)?;
    let always_site2 = conditional(1)?;

    let zzz = MeasurementSetting::new([Z, Z, Z], alpha)?;
    let never_value = joint_probability(state, &zzz, [Plus, Plus, Plus])
        + joint_probability(state, &zzz, [Plus, Plus, Minus]);
    let never = Rung {
        value: Some(never_value),
        status: if never_value <= RUNG_TOL {
            RungStatus::Pass
        } else {
            RungStatus::Fail
        },
    };

    Ok(HardyLadderReport {
        sometimes,
        always_site1,
        always_site2,
        never,
    })
}
