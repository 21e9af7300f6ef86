//! Coupled-mode propagation of a single photon in a waveguide array.
//!
//! A lattice of `n` identical single-mode guides with nearest-neighbour
//! evanescent coupling is described by a real symmetric tridiagonal
//! coupling matrix `M` with bonds `k·γ_j` and zero diagonal (identical
//! propagation constants only contribute a global phase and are dropped).
//! A single-photon amplitude vector over the guides then propagates as
//! `c(z) = exp(-i z M) c(0)`.
//!
//! The propagator is computed through the real-symmetric eigendecomposition
//! `M = V Λ Vᵀ`, so `U(z) = V exp(-i z Λ) Vᵀ` is unitary up to rounding for
//! any `z`. Closed-form 3×3 propagators for the two bond profiles
//! `γ = (1, √2)` and `γ = (1, √3)` are provided for cross-checking.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Norm tolerance accepted by [`ModeState::new`].
pub const NORM_TOL: f64 = 1e-10;

/// Unitarity tolerance enforced on every computed propagator.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Description of a coupled-waveguide lattice: guide count, per-bond
/// weights `γ_j`, and the characteristic coupling strength `k` (cm⁻¹).
///
/// The physical bond between guides `j` and `j+1` couples at `k·γ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    n_guides: usize,
    gamma: Vec<f64>,
    k: f64,
}

impl CouplingSpec {
    /// Validates `n_guides ≥ 2`, `γ_j > 0`, `k > 0`; errors name the
    /// offending field.
    pub fn new(n_guides: usize, gamma: Vec<f64>, k: f64) -> Result<Self> {
        if n_guides < 2 {
            return Err(Error::invalid(
                "n_guides",
                format!("need at least 2 guides, got {n_guides}"),
            ));
        }
        if gamma.len() != n_guides - 1 {
            return Err(Error::invalid(
                "gamma",
                format!(
                    "need {} bond weights for {} guides, got {}",
                    n_guides - 1,
                    n_guides,
                    gamma.len()
                ),
            ));
        }
        for (j, &g) in gamma.iter().enumerate() {
            if g <= 0.0 || !g.is_finite() {
                return Err(Error::invalid(
                    &format!("gamma[{j}]"),
                    format!("bond weights must be positive, got {g}"),
                ));
            }
        }
        if k <= 0.0 || !k.is_finite() {
            return Err(Error::invalid(
                "k",
                format!("coupling strength must be positive, got {k}"),
            ));
        }
        Ok(CouplingSpec { n_guides, gamma, k })
    }

    pub fn n_guides(&self) -> usize {
        self.n_guides
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Characteristic coupling strength in cm⁻¹.
    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Real symmetric tridiagonal coupling matrix with zero diagonal
/// (entries in cm⁻¹, or dimensionless for a unit-`k` lattice).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: DMatrix<f64>,
}

impl CouplingMatrix {
    /// Builds the `(len+1)×(len+1)` matrix with `M[j, j+1] = M[j+1, j] =
    /// bonds[j]` and all other entries zero. Bond values are unrestricted
    /// apart from finiteness; physical lattices come from
    /// [`build_coupling_matrix`].
    pub fn from_bonds(bonds: &[f64]) -> Result<Self> {
        if bonds.is_empty() {
            return Err(Error::invalid("bonds", "need at least one bond"));
        }
        for (j, &b) in bonds.iter().enumerate() {
            if !b.is_finite() {
                return Err(Error::invalid(&format!("bonds[{j}]"), format!("got {b}")));
            }
        }
        let n = bonds.len() + 1;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (j, &b) in bonds.iter().enumerate() {
            m[(j, j + 1)] = b;
            m[(j + 1, j)] = b;
        }
        Ok(CouplingMatrix { entries: m })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Builds the coupling matrix of a validated lattice spec: bonds `k·γ_j`.
pub fn build_coupling_matrix(spec: &CouplingSpec) -> CouplingMatrix {
    let bonds: Vec<f64> = spec.gamma().iter().map(|g| spec.k() * g).collect();
    CouplingMatrix::from_bonds(&bonds).expect("validated spec always yields a valid matrix")
}

/// Single-photon amplitude vector over the guide modes; entry `j` is the
/// amplitude of finding the photon in guide `j` (0-based).
///
/// `normalized` records which contract applies: `true` for unit-norm
/// states, `false` for sub-normalized states such as the single-excitation
/// block of a lossy density matrix after post-selection.
#[derive(Debug, Clone)]
pub struct ModeState {
    amplitudes: DVector<C64>,
    normalized: bool,
}

impl ModeState {
    /// A normalized state; the squared norm must be within
    /// [`NORM_TOL`] of 1.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(
                "amplitudes",
                format!("state not normalized: Σ|c|² = {norm_sq}"),
            ));
        }
        Ok(ModeState {
            amplitudes: v,
            normalized: true,
        })
    }

    /// A sub-normalized state (Σ|c|² ≤ 1), e.g. a post-selected branch.
    pub fn sub_normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq > 1.0 + NORM_TOL {
            return Err(Error::invalid(
                "amplitudes",
                format!("sub-normalized state has Σ|c|² = {norm_sq} > 1"),
            ));
        }
        Ok(ModeState {
            amplitudes: v,
            normalized: false,
        })
    }

    /// The basis state with the photon injected into guide `mode` (0-based).
    pub fn injection(n: usize, mode: usize) -> Result<Self> {
        if mode >= n {
            return Err(Error::invalid(
                "mode",
                format!("injection mode {mode} out of range for {n} guides"),
            ));
        }
        let mut v = DVector::from_element(n, C64::new(0.0, 0.0));
        v[mode] = C64::new(1.0, 0.0);
        Ok(ModeState {
            amplitudes: v,
            normalized: true,
        })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, mode: usize) -> C64 {
        self.amplitudes[mode]
    }

    /// Whether the unit-norm contract applies.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Per-guide detection probabilities `|c_j|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Inner product ⟨self|other⟩.
    pub fn overlap(&self, other: &ModeState) -> Result<C64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "states of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Unitary propagator `U(z) = exp(-i z M)` over the guide modes.
#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    entries: DMatrix<C64>,
}

impl EvolutionOperator {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Applies the propagator to a state, preserving its norm contract.
    pub fn apply(&self, state: &ModeState) -> Result<ModeState> {
        if state.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} against {}×{} propagator",
                state.len(),
                self.n(),
                self.n()
            )));
        }
        Ok(ModeState {
            amplitudes: &self.entries * state.amplitudes(),
            normalized: state.normalized,
        })
    }

    /// Max-norm of `U†U − I`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.entries.nrows();
        let gram = self.entries.adjoint() * &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// Computes `U(z) = exp(-i z M)` via the real-symmetric eigendecomposition
/// `M = V Λ Vᵀ`, `U = V exp(-i z Λ) Vᵀ`.
///
/// Fails with a numeric error carrying the residual if the eigensolver
/// does not converge or the result is not unitary to [`UNITARITY_TOL`].
pub fn evolution_operator(m: &CouplingMatrix, z: f64) -> Result<EvolutionOperator> {
    if !z.is_finite() {
        return Err(Error::invalid("z", format!("propagation length {z}")));
    }
    let eig = SymmetricEigen::try_new(m.entries.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numeric("symmetric eigensolver did not converge", f64::NAN))?;
    let n = m.n();
    let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let phases = DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| (-C64::i() * l * z).exp()),
    );
    let u = &v * DMatrix::from_diagonal(&phases) * v.transpose();
    let op = EvolutionOperator { entries: u };
    let residual = op.unitarity_residual();
    if residual > UNITARITY_TOL {
        return Err(Error::numeric(
            "propagator failed the unitarity check",
            residual,
        ));
    }
    Ok(op)
}

/// Literal closed-form 3×3 propagator for the `γ = (1, √2)` lattice as a
/// function of the normalized length `kz`; entries depend on `√3·kz`.
pub fn closed_form_evolution_s1(kz: f64) -> EvolutionOperator {
    let t = 3.0_f64.sqrt() * kz;
    let (sin, cos) = t.sin_cos();
    let r3 = 3.0_f64.sqrt();
    let r2 = 2.0_f64.sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let entries = DMatrix::from_row_slice(
        3,
        3,
        &[
            re((2.0 + cos) / 3.0),
            im(-sin / r3),
            re(r2 / 3.0 * (-1.0 + cos)),
            im(-sin / r3),
            re(cos),
            im(-r2 / r3 * sin),
            re(r2 / 3.0 * (-1.0 + cos)),
            im(-r2 / r3 * sin),
            re((1.0 + 2.0 * cos) / 3.0),
        ],
    );
    EvolutionOperator { entries }
}

/// Literal closed-form 3×3 propagator for the `γ = (1, √3)` lattice;
/// entries depend on `cos(2kz)` and `cos(kz)·sin(kz)`.
pub fn closed_form_evolution_s2(kz: f64) -> EvolutionOperator {
    let (sin, cos) = kz.sin_cos();
    let cos2 = (2.0 * kz).cos();
    let r3 = 3.0_f64.sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let entries = DMatrix::from_row_slice(
        3,
        3,
        &[
            re((3.0 + cos2) / 4.0),
            im(-cos * sin),
            re(-r3 / 2.0 * sin * sin),
            im(-cos * sin),
            re(cos2),
            im(-r3 * cos * sin),
            re(-r3 / 2.0 * sin * sin),
            im(-r3 * cos * sin),
            re((1.0 + 3.0 * cos2) / 4.0),
        ],
    );
    EvolutionOperator { entries }
}

/// Propagates `state` a distance `z` under the lattice `M`.
pub fn evolve(state: &ModeState, m: &CouplingMatrix, z: f64) -> Result<ModeState> {
    if state.len() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} against {}-guide lattice",
            state.len(),
            m.n()
        )));
    }
    evolution_operator(m, z)?.apply(state)
}

/// Multiplies the amplitude of `mode` by `exp(i·phi)`, leaving all other
/// amplitudes unchanged (an ideal in-line phase shifter).
pub fn apply_phase_shift(state: &ModeState, mode: usize, phi: f64) -> Result<ModeState> {
    if mode >= state.len() {
        return Err(Error::invalid(
            "mode",
            format!("phase-shift mode {mode} out of range for {} guides", state.len()),
        ));
    }
    let mut amplitudes = state.amplitudes.clone();
    amplitudes[mode] *= (C64::i() * phi).exp();
    Ok(ModeState {
        amplitudes,
        normalized: state.normalized,
    })
}

/// True iff `|⟨a|b⟩| ≥ 1 − tol`; the overlap magnitude is insensitive to
/// any global phase on either state.
pub fn equal_up_to_global_phase(a: &ModeState, b: &ModeState, tol: f64) -> Result<bool> {
    Ok(a.overlap(b)?.norm() >= 1.0 - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s1_lattice() -> CouplingMatrix {
        let spec = CouplingSpec::new(3, vec![1.0, 2.0_f64.sqrt()], 1.0).unwrap();
        build_coupling_matrix(&spec)
    }

    const KZ_STAR_S1: f64 = 0.604_599_788_078_072_6; // π/(3√3)

    #[test]
    fn coupling_matrix_s1_bonds() {
        let m = s1_lattice();
        let r2 = 2.0_f64.sqrt();
        let expect = [
            [0.0, 1.0, 0.0],
            [1.0, 0.0, r2],
            [0.0, r2, 0.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(m.entries()[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn coupling_matrix_s2_bonds() {
        let spec = CouplingSpec::new(3, vec![1.0, 3.0_f64.sqrt()], 1.0).unwrap();
        let m = build_coupling_matrix(&spec);
        assert_abs_diff_eq!(m.entries()[(1, 2)], 3.0_f64.sqrt());
        assert_abs_diff_eq!(m.entries()[(2, 1)], 3.0_f64.sqrt());
        assert_abs_diff_eq!(m.entries()[(0, 1)], 1.0);
        assert_abs_diff_eq!(m.entries()[(0, 2)], 0.0);
        assert_abs_diff_eq!(m.entries()[(1, 1)], 0.0);
    }

    #[test]
    fn coupling_matrix_two_guides() {
        let spec = CouplingSpec::new(2, vec![1.0], 0.37).unwrap();
        let m = build_coupling_matrix(&spec);
        assert_abs_diff_eq!(m.entries()[(0, 1)], 0.37);
        assert_abs_diff_eq!(m.entries()[(1, 0)], 0.37);
        assert_abs_diff_eq!(m.entries()[(0, 0)], 0.0);
    }

    #[test]
    fn invalid_specs_name_the_field() {
        let err = CouplingSpec::new(3, vec![1.0, 1.0], 0.0).unwrap_err();
        assert!(err.to_string().contains("k"), "{err}");
        let err = CouplingSpec::new(3, vec![1.0, -1.0], 1.0).unwrap_err();
        assert!(err.to_string().contains("gamma[1]"), "{err}");
        let err = CouplingSpec::new(1, vec![], 1.0).unwrap_err();
        assert!(err.to_string().contains("n_guides"), "{err}");
        let err = CouplingSpec::new(3, vec![1.0], 1.0).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn zero_length_propagator_is_identity() {
        let u = evolution_operator(&s1_lattice(), 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((u.entry(i, j) - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn generation_length_column_probabilities() {
        // center-injection column at kz* carries (1/4, 1/4, 1/2)
        let u = evolution_operator(&s1_lattice(), KZ_STAR_S1).unwrap();
        assert_abs_diff_eq!(u.entry(0, 1).norm_sqr(), 0.25, epsilon = 1e-3);
        assert_abs_diff_eq!(u.entry(1, 1).norm_sqr(), 0.25, epsilon = 1e-3);
        assert_abs_diff_eq!(u.entry(2, 1).norm_sqr(), 0.50, epsilon = 1e-3);
    }

    #[test]
    fn closed_form_s1_identity_and_center_entry() {
        let u = closed_form_evolution_s1(0.0);
        assert!((u.entry(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((u.entry(0, 1)).norm() < 1e-15);
        // √3·kz = π/3 puts cos(π/3) = 1/2 in the center entry
        let u = closed_form_evolution_s1(KZ_STAR_S1);
        assert_abs_diff_eq!(u.entry(1, 1).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entry(1, 1).im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_s1_matches_numeric_propagator() {
        let m = s1_lattice();
        for i in 0..100 {
            let kz = 2.0 * (i as f64) / 99.0;
            let num = evolution_operator(&m, kz).unwrap();
            let closed = closed_form_evolution_s1(kz);
            for r in 0..3 {
                for c in 0..3 {
                    assert!(
                        (num.entry(r, c) - closed.entry(r, c)).norm() < 1e-10,
                        "kz={kz} entry ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_s2_identity_and_generation_probabilities() {
        let u = closed_form_evolution_s2(0.0);
        assert!((u.entry(1, 1) - C64::new(1.0, 0.0)).norm() < 1e-15);
        // at kz* = ½·arctan(√2) the center-injection column carries
        // (1/6, 1/3, 1/2); the (0,1) coupling amplitude squares to 1/6
        let kz_star = 0.5 * 2.0_f64.sqrt().atan();
        let u = closed_form_evolution_s2(kz_star);
        assert_abs_diff_eq!(u.entry(0, 1).norm_sqr(), 1.0 / 6.0, epsilon = 2e-3);
        assert_abs_diff_eq!(u.entry(1, 1).norm_sqr(), 1.0 / 3.0, epsilon = 2e-3);
        assert_abs_diff_eq!(u.entry(2, 1).norm_sqr(), 1.0 / 2.0, epsilon = 2e-3);
    }

    #[test]
    fn closed_form_s2_matches_numeric_propagator() {
        let spec = CouplingSpec::new(3, vec![1.0, 3.0_f64.sqrt()], 1.0).unwrap();
        let m = build_coupling_matrix(&spec);
        for i in 0..100 {
            let kz = 2.0 * (i as f64) / 99.0;
            let num = evolution_operator(&m, kz).unwrap();
            let closed = closed_form_evolution_s2(kz);
            for r in 0..3 {
                for c in 0..3 {
                    assert!(
                        (num.entry(r, c) - closed.entry(r, c)).norm() < 1e-10,
                        "kz={kz} entry ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn center_injection_generates_quarter_quarter_half() {
        let psi0 = ModeState::injection(3, 1).unwrap();
        let psi = evolve(&psi0, &s1_lattice(), KZ_STAR_S1).unwrap();
        let p = psi.probabilities();
        assert_abs_diff_eq!(p[0], 0.25, epsilon = 1e-3);
        assert_abs_diff_eq!(p[1], 0.25, epsilon = 1e-3);
        assert_abs_diff_eq!(p[2], 0.50, epsilon = 1e-3);
    }

    #[test]
    fn zero_distance_returns_input() {
        let psi0 = ModeState::injection(3, 1).unwrap();
        let psi = evolve(&psi0, &s1_lattice(), 0.0).unwrap();
        for j in 0..3 {
            assert!((psi.amplitude(j) - psi0.amplitude(j)).norm() < 1e-14);
        }
    }

    #[test]
    fn center_injection_amplitude_magnitudes() {
        // |c₁|² = sin²(√3kz)/3, |c₂|² = cos²(√3kz), |c₃|² = (2/3)sin²(√3kz)
        let psi0 = ModeState::injection(3, 1).unwrap();
        for &kz in &[0.13, 0.3, 0.9, 1.7] {
            let psi = evolve(&psi0, &s1_lattice(), kz).unwrap();
            let t = 3.0_f64.sqrt() * kz;
            let p = psi.probabilities();
            assert_abs_diff_eq!(p[0], t.sin().powi(2) / 3.0, epsilon = 1e-10);
            assert_abs_diff_eq!(p[1], t.cos().powi(2), epsilon = 1e-10);
            assert_abs_diff_eq!(p[2], 2.0 / 3.0 * t.sin().powi(2), epsilon = 1e-10);
        }
    }

    #[test]
    fn evolve_rejects_dimension_mismatch() {
        let psi0 = ModeState::injection(4, 1).unwrap();
        assert!(matches!(
            evolve(&psi0, &s1_lattice(), 0.5),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn phase_shift_identity_cases() {
        let psi0 = ModeState::injection(3, 1).unwrap();
        let same = apply_phase_shift(&psi0, 1, 0.0).unwrap();
        assert!((same.amplitude(1) - psi0.amplitude(1)).norm() < 1e-15);
        let full_turn = apply_phase_shift(&psi0, 1, 2.0 * std::f64::consts::PI).unwrap();
        for j in 0..3 {
            assert!((full_turn.amplitude(j) - psi0.amplitude(j)).norm() < 1e-12);
        }
        assert!(apply_phase_shift(&psi0, 3, 0.1).is_err());
    }

    #[test]
    fn compensated_state_is_perfect_w_up_to_global_phase() {
        let psi0 = ModeState::injection(3, 1).unwrap();
        let evolved = evolve(&psi0, &s1_lattice(), KZ_STAR_S1).unwrap();
        // the evolved column is (-i/2, 1/2, -i/√2); shifting the middle
        // mode by -π/2 (≡ 3π/2) aligns all three phases
        let shifted =
            apply_phase_shift(&evolved, 1, -std::f64::consts::FRAC_PI_2).unwrap();
        let target = ModeState::new(vec![
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        let overlap = target.overlap(&shifted).unwrap().norm();
        assert!(overlap >= 1.0 - 1e-6, "overlap {overlap}");
        assert!(equal_up_to_global_phase(&target, &shifted, 1e-6).unwrap());
    }

    #[test]
    fn global_phase_comparison() {
        let psi = ModeState::new(vec![
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        assert!(equal_up_to_global_phase(&psi, &psi, 1e-12).unwrap());
        let rotated = ModeState::new(
            psi.amplitudes()
                .iter()
                .map(|c| c * (C64::i() * (std::f64::consts::PI / 7.0)).exp())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(equal_up_to_global_phase(&psi, &rotated, 1e-12).unwrap());
        let e1 = ModeState::injection(3, 0).unwrap();
        let e2 = ModeState::injection(3, 1).unwrap();
        assert!(!equal_up_to_global_phase(&e1, &e2, 1e-12).unwrap());
        let short = ModeState::injection(2, 0).unwrap();
        assert!(equal_up_to_global_phase(&e1, &short, 1e-12).is_err());
    }

    #[test]
    fn phase_structure_of_center_injection() {
        // column 2 of the s=1 propagator keeps c₁, c₃ purely imaginary
        // and c₂ purely real for every z
        let psi0 = ModeState::injection(3, 1).unwrap();
        for i in 0..40 {
            let kz = 4.0 * (i as f64) / 39.0;
            let psi = evolve(&psi0, &s1_lattice(), kz).unwrap();
            assert!(psi.amplitude(0).re.abs() < 1e-10, "kz={kz}");
            assert!(psi.amplitude(1).im.abs() < 1e-10, "kz={kz}");
            assert!(psi.amplitude(2).re.abs() < 1e-10, "kz={kz}");
        }
    }

    #[test]
    fn uniform_lattice_mirror_symmetry() {
        let spec = CouplingSpec::new(3, vec![1.0, 1.0], 1.0).unwrap();
        let m = build_coupling_matrix(&spec);
        let psi0 = ModeState::injection(3, 1).unwrap();
        for i in 0..40 {
            let kz = 4.0 * (i as f64) / 39.0;
            let psi = evolve(&psi0, &m, kz).unwrap();
            assert!(
                (psi.amplitude(0).norm() - psi.amplitude(2).norm()).abs() < 1e-10,
                "kz={kz}"
            );
        }
    }

    #[test]
    fn sub_normalized_contract() {
        let half = ModeState::sub_normalized(vec![
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(!half.is_normalized());
        let over = ModeState::sub_normalized(vec![C64::new(1.2, 0.0)]);
        assert!(over.is_err());
        // evolution preserves the sub-norm
        let out = evolve(&half, &s1_lattice(), 0.8).unwrap();
        assert_abs_diff_eq!(out.norm_sq(), 0.25, epsilon = 1e-10);
        assert!(!out.is_normalized());
    }
}
