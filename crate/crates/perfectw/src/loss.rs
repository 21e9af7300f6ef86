//! Lindblad photon-loss dynamics in the vacuum + single-excitation
//! subspace, and fidelity against the lossless generation.
//!
//! The density matrix lives on the ordered basis
//! `(|0…0⟩, |1₁⟩, …, |1_n⟩)`: index 0 is the global vacuum and index
//! `j+1` holds the photon in guide `j`. Propagation distance `z` plays
//! the role of time, so the loss rate `β` carries cm⁻¹ units and sweeps
//! are parameterized by the dimensionless ratio `β/k`.
//!
//! The dissipator is `-β Σ_j (a†_j a_j ρ - 2 a_j ρ a†_j + ρ a†_j a_j)`,
//! i.e. populations decay at `2β`. Because `Σ_j a†_j a_j` is the identity
//! on the single-excitation block, that block evolves exactly as
//! `ρ₁(z) = e^{-2βz} U ρ₁(0) U†` with the vacuum absorbing the deficit —
//! the strongest oracle for the integrator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::design;
use crate::error::{Error, Result};
use crate::lattice::{build_coupling_matrix, evolve, CouplingMatrix, CouplingSpec, ModeState};

/// Hermiticity tolerance on density-matrix entries.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from 1.
pub const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue a density matrix may carry.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Default integrator resolution: step in `kz` units.
const DEFAULT_KZ_STEP: f64 = 1e-3;

/// Photon loss rate per unit propagation length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    beta: f64,
    beta_over_k: Option<f64>,
}

impl LossParams {
    pub fn new(beta: f64) -> Result<Self> {
        if beta < 0.0 || !beta.is_finite() {
            return Err(Error::invalid(
                "beta",
                format!("loss rate must be nonnegative, got {beta}"),
            ));
        }
        Ok(LossParams {
            beta,
            beta_over_k: None,
        })
    }

    /// Loss expressed through the dimensionless sweep ratio `β/k`.
    pub fn from_ratio(beta_over_k: f64, k: f64) -> Result<Self> {
        if beta_over_k < 0.0 || !beta_over_k.is_finite() {
            return Err(Error::invalid(
                "beta_over_k",
                format!("loss ratio must be nonnegative, got {beta_over_k}"),
            ));
        }
        if k <= 0.0 || !k.is_finite() {
            return Err(Error::invalid(
                "k",
                format!("coupling strength must be positive, got {k}"),
            ));
        }
        Ok(LossParams {
            beta: beta_over_k * k,
            beta_over_k: Some(beta_over_k),
        })
    }

    /// Loss rate β in cm⁻¹.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The sweep ratio, when this was built from one.
    pub fn beta_over_k(&self) -> Option<f64> {
        self.beta_over_k
    }
}

/// Hermitian, unit-trace, positive density matrix over the vacuum +
/// single-excitation basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

fn hermiticity_residual(entries: &DMatrix<C64>) -> f64 {
    let n = entries.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_eigenvalues(entries: &DMatrix<C64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(entries.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numeric("hermitian eigensolver did not converge", f64::NAN))?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace, and positivity at the module
    /// tolerances.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() < 2 {
            return Err(Error::invalid(
                "entries",
                format!("need a square matrix of dimension ≥ 2, got {}×{}", entries.nrows(), entries.ncols()),
            ));
        }
        let herm = hermiticity_residual(&entries);
        if herm > HERMITICITY_TOL {
            return Err(Error::invalid(
                "entries",
                format!("not hermitian: residual {herm:e}"),
            ));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::invalid(
                "entries",
                format!("trace {trace} differs from 1"),
            ));
        }
        let min_eig = hermitian_eigenvalues(&entries)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::invalid(
                "entries",
                format!("not positive semidefinite: min eigenvalue {min_eig:e}"),
            ));
        }
        Ok(DensityMatrix { entries })
    }

    /// Projector `|ψ⟩⟨ψ|` of a normalized mode state, embedded with a
    /// zero vacuum row and column.
    pub fn from_pure(state: &ModeState) -> Result<Self> {
        if !state.is_normalized() {
            return Err(Error::invalid(
                "state",
                "pure density matrices need a normalized state",
            ));
        }
        let n = state.len();
        let mut entries = DMatrix::<C64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                entries[(i + 1, j + 1)] = state.amplitude(i) * state.amplitude(j).conj();
            }
        }
        Ok(DensityMatrix { entries })
    }

    /// The all-vacuum state over `n_modes` guides.
    pub fn vacuum(n_modes: usize) -> Self {
        let mut entries = DMatrix::<C64>::zeros(n_modes + 1, n_modes + 1);
        entries[(0, 0)] = C64::new(1.0, 0.0);
        DensityMatrix { entries }
    }

    /// Full dimension (modes + vacuum).
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() - 1
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn vacuum_population(&self) -> f64 {
        self.entries[(0, 0)].re
    }

    /// Photon population of guide `mode` (0-based).
    pub fn population(&self, mode: usize) -> f64 {
        self.entries[(mode + 1, mode + 1)].re
    }

    /// The `n×n` single-excitation block.
    pub fn single_excitation_block(&self) -> DMatrix<C64> {
        let n = self.n_modes();
        self.entries.view((1, 1), (n, n)).into_owned()
    }

    /// Conjugation by the in-line phase shifter `exp(iφ)` on guide `mode`;
    /// leaves all invariants untouched.
    pub fn phase_shifted(&self, mode: usize, phi: f64) -> Result<Self> {
        if mode >= self.n_modes() {
            return Err(Error::invalid(
                "mode",
                format!("phase-shift mode {mode} out of range for {} guides", self.n_modes()),
            ));
        }
        let phase = (C64::i() * phi).exp();
        let b = mode + 1;
        let mut entries = self.entries.clone();
        for col in 0..self.dim() {
            entries[(b, col)] *= phase;
        }
        for row in 0..self.dim() {
            entries[(row, b)] *= phase.conj();
        }
        Ok(DensityMatrix { entries })
    }
}

/// Embeds the coupling matrix as the single-excitation block of the
/// Hamiltonian, with a zero row and column for the vacuum.
fn embedded_hamiltonian(m: &CouplingMatrix) -> DMatrix<C64> {
    let n = m.n();
    let mut h = DMatrix::<C64>::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            h[(i + 1, j + 1)] = C64::new(m.entries()[(i, j)], 0.0);
        }
    }
    h
}

fn lindblad_rhs_raw(rho: &DMatrix<C64>, h: &DMatrix<C64>, beta: f64) -> DMatrix<C64> {
    let dim = rho.nrows();
    let mut rhs = (h * rho - rho * h) * C64::new(0.0, -1.0);
    // -β (n_j ρ + ρ n_j) + 2β a_j ρ a†_j for each mode j
    for b in 1..dim {
        for col in 0..dim {
            rhs[(b, col)] -= beta * rho[(b, col)];
        }
        for row in 0..dim {
            rhs[(row, b)] -= beta * rho[(row, b)];
        }
        rhs[(0, 0)] += 2.0 * beta * rho[(b, b)];
    }
    rhs
}

/// Right-hand side of the master equation
/// `dρ/dz = -i[H,ρ] - β Σ_j (a†_j a_j ρ - 2 a_j ρ a†_j + ρ a†_j a_j)`.
///
/// The returned derivative is traceless and hermitian but is of course no
/// density matrix itself.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    m: &CouplingMatrix,
    loss: &LossParams,
) -> Result<DMatrix<C64>> {
    if rho.n_modes() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode density matrix against {}-guide lattice",
            rho.n_modes(),
            m.n()
        )));
    }
    Ok(lindblad_rhs_raw(rho.entries(), &embedded_hamiltonian(m), loss.beta()))
}

/// Suggested step count for [`integrate_master_equation`]: keeps the step
/// below [`DEFAULT_KZ_STEP`] for the fastest rate in the generator.
pub fn default_steps(m: &CouplingMatrix, loss: &LossParams, z: f64) -> usize {
    let max_bond = m
        .entries()
        .iter()
        .fold(0.0_f64, |acc, &x| acc.max(x.abs()));
    let rate = (2.0 * max_bond).max(2.0 * loss.beta()).max(1.0);
    ((z.abs() * rate / DEFAULT_KZ_STEP).ceil() as usize).max(1)
}

/// Fixed-step classical 4th-order integration of the master equation from
/// 0 to `z` in `steps` steps.
///
/// Fails with a numeric error suggesting more steps if the result leaves
/// the density-matrix invariants.
pub fn integrate_master_equation(
    rho0: &DensityMatrix,
    m: &CouplingMatrix,
    loss: &LossParams,
    z: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if rho0.n_modes() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode density matrix against {}-guide lattice",
            rho0.n_modes(),
            m.n()
        )));
    }
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    if z < 0.0 || !z.is_finite() {
        return Err(Error::invalid("z", format!("propagation length {z}")));
    }
    let h = embedded_hamiltonian(m);
    let beta = loss.beta();
    let dt = z / steps as f64;
    let half = C64::new(0.5 * dt, 0.0);
    let mut rho = rho0.entries().clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs_raw(&rho, &h, beta);
        let k2 = lindblad_rhs_raw(&(&rho + &k1 * half), &h, beta);
        let k3 = lindblad_rhs_raw(&(&rho + &k2 * half), &h, beta);
        let k4 = lindblad_rhs_raw(&(&rho + &k3 * C64::new(dt, 0.0)), &h, beta);
        rho += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
            * C64::new(dt / 6.0, 0.0);
    }
    DensityMatrix::new(rho).map_err(|e| {
        Error::numeric(
            format!("integration violated the density-matrix invariants ({e}); increase steps"),
            dt,
        )
    })
}

/// Uhlmann fidelity `F = [Tr √(√σ ρ √σ)]²`.
///
/// When either argument is pure within 1e-12 the equivalent fast path
/// `⟨ψ|ρ|ψ⟩` is used; the two routes agree to 1e-10.
pub fn fidelity(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density matrices of dimension {} and {}",
            sigma.dim(),
            rho.dim()
        )));
    }
    let purity = |d: &DensityMatrix| (d.entries() * d.entries()).trace().re;
    if purity(sigma) >= 1.0 - 1e-12 {
        return pure_state_fidelity(sigma, rho);
    }
    if purity(rho) >= 1.0 - 1e-12 {
        return pure_state_fidelity(rho, sigma);
    }
    uhlmann_fidelity(sigma, rho)
}

/// The general route: `F = (Σ √eig(√σ ρ √σ))²`.
fn uhlmann_fidelity(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    let eig = SymmetricEigen::try_new(sigma.entries().clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numeric("hermitian eigensolver did not converge", f64::NAN))?;
    let dim = sigma.dim();
    let mut sqrt_sigma = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.eigenvectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                sqrt_sigma[(i, j)] += C64::new(lam, 0.0) * v[i] * v[j].conj();
            }
        }
    }
    let a = &sqrt_sigma * rho.entries() * &sqrt_sigma;
    let lambdas = hermitian_eigenvalues(&a)?;
    // rank-deficient products leave noise eigenvalues near ε·λ_max whose
    // square roots would pollute the sum at the 1e-8 level; cut below a
    // relative threshold instead of just clamping the sign
    let lam_max = lambdas.iter().fold(0.0_f64, |acc, &l| acc.max(l));
    let cutoff = lam_max * 1e-13;
    let sum_sqrt: f64 = lambdas
        .into_iter()
        .filter(|&l| l > cutoff)
        .map(f64::sqrt)
        .sum();
    Ok((sum_sqrt * sum_sqrt).clamp(0.0, 1.0))
}

fn pure_state_fidelity(pure: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    let eig = SymmetricEigen::try_new(pure.entries().clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numeric("hermitian eigensolver did not converge", f64::NAN))?;
    let mut which = 0;
    for k in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[k] > eig.eigenvalues[which] {
            which = k;
        }
    }
    let psi = eig.eigenvectors.column(which);
    let mut f = C64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            f += psi[i].conj() * rho.entries()[(i, j)] * psi[j];
        }
    }
    Ok(f.re.clamp(0.0, 1.0))
}

/// Fidelity of the lossy generation against the lossless target at the
/// design length `z*(s)`, for each ratio in `beta_over_k` (returned in
/// input order).
///
/// Both branches include the compensating middle-guide phase shift, so
/// the reference is the zero-phase perfect W-state.
pub fn sweep_fidelity_vs_loss(
    s: f64,
    beta_over_k: &[f64],
    k: f64,
) -> Result<Vec<(f64, f64)>> {
    let gamma = design::gamma_for(s)?;
    let spec = CouplingSpec::new(3, vec![1.0, gamma], k)?;
    let m = build_coupling_matrix(&spec);
    let kz_star = design::kz_for(s)?;
    let z_star = design::physical_length(kz_star, k)?;

    let psi0 = ModeState::injection(3, 1)?;
    let lossless = evolve(&psi0, &m, z_star)?;
    let phi = design::compensating_phase(&lossless)?;
    let target = design::target_state(&design::WTarget::new(s, 0.0, 0.0)?);
    let sigma = DensityMatrix::from_pure(&target)?;
    let rho0 = DensityMatrix::from_pure(&psi0)?;

    let mut out = Vec::with_capacity(beta_over_k.len());
    for &ratio in beta_over_k {
        let loss = LossParams::from_ratio(ratio, k)?;
        let steps = default_steps(&m, &loss, z_star);
        let rho = integrate_master_equation(&rho0, &m, &loss, z_star, steps)?;
        let rho = rho.phase_shifted(1, phi)?;
        out.push((ratio, fidelity(&sigma, &rho)?));
    }
    Ok(out)
}
