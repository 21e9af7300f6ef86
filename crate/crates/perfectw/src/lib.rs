//! Single-photon perfect W-states in coupled-waveguide lattices:
//! simulation, inverse design, loss modelling, and nonlocality
//! certification.
//!
//! The asymmetric three-mode state
//! `(|100⟩ + √s·e^{iΦ₁}|010⟩ + √(s+1)·e^{iΦ₂}|001⟩)/√(2+2s)` supports
//! perfect teleportation and superdense coding, unlike the maximally
//! entangled W-state. A photon injected into the middle guide of a
//! three-guide array with bond weights `(1, √(s+1))` evolves into exactly
//! this state (up to a correctable phase) after a propagation length
//! `kz* = arctan(√((s+2)/s))/√(s+2)`.
//!
//! - [`lattice`] — coupling matrices and exact unitary propagation for
//!   `n`-guide arrays.
//! - [`design`] — bond ratios, generation lengths, guide separations, and
//!   recurrence positions for any asymmetry `s > 0`.
//! - [`loss`] — Lindblad photon-loss dynamics on the vacuum +
//!   single-excitation subspace and Uhlmann fidelity reporting.
//! - [`nonlocality`] — Hardy sometimes-always-never certification and the
//!   Bell-CH inequality.
//! - [`cli`] — the machinery behind the `perfectw` binary (deterministic
//!   CSV/JSON tables, state and config files).
//!
//! The `examples/` directory exercises each capability end to end; start
//! with `design_lattice` and `evolve_wavefunction`.

pub mod cli;
pub mod design;
pub mod error;
pub mod lattice;
pub mod loss;
pub mod nonlocality;

pub use design::{DesignSolution, RecurrencePoint, WTarget};
pub use error::{Error, Result};
pub use lattice::{
    apply_phase_shift, build_coupling_matrix, closed_form_evolution_s1, closed_form_evolution_s2,
    equal_up_to_global_phase, evolution_operator, evolve, CouplingMatrix, CouplingSpec,
    EvolutionOperator, ModeState,
};
pub use loss::{
    fidelity, integrate_master_equation, lindblad_rhs, sweep_fidelity_vs_loss, DensityMatrix,
    LossParams,
};
pub use nonlocality::{
    alpha_star, hardy_certificate, hardy_ladder_report, joint_probability, Basis,
    HardyCertificate, HardyLadderReport, MeasurementSetting, Outcome, QubitEmbedding,
};
