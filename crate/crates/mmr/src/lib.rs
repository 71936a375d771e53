//! Micro-macro entangled spin states and their robustness to single-particle
//! noise.
//!
//! A micro-macro entangled state pairs a qubit with two states of a
//! mesoscopic N-spin system whose collective magnetizations differ by the
//! distinctness Λ. This crate constructs such states, applies single-spin
//! measurement and single-spin loss, and computes the quantities that govern
//! how much bipartite entanglement survives:
//!
//! - [`states`]: state representations (Dicke, Dicke superpositions,
//!   products, dense vectors), magnetization spectra, distinctness and
//!   per-spin marginals;
//! - [`noise`]: measurement branches and post-loss density matrices;
//! - [`measures`]: entanglement entropy and negativity;
//! - [`bounds`]: the closed-form branch entropies and negativity of
//!   QA-symmetric states, their small-distinctness expansions, the
//!   average-entropy objective over general marginals with its gradient and
//!   Hessian spectrum, the symmetric upper bound, and a projected-ascent
//!   maximizer that certifies it numerically;
//! - [`oracle`]: dense and symmetric-sector brute-force engines everything
//!   else is validated against;
//! - [`verify`]: the deterministic validation suites behind the CLI.

pub mod bounds;
pub mod document;
pub mod error;
mod math;
pub mod measures;
pub mod noise;
pub mod oracle;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use states::{
    MacroSummary, MagnetizationSpectrum, MicroMacroState, MssPureState, SpinMarginals,
};
