//! Entanglement quantifiers across the qubit|MSS cut.
//!
//! Pure states are scored with the Von Neumann entropy of the qubit's
//! reduced density matrix (bits); mixed states after particle loss with the
//! negativity, the summed magnitude of negative eigenvalues of the partial
//! transpose. Negativity is 1/2 for a maximally entangled qubit pair.
//!
//! Caveat: outside 2x2 and 2x3 systems, zero negativity does not imply
//! separability; nonzero negativity still certifies entanglement. Nothing
//! here resolves that asymmetry, it is inherited by every consumer.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::math::{entropy_from_eigenvalues, hermitian2_eigenvalues};
use crate::noise::BipartiteDensity;
use crate::states::{MicroMacroState, NORM_TOL};

pub use crate::math::binary_entropy;

/// Eigenvalues above -EIGEN_CUTOFF are treated as nonnegative noise from the
/// Hermitian eigensolve.
pub const DEFAULT_EIGEN_CUTOFF: f64 = 1e-12;

/// Von Neumann entropy across the qubit|rest cut, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue {
    pub bits: f64,
}

/// Negativity with the eigenvalue cutoff that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativityValue {
    pub value: f64,
    pub eigen_cutoff: f64,
}

/// Entropy of a qubit density matrix [[r00, r01], [r10, r11]].
pub fn entropy_from_qubit_density(rho: &[[C64; 2]; 2]) -> EntropyValue {
    let (l0, l1) = hermitian2_eigenvalues(rho[0][0].re, rho[1][1].re, rho[0][1]);
    EntropyValue {
        bits: entropy_from_eigenvalues(l0, l1),
    }
}

/// Entanglement entropy of a pure qubit-MSS state across the qubit|rest
/// cut. The cut is always taken on the qubit side, so only the 2x2 reduced
/// matrix is ever diagonalized.
pub fn entanglement_entropy(state: &MicroMacroState) -> Result<EntropyValue> {
    let [a0, a1] = state.qubit_amplitudes();
    let norm = a0.norm_sqr() + a1.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::domain(format!(
            "state not normalized: |a|^2 = {norm}"
        )));
    }
    Ok(entropy_from_qubit_density(&state.qubit_reduced()))
}

/// Partial transpose with respect to the qubit of a (2d)x(2d) matrix in
/// qubit-major ordering: the off-diagonal qubit blocks swap.
pub fn partial_transpose_qubit(rho: &DMatrix<C64>, mss_dim: usize) -> DMatrix<C64> {
    let d = mss_dim;
    debug_assert_eq!(rho.nrows(), 2 * d);
    let mut pt = rho.clone();
    for i in 0..d {
        for j in 0..d {
            pt[(i, d + j)] = rho[(d + i, j)];
            pt[(d + i, j)] = rho[(i, d + j)];
        }
    }
    pt
}

/// Negativity of a qubit-MSS density matrix with the default eigenvalue
/// cutoff.
pub fn negativity(rho: &BipartiteDensity) -> NegativityValue {
    negativity_with_cutoff(rho, DEFAULT_EIGEN_CUTOFF)
}

/// Negativity Σ|λ| over eigenvalues λ < -cutoff of the partial transpose
/// with respect to the qubit.
pub fn negativity_with_cutoff(rho: &BipartiteDensity, cutoff: f64) -> NegativityValue {
    let pt = partial_transpose_qubit(rho.matrix(), rho.mss_dim());
    let value = crate::math::hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|l| *l < -cutoff)
        .map(|l| -l)
        .sum();
    NegativityValue {
        value,
        eigen_cutoff: cutoff,
    }
}
