//! Independent brute-force ground truth.
//!
//! The dense engine realizes the joint qubit-MSS vector explicitly and
//! simulates measurement (projection) and loss (partial trace) in the full
//! Hilbert space; nothing here reuses the structured branch rules of the
//! noise module. The symmetric-sector engine performs the same simulations
//! exactly in the O(N)-dimensional Dicke basis, extending validation far
//! beyond dense reach. Sector results are themselves checked against dense
//! results at small N.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::math::{entropy_from_eigenvalues, hermitian2_eigenvalues};
use crate::states::MicroMacroState;

/// Joint vectors hold 2^(n+1) amplitudes; cap the MSS at 23 spins.
pub const DENSE_JOINT_MAX_SPINS: usize = 23;

/// Dense measurement/loss oracles stay below this spin count so density
/// matrices never exceed 2048x2048.
pub const DENSE_ORACLE_MAX_SPINS: usize = 10;

/// Explicit joint state over qubit ⊗ spins; the qubit is the most
/// significant bit of the basis index, spin 1 the next.
#[derive(Clone, Debug)]
pub struct DenseJointState {
    n_spins: usize,
    amplitudes: Vec<C64>,
}

impl DenseJointState {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// 2x2 reduced density matrix of the qubit.
    pub fn qubit_reduced(&self) -> [[C64; 2]; 2] {
        let d = 1usize << self.n_spins;
        let (b0, b1) = self.amplitudes.split_at(d);
        let dot =
            |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a * b.conj()).sum() };
        [[dot(b0, b0), dot(b0, b1)], [dot(b1, b0), dot(b1, b1)]]
    }

    /// Apply a 2x2 unitary to the qubit in place.
    pub fn apply_qubit_unitary(&mut self, u: &[[C64; 2]; 2]) {
        let d = 1usize << self.n_spins;
        for i in 0..d {
            let (x, y) = (self.amplitudes[i], self.amplitudes[d + i]);
            self.amplitudes[i] = u[0][0] * x + u[0][1] * y;
            self.amplitudes[d + i] = u[1][0] * x + u[1][1] * y;
        }
    }

    /// Partial trace over spin `j` (1-based), returning the dense density
    /// matrix over qubit ⊗ remaining spins in qubit-major ordering.
    pub fn trace_out_spin(&self, j: usize) -> Result<DMatrix<C64>> {
        let n = self.n_spins;
        if j == 0 || j > n {
            return Err(Error::domain(format!(
                "spin index {j} out of range 1..={n}"
            )));
        }
        let bit = n - j;
        let d = 1usize << n;
        let dd = 1usize << (n - 1);
        let insert = |rest: usize, s: usize| -> usize {
            let lo = rest & ((1 << bit) - 1);
            let hi = rest >> bit;
            (hi << (bit + 1)) | (s << bit) | lo
        };
        let mut rho = DMatrix::from_element(2 * dd, 2 * dd, C64::new(0.0, 0.0));
        for q in 0..2usize {
            for qq in 0..2usize {
                for r in 0..dd {
                    for rr in 0..dd {
                        let mut acc = C64::new(0.0, 0.0);
                        for s in 0..2usize {
                            let a = self.amplitudes[q * d + insert(r, s)];
                            let b = self.amplitudes[qq * d + insert(rr, s)];
                            acc += a * b.conj();
                        }
                        rho[(q * dd + r, qq * dd + rr)] = acc;
                    }
                }
            }
        }
        Ok(rho)
    }
}

/// Realize a micro-macro state as an explicit joint vector.
pub fn dense_joint(s: &MicroMacroState) -> Result<DenseJointState> {
    let n = s.n();
    if n > DENSE_JOINT_MAX_SPINS {
        return Err(Error::resource(format!(
            "dense joint state capped at {DENSE_JOINT_MAX_SPINS} spins, state has {n}"
        )));
    }
    let [a0, a1] = s.qubit_amplitudes();
    let v0 = s.psi0().to_dense()?;
    let v1 = s.psi1().to_dense()?;
    let mut amplitudes = Vec::with_capacity(2 << n);
    amplitudes.extend(v0.iter().map(|x| a0 * x));
    amplitudes.extend(v1.iter().map(|x| a1 * x));
    Ok(DenseJointState {
        n_spins: n,
        amplitudes,
    })
}

/// Per-outcome probabilities and entropies for one measured spin, plus the
/// probability-weighted average entropy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementStats {
    pub p_up: f64,
    pub p_down: f64,
    pub e_up: f64,
    pub e_down: f64,
    pub average: f64,
}

impl MeasurementStats {
    fn from_branches(p_up: f64, e_up: f64, p_down: f64, e_down: f64) -> Self {
        let average = p_up * e_up + p_down * e_down;
        MeasurementStats {
            p_up,
            p_down,
            e_up,
            e_down,
            average,
        }
    }
}

/// Dense oracle for measurement of spin `j`: project the joint vector onto
/// the two outcome subspaces, renormalize and read the qubit entropy.
pub fn dense_measure_entropy(s: &MicroMacroState, j: usize) -> Result<MeasurementStats> {
    let n = s.n();
    if n > DENSE_ORACLE_MAX_SPINS {
        return Err(Error::resource(format!(
            "dense measurement oracle capped at {DENSE_ORACLE_MAX_SPINS} spins, state has {n}"
        )));
    }
    if j == 0 || j > n {
        return Err(Error::domain(format!(
            "spin index {j} out of range 1..={n}"
        )));
    }
    let joint = dense_joint(s)?;
    let d = 1usize << n;
    let bit = n - j;
    let mut stats = [(0.0, 0.0); 2]; // (probability, entropy) for ↓, ↑
    for (want, st) in stats.iter_mut().enumerate() {
        let mut proj = vec![C64::new(0.0, 0.0); 2 * d];
        for (i, a) in joint.amplitudes().iter().enumerate() {
            if (i >> bit) & 1 == want {
                proj[i] = *a;
            }
        }
        let p: f64 = proj.iter().map(|a| a.norm_sqr()).sum();
        let entropy = if p > 0.0 {
            let scale = 1.0 / p.sqrt();
            for a in &mut proj {
                *a *= scale;
            }
            let projected = DenseJointState {
                n_spins: n,
                amplitudes: proj,
            };
            let r = projected.qubit_reduced();
            let (l0, l1) = hermitian2_eigenvalues(r[0][0].re, r[1][1].re, r[0][1]);
            entropy_from_eigenvalues(l0, l1)
        } else {
            0.0
        };
        *st = (p, entropy);
    }
    Ok(MeasurementStats::from_branches(
        stats[1].0, stats[1].1, stats[0].0, stats[0].1,
    ))
}

/// Dense oracle for loss of spin `j`: full partial trace, partial transpose
/// with respect to the qubit, Hermitian eigensolve.
pub fn dense_loss_negativity(s: &MicroMacroState, j: usize) -> Result<f64> {
    let n = s.n();
    if n > DENSE_ORACLE_MAX_SPINS {
        return Err(Error::resource(format!(
            "dense loss oracle capped at {DENSE_ORACLE_MAX_SPINS} spins, state has {n}"
        )));
    }
    let rho = dense_joint(s)?.trace_out_spin(j)?;
    Ok(negativity_of_matrix(&rho, 1usize << (n - 1)))
}

fn negativity_of_matrix(rho: &DMatrix<C64>, mss_dim: usize) -> f64 {
    let d = mss_dim;
    let mut pt = rho.clone();
    for i in 0..d {
        for j in 0..d {
            pt[(i, d + j)] = rho[(d + i, j)];
            pt[(d + i, j)] = rho[(i, d + j)];
        }
    }
    crate::math::hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|l| *l < -1e-12)
        .map(|l| -l)
        .sum()
}

fn sector_pair(s: &MicroMacroState) -> Result<(Vec<C64>, Vec<C64>)> {
    match (
        s.psi0().sector_coefficients(),
        s.psi1().sector_coefficients(),
    ) {
        (Some(c0), Some(c1)) => Ok((c0, c1)),
        _ => Err(Error::domain(
            "symmetric-sector oracle needs Dicke, Dicke-superposition or uniform-product forms",
        )),
    }
}

/// Symmetric-sector oracle for measurement. Permutation symmetry makes the
/// result independent of which spin is measured.
pub fn sector_measure_entropy(s: &MicroMacroState) -> Result<MeasurementStats> {
    let n = s.n();
    if n < 2 {
        return Err(Error::domain("measurement needs at least 2 spins"));
    }
    let (c0, c1) = sector_pair(s)?;
    let [a0, a1] = s.qubit_amplitudes();
    let nf = n as f64;
    let zero = C64::new(0.0, 0.0);
    let mut out = [(0.0, 0.0); 2]; // (probability, entropy) for ↓, ↑
    for (want, slot) in out.iter_mut().enumerate() {
        // unnormalized conditional vectors over sectors of the remaining spins
        let mut u = vec![[zero; 2]; n];
        for (q, (amp, coeffs)) in [(a0, &c0), (a1, &c1)].into_iter().enumerate() {
            for (k, c) in coeffs.iter().enumerate() {
                if want == 1 && k >= 1 {
                    u[k - 1][q] += amp * c * (k as f64 / nf).sqrt();
                } else if want == 0 && k < n {
                    u[k][q] += amp * c * ((nf - k as f64) / nf).sqrt();
                }
            }
        }
        let mut gram = [[zero; 2]; 2];
        for row in &u {
            for q in 0..2 {
                for qq in 0..2 {
                    gram[q][qq] += row[q] * row[qq].conj();
                }
            }
        }
        let p = gram[0][0].re + gram[1][1].re;
        let entropy = if p > 0.0 {
            let (l0, l1) =
                hermitian2_eigenvalues(gram[0][0].re / p, gram[1][1].re / p, gram[0][1] / p);
            entropy_from_eigenvalues(l0, l1)
        } else {
            0.0
        };
        *slot = (p, entropy);
    }
    Ok(MeasurementStats::from_branches(
        out[1].0, out[1].1, out[0].0, out[0].1,
    ))
}

/// Symmetric-sector oracle for loss of one spin.
pub fn sector_loss_negativity(s: &MicroMacroState) -> Result<f64> {
    let n = s.n();
    if n < 2 {
        return Err(Error::domain("loss needs at least 2 spins"));
    }
    let (c0, c1) = sector_pair(s)?;
    let [a0, a1] = s.qubit_amplitudes();
    let nf = n as f64;
    let zero = C64::new(0.0, 0.0);
    let mut w = [vec![[zero; 2]; n], vec![[zero; 2]; n]]; // ↓, ↑ conditionals
    for (q, (amp, coeffs)) in [(a0, &c0), (a1, &c1)].into_iter().enumerate() {
        for (k, c) in coeffs.iter().enumerate() {
            if k >= 1 {
                w[1][k - 1][q] += amp * c * (k as f64 / nf).sqrt();
            }
            if k < n {
                w[0][k][q] += amp * c * ((nf - k as f64) / nf).sqrt();
            }
        }
    }
    let sectors: Vec<usize> = (0..n)
        .filter(|&k| {
            w.iter()
                .any(|side| side[k][0].norm_sqr() + side[k][1].norm_sqr() > 0.0)
        })
        .collect();
    let d = sectors.len();
    let mut rho = DMatrix::from_element(2 * d, 2 * d, zero);
    for side in &w {
        let mut vec = vec![zero; 2 * d];
        for q in 0..2 {
            for (i, &k) in sectors.iter().enumerate() {
                vec[q * d + i] = side[k][q];
            }
        }
        for r in 0..2 * d {
            for c in 0..2 * d {
                rho[(r, c)] += vec[r] * vec[c].conj();
            }
        }
    }
    Ok(negativity_of_matrix(&rho, d))
}

/// Measurement oracle: dense for small states, symmetric-sector whenever
/// both components admit it.
pub fn oracle_measure_entropy(s: &MicroMacroState, j: usize) -> Result<MeasurementStats> {
    if sector_pair(s).is_ok() {
        sector_measure_entropy(s)
    } else {
        dense_measure_entropy(s, j)
    }
}

/// Loss oracle with the same dispatch as [`oracle_measure_entropy`].
pub fn oracle_loss_negativity(s: &MicroMacroState, j: usize) -> Result<f64> {
    if sector_pair(s).is_ok() {
        sector_loss_negativity(s)
    } else {
        dense_loss_negativity(s, j)
    }
}

/// Exact post-loss negativity of a Dicke pair with |k0 - k1| = 1.
///
/// For adjacent excitation numbers the ↑ image of one component and the ↓
/// image of the other land in the same Dicke sector, so the partial
/// transpose pairs each coherence with one occupied diagonal instead of two
/// empty ones. The general closed form in terms of (p0↑, p1↑) assumes those
/// diagonals vanish and overestimates the negativity; this is the rank-aware
/// value the dense oracle actually produces.
pub fn adjacent_dicke_loss_negativity(n: usize, k0: usize, k1: usize) -> Result<f64> {
    if k0.abs_diff(k1) != 1 {
        return Err(Error::domain("pair is not adjacent: |k0 - k1| must be 1"));
    }
    if k0 > n || k1 > n {
        return Err(Error::domain("excitation count out of range"));
    }
    // order so hi = lo + 1
    let (hi, lo) = if k0 > k1 { (k0, k1) } else { (k1, k0) };
    let (p_hi, p_lo) = (hi as f64 / n as f64, lo as f64 / n as f64);
    let mut total = 0.0;
    // ↑-branch coherence against the ↓-branch diagonal sharing sector hi-1 = lo
    let c = 0.5 * (p_hi * p_lo).sqrt();
    if c > 0.0 {
        let diag = (1.0 - p_lo) / 2.0;
        total += ((diag * diag + 4.0 * c * c).sqrt() - diag) / 2.0;
    }
    // ↓-branch coherence against the ↑-branch diagonal sharing sector hi
    let c = 0.5 * ((1.0 - p_hi) * (1.0 - p_lo)).sqrt();
    if c > 0.0 {
        let diag = p_hi / 2.0;
        total += ((diag * diag + 4.0 * c * c).sqrt() - diag) / 2.0;
    }
    Ok(total)
}
