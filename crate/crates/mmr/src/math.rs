//! Small numeric helpers shared across modules.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// x·log2(x) with the convention 0·log 0 := 0.
pub(crate) fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy H(p) = -p log2 p - (1-p) log2 (1-p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = -xlog2(p) - xlog2(1.0 - p);
    h.max(0.0)
}

/// Exact binomial coefficient as f64. Exact for n ≤ 62; callers stay far
/// below that (dense expansions cap at n = 24).
pub(crate) fn binomial_f64(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// ln C(n, k) via a cumulative ln-factorial table; stable for large n where
/// the coefficient itself overflows f64.
pub(crate) fn ln_binomial_table(n: usize) -> Vec<f64> {
    let mut lnfact = vec![0.0; n + 1];
    for i in 1..=n {
        lnfact[i] = lnfact[i - 1] + (i as f64).ln();
    }
    lnfact
}

pub(crate) fn ln_binomial(lnfact: &[f64], n: usize, k: usize) -> f64 {
    lnfact[n] - lnfact[k] - lnfact[n - k]
}

/// Eigenvalues of the 2x2 Hermitian matrix [[r00, off], [conj(off), r11]],
/// ascending.
pub(crate) fn hermitian2_eigenvalues(r00: f64, r11: f64, off: C64) -> (f64, f64) {
    let tr = r00 + r11;
    let disc = ((r00 - r11).powi(2) + 4.0 * off.norm_sqr()).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

/// Entropy in bits of a qubit density matrix given its two eigenvalues.
pub(crate) fn entropy_from_eigenvalues(l0: f64, l1: f64) -> f64 {
    (-xlog2(l0.max(0.0)) - xlog2(l1.max(0.0))).max(0.0)
}

/// Eigenvalues of a Hermitian matrix. nalgebra's QL iteration occasionally
/// emits ±inf on heavily rank-deficient complex inputs (observed on post-loss
/// density matrices of adjacent Dicke pairs); when any eigenvalue is
/// non-finite, recompute with an unconditionally convergent cyclic Jacobi
/// sweep.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|l| l.is_finite()) {
        return eig.eigenvalues.iter().copied().collect();
    }
    jacobi_hermitian_eigenvalues(m)
}

fn jacobi_hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let gamma = a[(p, q)];
                let mag = gamma.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let u = gamma / mag;
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * u.conj() * akq;
                    a[(k, q)] = s * u * akp + c * akq;
                }
                for k in 0..n {
                    a[(p, k)] = a[(k, p)].conj();
                    a[(q, k)] = a[(k, q)].conj();
                }
                a[(p, p)] = C64::new(alpha - t * mag, 0.0);
                a[(q, q)] = C64::new(beta + t * mag, 0.0);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    (0..n).map(|i| a[(i, i)].re).collect()
}

/// SplitMix64 step, used to derive independent per-case RNG seeds from a
/// single user seed without correlating streams.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
