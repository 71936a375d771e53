//! Closed-form robustness quantities for QA-symmetric micro-macro states,
//! their small-distinctness series expansions, the average-entropy objective
//! over general per-spin marginals, its analytic gradient and Hessian
//! spectrum at the symmetric point, and the resulting upper bound.
//!
//! Everything is a function of the per-spin ↑ probabilities alone. All
//! entropies are in bits and 0·log 0 := 0 throughout, so the GHZ corners
//! (p ∈ {0, 1}) are well defined.

mod optim;

pub use optim::{
    maximize_avg_ev, maximize_avg_ev_runs, project_onto_box_sum, random_feasible_marginals,
    OptimRun, OptimizerConfig,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math::{binary_entropy, xlog2};
use crate::states::SpinMarginals;

const LN_2: f64 = std::f64::consts::LN_2;

/// Branch probabilities, branch entropies and their average for a
/// QA-symmetric pair with per-spin ↑ probabilities (p0, p1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricBranchReport {
    pub p0_up: f64,
    pub p1_up: f64,
    pub e_up: f64,
    pub e_down: f64,
    pub prob_up: f64,
    pub prob_down: f64,
    pub avg: f64,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Post-measurement branch entropies for a QA-symmetric pair:
/// E↑ = H(p0/(p0+p1)), E↓ = H((1-p0)/(2-p0-p1)), weighted by
/// P↑ = (p0+p1)/2. A zero-probability branch reports entropy 0.
pub fn symmetric_branch_report(p0_up: f64, p1_up: f64) -> Result<SymmetricBranchReport> {
    check_probability("p0_up", p0_up)?;
    check_probability("p1_up", p1_up)?;
    let s = p0_up + p1_up;
    let prob_up = s / 2.0;
    let prob_down = 1.0 - prob_up;
    let e_up = if s > 0.0 {
        binary_entropy(p0_up / s)
    } else {
        0.0
    };
    let t = 2.0 - s;
    let e_down = if t > 0.0 {
        binary_entropy((1.0 - p0_up) / t)
    } else {
        0.0
    };
    Ok(SymmetricBranchReport {
        p0_up,
        p1_up,
        e_up,
        e_down,
        prob_up,
        prob_down,
        avg: prob_up * e_up + prob_down * e_down,
    })
}

/// Post-loss negativity of a QA-symmetric pair,
/// ½(√(p0·p1) + √((1-p0)(1-p1))).
///
/// Valid when the four post-loss branch components are mutually orthogonal;
/// Dicke pairs with |k0 - k1| = 1 violate that premise (see
/// [`crate::oracle::adjacent_dicke_loss_negativity`]).
pub fn negativity_symmetric(p0_up: f64, p1_up: f64) -> Result<f64> {
    check_probability("p0_up", p0_up)?;
    check_probability("p1_up", p1_up)?;
    Ok(0.5 * ((p0_up * p1_up).sqrt() + ((1.0 - p0_up) * (1.0 - p1_up)).sqrt()))
}

/// Truncated expansion of the average branch entropy in the normalized
/// distinctness d = ΔM/N at normalized center m = M̄/N:
/// 1 - d²(1 + 4m² + d²/6)/(2 ln 2). Accurate for small d only.
pub fn series_ev(dm_over_n: f64, mbar_over_n: f64) -> f64 {
    let d2 = dm_over_n * dm_over_n;
    1.0 - d2 * (1.0 + 4.0 * mbar_over_n * mbar_over_n + d2 / 6.0) / (2.0 * LN_2)
}

/// Truncated expansion of the post-loss negativity:
/// ½ - d²(¼ + m² + d²/16).
pub fn series_neg(dm_over_n: f64, mbar_over_n: f64) -> f64 {
    let d2 = dm_over_n * dm_over_n;
    0.5 - d2 * (0.25 + mbar_over_n * mbar_over_n + d2 / 16.0)
}

/// Average entropy left after measuring spin j, for one spin with marginals
/// (x, y): the direct log-sum form of prob·entropy over both outcomes.
pub(crate) fn per_spin_avg_entropy(x: f64, y: f64) -> f64 {
    let s = x + y;
    let t = 2.0 - s;
    let mut acc = 0.0;
    if s > 0.0 {
        acc -= xlog2(x) + xlog2(y) - (x + y) * s.log2();
    }
    if t > 0.0 {
        acc -= xlog2(1.0 - x) + xlog2(1.0 - y) - (2.0 - x - y) * t.log2();
    }
    acc / 2.0
}

pub(crate) fn avg_entropy_of_slices(p0: &[f64], p1: &[f64]) -> f64 {
    let n = p0.len() as f64;
    p0.iter()
        .zip(p1)
        .map(|(&x, &y)| per_spin_avg_entropy(x, y))
        .sum::<f64>()
        / n
}

/// Average post-measurement entropy over all spins for general marginals:
/// (1/N) Σ_j Ē_Vj.
pub fn avg_ev_general(m: &SpinMarginals) -> f64 {
    avg_entropy_of_slices(m.p0_up(), m.p1_up())
}

fn log_term(x: f64, y: f64) -> f64 {
    (x / (x + y)).log2() - ((1.0 - x) / (2.0 - x - y)).log2()
}

/// Analytic gradient of [`avg_ev_general`] in the 2N-2 independent
/// coordinates (p0j, p1j), j = 1..N-1, with the last spin's marginals
/// dependent through the fixed totals. Vanishes at uniform marginals.
pub fn ev_gradient(m: &SpinMarginals) -> Result<Vec<f64>> {
    let (p0, p1) = (m.p0_up(), m.p1_up());
    let n = m.n();
    if n < 2 {
        return Err(Error::domain("gradient needs at least 2 spins"));
    }
    for p in p0.iter().chain(p1) {
        if *p <= 0.0 || *p >= 1.0 {
            return Err(Error::domain(format!(
                "gradient requires marginals strictly inside (0, 1), got {p}"
            )));
        }
    }
    let scale = -1.0 / (2.0 * n as f64);
    let (x_n, y_n) = (p0[n - 1], p1[n - 1]);
    let mut g = Vec::with_capacity(2 * (n - 1));
    for j in 0..n - 1 {
        g.push(scale * (log_term(p0[j], p1[j]) - log_term(x_n, y_n)));
    }
    for j in 0..n - 1 {
        g.push(scale * (log_term(p1[j], p0[j]) - log_term(y_n, x_n)));
    }
    Ok(g)
}

/// Coefficients of the Hessian block pattern at the symmetric point.
fn hessian_coefficients(p0: f64, p1: f64) -> Result<(f64, f64, f64)> {
    for p in [p0, p1] {
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::domain(format!(
                "Hessian requires probabilities strictly inside (0, 1), got {p}"
            )));
        }
    }
    let s = p0 + p1;
    let t = 2.0 - s;
    let a = p1 / (p0 * s) + (1.0 - p1) / ((1.0 - p0) * t);
    let b = p0 / (p1 * s) + (1.0 - p0) / ((1.0 - p1) * t);
    let c = -1.0 / s - 1.0 / t;
    Ok((a, b, c))
}

/// Eigenvalues below this count as strictly negative; at p0 = p1 the small
/// pair collapses to zero up to rounding and must not register as negative.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-12;

/// Eigenvalues of the summed-entropy Hessian N·Ē_V at uniform marginals
/// (p0, p1), as (value, multiplicity) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianSpectrum {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub eigenvalues: Vec<(f64, usize)>,
    /// Every eigenvalue below -[`NEGATIVE_EIGEN_TOL`].
    pub all_negative: bool,
}

impl HessianSpectrum {
    /// Total multiplicity, 2N-2 for N spins.
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|(_, m)| m).sum()
    }
}

/// Closed-form Hessian spectrum of the summed objective Σ_j Ē_Vj (N times
/// the average) at the uniform point. The block pattern (a, b, c) ⊗ (I + J)
/// yields -(μ/(4 ln 2))(a + b ∓ √((a-b)² + 4c²)) with μ = 1 repeated N-2
/// times and μ = N once, for each sign.
pub fn hessian_spectrum(n: usize, p0: f64, p1: f64) -> Result<HessianSpectrum> {
    if n < 2 {
        return Err(Error::domain("Hessian spectrum needs at least 2 spins"));
    }
    let (a, b, c) = hessian_coefficients(p0, p1)?;
    let root = ((a - b).powi(2) + 4.0 * c * c).sqrt();
    let base = -1.0 / (4.0 * LN_2);
    let mut eigenvalues = Vec::new();
    if n > 2 {
        eigenvalues.push((base * (a + b - root), n - 2));
        eigenvalues.push((base * (a + b + root), n - 2));
    }
    eigenvalues.push((n as f64 * base * (a + b - root), 1));
    eigenvalues.push((n as f64 * base * (a + b + root), 1));
    let all_negative = eigenvalues.iter().all(|(v, _)| *v < -NEGATIVE_EIGEN_TOL);
    Ok(HessianSpectrum {
        a,
        b,
        c,
        eigenvalues,
        all_negative,
    })
}

/// Explicit (2N-2)x(2N-2) Hessian of Σ_j Ē_Vj at uniform marginals, the
/// block pattern [[a(I+J), c(I+J)], [c(I+J), b(I+J)]] scaled by -1/(2 ln 2).
pub fn assemble_hessian(n: usize, p0: f64, p1: f64) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::domain("Hessian needs at least 2 spins"));
    }
    let (a, b, c) = hessian_coefficients(p0, p1)?;
    let m = n - 1;
    let scale = -1.0 / (2.0 * LN_2);
    let mut h = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let bump = if i == j { 2.0 } else { 1.0 };
            h[(i, j)] = scale * a * bump;
            h[(m + i, m + j)] = scale * b * bump;
            h[(i, m + j)] = scale * c * bump;
            h[(m + i, j)] = scale * c * bump;
        }
    }
    Ok(h)
}

/// (a+b)² - ((a-b)² + 4c²) evaluated directly from the coefficients.
pub fn hessian_gap(p0: f64, p1: f64) -> Result<f64> {
    let (a, b, c) = hessian_coefficients(p0, p1)?;
    Ok((a + b).powi(2) - ((a - b).powi(2) + 4.0 * c * c))
}

/// The algebraically reduced gap,
/// 4(p0-p1)² / (p0 p1 (1-p0)(1-p1)(p0+p1)(2-p0-p1)).
/// Strictly positive for interior p0 ≠ p1, including p0 + p1 = 1.
pub fn hessian_gap_reduced(p0: f64, p1: f64) -> f64 {
    4.0 * (p0 - p1).powi(2) / (p0 * p1 * (1.0 - p0) * (1.0 - p1) * (p0 + p1) * (2.0 - p0 - p1))
}

/// A competing reduction that carries an extra (1-p0-p1)² factor and would
/// vanish on the whole line p0 + p1 = 1. Kept so the certificate can state
/// which expression the numerics support.
pub fn hessian_gap_with_spurious_factor(p0: f64, p1: f64) -> f64 {
    hessian_gap_reduced(p0, p1) * (1.0 - p0 - p1).powi(2)
}

/// Largest attainable average post-measurement entropy for fixed normalized
/// magnetizations m0 = M0/N and m1 = M1/N; attained by uniform marginals
/// p = ½ + m.
pub fn ev_max(m0_over_n: f64, m1_over_n: f64) -> Result<f64> {
    for m in [m0_over_n, m1_over_n] {
        if !(-0.5..=0.5).contains(&m) {
            return Err(Error::domain(format!(
                "normalized magnetization {m} outside [-1/2, 1/2]"
            )));
        }
    }
    Ok(symmetric_branch_report(0.5 + m0_over_n, 0.5 + m1_over_n)?.avg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{sector_loss_negativity, sector_measure_entropy};
    use crate::states::MicroMacroState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn branch_report_balanced_pair() {
        let r = symmetric_branch_report(0.5, 0.5).unwrap();
        assert_eq!(r.e_up, 1.0);
        assert_eq!(r.e_down, 1.0);
        assert_eq!(r.avg, 1.0);
    }

    #[test]
    fn branch_report_ghz_corner() {
        let r = symmetric_branch_report(1.0, 0.0).unwrap();
        assert_eq!(r.e_up, 0.0);
        assert_eq!(r.e_down, 0.0);
        assert_eq!(r.avg, 0.0);
        assert_eq!(r.prob_up, 0.5);

        // degenerate corner: both probabilities zero
        let r = symmetric_branch_report(0.0, 0.0).unwrap();
        assert_eq!(r.prob_up, 0.0);
        assert_eq!(r.e_up, 0.0);
        assert_eq!(r.avg, 1.0); // the ↓ branch is balanced
    }

    #[test]
    fn branch_report_skewed_pair_matches_sector_oracle() {
        let r = symmetric_branch_report(0.9, 0.1).unwrap();
        // frozen: H(0.9), checked against the N = 20 sector oracle below
        assert_abs_diff_eq!(r.e_up, 0.4689955935892811, epsilon = 1e-14);
        assert_abs_diff_eq!(r.prob_up, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.avg, 0.4689955935892811, epsilon = 1e-14);

        let s = MicroMacroState::dicke_pair(20, 18, 2).unwrap();
        let stats = sector_measure_entropy(&s).unwrap();
        assert_abs_diff_eq!(stats.average, r.avg, epsilon = 1e-12);
    }

    #[test]
    fn branch_report_rejects_out_of_range() {
        assert!(symmetric_branch_report(-0.1, 0.5).is_err());
        assert!(symmetric_branch_report(0.5, 1.2).is_err());
    }

    #[test]
    fn branch_report_internal_identity() {
        for (p0, p1) in [(0.3, 0.8), (0.0, 1.0), (0.62, 0.62), (0.999, 0.001)] {
            let r = symmetric_branch_report(p0, p1).unwrap();
            assert_eq!(r.prob_up + r.prob_down, 1.0);
            assert_abs_diff_eq!(
                r.avg,
                r.prob_up * r.e_up + r.prob_down * r.e_down,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn dicke_reduction_is_termwise() {
        // report at (k0/N, k1/N) reproduces the Dicke branch formulas built
        // from the integers directly
        for n in 2..=9usize {
            for k0 in 0..=n {
                for k1 in 0..=n {
                    let (p0, p1) = (k0 as f64 / n as f64, k1 as f64 / n as f64);
                    let r = symmetric_branch_report(p0, p1).unwrap();
                    let s = (k0 + k1) as f64;
                    let e_up = if s > 0.0 {
                        binary_entropy(k0 as f64 / s)
                    } else {
                        0.0
                    };
                    let t = (2 * n - k0 - k1) as f64;
                    let e_down = binary_entropy((n - k0) as f64 / t);
                    assert_abs_diff_eq!(r.prob_up, s / (2.0 * n as f64), epsilon = 1e-14);
                    assert_abs_diff_eq!(r.e_up, e_up, epsilon = 1e-13);
                    assert_abs_diff_eq!(r.e_down, e_down, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn negativity_symmetric_examples() {
        for p in [0.0, 0.25, 0.5, 0.9] {
            assert_abs_diff_eq!(negativity_symmetric(p, p).unwrap(), 0.5, epsilon = 1e-15);
        }
        assert_eq!(negativity_symmetric(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            negativity_symmetric(0.9, 0.1).unwrap(),
            0.3,
            epsilon = 1e-15
        );
        // matches the sector oracle on a separated Dicke pair at N = 20
        let s = MicroMacroState::dicke_pair(20, 18, 2).unwrap();
        assert_abs_diff_eq!(
            sector_loss_negativity(&s).unwrap(),
            negativity_symmetric(0.9, 0.1).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn series_ev_examples() {
        assert_eq!(series_ev(0.0, 0.37), 1.0);
        // d = 0.2 at center: compare with the exact average at (0.6, 0.4)
        let exact = symmetric_branch_report(0.6, 0.4).unwrap().avg;
        assert_abs_diff_eq!(exact, 0.9709505944546686, epsilon = 1e-14); // H(0.6)
        let series = series_ev(0.2, 0.0);
        assert!((series - exact).abs() < 1e-4);
        // the truncation is not valid at d = 1: series stays far from the
        // exact value 0
        let at_one = series_ev(1.0, 0.0);
        assert_abs_diff_eq!(at_one, 0.1584278928147712, epsilon = 1e-14);
        assert_eq!(symmetric_branch_report(1.0, 0.0).unwrap().avg, 0.0);
    }

    #[test]
    fn series_neg_examples() {
        assert_eq!(series_neg(0.0, 0.3), 0.5);
        let series = series_neg(0.2, 0.0);
        assert_abs_diff_eq!(series, 0.4899, epsilon = 1e-12);
        let exact = negativity_symmetric(0.6, 0.4).unwrap();
        assert_abs_diff_eq!(exact, 0.4898979485566356, epsilon = 1e-14); // √0.24
        assert!((series - exact).abs() < 1e-5);

        let series = series_neg(0.4, 0.1);
        assert_abs_diff_eq!(series, 0.4568, epsilon = 1e-12);
        let exact = negativity_symmetric(0.8, 0.4).unwrap();
        assert!((series - exact).abs() < 1e-3);
    }

    #[test]
    fn series_quadratic_coefficients() {
        for d in [0.1, 0.05, 0.025] {
            let avg = symmetric_branch_report(0.5 + d / 2.0, 0.5 - d / 2.0)
                .unwrap()
                .avg;
            let coeff = (1.0 - avg) / (d * d);
            assert!((coeff - 1.0 / (2.0 * LN_2)).abs() / (1.0 / (2.0 * LN_2)) < 0.01);

            let neg = negativity_symmetric(0.5 + d / 2.0, 0.5 - d / 2.0).unwrap();
            let coeff = (0.5 - neg) / (d * d);
            assert!((coeff - 0.25).abs() / 0.25 < 0.01);
        }
    }

    #[test]
    fn avg_ev_general_examples() {
        // uniform marginals reduce to the symmetric report
        let m = SpinMarginals::uniform(5, 0.7, 0.2).unwrap();
        assert_abs_diff_eq!(
            avg_ev_general(&m),
            symmetric_branch_report(0.7, 0.2).unwrap().avg,
            epsilon = 1e-14
        );

        let m = SpinMarginals::new(vec![1.0, 0.5], vec![0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(avg_ev_general(&m), 0.5, epsilon = 1e-14);

        let m = SpinMarginals::new(vec![0.9, 0.2, 0.4], vec![0.9, 0.2, 0.4]).unwrap();
        assert_abs_diff_eq!(avg_ev_general(&m), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_uniform_marginals() {
        let m = SpinMarginals::uniform(6, 0.7, 0.3).unwrap();
        for g in ev_gradient(&m).unwrap() {
            assert!(g.abs() <= 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = SpinMarginals::new(vec![0.7, 0.6, 0.5], vec![0.3, 0.3, 0.3]).unwrap();
        let g = ev_gradient(&m).unwrap();
        let fd = finite_difference_gradient(&m, 1e-6);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn gradient_rejects_boundary_marginals() {
        let m = SpinMarginals::new(vec![1.0, 0.5], vec![0.2, 0.5]).unwrap();
        assert!(ev_gradient(&m).is_err());
    }

    #[test]
    fn objective_decreases_away_from_uniform() {
        let base = SpinMarginals::uniform(2, 0.6, 0.4).unwrap();
        let f0 = avg_ev_general(&base);
        for eps in [1e-3, -1e-3] {
            let m = SpinMarginals::new(vec![0.6 + eps, 0.6 - eps], vec![0.4, 0.4]).unwrap();
            assert!(avg_ev_general(&m) < f0);
        }
    }

    pub(super) fn finite_difference_gradient(m: &SpinMarginals, h: f64) -> Vec<f64> {
        let n = m.n();
        let eval = |z: &[f64]| {
            let mut p0 = z[..n - 1].to_vec();
            let mut p1 = z[n - 1..].to_vec();
            p0.push(m.m0() + n as f64 / 2.0 - p0.iter().sum::<f64>());
            p1.push(m.m1() + n as f64 / 2.0 - p1.iter().sum::<f64>());
            avg_entropy_of_slices(&p0, &p1)
        };
        let mut z: Vec<f64> = m.p0_up()[..n - 1].to_vec();
        z.extend_from_slice(&m.p1_up()[..n - 1]);
        (0..2 * (n - 1))
            .map(|i| {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[i] += h;
                zm[i] -= h;
                (eval(&zp) - eval(&zm)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn hessian_spectrum_reference_point() {
        let h = hessian_spectrum(4, 0.75, 0.25).unwrap();
        assert_abs_diff_eq!(h.a, 10.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.b, 10.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.c, -2.0, epsilon = 1e-14);
        let expect = [
            (-(8.0 / 3.0) / (4.0 * LN_2), 2usize),
            (-(32.0 / 3.0) / (4.0 * LN_2), 2),
            (-4.0 * (8.0 / 3.0) / (4.0 * LN_2), 1),
            (-4.0 * (32.0 / 3.0) / (4.0 * LN_2), 1),
        ];
        assert_eq!(h.eigenvalues.len(), 4);
        for ((got, gm), (want, wm)) in h.eigenvalues.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
            assert_eq!(*gm, wm);
        }
        assert_eq!(h.total_multiplicity(), 6); // 2N - 2
        assert!(h.all_negative); // note p0 + p1 = 1 here
    }

    #[test]
    fn hessian_equal_probabilities_have_zero_modes() {
        for p in [0.2, 0.5, 0.8] {
            let h = hessian_spectrum(5, p, p).unwrap();
            // c² = ab, so the a+b-root eigenvalues collapse to zero
            assert_abs_diff_eq!(h.c * h.c, h.a * h.b, epsilon = 1e-10);
            assert_abs_diff_eq!(h.eigenvalues[0].0, 0.0, epsilon = 1e-12);
            assert!(!h.all_negative);
        }
    }

    #[test]
    fn hessian_all_negative_inside() {
        let h = hessian_spectrum(3, 0.6, 0.4).unwrap();
        assert!(h.all_negative);
        assert_eq!(h.total_multiplicity(), 4);
    }

    #[test]
    fn hessian_spectrum_matches_assembled_matrix() {
        for n in 2..=8usize {
            for (p0, p1) in [(0.3, 0.8), (0.75, 0.25), (0.6, 0.4), (0.9, 0.2)] {
                let spec = hessian_spectrum(n, p0, p1).unwrap();
                let mut analytic: Vec<f64> = spec
                    .eigenvalues
                    .iter()
                    .flat_map(|(v, m)| std::iter::repeat_n(*v, *m))
                    .collect();
                analytic.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let mut dense: Vec<f64> = assemble_hessian(n, p0, p1)
                    .unwrap()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .copied()
                    .collect();
                dense.sort_by(|x, y| x.partial_cmp(y).unwrap());
                assert_eq!(analytic.len(), dense.len());
                for (a, d) in analytic.iter().zip(&dense) {
                    assert!((a - d).abs() < 1e-10, "n={n} ({p0},{p1}): {a} vs {d}");
                }
            }
        }
    }

    #[test]
    fn hessian_gap_identity_resolution() {
        // the direct gap matches the reduced expression everywhere tested,
        // and differs from the variant with the extra (1-p0-p1)² factor
        // except where that factor is 1
        for (p0, p1) in [(0.75, 0.25), (0.3, 0.8), (0.9, 0.4), (0.55, 0.45)] {
            let gap = hessian_gap(p0, p1).unwrap();
            let reduced = hessian_gap_reduced(p0, p1);
            assert!((gap - reduced).abs() <= 1e-9 * reduced.abs().max(1.0));
            let spurious = hessian_gap_with_spurious_factor(p0, p1);
            if (1.0 - p0 - p1).abs() > 1e-6 {
                assert!((gap - spurious).abs() > 1e-3 * gap.abs().max(1.0));
            } else {
                // on the line p0 + p1 = 1 the variant collapses to zero while
                // the true gap stays strictly positive
                assert!(spurious.abs() < 1e-20);
                assert!(gap > 0.1);
            }
        }
    }

    #[test]
    fn ev_max_examples() {
        // frozen: H(0.7)
        assert_abs_diff_eq!(
            ev_max(0.2, -0.2).unwrap(),
            0.8812908992306927,
            epsilon = 1e-14
        );
        for m in [-0.3, 0.0, 0.25] {
            assert_abs_diff_eq!(ev_max(m, m).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert_eq!(ev_max(0.5, -0.5).unwrap(), 0.0);
        assert!(ev_max(0.6, 0.0).is_err());
    }
}
