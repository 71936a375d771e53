//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them live).
//!
//! Criterion 4 is asserted exactly as specified over every Dicke pair and is
//! expected to stay red: Dicke pairs with |k0 - k1| = 1 place the ↑ image of
//! one component and the ↓ image of the other in the same sector, so the
//! symmetric loss formula's orthogonality premise fails and the dense
//! negativity genuinely deviates (by up to 0.227). The validity-scoped
//! sibling test covers the same grid green, checking adjacent pairs against
//! the exact rank-aware value instead.

use std::time::{Duration, Instant};

use mmr::bounds::{negativity_symmetric, symmetric_branch_report};
use mmr::oracle::{
    adjacent_dicke_loss_negativity, dense_loss_negativity, dense_measure_entropy,
    sector_loss_negativity, sector_measure_entropy,
};
use mmr::states::{overlap, MicroMacroState};
use mmr::verify::{bound_suite, hessian_suite, VerifyOptions};

const LN_2: f64 = std::f64::consts::LN_2;

fn report(criterion: &str, pass: bool, elapsed: Duration, detail: &str) {
    println!(
        "criterion {criterion}: {} [{:.2?}] {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_average_entropy_curve() {
    let start = Instant::now();
    let budget = Duration::from_secs(1);
    let n = 100usize;
    let mut prev = f64::INFINITY;
    let mut curve = Vec::new();
    for dk in (0..=n).step_by(2) {
        let k0 = n / 2 + dk / 2;
        let k1 = n / 2 - dk / 2;
        let avg = symmetric_branch_report(k0 as f64 / n as f64, k1 as f64 / n as f64)
            .unwrap()
            .avg;
        assert!(avg <= prev + 1e-12, "not monotone at dk={dk}");
        prev = avg;
        curve.push((dk as f64 / n as f64, avg));
    }
    assert_eq!(curve.first().unwrap().1, 1.0);
    assert_eq!(curve.last().unwrap().1, 0.0);
    // quadratic coefficient from the smallest positive grid point
    let (d, avg) = curve[1];
    let coeff = (1.0 - avg) / (d * d);
    let target = 1.0 / (2.0 * LN_2);
    let rel = (coeff - target).abs() / target;
    let pass = rel < 0.01 && start.elapsed() < budget;
    report(
        "1 (entropy curve)",
        pass,
        start.elapsed(),
        &format!("endpoints 1 and 0, monotone, quadratic coefficient off by {rel:.2e}"),
    );
}

#[test]
fn criterion_2_negativity_curve() {
    let start = Instant::now();
    let budget = Duration::from_secs(1);
    let grid = 51usize;
    let mut prev = f64::INFINITY;
    let mut curve = Vec::new();
    for i in 0..grid {
        let d = i as f64 / (grid - 1) as f64;
        let neg = negativity_symmetric(0.5 + d / 2.0, 0.5 - d / 2.0).unwrap();
        assert!(neg <= prev + 1e-12, "not monotone at d={d}");
        prev = neg;
        curve.push((d, neg));
    }
    assert_eq!(curve.first().unwrap().1, 0.5);
    assert_eq!(curve.last().unwrap().1, 0.0);
    let (d, neg) = curve[1];
    let coeff = (0.5 - neg) / (d * d);
    let rel = (coeff - 0.25).abs() / 0.25;
    let pass = rel < 0.01 && start.elapsed() < budget;
    report(
        "2 (negativity curve)",
        pass,
        start.elapsed(),
        &format!("endpoints 1/2 and 0, monotone, quadratic coefficient off by {rel:.2e}"),
    );
}

fn all_dicke_pairs(max_n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for k0 in 0..=n {
            for k1 in 0..=n {
                if k0 != k1 {
                    out.push((n, k0, k1));
                }
            }
        }
    }
    out
}

#[test]
fn criterion_3_measurement_oracle_equivalence() {
    let start = Instant::now();
    let budget = Duration::from_secs(120);
    let mut worst = 0.0f64;
    for (n, k0, k1) in all_dicke_pairs(8) {
        let s = MicroMacroState::dicke_pair(n, k0, k1).unwrap();
        let closed = symmetric_branch_report(k0 as f64 / n as f64, k1 as f64 / n as f64).unwrap();
        for j in 1..=n {
            let stats = dense_measure_entropy(&s, j).unwrap();
            worst = worst
                .max((stats.p_up - closed.prob_up).abs())
                .max((stats.p_down - closed.prob_down).abs())
                .max((stats.e_up - closed.e_up).abs())
                .max((stats.e_down - closed.e_down).abs())
                .max((stats.average - closed.avg).abs());
        }
    }
    let pass = worst <= 1e-9 && start.elapsed() < budget;
    report(
        "3 (measurement oracle)",
        pass,
        start.elapsed(),
        &format!("max |closed - dense| = {worst:.3e} over N = 2..=8, all pairs, all spins"),
    );
}

/// The criterion exactly as stated: every Dicke pair within 1e-9. Expected
/// red: adjacent pairs violate the closed form's orthogonality premise and
/// the dense oracle is right to disagree (see the scoped sibling test).
#[test]
fn criterion_4_loss_oracle_equivalence_as_stated() {
    let start = Instant::now();
    let mut worst_separated = 0.0f64;
    let mut violations = Vec::new();
    for (n, k0, k1) in all_dicke_pairs(8) {
        let s = MicroMacroState::dicke_pair(n, k0, k1).unwrap();
        let dense = dense_loss_negativity(&s, 1).unwrap();
        let closed = negativity_symmetric(k0 as f64 / n as f64, k1 as f64 / n as f64).unwrap();
        let dev = (dense - closed).abs();
        if dev > 1e-9 {
            violations.push((n, k0, k1, dev));
        } else {
            worst_separated = worst_separated.max(dev);
        }
    }
    let bound_ok = product_pair_error_bound_holds();
    let adjacent: Vec<_> = violations
        .iter()
        .filter(|(_, k0, k1, _)| k0.abs_diff(*k1) == 1)
        .collect();
    let max_dev = violations.iter().map(|v| v.3).fold(0.0f64, f64::max);
    let pass = violations.is_empty() && bound_ok;
    report(
        "4 (loss oracle, as stated)",
        pass,
        start.elapsed(),
        &format!(
            "{} of {} deviating pairs are adjacent (|k0-k1| = 1, max deviation {max_dev:.3e}); \
             separated pairs match to {worst_separated:.3e}; the closed form assumes the \
             post-loss branch sectors are disjoint, which fails exactly when k0-1 = k1; \
             the dense values match the rank-aware closed form to 1e-9 (see the scoped \
             criterion-4 test); product-pair error bound holds: {bound_ok}",
            adjacent.len(),
            violations.len(),
        ),
    );
}

/// The same grid with the closed form applied on its validity domain:
/// separated pairs within 1e-9, adjacent pairs against the exact rank-aware
/// value, and the product-pair error bound as stated.
#[test]
fn criterion_4_loss_oracle_equivalence_validity_scoped() {
    let start = Instant::now();
    let budget = Duration::from_secs(120);
    let mut worst = 0.0f64;
    for (n, k0, k1) in all_dicke_pairs(8) {
        let s = MicroMacroState::dicke_pair(n, k0, k1).unwrap();
        let dense = dense_loss_negativity(&s, 1).unwrap();
        let reference = if k0.abs_diff(k1) >= 2 {
            negativity_symmetric(k0 as f64 / n as f64, k1 as f64 / n as f64).unwrap()
        } else {
            adjacent_dicke_loss_negativity(n, k0, k1).unwrap()
        };
        worst = worst.max((dense - reference).abs());
    }
    let bound_ok = product_pair_error_bound_holds();
    let pass = worst <= 1e-9 && bound_ok && start.elapsed() < budget;
    report(
        "4 (loss oracle, validity-scoped)",
        pass,
        start.elapsed(),
        &format!("max |reference - dense| = {worst:.3e}; product-pair bound holds: {bound_ok}"),
    );
}

/// Near-orthogonal product pairs: |closed - dense| <= 2|<S0|S1>|, with the
/// overlap measured, not assumed.
fn product_pair_error_bound_holds() -> bool {
    let cases = [
        (6usize, 0.2f64, 1.2f64),
        (8, 0.0, 1.1),
        (8, 0.3, 1.5),
        (10, 0.2, 1.2),
        (10, 0.45, 1.5),
        (9, 0.1, std::f64::consts::FRAC_PI_2),
    ];
    cases.iter().all(|&(n, t0, t1)| {
        let s = MicroMacroState::product_pair(n, t0, t1).unwrap();
        let ov = overlap(s.psi0(), s.psi1()).unwrap().norm();
        let dense = dense_loss_negativity(&s, 1).unwrap();
        let closed = negativity_symmetric(t0.cos().powi(2), t1.cos().powi(2)).unwrap();
        (dense - closed).abs() <= 2.0 * ov + 1e-12
    })
}

#[test]
fn criterion_5_bound_dominance_and_optimizer() {
    let start = Instant::now();
    let budget = Duration::from_secs(300);
    let options = VerifyOptions::with_seed(20260811);
    let suite = bound_suite(&options);
    let pass = suite.all_passed() && start.elapsed() < budget;
    report(
        "5 (bound dominance)",
        pass,
        start.elapsed(),
        &format!(
            "{}/{} cases, max error {:.3e}{}",
            suite.passed,
            suite.cases,
            suite.max_abs_error,
            if suite.failures.is_empty() {
                String::new()
            } else {
                format!("; first failure: {}", suite.failures[0])
            }
        ),
    );
}

#[test]
fn criterion_6_gradient_and_hessian_certificate() {
    let start = Instant::now();
    let budget = Duration::from_secs(60);
    let options = VerifyOptions::with_seed(20260811);
    let suite = hessian_suite(&options);
    let identity_note = suite
        .notes
        .iter()
        .find(|n| n.contains("gap identity"))
        .cloned()
        .unwrap_or_default();
    let pass = suite.all_passed() && start.elapsed() < budget;
    report(
        "6 (certificate)",
        pass,
        start.elapsed(),
        &format!(
            "{}/{} cases, max error {:.3e}; {identity_note}",
            suite.passed, suite.cases, suite.max_abs_error
        ),
    );
}

#[test]
fn criterion_7_large_n_sector_engine() {
    let start = Instant::now();
    let budget = Duration::from_secs(10);
    let n = 500usize;
    let mut worst = 0.0f64;
    for (k0, k1) in [
        (300usize, 200usize),
        (499, 1),
        (500, 0),
        (275, 225),
        (450, 50),
    ] {
        let s = MicroMacroState::dicke_pair(n, k0, k1).unwrap();
        let (p0, p1) = (k0 as f64 / n as f64, k1 as f64 / n as f64);
        let closed = symmetric_branch_report(p0, p1).unwrap();
        let stats = sector_measure_entropy(&s).unwrap();
        worst = worst
            .max((stats.p_up - closed.prob_up).abs())
            .max((stats.e_up - closed.e_up).abs())
            .max((stats.e_down - closed.e_down).abs())
            .max((stats.average - closed.avg).abs());
        let neg = sector_loss_negativity(&s).unwrap();
        worst = worst.max((neg - negativity_symmetric(p0, p1).unwrap()).abs());
    }
    let pass = worst <= 1e-9 && start.elapsed() < budget;
    report(
        "7 (N = 500 sector)",
        pass,
        start.elapsed(),
        &format!("max |closed - sector| = {worst:.3e} over five separated pairs"),
    );
}
