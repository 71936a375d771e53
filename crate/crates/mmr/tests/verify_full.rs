//! Full-scale run of the oracle suite: every Dicke pair for N ≤ 8 against
//! the dense engines, sampled product and superposition pairs, and
//! sector-vs-dense consistency up to N = 10. The bound and Hessian suites
//! run at full scale inside the acceptance tests; this one covers the
//! remaining large-N consistency checks.

use mmr::verify::{oracle_suite, VerifyOptions};

#[test]
fn oracle_suite_full_scale_passes() {
    let report = oracle_suite(&VerifyOptions::with_seed(17));
    assert!(
        report.all_passed(),
        "{}/{} cases passed; first failure: {:?}",
        report.passed,
        report.cases,
        report.failures.first()
    );
    assert!(report.cases > 500);
    assert!(report.max_abs_error <= 1e-9);
}
