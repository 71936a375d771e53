//! Property tests across module boundaries: structured fast paths against
//! dense expansions, document round trips, and bound dominance on random
//! marginals.

use mmr::bounds::{avg_ev_general, ev_max, project_onto_box_sum};
use mmr::document::StateDocument;
use mmr::states::{overlap, MssPureState, SpinMarginals};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn arb_angles(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.2f64..3.2, n)
}

fn arb_coeffs(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1).prop_filter_map(
        "norm too small",
        |parts| {
            let norm: f64 = parts
                .iter()
                .map(|(re, im)| re * re + im * im)
                .sum::<f64>()
                .sqrt();
            (norm > 1e-3).then(|| {
                parts
                    .into_iter()
                    .map(|(re, im)| C64::new(re / norm, im / norm))
                    .collect()
            })
        },
    )
}

fn states_for(n: usize, k: usize, thetas: Vec<f64>, coeffs: Vec<C64>) -> Vec<MssPureState> {
    vec![
        MssPureState::dicke(n, k).unwrap(),
        MssPureState::product(thetas).unwrap(),
        MssPureState::dicke_superposition(n, coeffs).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn structured_overlaps_match_dense((n, k) in (1usize..=7).prop_flat_map(|n| (Just(n), 0..=n)),
                                       thetas in (1usize..=7).prop_flat_map(arb_angles),
                                       coeffs in (1usize..=7).prop_flat_map(arb_coeffs)) {
        // regenerate size-consistent inputs
        let thetas: Vec<f64> = thetas.iter().copied().cycle().take(n).collect();
        let coeffs: Vec<C64> = if coeffs.len() == n + 1 {
            coeffs
        } else {
            let mut c = vec![C64::new(0.0, 0.0); n + 1];
            c[k] = C64::new(1.0, 0.0);
            c
        };
        let states = states_for(n, k, thetas, coeffs);
        for a in &states {
            let va = a.to_dense().unwrap();
            let norm: f64 = va.iter().map(|x| x.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            let da = MssPureState::dense(n, va).unwrap();
            for b in &states {
                let fast = overlap(a, b).unwrap();
                let dense = overlap(&da, &MssPureState::dense(n, b.to_dense().unwrap()).unwrap()).unwrap();
                prop_assert!((fast - dense).norm() < 1e-10);
            }
            // spectrum and marginals agree with the dense route
            let (sa, sd) = (a.magnetization_spectrum(), da.magnetization_spectrum());
            for u in 0..=n {
                prop_assert!((sa.probs()[u] - sd.probs()[u]).abs() < 1e-10);
            }
            for j in 1..=n {
                prop_assert!(
                    (a.spin_up_probability(j).unwrap() - da.spin_up_probability(j).unwrap()).abs()
                        < 1e-10
                );
            }
            // magnetization identity: Σ p_up = <Jz> + n/2
            let sum: f64 = a.spin_up_probabilities().iter().sum();
            prop_assert!((sum - (a.jz_mean() + n as f64 / 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn structured_documents_round_trip(n in 1usize..=10, k_seed in 0usize..100,
                                       thetas in (1usize..=10).prop_flat_map(arb_angles)) {
        let k = k_seed % (n + 1);
        let thetas: Vec<f64> = thetas.iter().copied().cycle().take(n).collect();
        for s in [MssPureState::dicke(n, k).unwrap(), MssPureState::product(thetas).unwrap()] {
            let json = serde_json::to_string(&s.to_document()).unwrap();
            let doc: StateDocument = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(MssPureState::from_document(&doc).unwrap(), s);
        }
    }

    #[test]
    fn random_marginals_never_exceed_the_bound(n in 2usize..=8,
                                               raw in prop::collection::vec(0.0f64..1.0, 16)) {
        let mut p0: Vec<f64> = raw[..n].to_vec();
        let mut p1: Vec<f64> = raw[8..8 + n].to_vec();
        // project onto fixed totals so (M0, M1) is known exactly
        let (s0, s1) = (0.35 * n as f64, 0.6 * n as f64);
        project_onto_box_sum(&mut p0, s0);
        project_onto_box_sum(&mut p1, s1);
        let m = SpinMarginals::new(p0, p1).unwrap();
        let bound = ev_max(0.35 - 0.5, 0.6 - 0.5).unwrap();
        prop_assert!(avg_ev_general(&m) <= bound + 1e-12);
    }
}
