use exptest::manipulation::{build_game, double_oracle_manipulate, nature_to_opinion, pass_prob, DoubleOracleConfig};
use exptest::measures::Opinion;
use exptest::number::{ratio, Exact};
use exptest::testing::tail_rejection_test;
use exptest::{Alphabet, History};
use proptest::prelude::*;

fn distribution(len: usize) -> impl Strategy<Value = Vec<Exact>> {
    proptest::collection::vec(0i64..5, len).prop_filter_map("nonzero", |w| {
        let total: i64 = w.iter().sum();
        (total > 0).then(|| w.iter().map(|&x| ratio(x, total)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lifted_nature_matches_its_distribution(dist in distribution(8)) {
        let op = nature_to_opinion("nature", &dist, 3, Alphabet::BINARY).unwrap();
        for (i, p) in dist.iter().enumerate() {
            let h = History::from_index(i, 3, Alphabet::BINARY);
            prop_assert_eq!(&op.cylinder_prob(&h), p);
        }
    }

    #[test]
    fn lifted_nature_passes_its_own_test(dist in distribution(16), k in 1i64..5) {
        let eps = ratio(k, 10);
        let test = tail_rejection_test(4, eps.clone()).unwrap();
        let op = nature_to_opinion("nature", &dist, 4, Alphabet::BINARY).unwrap();
        let game = build_game(&test, 4, &[op]).unwrap();
        let payoff: f64 = game.payoffs.iter().zip(&dist).map(|(r, p)| r[0] * exptest::Number::to_f64(p)).sum();
        prop_assert!(payoff >= 1.0 - exptest::Number::to_f64(&eps) - 1e-12);
    }
}

#[test]
fn double_oracle_value_is_monotone_and_certified() {
    for (depth, eps) in [(3usize, ratio(1, 4)), (4, ratio(1, 5)), (5, ratio(1, 5))] {
        let test = tail_rejection_test(depth, eps.clone()).unwrap();
        let config = DoubleOracleConfig::<Exact>::default();
        let report =
            double_oracle_manipulate(&test, depth, Alphabet::BINARY, eps.clone(), ratio(1, 20), &config).unwrap();
        assert!(report.certified, "d={depth} stopped with {:?}", report.stop_reason);
        for w in report.value_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "value decreased: {w:?}");
        }
        let bound = 1.0 - exptest::Number::to_f64(&eps) - 1e-9;
        assert!(report.best_response_payoffs.iter().all(|&p| p >= bound));
        for (h, p) in &report.path_pass_probs {
            assert_eq!(p, &pass_prob(&report.strategy, &test, h).unwrap());
            assert!(*p >= report.target());
        }
    }
}

#[test]
fn pure_column_rule_still_certifies_small_cases() {
    let eps = ratio(1, 4);
    let test = tail_rejection_test(3, eps.clone()).unwrap();
    let config = DoubleOracleConfig::<Exact> { hedge_sharpness: None, ..Default::default() };
    let report = double_oracle_manipulate(&test, 3, Alphabet::BINARY, eps, ratio(1, 20), &config).unwrap();
    assert!(report.certified);
    assert!(report.iterations <= 50);
}

#[test]
fn uniform_reporter_is_rejected_on_lexicographic_ties() {
    let test = tail_rejection_test(2, ratio(3, 10)).unwrap();
    let game = build_game(&test, 2, &[Opinion::uniform(Alphabet::BINARY)]).unwrap();
    let column: Vec<f64> = game.payoffs.iter().map(|r| r[0]).collect();
    assert_eq!(column, vec![0.0, 1.0, 1.0, 1.0]);
}
