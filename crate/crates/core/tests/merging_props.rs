mod common;

use common::{bern, binary_history, interior_prob, opinion};
use exptest::measures::Opinion;
use exptest::merging::{abs_continuity_report, example1_gap, merging_curve, tv_lookahead, CurveMode};
use exptest::number::{ratio, Exact};
use exptest::History;
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tv_is_bounded_and_symmetric(p in opinion(), q in opinion(), h in binary_history(3), l in 1usize..4) {
        prop_assume!(!p.cylinder_prob(&h).is_zero() && !q.cylinder_prob(&h).is_zero());
        let pq = tv_lookahead(&p, &q, &h, l).unwrap();
        let qp = tv_lookahead(&q, &p, &h, l).unwrap();
        prop_assert_eq!(&pq, &qp);
        prop_assert!(pq >= Exact::zero() && pq <= Exact::one());
        prop_assert!(tv_lookahead(&p, &p, &h, l).unwrap().is_zero());
    }

    #[test]
    fn tv_is_monotone_in_lookahead(p in opinion(), q in opinion(), h in binary_history(3), l in 1usize..4) {
        prop_assume!(!p.cylinder_prob(&h).is_zero() && !q.cylinder_prob(&h).is_zero());
        prop_assert!(tv_lookahead(&p, &q, &h, l).unwrap() <= tv_lookahead(&p, &q, &h, l + 1).unwrap());
    }

    #[test]
    fn tv_satisfies_triangle_inequality(p in opinion(), q in opinion(), r in opinion(), l in 1usize..4) {
        let h = History::empty();
        let direct = tv_lookahead(&p, &r, &h, l).unwrap();
        let via = tv_lookahead(&p, &q, &h, l).unwrap() + tv_lookahead(&q, &r, &h, l).unwrap();
        prop_assert!(direct <= via);
    }

    #[test]
    fn mixture_dominates_its_components(p in bern(), q in bern(), w in interior_prob(), horizon in 1usize..7) {
        let one = ratio(1, 1);
        let mix = Opinion::mixture("mix", vec![(w.clone(), p.clone()), (one.clone() - &w, q)]).unwrap();
        let report = abs_continuity_report(&mix, &p, horizon).unwrap();
        let max_ratio = report.max_ratio.expect("component is absolutely continuous");
        prop_assert!(max_ratio <= one / w);
        prop_assert!(report.violations.is_empty());
    }

    #[test]
    fn example1_gap_is_one_half(n in 1usize..8, k in 1usize..4, idx in 0usize..256) {
        let t = idx % (n + 1);
        let h = History::from_index(idx % (1 << t), t, exptest::Alphabet::BINARY);
        let gap = example1_gap::<Exact>(n, k, &h).unwrap();
        prop_assert_eq!(gap, ratio(1, 2));
    }
}

#[test]
fn curve_rows_are_ordered_and_bounded() {
    let p = Opinion::bern(ratio(1, 3)).unwrap();
    let q = Opinion::bern(ratio(1, 2)).unwrap();
    let mix = Opinion::mixture("mix", vec![(ratio(1, 2), p.clone()), (ratio(1, 2), q)]).unwrap();
    let curve = merging_curve(&mix, &p, 12, 2, ratio(1, 10), CurveMode::Exact).unwrap();
    assert_eq!(curve.rows.len(), 13);
    for (t, row) in curve.rows.iter().enumerate() {
        assert_eq!(row.t, t);
        assert!(row.mean <= row.max && row.max <= Exact::one());
        assert!(row.exceedance >= Exact::zero() && row.exceedance <= Exact::one());
    }
    assert!(curve.to_csv().starts_with("t,mean,max,exceedance\n"));
}

#[test]
fn monte_carlo_is_reproducible_and_tracks_exact() {
    let p = Opinion::<f64>::bern(0.3).unwrap();
    let q = Opinion::<f64>::bern(0.5).unwrap();
    let mix = Opinion::mixture("mix", vec![(0.5, p.clone()), (0.5, q)]).unwrap();
    let mode = CurveMode::MonteCarlo { seed: 11, paths: 4000 };
    let a = merging_curve(&mix, &p, 20, 1, 0.05, mode).unwrap();
    let b = merging_curve(&mix, &p, 20, 1, 0.05, mode).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let exact = merging_curve(&mix, &p, 20, 1, 0.05, CurveMode::Exact).unwrap();
    for (mc, ex) in a.rows.iter().zip(&exact.rows) {
        assert!((mc.mean - ex.mean).abs() < 0.02, "t={} mc={} exact={}", mc.t, mc.mean, ex.mean);
    }
}
