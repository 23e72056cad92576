mod common;

use common::{bern, binary_history, interior_prob, opinion};
use exptest::history::all_histories;
use exptest::measures::{halving_limit, make_example1_surrogate, Opinion};
use exptest::number::{ratio, Exact};
use exptest::{Alphabet, History};
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_rule_matches_cylinder_probability(p in opinion(), h in binary_history(6)) {
        let mut product = Exact::one();
        let mut prefix = History::empty();
        for &s in h.symbols() {
            let next = p.next_distribution(&prefix);
            match next {
                Ok(dist) => product *= dist[s as usize].clone(),
                Err(_) => { product = Exact::zero(); break; }
            }
            prefix.push(s);
        }
        prop_assert_eq!(p.cylinder_prob(&h), product);
    }

    #[test]
    fn conditioning_factorizes(p in opinion(), h in binary_history(4), s in binary_history(3)) {
        let ph = p.cylinder_prob(&h);
        prop_assume!(!ph.is_zero());
        let conditioned = p.condition(&h).unwrap();
        prop_assert_eq!(p.cylinder_prob(&h.concat(&s)), ph * conditioned.cylinder_prob(&s));
    }

    #[test]
    fn depth_marginals_sum_to_one(p in opinion(), depth in 0usize..7) {
        let total = p.depth_marginal(depth).unwrap().into_iter().fold(Exact::zero(), |a, b| a + b);
        prop_assert!(total.is_one());
    }

    #[test]
    fn mixture_is_linear(p in bern(), q in opinion(), w in interior_prob(), h in binary_history(6)) {
        let one = ratio(1, 1);
        let mix = Opinion::mixture("mix", vec![(w.clone(), p.clone()), (one.clone() - &w, q.clone())]).unwrap();
        let expected = w.clone() * p.cylinder_prob(&h) + (one - w) * q.cylinder_prob(&h);
        prop_assert_eq!(mix.cylinder_prob(&h), expected);
    }

    #[test]
    fn posterior_weights_sum_to_one(p in bern(), q in bern(), w in interior_prob(), h in binary_history(6)) {
        let one = ratio(1, 1);
        let mix = Opinion::mixture("mix", vec![(w.clone(), p), (one - w, q)]).unwrap();
        let post = mix.posterior_weights(&h).unwrap();
        prop_assert!(post.iter().fold(Exact::zero(), |a, b| a + b).is_one());
    }

    #[test]
    fn surrogate_agrees_with_limit_below_truncation(n in 1usize..6, k in 1usize..4, idx in 0usize..64) {
        let surrogate = make_example1_surrogate::<Exact>(n, k).unwrap();
        let limit = halving_limit::<Exact>();
        for t in 0..=n {
            let h = History::from_index(idx % (1 << t), t, Alphabet::BINARY);
            prop_assert_eq!(surrogate.opinion.cylinder_prob(&h), limit.cylinder_prob(&h));
        }
    }
}

#[test]
fn float_and_exact_modes_agree_on_cylinders() {
    let exact = Opinion::bern(ratio(1, 3)).unwrap();
    let float = Opinion::<f64>::bern(1.0 / 3.0).unwrap();
    for h in all_histories(Alphabet::BINARY, 6) {
        let e: f64 = exptest::Number::to_f64(&exact.cylinder_prob(&h));
        assert!((e - float.cylinder_prob(&h)).abs() < 1e-14);
    }
}
