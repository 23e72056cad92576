#![allow(dead_code)]

use exptest::measures::Opinion;
use exptest::number::{ratio, Exact};
use exptest::History;
use proptest::prelude::*;

/// A probability `k/12` with `1 <= k <= 11`.
pub fn interior_prob() -> impl Strategy<Value = Exact> {
    (1i64..12).prop_map(|k| ratio(k, 12))
}

pub fn bern() -> impl Strategy<Value = Opinion<Exact>> {
    interior_prob().prop_map(|p| Opinion::bern(p).unwrap())
}

pub fn markov() -> impl Strategy<Value = Opinion<Exact>> {
    (interior_prob(), interior_prob(), interior_prob()).prop_map(|(a, b, c)| {
        let one = ratio(1, 1);
        Opinion::markov(
            "markov",
            vec![a.clone(), one.clone() - a],
            vec![vec![b.clone(), one.clone() - b], vec![c.clone(), one - c]],
        )
        .unwrap()
    })
}

pub fn opinion() -> impl Strategy<Value = Opinion<Exact>> {
    let leaf = prop_oneof![bern(), markov()];
    prop_oneof![
        2 => leaf.clone(),
        1 => (leaf.clone(), leaf, interior_prob()).prop_map(|(p, q, w)| {
            let one = ratio(1, 1);
            Opinion::mixture("mix", vec![(w.clone(), p), (one - w, q)]).unwrap()
        }),
    ]
}

pub fn binary_history(max_len: usize) -> impl Strategy<Value = History> {
    proptest::collection::vec(0u8..2, 0..=max_len).prop_map(History::from_symbols)
}
