#![allow(dead_code)]

use markov_hull::TransitionMatrix;
use proptest::prelude::*;

/// Matrices of size 1..=max_n without zero rows.
pub fn matrix(max_n: usize) -> impl Strategy<Value = TransitionMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1u32..(1 << n), n).prop_map(move |masks| {
            let rows = masks
                .iter()
                .map(|m| (0..n).map(|j| ((m >> (n - 1 - j)) & 1) as u8).collect())
                .collect();
            TransitionMatrix::from_rows(rows).unwrap()
        })
    })
}

pub fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}
