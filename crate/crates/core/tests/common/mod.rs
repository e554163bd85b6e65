#![allow(dead_code)]

use proptest::prelude::*;
use ultraframe::{Frame, VertexSet};

/// Frames on `1..=max_n` vertices, loops allowed.
pub fn frame(max_n: usize) -> impl Strategy<Value = Frame> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i / n, i % n));
            Frame::numbered(n, edges).unwrap()
        })
    })
}

/// A frame together with a subset of its vertices.
pub fn frame_and_set(max_n: usize) -> impl Strategy<Value = (Frame, VertexSet)> {
    frame(max_n).prop_flat_map(|f| {
        let n = f.len();
        (Just(f), 0..1u64 << n).prop_map(move |(f, m)| (f, VertexSet::from_mask(n, m)))
    })
}

pub fn all_subsets(n: usize) -> impl Iterator<Item = VertexSet> {
    (0..1u64 << n).map(move |m| VertexSet::from_mask(n, m))
}
