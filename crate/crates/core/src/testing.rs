//! Proptest generators shared by the unit tests.

use alloc::format;
use alloc::vec::Vec;

use proptest::prelude::*;

use crate::graph::{DecoratedMultigraph, Edge};
use crate::graphon::StepGraphon;
use crate::measure::{FiniteMeasure, TestFunctional};

/// Functional ids `e0..e3`, indicators of the atoms a random block may use.
pub fn ids() -> Vec<&'static str> {
    alloc::vec!["e0", "e1", "e2", "e3"]
}

pub fn masses(q: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, q).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let mut m: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let tail: f64 = m[1..].iter().sum();
        m[0] = 1.0 - tail;
        m
    })
}

fn block() -> impl Strategy<Value = FiniteMeasure> {
    proptest::collection::btree_map(0u64..4, -3.0f64..3.0, 0..3).prop_map(|atoms| {
        let (s, w) = atoms.into_iter().unzip();
        FiniteMeasure::new(s, w).unwrap()
    })
}

/// Graphons with `1..=max_q` classes, signed blocks on atoms `0..4`.
pub fn random_graphon(max_q: usize) -> impl Strategy<Value = StepGraphon> {
    (1..=max_q).prop_flat_map(|q| {
        (masses(q), proptest::collection::vec(block(), q * (q + 1) / 2)).prop_map(move |(m, flat)| {
            let mut it = flat.into_iter();
            let upper = (0..q).map(|i| (i..q).map(|_| it.next().unwrap()).collect()).collect();
            let functionals = (0..4u64).map(|k| TestFunctional::indicator(format!("e{k}"), k)).collect();
            StepGraphon::from_upper(m, upper, functionals).unwrap()
        })
    })
}

/// Graphs on `1..=max_n` vertices decorated by `ids()`, with up to `max_labels` labels `1..`.
pub fn random_graph(max_n: usize, max_edges: usize, max_labels: usize) -> impl Strategy<Value = DecoratedMultigraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let edges = proptest::collection::vec((0..n, 0..n, 0usize..4, 1u32..3), 0..=max_edges);
        let labels = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=max_labels.min(n));
        (Just(n), edges, labels, any::<u64>()).prop_map(|(n, raw, labelled, _)| {
            let ids = ids();
            let edges =
                raw.into_iter().filter(|(u, v, _, _)| u != v).map(|(u, v, d, m)| Edge::new(u, v, ids[d], m)).collect();
            let mut labels = alloc::vec![None; n];
            for (i, v) in labelled.into_iter().enumerate() {
                labels[v] = Some(i as u32 + 1);
            }
            DecoratedMultigraph::new(n, edges, labels).unwrap()
        })
    })
}
