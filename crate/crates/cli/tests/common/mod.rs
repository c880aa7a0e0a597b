//! Random instances shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zgraphon_core::{DecoratedMultigraph, Edge, FiniteMeasure, Partition, StepGraphon, TestFunctional};

pub const ATOMS: u64 = 4;

pub fn ids() -> Vec<String> {
    let mut v: Vec<String> = (0..ATOMS).map(|k| format!("e{k}")).collect();
    v.push("mix".into());
    v
}

pub fn functionals() -> Vec<TestFunctional> {
    let mut f: Vec<TestFunctional> = (0..ATOMS).map(|k| TestFunctional::indicator(format!("e{k}"), k)).collect();
    f.push(TestFunctional::new("mix", vec![0, 1, 3], vec![0.5, -1.0, 2.0]).unwrap());
    f
}

pub fn masses(rng: &mut ChaCha8Rng, q: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..q).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut m: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let tail: f64 = m[1..].iter().sum();
    m[0] = 1.0 - tail;
    m
}

pub fn measure(rng: &mut ChaCha8Rng) -> FiniteMeasure {
    let (mut support, mut weights) = (Vec::new(), Vec::new());
    for k in 0..ATOMS {
        if rng.gen_bool(0.6) {
            support.push(k);
            weights.push(rng.gen_range(-1.0..1.0));
        }
    }
    FiniteMeasure::new(support, weights).unwrap()
}

pub fn graphon(rng: &mut ChaCha8Rng, q: usize) -> StepGraphon {
    let m = masses(rng, q);
    let upper = (0..q).map(|i| (i..q).map(|_| measure(rng)).collect()).collect();
    StepGraphon::from_upper(m, upper, functionals()).unwrap()
}

/// Unlabeled graph on `n` vertices with `edges` random decorated edges.
pub fn graph(rng: &mut ChaCha8Rng, n: usize, edges: usize) -> DecoratedMultigraph {
    let ids = ids();
    let mut list = Vec::new();
    if n >= 2 {
        for _ in 0..edges {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            list.push(Edge::new(u, v, ids[rng.gen_range(0..ids.len())].clone(), rng.gen_range(1..3)));
        }
    }
    DecoratedMultigraph::new(n, list, vec![None; n]).unwrap()
}

/// Labels vertices `0..k` with `1..=k`.
pub fn label_first(g: &DecoratedMultigraph, k: usize) -> DecoratedMultigraph {
    (0..k).fold(g.clone(), |acc, v| acc.relabel(v, v as u32 + 1).unwrap())
}

/// Splits every class into `copies[i]` classes with the same blocks and mass divided at random.
pub fn inflate(rng: &mut ChaCha8Rng, w: &StepGraphon, copies: &[usize]) -> (StepGraphon, Partition) {
    let mut origin = Vec::new();
    let mut m = Vec::new();
    for (i, &c) in copies.iter().enumerate() {
        let shares = masses(rng, c);
        for s in shares {
            origin.push(i);
            m.push(w.masses()[i] * s);
        }
    }
    let tail: f64 = m[1..].iter().sum();
    m[0] = 1.0 - tail;
    let q = origin.len();
    let blocks = (0..q).map(|a| (0..q).map(|b| w.block(origin[a], origin[b]).clone()).collect()).collect();
    let big = StepGraphon::new(m, blocks, w.functionals().cloned().collect()).unwrap();
    (big, Partition::new(origin).unwrap())
}

/// Random partition of `0..q` onto `0..targets`, every target hit.
pub fn partition(rng: &mut ChaCha8Rng, q: usize) -> Partition {
    let targets = rng.gen_range(1..=q);
    let mut class_of: Vec<usize> = (0..q).map(|i| if i < targets { i } else { rng.gen_range(0..targets) }).collect();
    for i in (1..q).rev() {
        class_of.swap(i, rng.gen_range(0..=i));
    }
    Partition::new(class_of).unwrap()
}

/// Unlabeled test graphs over the dictionary.
pub fn suite() -> Vec<DecoratedMultigraph> {
    let e = |u, v, psi: &str, m| Edge::new(u, v, psi, m);
    vec![
        DecoratedMultigraph::empty(1),
        DecoratedMultigraph::edge("e1"),
        DecoratedMultigraph::bond(2, "mix"),
        DecoratedMultigraph::path(2, "e0"),
        DecoratedMultigraph::cycle(3, "e2"),
        DecoratedMultigraph::cycle(4, "mix"),
        DecoratedMultigraph::star(3, "e3"),
        DecoratedMultigraph::new(3, vec![e(0, 1, "e0", 1), e(1, 2, "mix", 2), e(0, 2, "e1", 1)], vec![None; 3])
            .unwrap(),
        DecoratedMultigraph::new(
            4,
            vec![e(0, 1, "e1", 1), e(1, 2, "e2", 1), e(2, 3, "mix", 1), e(0, 2, "e0", 3)],
            vec![None; 4],
        )
        .unwrap(),
    ]
}
