//! Decorated, partially labeled multigraphs and their product algebra.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An edge bundle: `mult` parallel edges between `u` and `v`, all decorated by `psi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub psi: String,
    pub mult: u32,
}

impl Edge {
    pub fn new(u: usize, v: usize, psi: impl Into<String>, mult: u32) -> Self {
        Self { u, v, psi: psi.into(), mult }
    }
}

/// A multigraph whose edges carry functional ids and whose vertices may carry
/// distinct positive labels.
///
/// Always held in canonical edge form: endpoints ordered `u < v`, bundles
/// sorted by `(u, v, psi)`, and parallel edges with the same decoration merged
/// into one bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecoratedMultigraph {
    n_vertices: usize,
    edges: Vec<Edge>,
    labels: Vec<Option<u32>>,
}

/// Whether no edge joins two labeled vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FStarFlag {
    pub holds: bool,
}

/// Isomorphism-invariant encoding; equal iff the graphs are isomorphic
/// through a map preserving labels and decoration ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n_vertices: usize,
    pub labels: Vec<(usize, u32)>,
    pub edges: Vec<(usize, usize, String, u32)>,
}

impl DecoratedMultigraph {
    pub fn new(n_vertices: usize, edges: Vec<Edge>, labels: Vec<Option<u32>>) -> Result<Self> {
        if labels.len() != n_vertices {
            return Err(Error::InvalidGraph("label map must cover every vertex"));
        }
        let mut seen = Vec::new();
        for l in labels.iter().flatten() {
            if *l == 0 {
                return Err(Error::InvalidGraph("labels must be positive"));
            }
            if seen.contains(l) {
                return Err(Error::InvalidGraph("labels must be injective"));
            }
            seen.push(*l);
        }
        for e in &edges {
            if e.u >= n_vertices || e.v >= n_vertices {
                return Err(Error::InvalidGraph("edge endpoint out of range"));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph("self-loops are not allowed"));
            }
            if e.mult == 0 {
                return Err(Error::InvalidGraph("edge multiplicity must be at least 1"));
            }
            if e.psi.is_empty() {
                return Err(Error::InvalidGraph("edge decoration must be a nonempty id"));
            }
        }
        Ok(Self { n_vertices, edges: canonical_edges(edges), labels })
    }

    /// Unlabeled graph from `(u, v, psi)` triples, one edge each.
    pub fn unlabeled(n_vertices: usize, edges: &[(usize, usize, &str)]) -> Result<Self> {
        let edges = edges.iter().map(|&(u, v, psi)| Edge::new(u, v, psi, 1)).collect();
        Self::new(n_vertices, edges, vec![None; n_vertices])
    }

    /// `n` isolated unlabeled vertices.
    pub fn empty(n: usize) -> Self {
        Self { n_vertices: n, edges: Vec::new(), labels: vec![None; n] }
    }

    pub fn edge(psi: &str) -> Self {
        Self::bond(1, psi)
    }

    /// Two vertices joined by `mult` parallel `psi` edges.
    pub fn bond(mult: u32, psi: &str) -> Self {
        Self::new(2, vec![Edge::new(0, 1, psi, mult.max(1))], vec![None; 2]).expect("valid bond")
    }

    /// Path with `edges` edges on `edges + 1` vertices, `0-1-…-edges`.
    pub fn path(edges: usize, psi: &str) -> Self {
        let e: Vec<_> = (0..edges).map(|i| (i, i + 1, psi)).collect();
        Self::unlabeled(edges + 1, &e).expect("valid path")
    }

    /// Cycle on `n ≥ 3` vertices.
    pub fn cycle(n: usize, psi: &str) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, psi)).collect();
        Self::unlabeled(n, &e).expect("valid cycle")
    }

    /// Star with center `0` and `leaves` leaves.
    pub fn star(leaves: usize, psi: &str) -> Self {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i, psi)).collect();
        Self::unlabeled(leaves + 1, &e).expect("valid star")
    }

    pub fn complete(n: usize, psi: &str) -> Self {
        let e: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, psi))).collect();
        Self::unlabeled(n, &e).expect("valid complete graph")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    pub fn label_of(&self, v: usize) -> Option<u32> {
        self.labels.get(v).copied().flatten()
    }

    pub fn vertex_with_label(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|l| *l == Some(label))
    }

    /// Labels in increasing order.
    pub fn label_set(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.labels.iter().flatten().copied().collect();
        ls.sort_unstable();
        ls
    }

    pub fn is_unlabeled(&self) -> bool {
        self.labels.iter().all(Option::is_none)
    }

    /// True when the labels are exactly `{1..k}` for some `k ≥ 0`.
    pub fn is_k_labeled(&self) -> bool {
        self.label_set().iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    }

    /// Total edge count including multiplicities.
    pub fn edge_count(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.mult)).sum()
    }

    /// Degree counting parallel edges.
    pub fn degree(&self, v: usize) -> u32 {
        self.edges.iter().filter(|e| e.u == v || e.v == v).map(|e| e.mult).sum()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.n_vertices];
        for e in &self.edges {
            d[e.u] += e.mult;
            d[e.v] += e.mult;
        }
        d
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Distinct decoration ids in sorted order.
    pub fn decorations(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.edges.iter().map(|e| e.psi.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn fstar(&self) -> FStarFlag {
        FStarFlag { holds: !self.edges.iter().any(|e| self.labels[e.u].is_some() && self.labels[e.v].is_some()) }
    }

    /// Re-applies the canonical edge form; a no-op on any constructed graph.
    pub fn canonical(&self) -> Self {
        Self { n_vertices: self.n_vertices, edges: canonical_edges(self.edges.clone()), labels: self.labels.clone() }
    }

    /// Same graph with every label removed.
    pub fn strip_labels(&self) -> Self {
        Self { labels: vec![None; self.n_vertices], ..self.clone() }
    }

    /// Disjoint union with identically labeled vertices merged.
    ///
    /// Vertices of `self` keep their indices; unmerged vertices of `other`
    /// follow in their original order.
    pub fn product(&self, other: &DecoratedMultigraph) -> Self {
        let mut labels = self.labels.clone();
        let mut map = Vec::with_capacity(other.n_vertices);
        for v in 0..other.n_vertices {
            match other.labels[v].and_then(|l| self.vertex_with_label(l)) {
                Some(w) => map.push(w),
                None => {
                    map.push(labels.len());
                    labels.push(other.labels[v]);
                }
            }
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge::new(map[e.u], map[e.v], e.psi.clone(), e.mult)));
        Self { n_vertices: labels.len(), edges: canonical_edges(edges), labels }
    }

    /// `q`-fold product of `self`; `q = 0` gives the labeled vertices alone.
    pub fn power(&self, q: u32) -> Self {
        let mut acc = self.labeled_skeleton();
        for _ in 0..q {
            acc = acc.product(self);
        }
        acc
    }

    /// The labeled vertices of `self` in index order, with no edges.
    pub fn labeled_skeleton(&self) -> Self {
        let labels: Vec<Option<u32>> = self.labels.iter().copied().filter(Option::is_some).collect();
        Self { n_vertices: labels.len(), edges: Vec::new(), labels }
    }

    /// Removes one label; errors if it is absent.
    pub fn unlabel(&self, label: u32) -> Result<Self> {
        let v = self.vertex_with_label(label).ok_or(Error::LabelAbsent(label))?;
        let mut g = self.clone();
        g.labels[v] = None;
        Ok(g)
    }

    /// Puts `label` on vertex `v`, replacing any label `v` had.
    pub fn relabel(&self, v: usize, label: u32) -> Result<Self> {
        if v >= self.n_vertices {
            return Err(Error::InvalidGraph("vertex out of range"));
        }
        if label == 0 {
            return Err(Error::InvalidGraph("labels must be positive"));
        }
        if let Some(w) = self.vertex_with_label(label) {
            if w != v {
                return Err(Error::InvalidGraph("label already used by another vertex"));
            }
        }
        let mut g = self.clone();
        g.labels[v] = Some(label);
        Ok(g)
    }

    /// Adds a `psi`-decorated path of length `k` from `u` to `v` through `k − 1`
    /// fresh unlabeled vertices; `k = 1` adds one parallel edge.
    pub fn add_path(&self, u: usize, v: usize, k: usize, psi: &str) -> Result<Self> {
        if u == v {
            return Err(Error::InvalidGraph("path endpoints must differ"));
        }
        if u >= self.n_vertices || v >= self.n_vertices {
            return Err(Error::InvalidGraph("path endpoint out of range"));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("path length must be at least 1"));
        }
        let mut g = self.clone();
        let mut prev = u;
        for step in 1..=k {
            let next = if step == k {
                v
            } else {
                g.labels.push(None);
                g.n_vertices += 1;
                g.n_vertices - 1
            };
            g.edges.push(Edge::new(prev, next, psi, 1));
            prev = next;
        }
        g.edges = canonical_edges(g.edges);
        Ok(g)
    }

    /// Deletes one `psi` edge between `u` and `v`; errors if there is none.
    pub fn remove_edge(&self, u: usize, v: usize, psi: &str) -> Result<Self> {
        let (a, b) = (u.min(v), u.max(v));
        let i = self
            .edges
            .iter()
            .position(|e| e.u == a && e.v == b && e.psi == psi)
            .ok_or(Error::InvalidGraph("designated edge absent"))?;
        let mut g = self.clone();
        if g.edges[i].mult > 1 {
            g.edges[i].mult -= 1;
        } else {
            g.edges.remove(i);
        }
        Ok(g)
    }

    /// Labels-and-decorations-preserving isomorphism test.
    pub fn is_isomorphic(&self, other: &DecoratedMultigraph) -> bool {
        self.n_vertices == other.n_vertices
            && self.edge_count() == other.edge_count()
            && self.label_set() == other.label_set()
            && self.canonical_form() == other.canonical_form()
    }

    /// Canonical form via color refinement with individualization of tied cells.
    ///
    /// Labeled vertices start in singleton cells ordered by label; among all
    /// leaves of the search the lexicographically smallest encoding is kept.
    pub fn canonical_form(&self) -> CanonicalForm {
        let n = self.n_vertices;
        let mut adj: Vec<Vec<(usize, &str, u32)>> = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.psi.as_str(), e.mult));
            adj[e.v].push((e.u, e.psi.as_str(), e.mult));
        }
        // labeled vertices first by label, then one cell of unlabeled vertices
        let initial: Vec<u64> = self
            .labels
            .iter()
            .map(|l| match l {
                Some(l) => u64::from(*l),
                None => u64::from(u32::MAX) + 1,
            })
            .collect();
        let colors = refine(&adj, rank(&initial));
        let mut best: Option<CanonicalForm> = None;
        self.search(&adj, colors, &mut best);
        best.unwrap_or(CanonicalForm { n_vertices: 0, labels: Vec::new(), edges: Vec::new() })
    }

    fn search(&self, adj: &[Vec<(usize, &str, u32)>], colors: Vec<usize>, best: &mut Option<CanonicalForm>) {
        let n = self.n_vertices;
        let mut counts = vec![0usize; n];
        for &c in &colors {
            counts[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
            let form = self.encode(&colors);
            if best.as_ref().is_none_or(|b| form < *b) {
                *best = Some(form);
            }
            return;
        };
        for w in (0..n).filter(|&v| colors[v] == target) {
            // w moves just ahead of the rest of its cell
            let keys: Vec<u64> = colors.iter().enumerate().map(|(v, &c)| 2 * c as u64 + u64::from(v != w)).collect();
            self.search(adj, refine(adj, rank(&keys)), best);
        }
    }

    fn encode(&self, position: &[usize]) -> CanonicalForm {
        let mut labels: Vec<(usize, u32)> =
            self.labels.iter().enumerate().filter_map(|(v, l)| l.map(|l| (position[v], l))).collect();
        labels.sort_unstable();
        let mut edges: Vec<(usize, usize, String, u32)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (position[e.u], position[e.v]);
                (a.min(b), a.max(b), e.psi.clone(), e.mult)
            })
            .collect();
        edges.sort_unstable();
        CanonicalForm { n_vertices: self.n_vertices, labels, edges }
    }
}

fn canonical_edges(edges: Vec<Edge>) -> Vec<Edge> {
    let mut merged: BTreeMap<(usize, usize, String), u32> = BTreeMap::new();
    for e in edges {
        let key = (e.u.min(e.v), e.u.max(e.v), e.psi);
        *merged.entry(key).or_default() += e.mult;
    }
    merged.into_iter().map(|((u, v, psi), mult)| Edge { u, v, psi, mult }).collect()
}

/// Dense ranks `0..` of the keys, preserving their order.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect()
}

type Neighbor<'a> = (usize, &'a str, u32);

/// 1-dimensional Weisfeiler–Leman refinement to a stable coloring.
fn refine(adj: &[Vec<(usize, &str, u32)>], mut colors: Vec<usize>) -> Vec<usize> {
    let mut classes = colors.iter().collect::<alloc::collections::BTreeSet<_>>().len();
    loop {
        let signatures: Vec<(usize, Vec<Neighbor<'_>>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(usize, &str, u32)> = adj[v].iter().map(|&(w, psi, m)| (colors[w], psi, m)).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = rank(&signatures);
        let next_classes = next.iter().copied().max().map_or(0, |m| m + 1);
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}
