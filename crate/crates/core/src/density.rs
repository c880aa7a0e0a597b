//! Homomorphism densities `t(F, W)` and labeled marginals `t_β(F, W)` of step graphons.
//!
//! Exact values come from variable elimination over the class assignments of
//! the free vertices; [`density_enumerate`] is the literal sum over all
//! assignments and is kept as a cross-check and for partitioned evaluation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DecoratedMultigraph;
use crate::graphon::StepGraphon;
use crate::linalg::Matrix;
use crate::numeric::{self, CompensatedSum};

/// Class index for each label of a partially labeled graph.
pub type Anchoring = BTreeMap<u32, usize>;

/// Monte Carlo estimate of a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Evaluation problem: kernels resolved, some vertices pinned to classes.
struct Problem<'a> {
    masses: &'a [f64],
    kernels: Vec<Matrix>,
    /// `(u, v, kernel index, multiplicity)`
    edges: Vec<(usize, usize, usize, u32)>,
    pinned: Vec<Option<usize>>,
}

impl<'a> Problem<'a> {
    fn new(graph: &DecoratedMultigraph, w: &'a StepGraphon, pinned: Vec<Option<usize>>) -> Result<Self> {
        let ids = graph.decorations();
        let kernels = ids.iter().map(|id| w.kernel(id).map(|k| k.matrix)).collect::<Result<Vec<_>>>()?;
        let edges =
            graph.edges().iter().map(|e| (e.u, e.v, ids.binary_search(&e.psi.as_str()).unwrap(), e.mult)).collect();
        Ok(Self { masses: w.masses(), kernels, edges, pinned })
    }

    fn q(&self) -> usize {
        self.masses.len()
    }

    fn free_vertices(&self) -> Vec<usize> {
        (0..self.pinned.len()).filter(|&v| self.pinned[v].is_none()).collect()
    }

    fn factors(&self) -> (f64, Vec<Factor>) {
        let q = self.q();
        let mut constant = 1.0;
        let mut factors = Vec::new();
        for &(u, v, k, m) in &self.edges {
            let kern = &self.kernels[k];
            match (self.pinned[u], self.pinned[v]) {
                (Some(a), Some(b)) => constant *= numeric::powi(kern[(a, b)], m),
                (Some(a), None) => factors
                    .push(Factor { scope: vec![v], table: (0..q).map(|c| numeric::powi(kern[(a, c)], m)).collect() }),
                (None, Some(b)) => factors
                    .push(Factor { scope: vec![u], table: (0..q).map(|c| numeric::powi(kern[(c, b)], m)).collect() }),
                (None, None) => {
                    // scope sorted ascending; index = c_first + q·c_second
                    let (a, b) = (u.min(v), u.max(v));
                    let mut table = vec![0.0; q * q];
                    for ca in 0..q {
                        for cb in 0..q {
                            let (cu, cv) = if a == u { (ca, cb) } else { (cb, ca) };
                            table[ca + q * cb] = numeric::powi(kern[(cu, cv)], m);
                        }
                    }
                    factors.push(Factor { scope: vec![a, b], table });
                }
            }
        }
        (constant, factors)
    }

    fn eliminate(&self, order: &[usize]) -> f64 {
        let q = self.q();
        let (constant, mut factors) = self.factors();
        let mut assign = vec![0usize; self.pinned.len()];
        for &w in order {
            let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&w));
            factors = rest;
            let mut scope: Vec<usize> =
                touching.iter().flat_map(|f| f.scope.iter().copied()).filter(|&v| v != w).collect();
            scope.sort_unstable();
            scope.dedup();
            let size = numeric::powi(q as f64, scope.len() as u32) as usize;
            let mut table = Vec::with_capacity(size);
            for idx in 0..size {
                let mut rem = idx;
                for &v in &scope {
                    assign[v] = rem % q;
                    rem /= q;
                }
                let mut acc = CompensatedSum::new();
                for c in 0..q {
                    assign[w] = c;
                    let prod = touching.iter().fold(self.masses[c], |p, f| p * f.at(&assign, q));
                    acc.add(prod);
                }
                table.push(acc.value());
            }
            factors.push(Factor { scope, table });
        }
        debug_assert!(factors.iter().all(|f| f.scope.is_empty()));
        factors.iter().fold(constant, |p, f| p * f.table[0])
    }

    /// Greedy minimum-degree order on the interaction graph of the free vertices.
    fn min_degree_order(&self) -> Vec<usize> {
        let n = self.pinned.len();
        let mut nbrs: Vec<alloc::collections::BTreeSet<usize>> = vec![Default::default(); n];
        for &(u, v, _, _) in &self.edges {
            if self.pinned[u].is_none() && self.pinned[v].is_none() {
                nbrs[u].insert(v);
                nbrs[v].insert(u);
            }
        }
        let mut remaining = self.free_vertices();
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let (pos, &w) = remaining.iter().enumerate().min_by_key(|&(_, &v)| (nbrs[v].len(), v)).unwrap();
            remaining.remove(pos);
            let around: Vec<usize> = nbrs[w].iter().copied().collect();
            for &a in &around {
                nbrs[a].remove(&w);
                for &b in &around {
                    if a != b {
                        nbrs[a].insert(b);
                    }
                }
            }
            order.push(w);
        }
        order
    }

    fn integrand(&self, assign: &[usize]) -> f64 {
        self.edges.iter().fold(1.0, |p, &(u, v, k, m)| p * numeric::powi(self.kernels[k][(assign[u], assign[v])], m))
    }
}

struct Factor {
    scope: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    fn at(&self, assign: &[usize], q: usize) -> f64 {
        let mut idx = 0;
        let mut stride = 1;
        for &v in &self.scope {
            idx += assign[v] * stride;
            stride *= q;
        }
        self.table[idx]
    }
}

/// `t(F, W)`, labels ignored, evaluated by elimination in greedy min-degree order.
pub fn density(graph: &DecoratedMultigraph, w: &StepGraphon) -> Result<f64> {
    let p = Problem::new(graph, w, vec![None; graph.n_vertices()])?;
    let order = p.min_degree_order();
    Ok(p.eliminate(&order))
}

/// `t(F, W)` by elimination in the given order, a permutation of all vertices.
pub fn density_dp(graph: &DecoratedMultigraph, w: &StepGraphon, order: &[usize]) -> Result<f64> {
    let p = Problem::new(graph, w, vec![None; graph.n_vertices()])?;
    check_permutation(order, &p.free_vertices())?;
    Ok(p.eliminate(order))
}

/// The elimination order [`density`] uses.
pub fn default_order(graph: &DecoratedMultigraph) -> Vec<usize> {
    let edges = graph.edges().iter().map(|e| (e.u, e.v, 0, e.mult)).collect();
    Problem { masses: &[], kernels: Vec::new(), edges, pinned: vec![None; graph.n_vertices()] }.min_degree_order()
}

fn check_permutation(order: &[usize], free: &[usize]) -> Result<()> {
    if order.len() != free.len() {
        return Err(Error::InvalidOrder("order must list every free vertex exactly once"));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != free {
        return Err(Error::InvalidOrder("order must be a permutation of the free vertices"));
    }
    Ok(())
}

/// Number of class assignments `q^n` of the graph's vertices, if it fits in `u64`.
pub fn assignment_count(graph: &DecoratedMultigraph, w: &StepGraphon) -> Option<u64> {
    (w.num_classes() as u64).checked_pow(graph.n_vertices() as u32)
}

/// `t(F, W)` as the compensated sum over every class assignment.
pub fn density_enumerate(graph: &DecoratedMultigraph, w: &StepGraphon) -> Result<f64> {
    let total = assignment_count(graph, w).ok_or(Error::InvalidArgument("assignment space too large"))?;
    density_enumerate_range(graph, w, 0, total).map(|s| s.value())
}

/// Partial enumeration over assignment indices `start..end` (base-`q` digits,
/// vertex 0 least significant). Summing the partials of a partition of
/// `0..q^n` in index order reproduces [`density_enumerate`].
pub fn density_enumerate_range(
    graph: &DecoratedMultigraph,
    w: &StepGraphon,
    start: u64,
    end: u64,
) -> Result<CompensatedSum> {
    let p = Problem::new(graph, w, vec![None; graph.n_vertices()])?;
    let q = p.q() as u64;
    let n = graph.n_vertices();
    let mut assign = vec![0usize; n];
    let mut acc = CompensatedSum::new();
    for idx in start..end {
        let mut rem = idx;
        let mut weight = 1.0;
        for a in assign.iter_mut() {
            *a = (rem % q) as usize;
            rem /= q;
            weight *= p.masses[*a];
        }
        acc.add(weight * p.integrand(&assign));
    }
    Ok(acc)
}

/// `t_β(F, W)`: labeled vertices pinned to `beta[label]`, free vertices integrated.
pub fn marginal(graph: &DecoratedMultigraph, w: &StepGraphon, beta: &Anchoring) -> Result<f64> {
    let pinned = pins(graph, w, beta)?;
    let p = Problem::new(graph, w, pinned)?;
    let order = p.min_degree_order();
    Ok(p.eliminate(&order))
}

fn pins(graph: &DecoratedMultigraph, w: &StepGraphon, beta: &Anchoring) -> Result<Vec<Option<usize>>> {
    graph
        .labels()
        .iter()
        .map(|l| match l {
            None => Ok(None),
            Some(l) => {
                let c = *beta.get(l).ok_or(Error::MissingAnchor(*l))?;
                if c >= w.num_classes() {
                    return Err(Error::ClassOutOfRange { class: c, classes: w.num_classes() });
                }
                Ok(Some(c))
            }
        })
        .collect()
}

/// Running mean and variance (Welford), mergeable across substreams.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct McAccumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl McAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &McAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        if delta == 0.0 {
            // keeps constant integrands exact
            self.m2 += other.m2;
        } else {
            self.mean += delta * nb / n as f64;
            self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        }
        self.count = n;
    }

    pub fn estimate(&self, seed: u64) -> McEstimate {
        let stderr = if self.count > 1 {
            let var = (self.m2 / (self.count - 1) as f64).max(0.0);
            numeric::sqrt(var / self.count as f64)
        } else {
            0.0
        };
        McEstimate { mean: self.mean, stderr, samples: self.count, seed }
    }
}

/// Samples per substream when `samples` are split over `streams`.
pub fn stream_sizes(samples: u64, streams: usize) -> Vec<u64> {
    let s = streams.max(1) as u64;
    (0..s).map(|i| samples / s + u64::from(i < samples % s)).collect()
}

/// One substream: ChaCha8 seeded by `seed` on stream `stream`; each sample
/// draws a class per vertex from `π` and evaluates the edge product.
pub fn mc_stream(
    graph: &DecoratedMultigraph,
    w: &StepGraphon,
    samples: u64,
    seed: u64,
    stream: u64,
) -> Result<McAccumulator> {
    let p = Problem::new(graph, w, vec![None; graph.n_vertices()])?;
    let cumulative = numeric::cumulative(w.masses());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut assign = vec![0usize; graph.n_vertices()];
    let mut acc = McAccumulator::default();
    for _ in 0..samples {
        for a in assign.iter_mut() {
            *a = numeric::draw_class(&cumulative, &mut rng);
        }
        acc.push(p.integrand(&assign));
    }
    Ok(acc)
}

/// Unbiased Monte Carlo estimate of `t(F, W)` from one stream.
pub fn mc_density(graph: &DecoratedMultigraph, w: &StepGraphon, samples: u64, seed: u64) -> Result<McEstimate> {
    mc_density_streams(graph, w, samples, seed, 1)
}

/// Splits `samples` over `streams` independent substreams and merges them in
/// stream order; the result depends only on `(samples, seed, streams)`.
pub fn mc_density_streams(
    graph: &DecoratedMultigraph,
    w: &StepGraphon,
    samples: u64,
    seed: u64,
    streams: usize,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1"));
    }
    let mut total = McAccumulator::default();
    for (s, n) in stream_sizes(samples, streams).into_iter().enumerate() {
        total.merge(&mc_stream(graph, w, n, seed, s as u64)?);
    }
    Ok(total.estimate(seed))
}

/// `|t(F1·F2) − Σ_x π_x t_x(F1) t_x(F2)|` over all anchorings `x` of the labels `1..k`.
pub fn product_identity_residual(f1: &DecoratedMultigraph, f2: &DecoratedMultigraph, w: &StepGraphon) -> Result<f64> {
    let labels = f1.label_set();
    if labels != f2.label_set() || !f1.is_k_labeled() {
        return Err(Error::MismatchedLabels);
    }
    let lhs = density(&f1.product(f2), w)?;
    let q = w.num_classes();
    let k = labels.len() as u32;
    let count = numeric::powi(q as f64, k) as usize;
    let mut rhs = CompensatedSum::new();
    let mut beta = Anchoring::new();
    for idx in 0..count {
        let mut rem = idx;
        let mut weight = 1.0;
        for &l in &labels {
            let c = rem % q;
            rem /= q;
            beta.insert(l, c);
            weight *= w.masses()[c];
        }
        rhs.add(weight * marginal(f1, w, &beta)? * marginal(f2, w, &beta)?);
    }
    Ok(numeric::abs(lhs - rhs.value()))
}
