//! Distributions with matching low-order moments and the rank-one graphons
//! built from them.
//!
//! For `W(x, y) = f(x) f(y)` with `f` distributed as `p`, every density
//! factors as `t(F, W) = Π_v M_{deg v}(p)`. Two distributions sharing moments
//! up to order `D` therefore give graphons with equal densities on every
//! graph of maximum degree `D`, while a vertex of degree `D + 1` can tell
//! them apart.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::density::density;
use crate::error::{Error, Result};
use crate::graph::DecoratedMultigraph;
use crate::graphon::StepGraphon;
use crate::linalg::{null_space, Matrix};
use crate::measure::{moment, raw_moment, validate_distribution, FiniteMeasure, TestFunctional};
use crate::numeric;
use crate::SCALAR_FUNCTIONAL_ID;

/// Moments up to the matched order must agree to this.
pub const MOMENT_MATCH_TOL: f64 = 1e-10;
/// The first unmatched moment must differ by more than this.
pub const WITNESS_TOL: f64 = 1e-8;

/// Two probability vectors on `{0..N}` with equal moments of order `0..=D`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair {
    /// `N`; the vectors have `N + 1` entries.
    pub support: usize,
    /// `D`.
    pub order: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub epsilon: f64,
    /// Direction `z` with `Σ_k k^r z_k = 0` for `r ≤ D`; `p − q = 2εz`.
    pub null_vector: Vec<f64>,
    pub seed: u64,
}

impl MatchedPair {
    /// Wraps two given distributions, checking only that moments `0..=order` agree.
    pub fn from_distributions(p: Vec<f64>, q: Vec<f64>, order: usize) -> Result<Self> {
        validate_distribution(&p)?;
        validate_distribution(&q)?;
        if p.len() != q.len() {
            return Err(Error::InvalidArgument("distributions must share a support"));
        }
        for r in 0..=order as u32 {
            if numeric::abs(raw_moment(&p, r) - raw_moment(&q, r)) > MOMENT_MATCH_TOL {
                return Err(Error::InvalidArgument("moments do not match up to the stated order"));
            }
        }
        let null_vector = p.iter().zip(&q).map(|(a, b)| (a - b) / 2.0).collect();
        Ok(Self { support: p.len() - 1, order, p, q, epsilon: 1.0, null_vector, seed: 0 })
    }

    pub fn moment_gap(&self, r: u32) -> f64 {
        raw_moment(&self.p, r) - raw_moment(&self.q, r)
    }

    /// Whether the pair is distinguished at order `D + 1`.
    pub fn is_distinct(&self) -> bool {
        numeric::abs(self.moment_gap(self.order as u32 + 1)) > WITNESS_TOL
    }
}

/// `(−1)^k C(D+1, k)` for `k = 0..=D+1`: the `(D+1)`-th finite difference,
/// which annihilates every polynomial of degree at most `D`.
pub fn finite_difference_stencil(order: usize) -> Vec<f64> {
    let n = order + 1;
    let mut c = 1.0f64;
    (0..=n)
        .map(|k| {
            let v = if k % 2 == 0 { c } else { -c };
            c = c * (n - k) as f64 / (k + 1) as f64;
            v
        })
        .collect()
}

/// The `(D+1) × (N+1)` moment map, row `r` being `k ↦ k^r`.
pub fn moment_matrix(support: usize, order: usize) -> Matrix {
    Matrix::from_fn(order + 1, support + 1, |r, k| numeric::powi(k as f64, r as u32))
}

/// Orthonormal basis of the null space of [`moment_matrix`].
pub fn moment_null_space(support: usize, order: usize) -> Vec<Vec<f64>> {
    null_space(&moment_matrix(support, order), 1e-13)
}

/// `p = u + εz`, `q = u − εz` with `u` uniform on `{0..N}`, `z` the zero-padded
/// finite-difference stencil and `ε` the largest step keeping both nonnegative.
///
/// The construction is deterministic; `seed` is recorded but does not change it.
pub fn matched_pair(support: usize, order: usize, seed: u64) -> Result<MatchedPair> {
    if support < order + 1 {
        return Err(Error::InvalidArgument("support N must be at least D + 1"));
    }
    let mut z = finite_difference_stencil(order);
    z.resize(support + 1, 0.0);
    let u = 1.0 / (support + 1) as f64;
    let zmax = z.iter().fold(0.0, |m, x| f64::max(m, numeric::abs(*x)));
    let epsilon = u / zmax;
    let p: Vec<f64> = z.iter().map(|zk| u + epsilon * zk).collect();
    let q: Vec<f64> = z.iter().map(|zk| (u - epsilon * zk).max(0.0)).collect();
    let p = p.into_iter().map(|x| x.max(0.0)).collect();
    Ok(MatchedPair { support, order, p, q, epsilon, null_vector: z, seed })
}

/// `W(x, y) = f(x) f(y)` with `f = k` on a class of mass `dist[k]`; zero-mass
/// points are dropped. Blocks are `(k·k′)·δ_1`.
pub fn rank1_graphon(dist: &[f64]) -> Result<StepGraphon> {
    validate_distribution(dist)?;
    let points: Vec<(f64, f64)> =
        dist.iter().enumerate().filter(|(_, &m)| m > 0.0).map(|(k, &m)| (k as f64, m)).collect();
    if points.is_empty() {
        return Err(Error::NotADistribution("empty support"));
    }
    let masses = points.iter().map(|p| p.1).collect();
    let blocks = points.iter().map(|a| points.iter().map(|b| FiniteMeasure::scalar(a.0 * b.0)).collect()).collect();
    StepGraphon::new(masses, blocks, vec![TestFunctional::indicator(SCALAR_FUNCTIONAL_ID, 1)])
}

/// `Π_v M_{deg v}(dist)`, degrees counting multiplicity.
pub fn rank1_density(graph: &DecoratedMultigraph, dist: &[f64]) -> Result<f64> {
    if !graph.is_unlabeled() {
        return Err(Error::InvalidGraph("graph must be unlabeled"));
    }
    if graph.edges().iter().any(|e| e.psi != SCALAR_FUNCTIONAL_ID) {
        return Err(Error::InvalidGraph("every edge must carry the scalar decoration"));
    }
    validate_distribution(dist)?;
    Ok(graph.degrees().into_iter().map(|d| raw_moment(dist, d)).product())
}

/// One graph of a counterexample report.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub name: String,
    pub max_degree: u32,
    pub density_p: f64,
    pub density_q: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub pair: MatchedPair,
    pub graphs_tested: Vec<SuiteRow>,
    /// Over graphs of maximum degree `≤ D`.
    pub max_discrepancy_low_degree: f64,
    pub witness_name: String,
    pub witness_graph: DecoratedMultigraph,
    pub witness_gap: f64,
}

impl CounterexampleReport {
    pub fn holds(&self) -> bool {
        self.max_discrepancy_low_degree <= MOMENT_MATCH_TOL && self.witness_gap > WITNESS_TOL
    }
}

/// Default suite for order `D`: small graphs of maximum degree `≤ D`, then the
/// `(D+1)`-star as witness.
pub fn standard_suite(order: usize) -> Vec<(String, DecoratedMultigraph)> {
    let s = SCALAR_FUNCTIONAL_ID;
    let candidates = [
        ("vertex", DecoratedMultigraph::empty(1)),
        ("edge", DecoratedMultigraph::edge(s)),
        ("2-path", DecoratedMultigraph::path(2, s)),
        ("triangle", DecoratedMultigraph::cycle(3, s)),
        ("3-star", DecoratedMultigraph::star(3, s)),
        ("C4", DecoratedMultigraph::cycle(4, s)),
    ];
    let mut suite: Vec<(String, DecoratedMultigraph)> = candidates
        .into_iter()
        .filter(|(name, g)| g.max_degree() as usize <= order && (order == 0 || *name != "vertex"))
        .map(|(name, g)| (String::from(name), g))
        .collect();
    suite.push((alloc::format!("{}-star", order + 1), DecoratedMultigraph::star(order + 1, s)));
    suite
}

/// Builds the matched pair for `(N, D, seed)` and compares its rank-one graphons on `suite`.
pub fn counterexample_report(
    support: usize,
    order: usize,
    seed: u64,
    suite: &[(String, DecoratedMultigraph)],
) -> Result<CounterexampleReport> {
    let pair = matched_pair(support, order, seed)?;
    compare_pair(pair, suite)
}

/// Density comparison of the rank-one graphons of an arbitrary pair.
pub fn compare_pair(pair: MatchedPair, suite: &[(String, DecoratedMultigraph)]) -> Result<CounterexampleReport> {
    let d = pair.order as u32;
    for (_, g) in suite {
        if !g.is_unlabeled() || g.edges().iter().any(|e| e.psi != SCALAR_FUNCTIONAL_ID) {
            return Err(Error::InvalidGraph("suite graphs must be unlabeled with scalar decorations"));
        }
    }
    let witness = suite
        .iter()
        .find(|(_, g)| g.degrees().contains(&(d + 1)))
        .ok_or(Error::InvalidArgument("suite needs a graph with a vertex of degree D + 1"))?;
    if !suite.iter().any(|(_, g)| g.max_degree() <= d) {
        return Err(Error::InvalidArgument("suite needs a graph of maximum degree at most D"));
    }
    if pair.is_distinct() && numeric::abs(pair.moment_gap(d + 1)) <= WITNESS_TOL {
        return Err(Error::InvalidArgument("witness moment does not separate the pair"));
    }
    let wp = rank1_graphon(&pair.p)?;
    let wq = rank1_graphon(&pair.q)?;
    let mut rows = Vec::with_capacity(suite.len());
    let mut max_low: f64 = 0.0;
    for (name, g) in suite {
        let a = density(g, &wp)?;
        let b = density(g, &wq)?;
        let gap = numeric::abs(a - b);
        if g.max_degree() <= d {
            max_low = max_low.max(gap);
        }
        rows.push(SuiteRow { name: name.clone(), max_degree: g.max_degree(), density_p: a, density_q: b, gap });
    }
    let witness_gap = rows.iter().find(|r| r.name == witness.0).map_or(0.0, |r| r.gap);
    Ok(CounterexampleReport {
        pair,
        graphs_tested: rows,
        max_discrepancy_low_degree: max_low,
        witness_name: witness.0.clone(),
        witness_graph: witness.1.clone(),
        witness_gap,
    })
}

/// `|M_{D+1}(p) − M_{D+1}(q)| · M_1^{D+1}`, the predicted `(D+1)`-star gap.
pub fn predicted_star_gap(pair: &MatchedPair) -> Result<f64> {
    let d = pair.order as u32;
    let m1 = moment(&pair.p, 1)?;
    Ok(numeric::abs(pair.moment_gap(d + 1)) * numeric::powi(m1, d + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use crate::transforms::{twin_reduce, value_profile, TWIN_TOL};
    use proptest::prelude::*;

    const S: &str = SCALAR_FUNCTIONAL_ID;

    #[test]
    fn stencil_is_a_finite_difference() {
        assert_eq!(finite_difference_stencil(3), vec![1.0, -4.0, 6.0, -4.0, 1.0]);
        assert_eq!(finite_difference_stencil(0), vec![1.0, -1.0]);
        for d in 0..7usize {
            let z = finite_difference_stencil(d);
            for r in 0..=d as u32 {
                let s: f64 = z.iter().enumerate().map(|(k, zk)| numeric::powi(k as f64, r) * zk).sum();
                assert_eq!(s, 0.0);
            }
            // (D+1)-th difference of k^{D+1} is ±(D+1)!
            let s: f64 = z.iter().enumerate().map(|(k, zk)| numeric::powi(k as f64, d as u32 + 1) * zk).sum();
            let fact: f64 = (1..=d + 1).map(|i| i as f64).product();
            assert_eq!(s.abs(), fact);
        }
    }

    #[test]
    fn matched_pair_n5_d3() {
        let pair = matched_pair(5, 3, 1).unwrap();
        assert_eq!(pair.null_vector, vec![1.0, -4.0, 6.0, -4.0, 1.0, 0.0]);
        assert!((pair.epsilon - 1.0 / 36.0).abs() < 1e-17);
        let p = [7.0, 2.0, 12.0, 2.0, 7.0, 6.0];
        let q = [5.0, 10.0, 0.0, 10.0, 5.0, 6.0];
        for k in 0..6 {
            assert!((pair.p[k] - p[k] / 36.0).abs() < 1e-16);
            assert!((pair.q[k] - q[k] / 36.0).abs() < 1e-16);
        }
        assert!((moment(&pair.p, 1).unwrap() - 2.5).abs() < 1e-15);
        for r in 0..=3 {
            assert!(pair.moment_gap(r).abs() <= MOMENT_MATCH_TOL);
        }
        // 2ε·4! = 4/3
        assert!((pair.moment_gap(4) - 4.0 / 3.0).abs() < 1e-12);
        assert!(pair.is_distinct());
    }

    #[test]
    fn matched_pair_edge_cases() {
        let pair = matched_pair(3, 0, 0).unwrap();
        assert_ne!(pair.p, pair.q);
        assert!(pair.moment_gap(0).abs() < 1e-15);
        assert!(matched_pair(3, 3, 0).is_err());
        // N = D + 1: the moment map has full row rank, so the null space is a line
        for d in 0..6 {
            let a = moment_matrix(d + 1, d);
            assert_eq!(rank(&a, 1e-10), d + 1);
            let ns = moment_null_space(d + 1, d);
            assert_eq!(ns.len(), 1);
            let z = finite_difference_stencil(d);
            let norm = libm::sqrt(z.iter().map(|x| x * x).sum());
            let cos: f64 = ns[0].iter().zip(&z).map(|(a, b)| a * b / norm).sum();
            assert!((cos.abs() - 1.0).abs() < 1e-9);
        }
        assert_eq!(moment_null_space(7, 3).len(), 4);
    }

    #[test]
    fn rank1_graphon_examples() {
        let w = rank1_graphon(&[0.0, 1.0]).unwrap();
        assert_eq!(w.num_classes(), 1);
        assert_eq!(w.block(0, 0), &FiniteMeasure::scalar(1.0));
        assert!((density(&DecoratedMultigraph::complete(4, S), &w).unwrap() - 1.0).abs() < 1e-15);
        let z = rank1_graphon(&[1.0]).unwrap();
        assert!(z.block(0, 0).is_zero());
        assert_eq!(density(&DecoratedMultigraph::edge(S), &z).unwrap(), 0.0);
        let u = rank1_graphon(&[0.0, 0.5, 0.5]).unwrap();
        assert!((density(&DecoratedMultigraph::edge(S), &u).unwrap() - 2.25).abs() < 1e-14);
        assert!(rank1_graphon(&[]).is_err());
    }

    #[test]
    fn rank1_density_product_formula() {
        let dist = [0.1, 0.2, 0.3, 0.4];
        let m = |r| moment(&dist, r).unwrap();
        let cases = [
            (DecoratedMultigraph::edge(S), m(1) * m(1)),
            (DecoratedMultigraph::cycle(3, S), m(2) * m(2) * m(2)),
            (DecoratedMultigraph::star(4, S), m(4) * m(1) * m(1) * m(1) * m(1)),
        ];
        for (g, expected) in cases {
            assert!((rank1_density(&g, &dist).unwrap() - expected).abs() <= 1e-12 * expected);
        }
        assert!(rank1_density(&DecoratedMultigraph::edge("other"), &dist).is_err());
        let labelled = DecoratedMultigraph::edge(S).relabel(0, 1).unwrap();
        assert!(rank1_density(&labelled, &dist).is_err());
    }

    #[test]
    fn counterexample_n5_d3() {
        let suite = standard_suite(3);
        let names: Vec<&str> = suite.iter().map(|s| s.0.as_str()).collect();
        assert_eq!(names, ["edge", "2-path", "triangle", "3-star", "C4", "4-star"]);
        let r = counterexample_report(5, 3, 1, &suite).unwrap();
        assert!(r.max_discrepancy_low_degree <= 1e-10);
        // (4/3)·2.5⁴
        assert!((r.witness_gap - 52.083_333_333_333_33).abs() <= 1e-6);
        assert!((predicted_star_gap(&r.pair).unwrap() - r.witness_gap).abs() <= 1e-9);
        assert!(r.holds());
    }

    #[test]
    fn multi_bond_witness() {
        let pair = matched_pair(5, 3, 1).unwrap();
        let suite = vec![
            (String::from("edge"), DecoratedMultigraph::edge(S)),
            (String::from("4-bond"), DecoratedMultigraph::bond(4, S)),
        ];
        let r = compare_pair(pair.clone(), &suite).unwrap();
        let m4p = moment(&pair.p, 4).unwrap();
        let m4q = moment(&pair.q, 4).unwrap();
        assert!((r.witness_gap - (m4p * m4p - m4q * m4q).abs()).abs() <= 1e-9);
    }

    #[test]
    fn identical_pair_has_no_gaps() {
        let p = vec![0.2, 0.3, 0.5];
        let pair = MatchedPair::from_distributions(p.clone(), p, 1).unwrap();
        assert!(!pair.is_distinct());
        let r = compare_pair(pair, &standard_suite(1)).unwrap();
        assert!(r.graphs_tested.iter().all(|row| row.gap == 0.0));
        assert!(compare_pair(matched_pair(5, 3, 1).unwrap(), &[(String::from("edge"), DecoratedMultigraph::edge(S))])
            .is_err());
    }

    #[test]
    fn matched_graphons_are_not_weakly_isomorphic() {
        let pair = matched_pair(5, 3, 1).unwrap();
        let a = twin_reduce(&rank1_graphon(&pair.p).unwrap(), TWIN_TOL);
        let b = twin_reduce(&rank1_graphon(&pair.q).unwrap(), TWIN_TOL);
        assert_ne!(value_profile(&a, S).unwrap(), value_profile(&b, S).unwrap());
    }

    proptest! {
        #[test]
        fn low_degree_densities_match(d in 0usize..4, extra in 0usize..3) {
            let pair = matched_pair(d + 1 + extra, d, 0).unwrap();
            for r in 0..=d as u32 {
                prop_assert!(pair.moment_gap(r).abs() <= MOMENT_MATCH_TOL);
            }
            prop_assert!(pair.is_distinct());
            let r = counterexample_report(d + 1 + extra, d, 0, &standard_suite(d)).unwrap();
            let worst = r.graphs_tested.iter()
                .filter(|row| row.max_degree as usize <= d)
                .map(|row| row.gap / (1.0f64).max(row.density_p.abs()))
                .fold(0.0, f64::max);
            prop_assert!(worst <= 1e-10);
            prop_assert!(r.witness_gap > WITNESS_TOL);
        }

        #[test]
        fn product_formula_matches_density_engine(
            raw in proptest::collection::vec(0.0f64..1.0, 1..6),
            edges in proptest::collection::vec((0usize..6, 0usize..6, 1u32..3), 0..8),
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-3);
            let mut dist: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let tail: f64 = dist[1..].iter().sum();
            dist[0] = 1.0 - tail;
            prop_assume!(dist[0] >= 0.0);
            let g = DecoratedMultigraph::new(
                6,
                edges.into_iter().filter(|e| e.0 != e.1).map(|(u, v, m)| crate::graph::Edge::new(u, v, S, m)).collect(),
                vec![None; 6],
            ).unwrap();
            let closed = rank1_density(&g, &dist).unwrap();
            let engine = density(&g, &rank1_graphon(&dist).unwrap()).unwrap();
            prop_assert!((closed - engine).abs() <= 1e-10 * closed.abs().max(1e-300));
        }
    }
}
