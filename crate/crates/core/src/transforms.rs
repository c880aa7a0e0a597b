//! Quotients by class partitions, twin reduction, and anchored graphons.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::measure::FiniteMeasure;
use crate::numeric;

/// Default tolerance on the total-variation distance of block rows.
pub const TWIN_TOL: f64 = 1e-9;

/// Features are rounded to this many decimal places before rows are compared.
pub const FEATURE_DECIMALS: i32 = 12;

/// Surjective map from source classes `0..q` onto target classes `0..q′`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    class_of: Vec<usize>,
    targets: usize,
}

impl Partition {
    pub fn new(class_of: Vec<usize>) -> Result<Self> {
        let targets = class_of.iter().max().map_or(0, |m| m + 1);
        let mut hit = vec![false; targets];
        for &c in &class_of {
            hit[c] = true;
        }
        if hit.iter().any(|h| !h) {
            return Err(Error::InvalidPartition("map onto target classes must be surjective"));
        }
        Ok(Self { class_of, targets })
    }

    pub fn identity(q: usize) -> Self {
        Self { class_of: (0..q).collect(), targets: q }
    }

    /// Everything in one class.
    pub fn trivial(q: usize) -> Self {
        Self { class_of: vec![0; q], targets: usize::from(q > 0) }
    }

    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn sources(&self) -> usize {
        self.class_of.len()
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    /// `then ∘ self`: first apply `self`, then `then`.
    pub fn then(&self, then: &Partition) -> Result<Partition> {
        if then.sources() != self.targets {
            return Err(Error::InvalidPartition("composed partitions do not line up"));
        }
        Ok(Partition { class_of: self.class_of.iter().map(|&c| then.class_of[c]).collect(), targets: then.targets })
    }

    /// Members of each target class in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.targets];
        for (i, &c) in self.class_of.iter().enumerate() {
            m[c].push(i);
        }
        m
    }
}

/// Factor graphon `W/P`: masses added, blocks averaged with weights `π_i π_j`.
pub fn quotient(w: &StepGraphon, p: &Partition) -> Result<StepGraphon> {
    if p.sources() != w.num_classes() {
        return Err(Error::InvalidPartition("partition must cover every class of the graphon"));
    }
    let members = p.members();
    let pi = w.masses();
    let masses: Vec<f64> = members.iter().map(|m| numeric::compensated_sum(m.iter().map(|&i| pi[i]))).collect();
    let r = p.targets();
    let mut blocks = vec![FiniteMeasure::zero(); r * r];
    for a in 0..r {
        for b in a..r {
            let norm = masses[a] * masses[b];
            let terms: Vec<(f64, &FiniteMeasure)> = members[a]
                .iter()
                .flat_map(|&i| members[b].iter().map(move |&j| (i, j)))
                .map(|(i, j)| (pi[i] * pi[j] / norm, w.block(i, j)))
                .collect();
            let m = FiniteMeasure::combination(terms);
            blocks[b * r + a] = m.clone();
            blocks[a * r + b] = m;
        }
    }
    Ok(StepGraphon::from_parts(masses, blocks, w.dictionary().clone()))
}

/// Groups classes whose block rows are within `tol` in total variation,
/// closed transitively. Target classes are numbered by smallest member.
pub fn twin_partition(w: &StepGraphon, tol: f64) -> Partition {
    let q = w.num_classes();
    let mut parent: Vec<usize> = (0..q).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..q {
        for i2 in i + 1..q {
            let twins = (0..q).all(|j| w.block(i, j).tv_distance(w.block(i2, j)) <= tol);
            if twins {
                let (a, b) = (find(&mut parent, i), find(&mut parent, i2));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..q).map(|i| find(&mut parent, i)).collect();
    let mut numbering = vec![usize::MAX; q];
    let mut next = 0;
    let class_of = roots
        .iter()
        .map(|&r| {
            if numbering[r] == usize::MAX {
                numbering[r] = next;
                next += 1;
            }
            numbering[r]
        })
        .collect();
    Partition { class_of, targets: next }
}

/// Quotient by the twin partition.
pub fn twin_reduce(w: &StepGraphon, tol: f64) -> StepGraphon {
    let p = twin_partition(w, tol);
    quotient(w, &p).expect("twin partition covers the graphon")
}

/// True when no two classes are twins at `tol`.
pub fn is_twin_free(w: &StepGraphon, tol: f64) -> bool {
    twin_partition(w, tol).targets() == w.num_classes()
}

/// Embedding of each class into its feature row `(^ψW(i, α_j))_{ψ, j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub anchors: Vec<usize>,
    pub functional_ids: Vec<String>,
    /// One row per source class; columns ordered ψ-major, then anchor.
    pub features: Vec<Vec<f64>>,
    /// Source class → anchored class, anchored classes in lexicographic row order.
    pub partition: Partition,
}

fn round_feature(x: f64) -> f64 {
    let scale = libm::pow(10.0, f64::from(FEATURE_DECIMALS));
    let r = libm::round(x * scale);
    // no negative zero in keys
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn row_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn feature_map(w: &StepGraphon, anchors: &[usize], functional_ids: &[String]) -> Result<FeatureMap> {
    if anchors.is_empty() {
        return Err(Error::InvalidArgument("anchor list must be nonempty"));
    }
    let q = w.num_classes();
    if let Some(&bad) = anchors.iter().find(|&&a| a >= q) {
        return Err(Error::ClassOutOfRange { class: bad, classes: q });
    }
    let kernels = functional_ids.iter().map(|id| w.kernel(id)).collect::<Result<Vec<_>>>()?;
    let features: Vec<Vec<f64>> =
        (0..q).map(|i| kernels.iter().flat_map(|k| anchors.iter().map(move |&a| k.matrix[(i, a)])).collect()).collect();
    let keys: Vec<Vec<f64>> = features.iter().map(|r| r.iter().map(|&x| round_feature(x)).collect()).collect();
    let mut distinct: Vec<&Vec<f64>> = keys.iter().collect();
    distinct.sort_by(|a, b| row_cmp(a, b));
    distinct.dedup_by(|a, b| row_cmp(a, b) == Ordering::Equal);
    let class_of = keys.iter().map(|k| distinct.binary_search_by(|d| row_cmp(d, k)).unwrap()).collect();
    let partition = Partition::new(class_of)?;
    Ok(FeatureMap { anchors: anchors.to_vec(), functional_ids: functional_ids.to_vec(), features, partition })
}

/// Anchored graphon: classes with equal (rounded) feature rows merged, mass
/// pushed forward, blocks conditionally averaged.
pub fn anchored_graphon(
    w: &StepGraphon,
    anchors: &[usize],
    functional_ids: &[String],
) -> Result<(FeatureMap, StepGraphon)> {
    let fm = feature_map(w, anchors, functional_ids)?;
    let g = quotient(w, &fm.partition)?;
    Ok((fm, g))
}

/// True when the feature rows separate every pair of non-twin classes.
pub fn regularity_check(w: &StepGraphon, anchors: &[usize], functional_ids: &[String]) -> Result<bool> {
    let fm = feature_map(w, anchors, functional_ids)?;
    let twins = twin_partition(w, TWIN_TOL);
    let q = w.num_classes();
    let anchored = fm.partition.class_of();
    let tw = twins.class_of();
    Ok((0..q).all(|i| (i + 1..q).all(|j| tw[i] == tw[j] || anchored[i] != anchored[j])))
}

/// `count` i.i.d. classes drawn from `π` with a ChaCha8 stream seeded by `seed`.
pub fn sample_anchors(w: &StepGraphon, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::InvalidArgument("anchor count must be at least 1"));
    }
    let cumulative = numeric::cumulative(w.masses());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| numeric::draw_class(&cumulative, &mut rng)).collect())
}

/// Class bijection `σ` with `|π_i − π′_σ(i)| ≤ tol` and
/// `‖W_ij − W′_σ(i)σ(j)‖ ≤ tol`, found by backtracking.
pub fn find_isomorphism(a: &StepGraphon, b: &StepGraphon, tol: f64) -> Option<Vec<usize>> {
    let q = a.num_classes();
    if q != b.num_classes() {
        return None;
    }
    fn extend(a: &StepGraphon, b: &StepGraphon, tol: f64, sigma: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let q = a.num_classes();
        let i = sigma.len();
        if i == q {
            return true;
        }
        for j in 0..q {
            if used[j] || numeric::abs(a.masses()[i] - b.masses()[j]) > tol {
                continue;
            }
            if a.block(i, i).tv_distance(b.block(j, j)) > tol {
                continue;
            }
            if (0..i).any(|i2| a.block(i, i2).tv_distance(b.block(j, sigma[i2])) > tol) {
                continue;
            }
            sigma.push(j);
            used[j] = true;
            if extend(a, b, tol, sigma, used) {
                return true;
            }
            sigma.pop();
            used[j] = false;
        }
        false
    }
    let mut sigma = Vec::with_capacity(q);
    let mut used = vec![false; q];
    extend(a, b, tol, &mut sigma, &mut used).then_some(sigma)
}

/// Distribution of `^ψW(x, y)` under `π × π`: `(value, mass)` pairs sorted by
/// value, values equal after rounding merged. Weakly isomorphic graphons
/// have equal profiles.
pub fn value_profile(w: &StepGraphon, psi_id: &str) -> Result<Vec<(f64, f64)>> {
    let k = w.kernel(psi_id)?.matrix;
    let q = w.num_classes();
    let mut cells: Vec<(f64, f64)> = (0..q)
        .flat_map(|i| (0..q).map(move |j| (i, j)))
        .map(|(i, j)| (round_feature(k[(i, j)]), w.masses()[i] * w.masses()[j]))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = libm::pow(10.0, f64::from(FEATURE_DECIMALS));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (v, m) in cells {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    Ok(out.into_iter().map(|(v, m)| (v / scale, m)).collect())
}
