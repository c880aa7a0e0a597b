//! Test functionals, finitely supported signed measures on ℕ, and moments.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::{self, compensated_sum};

/// Tolerance on `Σ p_k = 1` for probability vectors.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// A real function on ℕ with finite support, identified by `id`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctional {
    id: String,
    support: Vec<u64>,
    values: Vec<f64>,
}

impl TestFunctional {
    pub fn new(id: impl Into<String>, support: Vec<u64>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        let invalid = |reason| Error::InvalidFunctional { id: id.clone(), reason };
        if id.is_empty() {
            return Err(invalid("empty id"));
        }
        if support.len() != values.len() {
            return Err(invalid("support and values differ in length"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("support must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values must be finite"));
        }
        Ok(Self { id, support, values })
    }

    /// The indicator `1_{k}`.
    pub fn indicator(id: impl Into<String>, k: u64) -> Self {
        Self::new(id, alloc::vec![k], alloc::vec![1.0]).expect("indicator is valid")
    }

    /// `a·f + b·g` under a new id.
    pub fn linear_combination(
        id: impl Into<String>,
        a: f64,
        f: &TestFunctional,
        b: f64,
        g: &TestFunctional,
    ) -> Result<Self> {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (&k, &v) in f.support.iter().zip(&f.values) {
            *acc.entry(k).or_default() += a * v;
        }
        for (&k, &v) in g.support.iter().zip(&g.values) {
            *acc.entry(k).or_default() += b * v;
        }
        let (support, values) = acc.into_iter().unzip();
        Self::new(id, support, values)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `ψ(k)`, zero off the support.
    pub fn eval(&self, k: u64) -> f64 {
        match self.support.binary_search(&k) {
            Ok(i) => self.values[i],
            Err(_) => 0.0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, numeric::abs(*v)))
    }
}

/// A finitely supported signed measure on ℕ.
///
/// The support is kept strictly increasing and zero weights are never stored,
/// so two equal measures have identical representations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteMeasure {
    support: Vec<u64>,
    weights: Vec<f64>,
}

impl FiniteMeasure {
    /// Builds a measure from a strictly increasing support. Zero weights are dropped.
    pub fn new(support: Vec<u64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::InvalidMeasure("support and weights differ in length"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMeasure("support must be strictly increasing"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidMeasure("weights must be finite"));
        }
        let (support, weights) = support.into_iter().zip(weights).filter(|&(_, w)| w != 0.0).unzip();
        Ok(Self { support, weights })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `w·δ_k`.
    pub fn point(k: u64, w: f64) -> Self {
        Self::new(alloc::vec![k], alloc::vec![w]).expect("finite point mass")
    }

    /// Embedding of a real scalar as `r·δ_1`.
    pub fn scalar(r: f64) -> Self {
        Self::point(1, r)
    }

    /// `Σ c_i μ_i`, accumulated per atom in iteration order.
    pub fn combination<'a, I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a FiniteMeasure)>,
    {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (c, m) in terms {
            for (&k, &w) in m.support.iter().zip(&m.weights) {
                *acc.entry(k).or_default() += c * w;
            }
        }
        let (support, weights) = acc.into_iter().filter(|&(_, w)| w != 0.0).unzip();
        Self { support, weights }
    }

    pub fn add(&self, other: &FiniteMeasure) -> Self {
        Self::combination([(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &FiniteMeasure) -> Self {
        Self::combination([(1.0, self), (-1.0, other)])
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::combination([(c, self)])
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// `μ({k})`.
    pub fn weight_at(&self, k: u64) -> f64 {
        match self.support.binary_search(&k) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    pub fn tv_norm(&self) -> f64 {
        compensated_sum(self.weights.iter().map(|w| numeric::abs(*w)))
    }

    /// Total-variation distance `‖μ − ν‖`.
    pub fn tv_distance(&self, other: &FiniteMeasure) -> f64 {
        self.sub(other).tv_norm()
    }
}

/// Weak-* evaluation `⟨ψ, μ⟩ = Σ_k ψ(k) μ({k})`.
pub fn pair(psi: &TestFunctional, v: &FiniteMeasure) -> f64 {
    // merge walk over the two sorted supports
    let (mut i, mut j) = (0, 0);
    let mut acc = numeric::CompensatedSum::new();
    while i < psi.support.len() && j < v.support.len() {
        match psi.support[i].cmp(&v.support[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                acc.add(psi.values[i] * v.weights[j]);
                i += 1;
                j += 1;
            }
        }
    }
    acc.value()
}

pub fn tv_norm(v: &FiniteMeasure) -> f64 {
    v.tv_norm()
}

/// Checks that `p` is a probability vector on `{0..p.len()-1}`.
pub fn validate_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotADistribution("empty vector"));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotADistribution("non-finite entry"));
    }
    if p.iter().any(|&x| x < 0.0) {
        return Err(Error::NotADistribution("negative entry"));
    }
    let s = compensated_sum(p.iter().copied());
    if numeric::abs(s - 1.0) > DISTRIBUTION_TOL {
        return Err(Error::NotADistribution("entries do not sum to 1"));
    }
    Ok(())
}

/// `Σ_k k^r p_k` for a probability vector `p` on `{0..N}`.
pub fn moment(p: &[f64], r: u32) -> Result<f64> {
    validate_distribution(p)?;
    Ok(raw_moment(p, r))
}

pub(crate) fn raw_moment(p: &[f64], r: u32) -> f64 {
    compensated_sum(p.iter().enumerate().map(|(k, &pk)| numeric::powi(k as f64, r) * pk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    Distribution,
    Symbolic,
}

/// Moments `M_0, M_1, …` of a nonnegative random variable.
///
/// Stored as natural logarithms so that sequences like `M_{2n} = e^{2n²}`
/// stay representable far past `f64` overflow; a zero moment is `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    log_moments: Vec<f64>,
    source: MomentSource,
}

impl MomentSequence {
    /// Moments of `p` up to and including `max_order`.
    pub fn from_distribution(p: &[f64], max_order: usize) -> Result<Self> {
        validate_distribution(p)?;
        let mut log_moments = Vec::with_capacity(max_order + 1);
        let mut terms = Vec::with_capacity(p.len());
        for r in 0..=max_order {
            terms.clear();
            for (k, &pk) in p.iter().enumerate() {
                if pk == 0.0 {
                    continue;
                }
                let log_k_r = if k == 0 {
                    if r == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    r as f64 * libm::log(k as f64)
                };
                terms.push(libm::log(pk) + log_k_r);
            }
            log_moments.push(numeric::log_sum_exp(&terms));
        }
        // M_0 of a distribution is exactly one
        log_moments[0] = 0.0;
        Ok(Self { log_moments, source: MomentSource::Distribution })
    }

    /// A symbolic sequence given by its (nonnegative) moments.
    pub fn from_moments(moments: &[f64]) -> Result<Self> {
        if moments.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidArgument("moments must be finite and nonnegative"));
        }
        Ok(Self { log_moments: moments.iter().map(|&m| libm::log(m)).collect(), source: MomentSource::Symbolic })
    }

    /// A symbolic sequence given by `ln M_r`.
    pub fn from_log_moments(log_moments: Vec<f64>) -> Result<Self> {
        if log_moments.iter().any(|m| m.is_nan() || *m == f64::INFINITY) {
            return Err(Error::InvalidArgument("log-moments must be below +inf"));
        }
        Ok(Self { log_moments, source: MomentSource::Symbolic })
    }

    /// A symbolic sequence from its norms: `M_r = norm(r)^r` for `r ≥ 1`, `M_0 = 1`.
    pub fn from_norms<F: Fn(usize) -> f64>(max_order: usize, norm: F) -> Result<Self> {
        let mut log_moments = Vec::with_capacity(max_order + 1);
        log_moments.push(0.0);
        for r in 1..=max_order {
            let n = norm(r);
            if !(n.is_finite() && n >= 0.0) {
                return Err(Error::InvalidArgument("norms must be finite and nonnegative"));
            }
            log_moments.push(r as f64 * libm::log(n));
        }
        Ok(Self { log_moments, source: MomentSource::Symbolic })
    }

    pub fn source(&self) -> MomentSource {
        self.source
    }

    /// Highest order present.
    pub fn max_order(&self) -> usize {
        self.log_moments.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.log_moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_moments.is_empty()
    }

    pub fn log_moment(&self, r: usize) -> Option<f64> {
        self.log_moments.get(r).copied()
    }

    pub fn moment(&self, r: usize) -> Option<f64> {
        self.log_moment(r).map(libm::exp)
    }

    pub fn moments(&self) -> Vec<f64> {
        self.log_moments.iter().map(|&l| libm::exp(l)).collect()
    }

    /// `M_r^{1/r}`, the `L^r` norm of the underlying variable.
    pub fn norm(&self, r: usize) -> Option<f64> {
        if r == 0 {
            return None;
        }
        self.log_moment(r).map(|l| libm::exp(l / r as f64))
    }
}
