//! Partial sums of the Carleman-type series `Σ_n ‖W‖_{2nk}^{−k}`.
//!
//! Divergence cannot be decided from finitely many terms, so the report
//! classifies with a fixed rule:
//!
//! * least-squares slope of `S_N` against `N` over the last half of the terms
//!   at least [`DIVERGENCE_SLOPE`] ⇒ divergent;
//! * otherwise, every term in the last half at most [`GEOMETRIC_RATIO`] times
//!   its predecessor ⇒ convergent;
//! * otherwise inconclusive.
//!
//! A step graphon is bounded, so its terms never drop below `‖W‖_∞^{−k}` and
//! the series diverges; graphon sources are always classified divergent.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::measure::MomentSequence;

pub const DIVERGENCE_SLOPE: f64 = 1e-6;
pub const GEOMETRIC_RATIO: f64 = 0.99;

#[derive(Debug, Clone, Copy)]
pub enum CarlemanSource<'a> {
    Graphon(&'a StepGraphon),
    /// Moments of `‖W‖`; `‖W‖_p = M_p^{1/p}`.
    Moments(&'a MomentSequence),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Divergent,
    Convergent,
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Divergent => "divergent",
            Classification::Convergent => "convergent",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanReport {
    pub k: u32,
    /// `‖W‖_{2nk}^{−k}` for `n = 1..=N`.
    pub terms: Vec<f64>,
    /// `S_N` for `N = 1..=terms.len()`.
    pub partial_sums: Vec<f64>,
    pub growth_fit: f64,
    pub classification: Classification,
    /// `N·‖W‖_∞^{−k}` for graphon sources.
    pub lower_bound: Option<f64>,
}

pub fn carleman_report(source: CarlemanSource<'_>, k: u32, terms: usize) -> Result<CarlemanReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive"));
    }
    if terms == 0 {
        return Err(Error::InvalidArgument("term count must be positive"));
    }
    let kf = f64::from(k);
    let values: Vec<f64> = match source {
        CarlemanSource::Graphon(w) => (1..=terms)
            .map(|n| {
                let norm = w.p_norm(2.0 * n as f64 * kf)?;
                Ok(libm::pow(norm, -kf))
            })
            .collect::<Result<_>>()?,
        CarlemanSource::Moments(m) => {
            let needed = 2 * terms * k as usize;
            if m.max_order() < needed || m.is_empty() {
                return Err(Error::InsufficientMoments { needed, available: m.max_order() });
            }
            // ‖W‖_{2nk}^{-k} = exp(−ln M_{2nk} / 2n)
            (1..=terms).map(|n| libm::exp(-m.log_moment(2 * n * k as usize).unwrap() / (2.0 * n as f64))).collect()
        }
    };
    let mut partial_sums = Vec::with_capacity(terms);
    let mut s = 0.0;
    for &t in &values {
        s += t;
        partial_sums.push(s);
    }
    let half = terms / 2;
    let growth_fit = slope(&partial_sums[half..], half + 1);
    let mut classification = if growth_fit >= DIVERGENCE_SLOPE {
        Classification::Divergent
    } else if geometric_tail(&values[half..]) {
        Classification::Convergent
    } else {
        Classification::Inconclusive
    };
    let lower_bound = match source {
        CarlemanSource::Graphon(w) => {
            classification = Classification::Divergent;
            Some(terms as f64 * libm::pow(w.sup_norm(), -kf))
        }
        CarlemanSource::Moments(_) => None,
    };
    Ok(CarlemanReport { k, terms: values, partial_sums, growth_fit, classification, lower_bound })
}

/// Least-squares slope of `ys` against `first, first+1, …`.
fn slope(ys: &[f64], first: usize) -> f64 {
    let n = ys.len();
    if n < 2 {
        return if ys.first() == Some(&f64::INFINITY) { f64::INFINITY } else { 0.0 };
    }
    if ys.contains(&f64::INFINITY) {
        return f64::INFINITY;
    }
    let xbar = first as f64 + (n - 1) as f64 / 2.0;
    let ybar = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = (first + i) as f64 - xbar;
        sxy += dx * (y - ybar);
        sxx += dx * dx;
    }
    sxy / sxx
}

fn geometric_tail(terms: &[f64]) -> bool {
    terms.len() >= 2 && terms.windows(2).all(|w| if w[0] == 0.0 { w[1] == 0.0 } else { w[1] <= GEOMETRIC_RATIO * w[0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::fixtures::w2;
    use crate::testing::random_graphon;
    use proptest::prelude::*;

    #[test]
    fn bounded_graphon_is_divergent() {
        let w = w2();
        let r = carleman_report(CarlemanSource::Graphon(&w), 1, 100).unwrap();
        assert_eq!(r.classification, Classification::Divergent);
        assert!(*r.partial_sums.last().unwrap() >= 100.0 / 3.0);
        assert!((r.lower_bound.unwrap() - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn linear_norm_growth_is_divergent() {
        // ‖W‖_{2n} = 2n, harmonic series
        for n in [50, 100, 200] {
            let m = MomentSequence::from_norms(2 * n, |r| r as f64).unwrap();
            let r = carleman_report(CarlemanSource::Moments(&m), 1, n).unwrap();
            assert_eq!(r.classification, Classification::Divergent);
        }
    }

    #[test]
    fn exponential_norm_growth_is_convergent() {
        // ‖W‖_{2n} = e^n; terms e^{−n}, sums stay below 1/(e−1)
        let bound = 1.0 / (core::f64::consts::E - 1.0);
        for n in [50, 100, 200] {
            let logs = (0..=2 * n).map(|r| r as f64 * (r as f64 / 2.0)).collect();
            let m = MomentSequence::from_log_moments(logs).unwrap();
            let r = carleman_report(CarlemanSource::Moments(&m), 1, n).unwrap();
            assert_eq!(r.classification, Classification::Convergent);
            let oracle: f64 = (1..=n).map(|i| (-(i as f64)).exp()).sum();
            assert!((r.partial_sums[n - 1] - oracle).abs() < 1e-14);
            assert!(r.partial_sums[n - 1] < bound);
        }
    }

    #[test]
    fn insufficient_moments_rejected() {
        let m = MomentSequence::from_moments(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            carleman_report(CarlemanSource::Moments(&m), 1, 2),
            Err(Error::InsufficientMoments { needed: 4, available: 2 })
        );
    }

    #[test]
    fn constant_sequence_is_divergent() {
        // a point mass at 2: ‖W‖_p = 2 for every p
        let m = MomentSequence::from_distribution(&[0.0, 0.0, 1.0], 400).unwrap();
        let r = carleman_report(CarlemanSource::Moments(&m), 2, 100).unwrap();
        assert_eq!(r.classification, Classification::Divergent);
        assert!((r.terms[10] - 0.25).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn graphon_partial_sums_bounded_below(w in random_graphon(4), k in 1u32..4, n in 2usize..60) {
            let r = carleman_report(CarlemanSource::Graphon(&w), k, n).unwrap();
            prop_assert_eq!(r.classification, Classification::Divergent);
            prop_assert!(r.partial_sums.windows(2).all(|p| p[0] <= p[1]));
            let bound = r.lower_bound.unwrap();
            prop_assert!(r.partial_sums[n - 1] >= bound * (1.0 - 1e-12));
        }
    }
}
