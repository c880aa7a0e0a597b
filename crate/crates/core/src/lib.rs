//! Generalized moments of measure-valued step graphons.
//!
//! A graphon here is a [`StepGraphon`]: a finite probability space of
//! classes whose pairwise values are finitely supported signed measures on
//! the nonnegative integers. Edges of a [`DecoratedMultigraph`] carry the id
//! of a [`TestFunctional`] that is paired against those measures, and the
//! homomorphism density integrates the product of the paired values over
//! independent vertex placements.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, threading and
//! the command-line front end live in the `zgraphon` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod carleman;
pub mod density;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod linalg;
pub mod measure;
pub mod moments;
pub mod numeric;
pub mod spectral;
pub mod transforms;

#[cfg(test)]
mod testing;

pub use carleman::{carleman_report, CarlemanReport, CarlemanSource, Classification};
pub use density::{
    density, density_dp, density_enumerate, marginal, mc_density, product_identity_residual, Anchoring, McEstimate,
};
pub use error::{Error, Result};
pub use graph::{DecoratedMultigraph, Edge, FStarFlag};
pub use graphon::{Kernel, StepGraphon};
pub use linalg::Matrix;
pub use measure::{moment, pair, tv_norm, FiniteMeasure, MomentSequence, MomentSource, TestFunctional};
pub use moments::{
    counterexample_report, matched_pair, rank1_density, rank1_graphon, CounterexampleReport, MatchedPair,
};
pub use spectral::{eigendecomp, lift_check, path_kernel, EigenSystem, LiftReport};
pub use transforms::{
    anchored_graphon, quotient, regularity_check, sample_anchors, twin_partition, twin_reduce, FeatureMap, Partition,
};

/// Id of the functional `1_{1}` used to embed real-valued graphons as `r·δ_1`.
pub const SCALAR_FUNCTIONAL_ID: &str = "scalar";
