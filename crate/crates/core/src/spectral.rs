//! Spectra of kernel operators and the parallel-edge lifting check.
//!
//! On a step graphon the integral operator of `^ψW` on `L²(π)` is similar to
//! `M = Π^{1/2} K Π^{1/2}`. With `M = B Λ Bᵀ`, the functions
//! `ζ_n(i) = B[i][n] / √π_i` are orthonormal in `L²(π)` and
//! `K(i, j) = Σ_n λ_n ζ_n(i) ζ_n(j)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::density::{density, marginal, Anchoring};
use crate::error::{Error, Result};
use crate::graph::DecoratedMultigraph;
use crate::graphon::{Kernel, StepGraphon};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::numeric::{self, compensated_sum};

/// Eigenvalues with magnitude below this count as zero when grouping.
pub const ZERO_EIGENVALUE: f64 = 1e-12;
/// Eigenvalues of two graphons closer than this are matched.
pub const EIGENVALUE_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub psi_id: String,
    /// Descending by absolute value.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns, eigenvectors of `M = Π^{1/2} K Π^{1/2}`.
    pub basis: Matrix,
    /// `M` itself.
    pub operator: Matrix,
    sqrt_masses: Vec<f64>,
}

impl EigenSystem {
    /// `ζ_n` as its values on the classes.
    pub fn eigenfunction(&self, n: usize) -> Vec<f64> {
        (0..self.sqrt_masses.len()).map(|i| self.basis[(i, n)] / self.sqrt_masses[i]).collect()
    }

    /// `‖M − B Λ Bᵀ‖_max`.
    pub fn reconstruction_residual(&self) -> f64 {
        let rebuilt = self.basis.mul_diag(&self.eigenvalues, &self.basis.transpose());
        rebuilt.max_abs_diff(&self.operator)
    }
}

pub fn eigendecomp(w: &StepGraphon, psi_id: &str) -> Result<EigenSystem> {
    let kernel = w.kernel(psi_id)?;
    Ok(eigendecomp_kernel(&kernel, w.masses()))
}

pub fn eigendecomp_kernel(kernel: &Kernel, masses: &[f64]) -> EigenSystem {
    let s: Vec<f64> = masses.iter().map(|&m| numeric::sqrt(m)).collect();
    let operator = kernel.matrix.scale_rows_cols(&s, &s);
    let eig = symmetric_eigen(&operator);
    EigenSystem { psi_id: kernel.psi_id.clone(), eigenvalues: eig.values, basis: eig.vectors, operator, sqrt_masses: s }
}

/// `t_ij` of the `k`-edge `ψ` path with ends pinned to classes `i` and `j`:
/// `K (diag(π) K)^{k−1}`.
pub fn path_kernel(w: &StepGraphon, psi_id: &str, k: usize) -> Result<Matrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("path must have at least one edge"));
    }
    let kern = w.kernel(psi_id)?.matrix;
    let mut acc = kern.clone();
    for _ in 1..k {
        acc = acc.mul_diag(w.masses(), &kern);
    }
    Ok(acc)
}

/// `t_ij` of the same path from the spectrum: `Π^{−1/2} B Λ^k Bᵀ Π^{−1/2}`.
pub fn path_kernel_spectral(sys: &EigenSystem, k: usize) -> Matrix {
    let lk: Vec<f64> = sys.eigenvalues.iter().map(|&l| numeric::powi(l, k as u32)).collect();
    let inv: Vec<f64> = sys.sqrt_masses.iter().map(|s| 1.0 / s).collect();
    sys.basis.mul_diag(&lk, &sys.basis.transpose()).scale_rows_cols(&inv, &inv)
}

/// One graphon's side of a lift check.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftSide {
    pub eigenvalues: Vec<f64>,
    /// `a_n = ∫ ζ_n(x) ζ_n(y) t_xy(F′) dπ dπ`.
    pub coefficients: Vec<f64>,
    /// `t(F^k)` for `k = 1..=kmax` from the density engine.
    pub direct: Vec<f64>,
    /// `Σ_n λ_n^k a_n` for `k = 1..=kmax`.
    pub spectral: Vec<f64>,
    pub max_discrepancy: f64,
}

/// Eigenvalue group shared by both spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedCoefficient {
    pub eigenvalue: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    pub first: LiftSide,
    pub second: LiftSide,
    /// Largest direct-vs-spectral gap over both graphons.
    pub max_discrepancy: f64,
    /// `t(F^k, W1) = t(F^k, W2)` for every `2 ≤ k ≤ kmax`.
    pub lifted_densities_match: bool,
    pub groups: Vec<GroupedCoefficient>,
    /// Per nonzero eigenvalue, `Σ_{λ=c} a = Σ_{μ=c} b`.
    pub grouped_coefficients_agree: bool,
    /// `t(F, W1) = t(F, W2)`.
    pub densities_agree: bool,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    numeric::abs(a - b) <= tol * (1.0 + numeric::abs(a).max(numeric::abs(b)))
}

fn lift_side(
    reduced: &DecoratedMultigraph,
    u: usize,
    v: usize,
    psi_id: &str,
    w: &StepGraphon,
    kmax: usize,
) -> Result<LiftSide> {
    let sys = eigendecomp(w, psi_id)?;
    let q = w.num_classes();
    let pinned = reduced.strip_labels().relabel(u, 1)?.relabel(v, 2)?;
    let mut t = Matrix::zeros(q, q);
    let mut beta = Anchoring::new();
    for i in 0..q {
        for j in 0..q {
            beta.insert(1, i);
            beta.insert(2, j);
            t[(i, j)] = marginal(&pinned, w, &beta)?;
        }
    }
    let coefficients: Vec<f64> = (0..q)
        .map(|n| {
            let zeta = sys.eigenfunction(n);
            compensated_sum((0..q).flat_map(|i| {
                let (zeta, t) = (&zeta, &t);
                (0..q).map(move |j| w.masses()[i] * w.masses()[j] * zeta[i] * zeta[j] * t[(i, j)])
            }))
        })
        .collect();
    let mut direct = Vec::with_capacity(kmax);
    let mut spectral = Vec::with_capacity(kmax);
    let mut max_discrepancy: f64 = 0.0;
    for k in 1..=kmax {
        let d = density(&reduced.add_path(u, v, k, psi_id)?, w)?;
        let s =
            compensated_sum(sys.eigenvalues.iter().zip(&coefficients).map(|(&l, &a)| numeric::powi(l, k as u32) * a));
        max_discrepancy = max_discrepancy.max(numeric::abs(d - s));
        direct.push(d);
        spectral.push(s);
    }
    Ok(LiftSide { eigenvalues: sys.eigenvalues, coefficients, direct, spectral, max_discrepancy })
}

/// Nonzero eigenvalues clustered within [`EIGENVALUE_MATCH`], with summed coefficients.
fn groups(side: &LiftSide) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = side
        .eigenvalues
        .iter()
        .zip(&side.coefficients)
        .filter(|(l, _)| numeric::abs(**l) >= ZERO_EIGENVALUE)
        .map(|(&l, &a)| (l, a))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (l, a) in pairs {
        match out.last_mut() {
            Some(last) if numeric::abs(l - last.0) <= EIGENVALUE_MATCH => last.1 += a,
            _ => out.push((l, a)),
        }
    }
    out
}

/// Checks the parallel-edge lifting argument on a designated `psi` edge `u–v` of `graph`.
///
/// `F′` drops one `psi` edge between `u` and `v`, and `F^k` adds back a
/// `psi` path of length `k`, so `F^1 = F`. For each graphon `t(F^k)` is
/// computed both by the density engine and by the spectral sum; the report
/// then compares the two graphons. `tol` is relative.
#[allow(clippy::too_many_arguments)]
pub fn lift_check(
    graph: &DecoratedMultigraph,
    u: usize,
    v: usize,
    psi_id: &str,
    first: &StepGraphon,
    second: &StepGraphon,
    kmax: usize,
    tol: f64,
) -> Result<LiftReport> {
    if kmax < 2 {
        return Err(Error::InvalidArgument("kmax must be at least 2"));
    }
    let reduced = graph.remove_edge(u, v, psi_id)?;
    let a = lift_side(&reduced, u, v, psi_id, first, kmax)?;
    let b = lift_side(&reduced, u, v, psi_id, second, kmax)?;
    let lifted_densities_match = (1..kmax).all(|i| close(a.direct[i], b.direct[i], tol));
    let ga = groups(&a);
    let gb = groups(&b);
    let mut merged: Vec<GroupedCoefficient> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < ga.len() || j < gb.len() {
        let take_both = i < ga.len() && j < gb.len() && numeric::abs(ga[i].0 - gb[j].0) <= EIGENVALUE_MATCH;
        if take_both {
            merged.push(GroupedCoefficient { eigenvalue: ga[i].0, first: ga[i].1, second: gb[j].1 });
            i += 1;
            j += 1;
        } else if j >= gb.len() || (i < ga.len() && ga[i].0 < gb[j].0) {
            merged.push(GroupedCoefficient { eigenvalue: ga[i].0, first: ga[i].1, second: 0.0 });
            i += 1;
        } else {
            merged.push(GroupedCoefficient { eigenvalue: gb[j].0, first: 0.0, second: gb[j].1 });
            j += 1;
        }
    }
    let grouped_coefficients_agree = merged.iter().all(|g| close(g.first, g.second, tol));
    let densities_agree = close(a.direct[0], b.direct[0], tol);
    Ok(LiftReport {
        max_discrepancy: a.max_discrepancy.max(b.max_discrepancy),
        first: a,
        second: b,
        lifted_densities_match,
        groups: merged,
        grouped_coefficients_agree,
        densities_agree,
    })
}

/// `Σ_ij π_i π_j K[i,j]²`, equal to `Σ_n λ_n²`.
pub fn hilbert_schmidt_norm_sq(w: &StepGraphon, psi_id: &str) -> Result<f64> {
    let k = w.kernel(psi_id)?.matrix;
    let q = w.num_classes();
    Ok(compensated_sum((0..q).flat_map(|i| {
        let k = &k;
        (0..q).map(move |j| w.masses()[i] * w.masses()[j] * k[(i, j)] * k[(i, j)])
    })))
}
