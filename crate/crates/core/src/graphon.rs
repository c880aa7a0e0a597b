//! Step graphons with measure-valued blocks.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::DecoratedMultigraph;
use crate::linalg::Matrix;
use crate::measure::{pair, FiniteMeasure, TestFunctional};
use crate::numeric::{self, compensated_sum};

/// Tolerance on `Σ π_i = 1`.
pub const MASS_TOL: f64 = 1e-12;

/// A graphon constant on the blocks of a finite partition.
///
/// Class `i` has mass `π_i > 0`; the value on block `(i, j)` is a finitely
/// supported measure, stored for both orders so that `block(i, j)` and
/// `block(j, i)` are the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    masses: Vec<f64>,
    blocks: Vec<FiniteMeasure>,
    functionals: BTreeMap<String, TestFunctional>,
}

impl StepGraphon {
    /// Builds and validates a graphon from a full `q × q` block matrix.
    pub fn new(masses: Vec<f64>, blocks: Vec<Vec<FiniteMeasure>>, functionals: Vec<TestFunctional>) -> Result<Self> {
        let q = masses.len();
        if blocks.len() != q || blocks.iter().any(|row| row.len() != q) {
            return Err(Error::Shape("blocks must be a q×q matrix"));
        }
        let functionals = dictionary(functionals)?;
        let w = Self { masses, blocks: blocks.into_iter().flatten().collect(), functionals };
        w.validate()?;
        Ok(w)
    }

    /// Builds a graphon from the upper triangle: row `i` holds blocks `(i, i..q)`.
    pub fn from_upper(
        masses: Vec<f64>,
        upper: Vec<Vec<FiniteMeasure>>,
        functionals: Vec<TestFunctional>,
    ) -> Result<Self> {
        let q = masses.len();
        if upper.len() != q || upper.iter().enumerate().any(|(i, row)| row.len() != q - i) {
            return Err(Error::Shape("upper triangle row i must hold q−i blocks"));
        }
        let mut blocks = alloc::vec![FiniteMeasure::zero(); q * q];
        for (i, row) in upper.into_iter().enumerate() {
            for (offset, b) in row.into_iter().enumerate() {
                let j = i + offset;
                blocks[j * q + i] = b.clone();
                blocks[i * q + j] = b;
            }
        }
        let w = Self { masses, blocks, functionals: dictionary(functionals)? };
        w.validate()?;
        Ok(w)
    }

    /// A real-valued graphon: block `(i, j)` is `values[i][j]·δ_1`, paired by `1_{1}`.
    pub fn real(masses: Vec<f64>, values: &Matrix) -> Result<Self> {
        let q = masses.len();
        if values.rows() != q || values.cols() != q {
            return Err(Error::Shape("value matrix must be q×q"));
        }
        let blocks = (0..q).map(|i| (0..q).map(|j| FiniteMeasure::scalar(values[(i, j)])).collect()).collect();
        Self::new(masses, blocks, alloc::vec![TestFunctional::indicator(crate::SCALAR_FUNCTIONAL_ID, 1)])
    }

    /// Unvalidated assembly for transforms that preserve the invariants.
    pub(crate) fn from_parts(
        masses: Vec<f64>,
        blocks: Vec<FiniteMeasure>,
        functionals: BTreeMap<String, TestFunctional>,
    ) -> Self {
        debug_assert_eq!(blocks.len(), masses.len() * masses.len());
        Self { masses, blocks, functionals }
    }

    /// Checks every graphon invariant: masses positive and summing to one,
    /// symmetric blocks, and a dictionary keyed by functional id.
    pub fn validate(&self) -> Result<()> {
        let q = self.masses.len();
        if q == 0 {
            return Err(Error::Shape("graphon needs at least one class"));
        }
        if self.blocks.len() != q * q {
            return Err(Error::Shape("blocks must be a q×q matrix"));
        }
        for (class, &mass) in self.masses.iter().enumerate() {
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::NonPositiveMass { class, mass });
            }
        }
        let sum = compensated_sum(self.masses.iter().copied());
        if numeric::abs(sum - 1.0) > MASS_TOL {
            return Err(Error::MassSum { sum });
        }
        for i in 0..q {
            for j in 0..i {
                if self.blocks[i * q + j] != self.blocks[j * q + i] {
                    return Err(Error::AsymmetricBlocks { i: j, j: i });
                }
            }
        }
        for (key, f) in &self.functionals {
            if key != f.id() {
                return Err(Error::DanglingFunctional { id: key.clone() });
            }
        }
        Ok(())
    }

    /// Checks that every decoration of `graph` resolves in the dictionary.
    pub fn check_decorations(&self, graph: &DecoratedMultigraph) -> Result<()> {
        for e in graph.edges() {
            self.functional(&e.psi)?;
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn block(&self, i: usize, j: usize) -> &FiniteMeasure {
        &self.blocks[i * self.masses.len() + j]
    }

    pub fn functionals(&self) -> impl Iterator<Item = &TestFunctional> {
        self.functionals.values()
    }

    pub fn functional_ids(&self) -> Vec<String> {
        self.functionals.keys().cloned().collect()
    }

    pub(crate) fn dictionary(&self) -> &BTreeMap<String, TestFunctional> {
        &self.functionals
    }

    pub fn functional(&self, id: &str) -> Result<&TestFunctional> {
        self.functionals.get(id).ok_or_else(|| Error::DanglingFunctional { id: id.to_string() })
    }

    /// `^ψW` as a `q × q` matrix for the dictionary functional `psi_id`.
    pub fn kernel(&self, psi_id: &str) -> Result<Kernel> {
        let psi = self.functional(psi_id)?;
        Ok(self.kernel_of(psi))
    }

    /// `^ψW` for an arbitrary functional, in or out of the dictionary.
    pub fn kernel_of(&self, psi: &TestFunctional) -> Kernel {
        let q = self.num_classes();
        let mut matrix = Matrix::zeros(q, q);
        for i in 0..q {
            for j in i..q {
                let v = pair(psi, self.block(i, j));
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        Kernel { psi_id: psi.id().to_string(), matrix }
    }

    /// `(Σ π_i π_j ‖W_ij‖^p)^{1/p}` with the total-variation norm on blocks.
    ///
    /// Evaluated relative to the largest block norm so that large `p` does not overflow.
    pub fn p_norm(&self, p: f64) -> Result<f64> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidArgument("p must be a finite real ≥ 1"));
        }
        let top = self.sup_norm();
        if top == 0.0 {
            return Ok(0.0);
        }
        let q = self.num_classes();
        let mean = compensated_sum((0..q).flat_map(|i| {
            (0..q).map(move |j| {
                let r = self.block(i, j).tv_norm() / top;
                self.masses[i] * self.masses[j] * libm::pow(r, p)
            })
        }));
        Ok(top * libm::pow(mean, 1.0 / p))
    }

    /// `max_ij ‖W_ij‖`; bounds every `p_norm`.
    pub fn sup_norm(&self) -> f64 {
        self.blocks.iter().map(FiniteMeasure::tv_norm).fold(0.0, f64::max)
    }
}

fn dictionary(functionals: Vec<TestFunctional>) -> Result<BTreeMap<String, TestFunctional>> {
    let mut map = BTreeMap::new();
    for f in functionals {
        let id = f.id().to_string();
        if map.insert(id.clone(), f).is_some() {
            return Err(Error::DuplicateFunctional { id });
        }
    }
    Ok(map)
}

/// The real kernel `^ψW(i, j) = ⟨ψ, W_ij⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub psi_id: String,
    pub matrix: Matrix,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use alloc::vec;

    /// Masses (½, ½), blocks (1, 2; 2, 3)·δ_1.
    pub fn w2() -> StepGraphon {
        StepGraphon::real(vec![0.5, 0.5], &Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]])).unwrap()
    }
}
