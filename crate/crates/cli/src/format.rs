//! JSON documents for graphons, graphs, partitions and moment data.
//!
//! A graphon document lists class masses, the block matrix as rows of
//! `{support, weights}` measures and the functional dictionary. Rows may hold
//! either the upper triangle (row `i` has `q − i` entries) or the full matrix;
//! the missing half is completed by symmetry. Serialization always writes the
//! upper triangle.

use std::path::Path;

use serde::{Deserialize, Serialize};
use zgraphon_core::{DecoratedMultigraph, Edge, FiniteMeasure, MomentSequence, Partition, StepGraphon, TestFunctional};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub support: Vec<u64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    pub id: String,
    pub support: Vec<u64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphonDoc {
    pub masses: Vec<f64>,
    pub blocks: Vec<Vec<MeasureDoc>>,
    pub functionals: Vec<FunctionalDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelDoc {
    pub vertex: usize,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: usize,
    pub v: usize,
    pub psi: String,
    #[serde(default = "one")]
    pub mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: usize,
    #[serde(default)]
    pub labels: Vec<LabelDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub class_of: Vec<usize>,
}

/// Exactly one of the three fields must be present.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_moments: Option<Vec<f64>>,
}

fn measure(doc: &MeasureDoc) -> Result<FiniteMeasure, CliError> {
    Ok(FiniteMeasure::new(doc.support.clone(), doc.weights.clone())?)
}

fn measure_doc(m: &FiniteMeasure) -> MeasureDoc {
    MeasureDoc { support: m.support().to_vec(), weights: m.weights().to_vec() }
}

impl GraphonDoc {
    pub fn to_graphon(&self) -> Result<StepGraphon, CliError> {
        let functionals = self
            .functionals
            .iter()
            .map(|f| TestFunctional::new(f.id.clone(), f.support.clone(), f.values.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = self
            .blocks
            .iter()
            .map(|row| row.iter().map(measure).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let q = self.masses.len();
        let full = rows.len() == q && rows.iter().all(|r| r.len() == q);
        let w = if full && q > 1 {
            StepGraphon::new(self.masses.clone(), rows, functionals)?
        } else {
            StepGraphon::from_upper(self.masses.clone(), rows, functionals)?
        };
        Ok(w)
    }

    pub fn from_graphon(w: &StepGraphon) -> Self {
        let q = w.num_classes();
        GraphonDoc {
            masses: w.masses().to_vec(),
            blocks: (0..q).map(|i| (i..q).map(|j| measure_doc(w.block(i, j))).collect()).collect(),
            functionals: w
                .functionals()
                .map(|f| FunctionalDoc {
                    id: f.id().to_string(),
                    support: f.support().to_vec(),
                    values: f.values().to_vec(),
                })
                .collect(),
        }
    }
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<DecoratedMultigraph, CliError> {
        let mut labels = vec![None; self.vertices];
        for l in &self.labels {
            let slot = labels
                .get_mut(l.vertex)
                .ok_or_else(|| CliError::Schema(format!("labels: vertex {} out of range", l.vertex)))?;
            if slot.is_some() {
                return Err(CliError::Schema(format!("labels: vertex {} labeled twice", l.vertex)));
            }
            *slot = Some(l.label);
        }
        let edges = self.edges.iter().map(|e| Edge::new(e.u, e.v, e.psi.clone(), e.mult)).collect();
        Ok(DecoratedMultigraph::new(self.vertices, edges, labels)?)
    }

    pub fn from_graph(g: &DecoratedMultigraph) -> Self {
        GraphDoc {
            vertices: g.n_vertices(),
            labels: g
                .labels()
                .iter()
                .enumerate()
                .filter_map(|(vertex, l)| l.map(|label| LabelDoc { vertex, label }))
                .collect(),
            edges: g.edges().iter().map(|e| EdgeDoc { u: e.u, v: e.v, psi: e.psi.clone(), mult: e.mult }).collect(),
        }
    }
}

impl PartitionDoc {
    pub fn to_partition(&self) -> Result<Partition, CliError> {
        Ok(Partition::new(self.class_of.clone())?)
    }

    pub fn from_partition(p: &Partition) -> Self {
        PartitionDoc { class_of: p.class_of().to_vec() }
    }
}

impl MomentsDoc {
    /// `max_order` is the highest moment needed; ignored for explicit sequences.
    pub fn to_sequence(&self, max_order: usize) -> Result<MomentSequence, CliError> {
        match (&self.distribution, &self.moments, &self.log_moments) {
            (Some(p), None, None) => Ok(MomentSequence::from_distribution(p, max_order)?),
            (None, Some(m), None) => Ok(MomentSequence::from_moments(m)?),
            (None, None, Some(l)) => Ok(MomentSequence::from_log_moments(l.clone())?),
            _ => Err(CliError::Schema(
                "moment document needs exactly one of `distribution`, `moments`, `log_moments`".into(),
            )),
        }
    }
}

pub fn parse_graphon(text: &str) -> Result<StepGraphon, CliError> {
    from_json::<GraphonDoc>(text)?.to_graphon()
}

pub fn parse_graph(text: &str) -> Result<DecoratedMultigraph, CliError> {
    from_json::<GraphDoc>(text)?.to_graph()
}

pub fn parse_partition(text: &str) -> Result<Partition, CliError> {
    from_json::<PartitionDoc>(text)?.to_partition()
}

pub fn serialize_graphon(w: &StepGraphon) -> String {
    to_json(&GraphonDoc::from_graphon(w))
}

pub fn serialize_graph(g: &DecoratedMultigraph) -> String {
    to_json(&GraphDoc::from_graph(g))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, CliError>) -> Result<T, CliError> {
    let text = read_file(path)?;
    parse(&text).map_err(|e| e.in_file(path))
}

/// Rounds to 12 significant digits for structured output.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Scalar output: fixed notation with 12 digits after the point.
pub fn scalar(x: f64) -> String {
    format!("{x:.12}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(52.083_333_333_333_336), 52.0833333333);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(scalar(2.0), "2.000000000000");
    }

    #[test]
    fn labels_out_of_range() {
        let doc = GraphDoc { vertices: 1, labels: vec![LabelDoc { vertex: 3, label: 1 }], edges: vec![] };
        assert!(matches!(doc.to_graph(), Err(CliError::Schema(_))));
    }
}
