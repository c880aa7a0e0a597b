use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A test functional violates its invariants.
    InvalidFunctional {
        id: String,
        reason: &'static str,
    },
    /// A finite measure violates its invariants.
    InvalidMeasure(&'static str),
    /// A vector that must be a probability distribution is not one.
    NotADistribution(&'static str),
    /// Class masses do not sum to one.
    MassSum {
        sum: f64,
    },
    /// A class has zero or negative mass.
    NonPositiveMass {
        class: usize,
        mass: f64,
    },
    /// `blocks[i][j] != blocks[j][i]`.
    AsymmetricBlocks {
        i: usize,
        j: usize,
    },
    /// A decoration or requested id is not in the functional dictionary.
    DanglingFunctional {
        id: String,
    },
    DuplicateFunctional {
        id: String,
    },
    /// Block matrix shape does not match the number of classes.
    Shape(&'static str),
    InvalidGraph(&'static str),
    LabelAbsent(u32),
    MissingAnchor(u32),
    ClassOutOfRange {
        class: usize,
        classes: usize,
    },
    InvalidOrder(&'static str),
    InvalidPartition(&'static str),
    MismatchedLabels,
    InsufficientMoments {
        needed: usize,
        available: usize,
    },
    InvalidArgument(&'static str),
}

impl Error {
    /// Stable short code, used by the command-line front end in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidFunctional { .. } => "invalid-functional",
            Error::InvalidMeasure(_) => "invalid-measure",
            Error::NotADistribution(_) => "not-a-distribution",
            Error::MassSum { .. } => "mass-sum",
            Error::NonPositiveMass { .. } => "nonpositive-mass",
            Error::AsymmetricBlocks { .. } => "asymmetric-blocks",
            Error::DanglingFunctional { .. } => "dangling-functional",
            Error::DuplicateFunctional { .. } => "duplicate-functional",
            Error::Shape(_) => "shape",
            Error::InvalidGraph(_) => "invalid-graph",
            Error::LabelAbsent(_) => "label-absent",
            Error::MissingAnchor(_) => "missing-anchor",
            Error::ClassOutOfRange { .. } => "class-out-of-range",
            Error::InvalidOrder(_) => "invalid-order",
            Error::InvalidPartition(_) => "invalid-partition",
            Error::MismatchedLabels => "mismatched-labels",
            Error::InsufficientMoments { .. } => "insufficient-moments",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFunctional { id, reason } => {
                write!(f, "functional `{id}` is invalid: {reason}")
            }
            Error::InvalidMeasure(reason) => write!(f, "invalid measure: {reason}"),
            Error::NotADistribution(reason) => write!(f, "not a probability vector: {reason}"),
            Error::MassSum { sum } => write!(f, "class masses sum to {sum}, expected 1"),
            Error::NonPositiveMass { class, mass } => {
                write!(f, "class {class} has nonpositive mass {mass}")
            }
            Error::AsymmetricBlocks { i, j } => {
                write!(f, "block ({i},{j}) differs from block ({j},{i})")
            }
            Error::DanglingFunctional { id } => write!(f, "unknown functional id `{id}`"),
            Error::DuplicateFunctional { id } => write!(f, "functional id `{id}` defined twice"),
            Error::Shape(reason) => write!(f, "shape mismatch: {reason}"),
            Error::InvalidGraph(reason) => write!(f, "invalid graph: {reason}"),
            Error::LabelAbsent(l) => write!(f, "label {l} is not present"),
            Error::MissingAnchor(l) => write!(f, "no anchor given for label {l}"),
            Error::ClassOutOfRange { class, classes } => {
                write!(f, "class {class} out of range (graphon has {classes} classes)")
            }
            Error::InvalidOrder(reason) => write!(f, "invalid elimination order: {reason}"),
            Error::InvalidPartition(reason) => write!(f, "invalid partition: {reason}"),
            Error::MismatchedLabels => write!(f, "graphs must carry the same label set {{1..k}}"),
            Error::InsufficientMoments { needed, available } => {
                write!(f, "moments up to order {needed} required, only {available} supplied")
            }
            Error::InvalidArgument(reason) => write!(f, "invalid argument: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
