//! Error type shared across the crate's modules.

use thiserror::Error;

/// Errors raised by simulation, kernel, training, and metric computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Requested qubit count exceeds what the dense simulator supports.
    #[error("{requested} qubits exceeds the simulator capacity of {max}")]
    Capacity { requested: usize, max: usize },

    /// A gate or readout addressed a wire outside the register.
    #[error("wire {wire} out of range for {n_qubits} qubits")]
    WireOutOfRange { wire: usize, n_qubits: usize },

    /// A two-qubit gate was given the same wire twice.
    #[error("two-qubit gate wires must be distinct (both were {0})")]
    DuplicateWires(usize),

    /// Two states or a state and a circuit disagree on qubit count.
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A value fell outside its documented range.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// An input collection that must be non-empty was empty.
    #[error("empty {0}")]
    Empty(&'static str),

    /// Training labels must be -1 or +1.
    #[error("label {0} is not -1 or +1")]
    InvalidLabel(f64),

    /// SVM training requires both classes to be present.
    #[error("training labels contain a single class")]
    SingleClass,

    /// A precomputed kernel matrix must be square and match the label count.
    #[error("precomputed kernel matrix has {len} entries, expected {n}x{n}")]
    BadGramShape { len: usize, n: usize },

    /// The kernel kind is not usable in this position (e.g. PRECOMPUTED
    /// passed where a computable kernel is required).
    #[error("kernel kind not usable here: {0}")]
    BadKernelKind(&'static str),

    /// A class index was outside the classifier's output width.
    #[error("class index {label} out of range for {n_classes} classes")]
    ClassOutOfRange { label: usize, n_classes: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
