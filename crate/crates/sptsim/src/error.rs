//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors surfaced by engine, circuit and harness operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("classical bit {index} out of range for {n_bits} bits")]
    ClassicalBitOutOfRange { index: usize, n_bits: usize },

    #[error("gate targets must be distinct, got {0} twice")]
    RepeatedTarget(usize),

    #[error("register of {requested} qubits exceeds the engine maximum of {max}")]
    QubitLimitExceeded { requested: usize, max: usize },

    #[error("pauli string has phase {phase}, a hermitian generator needs phase +1 or -1")]
    NonHermitianPhase { phase: String },

    #[error("pauli strings act on {left} and {right} sites, expected equal lengths")]
    PauliLengthMismatch { left: usize, right: usize },

    #[error("cannot parse pauli string {0:?}")]
    PauliParse(String),

    #[error("state has zero norm, nothing to measure or renormalize")]
    ZeroNorm,

    #[error("operator is not hermitian within tolerance, witness {witness}")]
    NonHermitian { witness: f64 },

    #[error("kraus operators do not sum to the identity within tolerance, witness {witness}")]
    ChannelNotTracePreserving { witness: f64 },

    #[error("channel acts on {channel} qubits but {targets} targets were given")]
    ChannelArityMismatch { channel: usize, targets: usize },

    #[error("keep set is empty or repeats sites")]
    InvalidKeepSet,

    #[error("matrix dimension {got} does not match expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("chain length {0} must be even for sublattice parities on a ring")]
    PeriodicOddLength(usize),

    #[error("chain length must be at least 2, got {0}")]
    ChainTooShort(usize),

    #[error("subsystem size {l_a} out of range 1..={l}")]
    InvalidSubsystem { l_a: usize, l: usize },

    #[error("group table is not a valid abelian group: {0}")]
    InvalidGroup(String),

    #[error("character table mismatch: {0}")]
    CharacterMismatch(String),

    #[error("symmetry action is not a representation: {0}")]
    InvalidAction(String),

    #[error("symmetry actions must commute with each other, elements {0} and {1} do not")]
    NonCommutingActions(usize, usize),

    #[error("sector index {sector} out of range for group of order {order}")]
    SectorOutOfRange { sector: usize, order: usize },

    #[error("subsystem of {0} sites is too large to densify (limit 8)")]
    DensifyTooLarge(usize),

    #[error("renyi index must be at least 1, got {0}")]
    InvalidRenyiIndex(u32),

    #[error("shot record width {width} cannot serve subsystem size {l_a}")]
    RecordWidthMismatch { width: usize, l_a: usize },

    #[error("shot records disagree in shot count or width")]
    InconsistentRecords,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("readout bias must satisfy 0 <= eps < 0.5, got {0}")]
    InvalidBias(f64),

    #[error("classical condition reads bit {bit} before any measurement writes it")]
    ConditionBeforeMeasure { bit: usize },

    #[error("circuit parse error at line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("the subsystem symmetry does not commute with the clean state, witness {witness}")]
    ContextNotSymmetric { witness: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
