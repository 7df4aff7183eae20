//! Desk-scale laboratory for hashed quantum period finding.
//!
//! Everything here is exact and small: a dense statevector simulator,
//! closed-form amplitude tables for the Simon/Shor/Ekerå-Håstad circuit
//! families, the linear universal hash family with exhaustive enumeration,
//! and end-to-end key recovery against Even-Mansour built on a SiMeck
//! public permutation. Two independent engines (statevector and closed
//! form) compute every distribution, so each acts as an oracle for the
//! other.

pub mod closedform;
pub mod ekera;
pub mod evenmansour;
pub mod f2lin;
pub mod gfpm;
pub mod group;
pub mod hashing;
pub mod moscaekert;
pub mod offline;
pub mod qsim;
pub mod report;
pub mod shor;
pub mod simon;
pub mod verify;

pub use f2lin::{BitMatrix, BitVec};
pub use hashing::{FamilySpec, LinearHash, OutputMap};

/// Hard cap on total simulated qubits; keeps every statevector exact
/// and comfortably in memory.
pub const QUBIT_CAP: usize = 26;

/// Comparison tolerance for all exact (closed-form vs simulator) checks.
pub const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("nullspace is not one-dimensional: rank {rank} over width {width}")]
    NullspaceNotUnique { rank: usize, width: usize },
    #[error("enumeration guard exceeded: n*t = {actual} > {guard}")]
    EnumerationGuard { actual: usize, guard: usize },
    #[error("value {value} out of range for modulus {modulus}")]
    OutOfRange { value: u64, modulus: u64 },
    #[error("register guard exceeded: {0} qubits (cap {QUBIT_CAP})")]
    RegisterGuard(usize),
    #[error("wire {wire} out of range for width {width}")]
    WireOutOfRange { wire: usize, width: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("iteration cap of {0} exceeded")]
    IterationCap(u64),
    #[error("attack failed: {0}")]
    AttackFailed(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
