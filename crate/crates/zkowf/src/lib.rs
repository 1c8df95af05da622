//! A desk-scale laboratory for turning interactive proofs with weak
//! zero-knowledge guarantees into one-way-function candidates.
//!
//! The crate is organised bottom-up:
//!
//! * [`dist`] — exact finite probability: rational masses, total-variation
//!   distance, push-forwards, a deterministic counter-based PRNG with
//!   hierarchical stream derivation, and empirical-mean estimates with
//!   Hoeffding tail bounds.
//! * [`protocol`] — non-interactive (CRS-based) and public-coin interactive
//!   proof systems as explicit finite objects, plus exact measurement of
//!   their completeness, soundness and zero-knowledge errors.
//! * [`zoo`] — concrete protocol families: a "dial" family whose three
//!   errors can be set to arbitrary dyadic values, and a graph-isomorphism
//!   sigma protocol.
//! * [`candidates`] — the one-way-function candidates built from a protocol
//!   simulator and verifier, together with the hybrid distributions used to
//!   analyse them.
//! * [`inverters`] — preimage oracles (canonical, distributional, noisy,
//!   conditional) and measurement of their quality.
//! * [`reductions`] — the algorithms that turn an inverter for a candidate
//!   back into a convincing prover, and one-sided deciders built on top.
//! * [`harness`] — experiment configs, bound checking, reports, and the
//!   plumbing behind the `zkowf` command-line tool.
//!
//! Everything that claims to be exact is computed with arbitrary-precision
//! rationals; floating point only ever appears in Monte-Carlo summaries that
//! carry an explicit confidence radius.

pub mod candidates;
pub mod dist;
pub mod harness;
pub mod inverters;
pub mod protocol;
pub mod reductions;
pub mod zoo;

use thiserror::Error;

/// Hard ceiling on the number of atoms any exact enumeration may touch.
///
/// Operations that would need to enumerate more than this many coin
/// assignments or support points refuse with [`Error::Budget`] instead of
/// silently degrading to sampling.
pub const ENUM_BUDGET: u128 = 1 << 24;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Two distributions were combined that do not live over the same
    /// outcome encoding.
    #[error("encoding mismatch: `{left}` vs `{right}`")]
    EncodingMismatch { left: String, right: String },
    /// A set of masses does not form a probability distribution.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    /// An exact enumeration would exceed [`ENUM_BUDGET`].
    #[error("enumeration budget exceeded: need {required} atoms, cap {cap}")]
    Budget { required: u128, cap: u128 },
    /// A transcript or message violates the declared protocol schedule.
    #[error("schedule violation: {0}")]
    Schedule(String),
    /// A value falls outside its declared range (probability outside [0,1],
    /// bit-string value too wide, coin outside its component, ...).
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// A caller-supplied procedure broke its contract (e.g. a sampler
    /// returned a value outside [0,1]).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Textual input (config file, graph file, rational literal) failed to
    /// parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// The requested operation is not defined for the given object.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
