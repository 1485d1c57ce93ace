//! A laboratory for password-based key-exchange protocols.
//!
//! Six two-party protocols run as executable state machines over an
//! interceptable in-process channel, emitting transcripts an offline
//! adversary can attack with exact discrete-log-oracle cost accounting.
//! A companion calculator turns ion-trap gate-time bounds into operation
//! budgets and minimum password lengths for a physically bounded attacker.
//!
//! Everything is desk scale by design: moduli fit a machine word, the
//! discrete-log oracle is classical baby-step/giant-step, and password
//! spaces are small enough to enumerate. What the lab preserves exactly is
//! the *accounting*: how many oracle calls each candidate password costs.

pub mod adversary;
pub mod cipher;
pub mod group;
pub mod margin;
pub mod protocol;
pub mod scalar;

/// Word the protocol laboratory runs on. Group math itself is generic over
/// [`scalar::Word`]; everything protocol-level pins this alias.
pub type Scalar = u64;

/// Float the margin calculator defaults to.
pub type Real = f64;

pub type GroupParams = group::GroupParams<Scalar>;
pub type GroupElement = group::GroupElement<Scalar>;
pub type Exponent = group::Exponent<Scalar>;
