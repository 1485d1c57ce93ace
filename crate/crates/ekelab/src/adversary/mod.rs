//! The adversary's toolkit: offline guessing attacks with exact oracle-call
//! accounting, and active middle-man runs against the no-key protocols.

mod attacks;
mod mitm;
mod report;
mod space;

pub use attacks::{
    attack_dheke, attack_enc_nokey, attack_enhanced_eke, attack_simplified_eke, AttackOptions,
};
pub use mitm::{mitm_enc_nokey, mitm_nokey, MitmSessionIds};
pub use report::{AttackReport, EnhancedAttackOutcome, MitmReport, RecoveredCandidate};
pub use space::{coset_key_space, PasswordSpace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttackError {
    #[error("transcript does not match the attack: {0}")]
    TranscriptShape(String),
    #[error("no candidate in the key space reproduces the known session key")]
    KNotFound,
    #[error("the interceptor's exponent must be a unit mod q-1")]
    EveExponentNotInvertible,
    #[error("attack targets the wrong variant: {0}")]
    WrongVariant(String),
    #[error("honest session failed under interception: {0}")]
    SessionFailed(String),
}
