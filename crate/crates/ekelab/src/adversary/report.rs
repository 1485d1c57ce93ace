//! Attack result types with exact oracle-call accounting.

use num_rational::Ratio;
use serde_json::json;

use crate::cipher::Password;
use crate::protocol::{SessionOutcome, Variant};
use crate::GroupElement;

/// A candidate that survived the attack's verification step, with the key it
/// implies.
#[derive(Debug, Clone)]
pub struct RecoveredCandidate {
    pub password: Password,
    pub key: GroupElement,
}

/// Outcome of a passive guessing attack. `dlog_calls` comes from merged
/// worker meters and is exact; `per_guess_dlogs` is the exact rational
/// `dlog_calls / guesses_tried`.
#[derive(Debug, Clone)]
pub struct AttackReport {
    pub variant: Variant,
    pub space_size: u64,
    pub guesses_tried: u64,
    pub dlog_calls: u64,
    pub recovered: Vec<RecoveredCandidate>,
    /// Candidates rejected before their full oracle budget was spent
    /// (extraction failed or produced a non-invertible exponent).
    pub early_rejections: u64,
    pub wall_seconds: f64,
}

impl AttackReport {
    pub fn per_guess_dlogs(&self) -> Ratio<u64> {
        Ratio::new(self.dlog_calls, self.guesses_tried.max(1))
    }

    pub fn recovered_passwords(&self) -> impl Iterator<Item = &Password> {
        self.recovered.iter().map(|r| &r.password)
    }

    /// The pinned serialization: exactly these fields.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "variant": self.variant.name(),
            "space_size": self.space_size,
            "guesses_tried": self.guesses_tried,
            "dlog_calls": self.dlog_calls,
            "per_guess_dlogs": self.per_guess_dlogs().to_string(),
            "recovered_count": self.recovered.len() as u64,
            "wall_seconds": self.wall_seconds,
        })
    }
}

/// The two-stage attack on the enhanced protocol reports its stages apart:
/// finding the exchange key spends no oracle calls at all, the password
/// stage spends one per candidate.
#[derive(Debug, Clone)]
pub struct EnhancedAttackOutcome {
    /// The exchange key recovered in stage 1.
    pub exchange_key: GroupElement,
    pub stage1_keys_tried: u64,
    pub stage1_dlog_calls: u64,
    /// Stage-2 password-guessing accounting in the standard form.
    pub report: AttackReport,
}

/// Result of an active middle-man run: two observed sessions, and whether
/// the interceptor walked away with the initiator's key.
#[derive(Debug)]
pub struct MitmReport {
    pub success: bool,
    pub stolen_key: Option<GroupElement>,
    pub sessions_observed: u32,
    pub failure_mode: Option<String>,
    pub initiator_outcome: SessionOutcome,
    pub responder_outcome: SessionOutcome,
}
