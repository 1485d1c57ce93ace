//! The six protocol variants and their flow schedules.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which protocol a session runs. The first-flow-encryption switch only
/// exists for the Diffie-Hellman EKE, so it lives inside that variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VariantRepr", into = "VariantRepr")]
pub enum Variant {
    SimplifiedEke,
    GenericEke,
    DhEke { encrypt_first_flow: bool },
    EnhancedEke,
    AEke,
    NoKey,
    EncNoKey,
}

#[derive(Serialize, Deserialize)]
struct VariantRepr {
    name: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    encrypt_first_flow: bool,
}

impl From<Variant> for VariantRepr {
    fn from(v: Variant) -> Self {
        VariantRepr {
            name: v.name().to_string(),
            encrypt_first_flow: matches!(
                v,
                Variant::DhEke {
                    encrypt_first_flow: true
                }
            ),
        }
    }
}

impl TryFrom<VariantRepr> for Variant {
    type Error = String;

    fn try_from(repr: VariantRepr) -> Result<Self, Self::Error> {
        Variant::parse(&repr.name, repr.encrypt_first_flow)
    }
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::SimplifiedEke => "simplified-eke",
            Variant::GenericEke => "generic-eke",
            Variant::DhEke { .. } => "dh-eke",
            Variant::EnhancedEke => "enhanced-eke",
            Variant::AEke => "a-eke",
            Variant::NoKey => "nokey",
            Variant::EncNoKey => "enc-nokey",
        }
    }

    /// Parses a variant name; the flag is only honored for `dh-eke`.
    pub fn parse(name: &str, encrypt_first_flow: bool) -> Result<Self, String> {
        match name {
            "simplified-eke" => Ok(Variant::SimplifiedEke),
            "generic-eke" => Ok(Variant::GenericEke),
            "dh-eke" => Ok(Variant::DhEke { encrypt_first_flow }),
            "enhanced-eke" => Ok(Variant::EnhancedEke),
            "a-eke" => Ok(Variant::AEke),
            "nokey" => Ok(Variant::NoKey),
            "enc-nokey" => Ok(Variant::EncNoKey),
            other => Err(format!("unknown protocol variant {other:?}")),
        }
    }

    /// Uses a password at all? (The plain no-key protocol does not.)
    pub fn uses_password(&self) -> bool {
        !matches!(self, Variant::NoKey)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Who sends a given flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "AB")]
    AToB,
    #[serde(rename = "BA")]
    BToA,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::AToB => Direction::BToA,
            Direction::BToA => Direction::AToB,
        }
    }
}

/// One position in a variant's wire schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowSpec {
    pub tag: u8,
    pub direction: Direction,
    pub label: &'static str,
}

const fn flow(tag: u8, direction: Direction, label: &'static str) -> FlowSpec {
    FlowSpec {
        tag,
        direction,
        label,
    }
}

use Direction::{AToB, BToA};

const SIMPLIFIED_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "id, password-encrypted share"),
    flow(2, BToA, "id, password-encrypted share"),
];

const GENERIC_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "id, password-encrypted public key"),
    flow(2, BToA, "doubly encrypted session key"),
    flow(3, AToB, "challenge under session key"),
    flow(4, BToA, "challenge echo + counter-challenge"),
    flow(5, AToB, "counter-challenge echo"),
];

const DH_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "id, DH share (optionally password-encrypted)"),
    flow(2, BToA, "password-encrypted DH share + challenge"),
    flow(3, AToB, "challenge pair under session key"),
    flow(4, BToA, "challenge echo"),
];

const ENHANCED_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "id, plain DH share"),
    flow(2, BToA, "password-encrypted DH share + challenge and key share"),
    flow(3, AToB, "challenge pair and key share"),
    flow(4, BToA, "challenge echo"),
];

const AEKE_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "id, hash-encrypted DH share"),
    flow(2, BToA, "hash-encrypted DH share"),
    flow(3, AToB, "password-keyed signature of the key"),
];

const NOKEY_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "K^a"),
    flow(2, BToA, "K^(ab)"),
    flow(3, AToB, "K^b"),
];

const ENC_NOKEY_FLOWS: &[FlowSpec] = &[
    flow(1, AToB, "password-encrypted K^a"),
    flow(2, BToA, "password-encrypted K^(ab)"),
    flow(3, AToB, "password-encrypted K^b"),
];

/// The exact flow sequence of a variant, in wire order.
pub fn schedule(variant: Variant) -> &'static [FlowSpec] {
    match variant {
        Variant::SimplifiedEke => SIMPLIFIED_FLOWS,
        Variant::GenericEke => GENERIC_FLOWS,
        Variant::DhEke { .. } => DH_FLOWS,
        Variant::EnhancedEke => ENHANCED_FLOWS,
        Variant::AEke => AEKE_FLOWS,
        Variant::NoKey => NOKEY_FLOWS,
        Variant::EncNoKey => ENC_NOKEY_FLOWS,
    }
}

/// Encryption-schedule slot of the `component`-th password-encrypted element
/// in the flow with tag `tag`. Unique per element across a session; both
/// parties (and the eavesdropper) derive the same slot from public structure.
pub fn elem_slot(variant: Variant, tag: u8, component: u8) -> u8 {
    match variant {
        // flow 2 carries the asymmetric ciphertext pair in slots 2 and 3
        Variant::GenericEke if tag == 2 => 2 + component,
        _ => {
            debug_assert_eq!(component, 0);
            tag
        }
    }
}
