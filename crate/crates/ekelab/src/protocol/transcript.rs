//! Transcripts: the ordered, directed record of everything a session put on
//! the wire — exactly what a passive eavesdropper gets to work with.
//!
//! The persistent form is JSON Lines, one message per line:
//! `{"seq": int, "dir": "AB"|"BA", "tag": int, "payload_hex": string}`.
//! Session metadata (group, variant, session id) travels separately; it is
//! public context, not wire traffic.

use serde::{Deserialize, Serialize};

use crate::protocol::variant::{schedule, Direction, Variant};
use crate::protocol::wire::Message;
use crate::protocol::ProtocolError;
use crate::GroupParams;

/// Public context of a captured session.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TranscriptMeta {
    pub session_id: u64,
    pub variant: Variant,
    pub params: GroupParams,
    pub challenge_bytes: usize,
}

/// One persisted wire message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub seq: u64,
    pub dir: Direction,
    pub tag: u8,
    pub payload_hex: String,
}

/// Append-only capture of a session, in wire order.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub meta: TranscriptMeta,
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new(meta: TranscriptMeta) -> Self {
        Self {
            meta,
            messages: Vec::new(),
        }
    }

    pub fn push(&mut self, msg: Message) {
        self.messages.push(msg);
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// The message with the given type tag, if the capture holds exactly one.
    pub fn flow(&self, tag: u8) -> Option<&Message> {
        let mut found = None;
        for m in &self.messages {
            if m.tag == tag {
                if found.is_some() {
                    return None;
                }
                found = Some(m);
            }
        }
        found
    }

    pub fn records(&self) -> Vec<TranscriptRecord> {
        self.messages
            .iter()
            .enumerate()
            .map(|(seq, m)| TranscriptRecord {
                seq: seq as u64,
                dir: m.direction,
                tag: m.tag,
                payload_hex: hex::encode(&m.payload),
            })
            .collect()
    }

    /// Serializes to JSON Lines, one message per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in self.records() {
            out.push_str(&serde_json::to_string(&record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Parses a JSON Lines capture back under known session metadata.
    pub fn from_jsonl(meta: TranscriptMeta, data: &str) -> Result<Self, ProtocolError> {
        let mut messages = Vec::new();
        for (lineno, line) in data.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: TranscriptRecord = serde_json::from_str(line).map_err(|e| {
                ProtocolError::BadTranscript(format!("line {}: {e}", lineno + 1))
            })?;
            if record.seq != messages.len() as u64 {
                return Err(ProtocolError::BadTranscript(format!(
                    "line {}: sequence {} out of order",
                    lineno + 1,
                    record.seq
                )));
            }
            let payload = hex::decode(&record.payload_hex).map_err(|e| {
                ProtocolError::BadTranscript(format!("line {}: {e}", lineno + 1))
            })?;
            messages.push(Message::new(record.tag, record.dir, payload));
        }
        Ok(Self { meta, messages })
    }

    /// Checks the capture against the variant's schedule: complete, in order,
    /// with matching tags and directions.
    pub fn check_shape(&self) -> Result<(), ProtocolError> {
        let flows = schedule(self.meta.variant);
        if self.messages.len() != flows.len() {
            return Err(ProtocolError::BadTranscript(format!(
                "{} messages where the {} schedule has {}",
                self.messages.len(),
                self.meta.variant,
                flows.len()
            )));
        }
        for (m, spec) in self.messages.iter().zip(flows) {
            if m.tag != spec.tag || m.direction != spec.direction {
                return Err(ProtocolError::BadTranscript(format!(
                    "flow {} does not match the {} schedule",
                    m.tag, self.meta.variant
                )));
            }
        }
        Ok(())
    }

    /// True when any payload contains `needle` as a contiguous byte run.
    /// Used to assert that secrets never cross the wire in the clear.
    pub fn any_payload_contains(&self, needle: &[u8]) -> bool {
        !needle.is_empty()
            && self
                .messages
                .iter()
                .any(|m| m.payload.windows(needle.len()).any(|w| w == needle))
    }
}
