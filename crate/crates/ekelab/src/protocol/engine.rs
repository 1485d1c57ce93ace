//! Two-party session engine: each party is a message-driven state machine,
//! and a driver shuttles framed flows between them through an interceptable
//! channel, recording the transcript.
//!
//! Every protocol here is strict ping-pong, so a party's whole behavior is
//! "emit the first flow" (initiator only) plus "consume flow `t`, maybe emit
//! flow `t+1`". Randomness is drawn from a per-party seeded stream, which
//! makes sessions reproducible byte for byte.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::cipher::{
    decrypt_elem, encrypt_elem, hash_password, sign_with_password, stream_decrypt,
    stream_encrypt, verify_password_signature, FlowCtx, Password, StreamCiphertext,
};
use crate::group::{gcd, inv_elem, inv_exponent, mul_elem, pow_mod};
use crate::protocol::variant::{elem_slot, Direction, Variant};
use crate::protocol::wire::{Message, PayloadReader, PayloadWriter};
use crate::protocol::{ProtocolError, Transcript, TranscriptMeta};
use crate::{Exponent, GroupElement, GroupParams, Scalar};

/// Retries for drawing a no-key exponent coprime to `q-1`.
const INVERTIBLE_RETRIES: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Initiator,
    Responder,
}

/// Why a party gave up on a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    /// A decrypted challenge echo or signature failed to verify.
    ChallengeMismatch,
    /// Exponent resampling exhausted without hitting a unit mod `q-1`.
    NotInvertible,
    /// A flow was dropped, malformed, or the peer went silent.
    Channel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionStatus {
    Completed,
    Aborted(AbortReason),
}

#[derive(Debug, Clone, Serialize)]
pub struct ChallengeCheck {
    pub name: &'static str,
    pub passed: bool,
}

/// Per-party result of a session.
#[derive(Debug, Clone, Serialize)]
pub struct SessionOutcome {
    pub id_label: String,
    pub role: Role,
    pub status: SessionStatus,
    /// The exchange key `K`, a group element.
    pub exchange_key: Option<GroupElement>,
    /// The final session key `S` where the variant separates it from `K`.
    #[serde(with = "hex_opt")]
    pub final_key: Option<Vec<u8>>,
    pub challenge_checks: Vec<ChallengeCheck>,
    /// Identity label the peer claimed in its first flow.
    pub peer_label: Option<String>,
}

mod hex_opt {
    pub fn serialize<S: serde::Serializer>(
        v: &Option<Vec<u8>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match v {
            Some(bytes) => s.serialize_some(&hex::encode(bytes)),
            None => s.serialize_none(),
        }
    }
}

impl SessionOutcome {
    pub fn completed(&self) -> bool {
        self.status == SessionStatus::Completed
    }
}

/// Everything a party needs to run one session.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub role: Role,
    pub id_label: String,
    pub params: GroupParams,
    pub password: Password,
    pub seed: u64,
    pub variant: Variant,
    /// Length of the random challenges and key shares, bytes.
    pub challenge_bytes: usize,
    /// Pins the party's main secret exponent (fixtures and worked examples).
    pub fixed_exponent: Option<Scalar>,
    /// Pins the transmitted key of the no-key protocols (initiator only).
    pub fixed_nokey_key: Option<Scalar>,
    /// Augmented-EKE only: this party holds the hashed "super password"
    /// instead of the password itself.
    pub holds_prehashed_only: bool,
}

impl SessionConfig {
    pub fn new(
        role: Role,
        params: GroupParams,
        password: Password,
        seed: u64,
        variant: Variant,
    ) -> Self {
        Self {
            role,
            id_label: match role {
                Role::Initiator => "A".into(),
                Role::Responder => "B".into(),
            },
            params,
            password,
            seed,
            variant,
            challenge_bytes: 16,
            fixed_exponent: None,
            fixed_nokey_key: None,
            holds_prehashed_only: false,
        }
    }
}

/// `peer^secret mod q` — the Diffie-Hellman key derivation both sides run.
pub fn derive_exchange_key(
    params: &GroupParams,
    secret: Exponent,
    peer: GroupElement,
) -> GroupElement {
    pow_mod(params, peer, secret)
}

/// Serializes a group-element key for use as a stream-cipher key:
/// fixed-width decimal, zero-padded to the width of `q-1`, so the encoding
/// leaks nothing about the magnitude.
pub fn stream_key_bytes(params: &GroupParams, key: GroupElement) -> Vec<u8> {
    let width = params.n().to_string().len();
    format!("{:0width$}", key.value()).into_bytes()
}

/// `S = S_A ⊕ S_B`, bytewise.
pub fn combine_session_key(s_a: &[u8], s_b: &[u8]) -> Result<Vec<u8>, ProtocolError> {
    if s_a.len() != s_b.len() {
        return Err(ProtocolError::LengthMismatch {
            left: s_a.len(),
            right: s_b.len(),
        });
    }
    Ok(s_a.iter().zip(s_b).map(|(a, b)| a ^ b).collect())
}

/// Strips one exponentiation layer in the no-key commutative scheme:
/// `received^{secret_inv} mod q`.
pub fn nokey_unwrap(
    params: &GroupParams,
    received: GroupElement,
    secret_inv: Exponent,
) -> GroupElement {
    pow_mod(params, received, secret_inv)
}

/// A protocol participant, driven by messages.
pub struct Party {
    cfg: SessionConfig,
    session_id: u64,
    rng: ChaCha12Rng,
    /// Password actually keying the element cipher (the hash, for A-EKE).
    elem_password: Password,
    expecting: Option<u8>,
    done: bool,
    // session scratch
    secret: Option<Exponent>,
    secret_inv: Option<Exponent>,
    exchange_key: Option<GroupElement>,
    stream_key: Vec<u8>,
    my_challenge: Vec<u8>,
    peer_challenge: Vec<u8>,
    my_share: Vec<u8>,
    peer_share: Vec<u8>,
    final_key: Option<Vec<u8>>,
    checks: Vec<ChallengeCheck>,
    peer_label: Option<String>,
}

impl Party {
    pub fn new(cfg: SessionConfig, session_id: u64) -> Self {
        let elem_password = match cfg.variant {
            Variant::AEke if !cfg.holds_prehashed_only => hash_password(&cfg.password),
            _ => cfg.password.clone(),
        };
        let rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        Self {
            cfg,
            session_id,
            rng,
            elem_password,
            expecting: None,
            done: false,
            secret: None,
            secret_inv: None,
            exchange_key: None,
            stream_key: Vec::new(),
            my_challenge: Vec::new(),
            peer_challenge: Vec::new(),
            my_share: Vec::new(),
            peer_share: Vec::new(),
            final_key: None,
            checks: Vec::new(),
            peer_label: None,
        }
    }

    pub fn role(&self) -> Role {
        self.cfg.role
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// The flow tag this party expects next, if any.
    pub fn expecting(&self) -> Option<u8> {
        self.expecting
    }

    pub fn into_outcome(self, status: SessionStatus) -> SessionOutcome {
        SessionOutcome {
            id_label: self.cfg.id_label,
            role: self.cfg.role,
            status,
            exchange_key: self.exchange_key,
            final_key: self.final_key,
            challenge_checks: self.checks,
            peer_label: self.peer_label,
        }
    }

    /// Emits flow 1. Initiator only.
    pub fn initial_message(&mut self) -> Result<Message, AbortReason> {
        assert_eq!(self.cfg.role, Role::Initiator, "responders never open");
        let msg = match self.cfg.variant {
            Variant::SimplifiedEke => self.open_simplified(),
            Variant::GenericEke => self.open_generic(),
            Variant::DhEke { encrypt_first_flow } => self.open_dh(encrypt_first_flow),
            Variant::EnhancedEke => self.open_dh(false),
            Variant::AEke => self.open_aeke(),
            Variant::NoKey | Variant::EncNoKey => self.open_nokey()?,
        };
        self.expecting = Some(2);
        Ok(msg)
    }

    /// Consumes one flow; returns the reply when the schedule calls for one.
    pub fn receive(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        if self.done {
            return Err(channel("message after completion"));
        }
        let want_dir = match self.cfg.role {
            Role::Initiator => Direction::BToA,
            Role::Responder => Direction::AToB,
        };
        if msg.direction != want_dir {
            return Err(channel("flow direction does not match role"));
        }
        match self.expecting {
            Some(tag) if tag == msg.tag => {}
            Some(tag) => {
                return Err(channel(format!(
                    "expected flow {tag}, got flow {}",
                    msg.tag
                )))
            }
            None if self.cfg.role == Role::Responder && msg.tag == 1 => {}
            None => return Err(channel("unsolicited flow")),
        }
        self.expecting = None;
        let reply = match (self.cfg.variant, self.cfg.role, msg.tag) {
            (Variant::SimplifiedEke, Role::Responder, 1) => self.simplified_b1(msg)?,
            (Variant::SimplifiedEke, Role::Initiator, 2) => self.simplified_a2(msg)?,

            (Variant::GenericEke, Role::Responder, 1) => self.generic_b1(msg)?,
            (Variant::GenericEke, Role::Initiator, 2) => self.generic_a2(msg)?,
            (Variant::GenericEke, Role::Responder, 3) => self.generic_b3(msg)?,
            (Variant::GenericEke, Role::Initiator, 4) => self.generic_a4(msg)?,
            (Variant::GenericEke, Role::Responder, 5) => self.generic_b5(msg)?,

            (Variant::DhEke { encrypt_first_flow }, Role::Responder, 1) => {
                self.dh_b1(msg, encrypt_first_flow, false)?
            }
            (Variant::EnhancedEke, Role::Responder, 1) => self.dh_b1(msg, false, true)?,
            (Variant::DhEke { .. }, Role::Initiator, 2) => self.dh_a2(msg, false)?,
            (Variant::EnhancedEke, Role::Initiator, 2) => self.dh_a2(msg, true)?,
            (Variant::DhEke { .. }, Role::Responder, 3) => self.dh_b3(msg, false)?,
            (Variant::EnhancedEke, Role::Responder, 3) => self.dh_b3(msg, true)?,
            (Variant::DhEke { .. } | Variant::EnhancedEke, Role::Initiator, 4) => {
                self.dh_a4(msg)?
            }

            (Variant::AEke, Role::Responder, 1) => self.aeke_b1(msg)?,
            (Variant::AEke, Role::Initiator, 2) => self.aeke_a2(msg)?,
            (Variant::AEke, Role::Responder, 3) => self.aeke_b3(msg)?,

            (Variant::NoKey | Variant::EncNoKey, Role::Responder, 1) => self.nokey_b1(msg)?,
            (Variant::NoKey | Variant::EncNoKey, Role::Initiator, 2) => self.nokey_a2(msg)?,
            (Variant::NoKey | Variant::EncNoKey, Role::Responder, 3) => self.nokey_b3(msg)?,

            _ => return Err(channel("flow outside the variant schedule")),
        };
        Ok(reply)
    }

    // ---- shared helpers -------------------------------------------------

    fn out(&self, tag: u8, payload: Vec<u8>) -> Message {
        let direction = match self.cfg.role {
            Role::Initiator => Direction::AToB,
            Role::Responder => Direction::BToA,
        };
        Message::new(tag, direction, payload)
    }

    fn ctx(&self, slot: u8) -> FlowCtx {
        FlowCtx::new(self.session_id, slot)
    }

    fn params(&self) -> &GroupParams {
        &self.cfg.params
    }

    /// The party's main secret exponent in `[1, n-1]`, honoring a fixture pin.
    fn draw_secret(&mut self) -> Exponent {
        match self.cfg.fixed_exponent {
            Some(v) => self
                .cfg
                .params
                .exponent(v)
                .expect("pinned exponent within [0, n-1]"),
            None => self.cfg.params.random_nonzero_exponent(&mut self.rng),
        }
    }

    /// Secret exponent coprime to `q-1`, with bounded resampling; the no-key
    /// unwrap step needs the inverse to exist.
    fn draw_invertible_secret(&mut self) -> Result<(Exponent, Exponent), AbortReason> {
        if let Some(v) = self.cfg.fixed_exponent {
            let e = self.cfg.params.exponent(v).expect("pinned exponent in range");
            return match inv_exponent(self.params(), e) {
                Ok(inv) => Ok((e, inv)),
                Err(_) => Err(AbortReason::NotInvertible),
            };
        }
        for _ in 0..INVERTIBLE_RETRIES {
            let e = self.cfg.params.random_nonzero_exponent(&mut self.rng);
            if gcd(e.value(), self.cfg.params.n()) == 1 {
                let inv = inv_exponent(self.params(), e).expect("gcd checked");
                return Ok((e, inv));
            }
        }
        Err(AbortReason::NotInvertible)
    }

    fn draw_bytes(&mut self, n: usize) -> Vec<u8> {
        let mut buf = vec![0u8; n];
        self.rng.fill_bytes(&mut buf);
        buf
    }

    fn set_exchange_key(&mut self, key: GroupElement) {
        self.stream_key = stream_key_bytes(self.params(), key);
        self.exchange_key = Some(key);
    }

    fn stream_out(&self, slot: u8, plaintext: &[u8]) -> Vec<u8> {
        stream_encrypt(&self.stream_key, self.ctx(slot), plaintext).bytes
    }

    fn stream_in(&self, slot: u8, msg: &Message, expect_len: usize) -> Result<Vec<u8>, AbortReason> {
        self.stream_in_bytes(slot, &msg.payload, expect_len)
    }

    fn stream_in_bytes(
        &self,
        slot: u8,
        bytes: &[u8],
        expect_len: usize,
    ) -> Result<Vec<u8>, AbortReason> {
        if bytes.len() != expect_len {
            return Err(channel(format!(
                "stream payload has {} bytes, expected {expect_len}",
                bytes.len()
            )));
        }
        let ct = StreamCiphertext {
            bytes: bytes.to_vec(),
            context: self.ctx(slot),
        };
        Ok(stream_decrypt(&self.stream_key, self.ctx(slot), &ct))
    }

    fn encrypt_share(&self, tag: u8, component: u8, x: GroupElement) -> Scalar {
        let slot = elem_slot(self.cfg.variant, tag, component);
        encrypt_elem(self.params(), &self.elem_password, self.ctx(slot), x).value
    }

    fn decrypt_share(&self, tag: u8, component: u8, value: Scalar) -> GroupElement {
        let slot = elem_slot(self.cfg.variant, tag, component);
        let ct = crate::cipher::ElemCiphertext {
            value,
            context: self.ctx(slot),
        };
        decrypt_elem(self.params(), &self.elem_password, self.ctx(slot), &ct)
    }

    fn check(&mut self, name: &'static str, passed: bool) -> Result<(), AbortReason> {
        self.checks.push(ChallengeCheck { name, passed });
        if passed {
            Ok(())
        } else {
            Err(AbortReason::ChallengeMismatch)
        }
    }

    // ---- simplified EKE -------------------------------------------------

    fn open_simplified(&mut self) -> Message {
        let mu = self.draw_secret();
        self.secret = Some(mu);
        let nu = pow_mod(self.params(), self.cfg.params.generator(), mu);
        let y = self.encrypt_share(1, 0, nu);
        let payload = PayloadWriter::new()
            .id_label(&self.cfg.id_label)
            .group_word(self.params(), y)
            .finish();
        self.out(1, payload)
    }

    fn simplified_b1(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        self.peer_label = Some(wire(rd.id_label())?.to_string());
        let y_a = wire(rd.cipher_value(&params))?;
        wire(rd.finish())?;
        let nu_a = self.decrypt_share(1, 0, y_a);
        let mu_b = self.draw_secret();
        let nu_b = pow_mod(&params, params.generator(), mu_b);
        let y_b = self.encrypt_share(2, 0, nu_b);
        self.set_exchange_key(derive_exchange_key(&params, mu_b, nu_a));
        let payload = PayloadWriter::new()
            .id_label(&self.cfg.id_label)
            .group_word(&params, y_b)
            .finish();
        self.done = true;
        Ok(Some(self.out(2, payload)))
    }

    fn simplified_a2(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        self.peer_label = Some(wire(rd.id_label())?.to_string());
        let y_b = wire(rd.cipher_value(&params))?;
        wire(rd.finish())?;
        let nu_b = self.decrypt_share(2, 0, y_b);
        let mu_a = self.secret.expect("initiator drew its exponent");
        self.set_exchange_key(derive_exchange_key(&params, mu_a, nu_b));
        self.done = true;
        Ok(None)
    }

    // ---- generic EKE (asymmetric core instantiated over the same group) --

    fn open_generic(&mut self) -> Message {
        let d_a = self.draw_secret();
        self.secret = Some(d_a);
        let e_a = pow_mod(self.params(), self.cfg.params.generator(), d_a);
        let y = self.encrypt_share(1, 0, e_a);
        let payload = PayloadWriter::new()
            .id_label(&self.cfg.id_label)
            .group_word(self.params(), y)
            .finish();
        self.out(1, payload)
    }

    fn generic_b1(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        self.peer_label = Some(wire(rd.id_label())?.to_string());
        let y = wire(rd.cipher_value(&params))?;
        wire(rd.finish())?;
        let e_a = self.decrypt_share(1, 0, y);
        // fresh session key, encrypted to the claimed public key
        let key = params.random_element(&mut self.rng);
        let eph = params.random_nonzero_exponent(&mut self.rng);
        let c1 = pow_mod(&params, params.generator(), eph);
        let c2 = mul_elem(&params, key, pow_mod(&params, e_a, eph));
        self.set_exchange_key(key);
        let payload = PayloadWriter::new()
            .group_word(&params, self.encrypt_share(2, 0, c1))
            .group_word(&params, self.encrypt_share(2, 1, c2))
            .finish();
        self.expecting = Some(3);
        Ok(Some(self.out(2, payload)))
    }

    fn generic_a2(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        let c1 = self.decrypt_share(2, 0, wire(rd.cipher_value(&params))?);
        let c2 = self.decrypt_share(2, 1, wire(rd.cipher_value(&params))?);
        wire(rd.finish())?;
        let d_a = self.secret.expect("initiator drew its key pair");
        let key = mul_elem(&params, c2, inv_elem(&params, pow_mod(&params, c1, d_a)));
        self.set_exchange_key(key);
        self.my_challenge = self.draw_bytes(self.cfg.challenge_bytes);
        let body = self.stream_out(3, &self.my_challenge.clone());
        self.expecting = Some(4);
        Ok(Some(self.out(3, body)))
    }

    fn generic_b3(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let r_a = self.stream_in(3, msg, self.cfg.challenge_bytes)?;
        self.peer_challenge = r_a.clone();
        self.my_challenge = self.draw_bytes(self.cfg.challenge_bytes);
        let mut plain = r_a;
        plain.extend_from_slice(&self.my_challenge);
        let body = self.stream_out(4, &plain);
        self.expecting = Some(5);
        Ok(Some(self.out(4, body)))
    }

    fn generic_a4(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let cb = self.cfg.challenge_bytes;
        let plain = self.stream_in(4, msg, 2 * cb)?;
        let (echo, r_b) = plain.split_at(cb);
        self.check("challenge-echo", echo == self.my_challenge)?;
        let body = self.stream_out(5, r_b);
        self.done = true;
        Ok(Some(self.out(5, body)))
    }

    fn generic_b5(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let echo = self.stream_in(5, msg, self.cfg.challenge_bytes)?;
        self.check("challenge-echo", echo == self.my_challenge)?;
        self.done = true;
        Ok(None)
    }

    // ---- DH-EKE and enhanced EKE ----------------------------------------

    fn open_dh(&mut self, encrypt_first_flow: bool) -> Message {
        let r_a = self.draw_secret();
        self.secret = Some(r_a);
        let share = pow_mod(self.params(), self.cfg.params.generator(), r_a);
        let word = if encrypt_first_flow {
            self.encrypt_share(1, 0, share)
        } else {
            share.value()
        };
        let payload = PayloadWriter::new()
            .id_label(&self.cfg.id_label)
            .group_word(self.params(), word)
            .finish();
        self.out(1, payload)
    }

    fn dh_b1(
        &mut self,
        msg: &Message,
        encrypted_first: bool,
        enhanced: bool,
    ) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let cb = self.cfg.challenge_bytes;
        let mut rd = PayloadReader::new(&msg.payload);
        self.peer_label = Some(wire(rd.id_label())?.to_string());
        let peer_share = if encrypted_first {
            let y = wire(rd.cipher_value(&params))?;
            self.decrypt_share(1, 0, y)
        } else {
            wire(rd.element(&params))?
        };
        wire(rd.finish())?;
        let r_b = self.draw_secret();
        self.secret = Some(r_b);
        self.set_exchange_key(derive_exchange_key(&params, r_b, peer_share));
        let my_share_elem = pow_mod(&params, params.generator(), r_b);
        self.my_challenge = self.draw_bytes(cb);
        let mut plain = self.my_challenge.clone();
        if enhanced {
            self.my_share = self.draw_bytes(cb);
            plain.extend_from_slice(&self.my_share);
        }
        let payload = PayloadWriter::new()
            .group_word(&params, self.encrypt_share(2, 0, my_share_elem))
            .bytes(&self.stream_out(2, &plain))
            .finish();
        self.expecting = Some(3);
        Ok(Some(self.out(2, payload)))
    }

    fn dh_a2(&mut self, msg: &Message, enhanced: bool) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let cb = self.cfg.challenge_bytes;
        let mut rd = PayloadReader::new(&msg.payload);
        let y = wire(rd.cipher_value(&params))?;
        let stream_len = if enhanced { 2 * cb } else { cb };
        let body = wire(rd.bytes(stream_len))?.to_vec();
        wire(rd.finish())?;
        let peer_share = self.decrypt_share(2, 0, y);
        let r_a = self.secret.expect("initiator drew its exponent");
        self.set_exchange_key(derive_exchange_key(&params, r_a, peer_share));
        let plain = self.stream_in_bytes(2, &body, stream_len)?;
        let (r_b, s_b) = plain.split_at(cb);
        self.peer_challenge = r_b.to_vec();
        self.peer_share = s_b.to_vec();
        self.my_challenge = self.draw_bytes(cb);
        let mut reply_plain = self.my_challenge.clone();
        reply_plain.extend_from_slice(&self.peer_challenge);
        if enhanced {
            self.my_share = self.draw_bytes(cb);
            reply_plain.extend_from_slice(&self.my_share);
        }
        let body = self.stream_out(3, &reply_plain);
        self.expecting = Some(4);
        Ok(Some(self.out(3, body)))
    }

    fn dh_b3(&mut self, msg: &Message, enhanced: bool) -> Result<Option<Message>, AbortReason> {
        let cb = self.cfg.challenge_bytes;
        let len = if enhanced { 3 * cb } else { 2 * cb };
        let plain = self.stream_in(3, msg, len)?;
        let r_a = &plain[..cb];
        let echo = &plain[cb..2 * cb];
        self.check("challenge-echo", echo == self.my_challenge)?;
        if enhanced {
            let s_a = &plain[2 * cb..];
            self.final_key = Some(
                combine_session_key(s_a, &self.my_share).expect("equal share lengths"),
            );
        }
        let body = self.stream_out(4, r_a);
        self.done = true;
        Ok(Some(self.out(4, body)))
    }

    fn dh_a4(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let echo = self.stream_in(4, msg, self.cfg.challenge_bytes)?;
        self.check("challenge-echo", echo == self.my_challenge)?;
        if !self.my_share.is_empty() {
            self.final_key = Some(
                combine_session_key(&self.my_share, &self.peer_share)
                    .expect("equal share lengths"),
            );
        }
        self.done = true;
        Ok(None)
    }

    // ---- augmented EKE ---------------------------------------------------

    fn open_aeke(&mut self) -> Message {
        let r_a = self.draw_secret();
        self.secret = Some(r_a);
        let share = pow_mod(self.params(), self.cfg.params.generator(), r_a);
        let payload = PayloadWriter::new()
            .id_label(&self.cfg.id_label)
            .group_word(self.params(), self.encrypt_share(1, 0, share))
            .finish();
        self.out(1, payload)
    }

    fn aeke_b1(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        self.peer_label = Some(wire(rd.id_label())?.to_string());
        let peer_share = self.decrypt_share(1, 0, wire(rd.cipher_value(&params))?);
        wire(rd.finish())?;
        let r_b = self.draw_secret();
        self.set_exchange_key(derive_exchange_key(&params, r_b, peer_share));
        let my_share = pow_mod(&params, params.generator(), r_b);
        let payload = PayloadWriter::new()
            .group_word(&params, self.encrypt_share(2, 0, my_share))
            .finish();
        self.expecting = Some(3);
        Ok(Some(self.out(2, payload)))
    }

    fn aeke_a2(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        let peer_share = self.decrypt_share(2, 0, wire(rd.cipher_value(&params))?);
        wire(rd.finish())?;
        let r_a = self.secret.expect("initiator drew its exponent");
        self.set_exchange_key(derive_exchange_key(&params, r_a, peer_share));
        // prove possession of the password itself, not just its hash
        let sig = sign_with_password(&self.cfg.password, &self.stream_key);
        let body = self.stream_out(3, &sig);
        self.done = true;
        Ok(Some(self.out(3, body)))
    }

    fn aeke_b3(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let sig = self.stream_in(3, msg, 32)?;
        let ok = verify_password_signature(&self.cfg.password, &self.stream_key, &sig);
        self.check("signature", ok)?;
        self.done = true;
        Ok(None)
    }

    // ---- no-key protocols -------------------------------------------------

    fn open_nokey(&mut self) -> Result<Message, AbortReason> {
        let params = *self.params();
        let key = match self.cfg.fixed_nokey_key {
            Some(v) => params.element(v).expect("pinned key is a group element"),
            None => params.random_element(&mut self.rng),
        };
        let (a, a_inv) = self.draw_invertible_secret()?;
        self.secret = Some(a);
        self.secret_inv = Some(a_inv);
        self.exchange_key = Some(key);
        let wrapped = pow_mod(&params, key, a);
        let word = match self.cfg.variant {
            Variant::EncNoKey => self.encrypt_share(1, 0, wrapped),
            _ => wrapped.value(),
        };
        let payload = PayloadWriter::new()
            .id_label(&self.cfg.id_label)
            .group_word(&params, word)
            .finish();
        Ok(self.out(1, payload))
    }

    fn read_nokey_elem(
        &self,
        rd: &mut PayloadReader<'_>,
        tag: u8,
    ) -> Result<GroupElement, AbortReason> {
        let params = self.params();
        match self.cfg.variant {
            Variant::EncNoKey => {
                let v = wire(rd.cipher_value(params))?;
                Ok(self.decrypt_share(tag, 0, v))
            }
            _ => wire(rd.element(params)),
        }
    }

    fn nokey_b1(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        self.peer_label = Some(wire(rd.id_label())?.to_string());
        let k_a = self.read_nokey_elem(&mut rd, 1)?;
        wire(rd.finish())?;
        let (b, b_inv) = self.draw_invertible_secret()?;
        self.secret = Some(b);
        self.secret_inv = Some(b_inv);
        let k_ab = pow_mod(&params, k_a, b);
        let word = match self.cfg.variant {
            Variant::EncNoKey => self.encrypt_share(2, 0, k_ab),
            _ => k_ab.value(),
        };
        let payload = PayloadWriter::new().group_word(&params, word).finish();
        self.expecting = Some(3);
        Ok(Some(self.out(2, payload)))
    }

    fn nokey_a2(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        let k_ab = self.read_nokey_elem(&mut rd, 2)?;
        wire(rd.finish())?;
        let a_inv = self.secret_inv.expect("initiator drew its exponent");
        let k_b = nokey_unwrap(&params, k_ab, a_inv);
        let word = match self.cfg.variant {
            Variant::EncNoKey => self.encrypt_share(3, 0, k_b),
            _ => k_b.value(),
        };
        let payload = PayloadWriter::new().group_word(&params, word).finish();
        self.done = true;
        Ok(Some(self.out(3, payload)))
    }

    fn nokey_b3(&mut self, msg: &Message) -> Result<Option<Message>, AbortReason> {
        let params = *self.params();
        let mut rd = PayloadReader::new(&msg.payload);
        let k_b = self.read_nokey_elem(&mut rd, 3)?;
        wire(rd.finish())?;
        let b_inv = self.secret_inv.expect("responder drew its exponent");
        self.exchange_key = Some(nokey_unwrap(&params, k_b, b_inv));
        self.done = true;
        Ok(None)
    }
}

fn channel(detail: impl Into<String>) -> AbortReason {
    AbortReason::Channel(detail.into())
}

fn wire<T>(r: Result<T, crate::protocol::wire::WireError>) -> Result<T, AbortReason> {
    r.map_err(|e| channel(e.to_string()))
}

/// A man in the middle's view of the link: every flow passes through;
/// `None` drops it.
pub trait Channel {
    fn intercept(&mut self, msg: Message) -> Option<Message>;
}

/// The honest channel.
pub struct PassThrough;

impl Channel for PassThrough {
    fn intercept(&mut self, msg: Message) -> Option<Message> {
        Some(msg)
    }
}

/// Result of driving one session to quiescence.
#[derive(Debug)]
pub struct SessionRun {
    pub initiator: SessionOutcome,
    pub responder: SessionOutcome,
    pub transcript: Transcript,
}

impl SessionRun {
    pub fn both_completed(&self) -> bool {
        self.initiator.completed() && self.responder.completed()
    }
}

/// Runs a session over the honest channel.
pub fn run_session(
    session_id: u64,
    cfg_a: &SessionConfig,
    cfg_b: &SessionConfig,
) -> Result<SessionRun, ProtocolError> {
    run_session_with_channel(session_id, cfg_a, cfg_b, &mut PassThrough)
}

/// Runs a session, letting `channel` see (and tamper with) every flow.
pub fn run_session_with_channel(
    session_id: u64,
    cfg_a: &SessionConfig,
    cfg_b: &SessionConfig,
    channel: &mut dyn Channel,
) -> Result<SessionRun, ProtocolError> {
    if cfg_a.variant != cfg_b.variant {
        return Err(ProtocolError::ConfigMismatch("variants differ".into()));
    }
    if cfg_a.params != cfg_b.params {
        return Err(ProtocolError::ConfigMismatch("group parameters differ".into()));
    }
    if cfg_a.role != Role::Initiator || cfg_b.role != Role::Responder {
        return Err(ProtocolError::ConfigMismatch(
            "expected an initiator/responder pair".into(),
        ));
    }
    if cfg_a.challenge_bytes != cfg_b.challenge_bytes {
        return Err(ProtocolError::ConfigMismatch(
            "challenge lengths differ".into(),
        ));
    }

    let mut a = Party::new(cfg_a.clone(), session_id);
    let mut b = Party::new(cfg_b.clone(), session_id);
    let mut transcript = Transcript::new(TranscriptMeta {
        session_id,
        variant: cfg_a.variant,
        params: cfg_a.params,
        challenge_bytes: cfg_a.challenge_bytes,
    });
    let mut abort_a: Option<AbortReason> = None;
    let mut abort_b: Option<AbortReason> = None;

    let mut pending = match a.initial_message() {
        Ok(m) => Some(m),
        Err(reason) => {
            abort_a = Some(reason);
            None
        }
    };

    while let Some(msg) = pending.take() {
        let delivered = match channel.intercept(msg) {
            Some(m) => m,
            None => break, // dropped flow: someone starves below
        };
        transcript.push(delivered.clone());
        let receiver = match delivered.direction {
            Direction::AToB => &mut b,
            Direction::BToA => &mut a,
        };
        match receiver.receive(&delivered) {
            Ok(reply) => pending = reply,
            Err(reason) => {
                match delivered.direction {
                    Direction::AToB => abort_b = Some(reason),
                    Direction::BToA => abort_a = Some(reason),
                }
                break;
            }
        }
    }

    let status = |party: &Party, abort: Option<AbortReason>| match abort {
        Some(reason) => SessionStatus::Aborted(reason),
        None if party.is_done() => SessionStatus::Completed,
        None => SessionStatus::Aborted(channel_starved()),
    };
    let status_a = status(&a, abort_a);
    let status_b = status(&b, abort_b);
    Ok(SessionRun {
        initiator: a.into_outcome(status_a),
        responder: b.into_outcome(status_b),
        transcript,
    })
}

fn channel_starved() -> AbortReason {
    channel("session ended before this party completed")
}
