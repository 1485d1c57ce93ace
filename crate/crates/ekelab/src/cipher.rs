//! The symmetric layer: a password-keyed cipher over group elements, a
//! session-keyed stream cipher over byte strings, the password hash, and the
//! password-keyed signature used by the augmented protocol.
//!
//! The element cipher is range-closed on purpose. Elements are encoded as
//! `x ↦ x-1 ∈ [0, q-2]` and padded additively mod `q-1`, so decrypting any
//! ciphertext under any candidate password lands back in `[1, q-1]`. An
//! eavesdropper can never reject a wrong password just by looking at the
//! decryption; she has to go spend a discrete log on it.
//!
//! All keyed primitives are SHA-256 based:
//!
//! * element pad: `SHA-256(P ‖ 0x00 ‖ session-id ‖ 0x00 ‖ slot)` read as a
//!   big-endian integer and reduced mod `q-1`;
//! * keystream block `i`: `SHA-256(K ‖ 0x01 ‖ session-id ‖ 0x00 ‖ flow ‖ i)`
//!   with `i` as 8-byte big-endian;
//! * signature: `SHA-256(P ‖ "sig" ‖ K)`.
//!
//! Session ids travel as 8-byte big-endian, slot/flow indices as one byte.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::group::{GroupElement, GroupParams};
use crate::scalar::Word;

/// A shared low-entropy secret, plus the declared size of the space it was
/// drawn from. The attack modules enumerate exactly `2^bit_length`
/// candidates; the bytes are what actually keys the ciphers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Password {
    bytes: Vec<u8>,
    bit_length: u32,
}

impl Password {
    pub fn new(bytes: Vec<u8>, bit_length: u32) -> Self {
        assert!(!bytes.is_empty(), "password bytes must be non-empty");
        Self { bytes, bit_length }
    }

    /// A literal password; the declared entropy is its byte length, capped
    /// at the harness ceiling of 128 bits.
    pub fn from_literal(s: &str) -> Self {
        Self::new(s.as_bytes().to_vec(), ((s.len() as u32) * 8).clamp(1, 128))
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit_length(&self) -> u32 {
        self.bit_length
    }
}

/// Equality is over the key material only; the declared bit length is
/// attack-space bookkeeping.
impl PartialEq for Password {
    fn eq(&self, other: &Self) -> bool {
        self.bytes == other.bytes
    }
}

impl Eq for Password {}

/// Public context a ciphertext is bound to: which session, and which slot of
/// the session's encryption schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowCtx {
    pub session_id: u64,
    pub slot: u8,
}

impl FlowCtx {
    pub fn new(session_id: u64, slot: u8) -> Self {
        Self { session_id, slot }
    }

    fn encode(&self) -> [u8; 10] {
        let mut out = [0u8; 10];
        out[..8].copy_from_slice(&self.session_id.to_be_bytes());
        out[8] = 0x00;
        out[9] = self.slot;
        out
    }
}

/// Password-encrypted group element, a value in `[0, q-2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElemCiphertext<W: Word> {
    pub value: W,
    pub context: FlowCtx,
}

/// Stream-encrypted byte string; same length as the plaintext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamCiphertext {
    pub bytes: Vec<u8>,
    pub context: FlowCtx,
}

/// One-way hash of the password, the "super password" the augmented protocol
/// stores in place of the password itself.
pub fn hash_password(p: &Password) -> Password {
    let digest = Sha256::digest(&p.bytes);
    Password::new(digest.to_vec(), 256)
}

/// Derives the additive pad for the element cipher: a digest reduced mod `n`.
pub fn elem_pad<W: Word>(params: &GroupParams<W>, password: &Password, ctx: FlowCtx) -> W {
    let mut h = Sha256::new();
    h.update(&password.bytes);
    h.update([0x00]);
    h.update(ctx.encode());
    digest_mod(&h.finalize(), params.n())
}

/// Big-endian digest bytes reduced mod `n` by Horner's rule.
fn digest_mod<W: Word>(digest: &[u8], n: W) -> W {
    let radix = W::from_u16(256).unwrap() % n;
    let mut acc = W::zero();
    for &b in digest {
        acc = acc.mul_mod(radix, n).add_mod(W::from_u8(b).unwrap() % n, n);
    }
    acc
}

/// `E_P`: encode the element into `[0, q-2]` and shift by the pad.
pub fn encrypt_elem<W: Word>(
    params: &GroupParams<W>,
    password: &Password,
    ctx: FlowCtx,
    x: GroupElement<W>,
) -> ElemCiphertext<W> {
    let pad = elem_pad(params, password, ctx);
    ElemCiphertext {
        value: encode_shift(params, x.value(), pad),
        context: ctx,
    }
}

/// `D_P`: unshift and decode. Total over `[0, q-2]` for any password, so a
/// wrong guess still produces a plausible group element.
pub fn decrypt_elem<W: Word>(
    params: &GroupParams<W>,
    password: &Password,
    ctx: FlowCtx,
    c: &ElemCiphertext<W>,
) -> GroupElement<W> {
    let pad = elem_pad(params, password, ctx);
    params
        .element(decode_shift(params, c.value, pad))
        .expect("shift decoding is range-closed")
}

fn encode_shift<W: Word>(params: &GroupParams<W>, x: W, pad: W) -> W {
    (x - W::one()).add_mod(pad, params.n())
}

fn decode_shift<W: Word>(params: &GroupParams<W>, value: W, pad: W) -> W {
    value.sub_mod(pad, params.n()) + W::one()
}

/// `E_K` over byte strings: XOR against SHA-256 counter-mode keystream.
pub fn stream_encrypt(key: &[u8], ctx: FlowCtx, m: &[u8]) -> StreamCiphertext {
    StreamCiphertext {
        bytes: stream_xor(key, ctx, m),
        context: ctx,
    }
}

/// `D_K`; XOR is its own inverse.
pub fn stream_decrypt(key: &[u8], ctx: FlowCtx, c: &StreamCiphertext) -> Vec<u8> {
    stream_xor(key, ctx, &c.bytes)
}

fn stream_xor(key: &[u8], ctx: FlowCtx, data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len());
    for (block_index, chunk) in data.chunks(32).enumerate() {
        let mut h = Sha256::new();
        h.update(key);
        h.update([0x01]);
        h.update(ctx.encode());
        h.update((block_index as u64).to_be_bytes());
        let block = h.finalize();
        out.extend(chunk.iter().zip(block.iter()).map(|(d, k)| d ^ k));
    }
    out
}

/// `S_P(K)`: a password-keyed tag over the session key. Producing it takes
/// the password itself; the hash `p = H(P)` is not enough.
pub fn sign_with_password(password: &Password, key: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(&password.bytes);
    h.update(b"sig");
    h.update(key);
    h.finalize().into()
}

pub fn verify_password_signature(password: &Password, key: &[u8], sig: &[u8]) -> bool {
    sign_with_password(password, key)[..] == *sig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::gen_params;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn q23() -> GroupParams<u64> {
        GroupParams::new(23, 5, 22).unwrap()
    }

    #[test]
    fn hash_password_is_deterministic_32_bytes() {
        let p = Password::from_literal("correct horse");
        let h1 = hash_password(&p);
        let h2 = hash_password(&p);
        assert_eq!(h1, h2);
        assert_eq!(h1.bytes().len(), 32);
        assert_eq!(hash_password(&Password::new(vec![0], 1)).bytes().len(), 32);
    }

    #[test]
    fn hash_password_separates_random_pairs() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a: [u8; 6] = rng.gen();
            let b: [u8; 6] = rng.gen();
            if a != b {
                assert_ne!(
                    hash_password(&Password::new(a.to_vec(), 48)),
                    hash_password(&Password::new(b.to_vec(), 48))
                );
            }
        }
    }

    #[test]
    fn elem_cipher_shift_arithmetic() {
        let p = q23();
        // pad 15, x 10: (9 + 15) mod 22 = 2
        assert_eq!(encode_shift(&p, 10, 15), 2);
        assert_eq!(decode_shift(&p, 2, 15), 10);
        // zero pad is the bare encoding x-1
        assert_eq!(encode_shift(&p, 10, 0), 9);
        // pad q-1 reduces to zero mod (q-1): identity again
        assert_eq!(decode_shift(&p, encode_shift(&p, 7, 0), 22 % 22), 7);
    }

    #[test]
    fn elem_cipher_round_trips_under_correct_password() {
        let params: GroupParams<u64> = gen_params(20, 5).unwrap();
        let password = Password::from_literal("hunter2");
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for i in 0..1000u64 {
            let ctx = FlowCtx::new(i, (i % 7) as u8);
            let x = params.random_element(&mut rng);
            let c = encrypt_elem(&params, &password, ctx, x);
            assert!(c.value < params.n());
            assert_eq!(decrypt_elem(&params, &password, ctx, &c), x);
        }
    }

    #[test]
    fn wrong_password_decryptions_stay_in_range_exhaustively() {
        // q = 23 and the full 12-bit password space: every (password,
        // ciphertext) pair decodes to a legal element.
        let params = q23();
        let ctx = FlowCtx::new(77, 1);
        for pw in 0..(1u32 << 12) {
            let password = Password::new(pw.to_le_bytes()[..2].to_vec(), 12);
            for value in 0..=21u64 {
                let c = ElemCiphertext {
                    value,
                    context: ctx,
                };
                let x = decrypt_elem(&params, &password, ctx, &c);
                assert!((1..=22).contains(&x.value()));
            }
        }
    }

    #[test]
    fn decryption_spread_is_uniform_over_candidate_passwords() {
        // Fixed ciphertext, >= 2^10 candidate passwords; bucket counts over
        // the 22 possible plaintexts should be consistent with uniformity.
        let params = q23();
        let ctx = FlowCtx::new(3, 2);
        let mut buckets = [0u64; 22];
        let trials = 1u32 << 12;
        for pw in 0..trials {
            let password = Password::new(pw.to_le_bytes()[..2].to_vec(), 12);
            let c = ElemCiphertext {
                value: 13,
                context: ctx,
            };
            let x = decrypt_elem(&params, &password, ctx, &c);
            buckets[(x.value() - 1) as usize] += 1;
        }
        let expected = trials as f64 / 22.0;
        let chi2: f64 = buckets
            .iter()
            .map(|&o| {
                let d = o as f64 - expected;
                d * d / expected
            })
            .sum();
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let p_value = 1.0 - ChiSquared::new(21.0).unwrap().cdf(chi2);
        assert!(p_value > 0.001, "chi2 = {chi2}, p = {p_value}");
    }

    #[test]
    fn stream_cipher_round_trips_and_handles_empty() {
        let ctx = FlowCtx::new(9, 3);
        let key = b"0000018";
        let m = b"a random challenge string over two blocks long .................";
        let c = stream_encrypt(key, ctx, m);
        assert_eq!(c.bytes.len(), m.len());
        assert_eq!(stream_decrypt(key, ctx, &c), m);
        assert!(stream_encrypt(key, ctx, b"").bytes.is_empty());
    }

    #[test]
    fn keystreams_differ_across_flow_indices() {
        let key = b"k";
        let m = [0u8; 32];
        let c1 = stream_encrypt(key, FlowCtx::new(4, 1), &m);
        let c2 = stream_encrypt(key, FlowCtx::new(4, 2), &m);
        assert_ne!(c1.bytes, c2.bytes);
        let c3 = stream_encrypt(key, FlowCtx::new(5, 1), &m);
        assert_ne!(c1.bytes, c3.bytes);
    }

    #[test]
    fn signature_verifies_only_with_raw_password_and_same_key() {
        let password = Password::from_literal("pa55");
        let key = b"0001234";
        let sig = sign_with_password(&password, key);
        assert!(verify_password_signature(&password, key, &sig));
        // the hashed password is not the password
        let p = hash_password(&password);
        assert!(!verify_password_signature(&p, key, &sig));
        // single-bit key flip
        let mut key2 = *key;
        key2[0] ^= 1;
        assert!(!verify_password_signature(&password, &key2, &sig));
        // tag truncation or corruption
        let mut sig2 = sig;
        sig2[31] ^= 0x80;
        assert!(!verify_password_signature(&password, key, &sig2));
    }

    #[test]
    fn pads_agree_across_word_types() {
        let p64: GroupParams<u64> = gen_params(16, 42).unwrap();
        let p32: GroupParams<u32> = gen_params(16, 42).unwrap();
        let password = Password::from_literal("x");
        let ctx = FlowCtx::new(1, 1);
        assert_eq!(
            elem_pad(&p64, &password, ctx),
            elem_pad(&p32, &password, ctx) as u64
        );
    }
}
