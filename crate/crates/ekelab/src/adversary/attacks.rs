//! Offline password-guessing attacks against captured transcripts.
//!
//! Each attack charges the candidate exactly what the protocol forces it to
//! pay at the discrete-log oracle, and nothing else: decryptions and
//! exponentiations are free, logs are metered. Candidate enumeration is
//! embarrassingly parallel; workers own disjoint index ranges and private
//! meters, and reports merge associatively, so results are independent of
//! the worker count.

use std::time::Instant;

use crate::adversary::report::{AttackReport, EnhancedAttackOutcome, RecoveredCandidate};
use crate::adversary::space::PasswordSpace;
use crate::adversary::AttackError;
use crate::cipher::{decrypt_elem, stream_decrypt, ElemCiphertext, FlowCtx, Password, StreamCiphertext};
use crate::group::{element_order, gcd, inv_mod, pow_mod, DlogMeter, DlogOracle};
use crate::protocol::{elem_slot, stream_key_bytes, Message, PayloadReader, Transcript, Variant};
use crate::{GroupElement, GroupParams, Scalar};

/// Attack tuning. `workers = 1` is the reference single-threaded path.
#[derive(Debug, Clone, Copy)]
pub struct AttackOptions {
    pub workers: usize,
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self { workers: 1 }
    }
}

/// What one candidate produced.
enum Verdict {
    Accept(GroupElement),
    Reject,
    /// Rejected before the full per-candidate oracle budget was spent.
    EarlyReject,
}

/// Enumerates the space across workers, merging in index order.
fn sweep<F>(
    variant: Variant,
    space: &PasswordSpace,
    opts: &AttackOptions,
    per_candidate: F,
) -> AttackReport
where
    F: Fn(&Password, &mut DlogMeter) -> Verdict + Sync,
{
    let started = Instant::now();
    let size = space.size();
    let workers = opts.workers.clamp(1, 64) as u64;
    let chunk = size.div_ceil(workers).max(1);

    struct Partial {
        recovered: Vec<RecoveredCandidate>,
        meter: DlogMeter,
        early: u64,
    }

    let run_range = |lo: u64, hi: u64| -> Partial {
        let mut partial = Partial {
            recovered: Vec::new(),
            meter: DlogMeter::new(),
            early: 0,
        };
        for index in lo..hi {
            let password = space.candidate(index);
            match per_candidate(&password, &mut partial.meter) {
                Verdict::Accept(key) => partial.recovered.push(RecoveredCandidate {
                    password,
                    key,
                }),
                Verdict::Reject => {}
                Verdict::EarlyReject => partial.early += 1,
            }
        }
        partial
    };

    let partials: Vec<Partial> = if workers == 1 {
        vec![run_range(0, size)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(size);
                    let run = &run_range;
                    scope.spawn(move || run(lo.min(size), hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    };

    let mut meter = DlogMeter::new();
    let mut recovered = Vec::new();
    let mut early = 0;
    for partial in partials {
        meter.merge(&partial.meter);
        recovered.extend(partial.recovered);
        early += partial.early;
    }
    AttackReport {
        variant,
        space_size: size,
        guesses_tried: size,
        dlog_calls: meter.calls(),
        recovered,
        early_rejections: early,
        wall_seconds: started.elapsed().as_secs_f64(),
    }
}

fn shape_err(detail: impl Into<String>) -> AttackError {
    AttackError::TranscriptShape(detail.into())
}

fn checked_transcript<'t>(
    t: &'t Transcript,
    want: &'static str,
) -> Result<&'t Transcript, AttackError> {
    if t.meta.variant.name() != want {
        return Err(shape_err(format!(
            "expected a {want} transcript, got {}",
            t.meta.variant
        )));
    }
    t.check_shape().map_err(|e| shape_err(e.to_string()))?;
    Ok(t)
}

/// Splits a first-flow payload into the identity label and the group word;
/// `encrypted` selects the ciphertext range `[0, q-2]` over the element
/// range `[1, q-1]`.
fn first_flow_word(
    params: &GroupParams,
    msg: &Message,
    encrypted: bool,
) -> Result<Scalar, AttackError> {
    let mut rd = PayloadReader::new(&msg.payload);
    rd.id_label().map_err(|e| shape_err(e.to_string()))?;
    let v = if encrypted {
        rd.cipher_value(params).map_err(|e| shape_err(e.to_string()))?
    } else {
        rd.element(params)
            .map_err(|e| shape_err(e.to_string()))?
            .value()
    };
    rd.finish().map_err(|e| shape_err(e.to_string()))?;
    Ok(v)
}

fn decrypt_slot(
    params: &GroupParams,
    session_id: u64,
    variant: Variant,
    tag: u8,
    component: u8,
    value: Scalar,
    password: &Password,
) -> GroupElement {
    let ctx = FlowCtx::new(session_id, elem_slot(variant, tag, component));
    let ct = ElemCiphertext {
        value,
        context: ctx,
    };
    decrypt_elem(params, password, ctx, &ct)
}

fn decrypt_stream(session_id: u64, tag: u8, key: &[u8], bytes: &[u8]) -> Vec<u8> {
    let ctx = FlowCtx::new(session_id, tag);
    let ct = StreamCiphertext {
        bytes: bytes.to_vec(),
        context: ctx,
    };
    stream_decrypt(key, ctx, &ct)
}

/// Guessing attack on the two-flow protocol: decrypt both shares under the
/// candidate, spend exactly one log on the initiator's share, and form the
/// candidate key. There is no verifier in the transcript, so *every*
/// candidate survives; the report carries them all.
pub fn attack_simplified_eke(
    t: &Transcript,
    space: &PasswordSpace,
    opts: &AttackOptions,
) -> Result<AttackReport, AttackError> {
    let t = checked_transcript(t, "simplified-eke")?;
    let params = t.meta.params;
    let sid = t.meta.session_id;
    let variant = t.meta.variant;
    let y_a = first_flow_word(&params, t.flow(1).expect("shape checked"), true)?;
    let y_b = first_flow_word(&params, t.flow(2).expect("shape checked"), true)?;
    let oracle = DlogOracle::new(&params);

    Ok(sweep(variant, space, opts, |candidate, meter| {
        let nu_a = decrypt_slot(&params, sid, variant, 1, 0, y_a, candidate);
        let mu_a = oracle.dlog(nu_a, meter);
        let nu_b = decrypt_slot(&params, sid, variant, 2, 0, y_b, candidate);
        Verdict::Accept(pow_mod(&params, nu_b, mu_a))
    }))
}

/// Guessing attack on DH-EKE, either first-flow mode: one log per candidate
/// to open the responder's share, one exponentiation for the candidate key,
/// then the challenge ciphertexts cross-check the guess.
pub fn attack_dheke(
    t: &Transcript,
    space: &PasswordSpace,
    opts: &AttackOptions,
) -> Result<AttackReport, AttackError> {
    let t = checked_transcript(t, "dh-eke")?;
    let params = t.meta.params;
    let sid = t.meta.session_id;
    let variant = t.meta.variant;
    let encrypted_first = matches!(
        variant,
        Variant::DhEke {
            encrypt_first_flow: true
        }
    );
    let cb = t.meta.challenge_bytes;

    let flow1_word = first_flow_word(&params, t.flow(1).unwrap(), encrypted_first)?;
    let flow2 = t.flow(2).unwrap();
    let mut rd = PayloadReader::new(&flow2.payload);
    let y_b = rd.cipher_value(&params).map_err(|e| shape_err(e.to_string()))?;
    let ek_rb = rd.bytes(cb).map_err(|e| shape_err(e.to_string()))?.to_vec();
    rd.finish().map_err(|e| shape_err(e.to_string()))?;
    let ek_pair = t.flow(3).unwrap().payload.clone();
    if ek_pair.len() != 2 * cb {
        return Err(shape_err("flow 3 length"));
    }
    let ek_ra = t.flow(4).unwrap().payload.clone();
    if ek_ra.len() != cb {
        return Err(shape_err("flow 4 length"));
    }
    let oracle = DlogOracle::new(&params);

    Ok(sweep(variant, space, opts, |candidate, meter| {
        // open the responder's share and take its log: one oracle call,
        // whether or not the first flow was password-wrapped
        let g_rb = decrypt_slot(&params, sid, variant, 2, 0, y_b, candidate);
        let r_b = oracle.dlog(g_rb, meter);
        let g_ra = if encrypted_first {
            decrypt_slot(&params, sid, variant, 1, 0, flow1_word, candidate)
        } else {
            params.element(flow1_word).expect("plain flow-1 share validated")
        };
        let key = pow_mod(&params, g_ra, r_b);
        // verify: the challenge echoed in flows 3 and 4 must be consistent
        let sk = stream_key_bytes(&params, key);
        let r_b_guess = decrypt_stream(sid, 2, &sk, &ek_rb);
        let r_a_guess = decrypt_stream(sid, 4, &sk, &ek_ra);
        let pair = decrypt_stream(sid, 3, &sk, &ek_pair);
        if pair[..cb] == r_a_guess[..] && pair[cb..] == r_b_guess[..] {
            Verdict::Accept(key)
        } else {
            Verdict::Reject
        }
    }))
}

/// Two-stage attack on the enhanced protocol, given one old final key `S`.
/// Stage 1 finds the exchange key by replaying the share combination under
/// every candidate key — zero oracle calls. Stage 2 is the usual one-log
/// password sweep, accepting candidates whose key equals the stage-1 find.
pub fn attack_enhanced_eke(
    t: &Transcript,
    known_s: &[u8],
    key_space: &[GroupElement],
    space: &PasswordSpace,
    opts: &AttackOptions,
) -> Result<EnhancedAttackOutcome, AttackError> {
    let t = checked_transcript(t, "enhanced-eke")?;
    let params = t.meta.params;
    let sid = t.meta.session_id;
    let variant = t.meta.variant;
    let cb = t.meta.challenge_bytes;

    let flow1 = t.flow(1).unwrap();
    let mut rd = PayloadReader::new(&flow1.payload);
    rd.id_label().map_err(|e| shape_err(e.to_string()))?;
    let g_ra = rd.element(&params).map_err(|e| shape_err(e.to_string()))?;
    rd.finish().map_err(|e| shape_err(e.to_string()))?;

    let flow2 = t.flow(2).unwrap();
    let mut rd = PayloadReader::new(&flow2.payload);
    let y_b = rd.cipher_value(&params).map_err(|e| shape_err(e.to_string()))?;
    let ek_rb_sb = rd
        .bytes(2 * cb)
        .map_err(|e| shape_err(e.to_string()))?
        .to_vec();
    rd.finish().map_err(|e| shape_err(e.to_string()))?;
    let ek_triple = t.flow(3).unwrap().payload.clone();
    if ek_triple.len() != 3 * cb {
        return Err(shape_err("flow 3 length"));
    }

    // stage 1: search the key space by reproducing S = S_A xor S_B
    let stage1_meter = DlogMeter::new(); // stays at zero: no logs in this stage
    let mut stage1_keys_tried = 0;
    let mut exchange_key = None;
    for &candidate_key in key_space {
        stage1_keys_tried += 1;
        let sk = stream_key_bytes(&params, candidate_key);
        let rb_sb = decrypt_stream(sid, 2, &sk, &ek_rb_sb);
        let triple = decrypt_stream(sid, 3, &sk, &ek_triple);
        let s_b = &rb_sb[cb..];
        let s_a = &triple[2 * cb..];
        let combined: Vec<u8> = s_a.iter().zip(s_b).map(|(a, b)| a ^ b).collect();
        if combined == known_s {
            exchange_key = Some(candidate_key);
            break;
        }
    }
    let exchange_key = exchange_key.ok_or(AttackError::KNotFound)?;

    // stage 2: one log per password candidate, accept on key match
    let oracle = DlogOracle::new(&params);
    let mut report = sweep(variant, space, opts, |candidate, meter| {
        let g_rb = decrypt_slot(&params, sid, variant, 2, 0, y_b, candidate);
        let r_b = oracle.dlog(g_rb, meter);
        let key = pow_mod(&params, g_ra, r_b);
        if key == exchange_key {
            Verdict::Accept(key)
        } else {
            Verdict::Reject
        }
    });
    report.dlog_calls += stage1_meter.calls();

    Ok(EnhancedAttackOutcome {
        exchange_key,
        stage1_keys_tried,
        stage1_dlog_calls: stage1_meter.calls(),
        report,
    })
}

/// Guessing attack on the password-encrypted no-key protocol: decrypt the
/// three flows, extract the two secret exponents by general-base logs (two
/// oracle calls), rebuild the transmitted key both ways, and accept when the
/// reconstructions agree.
pub fn attack_enc_nokey(
    t: &Transcript,
    space: &PasswordSpace,
    opts: &AttackOptions,
) -> Result<AttackReport, AttackError> {
    let t = checked_transcript(t, "enc-nokey")?;
    let params = t.meta.params;
    let sid = t.meta.session_id;
    let variant = t.meta.variant;
    let c1 = first_flow_word(&params, t.flow(1).unwrap(), true)?;
    let read_single = |msg: &Message| -> Result<Scalar, AttackError> {
        let mut rd = PayloadReader::new(&msg.payload);
        let v = rd.cipher_value(&params).map_err(|e| shape_err(e.to_string()))?;
        rd.finish().map_err(|e| shape_err(e.to_string()))?;
        Ok(v)
    };
    let c2 = read_single(t.flow(2).unwrap())?;
    let c3 = read_single(t.flow(3).unwrap())?;
    let oracle = DlogOracle::new(&params);

    // Solve base^x = target, then invert x modulo the base's subgroup order;
    // for the true password the order matches and the unwrap is exact.
    let unwrap_via = |base: GroupElement,
                      target: GroupElement,
                      wrapped: GroupElement,
                      meter: &mut DlogMeter|
     -> Option<GroupElement> {
        let x = oracle.dlog_with_base(base, target, meter)?;
        let order = element_order(&params, base);
        if gcd(x.value(), order) != 1 {
            return None;
        }
        let x_inv = inv_mod(x.value(), order).expect("unit mod the subgroup order");
        Some(pow_mod(&params, wrapped, params.exponent_mod_n(x_inv)))
    };

    Ok(sweep(variant, space, opts, |candidate, meter| {
        let k_a = decrypt_slot(&params, sid, variant, 1, 0, c1, candidate);
        let k_ab = decrypt_slot(&params, sid, variant, 2, 0, c2, candidate);
        let k_b = decrypt_slot(&params, sid, variant, 3, 0, c3, candidate);
        // a' from [(K^b)', (K^ab)']: first oracle call
        let key_first = match unwrap_via(k_b, k_ab, k_a, meter) {
            Some(k) => k,
            None => return Verdict::EarlyReject,
        };
        // b' from [(K^a)', (K^ab)']: second oracle call
        let key_second = match unwrap_via(k_a, k_ab, k_b, meter) {
            Some(k) => k,
            None => return Verdict::Reject,
        };
        if key_first == key_second {
            Verdict::Accept(key_first)
        } else {
            Verdict::Reject
        }
    }))
}
