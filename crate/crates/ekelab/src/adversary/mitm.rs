//! Active middle-man attacks on the no-key protocols.
//!
//! The interceptor runs two full three-pass interactions: one as the fake
//! responder facing the honest initiator, one as the fake initiator facing
//! the honest responder, replaying the key it extracted in between. Against
//! the plain protocol this always works; with the flows password-encrypted
//! the interceptor can only shuffle ciphertext values around and walks away
//! with noise.

use crate::adversary::report::MitmReport;
use crate::adversary::AttackError;
use crate::cipher::{decrypt_elem, encrypt_elem, ElemCiphertext, FlowCtx, Password};
use crate::group::{gcd, inv_exponent, pow_mod};
use crate::protocol::{
    elem_slot, Direction, Message, Party, PayloadReader, PayloadWriter, Role, SessionConfig,
    SessionStatus, Variant,
};
use crate::{Exponent, GroupElement, GroupParams, Scalar};

/// Session ids for the interceptor's two interactions.
#[derive(Debug, Clone, Copy)]
pub struct MitmSessionIds {
    pub with_initiator: u64,
    pub with_responder: u64,
}

impl MitmSessionIds {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            with_initiator: seed,
            with_responder: seed.wrapping_add(1),
        }
    }
}

/// Middle-man attack on the plain no-key protocol. Always succeeds: both
/// honest parties complete, and the interceptor holds the transmitted key.
pub fn mitm_nokey(
    cfg_a: &SessionConfig,
    cfg_b: &SessionConfig,
    eve_exponent: Exponent,
    sessions: MitmSessionIds,
) -> Result<MitmReport, AttackError> {
    expect_variant(cfg_a, cfg_b, Variant::NoKey)?;
    let params = cfg_a.params;
    let eve_inv = unit_inverse(&params, eve_exponent)?;

    // interaction 1: the honest initiator talks to the interceptor
    let mut a = Party::new(cfg_a.clone(), sessions.with_initiator);
    let m1 = a.initial_message().map_err(session_failed)?;
    let (label, k_a) = read_first(&params, &m1)?;
    let reply2 = plain_elem_msg(&params, 2, Direction::BToA, pow_mod(&params, k_a, eve_exponent));
    let m3 = a
        .receive(&reply2)
        .map_err(session_failed)?
        .ok_or_else(|| AttackError::SessionFailed("initiator went silent".into()))?;
    let k_e = read_single(&params, &m3)?;
    let stolen = pow_mod(&params, k_e, eve_inv);
    let initiator_outcome = a.into_outcome(SessionStatus::Completed);

    // interaction 2: the interceptor impersonates the initiator
    let mut b = Party::new(cfg_b.clone(), sessions.with_responder);
    let m1_forged = first_msg(&params, &label, k_e.value());
    let m2 = b
        .receive(&m1_forged)
        .map_err(session_failed)?
        .ok_or_else(|| AttackError::SessionFailed("responder went silent".into()))?;
    let k_eb = read_single(&params, &m2)?;
    let reply3 = plain_elem_msg(&params, 3, Direction::AToB, pow_mod(&params, k_eb, eve_inv));
    b.receive(&reply3).map_err(session_failed)?;
    let responder_done = b.is_done();
    let responder_outcome = b.into_outcome(if responder_done {
        SessionStatus::Completed
    } else {
        SessionStatus::Aborted(crate::protocol::AbortReason::Channel(
            "responder incomplete".into(),
        ))
    });

    let success = initiator_outcome.exchange_key == Some(stolen)
        && responder_outcome.exchange_key == Some(stolen)
        && responder_done;
    Ok(MitmReport {
        success,
        stolen_key: Some(stolen),
        sessions_observed: 2,
        failure_mode: (!success).then(|| "key extraction failed".into()),
        initiator_outcome,
        responder_outcome,
    })
}

/// Middle-man attempt on the password-encrypted no-key protocol. Without the
/// password the interceptor can only treat ciphertext values as if they were
/// elements; the honest parties end up with unrelated keys and the stolen
/// guess matches nothing. Handing the interceptor the password turns her
/// into a full insider and the attack goes through (sanity inversion).
pub fn mitm_enc_nokey(
    cfg_a: &SessionConfig,
    cfg_b: &SessionConfig,
    eve_exponent: Exponent,
    eve_password: Option<&Password>,
    sessions: MitmSessionIds,
) -> Result<MitmReport, AttackError> {
    expect_variant(cfg_a, cfg_b, Variant::EncNoKey)?;
    let params = cfg_a.params;
    let eve_inv = unit_inverse(&params, eve_exponent)?;
    let variant = Variant::EncNoKey;

    // ciphertext-space exponentiation for the no-password mode: pretend the
    // wire value is an element, exponentiate, map back into cipher range
    let pseudo = |value: Scalar, e: Exponent| -> Scalar {
        let elem = params.element(value + 1).expect("cipher value + 1 is an element");
        pow_mod(&params, elem, e).value() - 1
    };
    let recrypt = |sid: u64, tag: u8, value: Scalar, e: Exponent, out_sid: u64, out_tag: u8| {
        match eve_password {
            Some(pwd) => {
                let ctx = FlowCtx::new(sid, elem_slot(variant, tag, 0));
                let ct = ElemCiphertext { value, context: ctx };
                let elem = decrypt_elem(&params, pwd, ctx, &ct);
                let shifted = pow_mod(&params, elem, e);
                let out_ctx = FlowCtx::new(out_sid, elem_slot(variant, out_tag, 0));
                encrypt_elem(&params, pwd, out_ctx, shifted).value
            }
            None => pseudo(value, e),
        }
    };

    // interaction 1: honest initiator vs interceptor
    let sid_a = sessions.with_initiator;
    let mut a = Party::new(cfg_a.clone(), sid_a);
    let m1 = a.initial_message().map_err(session_failed)?;
    let (label, c1) = read_first_word(&params, &m1)?;
    let reply2 = plain_word_msg(&params, 2, Direction::BToA, recrypt(sid_a, 1, c1, eve_exponent, sid_a, 2));
    let m3 = a
        .receive(&reply2)
        .map_err(session_failed)?
        .ok_or_else(|| AttackError::SessionFailed("initiator went silent".into()))?;
    let c3 = read_single_word(&params, &m3)?;
    // the interceptor's best guess at the transmitted key
    let stolen = match eve_password {
        Some(pwd) => {
            let ctx = FlowCtx::new(sid_a, elem_slot(variant, 3, 0));
            let ct = ElemCiphertext { value: c3, context: ctx };
            let k_e = decrypt_elem(&params, pwd, ctx, &ct);
            pow_mod(&params, k_e, eve_inv)
        }
        None => {
            let pseudo_elem = params.element(c3 + 1).expect("cipher value + 1");
            pow_mod(&params, pseudo_elem, eve_inv)
        }
    };
    let initiator_outcome = a.into_outcome(SessionStatus::Completed);

    // interaction 2: interceptor impersonates the initiator toward B
    let sid_b = sessions.with_responder;
    let mut b = Party::new(cfg_b.clone(), sid_b);
    let forged_word = match eve_password {
        Some(pwd) => {
            let out_ctx = FlowCtx::new(sid_b, elem_slot(variant, 1, 0));
            encrypt_elem(&params, pwd, out_ctx, pow_mod(&params, stolen, eve_exponent)).value
        }
        // without the password the best available move is replaying the
        // ciphertext she took for "the key, wrapped once"
        None => c3,
    };
    let m1_forged = first_msg(&params, &label, forged_word);
    let m2 = b
        .receive(&m1_forged)
        .map_err(session_failed)?
        .ok_or_else(|| AttackError::SessionFailed("responder went silent".into()))?;
    let c2b = read_single_word(&params, &m2)?;
    let reply3 = plain_word_msg(
        &params,
        3,
        Direction::AToB,
        recrypt(sid_b, 2, c2b, eve_inv, sid_b, 3),
    );
    b.receive(&reply3).map_err(session_failed)?;
    let responder_done = b.is_done();
    let responder_outcome = b.into_outcome(if responder_done {
        SessionStatus::Completed
    } else {
        SessionStatus::Aborted(crate::protocol::AbortReason::Channel(
            "responder incomplete".into(),
        ))
    });

    let success = initiator_outcome.exchange_key == Some(stolen);
    let failure_mode = (!success).then(|| {
        "password-encrypted flows: the extracted value does not match the transmitted key"
            .to_string()
    });
    Ok(MitmReport {
        success,
        stolen_key: success.then_some(stolen),
        sessions_observed: 2,
        failure_mode,
        initiator_outcome,
        responder_outcome,
    })
}

fn expect_variant(
    cfg_a: &SessionConfig,
    cfg_b: &SessionConfig,
    want: Variant,
) -> Result<(), AttackError> {
    if cfg_a.variant != want || cfg_b.variant != want {
        return Err(AttackError::WrongVariant(format!(
            "middle-man target must be {want} on both sides"
        )));
    }
    if cfg_a.role != Role::Initiator || cfg_b.role != Role::Responder {
        return Err(AttackError::WrongVariant(
            "expected an initiator/responder pair".into(),
        ));
    }
    Ok(())
}

fn unit_inverse(params: &GroupParams, e: Exponent) -> Result<Exponent, AttackError> {
    if gcd(e.value(), params.n()) != 1 {
        return Err(AttackError::EveExponentNotInvertible);
    }
    Ok(inv_exponent(params, e).expect("gcd checked"))
}

fn session_failed(reason: crate::protocol::AbortReason) -> AttackError {
    AttackError::SessionFailed(format!("honest party aborted: {reason:?}"))
}

fn read_first(params: &GroupParams, msg: &Message) -> Result<(String, GroupElement), AttackError> {
    let mut rd = PayloadReader::new(&msg.payload);
    let label = rd
        .id_label()
        .map_err(|e| AttackError::SessionFailed(e.to_string()))?
        .to_string();
    let elem = rd
        .element(params)
        .map_err(|e| AttackError::SessionFailed(e.to_string()))?;
    Ok((label, elem))
}

fn read_first_word(params: &GroupParams, msg: &Message) -> Result<(String, Scalar), AttackError> {
    let mut rd = PayloadReader::new(&msg.payload);
    let label = rd
        .id_label()
        .map_err(|e| AttackError::SessionFailed(e.to_string()))?
        .to_string();
    let word = rd
        .cipher_value(params)
        .map_err(|e| AttackError::SessionFailed(e.to_string()))?;
    Ok((label, word))
}

fn read_single(params: &GroupParams, msg: &Message) -> Result<GroupElement, AttackError> {
    let mut rd = PayloadReader::new(&msg.payload);
    rd.element(params)
        .map_err(|e| AttackError::SessionFailed(e.to_string()))
}

fn read_single_word(params: &GroupParams, msg: &Message) -> Result<Scalar, AttackError> {
    let mut rd = PayloadReader::new(&msg.payload);
    rd.cipher_value(params)
        .map_err(|e| AttackError::SessionFailed(e.to_string()))
}

fn first_msg(params: &GroupParams, label: &str, word: Scalar) -> Message {
    Message::new(
        1,
        Direction::AToB,
        PayloadWriter::new()
            .id_label(label)
            .group_word(params, word)
            .finish(),
    )
}

fn plain_elem_msg(
    params: &GroupParams,
    tag: u8,
    direction: Direction,
    elem: GroupElement,
) -> Message {
    plain_word_msg(params, tag, direction, elem.value())
}

fn plain_word_msg(params: &GroupParams, tag: u8, direction: Direction, word: Scalar) -> Message {
    Message::new(
        tag,
        direction,
        PayloadWriter::new().group_word(params, word).finish(),
    )
}
