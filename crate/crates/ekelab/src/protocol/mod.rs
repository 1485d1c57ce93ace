//! Executable two-party state machines for the six protocol variants.

mod engine;
mod transcript;
mod variant;
mod wire;

pub use engine::{
    combine_session_key, derive_exchange_key, nokey_unwrap, run_session,
    run_session_with_channel, stream_key_bytes, AbortReason, Channel, ChallengeCheck, Party,
    PassThrough, Role, SessionConfig, SessionOutcome, SessionRun, SessionStatus,
};
pub use transcript::{Transcript, TranscriptMeta, TranscriptRecord};
pub use variant::{elem_slot, schedule, Direction, FlowSpec, Variant};
pub use wire::{Message, PayloadReader, PayloadWriter, WireError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("session configurations disagree: {0}")]
    ConfigMismatch(String),
    #[error("byte strings of lengths {left} and {right} cannot be combined")]
    LengthMismatch { left: usize, right: usize },
    #[error("transcript does not fit the expected shape: {0}")]
    BadTranscript(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::Password;
    use crate::group::gen_params;
    use crate::GroupParams;

    fn q23() -> GroupParams {
        GroupParams::new(23, 5, 22).unwrap()
    }

    fn pair(
        variant: Variant,
        params: GroupParams,
        seed_a: u64,
        seed_b: u64,
    ) -> (SessionConfig, SessionConfig) {
        let password = Password::from_literal("secret");
        (
            SessionConfig::new(Role::Initiator, params, password.clone(), seed_a, variant),
            SessionConfig::new(Role::Responder, params, password, seed_b, variant),
        )
    }

    const ALL_VARIANTS: [Variant; 8] = [
        Variant::SimplifiedEke,
        Variant::GenericEke,
        Variant::DhEke {
            encrypt_first_flow: false,
        },
        Variant::DhEke {
            encrypt_first_flow: true,
        },
        Variant::EnhancedEke,
        Variant::AEke,
        Variant::NoKey,
        Variant::EncNoKey,
    ];

    #[test]
    fn simplified_eke_worked_example() {
        // q = 23, g = 5, μ_A = 3, μ_B = 4: K = 5^12 mod 23 = 18 on both sides
        let (mut a, mut b) = pair(Variant::SimplifiedEke, q23(), 1, 2);
        a.fixed_exponent = Some(3);
        b.fixed_exponent = Some(4);
        let run = run_session(99, &a, &b).unwrap();
        assert!(run.both_completed());
        assert_eq!(run.initiator.exchange_key.unwrap().value(), 18);
        assert_eq!(run.responder.exchange_key.unwrap().value(), 18);
        assert_eq!(run.transcript.messages().len(), 2);
    }

    #[test]
    fn nokey_worked_example_flows_and_recovery() {
        // q = 23, K = 9, a = 5, b = 7: wire carries 8, 12, 4; B recovers 9
        let (mut a, mut b) = pair(Variant::NoKey, q23(), 1, 2);
        a.fixed_nokey_key = Some(9);
        a.fixed_exponent = Some(5);
        b.fixed_exponent = Some(7);
        let run = run_session(4, &a, &b).unwrap();
        assert!(run.both_completed());
        let values: Vec<u8> = run
            .transcript
            .messages()
            .iter()
            .map(|m| *m.payload.last().unwrap())
            .collect();
        assert_eq!(values, vec![8, 12, 4]);
        assert_eq!(run.responder.exchange_key.unwrap().value(), 9);
        assert_eq!(run.initiator.exchange_key.unwrap().value(), 9);
    }

    #[test]
    fn derive_exchange_key_worked_example() {
        let p = q23();
        // (μ_A = 3, ν_B = 4): 4³ = 64 mod 23 = 18
        let k = derive_exchange_key(&p, p.exponent(3).unwrap(), p.element(4).unwrap());
        assert_eq!(k.value(), 18);
        // secret 1 returns the peer element itself
        let peer = p.element(7).unwrap();
        assert_eq!(derive_exchange_key(&p, p.exponent(1).unwrap(), peer), peer);
        // both orders agree
        let (a, b) = (p.exponent(9).unwrap(), p.exponent(15).unwrap());
        let ga = crate::group::pow_mod(&p, p.generator(), a);
        let gb = crate::group::pow_mod(&p, p.generator(), b);
        assert_eq!(derive_exchange_key(&p, a, gb), derive_exchange_key(&p, b, ga));
    }

    #[test]
    fn combine_session_key_xors() {
        assert_eq!(combine_session_key(&[7, 7], &[7, 7]).unwrap(), vec![0, 0]);
        assert_eq!(
            combine_session_key(&[1, 2, 3], &[0, 0, 0]).unwrap(),
            vec![1, 2, 3]
        );
        // bit-level oracle on a random pair
        let a = [0x5a, 0xc3, 0x99, 0x10];
        let b = [0x0f, 0xf0, 0x55, 0xff];
        let s = combine_session_key(&a, &b).unwrap();
        for i in 0..4 {
            for bit in 0..8 {
                let want = ((a[i] >> bit) & 1) ^ ((b[i] >> bit) & 1);
                assert_eq!((s[i] >> bit) & 1, want);
            }
        }
        assert!(matches!(
            combine_session_key(&[1], &[1, 2]),
            Err(ProtocolError::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn nokey_unwrap_worked_examples_and_round_trip() {
        let p = q23();
        // 12^9 mod 23 = 4
        assert_eq!(
            nokey_unwrap(&p, p.element(12).unwrap(), p.exponent(9).unwrap()).value(),
            4
        );
        // 4^19 mod 23 = 9, the transmitted key
        assert_eq!(
            nokey_unwrap(&p, p.element(4).unwrap(), p.exponent(19).unwrap()).value(),
            9
        );
        // wrap/unwrap round-trips whenever the exponent is a unit
        let params: GroupParams = gen_params(16, 8).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        let mut trials = 0;
        while trials < 1000 {
            let a = rng.gen_range(1..params.n());
            if crate::group::gcd(a, params.n()) != 1 {
                continue;
            }
            trials += 1;
            let x = params.random_element(&mut rng);
            let e = params.exponent(a).unwrap();
            let inv = crate::group::inv_exponent(&params, e).unwrap();
            let wrapped = crate::group::pow_mod(&params, x, e);
            assert_eq!(nokey_unwrap(&params, wrapped, inv), x);
        }
    }

    #[test]
    fn all_variants_complete_with_equal_keys() {
        let params: GroupParams = gen_params(20, 5).unwrap();
        for variant in ALL_VARIANTS {
            for seed in 0..25u64 {
                let (a, b) = pair(variant, params, seed * 2 + 1, seed * 2 + 2);
                let run = run_session(seed, &a, &b).unwrap();
                assert!(run.both_completed(), "{variant} seed {seed}: {run:?}");
                assert_eq!(
                    run.initiator.exchange_key, run.responder.exchange_key,
                    "{variant} seed {seed}"
                );
                assert_eq!(
                    run.initiator.final_key, run.responder.final_key,
                    "{variant} seed {seed}"
                );
                assert_eq!(
                    run.transcript.messages().len(),
                    schedule(variant).len(),
                    "{variant} transcript complete"
                );
                run.transcript.check_shape().unwrap();
            }
        }
    }

    #[test]
    fn sessions_are_deterministic_under_fixed_seeds() {
        let params: GroupParams = gen_params(20, 9).unwrap();
        for variant in ALL_VARIANTS {
            let (a, b) = pair(variant, params, 41, 42);
            let r1 = run_session(7, &a, &b).unwrap();
            let r2 = run_session(7, &a, &b).unwrap();
            assert_eq!(r1.transcript.to_jsonl(), r2.transcript.to_jsonl(), "{variant}");
        }
    }

    #[test]
    fn mismatched_passwords_abort_dh_eke_with_challenge_mismatch() {
        let params: GroupParams = gen_params(20, 3).unwrap();
        let variant = Variant::DhEke {
            encrypt_first_flow: false,
        };
        let mut mismatches = 0;
        for seed in 0..50u64 {
            let (a, mut b) = pair(variant, params, seed * 2 + 1, seed * 2 + 2);
            b.password = Password::from_literal("different");
            let run = run_session(seed, &a, &b).unwrap();
            assert!(!run.both_completed(), "seed {seed}");
            if matches!(
                run.responder.status,
                SessionStatus::Aborted(AbortReason::ChallengeMismatch)
            ) {
                mismatches += 1;
                // the initiator starves once the responder gives up
                assert!(matches!(
                    run.initiator.status,
                    SessionStatus::Aborted(AbortReason::Channel(_))
                ));
            }
        }
        // with 16-byte challenges a wrong password essentially always trips
        // the responder's echo check
        assert_eq!(mismatches, 50);
    }

    #[test]
    fn mismatched_passwords_abort_every_password_variant() {
        let params: GroupParams = gen_params(20, 4).unwrap();
        for variant in [
            Variant::GenericEke,
            Variant::DhEke {
                encrypt_first_flow: true,
            },
            Variant::EnhancedEke,
            Variant::AEke,
        ] {
            let (a, mut b) = pair(variant, params, 11, 12);
            b.password = Password::from_literal("wrong");
            let run = run_session(3, &a, &b).unwrap();
            assert!(!run.both_completed(), "{variant}");
        }
    }

    #[test]
    fn enhanced_eke_wire_never_carries_the_key_shares() {
        use crate::cipher::{stream_decrypt, FlowCtx, StreamCiphertext};
        let params: GroupParams = gen_params(20, 6).unwrap();
        for seed in 0..50u64 {
            let (a, b) = pair(Variant::EnhancedEke, params, seed + 100, seed + 200);
            let run = run_session(seed, &a, &b).unwrap();
            assert!(run.both_completed());
            let s = run.initiator.final_key.clone().unwrap();
            assert_eq!(s, run.responder.final_key.clone().unwrap());

            // with full lab knowledge (the session key), open the stream
            // ciphertexts and pull out the shares themselves
            let k = run.initiator.exchange_key.unwrap();
            let sk = stream_key_bytes(&params, k);
            let open = |tag: u8, bytes: &[u8]| {
                let ctx = FlowCtx::new(seed, tag);
                let ct = StreamCiphertext {
                    bytes: bytes.to_vec(),
                    context: ctx,
                };
                stream_decrypt(&sk, ctx, &ct)
            };
            let cb = 16;
            let flow2 = run.transcript.flow(2).unwrap();
            let s_b = open(2, &flow2.payload[flow2.payload.len() - 2 * cb..])[cb..].to_vec();
            let flow3 = run.transcript.flow(3).unwrap();
            let s_a = open(3, &flow3.payload)[2 * cb..].to_vec();
            assert_eq!(combine_session_key(&s_a, &s_b).unwrap(), s);

            // neither S nor either share ever crosses the wire in the clear
            for secret in [&s, &s_a, &s_b] {
                assert!(!run.transcript.any_payload_contains(secret));
            }
        }
    }

    #[test]
    fn a_eke_signature_accepts_only_the_raw_password() {
        let params: GroupParams = gen_params(20, 2).unwrap();
        // honest run: the initiator holds the password itself
        let (a, b) = pair(Variant::AEke, params, 31, 32);
        let run = run_session(1, &a, &b).unwrap();
        assert!(run.both_completed());
        assert!(run
            .responder
            .challenge_checks
            .iter()
            .any(|c| c.name == "signature" && c.passed));

        // an initiator holding only p = H(P) gets through the element layer
        // but fails the signature check
        let (mut a2, b2) = pair(Variant::AEke, params, 33, 34);
        a2.password = crate::cipher::hash_password(&a2.password);
        a2.holds_prehashed_only = true;
        let run2 = run_session(2, &a2, &b2).unwrap();
        assert!(matches!(
            run2.responder.status,
            SessionStatus::Aborted(AbortReason::ChallengeMismatch)
        ));
        assert!(run2
            .responder
            .challenge_checks
            .iter()
            .any(|c| c.name == "signature" && !c.passed));
    }

    #[test]
    fn nokey_exponents_are_always_units() {
        let params: GroupParams = gen_params(16, 13).unwrap();
        for seed in 0..200u64 {
            let (a, b) = pair(Variant::NoKey, params, seed, seed + 1000);
            let run = run_session(seed, &a, &b).unwrap();
            assert!(run.both_completed(), "seed {seed}");
            assert_eq!(run.initiator.exchange_key, run.responder.exchange_key);
        }
    }

    #[test]
    fn non_invertible_pinned_exponent_aborts() {
        let (mut a, b) = pair(Variant::NoKey, q23(), 1, 2);
        a.fixed_exponent = Some(2); // gcd(2, 22) = 2
        let run = run_session(1, &a, &b).unwrap();
        assert!(matches!(
            run.initiator.status,
            SessionStatus::Aborted(AbortReason::NotInvertible)
        ));
    }

    #[test]
    fn dropped_flow_aborts_with_channel_reason() {
        struct DropFlow(u8);
        impl Channel for DropFlow {
            fn intercept(&mut self, msg: Message) -> Option<Message> {
                (msg.tag != self.0).then_some(msg)
            }
        }
        let params: GroupParams = gen_params(20, 1).unwrap();
        let (a, b) = pair(
            Variant::DhEke {
                encrypt_first_flow: false,
            },
            params,
            5,
            6,
        );
        let run = run_session_with_channel(9, &a, &b, &mut DropFlow(2)).unwrap();
        assert!(matches!(
            run.initiator.status,
            SessionStatus::Aborted(AbortReason::Channel(_))
        ));
        assert!(matches!(
            run.responder.status,
            SessionStatus::Aborted(AbortReason::Channel(_))
        ));
    }

    #[test]
    fn garbled_flow_aborts_with_channel_reason() {
        struct Truncate(u8);
        impl Channel for Truncate {
            fn intercept(&mut self, mut msg: Message) -> Option<Message> {
                if msg.tag == self.0 {
                    msg.payload.pop();
                }
                Some(msg)
            }
        }
        let params: GroupParams = gen_params(20, 1).unwrap();
        let (a, b) = pair(Variant::SimplifiedEke, params, 5, 6);
        let run = run_session_with_channel(9, &a, &b, &mut Truncate(1)).unwrap();
        assert!(matches!(
            run.responder.status,
            SessionStatus::Aborted(AbortReason::Channel(_))
        ));
    }

    #[test]
    fn config_mismatches_are_rejected_up_front() {
        let params: GroupParams = gen_params(20, 1).unwrap();
        let other: GroupParams = gen_params(20, 2).unwrap();
        let (a, mut b) = pair(Variant::NoKey, params, 1, 2);
        b.params = other;
        assert!(run_session(1, &a, &b).is_err());
        let (a, mut b) = pair(Variant::NoKey, params, 1, 2);
        b.variant = Variant::EncNoKey;
        assert!(run_session(1, &a, &b).is_err());
        let (b2, a2) = pair(Variant::NoKey, params, 1, 2);
        assert!(run_session(1, &a2, &b2).is_err()); // roles swapped
    }

    #[test]
    fn responder_sees_the_initiators_claimed_label() {
        let params: GroupParams = gen_params(20, 1).unwrap();
        let (a, b) = pair(Variant::NoKey, params, 3, 4);
        let run = run_session(2, &a, &b).unwrap();
        assert_eq!(run.responder.peer_label.as_deref(), Some("A"));
        // simplified EKE labels both first flows
        let (a, b) = pair(Variant::SimplifiedEke, params, 3, 4);
        let run = run_session(2, &a, &b).unwrap();
        assert_eq!(run.initiator.peer_label.as_deref(), Some("B"));
    }

    #[test]
    fn stream_key_bytes_are_fixed_width_decimal() {
        let p = q23();
        assert_eq!(stream_key_bytes(&p, p.element(18).unwrap()), b"18");
        assert_eq!(stream_key_bytes(&p, p.element(4).unwrap()), b"04");
        let wide: GroupParams = gen_params(20, 1).unwrap();
        let k = stream_key_bytes(&wide, wide.element(7).unwrap());
        assert_eq!(k.len(), wide.n().to_string().len());
        assert!(k.starts_with(b"0"));
    }
}
