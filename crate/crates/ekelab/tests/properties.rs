//! Property tests for the library's structural invariants.

use proptest::prelude::*;

use ekelab::adversary::PasswordSpace;
use ekelab::cipher::{
    decrypt_elem, encrypt_elem, stream_decrypt, stream_encrypt, FlowCtx, Password,
};
use ekelab::group::{gen_params, inv_exponent, pow_mod, DlogMeter, DlogOracle};
use ekelab::margin::{evaluate_margin, ion_trap_profile, AdversaryBudget};
use ekelab::protocol::{combine_session_key, Direction, Message};
use ekelab::GroupParams;

/// A small pool of groups so each case does not regenerate primes.
fn group_pool() -> Vec<GroupParams> {
    [(12, 1u64), (14, 2), (16, 3), (18, 4)]
        .iter()
        .map(|&(bits, seed)| gen_params(bits, seed).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dlog_inverts_pow_mod(group_index in 0usize..4, e_raw in 0u64..u64::MAX) {
        let params = group_pool()[group_index];
        let e = params.exponent_mod_n(e_raw);
        let elem = pow_mod(&params, params.generator(), e);
        let oracle = DlogOracle::new(&params);
        let mut meter = DlogMeter::new();
        prop_assert_eq!(oracle.dlog(elem, &mut meter), e);
        prop_assert_eq!(meter.calls(), 1);
    }

    #[test]
    fn dh_exponentiation_commutes(group_index in 0usize..4, a_raw in 1u64..u64::MAX, b_raw in 1u64..u64::MAX) {
        let params = group_pool()[group_index];
        let a = params.exponent_mod_n(a_raw);
        let b = params.exponent_mod_n(b_raw);
        let ga = pow_mod(&params, params.generator(), a);
        let gb = pow_mod(&params, params.generator(), b);
        prop_assert_eq!(pow_mod(&params, ga, b), pow_mod(&params, gb, a));
    }

    #[test]
    fn exponent_inverse_multiplies_to_one(group_index in 0usize..4, a_raw in 1u64..u64::MAX) {
        let params = group_pool()[group_index];
        let a = params.exponent_mod_n(a_raw);
        if let Ok(inv) = inv_exponent(&params, a) {
            let product = (a.value() as u128 * inv.value() as u128 % params.n() as u128) as u64;
            prop_assert_eq!(product, 1);
        }
    }

    #[test]
    fn element_cipher_round_trips_and_stays_closed(
        group_index in 0usize..4,
        pw in proptest::collection::vec(any::<u8>(), 1..16),
        wrong_pw in proptest::collection::vec(any::<u8>(), 1..16),
        session in any::<u64>(),
        slot in any::<u8>(),
        x_raw in 1u64..u64::MAX,
    ) {
        let params = group_pool()[group_index];
        let x = params.element(1 + x_raw % params.n()).unwrap();
        let password = Password::new(pw.clone(), 16);
        let ctx = FlowCtx::new(session, slot);
        let ct = encrypt_elem(&params, &password, ctx, x);
        prop_assert!(ct.value < params.n());
        prop_assert_eq!(decrypt_elem(&params, &password, ctx, &ct), x);
        // any other password still lands inside the group
        let other = Password::new(wrong_pw, 16);
        let y = decrypt_elem(&params, &other, ctx, &ct);
        prop_assert!(y.value() >= 1 && y.value() <= params.n());
    }

    #[test]
    fn stream_cipher_round_trips(
        key in proptest::collection::vec(any::<u8>(), 1..24),
        m in proptest::collection::vec(any::<u8>(), 0..200),
        session in any::<u64>(),
        slot in any::<u8>(),
    ) {
        let ctx = FlowCtx::new(session, slot);
        let ct = stream_encrypt(&key, ctx, &m);
        prop_assert_eq!(ct.bytes.len(), m.len());
        prop_assert_eq!(stream_decrypt(&key, ctx, &ct), m);
    }

    #[test]
    fn xor_combination_is_involutive(
        (a, b) in (0usize..64).prop_flat_map(|len| (
            proptest::collection::vec(any::<u8>(), len..=len),
            proptest::collection::vec(any::<u8>(), len..=len),
        )),
    ) {
        let s = combine_session_key(&a, &b).unwrap();
        prop_assert_eq!(combine_session_key(&s, &b).unwrap(), a.clone());
        prop_assert_eq!(combine_session_key(&s, &a).unwrap(), b);
    }

    #[test]
    fn framing_round_trips(tag in any::<u8>(), payload in proptest::collection::vec(any::<u8>(), 0..300)) {
        let msg = Message::new(tag, Direction::AToB, payload);
        let framed = msg.frame();
        let (back, rest) = Message::unframe(&framed, Direction::AToB).unwrap();
        prop_assert_eq!(back, msg);
        prop_assert!(rest.is_empty());
    }

    #[test]
    fn exhaustive_space_enumeration_matches_encoding_set(bits in 1u32..14, index_seed in any::<u64>()) {
        let space = PasswordSpace::exhaustive(bits);
        let index = index_seed % space.size();
        let candidate = space.candidate(index);
        prop_assert_eq!(candidate.bytes().len(), (bits as usize).div_ceil(8));
        // the candidate decodes to a value inside the space
        let mut value = 0u64;
        for (i, &b) in candidate.bytes().iter().enumerate() {
            value |= (b as u64) << (8 * i);
        }
        prop_assert!(value < (1u64 << bits));
        // and the canonical encoding of that value is the candidate itself
        let canonical = PasswordSpace::encode_value(bits, value);
        prop_assert_eq!(canonical.bytes(), candidate.bytes());
    }

    #[test]
    fn meter_totals_are_split_invariant(group_index in 0usize..4, split in 1u64..40, total in 1u64..40) {
        let params = group_pool()[group_index];
        let oracle = DlogOracle::new(&params);
        let total = total.max(split);
        // one worker doing everything
        let mut single = DlogMeter::new();
        for e in 0..total {
            oracle.dlog(pow_mod(&params, params.generator(), params.exponent_mod_n(e)), &mut single);
        }
        // two workers splitting at an arbitrary point, merged
        let mut left = DlogMeter::new();
        let mut right = DlogMeter::new();
        for e in 0..split.min(total) {
            oracle.dlog(pow_mod(&params, params.generator(), params.exponent_mod_n(e)), &mut left);
        }
        for e in split.min(total)..total {
            oracle.dlog(pow_mod(&params, params.generator(), params.exponent_mod_n(e)), &mut right);
        }
        left.merge(&right);
        prop_assert_eq!(left.calls(), single.calls());
    }

    #[test]
    fn required_bits_monotone_in_machines_and_cost(
        machines_a in 1u32..1000, machines_b in 1u32..1000,
    ) {
        let (lo, hi) = if machines_a <= machines_b {
            (machines_a, machines_b)
        } else {
            (machines_b, machines_a)
        };
        let profile = ion_trap_profile::<f64>();
        let bits_at = |count: u32, dlogs: u32| {
            evaluate_margin(
                &profile,
                &AdversaryBudget::over_hundred_years(count as f64, dlogs),
            )
            .unwrap()
            .required_bits
        };
        // non-decreasing in the fleet size
        prop_assert!(bits_at(lo, 1) <= bits_at(hi, 1));
        // non-increasing in the per-guess oracle cost
        prop_assert!(bits_at(lo, 2) <= bits_at(lo, 1));
    }
}
