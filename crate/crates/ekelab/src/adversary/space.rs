//! Candidate spaces the attacks enumerate.

use crate::cipher::Password;
use crate::group::pow_mod;
use crate::{GroupElement, GroupParams};

/// The set of candidate passwords, enumerated in lexicographic byte order.
///
/// Exhaustive mode covers the fixed-width little-endian encodings of
/// `0..2^bit_length`; dictionary mode covers an explicit word list. Both
/// support cheap random access so workers can own disjoint index ranges.
#[derive(Debug, Clone)]
pub enum PasswordSpace {
    Exhaustive { bit_length: u32 },
    Dictionary { words: Vec<Vec<u8>>, bit_length: u32 },
}

impl PasswordSpace {
    pub fn exhaustive(bit_length: u32) -> Self {
        assert!(
            (1..=63).contains(&bit_length),
            "exhaustive spaces are desk scale"
        );
        Self::Exhaustive { bit_length }
    }

    /// Builds a dictionary space; entries are sorted lexicographically and
    /// deduplicated so enumeration order is canonical.
    pub fn dictionary(mut words: Vec<Vec<u8>>) -> Self {
        words.retain(|w| !w.is_empty());
        words.sort_unstable();
        words.dedup();
        let bit_length = (words.len().max(2) as f64).log2().ceil() as u32;
        Self::Dictionary { words, bit_length }
    }

    pub fn size(&self) -> u64 {
        match self {
            Self::Exhaustive { bit_length } => 1 << bit_length,
            Self::Dictionary { words, .. } => words.len() as u64,
        }
    }

    pub fn bit_length(&self) -> u32 {
        match self {
            Self::Exhaustive { bit_length } => *bit_length,
            Self::Dictionary { bit_length, .. } => *bit_length,
        }
    }

    /// The `index`-th candidate in lexicographic byte order.
    pub fn candidate(&self, index: u64) -> Password {
        match self {
            Self::Exhaustive { bit_length } => {
                Password::new(lexicographic_encoding(*bit_length, index), *bit_length)
            }
            Self::Dictionary { words, bit_length } => {
                Password::new(words[index as usize].clone(), *bit_length)
            }
        }
    }

    /// Fixed-width little-endian encoding of a value in `[0, 2^bit_length)` —
    /// the canonical byte form of an exhaustive-space password. The session
    /// harness draws true passwords through this, so they are always members.
    pub fn encode_value(bit_length: u32, value: u64) -> Password {
        assert!(value < 1u64 << bit_length);
        let width = byte_width(bit_length);
        Password::new(value.to_le_bytes()[..width].to_vec(), bit_length)
    }
}

fn byte_width(bit_length: u32) -> usize {
    (bit_length as usize).div_ceil(8)
}

/// The `index`-th member of the encoding set in lexicographic order. The
/// first byte of a little-endian encoding is the low byte, so lexicographic
/// position walks a mixed-radix counter with the low byte as the major digit.
fn lexicographic_encoding(bit_length: u32, index: u64) -> Vec<u8> {
    let width = byte_width(bit_length);
    let last_radix = match bit_length as usize - 8 * (width - 1) {
        8 => 256u64,
        partial => 1 << partial,
    };
    let mut bytes = vec![0u8; width];
    let mut rest = index;
    for pos in (0..width).rev() {
        let radix = if pos == width - 1 { last_radix } else { 256 };
        bytes[pos] = (rest % radix) as u8;
        rest /= radix;
    }
    debug_assert_eq!(rest, 0, "index within the space");
    bytes
}

/// A desk-scale enumerable set of candidate exchange keys: a window of the
/// cyclic group around a center element, shifted by a seeded offset so the
/// center sits at an unpredictable position inside it.
pub fn coset_key_space(
    params: &GroupParams,
    center: GroupElement,
    bit_length: u32,
    seed: u64,
) -> Vec<GroupElement> {
    use rand::{Rng, SeedableRng};
    let size = 1u64 << bit_length;
    assert!(
        (size as u128) <= params.n() as u128,
        "key space larger than the group"
    );
    let offset = rand_chacha::ChaCha12Rng::seed_from_u64(seed).gen_range(0..size);
    let g = params.generator();
    // start = center · g^{-offset}; then walk forward multiplying by g
    let back = params.exponent_mod_n(params.n() - offset % params.n());
    let mut cur = crate::group::mul_elem(params, center, pow_mod(params, g, back));
    let mut out = Vec::with_capacity(size as usize);
    for _ in 0..size {
        out.push(cur);
        cur = crate::group::mul_elem(params, cur, g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::gen_params;

    #[test]
    fn exhaustive_space_is_lexicographic_and_complete() {
        let space = PasswordSpace::exhaustive(12);
        assert_eq!(space.size(), 4096);
        let all: Vec<Vec<u8>> = (0..space.size())
            .map(|i| space.candidate(i).bytes().to_vec())
            .collect();
        let mut sorted = all.clone();
        sorted.sort_unstable();
        assert_eq!(all, sorted, "enumeration is lexicographic");
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 4096, "no duplicates");
        // every little-endian encoding of 0..4096 is a member
        for v in [0u64, 1, 255, 256, 4095] {
            let enc = PasswordSpace::encode_value(12, v);
            assert!(all.iter().any(|b| b == enc.bytes()), "{v} missing");
        }
        // 8-bit space: single bytes 0..=255 in order
        let byte_space = PasswordSpace::exhaustive(8);
        assert_eq!(byte_space.candidate(0).bytes(), &[0]);
        assert_eq!(byte_space.candidate(255).bytes(), &[255]);
    }

    #[test]
    fn dictionary_space_is_sorted_and_deduplicated() {
        let space = PasswordSpace::dictionary(vec![
            b"beta".to_vec(),
            b"alpha".to_vec(),
            b"beta".to_vec(),
            b"".to_vec(),
        ]);
        assert_eq!(space.size(), 2);
        assert_eq!(space.candidate(0).bytes(), b"alpha");
        assert_eq!(space.candidate(1).bytes(), b"beta");
    }

    #[test]
    fn coset_key_space_contains_its_center_once() {
        let params: GroupParams = gen_params(20, 3).unwrap();
        let center = params.element(12345 % params.q()).unwrap();
        for seed in 0..5 {
            let space = coset_key_space(&params, center, 10, seed);
            assert_eq!(space.len(), 1024);
            assert_eq!(space.iter().filter(|&&k| k == center).count(), 1);
            let mut dedup: Vec<_> = space.iter().map(|k| k.value()).collect();
            dedup.sort_unstable();
            dedup.dedup();
            assert_eq!(dedup.len(), 1024, "window elements distinct");
        }
    }
}
