//! Scalar substrates the rest of the crate is generic over.
//!
//! Group arithmetic runs on an exact unsigned machine word ([`Word`]), the
//! physical cost model on an IEEE float ([`Real`]). Concrete aliases for both
//! live at the crate root.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{FromPrimitive, PrimInt, ToPrimitive, Unsigned};
use rand::distributions::uniform::SampleUniform;

/// Unsigned word the modular arithmetic is generic over.
///
/// The only piece `num_traits::PrimInt` cannot express is the widening
/// multiply-reduce, so each implementation supplies `mul_mod` with a
/// double-width intermediate. Moduli up to the full word width are legal.
pub trait Word:
    PrimInt
    + Unsigned
    + ToPrimitive
    + FromPrimitive
    + SampleUniform
    + Hash
    + Display
    + Debug
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Number of bits in the word.
    const BITS: u32;

    /// `self * rhs mod m`, exact for any operands below `m`.
    fn mul_mod(self, rhs: Self, m: Self) -> Self;

    /// `self + rhs mod m` without overflowing the word.
    fn add_mod(self, rhs: Self, m: Self) -> Self {
        debug_assert!(self < m && rhs < m);
        if self >= m - rhs {
            self - (m - rhs)
        } else {
            self + rhs
        }
    }

    /// `self - rhs mod m`.
    fn sub_mod(self, rhs: Self, m: Self) -> Self {
        debug_assert!(self < m && rhs < m);
        if self >= rhs {
            self - rhs
        } else {
            m - (rhs - self)
        }
    }

    /// Position of the highest set bit plus one; 0 for zero.
    fn bit_length(self) -> u32 {
        Self::BITS - self.leading_zeros()
    }
}

impl Word for u32 {
    const BITS: u32 = 32;

    fn mul_mod(self, rhs: Self, m: Self) -> Self {
        ((self as u64 * rhs as u64) % m as u64) as u32
    }
}

impl Word for u64 {
    const BITS: u32 = 64;

    fn mul_mod(self, rhs: Self, m: Self) -> Self {
        ((self as u128 * rhs as u128) % m as u128) as u64
    }
}

/// Float the margin calculator is generic over.
pub trait Real: num_traits::Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Shorthand for pulling an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal out of range for this float type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
