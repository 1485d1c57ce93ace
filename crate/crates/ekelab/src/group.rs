//! Prime-group arithmetic: parameter generation, modular exponentiation,
//! exponent inversion, and an instrumented classical discrete-log oracle.
//!
//! The generator is required to generate the *full* multiplicative group mod
//! `q`, so every element in `[1, q-1]` has a discrete log and a decryption
//! under a wrong password can never be rejected without actually spending a
//! log computation.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Word;

/// How many candidates the prime search examines before giving up.
const PRIME_SEARCH_BUDGET: u64 = 1_000_000;

/// Miller-Rabin rounds for the prime search.
const MILLER_RABIN_ROUNDS: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("no prime of {bits} bits found within the search budget")]
    NoPrimeFound { bits: u32 },
    #[error("bit length {0} outside the supported range 2..=64")]
    BitLengthOutOfRange(u32),
    #[error("exponent {value} is not invertible mod {modulus}")]
    NotInvertible { value: String, modulus: String },
    #[error("{0} is not a valid group description")]
    InvalidParams(String),
    #[error("value {value} is not a group element mod {q}")]
    InvalidElement { value: String, q: String },
    #[error("value {value} is not an exponent mod {n}")]
    InvalidExponent { value: String, n: String },
}

/// The cyclic group `⟨g⟩ = Z_q^*` together with its order `n = q - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupParams<W: Word> {
    q: W,
    g: W,
    n: W,
}

/// An element of the group, always in `[1, q-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement<W: Word>(W);

/// An exponent mod `n`, always in `[0, n-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent<W: Word>(W);

impl<W: Word> fmt::Display for GroupElement<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl<W: Word> fmt::Display for Exponent<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

// Elements and exponents serialize as decimal strings, like the parameters
// that scope them. They do not deserialize on their own: without the params
// there is nothing to validate against.
impl<W: Word> Serialize for GroupElement<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<W: Word> Serialize for Exponent<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<W: Word> GroupElement<W> {
    pub fn value(self) -> W {
        self.0
    }
}

impl<W: Word> Exponent<W> {
    pub fn value(self) -> W {
        self.0
    }
}

impl<W: Word> GroupParams<W> {
    /// Validates a full parameter triple: `q` prime, `n = q - 1`, and `g` a
    /// generator of the whole group.
    pub fn new(q: W, g: W, n: W) -> Result<Self, GroupError> {
        let one = W::one();
        if q <= W::from_u8(2).unwrap() || n != q - one {
            return Err(GroupError::InvalidParams(format!("q={q}, n={n}")));
        }
        if !is_prime(q, &mut ChaCha12Rng::seed_from_u64(0)) {
            return Err(GroupError::InvalidParams(format!("q={q} is not prime")));
        }
        if g <= one || g >= q {
            return Err(GroupError::InvalidParams(format!("g={g} out of range")));
        }
        let factors = factorize(n);
        if !is_full_order(q, g, n, &factors) {
            return Err(GroupError::InvalidParams(format!(
                "g={g} does not generate the full group mod {q}"
            )));
        }
        Ok(Self { q, g, n })
    }

    pub fn q(&self) -> W {
        self.q
    }

    /// The generator.
    pub fn g(&self) -> W {
        self.g
    }

    /// Group order, `q - 1`.
    pub fn n(&self) -> W {
        self.n
    }

    pub fn generator(&self) -> GroupElement<W> {
        GroupElement(self.g)
    }

    pub fn one(&self) -> GroupElement<W> {
        GroupElement(W::one())
    }

    /// Wraps a raw value as a group element, checking `1 <= v <= q-1`.
    pub fn element(&self, v: W) -> Result<GroupElement<W>, GroupError> {
        if v.is_zero() || v >= self.q {
            return Err(GroupError::InvalidElement {
                value: v.to_string(),
                q: self.q.to_string(),
            });
        }
        Ok(GroupElement(v))
    }

    /// Wraps a raw value as an exponent, checking `0 <= v <= n-1`.
    pub fn exponent(&self, v: W) -> Result<Exponent<W>, GroupError> {
        if v >= self.n {
            return Err(GroupError::InvalidExponent {
                value: v.to_string(),
                n: self.n.to_string(),
            });
        }
        Ok(Exponent(v))
    }

    /// Reduces an arbitrary integer into the exponent ring.
    pub fn exponent_mod_n(&self, v: W) -> Exponent<W> {
        Exponent(v % self.n)
    }

    /// Bytes needed to carry a group element on the wire.
    pub fn element_width(&self) -> usize {
        (self.q.bit_length() as usize).div_ceil(8)
    }

    /// Uniform element of `[1, q-1]`.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> GroupElement<W> {
        GroupElement(rng.gen_range(W::one()..=self.n))
    }

    /// Uniform exponent of `[1, n-1]`; protocols never draw 0.
    pub fn random_nonzero_exponent<R: Rng>(&self, rng: &mut R) -> Exponent<W> {
        Exponent(rng.gen_range(W::one()..self.n))
    }
}

impl<W: Word> Serialize for GroupParams<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            q: String,
            g: String,
            n: String,
        }
        Repr {
            q: self.q.to_string(),
            g: self.g.to_string(),
            n: self.n.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de, W: Word> Deserialize<'de> for GroupParams<W> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            q: String,
            g: String,
            n: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        let parse = |s: &str| {
            s.parse::<W>()
                .map_err(|_| D::Error::custom(format!("bad decimal integer {s:?}")))
        };
        GroupParams::new(parse(&repr.q)?, parse(&repr.g)?, parse(&repr.n)?)
            .map_err(D::Error::custom)
    }
}

/// Counter of discrete-log-oracle invocations.
///
/// Meters are values: attack workers each own one and the partial counts merge
/// by summation, so the total is independent of how the work was split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DlogMeter {
    calls: u64,
}

impl DlogMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    fn tick(&mut self) {
        self.calls += 1;
    }

    /// Folds another meter's count into this one.
    pub fn merge(&mut self, other: &DlogMeter) {
        self.calls += other.calls;
    }
}

/// Generates a fresh group: a random prime `q` of exactly `bit_length` bits
/// and the smallest generator of the full multiplicative group.
///
/// Deterministic for a fixed seed. Desk scale only (`bit_length <= 64`).
pub fn gen_params<W: Word>(bit_length: u32, seed: u64) -> Result<GroupParams<W>, GroupError> {
    if !(2..=64).contains(&bit_length) || bit_length > W::BITS {
        return Err(GroupError::BitLengthOutOfRange(bit_length));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let q = random_prime(bit_length, &mut rng)?;
    let n = q - W::one();
    let factors = factorize(n);
    // Smallest primitive root; existence is guaranteed for a prime modulus.
    let mut g = W::from_u8(2).unwrap();
    while !is_full_order(q, g, n, &factors) {
        g = g + W::one();
    }
    Ok(GroupParams { q, g, n })
}

/// `base^e mod q` by square-and-multiply.
pub fn pow_mod<W: Word>(
    params: &GroupParams<W>,
    base: GroupElement<W>,
    e: Exponent<W>,
) -> GroupElement<W> {
    GroupElement(pow_mod_raw(base.0, e.0, params.q))
}

fn pow_mod_raw<W: Word>(mut base: W, mut e: W, m: W) -> W {
    let mut acc = W::one();
    base = base % m;
    while !e.is_zero() {
        if e & W::one() == W::one() {
            acc = acc.mul_mod(base, m);
        }
        base = base.mul_mod(base, m);
        e = e >> 1;
    }
    acc
}

/// `a^{-1} mod n` when it exists; `NOT_INVERTIBLE` signals the caller to
/// resample.
pub fn inv_exponent<W: Word>(
    params: &GroupParams<W>,
    a: Exponent<W>,
) -> Result<Exponent<W>, GroupError> {
    inv_mod(a.0, params.n).map(Exponent).ok_or_else(|| {
        GroupError::NotInvertible {
            value: a.0.to_string(),
            modulus: params.n.to_string(),
        }
    })
}

/// Extended Euclid in i128, wide enough for any 64-bit modulus.
pub(crate) fn inv_mod<W: Word>(a: W, m: W) -> Option<W> {
    let m_wide = m.to_u64().expect("modulus fits u64") as i128;
    if m_wide == 1 {
        return Some(W::zero());
    }
    let a_wide = a.to_u64().expect("value fits u64") as i128 % m_wide;
    let (mut old_r, mut r) = (a_wide, m_wide);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(W::from_u64(old_s.rem_euclid(m_wide) as u64).unwrap())
}

/// gcd of two words.
pub fn gcd<W: Word>(mut a: W, mut b: W) -> W {
    while !b.is_zero() {
        let t = a % b;
        a = std::mem::replace(&mut b, t);
    }
    a
}

/// Baby-step/giant-step oracle for logs to the base `g`, with the baby table
/// built once and reused across calls. Each call costs about `2·⌈√n⌉` group
/// operations and ticks the meter exactly once, success or not.
pub struct DlogOracle<W: Word> {
    params: GroupParams<W>,
    table: BsgsTable<W>,
}

/// Sorted baby-step table plus the precomputed giant stride.
struct BsgsTable<W: Word> {
    base: W,
    /// `(base^j, j)` for `j = 0..m`, sorted by element, smallest `j` kept.
    baby: Vec<(W, u64)>,
    /// `base^{-m} mod q`.
    stride: W,
    m: u64,
}

impl<W: Word> BsgsTable<W> {
    fn build(params: &GroupParams<W>, base: W) -> Self {
        let n = params.n.to_u64().expect("order fits u64");
        let mut m = (n as f64).sqrt() as u64;
        while (m as u128) * (m as u128) < n as u128 {
            m += 1;
        }
        m = m.max(1);
        let mut baby = Vec::with_capacity(m as usize);
        let mut acc = W::one();
        for j in 0..m {
            baby.push((acc, j));
            acc = acc.mul_mod(base, params.q);
        }
        baby.sort_unstable();
        baby.dedup_by_key(|&mut (e, _)| e); // keep smallest j per element
        // base^{-m} = (base^m)^{q-2} mod q; q prime, so every element inverts.
        let base_m = pow_mod_raw(base, W::from_u64(m).unwrap(), params.q);
        let stride = pow_mod_raw(base_m, params.q - W::from_u8(2).unwrap(), params.q);
        Self {
            base,
            baby,
            stride,
            m,
        }
    }

    /// Smallest `x` in `[0, n)` with `base^x = target`, if any.
    fn solve(&self, params: &GroupParams<W>, target: W) -> Option<u64> {
        let n = params.n.to_u64().expect("order fits u64");
        let giant_steps = n.div_ceil(self.m);
        let mut gamma = target;
        for i in 0..giant_steps {
            if let Ok(pos) = self.baby.binary_search_by_key(&gamma, |&(e, _)| e) {
                let x = i * self.m + self.baby[pos].1;
                if x < n {
                    return Some(x);
                }
            }
            gamma = gamma.mul_mod(self.stride, params.q);
        }
        None
    }
}

impl<W: Word> DlogOracle<W> {
    pub fn new(params: &GroupParams<W>) -> Self {
        Self {
            params: *params,
            table: BsgsTable::build(params, params.g),
        }
    }

    pub fn params(&self) -> &GroupParams<W> {
        &self.params
    }

    /// Discrete log of `target` to the base `g`. Total, because `g` generates
    /// the full group; an internal miss would be a defect worth a panic.
    pub fn dlog(&self, target: GroupElement<W>, meter: &mut DlogMeter) -> Exponent<W> {
        meter.tick();
        let x = self
            .table
            .solve(&self.params, target.0)
            .expect("full-order generator: every element has a discrete log");
        Exponent(W::from_u64(x).unwrap())
    }

    /// Discrete log of `target` to an arbitrary `base`, or `None` when
    /// `target` lies outside the subgroup `base` generates. Costs one oracle
    /// invocation either way.
    pub fn dlog_with_base(
        &self,
        base: GroupElement<W>,
        target: GroupElement<W>,
        meter: &mut DlogMeter,
    ) -> Option<Exponent<W>> {
        meter.tick();
        let table = if base.0 == self.table.base {
            None
        } else {
            Some(BsgsTable::build(&self.params, base.0))
        };
        let table = table.as_ref().unwrap_or(&self.table);
        table
            .solve(&self.params, target.0)
            .map(|x| Exponent(W::from_u64(x).unwrap()))
    }
}

/// One-shot form of [`DlogOracle::dlog`] for callers without a cached table.
pub fn dlog<W: Word>(
    params: &GroupParams<W>,
    target: GroupElement<W>,
    meter: &mut DlogMeter,
) -> Exponent<W> {
    DlogOracle::new(params).dlog(target, meter)
}

/// Multiplicative order of an element, via the factorization of `n`.
pub fn element_order<W: Word>(params: &GroupParams<W>, elem: GroupElement<W>) -> W {
    let mut order = params.n;
    for &(p, _) in &factorize(params.n) {
        while (order % p).is_zero()
            && pow_mod_raw(elem.0, order / p, params.q) == W::one()
        {
            order = order / p;
        }
    }
    order
}

/// Product of two elements mod q.
pub fn mul_elem<W: Word>(
    params: &GroupParams<W>,
    a: GroupElement<W>,
    b: GroupElement<W>,
) -> GroupElement<W> {
    GroupElement(a.0.mul_mod(b.0, params.q))
}

/// Inverse of an element mod q (q prime, so always defined).
pub fn inv_elem<W: Word>(params: &GroupParams<W>, a: GroupElement<W>) -> GroupElement<W> {
    GroupElement(pow_mod_raw(a.0, params.q - W::from_u8(2).unwrap(), params.q))
}

/// Trial-division factorization, fine for the ≤ 64-bit orders used here.
pub fn factorize<W: Word>(mut n: W) -> Vec<(W, u32)> {
    let mut out = Vec::new();
    let two = W::from_u8(2).unwrap();
    let mut push = |p: W, k: u32| {
        if k > 0 {
            out.push((p, k));
        }
    };
    let mut k = 0;
    while (n % two).is_zero() {
        n = n / two;
        k += 1;
    }
    push(two, k);
    let mut d = W::from_u8(3).unwrap();
    while d <= n / d {
        let mut k = 0;
        while (n % d).is_zero() {
            n = n / d;
            k += 1;
        }
        push(d, k);
        d = d + two;
    }
    if n > W::one() {
        push(n, 1);
    }
    out
}

fn is_full_order<W: Word>(q: W, g: W, n: W, factors: &[(W, u32)]) -> bool {
    factors
        .iter()
        .all(|&(p, _)| pow_mod_raw(g, n / p, q) != W::one())
}

fn random_prime<W: Word>(bits: u32, rng: &mut ChaCha12Rng) -> Result<W, GroupError> {
    let one = W::one();
    let lo = one << (bits - 1) as usize;
    let hi = if bits == W::BITS {
        W::max_value()
    } else {
        (one << bits as usize) - one
    };
    for _ in 0..PRIME_SEARCH_BUDGET {
        let candidate = rng.gen_range(lo..=hi) | one;
        if is_prime(candidate, rng) {
            return Ok(candidate);
        }
    }
    Err(GroupError::NoPrimeFound { bits })
}

/// Miller-Rabin with `MILLER_RABIN_ROUNDS` random bases.
fn is_prime<W: Word>(n: W, rng: &mut ChaCha12Rng) -> bool {
    let two = W::from_u8(2).unwrap();
    let three = W::from_u8(3).unwrap();
    if n < two {
        return false;
    }
    if n == two || n == three {
        return true;
    }
    if (n % two).is_zero() {
        return false;
    }
    let n_minus_1 = n - W::one();
    let s = n_minus_1.trailing_zeros();
    let d = n_minus_1 >> s as usize;
    'rounds: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_range(two..n_minus_1);
        let mut x = pow_mod_raw(a, d, n);
        if x == W::one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.mul_mod(x, n);
            if x == n_minus_1 {
                continue 'rounds;
            }
        }
        return false;
    }
    true
}
