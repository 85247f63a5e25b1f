//! Arbitrary-size natural numbers stored as the set of their one-bits.
//!
//! Exponents of the form `2^K` with `K` itself hundreds of bits long cannot
//! be held in any positional integer type, but they are a single set bit at
//! position `K`. Sums of such powers (path delays) stay sparse as long as
//! carries are propagated bit by bit, which is what [`Exponent::add`] does.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::AlgebraError;

/// Longest run of one-bits a subtraction may materialise before giving up.
pub const MAX_BORROW_RUN: u64 = 1 << 16;

/// Natural number represented by its one-bit positions, strictly ascending.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Exponent {
    bits: Vec<BigUint>,
}

impl Exponent {
    pub fn zero() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty()
    }

    /// `2^k`.
    pub fn pow2(k: BigUint) -> Self {
        Self { bits: vec![k] }
    }

    pub fn from_u64(v: u64) -> Self {
        let bits = (0..64u64)
            .filter(|i| v >> i & 1 == 1)
            .map(BigUint::from)
            .collect();
        Self { bits }
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        let bits = (0..v.bits()).filter(|&i| v.bit(i)).map(BigUint::from).collect();
        Self { bits }
    }

    /// Builds from arbitrary positions; duplicates are carried.
    pub fn from_bit_positions<I: IntoIterator<Item = BigUint>>(positions: I) -> Self {
        positions
            .into_iter()
            .fold(Self::zero(), |acc, p| acc.add(&Self::pow2(p)))
    }

    /// One-bit positions, ascending.
    pub fn bit_positions(&self) -> &[BigUint] {
        &self.bits
    }

    pub fn highest_bit(&self) -> Option<&BigUint> {
        self.bits.last()
    }

    /// Positional value, if it fits comfortably in memory (≤ 2^20 bits).
    pub fn to_biguint(&self) -> Option<BigUint> {
        match self.highest_bit() {
            None => Some(BigUint::zero()),
            Some(h) if *h < BigUint::from(1u32 << 20) => {
                let mut v = BigUint::zero();
                for b in &self.bits {
                    v.set_bit(b.to_u64().expect("checked above"), true);
                }
                Some(v)
            }
            Some(_) => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.highest_bit() {
            None => Some(0),
            Some(h) if *h < BigUint::from(64u32) => Some(
                self.bits
                    .iter()
                    .fold(0u64, |acc, b| acc | 1u64 << b.to_u64().unwrap()),
            ),
            Some(_) => None,
        }
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.to_u64().and_then(|v| usize::try_from(v).ok())
    }

    /// Sum with full carry propagation.
    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.bits, &other.bits);
        let mut out = Vec::with_capacity(a.len().max(b.len()) + 1);
        let (mut i, mut j) = (0, 0);
        let mut carry: Option<BigUint> = None;
        loop {
            let mut next: Option<&BigUint> = None;
            for cand in [a.get(i), b.get(j), carry.as_ref()].into_iter().flatten() {
                if next.is_none_or(|n| cand < n) {
                    next = Some(cand);
                }
            }
            let Some(next) = next.cloned() else { break };
            let mut count = 0;
            if a.get(i) == Some(&next) {
                count += 1;
                i += 1;
            }
            if b.get(j) == Some(&next) {
                count += 1;
                j += 1;
            }
            if carry.as_ref() == Some(&next) {
                count += 1;
                carry = None;
            }
            if count % 2 == 1 {
                out.push(next.clone());
            }
            if count >= 2 {
                carry = Some(next + 1u32);
            }
        }
        Self { bits: out }
    }

    /// `self - other`; fails on underflow or when the borrow would
    /// materialise more than [`MAX_BORROW_RUN`] consecutive one-bits.
    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self < other {
            return Err(AlgebraError::ExponentUnderflow);
        }
        let (a, b) = (&self.bits, &other.bits);
        let mut out: Vec<BigUint> = Vec::with_capacity(a.len());
        let (mut i, mut j) = (0, 0);
        let mut borrow: Option<BigUint> = None;
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.min(y).clone(),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            };
            // A pending borrow below `next` turns every gap bit into a one.
            if let Some(p) = borrow.take() {
                if p < next {
                    let run = &next - &p;
                    if run > BigUint::from(MAX_BORROW_RUN) {
                        return Err(AlgebraError::ExponentTooLarge);
                    }
                    let mut q = p;
                    while q < next {
                        out.push(q.clone());
                        q += 1u32;
                    }
                }
                borrow = Some(next.clone());
            }
            let mut digit: i32 = 0;
            if a.get(i) == Some(&next) {
                digit += 1;
                i += 1;
            }
            if b.get(j) == Some(&next) {
                digit -= 1;
                j += 1;
            }
            if borrow.as_ref() == Some(&next) {
                digit -= 1;
                borrow = None;
            }
            if digit < 0 {
                digit += 2;
                borrow = Some(&next + 1u32);
            }
            if digit == 1 {
                out.push(next);
            }
        }
        debug_assert!(borrow.is_none(), "underflow excluded above");
        Ok(Self { bits: out })
    }

    /// `self * m` for a small multiplier, by double-and-add.
    pub fn mul_small(&self, m: u64) -> Self {
        let mut acc = Self::zero();
        let mut shifted = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.add(&shifted);
            }
            shifted = shifted.shl1();
            m >>= 1;
        }
        acc
    }

    fn shl1(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| b + 1u32).collect(),
        }
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        for (x, y) in self.bits.iter().rev().zip(other.bits.iter().rev()) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.bits.len().cmp(&other.bits.len())
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Exponent {
    fn from(v: u64) -> Self {
        Self::from_u64(v)
    }
}

impl From<usize> for Exponent {
    fn from(v: usize) -> Self {
        Self::from_u64(v as u64)
    }
}

/// Decimal when the value has at most 128 bits, otherwise `2^p+2^q+…`
/// with positions in descending order.
impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = self.highest_bit() {
            if *h >= BigUint::from(128u32) {
                let parts: Vec<String> = self.bits.iter().rev().map(|b| format!("2^{b}")).collect();
                return write!(f, "{}", parts.join("+"));
            }
        }
        write!(f, "{}", self.to_biguint().expect("small exponent"))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}

impl FromStr for Exponent {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::Parse(format!("bad exponent `{s}`"));
        if s.contains('^') {
            let mut positions = Vec::new();
            for part in s.split('+') {
                let p = part.strip_prefix("2^").ok_or_else(bad)?;
                positions.push(p.parse::<BigUint>().map_err(|_| bad())?);
            }
            Ok(Self::from_bit_positions(positions))
        } else {
            let v = s.parse::<BigUint>().map_err(|_| bad())?;
            if v.is_zero() {
                return Ok(Self::zero());
            }
            Ok(Self::from_biguint(&v))
        }
    }
}

impl Exponent {
    pub fn one() -> Self {
        Self::pow2(BigUint::zero())
    }

    pub fn is_one(&self) -> bool {
        self.bits.len() == 1 && self.bits[0].is_zero()
    }
}
