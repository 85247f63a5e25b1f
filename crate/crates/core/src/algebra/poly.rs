//! Polynomials over F₂ in two representations.
//!
//! `Dense` packs coefficients into 64-bit words (bit `i` of the packed
//! integer is the coefficient of `zⁱ`) and is what the probabilistic designs
//! use. `Sparse` keeps the set of exponents, each an [`Exponent`], so that
//! monomials like `z^(2^K)` with a several-hundred-bit `K` are representable.
//!
//! Operations between two dense operands stay dense; anything touching a
//! sparse operand is carried out on term sets and returns a sparse result.
//! Equality is semantic and ignores the representation.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use super::exponent::Exponent;
use super::AlgebraError;

/// Upper bound on the number of long-division steps on sparse operands.
pub const SPARSE_STEP_LIMIT: usize = 1 << 20;

/// Degree of a polynomial; the zero polynomial sits below every finite degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(Exponent),
}

impl Degree {
    pub fn as_usize(&self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(e) => e.to_usize(),
        }
    }

    pub fn exponent(&self) -> Option<&Exponent> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(e) => Some(e),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone)]
pub enum BinaryPoly {
    /// Packed coefficients; the last word is nonzero (zero is the empty vec).
    Dense(Vec<u64>),
    /// Exponents with coefficient one.
    Sparse(BTreeSet<Exponent>),
}

impl BinaryPoly {
    pub fn zero() -> Self {
        BinaryPoly::Dense(Vec::new())
    }

    pub fn one() -> Self {
        BinaryPoly::Dense(vec![1])
    }

    /// `z^k` stored densely.
    pub fn z_pow(k: usize) -> Self {
        let mut w = vec![0u64; k / 64 + 1];
        w[k / 64] = 1 << (k % 64);
        BinaryPoly::Dense(w)
    }

    /// Sparse monomial `z^e`.
    pub fn monomial(e: Exponent) -> Self {
        BinaryPoly::Sparse(BTreeSet::from([e]))
    }

    /// Dense polynomial whose coefficient vector is the binary expansion of `v`.
    pub fn from_biguint_bits(v: &BigUint) -> Self {
        Self::from_words(v.to_u64_digits())
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        trim(&mut words);
        BinaryPoly::Dense(words)
    }

    /// Dense polynomial from coefficients, index `i` = coefficient of `zⁱ`.
    pub fn from_coeffs(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_words(words)
    }

    /// Dense polynomial with the given exponents (duplicates cancel).
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut words = Vec::new();
        for e in exps {
            if words.len() <= e / 64 {
                words.resize(e / 64 + 1, 0);
            }
            words[e / 64] ^= 1 << (e % 64);
        }
        Self::from_words(words)
    }

    /// Sparse polynomial from exponents (duplicates cancel).
    pub fn sparse_from<I: IntoIterator<Item = Exponent>>(exps: I) -> Self {
        let mut set = BTreeSet::new();
        for e in exps {
            toggle(&mut set, e);
        }
        BinaryPoly::Sparse(set)
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, BinaryPoly::Sparse(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BinaryPoly::Dense(w) => w.is_empty(),
            BinaryPoly::Sparse(s) => s.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            BinaryPoly::Dense(w) => w.len() == 1 && w[0] == 1,
            BinaryPoly::Sparse(s) => s.len() == 1 && s.first().unwrap().is_zero(),
        }
    }

    pub fn term_count(&self) -> usize {
        match self {
            BinaryPoly::Dense(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            BinaryPoly::Sparse(s) => s.len(),
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.term_count() == 1
    }

    pub fn degree(&self) -> Degree {
        match self {
            BinaryPoly::Dense(w) => match dense_degree(w) {
                None => Degree::NegInfinity,
                Some(d) => Degree::Finite(Exponent::from(d)),
            },
            BinaryPoly::Sparse(s) => match s.last() {
                None => Degree::NegInfinity,
                Some(e) => Degree::Finite(e.clone()),
            },
        }
    }

    /// Degree as a machine integer, when finite and small enough.
    pub fn small_degree(&self) -> Option<usize> {
        match self {
            BinaryPoly::Dense(w) => dense_degree(w),
            BinaryPoly::Sparse(_) => self.degree().as_usize(),
        }
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn low_exponent(&self) -> Option<Exponent> {
        match self {
            BinaryPoly::Dense(w) => w
                .iter()
                .position(|&x| x != 0)
                .map(|i| Exponent::from(i * 64 + w[i].trailing_zeros() as usize)),
            BinaryPoly::Sparse(s) => s.first().cloned(),
        }
    }

    /// Coefficient of `zⁱ`.
    pub fn coeff(&self, i: usize) -> bool {
        match self {
            BinaryPoly::Dense(w) => w.get(i / 64).is_some_and(|x| x >> (i % 64) & 1 == 1),
            BinaryPoly::Sparse(s) => s.contains(&Exponent::from(i)),
        }
    }

    /// Exponents of all terms, ascending.
    pub fn exponents(&self) -> Vec<Exponent> {
        match self {
            BinaryPoly::Dense(w) => dense_exponents(w).map(Exponent::from).collect(),
            BinaryPoly::Sparse(s) => s.iter().cloned().collect(),
        }
    }

    pub fn to_sparse(&self) -> BinaryPoly {
        match self {
            BinaryPoly::Dense(w) => BinaryPoly::Sparse(dense_exponents(w).map(Exponent::from).collect()),
            BinaryPoly::Sparse(_) => self.clone(),
        }
    }

    /// Dense form, if every exponent is below `limit`.
    pub fn to_dense(&self, limit: usize) -> Option<BinaryPoly> {
        match self {
            BinaryPoly::Dense(w) => (w.len() * 64 <= limit.next_multiple_of(64)).then(|| self.clone()),
            BinaryPoly::Sparse(s) => {
                let mut exps = Vec::with_capacity(s.len());
                for e in s {
                    let v = e.to_usize().filter(|&v| v < limit)?;
                    exps.push(v);
                }
                Some(Self::from_exponents(exps))
            }
        }
    }

    /// Packed words of a dense polynomial.
    pub fn dense_words(&self) -> Option<&[u64]> {
        match self {
            BinaryPoly::Dense(w) => Some(w),
            BinaryPoly::Sparse(_) => None,
        }
    }

    fn sparse_set(&self) -> BTreeSet<Exponent> {
        match self.to_sparse() {
            BinaryPoly::Sparse(s) => s,
            BinaryPoly::Dense(_) => unreachable!(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (BinaryPoly::Dense(a), BinaryPoly::Dense(b)) => {
                let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                let mut out = long.clone();
                for (o, s) in out.iter_mut().zip(short) {
                    *o ^= s;
                }
                Self::from_words(out)
            }
            _ => {
                let a = self.sparse_set();
                let b = other.sparse_set();
                BinaryPoly::Sparse(a.symmetric_difference(&b).cloned().collect())
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return match (self, other) {
                (BinaryPoly::Dense(_), BinaryPoly::Dense(_)) => Self::zero(),
                _ => BinaryPoly::Sparse(BTreeSet::new()),
            };
        }
        match (self, other) {
            (BinaryPoly::Dense(a), BinaryPoly::Dense(b)) => Self::from_words(dense_mul(a, b)),
            _ => {
                let (a, b) = (self.exponents(), other.exponents());
                let mut out = BTreeSet::new();
                for x in &a {
                    for y in &b {
                        toggle(&mut out, x.add(y));
                    }
                }
                BinaryPoly::Sparse(out)
            }
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: &Exponent) -> Self {
        match (self, k.to_usize()) {
            (BinaryPoly::Dense(w), Some(k)) if k < 1 << 24 => {
                let mut out = vec![0u64; w.len() + k / 64 + 1];
                xor_shifted(&mut out, w, k);
                Self::from_words(out)
            }
            _ => BinaryPoly::Sparse(self.exponents().iter().map(|e| e.add(k)).collect()),
        }
    }

    /// Quotient and remainder, `a = q·b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &Self) -> Result<(Self, Self), AlgebraError> {
        if b.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        match (self, b) {
            (BinaryPoly::Dense(a), BinaryPoly::Dense(d)) => {
                let (q, r) = dense_divmod(a, d);
                Ok((Self::from_words(q), Self::from_words(r)))
            }
            _ => sparse_divmod(&self.sparse_set(), &b.sparse_set()),
        }
    }

    /// Exact quotient; fails if the division leaves a remainder.
    pub fn div_exact(&self, b: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.divmod(b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    pub fn gcd(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.is_zero() && other.is_zero() {
            return Err(AlgebraError::ZeroGcd);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_one() || other.is_one() {
            return Ok(Self::one());
        }
        if let (BinaryPoly::Dense(a), BinaryPoly::Dense(b)) = (self, other) {
            return Ok(Self::from_words(dense_gcd(a.clone(), b.clone())));
        }
        // A monomial z^m shares exactly z^min(m, low(other)) with anything.
        for (m, o) in [(self, other), (other, self)] {
            if m.is_monomial() {
                let e = m.low_exponent().unwrap();
                let low = o.low_exponent().unwrap();
                let k = if e < low { e } else { low };
                return Ok(k.to_usize().map_or_else(|| Self::monomial(k.clone()), Self::z_pow));
            }
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        Ok(a)
    }

    pub fn lcm(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let g = self.gcd(other)?;
        Ok(self.div_exact(&g)?.mul(other))
    }

    /// Representation-independent comparison key used by `Ord`.
    fn cmp_key(&self) -> Vec<Exponent> {
        let mut e = self.exponents();
        e.reverse();
        e
    }
}

impl PartialEq for BinaryPoly {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BinaryPoly::Dense(a), BinaryPoly::Dense(b)) => a == b,
            (BinaryPoly::Sparse(a), BinaryPoly::Sparse(b)) => a == b,
            _ => self.sparse_set() == other.sparse_set(),
        }
    }
}

impl Eq for BinaryPoly {}

/// Orders by degree, then lexicographically on descending exponents.
impl Ord for BinaryPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (BinaryPoly::Dense(a), BinaryPoly::Dense(b)) = (self, other) {
            return a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev()));
        }
        self.cmp_key().cmp(&other.cmp_key())
    }
}

impl PartialOrd for BinaryPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BinaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .cmp_key()
            .into_iter()
            .map(|e| match e.to_u64() {
                Some(0) => "1".to_string(),
                Some(1) => "z".to_string(),
                _ => format!("z^({e})"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl std::ops::Add for &BinaryPoly {
    type Output = BinaryPoly;
    fn add(self, rhs: Self) -> BinaryPoly {
        BinaryPoly::add(self, rhs)
    }
}

impl std::ops::Mul for &BinaryPoly {
    type Output = BinaryPoly;
    fn mul(self, rhs: Self) -> BinaryPoly {
        BinaryPoly::mul(self, rhs)
    }
}

fn toggle(set: &mut BTreeSet<Exponent>, e: Exponent) {
    if !set.remove(&e) {
        set.insert(e);
    }
}

fn trim(w: &mut Vec<u64>) {
    while w.last() == Some(&0) {
        w.pop();
    }
}

fn dense_degree(w: &[u64]) -> Option<usize> {
    let last = *w.last()?;
    Some((w.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
}

fn dense_exponents(w: &[u64]) -> impl Iterator<Item = usize> + '_ {
    w.iter().enumerate().flat_map(|(i, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i * 64 + b)
        })
    })
}

/// `out ^= src · z^shift`; `out` must be long enough.
fn xor_shifted(out: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    if bs == 0 {
        for (i, &s) in src.iter().enumerate() {
            out[i + ws] ^= s;
        }
    } else {
        for (i, &s) in src.iter().enumerate() {
            out[i + ws] ^= s << bs;
            let hi = s >> (64 - bs);
            if hi != 0 {
                out[i + ws + 1] ^= hi;
            }
        }
    }
}

fn dense_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y == 0 {
                continue;
            }
            let (lo, hi) = clmul64(x, y);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
    out
}

/// Carry-less 64×64 → 128-bit product.
#[inline]
fn clmul64(a: u64, b: u64) -> (u64, u64) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: feature presence checked at runtime.
            return unsafe { clmul64_hw(a, b) };
        }
    }
    clmul64_soft(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq", enable = "sse2")]
unsafe fn clmul64_hw(a: u64, b: u64) -> (u64, u64) {
    use std::arch::x86_64::*;
    let va = _mm_set_epi64x(0, a as i64);
    let vb = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128(va, vb, 0);
    let lo = _mm_cvtsi128_si64(r) as u64;
    let hi = _mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r)) as u64;
    (lo, hi)
}

fn clmul64_soft(a: u64, b: u64) -> (u64, u64) {
    let (mut lo, mut hi) = (0u64, 0u64);
    for i in 0..64 {
        if b >> i & 1 == 1 {
            lo ^= a << i;
            if i > 0 {
                hi ^= a >> (64 - i);
            }
        }
    }
    (lo, hi)
}

fn dense_divmod(a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let db = dense_degree(b).expect("nonzero divisor");
    let mut r = a.to_vec();
    let mut q = vec![0u64; a.len().saturating_sub(b.len()) + 1];
    while let Some(dr) = dense_degree(&r) {
        if dr < db {
            break;
        }
        let s = dr - db;
        q[s / 64] |= 1 << (s % 64);
        xor_shifted(&mut r, b, s);
        trim(&mut r);
    }
    (q, r)
}

fn dense_gcd(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let db = dense_degree(&b).unwrap();
        while let Some(da) = dense_degree(&a) {
            if da < db {
                break;
            }
            xor_shifted(&mut a, &b, da - db);
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn sparse_divmod(
    a: &BTreeSet<Exponent>,
    b: &BTreeSet<Exponent>,
) -> Result<(BinaryPoly, BinaryPoly), AlgebraError> {
    let lead_b = b.last().expect("nonzero divisor").clone();
    let mut r = a.clone();
    let mut q = BTreeSet::new();
    let mut steps = 0usize;
    while let Some(lead_r) = r.last().cloned() {
        if lead_r < lead_b {
            break;
        }
        steps += 1;
        if steps > SPARSE_STEP_LIMIT {
            return Err(AlgebraError::WorkLimit);
        }
        let diff = lead_r.checked_sub(&lead_b)?;
        for t in b {
            toggle(&mut r, t.add(&diff));
        }
        toggle(&mut q, diff);
    }
    Ok((BinaryPoly::Sparse(q), BinaryPoly::Sparse(r)))
}
