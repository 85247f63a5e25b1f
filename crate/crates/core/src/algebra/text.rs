//! Canonical text forms.
//!
//! A polynomial of degree below [`DENSE_TEXT_LIMIT`] is written as lowercase
//! hex of its packed coefficients (`0x0` for zero, no leading zero digits).
//! Anything larger is written `sp:` followed by its ascending exponents.
//! A rational is `num/den`. Parsing accepts only the canonical spelling, so
//! text and values are in bijection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::exponent::Exponent;
use super::poly::BinaryPoly;
use super::rational::Rational;
use super::AlgebraError;

pub const DENSE_TEXT_LIMIT: usize = 1 << 16;

fn fits_dense(p: &BinaryPoly) -> bool {
    p.is_zero() || p.small_degree().is_some_and(|d| d < DENSE_TEXT_LIMIT)
}

impl fmt::Display for BinaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if fits_dense(self) {
            let dense = self.to_dense(DENSE_TEXT_LIMIT).expect("checked");
            let words = dense.dense_words().expect("dense");
            let Some((last, rest)) = words.split_last() else {
                return write!(f, "0x0");
            };
            write!(f, "0x{last:x}")?;
            for w in rest.iter().rev() {
                write!(f, "{w:016x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.exponents().iter().map(Exponent::to_string).collect();
            write!(f, "sp:{}", parts.join(","))
        }
    }
}

impl FromStr for BinaryPoly {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| AlgebraError::Parse(format!("{why}: `{s}`"));
        if let Some(hex) = s.strip_prefix("0x") {
            let canonical = !hex.is_empty()
                && hex.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
                && (hex == "0" || !hex.starts_with('0'));
            if !canonical {
                return Err(bad("non-canonical hex polynomial"));
            }
            if hex.len() > DENSE_TEXT_LIMIT / 4 {
                return Err(bad("dense polynomial too long"));
            }
            let mut words = Vec::with_capacity(hex.len().div_ceil(16));
            let bytes = hex.as_bytes();
            let mut end = bytes.len();
            while end > 0 {
                let start = end.saturating_sub(16);
                let chunk = std::str::from_utf8(&bytes[start..end]).expect("ascii");
                words.push(u64::from_str_radix(chunk, 16).map_err(|_| bad("bad hex"))?);
                end = start;
            }
            return Ok(BinaryPoly::from_words(words));
        }
        if let Some(list) = s.strip_prefix("sp:") {
            let mut exps: Vec<Exponent> = Vec::new();
            for part in list.split(',') {
                let e: Exponent = part.parse()?;
                if e.to_string() != part {
                    return Err(bad("non-canonical exponent"));
                }
                if exps.last().is_some_and(|prev| *prev >= e) {
                    return Err(bad("exponents must be strictly ascending"));
                }
                exps.push(e);
            }
            let p = BinaryPoly::sparse_from(exps);
            if fits_dense(&p) {
                return Err(bad("small polynomial must use the hex form"));
            }
            return Ok(p);
        }
        Err(bad("unknown polynomial syntax"))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl FromStr for Rational {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| AlgebraError::Parse(format!("missing `/` in `{s}`")))?;
        let (num, den): (BinaryPoly, BinaryPoly) = (n.parse()?, d.parse()?);
        let r = Rational::new(num.clone(), den.clone())?;
        if *r.num() != num || *r.den() != den {
            return Err(AlgebraError::Parse(format!("rational not in lowest terms: `{s}`")));
        }
        Ok(r)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(BinaryPoly);
string_serde!(Rational);
string_serde!(Exponent);

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn dense_spellings() {
        assert_eq!(BinaryPoly::zero().to_string(), "0x0");
        assert_eq!(BinaryPoly::from_exponents([0, 1]).to_string(), "0x3");
        assert_eq!(BinaryPoly::z_pow(64).to_string(), "0x10000000000000000");
        assert_eq!(Rational::one().to_string(), "0x1/0x1");
    }

    #[test]
    fn sparse_spelling() {
        let k = BigUint::from(1u32) << 200u32;
        let p = BinaryPoly::sparse_from([Exponent::zero(), Exponent::pow2(k)]);
        let s = p.to_string();
        assert!(s.starts_with("sp:0,2^"), "{s}");
        assert_eq!(s.parse::<BinaryPoly>().unwrap(), p);
    }

    #[test]
    fn rejects_non_canonical() {
        for s in ["0x", "0x03", "0xA", "sp:3", "sp:70000,65536", "12", "0x1/0x0"] {
            assert!(s.parse::<BinaryPoly>().is_err() || s.parse::<Rational>().is_err(), "{s}");
        }
        assert!("0x6/0x3".parse::<Rational>().is_err());
        assert!("0x0/0x3".parse::<Rational>().is_err());
    }

    proptest! {
        #[test]
        fn round_trip(words in prop::collection::vec(any::<u64>(), 0..5), d in 1u64..1000) {
            let p = BinaryPoly::from_words(words);
            prop_assert_eq!(p.to_string().parse::<BinaryPoly>().unwrap(), p.clone());
            let r = Rational::new(p, BinaryPoly::from_words(vec![d])).unwrap();
            prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r.clone());
            let json = serde_json::to_string(&r).unwrap();
            prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
        }
    }
}
