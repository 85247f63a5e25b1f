use std::fmt;

use super::poly::{BinaryPoly, Degree};
use super::AlgebraError;

/// Element of F₂(z), kept as `num/den` with `gcd(num, den) = 1`.
/// Zero is always `0/1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational {
    num: BinaryPoly,
    den: BinaryPoly,
}

impl Rational {
    pub fn new(num: BinaryPoly, den: BinaryPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: BinaryPoly, den: BinaryPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return Self { num, den: BinaryPoly::one() };
        }
        let g = num.gcd(&den).expect("den is nonzero");
        if g.is_one() {
            return Self { num, den };
        }
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: BinaryPoly::zero(), den: BinaryPoly::one() }
    }

    pub fn one() -> Self {
        Self { num: BinaryPoly::one(), den: BinaryPoly::one() }
    }

    pub fn from_poly(p: BinaryPoly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        Self { num: p, den: BinaryPoly::one() }
    }

    pub fn num(&self) -> &BinaryPoly {
        &self.num
    }

    pub fn den(&self) -> &BinaryPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Larger of the numerator and denominator degrees.
    pub fn degree(&self) -> Degree {
        self.num.degree().max(self.den.degree())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::reduce(num, self.den.mul(&other.den))
    }

    /// Same as `add`; subtraction coincides with addition in characteristic 2.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(other)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // Cross-cancel first so the products stay small.
        let g1 = self.num.gcd(&other.den).expect("nonzero");
        let g2 = other.num.gcd(&self.den).expect("nonzero");
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        Self { num: n1.mul(&n2), den: d1.mul(&d2) }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::InverseOfZero);
        }
        Ok(Self { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn mul_poly(&self, p: &BinaryPoly) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }
}

impl From<BinaryPoly> for Rational {
    fn from(p: BinaryPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(bits: u64) -> BinaryPoly {
        BinaryPoly::from_words(vec![bits])
    }

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn examples() {
        // z/(1+z) + z/(1+z) = 0
        assert!(r(0b10, 0b11).add(&r(0b10, 0b11)).is_zero());
        let z2 = r(0b100, 1);
        let inv = z2.inv().unwrap();
        assert_eq!(inv, r(1, 0b100));
        assert!(inv.mul(&z2).is_one());
        assert!(r(0b11, 0b10).mul(&r(0b10, 0b11)).is_one());
        assert_eq!(Rational::zero().inv(), Err(AlgebraError::InverseOfZero));
        assert_eq!(Rational::new(p(1), BinaryPoly::zero()), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn canonical_zero_and_reduction() {
        assert_eq!(r(0, 0b111), Rational::zero());
        // (z²+z)/(z+1) = z
        assert_eq!(r(0b110, 0b11), r(0b10, 1));
    }

    fn arb() -> impl Strategy<Value = Rational> {
        (0u64..512, 1u64..512).prop_map(|(n, d)| r(n, d))
    }

    fn canonical(x: &Rational) -> bool {
        !x.den().is_zero()
            && x.num().gcd(x.den()).unwrap().is_one()
            && (!x.is_zero() || x.den().is_one())
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&Rational::zero()), a.clone());
            prop_assert_eq!(a.mul(&Rational::one()), a.clone());
            prop_assert!(a.add(&a).is_zero());
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            }
            for x in [a.add(&b), a.mul(&b), a.mul(&c).add(&b)] {
                prop_assert!(canonical(&x));
            }
        }
    }
}
