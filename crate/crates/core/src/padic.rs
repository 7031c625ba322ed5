//! Exact 2-adic scalar arithmetic.
//!
//! Every quantity the symbol calculus needs is a valuation or an odd unit
//! residue mod 8, and both are exactly computable from a rational number, so
//! scalars are kept as exact rationals and never truncated.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sign `+` or `-`, the multiplicative group of order two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    /// `+` for an even count of minus signs, `-` for an odd count.
    pub fn from_parity(minus_count: usize) -> Sign {
        if minus_count.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn product<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
        signs.into_iter().fold(Sign::Plus, |acc, s| acc * s)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A residue class mod 8. Oddities live here.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod8(u8);

impl Mod8 {
    pub const ZERO: Mod8 = Mod8(0);
    pub const FOUR: Mod8 = Mod8(4);

    pub fn new(value: i64) -> Mod8 {
        Mod8(value.rem_euclid(8) as u8)
    }

    /// Representative in `0..8`.
    pub fn value(self) -> u8 {
        self.0
    }

    /// Representative in `-3..=4`, the range used when printing symbols.
    pub fn signed(self) -> i8 {
        if self.0 > 4 {
            self.0 as i8 - 8
        } else {
            self.0 as i8
        }
    }

    pub fn all() -> impl Iterator<Item = Mod8> {
        (0..8).map(Mod8)
    }

    pub fn sum<I: IntoIterator<Item = Mod8>>(values: I) -> Mod8 {
        values.into_iter().fold(Mod8::ZERO, |acc, v| acc + v)
    }
}

impl Add for Mod8 {
    type Output = Mod8;

    fn add(self, rhs: Mod8) -> Mod8 {
        Mod8((self.0 + rhs.0) % 8)
    }
}

impl Sub for Mod8 {
    type Output = Mod8;

    fn sub(self, rhs: Mod8) -> Mod8 {
        Mod8((self.0 + 8 - rhs.0) % 8)
    }
}

impl Mul<u8> for Mod8 {
    type Output = Mod8;

    fn mul(self, rhs: u8) -> Mod8 {
        Mod8(((self.0 as u16 * rhs as u16) % 8) as u8)
    }
}

impl From<Unit8> for Mod8 {
    fn from(u: Unit8) -> Mod8 {
        Mod8(u.0)
    }
}

impl fmt::Display for Mod8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

/// An odd residue mod 8, stored canonically in `{1, 3, 5, 7}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unit8(u8);

impl Unit8 {
    pub const ONE: Unit8 = Unit8(1);
    pub const THREE: Unit8 = Unit8(3);
    pub const FIVE: Unit8 = Unit8(5);
    pub const SEVEN: Unit8 = Unit8(7);
    pub const ALL: [Unit8; 4] = [Unit8(1), Unit8(3), Unit8(5), Unit8(7)];

    /// `None` for even residues.
    pub fn new(value: i64) -> Option<Unit8> {
        let r = value.rem_euclid(8) as u8;
        (r % 2 == 1).then_some(Unit8(r))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Representative in `{-3, -1, 1, 3}`.
    pub fn signed(self) -> i8 {
        Mod8(self.0).signed()
    }

    /// Every odd residue is its own inverse mod 8.
    pub fn inverse(self) -> Unit8 {
        self
    }

    pub fn legendre(self) -> Sign {
        legendre2(self)
    }
}

impl Mul for Unit8 {
    type Output = Unit8;

    fn mul(self, rhs: Unit8) -> Unit8 {
        Unit8((self.0 * rhs.0) % 8)
    }
}

impl TryFrom<Mod8> for Unit8 {
    type Error = Error;

    fn try_from(m: Mod8) -> Result<Unit8> {
        Unit8::new(m.0 as i64).ok_or(Error::EvenResidue(m.0))
    }
}

impl fmt::Display for Unit8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

/// The Legendre symbol `(u/2)`: `+` for `u = ±1`, `-` for `u = ±3` mod 8.
pub fn legendre2(u: Unit8) -> Sign {
    match u.0 {
        1 | 7 => Sign::Plus,
        _ => Sign::Minus,
    }
}

/// Valuation and odd unit part of a nonzero 2-adic number.
pub trait TwoAdic {
    /// Returns `v` with `x = 2^v * (odd rational)`.
    fn val2(&self) -> Result<i64>;

    /// The odd part of `x` reduced mod 8.
    fn unit_part_mod8(&self) -> Result<Unit8>;

    /// Residue mod `2^k` when `x` is a 2-adic integer (odd denominator), `k <= 63`.
    fn residue_mod_pow2(&self, k: u32) -> Option<u64>;

    /// True for `2^odd * u` with `(u/2) = -`.
    fn is_antisquare(&self) -> Result<bool> {
        let v = self.val2()?;
        Ok(v.rem_euclid(2) == 1 && legendre2(self.unit_part_mod8()?) == Sign::Minus)
    }
}

fn int_val2<T: Integer + Clone>(x: &T) -> i64 {
    let two = T::one() + T::one();
    let mut x = x.clone();
    let mut v = 0;
    while x.is_even() {
        x = x / two.clone();
        v += 1;
    }
    v
}

fn int_odd_mod8<T: Integer + Clone + FromPrimitive + ToPrimitive>(x: &T) -> Unit8 {
    let two = T::one() + T::one();
    let mut x = x.clone();
    while x.is_even() {
        x = x / two.clone();
    }
    let eight = T::from_u8(8).expect("8 fits every integer type");
    let r = x.mod_floor(&eight).to_u8().expect("residue mod 8 fits u8");
    Unit8(r)
}

fn int_mod_pow2<T: Integer + Clone + FromPrimitive + ToPrimitive>(x: &T, k: u32) -> u64 {
    debug_assert!(k <= 63);
    // Reduce 8 bits at a time so that narrow integer types never see 2^k.
    let byte = T::from_u16(256).expect("256 fits the integer type");
    let mut x = x.clone();
    let mut out = 0u64;
    let mut shift = 0;
    while shift < k {
        let (q, r) = x.div_mod_floor(&byte);
        out |= r.to_u64().expect("byte fits u64") << shift;
        x = q;
        shift += 8;
    }
    out & mask(k)
}

/// Inverse of an odd number mod 2^64 by Newton iteration.
fn odd_inverse_u64(a: u64) -> u64 {
    debug_assert!(a % 2 == 1);
    let mut x = a;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

fn mask(k: u32) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

macro_rules! impl_two_adic_int {
    ($($t:ty),*) => {$(
        impl TwoAdic for $t {
            fn val2(&self) -> Result<i64> {
                if self.is_zero() {
                    return Err(Error::ZeroValuation);
                }
                Ok(int_val2(self))
            }

            fn unit_part_mod8(&self) -> Result<Unit8> {
                if self.is_zero() {
                    return Err(Error::ZeroValuation);
                }
                Ok(int_odd_mod8(self))
            }

            fn residue_mod_pow2(&self, k: u32) -> Option<u64> {
                Some(int_mod_pow2(self, k))
            }
        }

        impl TwoAdic for Ratio<$t> {
            fn val2(&self) -> Result<i64> {
                if self.is_zero() {
                    return Err(Error::ZeroValuation);
                }
                Ok(int_val2(self.numer()) - int_val2(self.denom()))
            }

            fn unit_part_mod8(&self) -> Result<Unit8> {
                if self.is_zero() {
                    return Err(Error::ZeroValuation);
                }
                Ok(int_odd_mod8(self.numer()) * int_odd_mod8(self.denom()).inverse())
            }

            fn residue_mod_pow2(&self, k: u32) -> Option<u64> {
                if self.denom().is_even() {
                    return None;
                }
                let n = int_mod_pow2(self.numer(), k);
                let d = int_mod_pow2(self.denom(), k) | 1;
                Some(n.wrapping_mul(odd_inverse_u64(d)) & mask(k))
            }
        }
    )*};
}

impl_two_adic_int!(i64, i128, BigInt);

/// An exact field scalar the decomposition algorithms can run over.
///
/// Implemented for the rational types backed by `i64`, `i128` and `BigInt`.
/// The fixed-width variants are faster but panic on overflow, so the crate
/// default ([`crate::Rational`]) is the arbitrary-precision one.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Num
    + Neg<Output = Self>
    + Signed
    + TwoAdic
    + Send
    + Sync
{
    fn from_int(value: i64) -> Self;

    /// `2^exp`, negative exponents allowed.
    fn pow2(exp: i32) -> Self;

    /// True when the denominator is 1.
    fn is_integer(&self) -> bool;
}

macro_rules! impl_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn from_int(value: i64) -> Self {
                Ratio::from_integer(<$t>::from(value))
            }

            fn pow2(exp: i32) -> Self {
                let two = Ratio::from_integer(<$t>::from(2i64));
                let p = num_traits::pow(two, exp.unsigned_abs() as usize);
                if exp >= 0 {
                    p
                } else {
                    p.recip()
                }
            }

            fn is_integer(&self) -> bool {
                self.denom().is_one()
            }
        }
    )*};
}

impl_scalar!(i64, i128, BigInt);

/// 2-adic valuation of a nonzero scalar.
pub fn val2<T: TwoAdic>(x: &T) -> Result<i64> {
    x.val2()
}

/// Odd unit part of a nonzero scalar, mod 8.
pub fn unit_part_mod8<T: TwoAdic>(x: &T) -> Result<Unit8> {
    x.unit_part_mod8()
}

/// Antisquare test `x = 2^odd * u`, `(u/2) = -`.
pub fn is_antisquare<T: TwoAdic>(x: &T) -> Result<bool> {
    x.is_antisquare()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(val2(&q(12, 1)).unwrap(), 2);
        assert_eq!(val2(&q(1, 1)).unwrap(), 0);
        assert_eq!(val2(&q(3, 2)).unwrap(), -1);
        assert!(matches!(val2(&q(0, 1)), Err(Error::ZeroValuation)));
    }

    #[test]
    fn unit_part_examples() {
        assert_eq!(unit_part_mod8(&q(12, 1)).unwrap(), Unit8::THREE);
        assert_eq!(unit_part_mod8(&q(1, 3)).unwrap(), Unit8::THREE);
        assert_eq!(unit_part_mod8(&q(-2, 1)).unwrap(), Unit8::SEVEN);
        assert!(unit_part_mod8(&q(0, 5)).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre2(Unit8::SEVEN), Sign::Plus);
        assert_eq!(legendre2(Unit8::THREE), Sign::Minus);
        assert_eq!(legendre2(Unit8::ONE), Sign::Plus);
        assert_eq!(legendre2(Unit8::FIVE), Sign::Minus);
    }

    #[test]
    fn antisquare_examples() {
        assert!(is_antisquare(&q(6, 1)).unwrap());
        assert!(!is_antisquare(&q(2, 1)).unwrap());
        assert!(!is_antisquare(&q(12, 1)).unwrap());
        assert!(is_antisquare(&q(0, 1)).is_err());
    }

    #[test]
    fn fixed_width_and_big_agree() {
        let small = Ratio::<i64>::new(-40, 7);
        let big = q(-40, 7);
        assert_eq!(small.val2().unwrap(), big.val2().unwrap());
        assert_eq!(
            small.unit_part_mod8().unwrap(),
            big.unit_part_mod8().unwrap()
        );
        assert_eq!(small.residue_mod_pow2(10), big.residue_mod_pow2(10));
    }

    #[test]
    fn residues_of_two_adic_integers() {
        // 1/3 * 3 = 1 mod 2^k
        let third = q(1, 3).residue_mod_pow2(16).unwrap();
        assert_eq!(third.wrapping_mul(3) & 0xffff, 1);
        assert_eq!(q(-1, 1).residue_mod_pow2(4), Some(15));
        assert_eq!(q(1, 2).residue_mod_pow2(4), None);
        assert_eq!(BigInt::from(-3).residue_mod_pow2(3), Some(5));
    }

    #[test]
    fn mod8_printing_range() {
        assert_eq!(Mod8::new(5).signed(), -3);
        assert_eq!(Mod8::new(4).signed(), 4);
        assert_eq!(Mod8::new(-1).value(), 7);
        assert_eq!(Unit8::new(4), None);
    }

    fn nonzero() -> impl Strategy<Value = Rational> {
        (prop_oneof![-5000i64..=-1, 1i64..=5000], 1i64..=5000).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn valuation_and_unit_are_multiplicative(x in nonzero(), y in nonzero()) {
            let xy = x.clone() * y.clone();
            prop_assert_eq!(xy.val2().unwrap(), x.val2().unwrap() + y.val2().unwrap());
            prop_assert_eq!(
                xy.unit_part_mod8().unwrap(),
                x.unit_part_mod8().unwrap() * y.unit_part_mod8().unwrap()
            );
        }

        #[test]
        fn legendre_is_a_homomorphism(a in 0usize..4, b in 0usize..4) {
            let (u, v) = (Unit8::ALL[a], Unit8::ALL[b]);
            prop_assert_eq!(legendre2(u * v), legendre2(u) * legendre2(v));
        }

        #[test]
        fn antisquare_is_square_invariant(x in nonzero(), s in nonzero()) {
            let scaled = x.clone() * s.clone() * s;
            prop_assert_eq!(x.is_antisquare().unwrap(), scaled.is_antisquare().unwrap());
        }
    }
}
