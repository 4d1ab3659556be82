//! Exact rational numbers.
//!
//! Thin newtype over [`num_rational::BigRational`]. Values are always kept in
//! lowest terms with a positive denominator, and all arithmetic is exact.
//! Text form is `p/q` (or `p` for integers); terminating decimals such as
//! `0.75` are accepted on input and converted exactly.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer/denom`. Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(v: i64) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Denominator as an unsigned integer (always positive).
    pub fn denom_unsigned(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Fixed-point rendering with `digits` decimals, rounding half to even.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = &self.0 * BigRational::from_integer(scale);
        let (q, r): (BigInt, BigInt) = scaled.numer().div_mod_floor(scaled.denom());
        // r in [0, denom)
        let twice: BigInt = &r * 2;
        let mut q = match twice.cmp(scaled.denom()) {
            Ordering::Less => q,
            Ordering::Greater => q + 1,
            Ordering::Equal => {
                if q.is_even() {
                    q
                } else {
                    q + 1
                }
            }
        };
        let negative = q.is_negative();
        if negative {
            q = -q;
        }
        let mut s = q.to_str_radix(10);
        if digits > 0 {
            if s.len() <= digits {
                s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
            }
            s.insert(s.len() - digits, '.');
        }
        if negative {
            s.insert(0, '-');
        }
        s
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, original: &str) -> Result<BigInt, Error> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid rational `{original}`")));
    }
    BigInt::from_str(digits).map_err(|_| Error::Parse(format!("invalid rational `{original}`")))
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(raw: &str) -> Result<Self, Error> {
        let s = raw.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_int(p.trim(), raw)?;
            let q = parse_int(q.trim(), raw)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{raw}`")));
            }
            return Ok(Rational(BigRational::new(p, q)));
        }
        if let Some((int_part, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("invalid decimal `{raw}`")));
            }
            let negative = int_part.trim_start_matches('+').starts_with('-');
            let int_digits = int_part.trim_start_matches(['+', '-']);
            let int_val = if int_digits.is_empty() {
                BigInt::zero()
            } else {
                parse_int(int_digits, raw)?
            };
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let frac_val = parse_int(frac, raw)?;
            let mut numer = int_val * &scale + frac_val;
            if negative {
                numer = -numer;
            }
            return Ok(Rational(BigRational::new(numer, scale)));
        }
        Ok(Rational(BigRational::from_integer(parse_int(s, raw)?)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl de::Visitor<'_> for Visitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a \"p/q\" or decimal string, or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(BigInt::from(v))))
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }

        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }

        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }

        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl<'a> Product<&'a Rational> for Rational {
    fn product<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// Least common multiple of the denominators of `values`.
pub fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigUint {
    values
        .into_iter()
        .fold(BigUint::one(), |acc, v| acc.lcm(&v.denom_unsigned()))
}

/// Exact conversion of a non-negative integral rational to `BigUint`.
pub fn to_biguint(v: &Rational) -> Option<BigUint> {
    if !v.is_integer() || v.is_negative() {
        return None;
    }
    let (sign, mag) = (v.numer().sign(), v.numer().magnitude());
    match sign {
        Sign::Minus => None,
        _ => Some(mag.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_fractions_in_lowest_terms() {
        assert_eq!(r("6/8").to_string(), "3/4");
        assert_eq!(r("-6/8").to_string(), "-3/4");
        assert_eq!(r("3/-4").to_string(), "-3/4");
        assert_eq!(r(" 4 / 2 ").to_string(), "2");
        assert_eq!(r("0/7").to_string(), "0");
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(r("0.7"), Rational::new(7, 10));
        assert_eq!(r("1.15"), Rational::new(23, 20));
        assert_eq!(r("-0.25"), Rational::new(-1, 4));
        assert_eq!(r(".5"), Rational::new(1, 2));
        assert_eq!(r("2"), Rational::from_integer(2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "a/3", "1.", "1.2.3", "1/2/3", "0x10", "1e3"] {
            assert!(bad.parse::<Rational>().is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn decimal_rendering_rounds_half_even() {
        assert_eq!(r("1/8").to_decimal(2), "0.12");
        assert_eq!(r("3/8").to_decimal(2), "0.38");
        assert_eq!(r("5/8").to_decimal(2), "0.62");
        assert_eq!(r("1/3").to_decimal(3), "0.333");
        assert_eq!(r("2/3").to_decimal(3), "0.667");
        assert_eq!(r("-1/8").to_decimal(2), "-0.12");
        assert_eq!(r("7/2").to_decimal(0), "4");
        assert_eq!(r("5/2").to_decimal(0), "2");
        assert_eq!(r("1/1000").to_decimal(4), "0.0010");
        assert_eq!(r("4171/7260").to_decimal(6), "0.574518");
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/5", "0.25", 3]"#).unwrap();
        assert_eq!(v, vec![r("1/5"), r("1/4"), r("3")]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/5","1/4","3"]"#);
    }

    #[test]
    fn lcm_of_denominators_ignores_integers() {
        let vals = [r("1/8"), r("1/4"), r("1/6"), r("11/24"), r("2")];
        assert_eq!(lcm_of_denominators(&vals), BigUint::from(24u32));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn text_round_trip_is_lowest_terms(p in -10_000i64..10_000, q in 1i64..10_000) {
                let v: Rational = format!("{p}/{q}").parse().unwrap();
                let g = num_integer::gcd(p, q);
                let expect = if q / g == 1 { format!("{}", p / g) } else { format!("{}/{}", p / g, q / g) };
                prop_assert_eq!(v.to_string(), expect);
                let again: Rational = v.to_string().parse().unwrap();
                prop_assert_eq!(again, v);
            }
        }
    }
}
