//! Exact rationals and Laurent polynomials in the equivariant parameter `u`.
//!
//! A [`Laurent`] stores only nonzero coefficients, keyed by the exponent of `u`.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `r^e` for an integer exponent; `r` must be nonzero when `e < 0`.
pub fn rat_pow(r: &Rational, e: i64) -> Rational {
    let base = if e < 0 { r.recip() } else { r.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Always `num/den`, e.g. `1/1`, `-1/2`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `n`, `n/d`, with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Result of [`Laurent::is_monomial`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Monomial {
    Zero,
    Term(i64, Rational),
    NotMonomial,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent {
    terms: BTreeMap<i64, Rational>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    /// `c * u^k`.
    pub fn monomial(k: i64, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    pub fn u() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i64) -> Rational {
        self.terms.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monomial(&self) -> Monomial {
        let mut it = self.terms.iter();
        match (it.next(), it.next()) {
            (None, _) => Monomial::Zero,
            (Some((k, c)), None) => Monomial::Term(*k, c.clone()),
            _ => Monomial::NotMonomial,
        }
    }

    pub fn add_term(&mut self, k: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Multiply by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect() }
    }

    /// Inverse of a nonzero monomial; `None` otherwise.
    pub fn inverse_monomial(&self) -> Option<Self> {
        match self.is_monomial() {
            Monomial::Term(k, c) => Some(Self::monomial(-k, c.recip())),
            _ => None,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Integer power; negative exponents need a monomial base.
    pub fn powi(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            self.inverse_monomial().map(|m| m.pow(e.unsigned_abs() as u32))
        }
    }
}

pub fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    a * b
}

pub fn laurent_coeff(a: &Laurent, k: i64) -> Rational {
    a.coeff(k)
}

pub fn laurent_is_monomial(a: &Laurent) -> Monomial {
    a.is_monomial()
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("{}*u^{}", format_rational(c), k)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn add(self, rhs: &'a Laurent) -> Laurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        self += &rhs;
        self
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl AddAssign for Laurent {
    fn add_assign(&mut self, rhs: Laurent) {
        *self += &rhs;
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        -&self
    }
}

impl<'a> Sub<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &'a Laurent) -> Laurent {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(mut self, rhs: Laurent) -> Laurent {
        self -= &rhs;
        self
    }
}

impl SubAssign<&Laurent> for Laurent {
    fn sub_assign(&mut self, rhs: &Laurent) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, -c.clone());
        }
    }
}

impl<'a> Mul<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &'a Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        &self * &rhs
    }
}

impl MulAssign<&Laurent> for Laurent {
    fn mul_assign(&mut self, rhs: &Laurent) {
        *self = &*self * rhs;
    }
}

impl Sum for Laurent {
    fn sum<I: Iterator<Item = Laurent>>(iter: I) -> Laurent {
        let mut out = Laurent::zero();
        for x in iter {
            out += &x;
        }
        out
    }
}

impl Product for Laurent {
    fn product<I: Iterator<Item = Laurent>>(iter: I) -> Laurent {
        let mut out = Laurent::one();
        for x in iter {
            out *= &x;
        }
        out
    }
}

impl From<Rational> for Laurent {
    fn from(c: Rational) -> Self {
        Laurent::constant(c)
    }
}

impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (k, c) in &self.terms {
            map.serialize_entry(&k.to_string(), &format_rational(c))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Laurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LaurentVisitor;
        impl<'de> Visitor<'de> for LaurentVisitor {
            type Value = Laurent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from exponent strings to rational strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Laurent, A::Error> {
                let mut out = Laurent::zero();
                while let Some((k, v)) = map.next_entry::<String, String>()? {
                    let k: i64 = k.trim().parse().map_err(|_| de::Error::custom(format!("bad exponent key {k:?}")))?;
                    let c = parse_rational(&v).map_err(de::Error::custom)?;
                    out.add_term(k, c);
                }
                Ok(out)
            }
        }
        deserializer.deserialize_map(LaurentVisitor)
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(terms: &[(i64, i64, i64)]) -> Laurent {
        Laurent::from_terms(terms.iter().map(|&(k, n, d)| (k, rat(n, d))))
    }

    #[test]
    fn products() {
        assert_eq!(&l(&[(-1, 2, 1)]) * &l(&[(2, 3, 1)]), l(&[(1, 6, 1)]));
        assert!((&l(&[(0, 5, 3)]) * &Laurent::zero()).is_zero());
        let a = l(&[(0, 1, 1), (1, 1, 1)]);
        let b = l(&[(0, 1, 1), (1, -1, 1)]);
        assert_eq!(&a * &b, l(&[(0, 1, 1), (2, -1, 1)]));
    }

    #[test]
    fn coefficients() {
        let a = l(&[(0, -1, 2), (1, 1, 1)]);
        assert_eq!(a.coeff(0), rat(-1, 2));
        assert_eq!(Laurent::zero().coeff(5), int(0));
        assert_eq!(l(&[(1, 6, 1)]).coeff(1), int(6));
    }

    #[test]
    fn monomial_detection() {
        assert_eq!(l(&[(-1, -1, 2)]).is_monomial(), Monomial::Term(-1, rat(-1, 2)));
        assert_eq!(Laurent::zero().is_monomial(), Monomial::Zero);
        assert_eq!(l(&[(0, 1, 1), (1, 1, 1)]).is_monomial(), Monomial::NotMonomial);
    }

    #[test]
    fn text_and_json() {
        let a = l(&[(1, 1, 1), (-2, -3, 4)]);
        assert_eq!(a.to_string(), "-3/4*u^-2 + 1/1*u^1");
        assert_eq!(Laurent::zero().to_string(), "0");
        let js = serde_json::to_string(&l(&[(0, 1, 2)])).unwrap();
        assert_eq!(js, r#"{"0":"1/2"}"#);
        let keys = serde_json::to_string(&l(&[(10, 1, 1), (-3, 1, 1), (2, 1, 1)])).unwrap();
        assert_eq!(keys, r#"{"-3":"1/1","2":"1/1","10":"1/1"}"#);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    fn arb_laurent() -> impl Strategy<Value = Laurent> {
        proptest::collection::vec((-4i64..5, -20i64..21, 1i64..7), 0..5)
            .prop_map(|v| Laurent::from_terms(v.into_iter().map(|(k, n, d)| (k, rat(n, d)))))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn monomial_inverse(a in arb_laurent(), k in -5i64..6, n in 1i64..9, d in 1i64..9) {
            let m = Laurent::monomial(k, rat(n, d));
            let inv = m.inverse_monomial().unwrap();
            prop_assert_eq!(&(&a * &m) * &inv, a);
        }

        #[test]
        fn json_roundtrip(a in arb_laurent()) {
            let s = serde_json::to_string(&a).unwrap();
            let b: Laurent = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
