//! Exact rational helpers shared by every module.
//!
//! Small parameters (ε, δ, torus coordinates) live in [`Rational`]; quantities
//! that involve powers, such as `(30/δ)^d`, are evaluated in [`BigRational`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = num_rational::Rational64;
pub type BigRational = num_rational::BigRational;

pub fn big(q: Rational) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn big_int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `base^exp` for a (possibly negative) integer exponent.
pub fn pow_big(base: &BigRational, exp: i64) -> BigRational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

pub fn to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn big_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if d.is_finite() && n.is_finite() => n / d,
        _ => {
            // Scale down both sides until they fit.
            let shift = q.denom().bits().max(q.numer().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::MAX);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::MAX);
            n / d
        }
    }
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::parse(0, format!("not a rational number: {t:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || fp.len() > 15 || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip: i64 = if ip.is_empty() || ip == "-" {
            0
        } else {
            ip.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(fp.len() as u32);
        let frac: i64 = fp.parse().map_err(|_| bad())?;
        let num = ip.abs() * den + frac;
        return Ok(Rational::new(if neg { -num } else { num }, den));
    }
    t.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

/// Distance from `q` to the nearest integer, in `[0, 1/2]`.
pub fn dist_to_int(q: Rational) -> Rational {
    let frac = q - q.floor();
    let other = Rational::one() - frac;
    if frac < other {
        frac
    } else {
        other
    }
}

/// Reduces `q` into `[0, 1)`.
pub fn mod_one(q: Rational) -> Rational {
    q - q.floor()
}

/// Serializes a rational as `[num, den]` in lowest terms.
pub fn ser_pair<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(q.numer())?;
    t.serialize_element(q.denom())?;
    t.end()
}

pub fn ser_opt_pair<S: Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_pair(q, s),
        None => s.serialize_none(),
    }
}

pub fn ser_pairs<S: Serializer>(qs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Pair<'a>(&'a Rational);
    impl serde::Serialize for Pair<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_pair(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(qs.len()))?;
    for q in qs {
        seq.serialize_element(&Pair(q))?;
    }
    seq.end()
}

/// Big rationals are written as `[num, den]`, with decimal strings for parts
/// that do not fit in 64 bits.
pub fn ser_big_pair<S: Serializer>(
    q: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    match q.numer().to_i64() {
        Some(n) => t.serialize_element(&n)?,
        None => t.serialize_element(&q.numer().to_string())?,
    }
    match q.denom().to_i64() {
        Some(d) => t.serialize_element(&d)?,
        None => t.serialize_element(&q.denom().to_string())?,
    }
    t.end()
}

pub fn ser_opt_big_pair<S: Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_big_pair(q, s),
        None => s.serialize_none(),
    }
}

/// `ceil(q)` for a nonnegative big rational, saturating at `usize::MAX`.
pub fn ceil_usize(q: &BigRational) -> usize {
    if q.is_negative() || q.is_zero() {
        return 0;
    }
    let (d, r) = q.numer().div_rem(q.denom());
    let c = if r.is_zero() { d } else { d + 1 };
    c.to_usize().unwrap_or(usize::MAX)
}

/// A positive real of the form `base^(1/root)`, compared exactly by raising
/// both sides to the `root`-th power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub base: BigRational,
    pub root: u32,
}

impl Surd {
    pub fn new(base: BigRational, root: u32) -> Surd {
        assert!(root > 0, "root must be positive");
        assert!(base.is_positive(), "base must be positive");
        Surd { base, root }
    }

    pub fn rational(q: BigRational) -> Surd {
        Surd::new(q, 1)
    }

    /// `self ≤ q`, for any rational `q`.
    pub fn le(&self, q: &BigRational) -> bool {
        !q.is_negative() && self.base <= num_traits::pow(q.clone(), self.root as usize)
    }

    /// `q ≤ self`.
    pub fn ge(&self, q: &BigRational) -> bool {
        q.is_negative() || num_traits::pow(q.clone(), self.root as usize) <= self.base
    }

    /// `self^e` for a nonnegative integer exponent.
    pub fn pow(&self, e: u32) -> Surd {
        Surd::new(num_traits::pow(self.base.clone(), e as usize), self.root)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Surd {
        Surd::new(&self.base * num_traits::pow(q.clone(), self.root as usize), self.root)
    }

    pub fn recip(&self) -> Surd {
        Surd::new(self.base.recip(), self.root)
    }

    /// `⌊self⌋`, by binary search on integer candidates.
    pub fn floor(&self) -> BigInt {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::one();
        while self.ge(&BigRational::from_integer(hi.clone())) {
            hi *= 2;
        }
        // invariant: lo ≤ self < hi
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) / 2;
            if self.ge(&BigRational::from_integer(mid.clone())) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn to_f64(&self) -> f64 {
        let b = big_to_f64(&self.base);
        if b.is_finite() && b > 0.0 {
            b.powf(1.0 / self.root as f64)
        } else {
            let ln = self.base.numer().bits() as f64 - self.base.denom().bits() as f64;
            (ln * std::f64::consts::LN_2 / self.root as f64).exp()
        }
    }

    /// Returns the exact rational value when `base` is a perfect `root`-th power.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = exact_root(self.base.numer(), self.root)?;
        let d = exact_root(self.base.denom(), self.root)?;
        Some(BigRational::new(n, d))
    }
}

fn exact_root(x: &BigInt, k: u32) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *x).then_some(r)
}

impl serde::Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Big<'a>(&'a BigRational);
        impl serde::Serialize for Big<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                ser_big_pair(self.0, s)
            }
        }
        let mut st = s.serialize_struct("Surd", 3)?;
        st.serialize_field("base", &Big(&self.base))?;
        st.serialize_field("root", &self.root)?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/4").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("3").unwrap(), Rational::from_integer(3));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn nearest_integer_distance() {
        assert_eq!(dist_to_int(Rational::new(3, 4)), Rational::new(1, 4));
        assert_eq!(dist_to_int(Rational::new(-1, 3)), Rational::new(1, 3));
        assert_eq!(dist_to_int(Rational::new(7, 5)), Rational::new(2, 5));
        assert_eq!(dist_to_int(Rational::from_integer(2)), Rational::zero());
    }

    #[test]
    fn surd_comparisons() {
        let two = BigRational::from_integer(2.into());
        let sqrt2 = Surd::new(two.clone(), 2);
        assert!(sqrt2.le(&BigRational::new(142.into(), 100.into())));
        assert!(sqrt2.ge(&BigRational::new(141.into(), 100.into())));
        assert!(!sqrt2.le(&BigRational::new(141.into(), 100.into())));
        assert_eq!(sqrt2.mul_rational(&BigRational::from_integer(100.into())).floor(), 141.into());
        assert_eq!(sqrt2.as_rational(), None);
        assert_eq!(Surd::new(BigRational::new(4.into(), 9.into()), 2).as_rational(),
            Some(BigRational::new(2.into(), 3.into())));
        assert!((sqrt2.to_f64() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ceil_of_big() {
        assert_eq!(ceil_usize(&BigRational::new(7.into(), 2.into())), 4);
        assert_eq!(ceil_usize(&BigRational::new(6.into(), 2.into())), 3);
    }
}
