//! The ground field `k`: exact rationals or a prime field GF(p).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::FormatError;

/// Largest prime accepted for GF(p). Keeps products inside `u128` trivially and
/// primality checks cheap.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// Session-level choice of ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Default for Field {
    fn default() -> Self {
        Field::Prime(7)
    }
}

impl Field {
    /// Builds GF(p), rejecting composites and anything above [`MAX_PRIME`].
    pub fn prime(p: u64) -> Result<Self, FormatError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(FormatError::BadField(format!("gf:{p}")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Q(BigRational::zero()),
            Field::Prime(p) => FieldElem::Fp { v: 0, p },
        }
    }

    pub fn one(self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => FieldElem::Fp {
                v: n.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    /// `num / den` as a field element; `None` when `den` vanishes in the field.
    pub fn ratio(self, num: i64, den: i64) -> Option<FieldElem> {
        let d = self.from_i64(den);
        d.inv().map(|d| self.from_i64(num) * d)
    }

    /// Parses the scalar wire format: a decimal integer, or `p/q` for rationals.
    /// Over GF(p) a fraction is accepted when `q` is invertible, and any integer
    /// is reduced to its canonical representative.
    pub fn parse(self, s: &str) -> Result<FieldElem, FormatError> {
        let bad = || FormatError::BadScalar(s.chars().take(64).collect());
        let s = s.trim();
        if s.is_empty() || s.len() > 4096 {
            return Err(bad());
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (parse_int(n).ok_or_else(bad)?, parse_int(d).ok_or_else(bad)?),
            None => (parse_int(s).ok_or_else(bad)?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(bad());
        }
        match self {
            Field::Rational => Ok(FieldElem::Q(BigRational::new(num, den))),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let n = num.mod_floor(&pb).to_u64().ok_or_else(bad)?;
                let d = den.mod_floor(&pb).to_u64().ok_or_else(bad)?;
                let d = FieldElem::Fp { v: d, p }.inv().ok_or_else(bad)?;
                Ok(FieldElem::Fp { v: n, p } * d)
            }
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "gf:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "q" | "Q" => Ok(Field::Rational),
            other => {
                let p = other
                    .strip_prefix("gf:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| FormatError::BadField(other.chars().take(64).collect()))?;
                Field::prime(p)
            }
        }
    }
}

/// An exact element of the configured ground field.
///
/// GF(p) values are kept as canonical representatives in `[0, p)`. Arithmetic
/// between elements of different fields panics: a session uses one field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

impl FieldElem {
    pub fn field(&self) -> Field {
        match self {
            FieldElem::Q(_) => Field::Rational,
            FieldElem::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Q(q) => q.is_zero(),
            FieldElem::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Q(q) => q.is_one(),
            FieldElem::Fp { v, .. } => *v == 1,
        }
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldElem::Q(q) => FieldElem::Q(q.recip()),
            FieldElem::Fp { v, p } => FieldElem::Fp {
                v: pow_mod(*v, p - 2, *p),
                p: *p,
            },
        })
    }

    /// Integer power; negative exponents need an invertible base.
    pub fn pow(&self, e: i64) -> Option<FieldElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field().one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Some(acc)
    }

    fn check_same(&self, other: &FieldElem) {
        if self.field() != other.field() {
            panic!("mixed fields: {} and {}", self.field(), other.field());
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElem::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a + b),
            (FieldElem::Fp { v: a, p }, FieldElem::Fp { v: b, .. }) => FieldElem::Fp {
                v: (a + b) % p,
                p: *p,
            },
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a * b),
            (FieldElem::Fp { v: a, p }, FieldElem::Fp { v: b, .. }) => FieldElem::Fp {
                v: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Q(a) => FieldElem::Q(-a),
            FieldElem::Fp { v, p } => FieldElem::Fp {
                v: (p - v) % p,
                p: *p,
            },
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&FieldElem> for FieldElem {
    fn add_assign(&mut self, rhs: &FieldElem) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&FieldElem> for FieldElem {
    fn sub_assign(&mut self, rhs: &FieldElem) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&FieldElem> for FieldElem {
    fn mul_assign(&mut self, rhs: &FieldElem) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf_canonical_representatives() {
        let k = Field::Prime(7);
        assert_eq!(k.from_i64(-1), FieldElem::Fp { v: 6, p: 7 });
        assert_eq!(k.parse("-1").unwrap(), k.from_i64(6));
        assert_eq!(k.parse("1/2").unwrap(), k.from_i64(4));
        assert!(k.parse("1/7").is_err());
    }

    #[test]
    fn rational_lowest_terms() {
        let q = Field::Rational;
        let x = q.parse("6/-4").unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(q.parse("10/5").unwrap().to_string(), "2");
        assert!(q.parse("1/0").is_err());
        assert!(q.parse("1.5").is_err());
        assert!(q.parse("").is_err());
    }

    #[test]
    fn inverses_and_powers() {
        for k in [Field::Prime(7), Field::Prime(101), Field::Rational] {
            for n in 1..6 {
                let x = k.from_i64(n);
                assert!((&x * &x.inv().unwrap()).is_one());
                assert_eq!(x.pow(-2).unwrap(), x.inv().unwrap().pow(2).unwrap());
            }
            assert!(k.zero().inv().is_none());
        }
    }

    #[test]
    fn field_config_strings() {
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("gf:7".parse::<Field>().unwrap(), Field::Prime(7));
        assert!("gf:8".parse::<Field>().is_err());
        assert!("gf:1".parse::<Field>().is_err());
        assert!("r".parse::<Field>().is_err());
        assert_eq!(Field::Prime(13).to_string(), "gf:13");
    }

    #[test]
    #[should_panic(expected = "mixed fields")]
    fn mixing_fields_panics() {
        let _ = Field::Prime(7).one() + Field::Rational.one();
    }
}
