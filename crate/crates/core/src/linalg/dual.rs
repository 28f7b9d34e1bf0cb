//! Dual numbers `a + εb` with `ε² = 0`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, FieldElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualScalar {
    /// Unit part.
    pub a: FieldElem,
    /// Coefficient of `ε`.
    pub b: FieldElem,
}

impl DualScalar {
    pub fn new(a: FieldElem, b: FieldElem) -> Self {
        assert_eq!(a.field(), b.field(), "mixed fields in dual scalar");
        DualScalar { a, b }
    }

    pub fn zero(k: Field) -> Self {
        DualScalar::new(k.zero(), k.zero())
    }

    pub fn one(k: Field) -> Self {
        DualScalar::new(k.one(), k.zero())
    }

    pub fn eps(k: Field) -> Self {
        DualScalar::new(k.zero(), k.one())
    }

    /// Embeds `c` as `c + ε·0`.
    pub fn from_unit(c: FieldElem) -> Self {
        let z = c.field().zero();
        DualScalar::new(c, z)
    }

    /// Embeds `c` as `0 + ε·c`.
    pub fn from_eps(c: FieldElem) -> Self {
        let z = c.field().zero();
        DualScalar::new(z, c)
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !self.a.is_zero()
    }

    /// `(a + εb)⁻¹ = a⁻¹ − ε b a⁻²`.
    pub fn inv(&self) -> Option<Self> {
        let ai = self.a.inv()?;
        let b = -(&(&self.b * &ai) * &ai);
        Some(DualScalar::new(ai, b))
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        DualScalar::new(&self.a * c, &self.b * c)
    }
}

impl fmt::Display for DualScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}ε", self.b),
            (false, false) => write!(f, "{}+{}ε", self.a, self.b),
        }
    }
}

impl<'a> Add<&'a DualScalar> for &'a DualScalar {
    type Output = DualScalar;
    fn add(self, rhs: &DualScalar) -> DualScalar {
        DualScalar::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a DualScalar> for &'a DualScalar {
    type Output = DualScalar;
    fn sub(self, rhs: &DualScalar) -> DualScalar {
        DualScalar::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a DualScalar> for &'a DualScalar {
    type Output = DualScalar;
    fn mul(self, rhs: &DualScalar) -> DualScalar {
        let a = &self.a * &rhs.a;
        let b = &(&self.a * &rhs.b) + &(&rhs.a * &self.b);
        DualScalar::new(a, b)
    }
}

impl Neg for &DualScalar {
    type Output = DualScalar;
    fn neg(self) -> DualScalar {
        DualScalar::new(-&self.a, -&self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Field {
        Field::Prime(7)
    }

    fn dual(a: i64, b: i64) -> DualScalar {
        DualScalar::new(k().from_i64(a), k().from_i64(b))
    }

    #[test]
    fn eps_squares_to_zero() {
        let e = DualScalar::eps(k());
        assert!((&e * &e).is_zero());
    }

    #[test]
    fn unit_inverse() {
        let x = dual(3, 5);
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, DualScalar::one(k()));
        assert!(dual(0, 4).inv().is_none());
    }

    proptest! {
        #[test]
        fn commutative_ring_laws(a in 0i64..7, b in 0i64..7, c in 0i64..7,
                                 d in 0i64..7, e in 0i64..7, f in 0i64..7) {
            let (x, y, z) = (dual(a, b), dual(c, d), dual(e, f));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert!((&dual(0, b) * &dual(0, d)).is_zero());
        }
    }
}
