//! Elements `a + b*sqrt(D)` of a real or imaginary quadratic field, used for
//! singular points whose coordinates are quadratic irrationals.

use super::ring::{Coeff, Field};
use super::Rat;

/// `d` is the radicand; it is zero for elements created without a field
/// context (`zero`, `one`, `from_rat`) and is adopted from the other operand
/// in binary operations.
#[derive(Clone, Debug)]
pub struct QuadElem {
    pub a: Rat,
    pub b: Rat,
    pub d: Rat,
}

impl PartialEq for QuadElem {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl QuadElem {
    pub fn new(a: Rat, b: Rat, d: Rat) -> Self {
        QuadElem { a, b, d }
    }

    /// `sqrt(d)` itself.
    pub fn root(d: Rat) -> Self {
        QuadElem { a: Rat::zero(), b: Rat::from_integer(1.into()), d }
    }

    fn field(&self, o: &Self) -> Rat {
        if !self.d.is_zero() {
            self.d.clone()
        } else {
            o.d.clone()
        }
    }

    pub fn conj(&self) -> Self {
        QuadElem { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Numeric approximation as a complex number.
    pub fn approx(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(0.0);
        if d >= 0.0 {
            num_complex::Complex64::new(a + b * d.sqrt(), 0.0)
        } else {
            num_complex::Complex64::new(a, b * (-d).sqrt())
        }
    }
}

impl Coeff for QuadElem {
    fn zero() -> Self {
        QuadElem { a: Rat::zero(), b: Rat::zero(), d: Rat::zero() }
    }
    fn one() -> Self {
        QuadElem { a: Rat::from_integer(1.into()), b: Rat::zero(), d: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QuadElem { a: &self.a + &o.a, b: &self.b + &o.b, d: self.field(o) }
    }
    fn sub(&self, o: &Self) -> Self {
        QuadElem { a: &self.a - &o.a, b: &self.b - &o.b, d: self.field(o) }
    }
    fn mul(&self, o: &Self) -> Self {
        let d = self.field(o);
        QuadElem { a: &self.a * &o.a + &self.b * &o.b * &d, b: &self.a * &o.b + &self.b * &o.a, d }
    }
    fn neg(&self) -> Self {
        QuadElem { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
    fn from_rat(r: &Rat) -> Self {
        QuadElem { a: r.clone(), b: Rat::zero(), d: Rat::zero() }
    }
}

impl Field for QuadElem {
    fn inv(&self) -> Self {
        assert!(!Coeff::is_zero(self), "inverse of zero");
        let n = &self.a * &self.a - &self.b * &self.b * &self.d;
        QuadElem { a: &self.a / &n, b: -&self.b / &n, d: self.d.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn sqrt_two_squares_to_two() {
        let s = QuadElem::root(rat(2, 1));
        assert_eq!(s.mul(&s), QuadElem::from_rat(&rat(2, 1)));
        let x = s.add(&QuadElem::one());
        assert!(x.mul(&x.inv()).is_one());
    }
}
