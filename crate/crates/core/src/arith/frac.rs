//! Rational functions in the parameter symbols.

use super::ring::{Coeff, Field};
use super::{MPoly, Rat};

/// `num/den` in lowest terms. The denominator is a primitive integer
/// polynomial with positive leading coefficient, so equal values have equal
/// representations.
#[derive(Clone, PartialEq, Debug)]
pub struct FracElem {
    pub num: MPoly,
    pub den: MPoly,
}

impl FracElem {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::from_poly(MPoly::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap()) };
        Self::normalized(num, den)
    }

    /// Assumes `num` and `den` are already coprime.
    fn normalized(num: MPoly, den: MPoly) -> Self {
        let (c, den) = den.primitive();
        let num = if c.is_one() { num } else { num.scale(&c.recip()) };
        FracElem { num, den }
    }

    pub fn from_poly(p: MPoly) -> Self {
        FracElem { num: p, den: MPoly::one() }
    }

    pub fn from_rat_value(r: Rat) -> Self {
        Self::from_poly(MPoly::from_rat(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(MPoly::from_int(n))
    }

    pub fn var(v: usize) -> Self {
        Self::from_poly(MPoly::var(v))
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational constant, if it is one.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.constant_term() / self.den.constant_term())
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn neg_ref(&self) -> Self {
        FracElem { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut v = self.num.vars();
        for x in self.den.vars() {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_unstable();
        v
    }

    /// Substitutes fractions for some variables.
    pub fn substitute(&self, images: &dyn Fn(usize) -> Option<FracElem>) -> Self {
        subst_poly(&self.num, images).div(&subst_poly(&self.den, images))
    }

    /// Evaluates at rational values; `None` if the denominator vanishes.
    pub fn eval_rat(&self, values: &[Rat]) -> Option<Rat> {
        let d = self.den.eval_all(values);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_all(values) / d)
        }
    }

    pub fn derivative(&self, v: usize) -> Self {
        let n = self.num.derivative(v).mul(&self.den).sub(&self.num.mul(&self.den.derivative(v)));
        FracElem::new(n, self.den.mul(&self.den))
    }

    /// Square root when numerator and denominator are both perfect squares
    /// (up to a common rational factor).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (c, prim) = self.num.primitive();
        // num/den = c * prim / den; move c into a square-free-friendly form.
        let ps = prim.sqrt()?;
        let ds = self.den.sqrt()?;
        let cs = super::mpoly::rat_sqrt(&c)?;
        Some(FracElem::new(ps.scale(&cs), ds))
    }
}

fn subst_poly(p: &MPoly, images: &dyn Fn(usize) -> Option<FracElem>) -> FracElem {
    if p.vars().iter().all(|&v| images(v).is_none()) {
        return FracElem::from_poly(p.clone());
    }
    let mut acc = FracElem::zero();
    let mut cache: std::collections::BTreeMap<(usize, u32), FracElem> = Default::default();
    for (m, c) in p.terms() {
        let mut t = FracElem::from_rat_value(c.clone());
        let mut kept = super::Monomial::one();
        for (v, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            match images(v) {
                Some(img) => {
                    let pw = cache.entry((v, e)).or_insert_with(|| Coeff::pow(&img, e)).clone();
                    t = t.mul(&pw);
                }
                None => kept = kept.mul(&super::Monomial::var(v, e)),
            }
        }
        t = t.mul(&FracElem::from_poly(MPoly::monomial(kept, Rat::one())));
        acc = acc.add(&t);
    }
    acc
}

impl Coeff for FracElem {
    fn zero() -> Self {
        Self::from_poly(MPoly::zero())
    }
    fn one() -> Self {
        Self::from_poly(MPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }
    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return Self::from_poly(self.num.add(&other.num));
            }
            return FracElem::new(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_one() {
            return Self::normalized(self.num.mul(&other.den).add(&other.num), other.den.clone());
        }
        if other.den.is_one() {
            return Self::normalized(other.num.mul(&self.den).add(&self.num), self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let (sd, od) = (self.den.exact_div(&g).unwrap(), other.den.exact_div(&g).unwrap());
        let num = self.num.mul(&od).add(&other.num.mul(&sd));
        FracElem::new(num, sd.mul(&other.den))
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg_ref())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // Cross-cancel so no gcd of the full products is needed.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = other.den.exact_div(&g1).unwrap();
        let n2 = other.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        Self::normalized(n1.mul(&n2), d1.mul(&d2))
    }
    fn neg(&self) -> Self {
        self.neg_ref()
    }
    fn from_rat(r: &Rat) -> Self {
        Self::from_rat_value(r.clone())
    }
}

impl Field for FracElem {
    fn inv(&self) -> Self {
        assert!(!self.num.is_zero(), "inverse of zero fraction");
        Self::normalized(self.den.clone(), self.num.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn x() -> FracElem {
        FracElem::var(0)
    }
    fn y() -> FracElem {
        FracElem::var(1)
    }

    #[test]
    fn reduces_to_lowest_terms() {
        let n = MPoly::var(0).mul(&MPoly::var(0)).sub(&MPoly::var(1).mul(&MPoly::var(1)));
        let d = MPoly::var(0).sub(&MPoly::var(1)).scale(&rat(2, 1));
        let f = FracElem::new(n, d);
        assert!(f.den.is_one());
        assert_eq!(f.num, MPoly::var(0).add(&MPoly::var(1)).scale(&rat(1, 2)));
    }

    #[test]
    fn denominator_sign_normalized() {
        let f = FracElem::new(MPoly::one(), MPoly::var(0).neg());
        assert_eq!(f.den, MPoly::var(0));
        assert_eq!(f.num, MPoly::from_int(-1));
    }

    #[test]
    fn inverse_times_self_is_one() {
        let f = x().add(&y()).div(&x().sub(&FracElem::from_int(3)));
        assert!(f.mul(&f.inv()).is_one());
    }

    fn small_frac() -> impl Strategy<Value = FracElem> {
        (-4i64..5, -4i64..5, 1i64..4, -3i64..4).prop_map(|(a, b, c, d)| {
            let num = MPoly::var(0).scale(&rat(a, 1)).add(&MPoly::from_int(b));
            let den = MPoly::var(1).scale(&rat(c, 1)).add(&MPoly::from_int(d));
            FracElem::new(num, den)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn field_axioms(a in small_frac(), b in small_frac(), c in small_frac()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv()).is_one());
            }
        }
    }
}
