//! Thin wrappers over `astro_float::BigFloat`: a real type with a fixed
//! working precision and a complex type built on it.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use super::Rat;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Arbitrary-precision real number; `prec` is in bits.
#[derive(Clone, Debug)]
pub struct Real {
    pub v: BigFloat,
    pub prec: usize,
}

impl Real {
    pub fn zero(prec: usize) -> Self {
        Real { v: BigFloat::from_i64(0, prec), prec }
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Real { v: BigFloat::from_i64(n, prec), prec }
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Real { v: BigFloat::from_f64(x, prec), prec }
    }

    pub fn from_rat(r: &Rat, prec: usize) -> Self {
        let parse = |s: String| with_cc(|cc| BigFloat::parse(&s, Radix::Dec, prec, RM, cc));
        let n = parse(r.numer().to_string());
        let d = parse(r.denom().to_string());
        Real { v: n.div(&d, prec, RM), prec }
    }

    fn wrap(&self, v: BigFloat) -> Self {
        Real { v, prec: self.prec }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.wrap(self.v.add(&o.v, self.prec, RM))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.wrap(self.v.sub(&o.v, self.prec, RM))
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.wrap(self.v.mul(&o.v, self.prec, RM))
    }
    pub fn div(&self, o: &Self) -> Self {
        self.wrap(self.v.div(&o.v, self.prec, RM))
    }
    pub fn neg(&self) -> Self {
        self.wrap(self.v.neg())
    }
    pub fn abs(&self) -> Self {
        self.wrap(self.v.abs())
    }
    pub fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.prec, RM))
    }
    pub fn exp(&self) -> Self {
        self.wrap(with_cc(|cc| self.v.exp(self.prec, RM, cc)))
    }
    pub fn sin(&self) -> Self {
        self.wrap(with_cc(|cc| self.v.sin(self.prec, RM, cc)))
    }
    pub fn cos(&self) -> Self {
        self.wrap(with_cc(|cc| self.v.cos(self.prec, RM, cc)))
    }
    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    pub fn is_negative(&self) -> bool {
        self.v.is_negative()
    }
    pub fn lt(&self, o: &Self) -> bool {
        self.v < o.v
    }

    /// Nearest f64 (via the decimal rendering).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let s = format!("{}", self.v);
        s.parse::<f64>().unwrap_or_else(|_| {
            // Exponents outside the f64 range.
            match self.v.exponent() {
                Some(e) if e > 0 => {
                    if self.v.is_negative() {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                }
                _ => 0.0,
            }
        })
    }

    /// Exact value of the binary float as a rational.
    pub fn to_rat(&self) -> Rat {
        use num_bigint::{BigInt, BigUint};
        use num_traits::Zero;
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            return Rat::zero();
        };
        if self.v.is_zero() {
            return Rat::zero();
        }
        let mut digits = Vec::with_capacity(words.len() * 2);
        for &w in words {
            digits.push(w as u32);
            digits.push((w >> 32) as u32);
        }
        let m = BigInt::from(BigUint::new(digits));
        let shift = e as i64 - 64 * words.len() as i64;
        let two = BigInt::from(2);
        let mut r = if shift >= 0 {
            Rat::from_integer(m * num_traits::pow(two, shift as usize))
        } else {
            Rat::new(m, num_traits::pow(two, (-shift) as usize))
        };
        if sign == astro_float::Sign::Neg {
            r = -r;
        }
        r
    }

    /// Binary exponent, or a very negative value for zero.
    pub fn exponent(&self) -> i64 {
        self.v.exponent().map(|e| e as i64).unwrap_or(i64::MIN / 2)
    }
}

/// Complex number over [`Real`].
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec;
        Complex { re, im: Real::zero(p) }
    }

    pub fn from_rat(r: &Rat, prec: usize) -> Self {
        Self::from_real(Real::from_rat(r, prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn prec(&self) -> usize {
        self.re.prec
    }

    pub fn add(&self, o: &Self) -> Self {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    pub fn mul(&self, o: &Self) -> Self {
        Complex { re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)), im: self.re.mul(&o.im).add(&self.im.mul(&o.re)) }
    }
    pub fn scale(&self, k: &Real) -> Self {
        Complex { re: self.re.mul(k), im: self.im.mul(k) }
    }
    pub fn neg(&self) -> Self {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }
    pub fn norm_sqr(&self) -> Real {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Complex { re: self.re.div(&n), im: self.im.neg().div(&n) }
    }
    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Complex::from_real(Real::from_i64(1, self.prec()));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Complex { re: r.mul(&self.im.cos()), im: r.mul(&self.im.sin()) }
    }

    /// tanh via exponentials: (1 - e^{-2z}) / (1 + e^{-2z}) on the right
    /// half plane, mirrored otherwise.
    pub fn tanh(&self) -> Self {
        let p = self.prec();
        let one = Complex::from_real(Real::from_i64(1, p));
        if self.re.is_negative() {
            return self.neg().tanh().neg();
        }
        let e = self.scale(&Real::from_i64(-2, p)).exp();
        one.sub(&e).div(&one.add(&e))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return self.clone();
        }
        let r = self.abs();
        let two = Real::from_i64(2, p);
        let re = r.add(&self.re).div(&two).sqrt();
        let mut im = r.sub(&self.re).div(&two).sqrt();
        if self.im.is_negative() {
            im = im.neg();
        }
        Complex { re, im }
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn rational_conversion_and_trig() {
        let x = Real::from_rat(&rat(1, 3), 200);
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-15);
        let back = x.to_rat() - rat(1, 3);
        assert!(num_traits::Signed::abs(&back) < rat(1, 1 << 60));
        assert_eq!(Real::from_i64(-6, 128).to_rat(), rat(-6, 1));
        let z = Complex::from_f64(0.3, 0.2, 200);
        let t = z.tanh().to_c64();
        let expect = num_complex::Complex64::new(0.3, 0.2).tanh();
        assert!((t - expect).norm() < 1e-14);
        let s = Complex::from_f64(-4.0, 0.0, 200).sqrt().to_c64();
        assert!((s - num_complex::Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }
}
