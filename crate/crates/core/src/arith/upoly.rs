//! Dense univariate polynomials over a field.

use super::ring::Field;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<C: Field> {
    c: Vec<C>,
}

impl<C: Field> UPoly<C> {
    pub fn new(mut c: Vec<C>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(x: C) -> Self {
        Self::new(vec![x])
    }

    /// `x - r`
    pub fn linear_root(r: &C) -> Self {
        Self::new(vec![r.neg(), C::one()])
    }

    pub fn x() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> C {
        self.c.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has degree 0 here, check `is_zero` first.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> C {
        self.c.last().cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::new(self.c.iter().map(|a| a.mul(k)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().inv();
        self.scale(&l)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a.mul(&C::from_i64(i as i64))).collect())
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(x).add(a);
        }
        acc
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.c.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let dl = d.lead().inv();
        let dd = d.degree();
        let mut q = vec![C::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = r[i + dd].mul(&dl);
            if t.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i + j] = r[i + j].sub(&t.mul(b));
            }
            q[i] = t;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient, `None` if the remainder is nonzero.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = lead * prod f_i^i`.
    /// Returns `(f_i, i)` for nonconstant `f_i`.
    pub fn square_free(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.exact_div(&a0).unwrap();
        let mut c = d.exact_div(&a0).unwrap();
        let mut dd = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&dd);
            b = b.exact_div(&a).unwrap();
            c = dd.exact_div(&a).unwrap();
            if a.degree() > 0 {
                out.push((a.monic(), i));
            }
            dd = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Product of the distinct irreducible factors.
    pub fn square_free_part(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(C::one());
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).unwrap().monic()
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> UPoly<D> {
        UPoly::new(self.c.iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Rat};

    fn p(c: &[i64]) -> UPoly<Rat> {
        UPoly::new(c.iter().map(|&x| rat(x, 1)).collect())
    }

    #[test]
    fn divrem_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[-1, 1]).mul(&p(&[5, 1]))), p(&[-1, 1]));
    }

    #[test]
    fn square_free_decomposition() {
        // (x-1)^2 (x+2)^3 x
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]).pow(3)).mul(&p(&[0, 1]));
        let sf = f.square_free();
        assert_eq!(sf, vec![(p(&[0, 1]), 1), (p(&[-1, 1]), 2), (p(&[2, 1]), 3)]);
        assert_eq!(f.square_free_part(), p(&[0, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1])));
    }
}
