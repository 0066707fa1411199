//! Sparse multivariate polynomials over an arbitrary coefficient ring.
//!
//! Variables are plain indices; names live in a [`Symbols`](super::Symbols)
//! table owned by the caller. Monomials are ordered graded-lexicographically
//! with variable 0 the most significant, so the last entry of the term map is
//! the leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::ring::Coeff;

/// Exponent vector with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(v: usize, e: u32) -> Self {
        let mut exps = vec![0; v + 1];
        exps[v] = e;
        Monomial::new(exps)
    }

    pub fn exp(&self, v: usize) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let exps = (0..n).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial::new(exps)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() && other.0[self.0.len()..].iter().any(|&e| e > 0) {
            return None;
        }
        let mut exps = Vec::with_capacity(self.0.len());
        for i in 0..self.0.len() {
            let (a, b) = (self.exp(i), other.exp(i));
            if b > a {
                return None;
            }
            exps.push(a - b);
        }
        Some(Monomial::new(exps))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        Monomial::new((0..n).map(|i| self.0[i].min(other.0[i])).collect())
    }

    pub fn with_exp(&self, v: usize, e: u32) -> Monomial {
        let mut exps = self.0.clone();
        if exps.len() <= v {
            exps.resize(v + 1, 0);
        }
        exps[v] = e;
        Monomial::new(exps)
    }

    pub fn max_var(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            match self.exp(i).cmp(&other.exp(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; no zero coefficients are ever stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: usize) -> Self {
        Self::monomial(Monomial::var(v, 1), C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> C {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0)
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Sorted list of variables that occur.
    pub fn vars(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for m in self.terms.keys() {
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 && !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut big, small) = if self.terms.len() >= other.terms.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(mm, x)| (mm.mul(m), x.mul(c))))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                out.add_term(m.with_exp(v, e - 1), c.mul(&C::from_i64(e as i64)));
            }
        }
        out
    }

    /// Coefficients of `self` seen as a univariate polynomial in `v`
    /// (index = power); each coefficient is free of `v`.
    pub fn to_univariate(&self, v: usize) -> Vec<Self> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            out[e].add_term(m.with_exp(v, 0), c.clone());
        }
        out
    }

    pub fn from_univariate(coeffs: &[Self], v: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                out.add_term(m.with_exp(v, m.exp(v) + e as u32), x.clone());
            }
        }
        out
    }

    /// Substitutes polynomials for variables. Variables mapped to `None`
    /// are kept as they are.
    pub fn compose(&self, images: &dyn Fn(usize) -> Option<Self>) -> Self {
        let mut cache: BTreeMap<(usize, u32), Self> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            let mut kept = Vec::new();
            for (v, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match images(v) {
                    Some(img) => {
                        let p = cache.entry((v, e)).or_insert_with(|| img.pow(e)).clone();
                        term = term.mul(&p);
                    }
                    None => kept.push((v, e)),
                }
            }
            for (v, e) in kept {
                term = term.mul_monomial(&Monomial::var(v, e), &C::one());
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitutes a coefficient value for one variable.
    pub fn eval_var(&self, v: usize, value: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            out.add_term(m.with_exp(v, 0), c.mul(&value.pow(e)));
        }
        out
    }

    /// Evaluates every variable; missing variables count as zero.
    pub fn eval_all(&self, values: &[C]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    let x = values.get(v).cloned().unwrap_or_else(C::zero);
                    t = t.mul(&x.pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Lowest-degree homogeneous component (tangent cone at the origin).
    pub fn lowest_form(&self) -> (u32, Self) {
        let d = self.terms.keys().map(|m| m.degree()).min().unwrap_or(0);
        (d, Self::from_terms(self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone()))))
    }

    /// Highest-degree homogeneous component.
    pub fn top_form(&self) -> Self {
        let d = self.total_degree();
        Self::from_terms(self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Divides every term by the monomial `m`; `None` if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut out = Self::zero();
        for (mm, c) in &self.terms {
            out.add_term(mm.div(m)?, c.clone());
        }
        Some(out)
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    /// Renames variables via `map(old) = new`.
    pub fn remap_vars(&self, map: &dyn Fn(usize) -> usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut exps: Vec<u32> = Vec::new();
            for (v, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    let nv = map(v);
                    if exps.len() <= nv {
                        exps.resize(nv + 1, 0);
                    }
                    exps[nv] += e;
                }
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn graded_lex_order() {
        let x = Monomial::var(0, 1);
        let y = Monomial::var(1, 1);
        let y2 = Monomial::var(1, 2);
        assert!(x > y);
        assert!(y2 > x);
        assert!(x.mul(&y) > Monomial::var(1, 2).div(&y).unwrap());
        assert!(Monomial::one() < y);
    }

    #[test]
    fn arithmetic_and_derivative() {
        let x = Poly::<Rat>::var(0);
        let y = Poly::<Rat>::var(1);
        let p = x.mul(&x).sub(&y.mul(&y));
        let q = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p, q);
        assert_eq!(p.derivative(0), x.scale(&r(2)));
        assert_eq!(p.to_univariate(0).len(), 3);
        assert_eq!(Poly::from_univariate(&p.to_univariate(1), 1), p);
    }

    #[test]
    fn compose_substitutes() {
        let x = Poly::<Rat>::var(0);
        let y = Poly::<Rat>::var(1);
        let p = x.mul(&y).add(&Poly::constant(r(3)));
        let shifted = p.compose(&|v| if v == 0 { Some(x.add(&Poly::one())) } else { None });
        assert_eq!(shifted, x.mul(&y).add(&y).add(&Poly::constant(r(3))));
    }
}
