//! Multivariate polynomials over the rationals: exact division, gcd,
//! square roots and resultants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::poly::{Monomial, Poly};
use super::ring::Coeff;
use super::Rat;

pub type MPoly = Poly<Rat>;

impl Poly<Rat> {
    pub fn from_rat(r: Rat) -> Self {
        Poly::constant(r)
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(Rat::from_integer(n.into()))
    }

    /// Scales so the leading (graded-lex) coefficient is 1.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    /// Integer-coefficient primitive form with positive leading coefficient,
    /// together with the rational factor removed (`self = factor * result`).
    pub fn primitive(&self) -> (Rat, Self) {
        if self.is_zero() {
            return (Rat::zero(), self.clone());
        }
        let mut den_lcm = BigInt::from(1);
        for (_, c) in self.terms() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::from(0);
        for (_, c) in self.terms() {
            let v = (c * Rat::from_integer(den_lcm.clone())).to_integer();
            num_gcd = num_gcd.gcd(&v);
        }
        let mut factor = Rat::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            factor = -factor;
        }
        (factor.clone(), self.scale(&factor.recip()))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        if d.is_constant() {
            return Some(self.scale(&d.constant_term().recip()));
        }
        if d.num_terms() == 1 {
            let (m, c) = d.leading().unwrap();
            return self.div_monomial(m).map(|q| q.scale(&c.recip()));
        }
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((m, c)) = r.leading() {
            let t = m.div(&dm)?;
            let tc = c / &dc;
            r = r.sub(&d.mul_monomial(&t, &tc));
            q.add_term(t, tc);
        }
        Some(q)
    }

    pub fn divides(&self, other: &MPoly) -> bool {
        other.exact_div(self).is_some()
    }

    /// Monic greatest common divisor; `gcd(0, b) = monic(b)`.
    pub fn gcd(&self, other: &MPoly) -> MPoly {
        gcd(self, other)
    }

    /// Exact square root up to sign, if one exists.
    pub fn sqrt(&self) -> Option<MPoly> {
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        let (lm, lc) = {
            let (m, c) = self.leading().unwrap();
            (m.clone(), c.clone())
        };
        let rc = rat_sqrt(&lc)?;
        if lm.exps().iter().any(|e| e % 2 == 1) {
            return None;
        }
        let lm_half = Monomial::new(lm.exps().iter().map(|e| e / 2).collect());
        let mut q = MPoly::monomial(lm_half.clone(), rc.clone());
        let two_lc = &rc * Rat::from_integer(2.into());
        for _ in 0..=self.num_terms() + 2 {
            let r = self.sub(&q.mul(&q));
            if r.is_zero() {
                return Some(q);
            }
            let (m, c) = r.leading().unwrap();
            let t = m.div(&lm_half)?;
            if t >= lm_half {
                return None;
            }
            q.add_term(t, c / &two_lc);
        }
        None
    }

    /// Content with respect to `v`: gcd of the coefficients of the powers of `v`.
    pub fn content_in(&self, v: usize) -> MPoly {
        let coeffs = self.to_univariate(v);
        let mut g = MPoly::zero();
        for c in coeffs.iter().rev() {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, c);
            if g.is_constant() {
                break;
            }
        }
        g
    }

    /// Resultant with respect to `v`, computed as a Sylvester determinant.
    pub fn resultant(&self, other: &MPoly, v: usize) -> MPoly {
        let a = self.to_univariate(v);
        let b = other.to_univariate(v);
        if a.is_empty() || b.is_empty() {
            return MPoly::zero();
        }
        let (m, n) = (a.len() - 1, b.len() - 1);
        if m == 0 && n == 0 {
            return MPoly::one();
        }
        if m == 0 {
            return a[0].pow(n as u32);
        }
        if n == 0 {
            return b[0].pow(m as u32);
        }
        let size = m + n;
        let mut mat = vec![vec![MPoly::zero(); size]; size];
        for i in 0..n {
            for (k, c) in a.iter().rev().enumerate() {
                mat[i][i + k] = c.clone();
            }
        }
        for i in 0..m {
            for (k, c) in b.iter().rev().enumerate() {
                mat[n + i][i + k] = c.clone();
            }
        }
        super::linalg::determinant(mat)
    }

    /// Removes every factor consisting only of the given variables raised
    /// to powers (e.g. parameters declared nonzero) and normalizes to monic.
    pub fn strip_monomial_factors(&self, nonzero: &[usize]) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mc = self.monomial_content();
        let strip = Monomial::new(mc.exps().iter().enumerate().map(|(i, &e)| if nonzero.contains(&i) { e } else { 0 }).collect());
        self.div_monomial(&strip).unwrap().monic()
    }
}

/// Square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

fn pseudo_rem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let mut r: Vec<MPoly> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&bc.mul(&lr));
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

fn univ_content(p: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    for c in p.iter().rev() {
        if c.is_zero() {
            continue;
        }
        g = gcd(c, &g);
        if g.is_constant() {
            return MPoly::one();
        }
    }
    g
}

fn choose_main_var(a: &MPoly, b: &MPoly) -> usize {
    let va = a.vars();
    let vb = b.vars();
    let common: Vec<usize> = va.iter().copied().filter(|v| vb.contains(v)).collect();
    let pool = if common.is_empty() { va } else { common };
    *pool.iter().min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v)).expect("nonconstant polynomial has a variable")
}

fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a.num_terms() == 1 || b.num_terms() == 1 {
        let mg = a.monomial_content().gcd(&b.monomial_content());
        return MPoly::monomial(mg, Rat::one());
    }
    if a == b {
        return a.monic();
    }
    // Cheap divisibility probe before the PRS.
    if a.num_terms() <= b.num_terms() && b.exact_div(a).is_some() {
        return a.monic();
    }
    if b.num_terms() < a.num_terms() && a.exact_div(b).is_some() {
        return b.monic();
    }
    let v = choose_main_var(a, b);
    if !a.contains_var(v) {
        return gcd(a, &b.content_in(v));
    }
    if !b.contains_var(v) {
        return gcd(&a.content_in(v), b);
    }
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = univ_content(&ua);
    let cb = univ_content(&ub);
    let g_cont = gcd(&ca, &cb);
    let mut pa: Vec<MPoly> = ua.iter().map(|c| c.exact_div(&ca).unwrap()).collect();
    let mut pb: Vec<MPoly> = ub.iter().map(|c| c.exact_div(&cb).unwrap()).collect();
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        let r = pseudo_rem(&pa, &pb);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return g_cont.monic();
        }
        let c = univ_content(&r);
        let r: Vec<MPoly> = r.iter().map(|x| x.exact_div(&c).unwrap()).collect();
        pa = pb;
        pb = r;
    }
    let pp = MPoly::from_univariate(&pb, v);
    let c = pp.content_in(v);
    let pp = pp.exact_div(&c).unwrap();
    g_cont.mul(&pp).monic()
}
