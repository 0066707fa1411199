//! Partial factorization: content, square-free split, rational roots and
//! rational quadratic factors of univariate polynomials, and splitting of
//! multivariate polynomials that are quadratic with a square discriminant.
//!
//! Roots are located numerically (Aberth in f64, Newton refinement in
//! multiprecision) and then certified exactly; numerics only propose
//! candidates.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};

use super::bigfloat::Complex;
use super::mpoly::rat_sqrt;
use super::poly::Monomial;
use super::quad::QuadElem;
use super::ring::{Coeff, Field};
use super::{MPoly, Rat, UPoly};

const REFINE_PREC: usize = 640;

/// One factor of [`factor_limited`]. `certified` is false for the residual
/// part that the limited factorizer could not split or prove irreducible.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub poly: MPoly,
    pub multiplicity: u32,
    pub certified: bool,
}

/// `p = content * prod(f.poly ^ f.multiplicity)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub content: Rat,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn has_residual(&self) -> bool {
        self.factors.iter().any(|f| !f.certified)
    }
}

/// Numerical complex roots of a square-free rational polynomial (Aberth).
pub fn approx_roots(p: &UPoly<Rat>) -> Vec<Complex64> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Vec::new();
    }
    let lead = p.lead();
    let c: Vec<Complex64> = p.coeffs().iter().map(|a| Complex64::new((a / &lead).to_f64().unwrap_or(0.0), 0.0)).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            d = d * z + v;
            v = v * z + a;
        }
        (v, d)
    };
    let bound = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let r0 = bound.clamp(1e-3, 1e6) * 0.5;
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4)).collect();
    for _ in 0..800 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += 1.0 / diff;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Newton refinement of an approximate simple root in multiprecision.
fn refine(p: &UPoly<Rat>, z0: Complex64) -> Complex {
    let prec = REFINE_PREC;
    let coeffs: Vec<Complex> = p.coeffs().iter().map(|a| Complex::from_rat(a, prec)).collect();
    let dcoeffs: Vec<Complex> = p.derivative().coeffs().iter().map(|a| Complex::from_rat(a, prec)).collect();
    let horner = |cs: &[Complex], z: &Complex| {
        let mut acc = Complex::zero(prec);
        for a in cs.iter().rev() {
            acc = acc.mul(z).add(a);
        }
        acc
    };
    let mut z = Complex::from_f64(z0.re, z0.im, prec);
    for _ in 0..60 {
        let v = horner(&coeffs, &z);
        let d = horner(&dcoeffs, &z);
        if d.is_zero() || v.is_zero() {
            break;
        }
        let step = v.div(&d);
        z = z.sub(&step);
        let rel = step.abs().exponent() - z.abs().exponent().max(-(prec as i64));
        if rel < -(prec as i64) + 16 {
            break;
        }
    }
    z
}

/// Convergents of `x` after which the next partial quotient is huge (or the
/// expansion ends): the plausible exact values behind a close approximation.
fn strong_convergents(x: &Rat, max_den_bits: u64) -> Vec<Rat> {
    let big = BigInt::from(1u64 << 40);
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut r = x.clone();
    let mut out = Vec::new();
    for _ in 0..600 {
        let a = r.floor().to_integer();
        if k1.bits() > 0 && a.abs() > big {
            out.push(Rat::new(h1.clone(), k1.clone()));
        }
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2.bits() > max_den_bits {
            break;
        }
        let frac = &r - Rat::from_integer(a);
        if Coeff::is_zero(&frac) {
            out.push(Rat::new(h2, k2));
            break;
        }
        r = frac.recip();
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    out
}

fn rationalize(x: &Rat, max_den_bits: u64, accept: &dyn Fn(&Rat) -> bool) -> Option<Rat> {
    strong_convergents(x, max_den_bits).into_iter().find(|c| accept(c))
}

fn real_part_if_real(z: &Complex) -> Option<Rat> {
    let scale = z.abs().exponent().max(0);
    if z.im.is_zero() || z.im.exponent() < scale - (REFINE_PREC as i64) / 2 {
        Some(z.re.to_rat())
    } else {
        None
    }
}

/// Distinct rational roots, in increasing order.
pub fn rational_roots(p: &UPoly<Rat>) -> Vec<Rat> {
    let mut roots = Vec::new();
    if p.is_zero() || p.degree() == 0 {
        return roots;
    }
    let mut f = p.square_free_part();
    // x = 0 is cheap and common.
    if Coeff::is_zero(&f.coeff(0)) {
        roots.push(Rat::zero());
        f = f.exact_div(&UPoly::x()).unwrap();
    }
    match f.degree() {
        0 => {}
        1 => roots.push(f.coeff(0).neg().div(&f.coeff(1))),
        2 => {
            let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
            let disc = &b * &b - Rat::from_integer(4.into()) * &a * &c;
            if let Some(s) = rat_sqrt(&disc) {
                let two_a = Rat::from_integer(2.into()) * &a;
                roots.push((-&b + &s) / &two_a);
                roots.push((-&b - &s) / &two_a);
            }
        }
        _ => {
            let max_bits = (REFINE_PREC as u64) / 2 - 8;
            for z in approx_roots(&f) {
                let zr = refine(&f, z);
                if let Some(x) = real_part_if_real(&zr) {
                    if let Some(r) = rationalize(&x, max_bits, &|c| Coeff::is_zero(&f.eval(c))) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Roots of `p` in `Q` or in quadratic fields `Q(sqrt D)`, each listed once,
/// plus the product of the factors whose roots were not found.
pub fn roots_quadratic(p: &UPoly<Rat>) -> (Vec<QuadElem>, UPoly<Rat>) {
    let mut out = Vec::new();
    if p.is_zero() || p.degree() == 0 {
        return (out, UPoly::constant(Rat::one()));
    }
    let mut f = p.square_free_part();
    for r in rational_roots(&f) {
        out.push(QuadElem::from_rat(&r));
        f = f.exact_div(&UPoly::linear_root(&r)).unwrap();
    }
    for q in quadratic_factors(&f) {
        let (b, c) = (q.coeff(1), q.coeff(0));
        let two = Rat::from_integer(2.into());
        // x = -b/2 +- sqrt(b^2/4 - c)
        let disc = &b * &b / Rat::from_integer(4.into()) - &c;
        let (sq, d) = square_free_radicand(&disc);
        out.push(QuadElem::new(-&b / &two, sq.clone(), d.clone()));
        out.push(QuadElem::new(-&b / &two, -sq, d));
        f = f.exact_div(&q).unwrap();
    }
    (out, f.monic())
}

/// Writes `r = s^2 * d` with `d` a square-free integer; returns `(s, d)`.
pub fn square_free_radicand(r: &Rat) -> (Rat, Rat) {
    // r = n/m = n*m / m^2
    let nm: BigInt = r.numer() * r.denom();
    let mut s = BigInt::from(1);
    let mut d = BigInt::from(1);
    let neg = nm.is_negative();
    let mut rest = nm.abs();
    let mut q = BigInt::from(2);
    while &q * &q <= rest && q < BigInt::from(100_000) {
        while (&rest % (&q * &q)) == BigInt::from(0) {
            rest /= &q * &q;
            s *= &q;
        }
        if (&rest % &q) == BigInt::from(0) {
            rest /= &q;
            d *= &q;
        }
        q += 1;
    }
    d *= rest;
    if neg {
        d = -d;
    }
    (Rat::new(s, r.denom().clone()), Rat::from_integer(d))
}

/// Monic irreducible quadratic factors over `Q` of a polynomial with no
/// rational roots.
pub fn quadratic_factors(p: &UPoly<Rat>) -> Vec<UPoly<Rat>> {
    let mut out = Vec::new();
    if p.is_zero() || p.degree() < 2 {
        return out;
    }
    let mut f = p.square_free_part();
    if f.degree() == 2 {
        return vec![f];
    }
    if f.degree() == 3 {
        return out;
    }
    let zs: Vec<Complex> = approx_roots(&f).into_iter().map(|z| refine(&f, z)).collect();
    let max_bits = (REFINE_PREC as u64) / 2 - 8;
    let mut used = vec![false; zs.len()];
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            if used[i] || used[j] || f.degree() < 2 {
                continue;
            }
            let s = zs[i].add(&zs[j]);
            let m = zs[i].mul(&zs[j]);
            let (Some(sr), Some(mr)) = (real_part_if_real(&s), real_part_if_real(&m)) else { continue };
            let fref = &f;
            let mut found = None;
            'outer: for sc in strong_convergents(&sr, max_bits) {
                for mc in strong_convergents(&mr, max_bits) {
                    let q = UPoly::new(vec![mc.clone(), -sc.clone(), Rat::one()]);
                    if fref.exact_div(&q).is_some() {
                        found = Some((sc, mc));
                        break 'outer;
                    }
                }
            }
            if let Some((s, m)) = found {
                let q = UPoly::new(vec![m, -s, Rat::one()]);
                if let Some(rest) = f.exact_div(&q) {
                    f = rest;
                    out.push(q);
                    used[i] = true;
                    used[j] = true;
                }
            }
        }
    }
    out
}

/// Converts a polynomial that involves at most variable `v` to a dense
/// univariate polynomial.
pub fn to_upoly(p: &MPoly, v: usize) -> Option<UPoly<Rat>> {
    if p.vars().iter().any(|&x| x != v) {
        return None;
    }
    Some(UPoly::new(p.to_univariate(v).iter().map(|c| c.constant_term()).collect()))
}

pub fn from_upoly(p: &UPoly<Rat>, v: usize) -> MPoly {
    MPoly::from_terms(p.coeffs().iter().enumerate().map(|(e, c)| (Monomial::var(v, e as u32), c.clone())))
}

/// Multivariate square-free decomposition `p = c * prod f_i^i` (char 0).
pub fn square_free_mpoly(p: &MPoly) -> Vec<(MPoly, u32)> {
    let mut out: Vec<(MPoly, u32)> = Vec::new();
    sqf_rec(p, &mut out);
    // Merge equal factors.
    let mut merged: Vec<(MPoly, u32)> = Vec::new();
    for (f, e) in out {
        let f = f.primitive().1;
        if let Some(x) = merged.iter_mut().find(|(g, _)| *g == f) {
            x.1 += e;
        } else {
            merged.push((f, e));
        }
    }
    merged
}

fn sqf_rec(p: &MPoly, out: &mut Vec<(MPoly, u32)>) {
    if p.is_constant() {
        return;
    }
    let v = *p.vars().first().unwrap();
    let cont = p.content_in(v);
    if !cont.is_constant() {
        sqf_rec(&cont, out);
    }
    let pp = p.exact_div(&cont).unwrap();
    // Yun with respect to v on the v-primitive part.
    let d = pp.derivative(v);
    let a0 = pp.gcd(&d);
    let mut b = pp.exact_div(&a0).unwrap();
    let c = d.exact_div(&a0).unwrap();
    let mut dd = c.sub(&b.derivative(v));
    let mut i = 1;
    while b.contains_var(v) {
        let a = b.gcd(&dd);
        b = b.exact_div(&a).unwrap();
        let c = dd.exact_div(&a).unwrap();
        if !a.is_constant() {
            out.push((a, i));
        }
        dd = c.sub(&b.derivative(v));
        i += 1;
    }
}

/// Content, monomial content, square-free split, then linear and
/// square-discriminant quadratic splitting; anything left is flagged.
pub fn factor_limited(p: &MPoly) -> Factorization {
    assert!(!p.is_zero(), "factor_limited of zero");
    let (content, prim) = p.primitive();
    let mut factors: Vec<Factor> = Vec::new();
    let mc = prim.monomial_content();
    for (v, &e) in mc.exps().iter().enumerate() {
        if e > 0 {
            factors.push(Factor { poly: MPoly::var(v), multiplicity: e, certified: true });
        }
    }
    let rest = prim.div_monomial(&mc).unwrap();
    for (f, e) in square_free_mpoly(&rest) {
        for (g, certified) in split_squarefree(&f) {
            let g = g.primitive().1;
            if let Some(x) = factors.iter_mut().find(|x| x.poly == g) {
                x.multiplicity += e;
            } else {
                factors.push(Factor { poly: g, multiplicity: e, certified });
            }
        }
    }
    factors.sort_by(|a, b| {
        a.poly
            .total_degree()
            .cmp(&b.poly.total_degree())
            .then(a.poly.terms().rev().map(|(m, _)| m.clone()).cmp(b.poly.terms().rev().map(|(m, _)| m.clone())))
    });
    Factorization { content, factors }
}

fn split_squarefree(f: &MPoly) -> Vec<(MPoly, bool)> {
    let vars = f.vars();
    if vars.is_empty() {
        return Vec::new();
    }
    if vars.len() == 1 {
        let v = vars[0];
        let mut u = to_upoly(f, v).unwrap();
        let mut out = Vec::new();
        for r in rational_roots(&u) {
            let lin = UPoly::linear_root(&r);
            u = u.exact_div(&lin).unwrap();
            out.push((from_upoly(&lin, v), true));
        }
        if u.degree() > 0 {
            for q in quadratic_factors(&u) {
                u = u.exact_div(&q).unwrap();
                out.push((from_upoly(&q, v), true));
            }
        }
        if u.degree() > 0 {
            // Without rational roots, degree 2 and 3 are irreducible.
            out.push((from_upoly(&u, v), u.degree() <= 3));
        }
        return out;
    }
    for &v in &vars {
        if f.degree_in(v) == 1 && f.content_in(v).is_constant() {
            return vec![(f.clone(), true)];
        }
    }
    for &v in &vars {
        if f.degree_in(v) == 2 {
            let c = f.to_univariate(v);
            let disc = c[1].mul(&c[1]).sub(&c[2].mul(&c[0]).scale(&Rat::from_integer(4.into())));
            if let Some(s) = disc.sqrt() {
                if s.is_zero() {
                    continue;
                }
                // 2A v + B - S divides 4A * f; take its gcd with f.
                let two_a_v = c[2].scale(&Rat::from_integer(2.into())).mul(&MPoly::var(v));
                let g1 = f.gcd(&two_a_v.add(&c[1]).sub(&s));
                if !g1.is_constant() && g1.total_degree() < f.total_degree() {
                    let g2 = f.exact_div(&g1).unwrap();
                    let mut out = split_squarefree(&g1);
                    out.extend(split_squarefree(&g2));
                    return out;
                }
            }
        }
    }
    vec![(f.clone(), false)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn up(c: &[Rat]) -> UPoly<Rat> {
        UPoly::new(c.to_vec())
    }

    fn from_roots(rs: &[Rat]) -> UPoly<Rat> {
        rs.iter().fold(UPoly::constant(Rat::one()), |acc, r| acc.mul(&UPoly::linear_root(r)))
    }

    #[test]
    fn finds_table_roots() {
        let rs = [rat(0, 1), rat(144, 47), rat(256, 73), rat(16, 1)];
        let p = from_roots(&rs).mul(&up(&[rat(1, 1), rat(0, 1), rat(1, 1)])).scale(&rat(-7, 3));
        let mut expect = rs.to_vec();
        expect.sort();
        assert_eq!(rational_roots(&p), expect);
    }

    #[test]
    fn finds_large_rational_roots() {
        let rs = [rat(-4950, 6859), rat(450, 6859), rat(123457, 99991), rat(-3, 7), rat(5, 1)];
        let p = from_roots(&rs).mul(&from_roots(&rs[..2]));
        let mut expect = rs.to_vec();
        expect.sort();
        assert_eq!(rational_roots(&p), expect);
    }

    #[test]
    fn quadratic_pairs() {
        // (x^2 - 2)(x^2 + x + 1)(x - 1/3)
        let p = up(&[rat(-2, 1), rat(0, 1), rat(1, 1)]).mul(&up(&[rat(1, 1), rat(1, 1), rat(1, 1)])).mul(&UPoly::linear_root(&rat(1, 3)));
        let (roots, rest) = roots_quadratic(&p);
        assert_eq!(roots.len(), 5);
        assert_eq!(rest.degree(), 0);
        for r in &roots {
            let v = p.map(QuadElem::from_rat).eval(r);
            assert!(v.is_zero(), "{r:?}");
        }
    }

    #[test]
    fn factor_monomial_split() {
        // x^2 - 16x
        let x = MPoly::var(0);
        let f = factor_limited(&x.mul(&x).sub(&x.scale(&rat(16, 1))));
        let polys: Vec<MPoly> = f.factors.iter().map(|f| f.poly.clone()).collect();
        assert_eq!(polys, vec![x.clone(), x.sub(&MPoly::from_int(16))]);
        assert!(!f.has_residual());
        let g = factor_limited(&x.scale(&rat(47, 1)).sub(&MPoly::from_int(144)));
        assert_eq!(g.factors.len(), 1);
        assert_eq!(g.factors[0].multiplicity, 1);
    }

    #[test]
    fn factor_square_discriminant_quadratic() {
        // (b - 2 mu)(b + 3 nu)^2 * 5
        let b = MPoly::var(0);
        let mu = MPoly::var(1);
        let nu = MPoly::var(2);
        let f1 = b.sub(&mu.scale(&rat(2, 1)));
        let f2 = b.add(&nu.scale(&rat(3, 1)));
        let p = f1.mul(&f2).mul(&f2).scale(&rat(5, 1));
        let fac = factor_limited(&p);
        assert_eq!(fac.content, rat(5, 1));
        assert_eq!(fac.factors.len(), 2);
        let mut prod = MPoly::from_rat(fac.content.clone());
        for f in &fac.factors {
            prod = prod.mul(&f.poly.pow(f.multiplicity));
        }
        assert_eq!(prod, p);
        // irreducible b^2 - 16 mu nu stays whole and certified by linearity in mu
        let g = b.mul(&b).sub(&mu.mul(&nu).scale(&rat(16, 1)));
        let gf = factor_limited(&g);
        assert_eq!(gf.factors.len(), 1);
        assert!(gf.factors[0].certified);
    }
}
