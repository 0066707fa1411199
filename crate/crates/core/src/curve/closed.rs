//! Closed-form solutions and their exact substitution into polynomial
//! differential expressions.
//!
//! Elliptic forms live in `Q(params)[W, Z]` with `W = wp`, `Z = wp'`, reduced
//! by `Z^2 = 4 W^3 - g2 W - g3`. Trigonometric and rational forms are
//! fractions `N(tau)/D(tau)` with `tau' = -tau^2 + k^2/4`.

use crate::arith::render::{render_frac, render_frac_poly};
use crate::arith::{Coeff, FracElem, MPoly, Monomial, Poly, Symbols};
use crate::ode::series::SeriesExpr;

/// `u = sum wp[i] * wp^i + sum wpp[i] * wp' * wp^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticForm {
    pub wp: Vec<FracElem>,
    pub wpp: Vec<FracElem>,
    pub g2: FracElem,
    pub g3: FracElem,
}

/// `u = N(tau)/D(tau)`, `tau = (k/2) tanh(k (xi - xi0)/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigForm {
    /// Coefficients from `tau^0` up.
    pub num: Vec<FracElem>,
    /// Monic.
    pub den: Vec<FracElem>,
    pub k2: FracElem,
}

/// `u = N(tau)/D(tau)`, `tau = 1/(xi - xi0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub num: Vec<FracElem>,
    pub den: Vec<FracElem>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    Elliptic(EllipticForm),
    Trig(TrigForm),
    Rational(RationalForm),
}

/// A closed form valid on the parameter locus described by `constraints`,
/// realized through the eliminations `substitutions`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormSolution {
    pub form: ClosedForm,
    pub constraints: Vec<MPoly>,
    pub substitutions: Vec<(usize, FracElem)>,
}

impl ClosedForm {
    pub fn kind(&self) -> &'static str {
        match self {
            ClosedForm::Elliptic(_) => "elliptic",
            ClosedForm::Trig(_) => "trigonometric",
            ClosedForm::Rational(_) => "rational",
        }
    }

    pub fn render(&self, syms: &Symbols) -> String {
        match self {
            ClosedForm::Elliptic(e) => format!(
                "u = {}; g2 = {}; g3 = {}",
                render_frac_poly(&e.as_poly(), syms, &|v| if v == 0 { "wp".into() } else { "wp'".into() }),
                render_frac(&e.g2, syms),
                render_frac(&e.g3, syms)
            ),
            ClosedForm::Trig(t) => {
                format!("u = {}; tau = (k/2)*tanh(k*(xi - xi0)/2); k^2 = {}", render_ratio(&t.num, &t.den, syms), render_frac(&t.k2, syms))
            }
            ClosedForm::Rational(r) => {
                format!("u = {}; tau = 1/(xi - xi0)", render_ratio(&r.num, &r.den, syms))
            }
        }
    }

    /// Substitutes parameter eliminations into every coefficient.
    pub fn substitute(&self, subs: &dyn Fn(usize) -> Option<FracElem>) -> Self {
        let s = |v: &[FracElem]| v.iter().map(|c| c.substitute(subs)).collect::<Vec<_>>();
        match self {
            ClosedForm::Elliptic(e) => {
                ClosedForm::Elliptic(EllipticForm { wp: s(&e.wp), wpp: s(&e.wpp), g2: e.g2.substitute(subs), g3: e.g3.substitute(subs) })
            }
            ClosedForm::Trig(t) => ClosedForm::Trig(TrigForm { num: s(&t.num), den: s(&t.den), k2: t.k2.substitute(subs) }),
            ClosedForm::Rational(r) => ClosedForm::Rational(RationalForm { num: s(&r.num), den: s(&r.den) }),
        }
    }
}

fn render_ratio(num: &[FracElem], den: &[FracElem], syms: &Symbols) -> String {
    let n = render_frac_poly(&tau_poly(num), syms, &|_| "tau".into());
    if den.len() <= 1 {
        return n;
    }
    let d = render_frac_poly(&tau_poly(den), syms, &|_| "tau".into());
    let n = if n.contains(' ') || n.contains('/') { format!("({n})") } else { n };
    format!("{n}/({d})")
}

/// Dense coefficients to a polynomial in variable 0.
pub fn tau_poly(c: &[FracElem]) -> Poly<FracElem> {
    Poly::from_terms(c.iter().enumerate().map(|(i, x)| (Monomial::var(0, i as u32), x.clone())))
}

impl EllipticForm {
    pub fn as_poly(&self) -> Poly<FracElem> {
        let mut p = Poly::zero();
        for (i, c) in self.wp.iter().enumerate() {
            p.add_term(Monomial::var(0, i as u32), c.clone());
        }
        for (i, c) in self.wpp.iter().enumerate() {
            p.add_term(Monomial::new(vec![i as u32, 1]), c.clone());
        }
        p
    }
}

/// Reduces `Z^2 -> 4 W^3 - g2 W - g3`.
pub fn wp_reduce(p: &Poly<FracElem>, g2: &FracElem, g3: &FracElem) -> Poly<FracElem> {
    if p.degree_in(1) < 2 {
        return p.clone();
    }
    let cubic =
        Poly::from_terms([(Monomial::var(0, 3), FracElem::from_int(4)), (Monomial::var(0, 1), g2.neg()), (Monomial::one(), g3.neg())]);
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let e = m.exp(1);
        let base = Poly::monomial(Monomial::new(vec![m.exp(0), e % 2]), c.clone());
        out = out.add(&base.mul(&cubic.pow(e / 2)));
    }
    out
}

/// `d/dxi` with `W' = Z`, `Z' = 6 W^2 - g2/2`.
pub fn wp_derivative(p: &Poly<FracElem>, g2: &FracElem, g3: &FracElem) -> Poly<FracElem> {
    let zp = Poly::from_terms([
        (Monomial::var(0, 2), FracElem::from_int(6)),
        (Monomial::one(), g2.mul(&FracElem::from_rat_value(crate::arith::rat(-1, 2)))),
    ]);
    let d = p.derivative(0).mul(&Poly::var(1)).add(&p.derivative(1).mul(&zp));
    wp_reduce(&d, g2, g3)
}

/// `u, u', ..., u^(n)` as reduced polynomials in `W`, `Z`.
pub fn wp_derivatives(u: &Poly<FracElem>, g2: &FracElem, g3: &FracElem, n: usize) -> Vec<Poly<FracElem>> {
    let mut derivs = vec![u.clone()];
    for _ in 0..n {
        let d = wp_derivative(derivs.last().unwrap(), g2, g3);
        derivs.push(d);
    }
    derivs
}

fn order_of(target: &Poly<FracElem>) -> usize {
    target.vars().into_iter().max().unwrap_or(0)
}

/// `E(u, u', ..., u^(N))` for an elliptic form, reduced.
pub fn elliptic_residual(target: &Poly<FracElem>, u: &Poly<FracElem>, g2: &FracElem, g3: &FracElem) -> Poly<FracElem> {
    let derivs = wp_derivatives(u, g2, g3, order_of(target));
    let mut acc = Poly::zero();
    for (m, c) in target.terms() {
        let mut t = Poly::constant(c.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                t = wp_reduce(&t.mul(&derivs[v]), g2, g3);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// `d/dxi` of a polynomial in `tau` (variable 0).
pub fn tau_derivative(p: &Poly<FracElem>, k2: &FracElem) -> Poly<FracElem> {
    let riccati = Poly::from_terms([
        (Monomial::var(0, 2), FracElem::from_int(-1)),
        (Monomial::one(), k2.mul(&FracElem::from_rat_value(crate::arith::rat(1, 4)))),
    ]);
    p.derivative(0).mul(&riccati)
}

/// Numerators `A_0..A_n` with `u^(k) = A_k / D^(k+1)` for `u = N/D`.
pub fn tau_derivatives(num: &Poly<FracElem>, den: &Poly<FracElem>, k2: &FracElem, n: usize) -> Vec<Poly<FracElem>> {
    let dd = tau_derivative(den, k2);
    let mut a = vec![num.clone()];
    for k in 0..n {
        let ak = a.last().unwrap();
        let next = tau_derivative(ak, k2).mul(den).sub(&ak.mul(&dd).scale(&FracElem::from_int(k as i64 + 1)));
        a.push(next);
    }
    a
}

/// Numerator of `E(u, ...)` for `u = N/D`, multiplied by the smallest power of
/// `D` that clears all denominators.
pub fn trig_residual(target: &Poly<FracElem>, num: &Poly<FracElem>, den: &Poly<FracElem>, k2: &FracElem) -> Poly<FracElem> {
    let a = tau_derivatives(num, den, k2, order_of(target));
    let weight = |m: &Monomial| -> u32 { m.exps().iter().enumerate().map(|(k, &e)| e * (k as u32 + 1)).sum() };
    let wmax = target.terms().map(|(m, _)| weight(m)).max().unwrap_or(0);
    let mut acc = Poly::zero();
    for (m, c) in target.terms() {
        let mut t = Poly::constant(c.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                t = t.mul(&a[v].pow(e));
            }
        }
        acc = acc.add(&t.mul(&den.pow(wmax - weight(m))));
    }
    acc
}

/// Residual of a closed form substituted into `target`; zero iff it is a
/// solution. Trig and rational forms give a polynomial in `tau`.
pub fn residual(form: &ClosedForm, target: &Poly<FracElem>) -> Poly<FracElem> {
    match form {
        ClosedForm::Elliptic(e) => elliptic_residual(target, &e.as_poly(), &e.g2, &e.g3),
        ClosedForm::Trig(t) => trig_residual(target, &tau_poly(&t.num), &tau_poly(&t.den), &t.k2),
        ClosedForm::Rational(r) => trig_residual(target, &tau_poly(&r.num), &tau_poly(&r.den), &FracElem::zero()),
    }
}

/// Trigonometric form obtained from an elliptic one on the locus where
/// `g2 = 3 d^2`, `g3 = -d^3`: `wp = tau^2 - d`, `wp' = 2 tau (3d/2 - tau^2)`.
pub fn elliptic_to_trig(e: &EllipticForm, d: &FracElem) -> TrigForm {
    let wp = Poly::from_terms([(Monomial::var(0, 2), FracElem::one()), (Monomial::one(), d.neg())]);
    let wpp = Poly::from_terms([(Monomial::var(0, 3), FracElem::from_int(-2)), (Monomial::var(0, 1), d.mul(&FracElem::from_int(3)))]);
    let mut u = Poly::zero();
    for (i, c) in e.wp.iter().enumerate() {
        u = u.add(&wp.pow(i as u32).scale(c));
    }
    for (i, c) in e.wpp.iter().enumerate() {
        u = u.add(&wpp.mul(&wp.pow(i as u32)).scale(c));
    }
    let deg = u.degree_in(0) as usize;
    let num = (0..=deg).map(|i| u.coeff(&Monomial::var(0, i as u32))).collect();
    TrigForm { num, den: vec![FracElem::one()], k2: d.mul(&FracElem::from_int(6)) }
}

/// `tau = 1/chi + ...` around its pole, solving `tau' = -tau^2 + k2/4`;
/// `n` coefficients from `chi^-1`.
pub fn tau_pole_series(k2: &FracElem, n: usize) -> SeriesExpr {
    let mut t = vec![FracElem::one()];
    for j in 1..n {
        let mut s = if j == 2 { k2.mul(&FracElem::from_rat_value(crate::arith::rat(1, 4))) } else { FracElem::zero() };
        for a in 1..j {
            s = s.sub(&t[a].mul(&t[j - a]));
        }
        t.push(s.mul(&FracElem::from_rat_value(crate::arith::rat(1, j as i64 + 1))));
    }
    SeriesExpr::truncated(-1, t)
}

/// `wp = chi^-2 + g2/20 chi^2 + g3/28 chi^4 + ...`, `n` coefficients from
/// `chi^-2`.
pub fn wp_pole_series(g2: &FracElem, g3: &FracElem, n: usize) -> SeriesExpr {
    let kmax = n / 2 + 1;
    let mut c = vec![FracElem::zero(); kmax + 1];
    c[0] = FracElem::one();
    if kmax >= 2 {
        c[2] = g2.mul(&FracElem::from_rat_value(crate::arith::rat(1, 20)));
    }
    if kmax >= 3 {
        c[3] = g3.mul(&FracElem::from_rat_value(crate::arith::rat(1, 28)));
    }
    for k in 4..=kmax {
        let mut s = FracElem::zero();
        for m in 2..=k - 2 {
            s = s.add(&c[m].mul(&c[k - m]));
        }
        c[k] = s.mul(&FracElem::from_rat_value(crate::arith::rat(3, ((2 * k + 1) * (k - 3)) as i64)));
    }
    let coeffs = (0..n).map(|i| if i % 2 == 0 { c[i / 2].clone() } else { FracElem::zero() }).collect();
    SeriesExpr::truncated(-2, coeffs)
}

fn horner(coeffs: &[FracElem], x: &SeriesExpr) -> SeriesExpr {
    coeffs.iter().rev().fold(SeriesExpr::zero(), |acc, c| acc.mul(x).add(&SeriesExpr::constant(c.clone())))
}

/// Laurent series of the closed form at the pole of `wp` or of `tau`, with
/// `n` known coefficients of the building block. `None` for forms whose
/// poles sit at finite `tau`.
pub fn pole_series(form: &ClosedForm, n: usize) -> Option<SeriesExpr> {
    match form {
        ClosedForm::Elliptic(e) => {
            let w = wp_pole_series(&e.g2, &e.g3, n);
            let z = w.derivative();
            Some(horner(&e.wp, &w).add(&z.mul(&horner(&e.wpp, &w))))
        }
        ClosedForm::Trig(TrigForm { num, den, k2 }) => (den.len() == 1).then(|| horner(num, &tau_pole_series(k2, n))),
        ClosedForm::Rational(RationalForm { num, den }) => {
            (den.len() == 1).then(|| horner(num, &SeriesExpr::exact(-1, vec![FracElem::one()])))
        }
    }
}

/// Whether the closed form's pole expansion agrees with `series` on every
/// coefficient both know. `None` when the form has no pole at the origin
/// of its chart or the leading orders differ.
pub fn matches_series(form: &ClosedForm, series: &SeriesExpr) -> Option<bool> {
    let n = series.known().unwrap_or(series.coeffs.len()) + 4;
    let ps = pole_series(form, n)?;
    let lead = ps.valuation()?;
    if lead != series.offset {
        return None;
    }
    let hi = series.offset + series.known().unwrap_or(series.coeffs.len()) as i64;
    let hi = ps.order.map_or(hi, |o| hi.min(o));
    Some((series.offset..hi).all(|e| ps.coeff(e).ok() == series.coeff(e).ok()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{parse_frac, parse_params, parse_poly, u_var};

    #[test]
    fn tau_solves_riccati() {
        let mut syms = parse_params("").unwrap();
        let k = syms.add("k2", crate::arith::SymbolKind::Param, true);
        let target = parse_poly("u1 + u0^2 - k2/4", &syms, &u_var).unwrap();
        let t = TrigForm { num: vec![FracElem::zero(), FracElem::one()], den: vec![FracElem::one()], k2: FracElem::var(k) };
        assert!(residual(&ClosedForm::Trig(t), &target).is_zero());
    }

    #[test]
    fn kdv_elliptic_identity() {
        let syms = parse_params("a != 0, g2, g3").unwrap();
        let target = parse_poly("u3 - (6/a)*u0*u1", &syms, &u_var).unwrap();
        let e = EllipticForm {
            wp: vec![FracElem::zero(), parse_frac("2*a", &syms).unwrap()],
            wpp: vec![],
            g2: FracElem::var(1),
            g3: FracElem::var(2),
        };
        assert!(residual(&ClosedForm::Elliptic(e), &target).is_zero());
    }

    #[test]
    fn pole_expansions() {
        let syms = parse_params("K, g2, g3").unwrap();
        // (k/2) coth(k chi/2) = 1/chi + K chi/12 - K^2 chi^3/720 + ...
        let t = tau_pole_series(&FracElem::var(0), 5);
        assert_eq!(t.coeffs[2], parse_frac("K/12", &syms).unwrap());
        assert_eq!(t.coeffs[4], parse_frac("-K^2/720", &syms).unwrap());
        let w = wp_pole_series(&FracElem::var(1), &FracElem::var(2), 12);
        assert_eq!(w.coeffs[8], parse_frac("g2^2/1200", &syms).unwrap());
    }

    #[test]
    fn degenerate_wp_satisfies_weierstrass() {
        let syms = parse_params("d != 0").unwrap();
        let d = FracElem::var(0);
        let e = EllipticForm {
            wp: vec![FracElem::zero(), FracElem::one()],
            wpp: vec![],
            g2: d.mul(&d).mul(&FracElem::from_int(3)),
            g3: d.mul(&d).mul(&d).neg(),
        };
        // wp'^2 = 4 wp^3 - g2 wp - g3 as a first-order equation in u = wp
        let target = parse_poly("u1^2 - 4*u0^3 + 3*d^2*u0 - d^3", &syms, &u_var).unwrap();
        let t = elliptic_to_trig(&e, &d);
        assert!(residual(&ClosedForm::Trig(t), &target).is_zero());
    }
}
