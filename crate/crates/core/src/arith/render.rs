//! Canonical text rendering: graded-lex order from the leading term down,
//! explicit `*` and `^`, rationals as `p/q`. The output parses back through
//! the expression parser.

use num_traits::{One, Signed};

use super::poly::{Monomial, Poly};
use super::{FracElem, MPoly, Rat, Symbols};

pub fn render_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_monomial(m: &Monomial, name: &dyn Fn(usize) -> String) -> Vec<String> {
    m.exps().iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| if e == 1 { name(v) } else { format!("{}^{}", name(v), e) }).collect()
}

/// Renders a sum of `coefficient * monomial` terms, where each coefficient
/// is already rendered as an atom together with its sign.
fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

pub fn render_poly_with(p: &MPoly, name: &dyn Fn(usize) -> String) -> String {
    let terms = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let mut factors = render_monomial(m, name);
            let a = c.abs();
            if !a.is_one() || factors.is_empty() {
                factors.insert(0, render_rat(&a));
            }
            (c.is_negative(), factors.join("*"))
        })
        .collect();
    join_terms(terms)
}

pub fn render_mpoly(p: &MPoly, syms: &Symbols) -> String {
    render_poly_with(p, &|v| syms.name(v).to_string())
}

fn is_atom(s: &str) -> bool {
    !s.contains(' ') && !s.starts_with('-')
}

fn wrap(s: String) -> String {
    if is_atom(&s) && !s.contains('/') && !s.contains('*') {
        s
    } else {
        format!("({s})")
    }
}

pub fn render_frac(f: &FracElem, syms: &Symbols) -> String {
    if f.den.is_one() {
        return render_mpoly(&f.num, syms);
    }
    // Rational coefficients in the numerator move into the denominator, so
    // 9/(40*nu) is printed instead of 9/40/nu.
    let l = f.num.terms().fold(num_bigint::BigInt::one(), |acc, (_, c)| num_integer::Integer::lcm(&acc, c.denom()));
    let q = MPoly::from_rat(Rat::from_integer(l));
    let (num, den) = (f.num.mul(&q), f.den.mul(&q));
    let (neg, num) = if num.num_terms() == 1 && num.leading_coeff().is_negative() { (true, num.neg()) } else { (false, num) };
    let (num, den) = (render_mpoly(&num, syms), render_mpoly(&den, syms));
    let num = if is_atom(&num) { num } else { format!("({num})") };
    let sign = if neg { "-" } else { "" };
    format!("{sign}{num}/{}", wrap(den))
}

/// Renders a polynomial whose coefficients are parameter fractions, e.g. an
/// ODE in `u0..uN` or a closed form in `tau`.
pub fn render_frac_poly(p: &Poly<FracElem>, syms: &Symbols, var_name: &dyn Fn(usize) -> String) -> String {
    let terms_len = p.num_terms();
    let terms = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let factors = render_monomial(m, var_name);
            let (neg, coeff) = signed_coeff(c, syms);
            let body = match (coeff.as_str(), factors.is_empty()) {
                ("1", false) => factors.join("*"),
                (_, true) if coeff.contains(' ') && !coeff.starts_with('(') && terms_len > 1 => format!("({coeff})"),
                (_, true) => coeff,
                _ => {
                    let c = if is_atom(&coeff) { coeff } else { format!("({coeff})") };
                    format!("{}*{}", c, factors.join("*"))
                }
            };
            (neg, body)
        })
        .collect();
    join_terms(terms)
}

/// Splits an overall sign off a coefficient when its numerator is a single
/// negative term, so `-3/a*u0` renders instead of `(-3)/a*u0`.
fn signed_coeff(c: &FracElem, syms: &Symbols) -> (bool, String) {
    if c.num.num_terms() == 1 && c.num.leading_coeff().is_negative() {
        (true, render_frac(&c.neg_ref(), syms))
    } else {
        (false, render_frac(c, syms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, SymbolKind};

    #[test]
    fn renders_graded_lex() {
        let mut s = Symbols::new();
        s.add("b", SymbolKind::Param, false);
        s.add("mu", SymbolKind::Param, false);
        let p = MPoly::var(0).pow(2).sub(&MPoly::var(1).scale(&rat(16, 1))).add(&MPoly::from_rat(rat(-1, 2)));
        assert_eq!(render_mpoly(&p, &s), "b^2 - 16*mu - 1/2");
        assert_eq!(render_mpoly(&MPoly::zero(), &s), "0");
    }
}
