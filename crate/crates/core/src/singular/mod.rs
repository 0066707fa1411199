//! Movable poles: dominant balances, Fuchs indices, Laurent recursion and
//! residue-sum conditions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::factor::rational_roots;
use crate::arith::render::{render_frac, render_mpoly};
use crate::arith::{rat, Coeff, Field, FracElem, MPoly, Monomial, Rat, SymbolKind, Symbols, UPoly};
use crate::ode::{AutonomousODE, SeriesError, SeriesExpr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularError {
    #[error("no movable pole: the equation admits no negative-integer dominant balance")]
    NoPoleFamily,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("logarithmic branching at Fuchs index {index}: compatibility condition {rendered} = 0 fails")]
    LogarithmRequired { index: i64, obstruction: MPoly, rendered: String },
    #[error("indicial polynomial vanishes identically; the Laurent series is not determined by the recursion")]
    DegenerateIndicial,
    #[error(transparent)]
    Truncation(#[from] SeriesError),
}

/// Leading behaviour `u ~ u0 chi^p` of one family of movable poles.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleFamily {
    pub p: i64,
    pub u0: FracElem,
    /// ODE monomials of minimal valuation.
    pub dominant: Vec<Monomial>,
    /// Their common valuation.
    pub q: i64,
    /// Multiplicity of `u0` as a root of the leading equation.
    pub multiplicity: u32,
}

/// A balance that was found but cannot be carried in the coefficient field.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcludedFamily {
    pub p: Rat,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingOrders {
    pub families: Vec<PoleFamily>,
    pub excluded: Vec<ExcludedFamily>,
}

/// Indicial polynomial `P(j)` with its integer roots.
#[derive(Clone, Debug, PartialEq)]
pub struct Indicial {
    pub poly: UPoly<FracElem>,
    /// Integer roots with multiplicities, increasing.
    pub integer_roots: Vec<(i64, u32)>,
    /// `P(j) / (lead * prod (j - r)^m)` over the integer roots.
    pub cofactor: UPoly<FracElem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentFamily {
    pub family: PoleFamily,
    pub indicial: Indicial,
    pub series: SeriesExpr,
    /// `(index, symbol)` of the arbitrary coefficients introduced.
    pub resonances: Vec<(i64, usize)>,
    pub no_log_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueCondition {
    pub power: u32,
    pub value: FracElem,
    /// Numerator of `value`; its vanishing is necessary for ellipticity.
    pub expr: MPoly,
}

fn degree_weight(m: &Monomial) -> (i64, i64) {
    let d: i64 = m.exps().iter().map(|&e| e as i64).sum();
    let w: i64 = m.exps().iter().enumerate().map(|(k, &e)| k as i64 * e as i64).sum();
    (d, w)
}

/// Falling factorial `x (x-1) ... (x-k+1)`.
fn falling(x: i64, k: usize) -> i64 {
    (0..k as i64).map(|i| x - i).product()
}

/// `(j + p)(j + p - 1)...(j + p - k + 1)` as a polynomial in `j`.
fn falling_poly(p: i64, k: usize) -> UPoly<FracElem> {
    let mut acc = UPoly::constant(FracElem::one());
    for i in 0..k as i64 {
        acc = acc.mul(&UPoly::new(vec![FracElem::from_int(p - i), FracElem::one()]));
    }
    acc
}

/// Enumerates the negative-integer balances and their leading coefficients.
pub fn leading_orders(ode: &AutonomousODE) -> Result<LeadingOrders, SingularError> {
    let terms: Vec<(Monomial, FracElem, i64, i64)> = ode
        .poly
        .terms()
        .map(|(m, c)| {
            let (d, w) = degree_weight(m);
            (m.clone(), c.clone(), d, w)
        })
        .collect();
    let mut candidates: Vec<Rat> = Vec::new();
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            if a.2 != b.2 {
                let p = rat(a.3 - b.3, a.2 - b.2);
                if p < Rat::zero() && !candidates.contains(&p) {
                    candidates.push(p);
                }
            }
        }
    }
    candidates.sort();
    candidates.reverse();
    let mut families = Vec::new();
    let mut excluded = Vec::new();
    for p in candidates {
        let val = |t: &(Monomial, FracElem, i64, i64)| Rat::from_integer(t.2.into()) * &p - Rat::from_integer(t.3.into());
        let vmin = terms.iter().map(val).min().unwrap();
        let dom: Vec<&(Monomial, FracElem, i64, i64)> = terms.iter().filter(|t| val(t) == vmin).collect();
        let mut degrees: Vec<i64> = dom.iter().map(|t| t.2).collect();
        degrees.sort_unstable();
        degrees.dedup();
        if degrees.len() < 2 {
            continue;
        }
        if !p.is_integer() {
            excluded.push(ExcludedFamily { p: p.clone(), reason: "non-integer leading order (branch point)".into() });
            continue;
        }
        let pi: i64 = p.to_integer().try_into().unwrap();
        // Leading equation sum_d A_d c^d.
        let mut by_deg: BTreeMap<i64, FracElem> = BTreeMap::new();
        for t in &dom {
            let mut k = t.1.clone();
            for (v, &e) in t.0.exps().iter().enumerate() {
                if e > 0 {
                    k = k.mul(&FracElem::from_int(falling(pi, v).pow(e)));
                }
            }
            let slot = by_deg.entry(t.2).or_insert_with(FracElem::zero);
            *slot = slot.add(&k);
        }
        let dmin = *by_deg.keys().next().unwrap();
        let dmax = *by_deg.keys().last().unwrap();
        let coeffs: Vec<FracElem> = (dmin..=dmax).map(|d| by_deg.get(&d).cloned().unwrap_or_else(FracElem::zero)).collect();
        let lead_eq = UPoly::new(coeffs);
        let q = vmin.to_integer().try_into().unwrap();
        let dominant: Vec<Monomial> = dom.iter().map(|t| t.0.clone()).collect();
        let (roots, missing) = nonzero_roots(&lead_eq);
        for (u0, multiplicity) in roots {
            families.push(PoleFamily { p: pi, u0, dominant: dominant.clone(), q, multiplicity });
        }
        if missing > 0 {
            excluded.push(ExcludedFamily { p, reason: format!("{missing} leading coefficient(s) outside the parameter field") });
        }
    }
    if families.is_empty() {
        return Err(SingularError::NoPoleFamily);
    }
    Ok(LeadingOrders { families, excluded })
}

/// Nonzero roots of a polynomial over the parameter field that lie in the
/// field, with multiplicities, plus the count of roots that do not.
fn nonzero_roots(f: &UPoly<FracElem>) -> (Vec<(FracElem, u32)>, usize) {
    let mut out: Vec<(FracElem, u32)> = Vec::new();
    let mut missing = 0;
    for (g, mult) in f.square_free() {
        match g.degree() {
            1 => out.push((g.coeff(0).neg(), mult)),
            2 => {
                let (a, b, c) = (g.coeff(2), g.coeff(1), g.coeff(0));
                let disc = b.mul(&b).sub(&a.mul(&c).mul(&FracElem::from_int(4)));
                match disc.sqrt() {
                    Some(s) => {
                        let two_a = a.mul(&FracElem::from_int(2));
                        out.push((b.neg().add(&s).div(&two_a), mult));
                        out.push((b.neg().sub(&s).div(&two_a), mult));
                    }
                    None => missing += 2,
                }
            }
            d => {
                // Rational roots when the equation has constant coefficients.
                let consts: Option<Vec<Rat>> = g.coeffs().iter().map(|c| c.as_rat()).collect();
                match consts {
                    Some(cs) => {
                        let roots = rational_roots(&UPoly::new(cs));
                        missing += d - roots.len();
                        out.extend(roots.into_iter().map(|r| (FracElem::from_rat_value(r), mult)));
                    }
                    None => missing += d,
                }
            }
        }
    }
    out.retain(|(r, _)| !r.is_zero());
    out.sort_by_key(|(r, _)| format!("{r:?}"));
    (out, missing)
}

/// Random rational point used to probe generic behaviour.
pub fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rat> {
    (0..n).map(|_| rat(rng.gen_range(2..60) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..12))).collect()
}

/// Linearizes the dominant part about the family: `P(j)` is the coefficient
/// of `chi^(q+j)` produced by a perturbation `chi^(p+j)`.
pub fn fuchs_indices(family: &PoleFamily, ode: &AutonomousODE) -> Result<Indicial, SingularError> {
    let p = family.p;
    let c = &family.u0;
    let lead_k = |k: usize| c.mul(&FracElem::from_int(falling(p, k)));
    let mut poly = UPoly::zero();
    for m in &family.dominant {
        let coef = ode.poly.coeff(m);
        let mut full = coef.clone();
        for (k, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                full = full.mul(&Coeff::pow(&lead_k(k), e));
            }
        }
        for (k, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                let w = full.mul(&FracElem::from_int(e as i64)).div(&lead_k(k));
                poly = poly.add(&falling_poly(p, k).scale(&w));
            }
        }
    }
    if poly.is_zero() {
        return Err(SingularError::DegenerateIndicial);
    }
    if !poly.eval(&FracElem::from_int(-1)).is_zero() {
        return Err(SingularError::InternalInconsistency("-1 is not a Fuchs index".into()));
    }
    // Integer roots: candidates from a generic specialization, confirmed exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d1c);
    let nvars = ode.syms.len();
    let pt = random_point(nvars, &mut rng);
    let spec: Option<Vec<Rat>> = poly.coeffs().iter().map(|x| x.eval_rat(&pt)).collect();
    let spec = spec.ok_or_else(|| SingularError::InternalInconsistency("singular specialization".into()))?;
    let mut integer_roots = Vec::new();
    let mut cof = poly.clone();
    for r in rational_roots(&UPoly::new(spec)) {
        if !r.is_integer() {
            continue;
        }
        let rj = FracElem::from_rat_value(r.clone());
        let lin = UPoly::linear_root(&rj);
        let mut mult = 0;
        while !cof.is_zero() && cof.degree() > 0 && cof.eval(&rj).is_zero() {
            cof = cof.divrem(&lin).0;
            mult += 1;
        }
        if mult > 0 {
            integer_roots.push((r.to_integer().try_into().unwrap(), mult));
        }
    }
    integer_roots.sort();
    let cofactor = cof.scale(&poly.lead().inv());
    Ok(Indicial { poly, integer_roots, cofactor })
}

/// Renders `lead * (j - r1)^m1 * ... * cofactor` in the variable `j`.
pub fn render_indicial(ind: &Indicial, syms: &Symbols) -> String {
    let mut parts = Vec::new();
    let lead = ind.poly.lead();
    if !lead.is_one() {
        let s = render_frac(&lead, syms);
        parts.push(if s.contains(' ') { format!("({s})") } else { s });
    }
    for &(r, m) in &ind.integer_roots {
        let lin = match r.cmp(&0) {
            std::cmp::Ordering::Less => format!("(j + {})", -r),
            std::cmp::Ordering::Equal => "j".to_string(),
            std::cmp::Ordering::Greater => format!("(j - {r})"),
        };
        parts.push(if m > 1 { format!("{lin}^{m}") } else { lin });
    }
    if ind.cofactor.degree() > 0 {
        parts.push(format!("({})", render_upoly(&ind.cofactor, syms, "j")));
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Renders a univariate polynomial with fraction coefficients.
pub fn render_upoly(p: &UPoly<FracElem>, syms: &Symbols, var: &str) -> String {
    let poly = crate::arith::Poly::from_terms(p.coeffs().iter().enumerate().map(|(e, c)| (Monomial::var(0, e as u32), c.clone())));
    crate::arith::render::render_frac_poly(&poly, syms, &|_| var.to_string())
}

/// Default truncation `(m + 1)^2 + 2`.
pub fn default_terms(m: i64) -> usize {
    ((m + 1) * (m + 1) + 2) as usize
}

/// Computes `u_0..u_J` by the triangular recursion. Resonance symbols are
/// added to `syms`; `tag` distinguishes the families of one equation.
pub fn laurent_expand(
    family: &PoleFamily,
    indicial: &Indicial,
    ode: &AutonomousODE,
    terms: usize,
    syms: &mut Symbols,
    tag: usize,
) -> Result<LaurentFamily, SingularError> {
    let mut coeffs = vec![family.u0.clone()];
    let mut resonances = Vec::new();
    let check = ode.substitute_series(&SeriesExpr::truncated(family.p, coeffs.clone()));
    if !check.coeff(family.q)?.is_zero() {
        return Err(SingularError::InternalInconsistency("leading coefficient does not balance".into()));
    }
    for j in 1..=terms {
        coeffs.push(FracElem::zero());
        let s = SeriesExpr::truncated(family.p, coeffs.clone());
        let r = ode.substitute_series(&s).coeff(family.q + j as i64)?;
        let pj = indicial.poly.eval(&FracElem::from_int(j as i64));
        if !pj.is_zero() {
            coeffs[j] = r.neg().div(&pj);
        } else if r.is_zero() {
            let base = format!("U{j}");
            let name = if tag == 0 { syms.fresh(&base) } else { syms.fresh(&format!("{base}_{}", tag + 1)) };
            let v = syms.add(&name, SymbolKind::Resonance, false);
            coeffs[j] = FracElem::var(v);
            resonances.push((j as i64, v));
        } else {
            return Err(SingularError::LogarithmRequired { index: j as i64, rendered: render_mpoly(&r.num, syms), obstruction: r.num });
        }
    }
    Ok(LaurentFamily {
        family: family.clone(),
        indicial: indicial.clone(),
        series: SeriesExpr::truncated(family.p, coeffs),
        resonances,
        no_log_ok: true,
    })
}

/// Sum over families of the `chi^-1` coefficient of `u^power`.
pub fn residue_conditions(families: &[LaurentFamily], power: u32) -> Result<Vec<ResidueCondition>, SingularError> {
    let mut total = FracElem::zero();
    for f in families {
        let s = f.series.pow(power);
        total = total.add(&s.coeff(-1)?);
    }
    if total.is_zero() {
        return Ok(Vec::new());
    }
    Ok(vec![ResidueCondition { power, expr: total.num.clone(), value: total }])
}

/// Renders a family's series as `c0*chi^p + ...` for reports.
pub fn render_series(s: &SeriesExpr, syms: &Symbols) -> String {
    let power = |e: i64| if e < 0 { format!("chi^({e})") } else { format!("chi^{e}") };
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (j, c) in s.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = s.offset + j as i64;
        let cs = render_frac(c, syms);
        let (neg, cs) = match cs.strip_prefix('-') {
            Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
            _ => (false, cs),
        };
        let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
        let term = match (e, cs.as_str()) {
            (0, _) => cs,
            (_, "1") => power(e),
            _ => format!("{cs}*{}", power(e)),
        };
        parts.push((neg, term));
    }
    if parts.is_empty() {
        parts.push((false, "0".into()));
    }
    if let Some(o) = s.order {
        parts.push((false, format!("O({})", power(o))));
    }
    let mut out = String::new();
    for (i, (neg, t)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Field, Poly};

    fn ks() -> AutonomousODE {
        AutonomousODE::parse("nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A", "nu != 0, b, mu, A").unwrap()
    }

    #[test]
    fn ks_leading_order_and_indices() {
        let ode = ks();
        let lo = leading_orders(&ode).unwrap();
        assert_eq!(lo.families.len(), 1);
        let f = &lo.families[0];
        assert_eq!(f.p, -3);
        assert_eq!(f.u0, FracElem::var(0).mul(&FracElem::from_int(120)));
        let ind = fuchs_indices(f, &ode).unwrap();
        assert_eq!(ind.integer_roots, vec![(-1, 1)]);
        // nu (j+1)(j^2 - 13 j + 60)
        let nu = FracElem::var(0);
        let expect = UPoly::new(vec![FracElem::from_int(1), FracElem::one()])
            .mul(&UPoly::new(vec![FracElem::from_int(60), FracElem::from_int(-13), FracElem::one()]))
            .scale(&nu);
        assert_eq!(ind.poly, expect);
        assert_eq!(render_indicial(&ind, &ode.syms), "nu*(j + 1)*(j^2 - 13*j + 60)");
    }

    #[test]
    fn riccati_family_terminates() {
        let ode = AutonomousODE::parse("u1 + u0^2", "").unwrap();
        let lo = leading_orders(&ode).unwrap();
        assert_eq!(lo.families.len(), 1);
        assert_eq!((lo.families[0].p, lo.families[0].u0.clone()), (-1, FracElem::one()));
        let ind = fuchs_indices(&lo.families[0], &ode).unwrap();
        assert_eq!(ind.integer_roots, vec![(-1, 1)]);
        let mut syms = ode.syms.clone();
        let lf = laurent_expand(&lo.families[0], &ind, &ode, 6, &mut syms, 0).unwrap();
        assert!(lf.series.coeffs[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn no_pole_family() {
        let ode = AutonomousODE::parse("u1 - u0", "").unwrap();
        assert_eq!(leading_orders(&ode), Err(SingularError::NoPoleFamily));
    }

    #[test]
    fn kdv_resonances_and_parity() {
        let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let lo = leading_orders(&ode).unwrap();
        let f = &lo.families[0];
        let ind = fuchs_indices(f, &ode).unwrap();
        assert_eq!(ind.integer_roots, vec![(-1, 1), (4, 1), (6, 1)]);
        let mut syms = ode.syms.clone();
        let lf = laurent_expand(f, &ind, &ode, 9, &mut syms, 0).unwrap();
        assert_eq!(lf.resonances.iter().map(|r| r.0).collect::<Vec<_>>(), vec![4, 6]);
        for j in [1, 3, 5, 7, 9] {
            assert!(lf.series.coeffs[j].is_zero());
        }
        assert!(residue_conditions(&[lf], 1).unwrap().is_empty());
        let _ = Poly::<FracElem>::zero();
        let _ = FracElem::one().inv();
    }

    fn parse_frac_in(t: &str, syms: &Symbols) -> FracElem {
        crate::ode::parse_frac(t, syms).unwrap()
    }

    #[test]
    fn ks_series_coefficients() {
        let ode = ks();
        let f = leading_orders(&ode).unwrap().families.remove(0);
        let ind = fuchs_indices(&f, &ode).unwrap();
        let mut syms = ode.syms.clone();
        let lf = laurent_expand(&f, &ind, &ode, 3, &mut syms, 0).unwrap();
        let expect = ["120*nu", "-15*b", "15*(16*mu*nu - b^2)/(76*nu)", "b*(56*mu*nu - 13*b^2)/(608*nu^2)"];
        for (j, e) in expect.iter().enumerate() {
            assert_eq!(lf.series.coeffs[j], parse_frac_in(e, &syms), "u{j}");
        }
        assert!(lf.resonances.is_empty());
    }

    #[test]
    fn kdv_sixth_coefficient() {
        let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let f = leading_orders(&ode).unwrap().families.remove(0);
        let ind = fuchs_indices(&f, &ode).unwrap();
        let mut syms = ode.syms.clone();
        let lf = laurent_expand(&f, &ind, &ode, 8, &mut syms, 0).unwrap();
        assert_eq!(lf.series.coeffs[0], parse_frac_in("2*a", &syms));
        assert_eq!(lf.series.coeffs[2], FracElem::zero());
        assert_eq!(lf.series.coeffs[8], parse_frac_in("U4^2/(6*a)", &syms));
    }

    #[test]
    fn damped_cubic_needs_logarithms() {
        let ode = AutonomousODE::parse("u2 + u1 - 2*u0^3", "").unwrap();
        let lo = leading_orders(&ode).unwrap();
        let f = &lo.families[0];
        let ind = fuchs_indices(f, &ode).unwrap();
        let mut syms = ode.syms.clone();
        match laurent_expand(f, &ind, &ode, 6, &mut syms, 0) {
            Err(SingularError::LogarithmRequired { index, obstruction, .. }) => {
                assert_eq!(index, 4);
                assert!(!obstruction.is_zero());
            }
            other => panic!("expected a logarithmic obstruction, got {other:?}"),
        }
    }
}
