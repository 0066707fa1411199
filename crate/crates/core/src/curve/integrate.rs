//! Integration of first-order curves `F(u, u') = 0` by coefficient
//! ansätze: Weierstrass for genus one, rational in `tau` for genus zero.

use crate::arith::factor::factor_limited;
use crate::arith::render::render_mpoly;
use crate::arith::{Coeff, Field, FracElem, MPoly, Monomial, Poly, SymbolKind, Symbols, UPoly};
use crate::ode::AutonomousODE;
use crate::singular::leading_orders;
use crate::subeq::solve::apply_constraints;

use super::ansatz::{Ansatz, AnsatzOutcome};
use super::closed::{
    elliptic_residual, elliptic_to_trig, tau_poly, trig_residual, ClosedForm, ClosedFormSolution, EllipticForm, RationalForm, TrigForm,
};
use super::CurveError;

/// Pole order and leading coefficient of one movable-pole family of `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleHint {
    /// `u ~ u0 chi^(-p)`.
    pub p: i64,
    pub u0: FracElem,
}

/// Pole families of an ODE of any order.
pub fn pole_hints_of(ode: &AutonomousODE) -> Vec<PoleHint> {
    match leading_orders(ode) {
        Ok(lo) => lo.families.into_iter().map(|fam| PoleHint { p: -fam.p, u0: fam.u0 }).collect(),
        Err(_) => Vec::new(),
    }
}

/// Pole families of `F(u, u') = 0` viewed as a first-order ODE.
pub fn pole_hints(f: &Poly<FracElem>, syms: &Symbols) -> Vec<PoleHint> {
    pole_hints_of(&AutonomousODE { order: 1, poly: f.clone(), syms: syms.clone() })
}

fn add_unknown(syms: &mut Symbols, base: &str) -> usize {
    let name = syms.fresh(base);
    syms.add(&name, SymbolKind::Aux, false)
}

fn equations(residual: &Poly<FracElem>) -> Vec<MPoly> {
    residual.terms().map(|(_, c)| c.num.clone()).collect()
}

fn no_closed_form(reason: &str, out: &AnsatzOutcome, syms: &Symbols) -> CurveError {
    CurveError::NoClosedForm {
        reason: reason.to_string(),
        system: out.stuck.iter().flatten().take(8).map(|p| render_mpoly(p, syms)).collect(),
    }
}

fn distinct_orders(hints: &[PoleHint]) -> Vec<i64> {
    let mut ps: Vec<i64> = hints.iter().map(|h| h.p).collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// `u = sum c_i wp^i + sum d_i wp' wp^i` with `2i + 3e <= P`, the top
/// coefficient fixed by the pole family.
pub fn integrate_genus1(f: &Poly<FracElem>, syms: &Symbols, hints: &[PoleHint]) -> Result<Vec<ClosedFormSolution>, CurveError> {
    weierstrass_ansatz(f, syms, hints, false)
}

/// As [`integrate_genus1`] but for any target (such as the ODE itself),
/// imposing parameter constraints where the determining equations need them.
pub fn integrate_elliptic_constrained(
    f: &Poly<FracElem>,
    syms: &Symbols,
    hints: &[PoleHint],
) -> Result<Vec<ClosedFormSolution>, CurveError> {
    weierstrass_ansatz(f, syms, hints, true)
}

fn weierstrass_ansatz(
    f: &Poly<FracElem>,
    syms: &Symbols,
    hints: &[PoleHint],
    allow_constraints: bool,
) -> Result<Vec<ClosedFormSolution>, CurveError> {
    let mut found: Vec<ClosedFormSolution> = Vec::new();
    let mut last = AnsatzOutcome::default();
    let mut work = syms.clone();
    for p in distinct_orders(hints) {
        if p < 2 {
            continue;
        }
        let p = p as usize;
        let cs: Vec<usize> = (0..=p / 2).map(|i| add_unknown(&mut work, &format!("c{i}"))).collect();
        let ds: Vec<usize> =
            if p >= 3 { (0..=(p - 3) / 2).map(|i| add_unknown(&mut work, &format!("e{i}"))).collect() } else { Vec::new() };
        let (g2, g3) = (add_unknown(&mut work, "g2"), add_unknown(&mut work, "g3"));
        let top = if p.is_multiple_of(2) { cs[p / 2] } else { ds[(p - 3) / 2] };
        for h in hints.iter().filter(|h| h.p == p as i64) {
            let lead = if p.is_multiple_of(2) { h.u0.clone() } else { h.u0.mul(&FracElem::from_rat_value(crate::arith::rat(-1, 2))) };
            let coeff = |v: usize| if v == top { lead.clone() } else { FracElem::var(v) };
            let form = EllipticForm {
                wp: cs.iter().map(|&v| coeff(v)).collect(),
                wpp: ds.iter().map(|&v| coeff(v)).collect(),
                g2: FracElem::var(g2),
                g3: FracElem::var(g3),
            };
            let res = elliptic_residual(f, &form.as_poly(), &form.g2, &form.g3);
            let unknowns: Vec<usize> = cs.iter().chain(ds.iter()).copied().filter(|&v| v != top).chain([g2, g3]).collect();
            let solver = Ansatz { syms: &work, unknowns, nonzero_unknowns: Vec::new(), allow_constraints };
            let out = solver.solve(&equations(&res));
            for s in &out.solutions {
                let img = |v: usize| {
                    if v == top {
                        Some(lead.clone())
                    } else {
                        s.value(v).or_else(|| s.substitutions.iter().find(|(w, _)| *w == v).map(|(_, x)| x)).cloned()
                    }
                };
                let sol = ClosedForm::Elliptic(form.clone()).substitute(&img);
                let sol = ClosedFormSolution { form: sol, constraints: s.constraints.clone(), substitutions: s.substitutions.clone() };
                if !found.contains(&sol) {
                    found.push(sol);
                }
            }
            last = out;
        }
    }
    if found.is_empty() {
        return Err(no_closed_form("no Weierstrass ansatz fits the pole structure", &last, &work));
    }
    Ok(found)
}

/// Denominator and numerator degrees tried when none are given.
fn default_bounds(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for dd in 0..=2usize {
        for nd in [dd + p, dd.wrapping_sub(p)] {
            if nd <= dd + p && !out.contains(&(nd, dd)) {
                out.push((nd, dd));
            }
        }
    }
    out
}

/// `u = N(tau)/D(tau)` with `D` monic, its subleading coefficient set to zero
/// by the choice of origin, and `tau' = -tau^2 + K/4`.
pub fn integrate_genus0(
    f: &Poly<FracElem>,
    syms: &Symbols,
    hints: &[PoleHint],
    bounds: Option<(usize, usize)>,
) -> Result<Vec<ClosedFormSolution>, CurveError> {
    let orders = distinct_orders(hints);
    let schedule: Vec<(usize, usize)> = match bounds {
        Some(b) => vec![b],
        None => orders.iter().filter(|&&p| p > 0).flat_map(|&p| default_bounds(p as usize)).collect(),
    };
    let mut last = AnsatzOutcome::default();
    let mut work = syms.clone();
    for (nd, dd) in schedule {
        let (found, out) = genus0_attempt(f, &mut work, hints, nd, dd);
        if !found.is_empty() {
            return Ok(found);
        }
        last = out;
    }
    Err(no_closed_form("no rational ansatz in tau fits", &last, &work))
}

fn genus0_attempt(
    f: &Poly<FracElem>,
    work: &mut Symbols,
    hints: &[PoleHint],
    nd: usize,
    dd: usize,
) -> (Vec<ClosedFormSolution>, AnsatzOutcome) {
    let ns: Vec<usize> = (0..=nd).map(|i| add_unknown(work, &format!("n{i}"))).collect();
    let es: Vec<usize> = (0..dd.saturating_sub(1)).map(|i| add_unknown(work, &format!("m{i}"))).collect();
    let k2 = add_unknown(work, "K");
    let mut den: Vec<FracElem> = es.iter().map(|&v| FracElem::var(v)).collect();
    if dd >= 1 {
        den.push(FracElem::zero());
    }
    den.push(FracElem::one());
    let top = ns[nd];
    let mut leads: Vec<Option<FracElem>> =
        hints.iter().filter(|h| h.p >= 0 && nd as i64 - dd as i64 == h.p).map(|h| Some(h.u0.clone())).collect();
    if leads.is_empty() {
        leads.push(None);
    }
    let mut found = Vec::new();
    let mut last = AnsatzOutcome::default();
    for lead in leads {
        let num: Vec<FracElem> =
            ns.iter().map(|&v| if v == top { lead.clone().unwrap_or(FracElem::var(v)) } else { FracElem::var(v) }).collect();
        let res = trig_residual(f, &tau_poly(&num), &tau_poly(&den), &FracElem::var(k2));
        let unknowns: Vec<usize> =
            ns.iter().copied().filter(|&v| lead.is_none() || v != top).chain(es.iter().copied()).chain([k2]).collect();
        let nonzero = if lead.is_none() && nd > 0 { vec![top] } else { Vec::new() };
        let solver = Ansatz { syms: work, unknowns, nonzero_unknowns: nonzero, allow_constraints: false };
        let out = solver.solve(&equations(&res));
        for s in &out.solutions {
            let img = |v: usize| s.value(v).cloned();
            let n: Vec<FracElem> = num.iter().map(|c| c.substitute(&img)).collect();
            let d: Vec<FracElem> = den.iter().map(|c| c.substitute(&img)).collect();
            if !coprime_nonconstant(&n, &d) {
                continue;
            }
            let k = FracElem::var(k2).substitute(&img);
            let form = if k.is_zero() {
                ClosedForm::Rational(RationalForm { num: n, den: d })
            } else {
                ClosedForm::Trig(TrigForm { num: n, den: d, k2: k })
            };
            let sol = ClosedFormSolution { form, constraints: Vec::new(), substitutions: Vec::new() };
            if !found.contains(&sol) {
                found.push(sol);
            }
        }
        last = out;
    }
    (found, last)
}

fn coprime_nonconstant(n: &[FracElem], d: &[FracElem]) -> bool {
    let un = UPoly::new(n.to_vec());
    let ud = UPoly::new(d.to_vec());
    if un.is_zero() || (un.degree() == 0 && ud.degree() == 0) {
        return false;
    }
    un.gcd(&ud).degree() == 0
}

/// Classification of Weierstrass invariants by the discriminant.
#[derive(Clone, Debug, PartialEq)]
pub enum Degeneracy {
    Elliptic,
    /// `g2 = 3 d^2`, `g3 = -d^3`.
    Trigonometric(FracElem),
    Rational,
}

pub fn classify_invariants(g2: &FracElem, g3: &FracElem) -> Degeneracy {
    if g2.is_zero() && g3.is_zero() {
        return Degeneracy::Rational;
    }
    let disc = g2.mul(g2).mul(g2).sub(&g3.mul(g3).mul(&FracElem::from_int(27)));
    if !disc.is_zero() || g2.is_zero() {
        return Degeneracy::Elliptic;
    }
    Degeneracy::Trigonometric(g3.mul(&FracElem::from_int(-3)).div(g2))
}

/// Trigonometric or rational degenerations of an elliptic solution on the
/// factors of the discriminant `g2^3 - 27 g3^2`.
pub fn degenerate_check(sol: &ClosedFormSolution, syms: &Symbols) -> Vec<ClosedFormSolution> {
    let ClosedForm::Elliptic(e) = &sol.form else { return Vec::new() };
    let disc = e.g2.mul(&e.g2).mul(&e.g2).sub(&e.g3.mul(&e.g3).mul(&FracElem::from_int(27)));
    let mut out = Vec::new();
    if disc.is_zero() {
        out.extend(degenerate_form(e, sol.constraints.clone(), sol.substitutions.clone()));
        return out;
    }
    let nz = syms.nonzero_indices();
    let stripped = disc.num.strip_monomial_factors(&nz);
    if stripped.is_constant() {
        return out;
    }
    for factor in factor_limited(&stripped).factors {
        let mut constraints = sol.constraints.clone();
        constraints.push(factor.poly.clone());
        let Some(subs) = apply_constraints(&constraints, syms) else { continue };
        let img = |v: usize| subs.iter().find(|(w, _)| *w == v).map(|(_, x)| x.clone());
        let ClosedForm::Elliptic(se) = ClosedForm::Elliptic(e.clone()).substitute(&img) else { unreachable!() };
        out.extend(degenerate_form(&se, constraints, subs));
    }
    out
}

fn degenerate_form(e: &EllipticForm, constraints: Vec<MPoly>, subs: Vec<(usize, FracElem)>) -> Option<ClosedFormSolution> {
    let form = match classify_invariants(&e.g2, &e.g3) {
        Degeneracy::Elliptic => return None,
        Degeneracy::Rational => {
            let t = elliptic_to_trig(e, &FracElem::zero());
            ClosedForm::Rational(RationalForm { num: t.num, den: t.den })
        }
        Degeneracy::Trigonometric(d) => ClosedForm::Trig(elliptic_to_trig(e, &d)),
    };
    Some(ClosedFormSolution { form, constraints, substitutions: subs })
}

/// Canonical representative of `f` modulo the constraint polynomials: each
/// constraint with a constant leading coefficient in some variable reduces
/// that variable's degree below its own.
pub fn reduce_mod_locus(f: &FracElem, constraints: &[MPoly]) -> FracElem {
    let mut num = f.num.clone();
    let mut den = f.den.clone();
    for c in constraints {
        let Some(v) = c
            .vars()
            .into_iter()
            .filter(|&v| c.to_univariate(v).last().is_some_and(|l| l.is_constant()))
            .max_by_key(|&v| (c.degree_in(v), v))
        else {
            continue;
        };
        let n = rem_in(&num, c, v);
        let d = rem_in(&den, c, v);
        if !d.is_zero() {
            num = n;
            den = d;
        }
    }
    FracElem::new(num, den)
}

fn rem_in(p: &MPoly, c: &MPoly, v: usize) -> MPoly {
    let dc = c.degree_in(v);
    let lc = c.to_univariate(v).last().unwrap().constant_term();
    let mut r = p.clone();
    while !r.is_zero() && r.degree_in(v) >= dc {
        let dr = r.degree_in(v);
        let top = r.to_univariate(v).pop().unwrap();
        let shift = MPoly::monomial(Monomial::var(v, dr - dc), lc.inv());
        r = r.sub(&top.mul(&shift).mul(c));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::closed::residual;
    use crate::ode::{parse_frac, parse_params, parse_poly, u_var};

    #[test]
    fn kdv_subequation_is_weierstrass() {
        let syms = parse_params("a != 0, U4, U6").unwrap();
        let f = parse_poly("u1^2 - (2/a)*u0^3 + 20*U4*u0 + 56*a*U6", &syms, &u_var).unwrap();
        let hints = pole_hints(&f, &syms);
        assert_eq!(hints.len(), 1);
        let sols = integrate_genus1(&f, &syms, &hints).unwrap();
        assert_eq!(sols.len(), 1);
        let ClosedForm::Elliptic(e) = &sols[0].form else { panic!() };
        assert_eq!(e.wp, vec![FracElem::zero(), parse_frac("2*a", &syms).unwrap()]);
        assert_eq!(e.g2, parse_frac("10*U4/a", &syms).unwrap());
        assert_eq!(e.g3, parse_frac("14*U6/a", &syms).unwrap());
        assert!(residual(&sols[0].form, &f).is_zero());
    }

    #[test]
    fn rational_curve_with_finite_poles() {
        let syms = parse_params("").unwrap();
        let f = parse_poly("2*u1^2 + (24*u0^2 - 3)*u1 + 72*u0^4 - 17*u0^2 + 1", &syms, &u_var).unwrap();
        let sols = integrate_genus0(&f, &syms, &pole_hints(&f, &syms), Some((1, 2))).unwrap();
        let want = TrigForm {
            num: vec![FracElem::zero(), FracElem::one()],
            den: vec![FracElem::from_int(2), FracElem::zero(), FracElem::one()],
            k2: FracElem::from_int(4),
        };
        assert!(sols.iter().any(|s| s.form == ClosedForm::Trig(want.clone())), "{sols:?}");
        for s in &sols {
            assert!(residual(&s.form, &f).is_zero());
        }
    }

    #[test]
    fn riccati_has_tanh_and_rational_degeneration() {
        let syms = parse_params("c").unwrap();
        let f = parse_poly("u1 + u0^2 - c", &syms, &u_var).unwrap();
        let sols = integrate_genus0(&f, &syms, &pole_hints(&f, &syms), None).unwrap();
        let ClosedForm::Trig(t) = &sols[0].form else { panic!("{sols:?}") };
        assert_eq!(t.k2, parse_frac("4*c", &syms).unwrap());
    }

    #[test]
    fn invariant_classes() {
        let syms = parse_params("d != 0").unwrap();
        let g2 = parse_frac("3*d^2", &syms).unwrap();
        let g3 = parse_frac("-d^3", &syms).unwrap();
        assert_eq!(classify_invariants(&g2, &g3), Degeneracy::Trigonometric(FracElem::var(0)));
        assert_eq!(classify_invariants(&FracElem::zero(), &FracElem::zero()), Degeneracy::Rational);
        assert_eq!(classify_invariants(&g2, &FracElem::zero()), Degeneracy::Elliptic);
    }

    #[test]
    fn weierstrass_is_its_own_solution() {
        let syms = parse_params("g2, g3").unwrap();
        let f = parse_poly("u1^2 - 4*u0^3 + g2*u0 + g3", &syms, &u_var).unwrap();
        let sols = integrate_genus1(&f, &syms, &pole_hints(&f, &syms)).unwrap();
        let ClosedForm::Elliptic(e) = &sols[0].form else { panic!() };
        assert_eq!(e.wp, vec![FracElem::zero(), FracElem::one()]);
        assert_eq!((e.g2.clone(), e.g3.clone()), (FracElem::var(0), FracElem::var(1)));
    }

    #[test]
    fn ks_ode_elliptic_needs_the_locus() {
        let ode = AutonomousODE::parse("nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A", "nu != 0, b, mu, A").unwrap();
        let sols = integrate_elliptic_constrained(&ode.poly, &ode.syms, &pole_hints_of(&ode)).unwrap();
        assert_eq!(sols.len(), 1, "{sols:?}");
        let s = &sols[0];
        let want = parse_frac("b^2 - 16*mu*nu", &ode.syms).unwrap().num;
        assert_eq!(s.constraints.len(), 1);
        assert_eq!(s.constraints[0].monic(), want.monic());
        let ClosedForm::Elliptic(e) = &s.form else { panic!() };
        let r = |f: &FracElem| reduce_mod_locus(f, &s.constraints);
        assert_eq!(r(&e.g2), parse_frac("mu^2/(12*nu^2)", &ode.syms).unwrap());
        assert_eq!(r(&e.g3), parse_frac("(13*mu^3 + nu*A)/(1080*nu^3)", &ode.syms).unwrap());
        assert_eq!(r(&e.wp[0]), parse_frac("-b*mu/(4*nu)", &ode.syms).unwrap());
    }

    #[test]
    fn locus_reduction() {
        let syms = parse_params("nu != 0, b, mu").unwrap();
        let c = parse_frac("b^2 - 16*mu*nu", &syms).unwrap().num;
        let f = parse_frac("-b^3/(64*nu^2)", &syms).unwrap();
        assert_eq!(reduce_mod_locus(&f, &[c]), parse_frac("-b*mu/(4*nu)", &syms).unwrap());
    }
}
