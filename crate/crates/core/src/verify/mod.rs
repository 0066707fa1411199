//! Exact and numeric certification of subequations and closed forms.

use thiserror::Error;

use crate::arith::render::{render_frac, render_frac_poly};
use crate::arith::{Coeff, Field, FracElem, Poly, Symbols};
use crate::curve::closed::{residual, ClosedFormSolution};
use crate::curve::integrate::reduce_mod_locus;
use crate::ode::series::{derivatives, eval_poly_on_series, SeriesExpr};
use crate::ode::AutonomousODE;

pub mod numeric;
pub mod wp;

pub use numeric::{sample_parameters, verify_numeric, NumericOptions};
pub use wp::wp_eval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("every sample point hit a singularity (seed {seed})")]
    AllPointsSingular { seed: u64 },
    #[error("parameter specialization is singular: {0}")]
    BadSpecialization(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub exact_ok: bool,
    /// Remainder after substitution; zero when `exact_ok`.
    pub exact_remainder: Poly<FracElem>,
    pub numeric_max_residual: Option<f64>,
    /// Sample points `(re, im)` of the numeric check.
    pub sample_points: Vec<(f64, f64)>,
    pub seed: Option<u64>,
    /// Kind of the form checked; names the remainder's variables.
    pub kind: &'static str,
}

impl VerificationReport {
    fn var_name(&self) -> impl Fn(usize) -> String {
        let elliptic = self.kind == "elliptic";
        move |v| match (elliptic, v) {
            (true, 0) => "wp".into(),
            (true, _) => "wp'".into(),
            _ => "tau".into(),
        }
    }

    pub fn render_remainder(&self, syms: &Symbols) -> String {
        render_frac_poly(&self.exact_remainder, syms, &self.var_name())
    }

    /// Leading term of a nonzero remainder.
    pub fn first_nonzero(&self, syms: &Symbols) -> Option<String> {
        let (m, c) = self.exact_remainder.terms().last()?;
        let lead = Poly::from_terms([(m.clone(), c.clone())]);
        Some(render_frac_poly(&lead, syms, &self.var_name()))
    }
}

fn substitution_image(sol: &ClosedFormSolution) -> impl Fn(usize) -> Option<FracElem> + '_ {
    move |v| sol.substitutions.iter().find(|(w, _)| *w == v).map(|(_, f)| f.clone())
}

/// Substitutes the closed form into the ODE on the branch locus; the
/// remainder must vanish identically.
pub fn verify_exact(sol: &ClosedFormSolution, ode: &AutonomousODE) -> VerificationReport {
    let img = substitution_image(sol);
    let target = ode.poly.map_coeffs(|c| c.substitute(&img));
    let form = sol.form.substitute(&img);
    let rem = residual(&form, &target);
    let rem = rem.map_coeffs(|c| reduce_mod_locus(c, &sol.constraints));
    VerificationReport {
        exact_ok: rem.is_zero(),
        exact_remainder: rem,
        numeric_max_residual: None,
        sample_points: Vec::new(),
        seed: None,
        kind: sol.form.kind(),
    }
}

/// Series re-expansion of one family inside the subequation.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCheck {
    /// Exponents of `chi` checked, from the lowest.
    pub checked: (i64, i64),
    /// First nonzero coefficient `(exponent, value)`.
    pub first_nonzero: Option<(i64, FracElem)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubeqCheck {
    pub ok: bool,
    pub series: Vec<SeriesCheck>,
    /// `Some(true)` when the ODE reduces to zero on the curve `F = 0`.
    pub differential: Option<bool>,
}

impl SubeqCheck {
    pub fn describe(&self, syms: &Symbols) -> String {
        match self.series.iter().find_map(|s| s.first_nonzero.clone()) {
            Some((e, v)) => format!("coefficient of chi^{e} is {}", render_frac(&v, syms)),
            None if self.differential == Some(false) => "ODE does not reduce to zero on the curve".into(),
            None => "ok".into(),
        }
    }
}

/// Re-expands every family's series in `F(u, u')` and checks every known
/// coefficient vanishes; with an ODE also checks that it reduces to zero
/// modulo `F` once `u'' ...` are eliminated by differentiating `F`.
pub fn verify_subeq_consequence(f: &Poly<FracElem>, series: &[SeriesExpr], ode: Option<&AutonomousODE>) -> SubeqCheck {
    let mut checks = Vec::new();
    for s in series {
        let e = eval_poly_on_series(f, &derivatives(s, 1));
        let known = e.known().unwrap_or(e.coeffs.len());
        let first = e.coeffs.iter().take(known).position(|c| !c.is_zero());
        checks.push(SeriesCheck {
            checked: (e.offset, e.offset + known as i64 - 1),
            first_nonzero: first.map(|i| (e.offset + i as i64, e.coeffs[i].clone())),
        });
    }
    let differential = ode.map(|o| differential_remainder(f, &o.poly).is_zero());
    let ok = checks.iter().all(|c| c.first_nonzero.is_none()) && differential != Some(false);
    SubeqCheck { ok, series: checks, differential }
}

/// Pseudo-remainder of `p` by `f` in variable 1 (`u'`).
fn prem_v(p: &Poly<FracElem>, f: &Poly<FracElem>) -> Poly<FracElem> {
    let m = f.degree_in(1);
    let fc = f.to_univariate(1);
    let lc = fc[m as usize].clone();
    let mut r = p.clone();
    while !r.is_zero() && r.degree_in(1) >= m {
        let d = r.degree_in(1);
        let top = r.to_univariate(1).pop().unwrap();
        let shift = Poly::monomial(crate::arith::Monomial::var(1, d - m), FracElem::one());
        r = r.mul(&lc).sub(&top.mul(&shift).mul(f));
    }
    r
}

/// The ODE evaluated on the curve `F(u, v) = 0` with `v = u'` and higher
/// derivatives from implicit differentiation, as a numerator reduced
/// modulo `F`. Variables: 0 = `u`, 1 = `v`.
pub fn differential_remainder(f: &Poly<FracElem>, target: &Poly<FracElem>) -> Poly<FracElem> {
    let order = target.vars().into_iter().max().unwrap_or(0);
    // With a constant leading coefficient in v, F is made monic and the
    // remainder is exact, so intermediate reductions are safe.
    let lc = f.to_univariate(1).pop().unwrap_or_else(Poly::zero);
    let monic = lc.is_constant();
    let f = &if monic { f.scale(&lc.constant_term().inv()) } else { f.clone() };
    let inner = |p: Poly<FracElem>| if monic { prem_v(&p, f) } else { p };
    let fu = f.derivative(0);
    let fv = f.derivative(1);
    let v = Poly::var(1);
    // delta'(A) = (A_u v F_v - A_v F_u v); d/dxi (A / F_v^e) = (delta'(A) F_v - e A delta'(F_v)) / F_v^(e+2)
    let dprime = |a: &Poly<FracElem>| a.derivative(0).mul(&v).mul(&fv).sub(&a.derivative(1).mul(&fu).mul(&v));
    let dfv = dprime(&fv);
    // u'' = -F_u v / F_v
    let mut derivs: Vec<(Poly<FracElem>, u32)> = vec![(Poly::var(0), 0), (v.clone(), 0), (fu.mul(&v).neg(), 1)];
    while derivs.len() <= order {
        let (a, e) = derivs.last().unwrap().clone();
        let next = dprime(&a).mul(&fv).sub(&a.mul(&dfv).scale(&FracElem::from_int(e as i64)));
        derivs.push((inner(next), e + 2));
    }
    let emax = target.terms().map(|(m, _)| m.exps().iter().enumerate().map(|(k, &x)| x * derivs[k].1).sum::<u32>()).max().unwrap_or(0);
    let mut acc = Poly::zero();
    for (m, c) in target.terms() {
        let mut t = Poly::constant(c.clone());
        let mut e = 0;
        for (k, &x) in m.exps().iter().enumerate() {
            if x > 0 {
                t = inner(t.mul(&derivs[k].0.pow(x)));
                e += x * derivs[k].1;
            }
        }
        acc = acc.add(&t.mul(&fv.pow(emax - e)));
    }
    prem_v(&acc, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::closed::{ClosedForm, EllipticForm, TrigForm};
    use crate::ode::{parse_frac, parse_poly, u_var};
    use crate::singular::{fuchs_indices, laurent_expand, leading_orders};

    #[test]
    fn exact_checks() {
        let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0, g2, g3").unwrap();
        let e = EllipticForm {
            wp: vec![FracElem::zero(), parse_frac("2*a", &ode.syms).unwrap()],
            wpp: vec![],
            g2: FracElem::var(1),
            g3: FracElem::var(2),
        };
        let sol = ClosedFormSolution { form: ClosedForm::Elliptic(e), constraints: vec![], substitutions: vec![] };
        assert!(verify_exact(&sol, &ode).exact_ok);

        let ric = AutonomousODE::parse("u1 + u0^2 - k2/4", "k2").unwrap();
        let t = TrigForm { num: vec![FracElem::zero(), FracElem::one()], den: vec![FracElem::one()], k2: FracElem::var(0) };
        let sol = ClosedFormSolution { form: ClosedForm::Trig(t.clone()), constraints: vec![], substitutions: vec![] };
        assert!(verify_exact(&sol, &ric).exact_ok);
        let wrong = TrigForm { k2: FracElem::from_int(1), ..t };
        let sol = ClosedFormSolution { form: ClosedForm::Trig(wrong), constraints: vec![], substitutions: vec![] };
        assert!(!verify_exact(&sol, &ric).exact_ok);
    }

    #[test]
    fn kdv_subequation_is_a_consequence_and_tampering_is_seen() {
        let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let fam = leading_orders(&ode).unwrap().families.remove(0);
        let ind = fuchs_indices(&fam, &ode).unwrap();
        let mut syms = ode.syms.clone();
        let lf = laurent_expand(&fam, &ind, &ode, 12, &mut syms, 0).unwrap();
        let f = parse_poly("u1^2 - (2/a)*u0^3 + 20*U4*u0 + 56*a*U6", &syms, &u_var).unwrap();
        let good = verify_subeq_consequence(&f, std::slice::from_ref(&lf.series), Some(&ode));
        assert!(good.ok, "{}", good.describe(&syms));
        assert_eq!(good.differential, Some(true));

        let bumped = parse_poly("u1^2 - (2/a)*u0^3 + 20*U4*u0 + 56*a*U6 + 1", &syms, &u_var).unwrap();
        let bad = verify_subeq_consequence(&bumped, std::slice::from_ref(&lf.series), Some(&ode));
        assert!(!bad.ok);
        assert_eq!(bad.series[0].first_nonzero.as_ref().map(|x| x.0), Some(0));
    }
}
