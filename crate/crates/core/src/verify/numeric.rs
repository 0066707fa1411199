//! Numeric smoke test: the closed form evaluated in multiprecision at
//! seeded complex sample points, residual relative to the term sizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::bigfloat::{Complex, Real};
use crate::arith::{Coeff, FracElem, Monomial, Poly, Rat, Symbols};
use crate::curve::closed::{tau_derivatives, tau_poly, wp_derivatives, ClosedForm, ClosedFormSolution};
use crate::ode::AutonomousODE;
use crate::singular::random_point;

use super::{wp_eval, VerificationReport, VerifyError};

#[derive(Clone, Debug, PartialEq)]
pub struct NumericOptions {
    pub points: usize,
    /// Working precision in bits.
    pub precision: usize,
    pub seed: u64,
    /// Sample points lie in the square `|re|, |im| <= radius`.
    pub radius: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { points: 20, precision: 256, seed: 0x5eed, radius: 1.5 }
    }
}

/// Magnitude above which a sample is treated as sitting on a pole.
const POLE_CUTOFF: f64 = 1e12;

/// Random parameter values on the branch locus: free parameters drawn from
/// the seed, eliminated ones computed from the substitutions.
pub fn sample_parameters(sol: &ClosedFormSolution, syms: &Symbols, seed: u64) -> Result<Vec<Rat>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        let mut vals = random_point(syms.len(), &mut rng);
        let mut ok = true;
        for (v, f) in &sol.substitutions {
            match f.eval_rat(&vals) {
                Some(x) if !(x.is_zero() && syms.get(*v).nonzero) => vals[*v] = x,
                _ => ok = false,
            }
        }
        if ok {
            return Ok(vals);
        }
    }
    Err(VerifyError::BadSpecialization("no admissible parameter sample".into()))
}

fn eval(c: &FracElem, vals: &[Rat]) -> Result<Rat, VerifyError> {
    c.eval_rat(vals).ok_or_else(|| VerifyError::BadSpecialization("coefficient denominator vanishes".into()))
}

fn eval_poly(p: &Poly<FracElem>, vals: &[Rat]) -> Result<Poly<Rat>, VerifyError> {
    let terms = p.terms().map(|(m, c)| Ok((m.clone(), eval(c, vals)?))).collect::<Result<Vec<_>, VerifyError>>()?;
    Ok(Poly::from_terms(terms))
}

fn eval_complex(p: &Poly<Rat>, point: &[Complex], prec: usize) -> Complex {
    let mut acc = Complex::zero(prec);
    for (m, c) in p.terms() {
        acc = acc.add(&monomial_value(m, point, prec).mul(&Complex::from_rat(c, prec)));
    }
    acc
}

fn monomial_value(m: &Monomial, point: &[Complex], prec: usize) -> Complex {
    let mut t = Complex::from_real(Real::from_i64(1, prec));
    for (v, &e) in m.exps().iter().enumerate() {
        if e > 0 {
            t = t.mul(&point[v].powi(e));
        }
    }
    t
}

/// Derivative values `u, u', ..., u^(n)` at one point, or `None` near a pole.
type Evaluator<'a> = Box<dyn Fn(&Complex) -> Result<Option<Vec<Complex>>, VerifyError> + 'a>;

fn evaluator<'a>(form: &ClosedForm, order: usize, vals: &[Rat], prec: usize) -> Result<Evaluator<'a>, VerifyError> {
    let finite = |z: &Complex| z.abs().to_f64() < POLE_CUTOFF;
    match form {
        ClosedForm::Elliptic(e) => {
            let derivs = wp_derivatives(&e.as_poly(), &e.g2, &e.g3, order);
            let derivs = derivs.iter().map(|d| eval_poly(d, vals)).collect::<Result<Vec<_>, _>>()?;
            let g2 = Complex::from_rat(&eval(&e.g2, vals)?, prec);
            let g3 = Complex::from_rat(&eval(&e.g3, vals)?, prec);
            Ok(Box::new(move |xi| {
                if xi.abs().to_f64() < 1e-3 {
                    return Ok(None);
                }
                let (w, z) = wp_eval(&g2, &g3, xi)?;
                if !finite(&w) {
                    return Ok(None);
                }
                Ok(Some(derivs.iter().map(|d| eval_complex(d, &[w.clone(), z.clone()], prec)).collect()))
            }))
        }
        ClosedForm::Trig(_) | ClosedForm::Rational(_) => {
            let (num, den, k2) = match form {
                ClosedForm::Trig(t) => (&t.num, &t.den, t.k2.clone()),
                ClosedForm::Rational(r) => (&r.num, &r.den, FracElem::zero()),
                ClosedForm::Elliptic(_) => unreachable!(),
            };
            let a = tau_derivatives(&tau_poly(num), &tau_poly(den), &k2, order);
            let a = a.iter().map(|d| eval_poly(d, vals)).collect::<Result<Vec<_>, _>>()?;
            let d = eval_poly(&tau_poly(den), vals)?;
            let k2 = eval(&k2, vals)?;
            let k = Complex::from_rat(&k2, prec).sqrt();
            let rational = k2.is_zero();
            Ok(Box::new(move |xi| {
                let half = Real::from_f64(0.5, prec);
                let tau = if rational {
                    if xi.abs().to_f64() < 1e-3 {
                        return Ok(None);
                    }
                    xi.inv()
                } else {
                    k.mul(xi).scale(&half).tanh().mul(&k).scale(&half)
                };
                let dv = eval_complex(&d, std::slice::from_ref(&tau), prec);
                if !finite(&tau) || dv.abs().to_f64() < 1.0 / POLE_CUTOFF {
                    return Ok(None);
                }
                let mut out = Vec::new();
                let mut dp = dv.clone();
                for ak in &a {
                    let x = eval_complex(ak, std::slice::from_ref(&tau), prec).div(&dp);
                    if !finite(&x) {
                        return Ok(None);
                    }
                    out.push(x);
                    dp = dp.mul(&dv);
                }
                Ok(Some(out))
            }))
        }
    }
}

/// Evaluates the ODE residual of `sol` at `vals` (one rational per symbol;
/// eliminated parameters must already satisfy the substitutions).
pub fn verify_numeric(
    sol: &ClosedFormSolution,
    ode: &AutonomousODE,
    vals: &[Rat],
    opts: &NumericOptions,
) -> Result<VerificationReport, VerifyError> {
    let prec = opts.precision;
    let target = eval_poly(&ode.poly, vals)?;
    let f = evaluator(&sol.form, ode.order, vals, prec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points = Vec::new();
    let mut worst = 0f64;
    let mut attempts = 0;
    while points.len() < opts.points && attempts < 20 * opts.points {
        attempts += 1;
        let (re, im) = (rng.gen_range(-opts.radius..opts.radius), rng.gen_range(-opts.radius..opts.radius));
        let xi = Complex::from_f64(re, im, prec);
        let Some(d) = f(&xi)? else { continue };
        let mut res = Complex::zero(prec);
        let mut scale = Real::zero(prec);
        for (m, c) in target.terms() {
            let t = monomial_value(m, &d, prec).mul(&Complex::from_rat(c, prec));
            scale = scale.add(&t.abs());
            res = res.add(&t);
        }
        let rel = if scale.is_zero() { 0.0 } else { res.abs().div(&scale).to_f64() };
        worst = worst.max(rel);
        points.push((re, im));
    }
    if points.is_empty() {
        return Err(VerifyError::AllPointsSingular { seed: opts.seed });
    }
    Ok(VerificationReport {
        exact_ok: false,
        exact_remainder: Poly::zero(),
        numeric_max_residual: Some(worst),
        sample_points: points,
        seed: Some(opts.seed),
        kind: sol.form.kind(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::curve::closed::{EllipticForm, TrigForm};
    use crate::ode::parse_frac;

    fn solution(form: ClosedForm) -> ClosedFormSolution {
        ClosedFormSolution { form, constraints: Vec::new(), substitutions: Vec::new() }
    }

    #[test]
    fn kdv_elliptic_numeric() {
        let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0, U4, U6").unwrap();
        let s = &ode.syms;
        let sol = solution(ClosedForm::Elliptic(EllipticForm {
            wp: vec![FracElem::zero(), parse_frac("2*a", s).unwrap()],
            wpp: vec![],
            g2: parse_frac("10*U4/a", s).unwrap(),
            g3: parse_frac("14*U6/a", s).unwrap(),
        }));
        let vals = vec![rat(1, 1), rat(1, 1), rat(1, 1)];
        let rep = verify_numeric(&sol, &ode, &vals, &NumericOptions::default()).unwrap();
        assert_eq!(rep.sample_points.len(), 20);
        assert!(rep.numeric_max_residual.unwrap() < 1e-9);
    }

    #[test]
    fn wrong_form_is_caught() {
        let ode = AutonomousODE::parse("u1 + u0^2 - 1", "").unwrap();
        let good = TrigForm { num: vec![FracElem::zero(), FracElem::one()], den: vec![FracElem::one()], k2: FracElem::from_int(4) };
        let bad = TrigForm { k2: FracElem::from_int(3), ..good.clone() };
        let o = NumericOptions::default();
        assert!(verify_numeric(&solution(ClosedForm::Trig(good)), &ode, &[], &o).unwrap().numeric_max_residual.unwrap() < 1e-30);
        assert!(verify_numeric(&solution(ClosedForm::Trig(bad)), &ode, &[], &o).unwrap().numeric_max_residual.unwrap() > 1e-3);
    }

    #[test]
    fn zero_solution_of_homogeneous_equation() {
        let ode = AutonomousODE::parse("u2 + u0^3", "").unwrap();
        let sol =
            solution(ClosedForm::Rational(crate::curve::closed::RationalForm { num: vec![FracElem::zero()], den: vec![FracElem::one()] }));
        let rep = verify_numeric(&sol, &ode, &[], &NumericOptions::default()).unwrap();
        assert_eq!(rep.numeric_max_residual, Some(0.0));
    }
}
