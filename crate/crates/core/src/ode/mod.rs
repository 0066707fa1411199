//! Autonomous algebraic ODEs: representation, parsing, differentiation and
//! series substitution.

pub mod parse;
pub mod series;

use thiserror::Error;

use crate::arith::render::render_frac_poly;
use crate::arith::{FracElem, Monomial, Poly, SymbolKind, Symbols};
pub use parse::{parse_frac, parse_poly, ParseError};
pub use series::{SeriesError, SeriesExpr};

/// Highest derivative accepted in input.
pub const MAX_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("bad parameter declaration `{0}`")]
    BadParamDecl(String),
    #[error("derivative order {0} exceeds the supported maximum of 12")]
    OrderTooHigh(usize),
    #[error("the equation does not involve any derivative of u")]
    NotDifferential,
}

/// `E(u, u', ..., u^(N)) = 0` with `u_k` encoded as polynomial variable `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutonomousODE {
    pub order: usize,
    pub poly: Poly<FracElem>,
    pub syms: Symbols,
}

/// Recognises `u` and `u0..u12`.
pub fn u_var(name: &str) -> Option<usize> {
    if name == "u" {
        return Some(0);
    }
    let d = name.strip_prefix('u')?;
    if d.is_empty() || (d.len() > 1 && d.starts_with('0')) {
        return None;
    }
    d.parse().ok()
}

pub fn u_name(k: usize) -> String {
    format!("u{k}")
}

/// Parses `"nu != 0, b, mu, A"`.
pub fn parse_params(decl: &str) -> Result<Symbols, OdeError> {
    let mut syms = Symbols::new();
    for item in decl.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (name, nonzero) = match item.split_once("!=") {
            Some((n, z)) if z.trim() == "0" => (n.trim(), true),
            Some(_) => return Err(OdeError::BadParamDecl(item.to_string())),
            None => (item, false),
        };
        let valid = name.chars().next().is_some_and(|c| c.is_alphabetic())
            && name.chars().all(|c| c.is_alphanumeric() || c == '_')
            && u_var(name).is_none()
            && name != "xi";
        if !valid || syms.index(name).is_some() {
            return Err(OdeError::BadParamDecl(item.to_string()));
        }
        syms.add(name, SymbolKind::Param, nonzero);
    }
    Ok(syms)
}

impl AutonomousODE {
    pub fn from_poly(poly: Poly<FracElem>, syms: Symbols) -> Result<Self, OdeError> {
        let order = poly.vars().into_iter().max().unwrap_or(0);
        if order > MAX_ORDER {
            return Err(OdeError::OrderTooHigh(order));
        }
        if order == 0 {
            return Err(OdeError::NotDifferential);
        }
        Ok(AutonomousODE { order, poly, syms })
    }

    pub fn parse(text: &str, param_decl: &str) -> Result<Self, OdeError> {
        let syms = parse_params(param_decl)?;
        Self::parse_with(text, syms)
    }

    pub fn parse_with(text: &str, syms: Symbols) -> Result<Self, OdeError> {
        let lookup = |n: &str| u_var(n).filter(|&k| k <= MAX_ORDER);
        if let Some(k) = text
            .split(|c: char| !c.is_alphanumeric())
            .filter_map(|w| w.strip_prefix('u').and_then(|d| d.parse::<usize>().ok()))
            .find(|&k| k > MAX_ORDER)
        {
            return Err(OdeError::OrderTooHigh(k));
        }
        let poly = parse_poly(text, &syms, &lookup)?;
        Self::from_poly(poly, syms)
    }

    pub fn render(&self) -> String {
        render_frac_poly(&self.poly, &self.syms, &u_name)
    }

    /// Substitutes the series for `u` (derivatives taken term by term).
    pub fn substitute_series(&self, s: &SeriesExpr) -> SeriesExpr {
        let d = series::derivatives(s, self.order);
        series::eval_poly_on_series(&self.poly, &d)
    }
}

/// `d/dxi` acting through `u_k -> u_(k+1)`.
pub fn total_derivative(p: &Poly<FracElem>) -> Poly<FracElem> {
    let mut out = Poly::zero();
    for v in p.vars() {
        let d = p.derivative(v);
        out = out.add(&d.mul(&Poly::monomial(Monomial::var(v + 1, 1), crate::arith::Coeff::one())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Coeff;

    #[test]
    fn parses_ks() {
        let ode = AutonomousODE::parse("nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A", "nu != 0, b, mu, A").unwrap();
        assert_eq!(ode.order, 3);
        assert!(ode.syms.get(0).nonzero);
        assert_eq!(ode.render(), "1/2*u0^2 + mu*u1 + b*u2 + nu*u3 + A");
    }

    #[test]
    fn render_round_trip() {
        for (text, params) in [
            ("u3 - (6/a)*u0*u1", "a != 0"),
            ("2*u1^2 + (24*u0^2-3)*u1 + 72*u0^4 - 17*u0^2 + 1", ""),
            ("a^2*u2 - 2*u^3 - 2*b*u0/(a+b)", "a, b"),
        ] {
            let ode = AutonomousODE::parse(text, params).unwrap();
            let again = AutonomousODE::parse_with(&ode.render(), ode.syms.clone()).unwrap();
            assert_eq!(ode, again, "{}", ode.render());
        }
    }

    #[test]
    fn rejects_order_and_autonomy() {
        assert!(matches!(AutonomousODE::parse("u13 + u0", ""), Err(OdeError::OrderTooHigh(13))));
        assert!(matches!(AutonomousODE::parse("u0^2 + 1", ""), Err(OdeError::NotDifferential)));
        assert!(matches!(AutonomousODE::parse("u1 + xi*u0", ""), Err(OdeError::Parse(ParseError::NonAutonomous { .. }))));
    }

    #[test]
    fn total_derivative_examples() {
        let ode = AutonomousODE::parse("u0^2", "").unwrap_err();
        assert!(matches!(ode, OdeError::NotDifferential));
        let p = parse_poly("u0^2", &Symbols::new(), &u_var).unwrap();
        let d = total_derivative(&p);
        assert_eq!(d, parse_poly("2*u0*u1", &Symbols::new(), &u_var).unwrap());
        assert!(total_derivative(&Poly::constant(FracElem::from_int(5))).is_zero());
    }

    #[test]
    fn kdv_truncated_series_vanishes_at_low_orders() {
        let mut ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let u4 = ode.syms.add("U4", SymbolKind::Resonance, false);
        let a = FracElem::var(0);
        let mut c = vec![FracElem::zero(); 5];
        c[0] = a.add(&a);
        c[4] = FracElem::var(u4);
        let s = SeriesExpr::truncated(-2, c);
        let e = ode.substitute_series(&s);
        for k in -5..=-1 {
            assert!(e.coeff(k).unwrap().is_zero(), "chi^{k}");
        }
    }
}
