//! First-order subequation synthesis: template, linear system from the
//! Laurent series, and constraint branches.

pub mod scaling;
pub mod solve;

use thiserror::Error;

use crate::arith::linalg::LinalgError;
use crate::arith::render::render_mpoly;
use crate::arith::{Coeff, FracElem, MPoly, Monomial, Poly, Rat, SymbolKind, Symbols};
use crate::ode::{SeriesError, SeriesExpr};
use crate::singular::LaurentFamily;

pub use scaling::{parse_scaling, ScaledVar, Scaling};
pub use solve::{solve_branches, SolveOutcome, SubeqBranch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubeqError {
    #[error(transparent)]
    Truncation(#[from] SeriesError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("no pole family to enforce")]
    NoFamilies,
    #[error("constraints could not be resolved: {}", rendered.join("; "))]
    UnresolvedConstraints { residuals: Vec<MPoly>, rendered: Vec<String> },
    #[error("bad scaling declaration: {0}")]
    BadScaling(String),
}

impl SubeqError {
    pub fn unresolved(residuals: Vec<MPoly>, syms: &Symbols) -> Self {
        let rendered = residuals.iter().map(|r| render_mpoly(r, syms)).collect();
        SubeqError::UnresolvedConstraints { residuals, rendered }
    }
}

/// Elliptic orders `(m, n)` of `u` and `u'` for the enforced families.
pub fn elliptic_order(families: &[LaurentFamily]) -> (u32, u32) {
    let m: i64 = families.iter().map(|f| -f.family.p).sum();
    let n: i64 = families.iter().map(|f| 1 - f.family.p).sum();
    (m as u32, n as u32)
}

/// The monomials `u^j u'^k` of the ansatz. `(0, m)` is normalized to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SubeqTemplate {
    pub m: u32,
    /// Sorted by `(k, j)`; the normalized monomial comes last.
    pub monomials: Vec<(u32, u32)>,
    /// Monomials removed because they alone would dominate some family.
    pub pruned: Vec<(u32, u32)>,
}

impl SubeqTemplate {
    /// All `(j, k)` with `j <= 2m - 2k`.
    pub fn full(m: u32) -> Self {
        let mut monomials = Vec::new();
        for k in 0..=m {
            for j in 0..=2 * (m - k) {
                monomials.push((j, k));
            }
        }
        SubeqTemplate { m, monomials, pruned: Vec::new() }
    }

    /// Drops monomials that are the unique lowest-order term for a family,
    /// since the leading row would force their coefficient to vanish.
    pub fn for_families(m: u32, families: &[LaurentFamily]) -> Self {
        let mut t = Self::full(m);
        loop {
            let mut drop = None;
            for f in families {
                let p = f.family.p;
                let val = |&(j, k): &(u32, u32)| j as i64 * p + k as i64 * (p - 1);
                let vmin = t.monomials.iter().map(val).min().unwrap();
                let at_min: Vec<_> = t.monomials.iter().filter(|mk| val(mk) == vmin).collect();
                if at_min.len() == 1 && *at_min[0] != (0, m) {
                    drop = Some(*at_min[0]);
                    break;
                }
            }
            match drop {
                Some(mk) => {
                    t.monomials.retain(|x| *x != mk);
                    t.pruned.push(mk);
                }
                None => return t,
            }
        }
    }

    pub fn unknowns(&self) -> &[(u32, u32)] {
        &self.monomials[..self.monomials.len() - 1]
    }

    pub fn name(j: u32, k: u32) -> String {
        format!("a{j}{k}")
    }

    /// Assembles `F(u, u') = sum a_jk u^j u'^k` (variables `u0`, `u1`).
    pub fn polynomial(&self, coeffs: &[FracElem]) -> Poly<FracElem> {
        Poly::from_terms(self.monomials.iter().zip(coeffs).map(|(&(j, k), c)| (Monomial::new(vec![j, k]), c.clone())))
    }
}

/// Rows `F_i`: coefficient of `chi^(base + i)` of `F(series)` for each family.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub template: SubeqTemplate,
    /// One entry per template monomial.
    pub rows: Vec<Vec<FracElem>>,
    /// `(family, i)` for each row.
    pub labels: Vec<(usize, usize)>,
    pub series: Vec<SeriesExpr>,
    pub family_ids: Vec<usize>,
    pub terms: usize,
}

impl LinearSystem {
    /// Row `i` as a linear form in the symbols `a{j}{k}`, which are added
    /// to `syms` as auxiliary symbols.
    pub fn row_form(&self, i: usize, syms: &mut Symbols) -> FracElem {
        let mut acc = FracElem::zero();
        for (c, &(j, k)) in self.rows[i].iter().zip(&self.template.monomials) {
            let v = syms.add(&SubeqTemplate::name(j, k), SymbolKind::Aux, false);
            acc = acc.add(&c.mul(&FracElem::var(v)));
        }
        acc
    }

    pub fn specialize(&self, point: &[Rat]) -> Option<Vec<Vec<Rat>>> {
        self.rows.iter().map(|r| r.iter().map(|c| c.eval_rat(point)).collect()).collect()
    }
}

/// Builds the rows `F_0..F_J` for every family, `J = terms`.
pub fn assemble_system(
    template: &SubeqTemplate,
    series: &[SeriesExpr],
    family_ids: &[usize],
    terms: usize,
) -> Result<LinearSystem, SubeqError> {
    if series.is_empty() {
        return Err(SubeqError::NoFamilies);
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (fi, s) in series.iter().enumerate() {
        let s = s.truncate_to(terms + 1);
        if s.known() != Some(terms + 1) {
            return Err(SeriesError::TruncationTooShort { requested: s.offset + terms as i64, order: s.order.unwrap_or(0) }.into());
        }
        let d = s.derivative();
        let p = s.offset;
        let cols: Vec<SeriesExpr> = template.monomials.iter().map(|&(j, k)| s.pow(j).mul(&d.pow(k))).collect();
        let base = template.monomials.iter().map(|&(j, k)| j as i64 * p + k as i64 * (p - 1)).min().unwrap();
        for i in 0..=terms {
            let row = cols.iter().map(|c| c.coeff(base + i as i64)).collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
            labels.push((family_ids[fi], i));
        }
    }
    Ok(LinearSystem { template: template.clone(), rows, labels, series: series.to_vec(), family_ids: family_ids.to_vec(), terms })
}

/// Incremental row echelon form over the rationals.
#[derive(Default)]
pub struct Echelon {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    /// Adds `row` if it is independent of the rows so far.
    pub fn insert(&mut self, mut row: Vec<Rat>) -> bool {
        for (pc, r) in &self.rows {
            if !row[*pc].is_zero() {
                let f = row[*pc].clone() / &r[*pc];
                for (x, y) in row.iter_mut().zip(r) {
                    *x -= &f * y;
                }
            }
        }
        match row.iter().position(|x| !x.is_zero()) {
            Some(pc) => {
                self.rows.push((pc, row));
                true
            }
            None => false,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Substitutes `u = (al U + be)/(ga U + de)` into `F(u, u')` and clears the
/// denominator `(ga U + de)^(2m)`.
pub fn homography(f: &Poly<FracElem>, m: u32, coeffs: [&Rat; 4]) -> Poly<FracElem> {
    let c = |r: &Rat| FracElem::from_rat_value(r.clone());
    let [al, be, ga, de] = coeffs;
    let num = Poly::from_terms([(Monomial::var(0, 1), c(al)), (Monomial::one(), c(be))]);
    let den = Poly::from_terms([(Monomial::var(0, 1), c(ga)), (Monomial::one(), c(de))]);
    let det = c(&(al * de - be * ga));
    let mut out = Poly::zero();
    for (mono, coef) in f.terms() {
        let (j, k) = (mono.exp(0), mono.exp(1));
        let rest = 2 * m - 2 * k - j;
        let t = num.pow(j).mul(&den.pow(rest)).mul(&Poly::monomial(Monomial::var(1, k), Coeff::pow(&det, k))).scale(coef);
        out = out.add(&t);
    }
    out
}

/// `true` when every monomial `U^j U'^k` has `k <= m`, `j <= 2m - 2k` and
/// `U'^m` carries a nonzero coefficient.
pub fn has_briot_bouquet_shape(f: &Poly<FracElem>, m: u32) -> bool {
    f.terms().all(|(mono, _)| mono.exp(1) <= m && mono.exp(0) + 2 * mono.exp(1) <= 2 * m) && !f.coeff(&Monomial::var(1, m)).is_zero()
}

/// Leading coefficient of the family's `F_0` row as a sanity check helper.
pub fn leading_row_is_homogeneous(sys: &LinearSystem) -> bool {
    sys.rows.first().is_some_and(|r| r.iter().any(|c| !c.is_zero()))
}

/// Renders a subequation with `u0`, `u1` variable names.
pub fn render_subeq(f: &Poly<FracElem>, syms: &Symbols) -> String {
    crate::arith::render::render_frac_poly(f, syms, &crate::ode::u_name)
}

/// Converts a constraint numerator to a canonical primitive form.
pub fn canonical_constraint(p: &MPoly) -> MPoly {
    let (_, prim) = p.primitive();
    if prim.num_terms() == 1 {
        let (m, _) = prim.terms().next().unwrap();
        let exps = m.exps().iter().map(|&e| e.min(1)).collect();
        return MPoly::monomial(Monomial::new(exps), Rat::one());
    }
    prim
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::AutonomousODE;
    use crate::singular::{fuchs_indices, laurent_expand, leading_orders};

    fn family(ode: &AutonomousODE, terms: usize) -> (LaurentFamily, Symbols) {
        let f = leading_orders(ode).unwrap().families.remove(0);
        let ind = fuchs_indices(&f, ode).unwrap();
        let mut syms = ode.syms.clone();
        let lf = laurent_expand(&f, &ind, ode, terms, &mut syms, 0).unwrap();
        (lf, syms)
    }

    #[test]
    fn orders_and_templates() {
        let ks = AutonomousODE::parse("nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A", "nu != 0, b, mu, A").unwrap();
        let (lf, _) = family(&ks, 2);
        assert_eq!(elliptic_order(std::slice::from_ref(&lf)), (3, 4));
        let t = SubeqTemplate::for_families(3, &[lf]);
        assert_eq!(t.unknowns().len(), 10);
        assert_eq!(SubeqTemplate::full(3).monomials.len(), 16);
        let kdv = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let (lf, _) = family(&kdv, 2);
        assert_eq!(elliptic_order(std::slice::from_ref(&lf)), (2, 3));
        let t = SubeqTemplate::for_families(2, &[lf]);
        assert_eq!(t.monomials, vec![(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (0, 2)]);
    }

    #[test]
    fn kdv_rows_match() {
        let kdv = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let (lf, mut syms) = family(&kdv, 8);
        let t = SubeqTemplate::for_families(2, std::slice::from_ref(&lf));
        let sys = assemble_system(&t, std::slice::from_ref(&lf.series), &[0], 6).unwrap();
        let expect = [
            "16*a^2*a02 + 8*a^3*a30",
            "-8*a^2*a11",
            "4*a^2*a20",
            "-4*a*a01",
            "2*a*a10 - 16*a*a02*U4 + 12*a^2*a30*U4",
            "0",
            "a00 + 4*a*a20*U4 - 32*a*a02*U6 + 12*a^2*a30*U6",
        ];
        for (i, e) in expect.iter().enumerate() {
            let got = sys.row_form(i, &mut syms);
            assert_eq!(got, crate::ode::parse_frac(e, &syms).unwrap(), "F{i}");
        }
    }

    #[test]
    fn zero_series_gives_constant_column_only() {
        let t = SubeqTemplate::full(1);
        let z = SeriesExpr::truncated(0, vec![FracElem::zero(); 4]);
        let sys = assemble_system(&t, &[z], &[0], 2).unwrap();
        for r in &sys.rows {
            assert!(r[1..].iter().all(|c| c.is_zero()));
        }
        assert!(sys.rows.iter().any(|r| !r[0].is_zero()));
    }

    #[test]
    fn homography_keeps_shape() {
        let syms = crate::ode::parse_params("a != 0").unwrap();
        let f = crate::ode::parse_poly("u1^2 - 2/a*u0^3 + 3*u0 + 1", &syms, &crate::ode::u_var).unwrap();
        assert!(has_briot_bouquet_shape(&f, 2));
        let r = |n, d| crate::arith::rat(n, d);
        let g = homography(&f, 2, [&r(2, 1), &r(1, 3), &r(-1, 2), &r(5, 1)]);
        assert!(has_briot_bouquet_shape(&g, 2));
    }
}
