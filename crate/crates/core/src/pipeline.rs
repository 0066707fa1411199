//! End-to-end driver: singularity analysis, subequation synthesis,
//! classification, integration and verification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{Coeff, Field, FracElem, MPoly, Poly, Rat, SymbolKind, Symbols};
use crate::curve::closed::{matches_series, ClosedForm, ClosedFormSolution};
use crate::curve::genus::{genus, GenusReport};
use crate::curve::integrate::{degenerate_check, integrate_genus0, integrate_genus1, pole_hints, reduce_mod_locus};
use crate::curve::CurveError;
use crate::ode::series::SeriesExpr;
use crate::ode::{AutonomousODE, OdeError};
use crate::singular::{
    default_terms, fuchs_indices, laurent_expand, leading_orders, random_point, residue_conditions, LaurentFamily, LeadingOrders,
    ResidueCondition, SingularError,
};
use crate::subeq::scaling::{parse_scaling, Scaling};
use crate::subeq::solve::SolveOutcome;
use crate::subeq::{
    assemble_system, canonical_constraint, elliptic_order, solve_branches, Echelon, SubeqBranch, SubeqError, SubeqTemplate,
};
use crate::verify::{
    sample_parameters, verify_exact, verify_numeric, verify_subeq_consequence, NumericOptions, SubeqCheck, VerificationReport, VerifyError,
};

/// Extra terms beyond `J` used to confirm rank stability and to re-verify
/// every branch.
pub const STABILITY_MARGIN: usize = 8;
/// Numeric acceptance bound on the relative ODE residual.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;
const MAX_ESCALATIONS: usize = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Singular(#[from] SingularError),
    #[error(transparent)]
    Subeq(#[from] SubeqError),
    #[error("family index {0} out of range")]
    BadFamily(usize),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Truncation `J`; default from the elliptic order.
    pub terms: Option<usize>,
    /// Indices of the families to enforce; default all.
    pub families: Option<Vec<usize>>,
    /// `(numerator, denominator)` degrees of the genus-0 ansatz in `tau`.
    pub bounds: Option<(usize, usize)>,
    pub scaling: Option<String>,
    pub seed: u64,
    /// Highest power `r` for the residue-sum filter on `u^r`.
    pub residue_power: u32,
    pub numeric: NumericOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            terms: None,
            families: None,
            bounds: None,
            scaling: None,
            seed: 7,
            residue_power: 1,
            numeric: NumericOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub ode: AutonomousODE,
    /// Parameters followed by resonance and auxiliary symbols.
    pub syms: Symbols,
    pub orders: LeadingOrders,
    pub families: Vec<LaurentFamily>,
    pub residues: Vec<ResidueCondition>,
    /// Number of coefficients past the leading one in each series.
    pub expanded: usize,
    /// Families whose expansion failed, tolerated for first-order input.
    pub skipped: Vec<(usize, SingularError)>,
}

impl Analysis {
    /// The expansion of pole family `tag`, unless it was skipped.
    pub fn family(&self, tag: usize) -> Option<&LaurentFamily> {
        if self.skipped.iter().any(|(t, _)| *t == tag) {
            return None;
        }
        let before = self.skipped.iter().filter(|(t, _)| *t < tag).count();
        self.families.get(tag - before)
    }
}

/// Leading orders, Fuchs indices and series through `terms`.
pub fn analyze(ode: &AutonomousODE, terms: usize, residue_power: u32) -> Result<Analysis, PipelineError> {
    let orders = leading_orders(ode)?;
    if orders.families.is_empty() {
        return Err(SingularError::NoPoleFamily.into());
    }
    let mut syms = ode.syms.clone();
    let mut families = Vec::new();
    let mut skipped = Vec::new();
    for (tag, fam) in orders.families.iter().enumerate() {
        let expanded = fuchs_indices(fam, ode).and_then(|ind| laurent_expand(fam, &ind, ode, terms, &mut syms, tag));
        match expanded {
            Ok(lf) => families.push(lf),
            // A first-order equation is already its own subequation; the
            // series only serves as a cross-check.
            Err(e) if ode.order == 1 => skipped.push((tag, e)),
            Err(e) => return Err(e.into()),
        }
    }
    let mut residues = Vec::new();
    for r in 1..=residue_power.max(1) {
        // Short expansions cannot reach the residue; skip rather than fail.
        if let Ok(rs) = residue_conditions(&families, r) {
            residues.extend(rs);
        }
    }
    Ok(Analysis { ode: ode.clone(), syms, orders, families, residues, expanded: terms, skipped })
}

/// Default truncation for a set of families.
pub fn default_truncation(families: &[LaurentFamily]) -> usize {
    default_terms(elliptic_order(families).0 as i64)
}

#[derive(Clone, Debug)]
pub struct SolvedForm {
    pub solution: ClosedFormSolution,
    /// `ansatz` or `degenerate`.
    pub origin: &'static str,
    pub exact: VerificationReport,
    pub numeric: Result<VerificationReport, VerifyError>,
    pub parameters: Vec<Rat>,
    /// Agreement with the enforced Laurent series, where comparable.
    pub series_match: Option<bool>,
    pub scaled: Vec<(String, Option<Rat>)>,
}

impl SolvedForm {
    pub fn verified(&self) -> bool {
        self.exact.exact_ok && self.numeric.as_ref().is_ok_and(|r| r.numeric_max_residual.is_some_and(|x| x < NUMERIC_TOLERANCE))
    }
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub branch: SubeqBranch,
    pub check: SubeqCheck,
    pub genus: Result<GenusReport, CurveError>,
    pub forms: Vec<SolvedForm>,
    pub integration_error: Option<CurveError>,
    pub scaled: Vec<(String, Option<Rat>)>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub analysis: Analysis,
    pub terms: usize,
    /// `(J, rank)` of the specialized system at each checked truncation.
    pub rank_checks: Vec<(usize, usize)>,
    pub outcome: Option<SolveOutcome>,
    pub branches: Vec<BranchResult>,
    pub scaling: Option<Scaling>,
    pub seed: u64,
    /// Final symbol table: analysis symbols plus scaled variables.
    pub syms: Symbols,
}

impl SolveReport {
    pub fn verified_forms(&self) -> impl Iterator<Item = &SolvedForm> {
        self.branches.iter().flat_map(|b| b.forms.iter()).filter(|f| f.verified())
    }
}

fn specialized_rank(
    template: &SubeqTemplate,
    series: &[SeriesExpr],
    ids: &[usize],
    j: usize,
    point: &[Rat],
) -> Result<usize, PipelineError> {
    let sys = assemble_system(template, series, ids, j)?;
    let mut ech = Echelon::default();
    if let Some(rows) = sys.specialize(point) {
        for r in rows {
            ech.insert(r);
        }
    }
    Ok(ech.rank())
}

/// Runs the whole pipeline on one ODE.
pub fn solve(ode: &AutonomousODE, opts: &SolveOptions) -> Result<SolveReport, PipelineError> {
    let probe = leading_orders(ode)?;
    let all: Vec<usize> = (0..probe.families.len()).collect();
    let ids = opts.families.clone().unwrap_or(all);
    if let Some(&bad) = ids.iter().find(|&&i| i >= probe.families.len()) {
        return Err(PipelineError::BadFamily(bad));
    }
    let m: i64 = ids.iter().map(|&i| -probe.families[i].p).sum();
    let mut terms = opts.terms.unwrap_or_else(|| default_terms(m));
    let mut rank_checks = Vec::new();
    let mut analysis;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    loop {
        analysis = analyze(ode, terms + STABILITY_MARGIN, opts.residue_power)?;
        if ode.order == 1 {
            break;
        }
        let series: Vec<SeriesExpr> = ids.iter().map(|&i| analysis.families[i].series.clone()).collect();
        let fams: Vec<LaurentFamily> = ids.iter().map(|&i| analysis.families[i].clone()).collect();
        let m = elliptic_order(&fams).0;
        let template = SubeqTemplate::for_families(m, &fams);
        let point = random_point(analysis.syms.len(), &mut rng);
        rank_checks.clear();
        for j in [terms, terms + STABILITY_MARGIN / 2, terms + STABILITY_MARGIN] {
            rank_checks.push((j, specialized_rank(&template, &series, &ids, j, &point)?));
        }
        let stable = rank_checks.iter().all(|r| r.1 == rank_checks[0].1);
        if stable || rank_checks.len() > MAX_ESCALATIONS || opts.terms.is_some() {
            break;
        }
        terms += STABILITY_MARGIN / 2;
    }
    let mut syms = analysis.syms.clone();
    let scaling = match &opts.scaling {
        Some(text) => Some(parse_scaling(text, &mut syms)?),
        None => None,
    };
    let long_series: Vec<SeriesExpr> = ids.iter().filter_map(|&i| analysis.family(i)).map(|f| f.series.clone()).collect();

    let (outcome, raw_branches) = if ode.order == 1 {
        let branch = SubeqBranch {
            constraints: Vec::new(),
            substitutions: Vec::new(),
            point: Vec::new(),
            coeffs: Vec::new(),
            subeq: ode.poly.clone(),
            source_families: ids.clone(),
            rows_used: Vec::new(),
            terms,
            series: long_series.clone(),
            nullity: 0,
        };
        (None, vec![branch])
    } else {
        let fams: Vec<LaurentFamily> = ids.iter().map(|&i| analysis.families[i].clone()).collect();
        let template = SubeqTemplate::for_families(elliptic_order(&fams).0, &fams);
        let sys = assemble_system(&template, &long_series, &ids, terms)?;
        let out = solve_branches(&sys, &syms, scaling.as_ref(), opts.seed)?;
        let branches = out.branches.clone();
        (Some(out), branches)
    };

    let mut branches = Vec::new();
    for b in raw_branches {
        branches.push(process_branch(ode, b, &long_series, &syms, scaling.as_ref(), opts));
    }
    Ok(SolveReport { analysis, terms, rank_checks, outcome, branches, scaling, seed: opts.seed, syms })
}

fn image(subs: &[(usize, FracElem)]) -> impl Fn(usize) -> Option<FracElem> + '_ {
    move |v| subs.iter().find(|(w, _)| *w == v).map(|(_, f)| f.clone())
}

/// `old` followed by `new`, with `new` applied inside the old values.
pub fn compose_substitutions(old: &[(usize, FracElem)], new: &[(usize, FracElem)]) -> Vec<(usize, FracElem)> {
    let img = image(new);
    let mut out: Vec<(usize, FracElem)> = old.iter().map(|(v, f)| (*v, f.substitute(&img))).collect();
    for (v, f) in new {
        if !out.iter().any(|(w, _)| w == v) {
            out.push((*v, f.clone()));
        }
    }
    out
}

fn process_branch(
    ode: &AutonomousODE,
    branch: SubeqBranch,
    long_series: &[SeriesExpr],
    syms: &Symbols,
    scaling: Option<&Scaling>,
    opts: &SolveOptions,
) -> BranchResult {
    let branch_subs = branch.substitutions.clone();
    let img = image(&branch_subs);
    let series: Vec<SeriesExpr> = long_series.iter().map(|s| s.map_coeffs(&|c| c.substitute(&img))).collect();
    let local_ode = AutonomousODE { order: ode.order, poly: ode.poly.map_coeffs(|c| c.substitute(&img)), syms: syms.clone() };
    let check = verify_subeq_consequence(&branch.subeq, &series, Some(&local_ode));
    let genus_res = genus(&branch.subeq, syms, opts.seed);
    let mut forms = Vec::new();
    let mut integration_error = None;
    let scaled_branch = scaled_values(&branch.substitutions, None, scaling, syms);
    if let Ok(g) = &genus_res {
        let hints = pole_hints(&branch.subeq, syms);
        let found = match g.genus {
            1 => integrate_genus1(&branch.subeq, syms, &hints),
            0 => integrate_genus0(&branch.subeq, syms, &hints, opts.bounds),
            n => Err(CurveError::NoClosedForm { reason: format!("genus {n} is out of scope"), system: Vec::new() }),
        };
        match found {
            Ok(sols) => {
                for s in sols {
                    let lifted = lift(&s, &branch);
                    let degenerate: Vec<ClosedFormSolution> = degenerate_check(&s, syms)
                        .into_iter()
                        .map(|d| {
                            let mut l = lift(&d, &branch);
                            l.constraints = display_constraints(&l.constraints);
                            l
                        })
                        .collect();
                    forms.push(finish_form(ode, lifted, "ansatz", &series, syms, scaling, opts));
                    for d in degenerate {
                        forms.push(finish_form(ode, d, "degenerate", &series, syms, scaling, opts));
                    }
                }
            }
            Err(e) => integration_error = Some(e),
        }
    }
    BranchResult { branch, check, genus: genus_res, forms, integration_error, scaled: scaled_branch }
}

/// Moves a solution of the branch subequation into the branch's frame.
fn lift(sol: &ClosedFormSolution, branch: &SubeqBranch) -> ClosedFormSolution {
    let mut constraints = branch.constraints.clone();
    for c in &sol.constraints {
        if !constraints.contains(c) {
            constraints.push(c.clone());
        }
    }
    ClosedFormSolution {
        form: sol.form.clone(),
        constraints,
        substitutions: compose_substitutions(&branch.substitutions, &sol.substitutions),
    }
}

/// Later constraints reduced modulo earlier ones, made canonical.
fn display_constraints(cs: &[MPoly]) -> Vec<MPoly> {
    let mut out: Vec<MPoly> = Vec::new();
    for c in cs {
        let r = reduce_mod_locus(&FracElem::from_poly(c.clone()), &out).num;
        out.push(canonical_constraint(&r));
    }
    out
}

/// The closed form with coefficients written modulo the constraint locus,
/// e.g. in terms of both `b` and `mu` on `b^2 = 16 mu nu`.
pub fn display_form(sol: &ClosedFormSolution) -> ClosedForm {
    let r = |f: &FracElem| reduce_mod_locus(f, &sol.constraints);
    match &sol.form {
        ClosedForm::Elliptic(e) => ClosedForm::Elliptic(crate::curve::closed::EllipticForm {
            wp: e.wp.iter().map(r).collect(),
            wpp: e.wpp.iter().map(r).collect(),
            g2: r(&e.g2),
            g3: r(&e.g3),
        }),
        ClosedForm::Trig(t) => ClosedForm::Trig(crate::curve::closed::TrigForm {
            num: t.num.iter().map(r).collect(),
            den: t.den.iter().map(r).collect(),
            k2: r(&t.k2),
        }),
        ClosedForm::Rational(q) => ClosedForm::Rational(crate::curve::closed::RationalForm {
            num: q.num.iter().map(r).collect(),
            den: q.den.iter().map(r).collect(),
        }),
    }
}

fn finish_form(
    ode: &AutonomousODE,
    sol: ClosedFormSolution,
    origin: &'static str,
    series: &[SeriesExpr],
    syms: &Symbols,
    scaling: Option<&Scaling>,
    opts: &SolveOptions,
) -> SolvedForm {
    let local_ode = AutonomousODE { order: ode.order, poly: ode.poly.clone(), syms: syms.clone() };
    let exact = verify_exact(&sol, &local_ode);
    let params = sample_parameters(&sol, syms, opts.seed);
    let numeric = params.clone().and_then(|p| verify_numeric(&sol, &local_ode, &p, &opts.numeric));
    let sol_subs = sol.substitutions.clone();
    let img = image(&sol_subs);
    let form = sol.form.substitute(&img);
    let series_match = series.iter().map(|s| matches_series(&form, &s.map_coeffs(&|c| c.substitute(&img)))).find(|m| m.is_some()).flatten();
    let k2 = match &form {
        ClosedForm::Trig(t) => Some(t.k2.clone()),
        ClosedForm::Rational(_) => Some(FracElem::zero()),
        ClosedForm::Elliptic(_) => None,
    };
    let scaled = scaled_values(&sol.substitutions, k2.as_ref(), scaling, syms);
    SolvedForm { solution: sol, origin, exact, numeric, parameters: params.unwrap_or_default(), series_match, scaled }
}

/// Replaces even powers of `k` by powers of `k2`; `None` if `k` occurs
/// to an odd power.
fn substitute_k2(f: &FracElem, k: usize, k2: &FracElem) -> Option<FracElem> {
    let sub = |p: &MPoly| -> Option<FracElem> {
        let mut acc = FracElem::zero();
        for (m, c) in p.terms() {
            let e = m.exp(k);
            if e % 2 == 1 {
                return None;
            }
            let rest = FracElem::from_poly(MPoly::monomial(m.with_exp(k, 0), c.clone()));
            acc = acc.add(&rest.mul(&k2.pow(e / 2)));
        }
        Some(acc)
    };
    let d = sub(&f.den)?;
    if d.is_zero() {
        return None;
    }
    Some(sub(&f.num)?.div(&d))
}

/// Values of the declared scale-invariant combinations on a branch, where
/// they are constant.
pub fn scaled_values(
    subs: &[(usize, FracElem)],
    k2: Option<&FracElem>,
    scaling: Option<&Scaling>,
    syms: &Symbols,
) -> Vec<(String, Option<Rat>)> {
    let Some(scaling) = scaling else { return Vec::new() };
    let img = image(subs);
    let aux = syms.of_kind(SymbolKind::Aux);
    scaling
        .vars
        .iter()
        .map(|v| {
            let mut e = Some(v.expr.substitute(&img));
            for &a in &aux {
                if e.as_ref().is_some_and(|x| x.contains_var(a)) {
                    e = k2.and_then(|k| substitute_k2(e.as_ref().unwrap(), a, k));
                }
            }
            (v.name.clone(), e.and_then(|x| x.as_rat()))
        })
        .collect()
}

/// The subequation as shown in reports: coefficients reduced on the locus.
pub fn display_subeq(branch: &SubeqBranch) -> Poly<FracElem> {
    branch.subeq.map_coeffs(|c| reduce_mod_locus(c, &branch.constraints))
}

/// Constraints of a solution for display.
pub fn display_solution_constraints(sol: &ClosedFormSolution) -> Vec<MPoly> {
    display_constraints(&sol.constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::parse_frac;

    #[test]
    fn kdv_end_to_end() {
        let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
        let rep = solve(&ode, &SolveOptions::default()).unwrap();
        assert_eq!(rep.branches.len(), 1);
        let b = &rep.branches[0];
        assert!(b.check.ok);
        assert_eq!(b.genus.as_ref().unwrap().genus, 1);
        assert_eq!(b.forms[0].origin, "ansatz");
        for f in &b.forms {
            eprintln!("{} {:?}", f.solution.form.render(&rep.analysis.syms), f.numeric.as_ref().map(|r| r.numeric_max_residual));
            assert!(f.verified());
        }
        assert_eq!(b.forms[0].series_match, Some(true));
        assert!(rep.rank_checks.iter().all(|r| r.1 == rep.rank_checks[0].1));
    }

    #[test]
    fn first_order_input_is_its_own_subequation() {
        let ode = AutonomousODE::parse("u1 + u0^2 - c", "c").unwrap();
        let rep = solve(&ode, &SolveOptions::default()).unwrap();
        let f = &rep.branches[0].forms[0];
        assert!(f.verified());
        let ClosedForm::Trig(t) = &f.solution.form else { panic!() };
        assert_eq!(t.k2, parse_frac("4*c", &ode.syms).unwrap());
    }
}
