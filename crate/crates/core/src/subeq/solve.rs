//! Solving the overdetermined system and splitting parameter constraints
//! into branches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::factor::{factor_limited, rational_roots, to_upoly};
use crate::arith::linalg::bareiss_solve;
use crate::arith::{Coeff, Field, FracElem, MPoly, Monomial, Poly, Rat, SymbolKind, Symbols};
use crate::ode::SeriesExpr;
use crate::singular::random_point;

use super::{assemble_system, canonical_constraint, Echelon, LinearSystem, Scaling, SubeqError};

/// One solution family of the subequation coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SubeqBranch {
    /// Canonical constraint numerators on the parameters (empty: generic).
    pub constraints: Vec<MPoly>,
    /// Parameter eliminations applied to realize the constraints.
    pub substitutions: Vec<(usize, FracElem)>,
    /// Values of the scaled variables for isolated branches.
    pub point: Vec<(String, Rat)>,
    /// One coefficient per template monomial.
    pub coeffs: Vec<FracElem>,
    /// `F(u0, u1)`.
    pub subeq: Poly<FracElem>,
    pub source_families: Vec<usize>,
    pub rows_used: Vec<usize>,
    pub terms: usize,
    /// Enforced series with the substitutions applied.
    pub series: Vec<SeriesExpr>,
    /// Dimension of the solution space left free (set to zero).
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub branches: Vec<SubeqBranch>,
    /// Rows of the square subsystem solved at generic parameters.
    pub rows_used: Vec<usize>,
    /// Generic residual numerators `(row, numerator)`.
    pub residuals: Vec<(usize, MPoly)>,
    pub residual_gcd: Option<MPoly>,
    /// Conditions the engine could not turn into branches.
    pub unresolved: Vec<MPoly>,
    /// Isolated points discarded because they lie on the gcd locus.
    pub dropped_points: Vec<Vec<(String, Rat)>>,
}

struct Solved {
    coeffs: Vec<FracElem>,
    rows_used: Vec<usize>,
    residuals: Vec<(usize, MPoly)>,
    nullity: usize,
}

/// Picks the rows that raise the rank at a random rational point, in
/// increasing order, then solves that subsystem exactly.
fn solve_system(sys: &LinearSystem, nsyms: usize, rng: &mut ChaCha8Rng) -> Result<Solved, SubeqError> {
    let nu = sys.template.unknowns().len();
    let spec = (0..32).find_map(|_| sys.specialize(&random_point(nsyms, rng))).expect("no admissible specialization point");
    let mut ech = Echelon::default();
    let mut rows_used = Vec::new();
    for (i, r) in spec.iter().enumerate() {
        if ech.rank() == nu {
            break;
        }
        if ech.insert(r[..nu].to_vec()) {
            rows_used.push(i);
        }
    }
    let a: Vec<Vec<FracElem>> = rows_used.iter().map(|&i| sys.rows[i][..nu].to_vec()).collect();
    let rhs: Vec<FracElem> = rows_used.iter().map(|&i| sys.rows[i][nu].neg()).collect();
    let (mut coeffs, nullity) = if a.is_empty() {
        (vec![FracElem::zero(); nu], nu)
    } else {
        let sol = bareiss_solve(&a, &rhs)?;
        (sol.solution, sol.nullspace.len())
    };
    coeffs.push(FracElem::one());
    let mut residuals = Vec::new();
    for (i, row) in sys.rows.iter().enumerate() {
        let mut acc = FracElem::zero();
        for (c, x) in row.iter().zip(&coeffs) {
            if !c.is_zero() && !x.is_zero() {
                acc = acc.add(&c.mul(x));
            }
        }
        if !acc.is_zero() {
            residuals.push((i, acc.num));
        }
    }
    Ok(Solved { coeffs, rows_used, residuals, nullity })
}

/// Substitution that refuses to divide by an expression vanishing on the
/// constraint locus.
fn substitute(x: &FracElem, subs: &[(usize, FracElem)]) -> Option<FracElem> {
    if subs.is_empty() {
        return Some(x.clone());
    }
    let img = |v: usize| subs.iter().find(|(w, _)| *w == v).map(|(_, f)| f.clone());
    let n = FracElem::from_poly(x.num.clone()).substitute(&img);
    let d = FracElem::from_poly(x.den.clone()).substitute(&img);
    if d.is_zero() {
        None
    } else {
        Some(n.div(&d))
    }
}

/// Turns constraint numerators into eliminations `param = value`, solving
/// each for the last-declared parameter it contains linearly with a
/// monomial coefficient.
pub fn apply_constraints(constraints: &[MPoly], syms: &Symbols) -> Option<Vec<(usize, FracElem)>> {
    let mut subs: Vec<(usize, FracElem)> = Vec::new();
    // Relations among the free Laurent coefficients of different families
    // are solved for those coefficients before touching the parameters.
    let mut params: Vec<usize> = syms.of_kind(SymbolKind::Param);
    params.extend(syms.of_kind(SymbolKind::Resonance));
    for c in constraints {
        let c = substitute(&FracElem::from_poly(c.clone()), &subs)?.num;
        if c.is_zero() {
            continue;
        }
        let safe_coeff = |k: &MPoly| k.num_terms() == 1 && k.vars().iter().all(|&w| syms.get(w).nonzero);
        let mut choice = None;
        for pass in 0..2 {
            for &v in params.iter().rev() {
                if choice.is_some() || c.degree_in(v) != 1 {
                    continue;
                }
                let parts = c.to_univariate(v);
                let ok = if pass == 0 { safe_coeff(&parts[1]) } else { parts[1].num_terms() == 1 };
                if ok && (pass == 1 || !syms.get(v).nonzero) {
                    choice = Some((v, FracElem::new(parts[0].neg(), parts[1].clone())));
                }
            }
        }
        let (v, val) = choice?;
        for (_, f) in subs.iter_mut() {
            *f = substitute(f, &[(v, val.clone())])?;
        }
        subs.push((v, val));
    }
    Some(subs)
}

fn try_branch(
    sys: &LinearSystem,
    syms: &Symbols,
    constraints: Vec<MPoly>,
    point: Vec<(String, Rat)>,
    rng: &mut ChaCha8Rng,
) -> Result<SubeqBranch, Vec<MPoly>> {
    let subs = apply_constraints(&constraints, syms).ok_or_else(|| constraints.clone())?;
    let series: Vec<SeriesExpr> = sys
        .series
        .iter()
        .map(|s| {
            let coeffs = s.coeffs.iter().map(|c| substitute(c, &subs)).collect::<Option<Vec<_>>>()?;
            Some(SeriesExpr { offset: s.offset, coeffs, order: s.order })
        })
        .collect::<Option<_>>()
        .ok_or_else(|| constraints.clone())?;
    let sub_sys = assemble_system(&sys.template, &series, &sys.family_ids, sys.terms).map_err(|_| constraints.clone())?;
    let solved = solve_system(&sub_sys, syms.len(), rng).map_err(|_| constraints.clone())?;
    if !solved.residuals.is_empty() {
        return Err(solved.residuals.into_iter().map(|r| r.1).collect());
    }
    Ok(SubeqBranch {
        subeq: sys.template.polynomial(&solved.coeffs),
        coeffs: solved.coeffs,
        constraints,
        substitutions: subs,
        point,
        source_families: sys.family_ids.clone(),
        rows_used: solved.rows_used,
        terms: sys.terms,
        series,
        nullity: solved.nullity,
    })
}

/// Solves the system at generic parameters, extracts the gcd of the
/// residual conditions and, with a scaling declaration, the isolated
/// solutions of the remaining conditions.
pub fn solve_branches(sys: &LinearSystem, syms: &Symbols, scaling: Option<&Scaling>, seed: u64) -> Result<SolveOutcome, SubeqError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generic = solve_system(sys, syms.len(), &mut rng)?;
    let mut out = SolveOutcome {
        branches: Vec::new(),
        rows_used: generic.rows_used.clone(),
        residuals: generic.residuals.clone(),
        residual_gcd: None,
        unresolved: Vec::new(),
        dropped_points: Vec::new(),
    };
    if generic.residuals.is_empty() {
        out.branches.push(SubeqBranch {
            subeq: sys.template.polynomial(&generic.coeffs),
            coeffs: generic.coeffs,
            constraints: Vec::new(),
            substitutions: Vec::new(),
            point: Vec::new(),
            source_families: sys.family_ids.clone(),
            rows_used: generic.rows_used,
            terms: sys.terms,
            series: sys.series.clone(),
            nullity: generic.nullity,
        });
        return Ok(out);
    }
    let nonzero = syms.nonzero_indices();
    let mut residuals: Vec<MPoly> = generic.residuals.iter().map(|r| r.1.strip_monomial_factors(&nonzero)).collect();
    residuals.sort_by_key(|r| r.num_terms());
    let mut g = MPoly::zero();
    for r in &residuals {
        g = g.gcd(r);
        if g.is_constant() {
            break;
        }
    }
    let g = g.strip_monomial_factors(&nonzero);
    if !g.is_constant() {
        out.residual_gcd = Some(g.clone());
        for f in factor_limited(&g).factors {
            let c = canonical_constraint(&f.poly);
            match try_branch(sys, syms, vec![c.clone()], Vec::new(), &mut rng) {
                Ok(b) => out.branches.push(b),
                Err(_) => out.unresolved.push(c),
            }
        }
    }
    // Conditions off the gcd locus.
    let mut quotients: Vec<MPoly> = Vec::new();
    for r in &residuals {
        let mut q = r.clone();
        if !g.is_constant() {
            while let Some(x) = q.exact_div(&g) {
                q = x;
            }
        }
        let q = canonical_constraint(&q);
        if q.is_constant() {
            // Some row cannot vanish off the gcd locus.
            quotients.clear();
            quotients.push(q);
            break;
        }
        if !quotients.contains(&q) {
            quotients.push(q);
        }
    }
    if quotients.iter().any(|q| q.is_constant()) {
        return finish(out, syms);
    }
    let Some(gauge) = scaling.and_then(|s| Gauge::new(s, syms)) else {
        out.unresolved.extend(quotients);
        return finish(out, syms);
    };
    let local: Option<Vec<MPoly>> = quotients.iter().map(|q| gauge.localize(q)).collect();
    let Some(local) = local else {
        out.unresolved.extend(quotients);
        return finish(out, syms);
    };
    let Some(points) = solve_zero_dim(&local, gauge.vars.len()) else {
        out.unresolved.extend(quotients);
        return finish(out, syms);
    };
    let g_local = if g.is_constant() { None } else { gauge.localize(&g) };
    for pt in points {
        let named: Vec<(String, Rat)> = gauge.vars.iter().zip(&pt).map(|(v, x)| (v.name.clone(), x.clone())).collect();
        if g_local.as_ref().is_some_and(|gl| gl.eval_all(&pt).is_zero()) {
            out.dropped_points.push(named);
            continue;
        }
        let constraints: Vec<MPoly> =
            gauge.vars.iter().zip(&pt).map(|(v, x)| canonical_constraint(&v.expr.sub(&FracElem::from_rat_value(x.clone())).num)).collect();
        match try_branch(sys, syms, constraints.clone(), named, &mut rng) {
            Ok(b) => out.branches.push(b),
            Err(_) => out.unresolved.extend(constraints),
        }
    }
    finish(out, syms)
}

fn finish(out: SolveOutcome, syms: &Symbols) -> Result<SolveOutcome, SubeqError> {
    if out.branches.is_empty() {
        let mut res = out.unresolved.clone();
        if res.is_empty() {
            res = out.residuals.iter().map(|r| r.1.clone()).collect();
        }
        return Err(SubeqError::unresolved(res, syms));
    }
    Ok(out)
}

/// Fixes the scaling symmetry: every parameter shared between scaled
/// variables is set to one, and each scaled variable `s = c * f^e * ...`
/// keeps a private parameter `f`, so that `f^e = s / c`.
struct Gauge {
    vars: Vec<GaugeVar>,
    fixed: Vec<usize>,
}

struct GaugeVar {
    name: String,
    expr: FracElem,
    free: usize,
    exp: u32,
    coef: Rat,
}

impl Gauge {
    fn new(scaling: &Scaling, syms: &Symbols) -> Option<Self> {
        let monomial_exps = |f: &FracElem| -> Option<(Rat, Vec<(usize, i64)>)> {
            if f.num.num_terms() != 1 || f.den.num_terms() != 1 {
                return None;
            }
            let (nm, nc) = f.num.terms().next().unwrap();
            let (dm, dc) = f.den.terms().next().unwrap();
            let n = nm.exps().len().max(dm.exps().len());
            let exps: Vec<(usize, i64)> = (0..n).map(|v| (v, nm.exp(v) as i64 - dm.exp(v) as i64)).filter(|&(_, e)| e != 0).collect();
            Some((nc.clone() / dc, exps))
        };
        let mut cands = Vec::new();
        for sv in &scaling.vars {
            if let Some((c, exps)) = monomial_exps(&sv.expr) {
                if exps.iter().all(|&(v, _)| syms.get(v).kind == SymbolKind::Param) {
                    cands.push((sv, c, exps));
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        let mut vars = Vec::new();
        let mut used = Vec::new();
        for (i, (sv, c, exps)) in cands.iter().enumerate() {
            let private = exps
                .iter()
                .rev()
                .find(|&&(v, e)| e > 0 && cands.iter().enumerate().all(|(k, o)| k == i || o.2.iter().all(|&(w, _)| w != v)))?;
            used.extend(exps.iter().map(|&(v, _)| v));
            vars.push(GaugeVar { name: sv.name.clone(), expr: sv.expr.clone(), free: private.0, exp: private.1 as u32, coef: c.clone() });
        }
        used.sort_unstable();
        used.dedup();
        let fixed = used.into_iter().filter(|v| vars.iter().all(|g| g.free != *v)).collect();
        Some(Gauge { vars, fixed })
    }

    /// Rewrites a parameter polynomial in the scaled variables (local
    /// indices), or `None` if it is not expressible.
    fn localize(&self, p: &MPoly) -> Option<MPoly> {
        let mut residue: Vec<Option<u32>> = vec![None; self.vars.len()];
        let mut out = MPoly::zero();
        for (m, c) in p.terms() {
            let mut exps = vec![0u32; self.vars.len()];
            let mut coef = c.clone();
            for (v, &e) in m.exps().iter().enumerate() {
                if e == 0 || self.fixed.contains(&v) {
                    continue;
                }
                let k = self.vars.iter().position(|g| g.free == v)?;
                let g = &self.vars[k];
                let (t, r) = (e / g.exp, e % g.exp);
                if *residue[k].get_or_insert(r) != r {
                    return None;
                }
                exps[k] = t;
                coef *= Coeff::pow(&g.coef, t).inv();
            }
            out.add_term(Monomial::new(exps), coef);
        }
        for (k, r) in residue.iter().enumerate() {
            if r.is_some_and(|r| r > 0) {
                out = out.mul(&MPoly::var(k));
            }
        }
        Some(out)
    }
}

/// Rational points of a zero-dimensional system in `n` variables, by
/// resultant elimination of the last variable. `None` when some variable
/// is left undetermined.
pub fn solve_zero_dim(polys: &[MPoly], n: usize) -> Option<Vec<Vec<Rat>>> {
    let polys: Vec<MPoly> = polys.iter().filter(|p| !p.is_zero()).cloned().collect();
    if n == 0 {
        return Some(if polys.is_empty() { vec![Vec::new()] } else { Vec::new() });
    }
    if polys.iter().any(|p| p.is_constant()) {
        return Some(Vec::new());
    }
    let v = n - 1;
    let (with_v, without): (Vec<MPoly>, Vec<MPoly>) = polys.iter().cloned().partition(|p| p.contains_var(v));
    if with_v.is_empty() {
        return None;
    }
    let p0 = with_v.iter().min_by_key(|p| (p.degree_in(v), p.num_terms())).unwrap().clone();
    let mut projected = without;
    for p in &with_v {
        if *p != p0 {
            let r = p0.resultant(p, v);
            if !r.is_zero() {
                projected.push(canonical_constraint(&r));
            }
        }
    }
    let partial = solve_zero_dim(&projected, n - 1)?;
    let mut out = Vec::new();
    for pt in partial {
        let mut g = MPoly::zero();
        for p in &with_v {
            let mut q = p.clone();
            for (w, x) in pt.iter().enumerate() {
                q = q.eval_var(w, x);
            }
            g = g.gcd(&q);
        }
        if g.is_zero() {
            return None;
        }
        if g.is_constant() {
            continue;
        }
        for r in rational_roots(&to_upoly(&g, v)?) {
            let mut full = pt.clone();
            full.push(r);
            out.push(full);
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn zero_dim_two_variables() {
        // x (x - 2) = 0, y - x - 1 = 0, y^2 = 2y + x y - x - 1 ... simple grid check
        let x = MPoly::var(0);
        let y = MPoly::var(1);
        let one = MPoly::one();
        let p1 = x.mul(&x.sub(&one.scale(&rat(2, 1))));
        let p2 = y.sub(&x).sub(&one);
        let pts = solve_zero_dim(&[p1, p2], 2).unwrap();
        assert_eq!(pts, vec![vec![rat(0, 1), rat(1, 1)], vec![rat(2, 1), rat(3, 1)]]);
        assert!(solve_zero_dim(std::slice::from_ref(&x), 2).is_none());
    }

    #[test]
    fn constraint_elimination_prefers_last_param() {
        let syms = crate::ode::parse_params("nu != 0, b, mu, A").unwrap();
        let c = crate::ode::parse_poly("b^2 - 16*mu*nu", &syms, &|_| None).unwrap().constant_term().num;
        let subs = apply_constraints(&[c], &syms).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].0, 2);
        assert_eq!(subs[0].1, crate::ode::parse_frac("b^2/(16*nu)", &syms).unwrap());
    }
}
