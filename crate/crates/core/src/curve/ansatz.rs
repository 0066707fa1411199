//! Polynomial systems from closed-form ansätze: unknown coefficients over
//! the parameter field, solved by linear elimination and univariate root
//! extraction, branching on every root.

use crate::arith::factor::factor_limited;
use crate::arith::{Coeff, Field, FracElem, MPoly, Symbols};
use crate::subeq::solve::apply_constraints;

const MAX_SOLUTIONS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzSolution {
    /// Value of every unknown, free of unknowns.
    pub values: Vec<(usize, FracElem)>,
    /// Parameter constraints imposed while solving.
    pub constraints: Vec<MPoly>,
    pub substitutions: Vec<(usize, FracElem)>,
}

impl AnsatzSolution {
    pub fn value(&self, v: usize) -> Option<&FracElem> {
        self.values.iter().find(|(w, _)| *w == v).map(|(_, f)| f)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnsatzOutcome {
    pub solutions: Vec<AnsatzSolution>,
    /// Subsystems the solver could not reduce further.
    pub stuck: Vec<Vec<MPoly>>,
}

pub struct Ansatz<'a> {
    pub syms: &'a Symbols,
    pub unknowns: Vec<usize>,
    /// Unknowns known to be nonzero (leading coefficients).
    pub nonzero_unknowns: Vec<usize>,
    /// Whether parameter conditions may be imposed to reach a solution.
    pub allow_constraints: bool,
}

#[derive(Clone, Debug, Default)]
struct State {
    values: Vec<(usize, FracElem)>,
    constraints: Vec<MPoly>,
    subs: Vec<(usize, FracElem)>,
}

impl State {
    fn image(&self, v: usize) -> Option<FracElem> {
        self.values.iter().chain(self.subs.iter()).find(|(w, _)| *w == v).map(|(_, f)| f.clone())
    }

    fn assign(&self, v: usize, val: FracElem) -> State {
        let mut next = self.clone();
        let img = |w: usize| if w == v { Some(val.clone()) } else { None };
        for (_, f) in next.values.iter_mut() {
            *f = f.substitute(&img);
        }
        next.values.push((v, val));
        next
    }
}

impl Ansatz<'_> {
    pub fn solve(&self, equations: &[MPoly]) -> AnsatzOutcome {
        let mut out = AnsatzOutcome::default();
        self.step(equations.to_vec(), State::default(), &mut out, 0);
        out
    }

    fn nonzero(&self) -> Vec<usize> {
        let mut nz = self.syms.nonzero_indices();
        nz.extend(self.nonzero_unknowns.iter().copied());
        nz
    }

    fn has_unknown(&self, p: &MPoly) -> bool {
        self.unknowns.iter().any(|&u| p.contains_var(u))
    }

    fn unknowns_in(&self, p: &MPoly) -> Vec<usize> {
        self.unknowns.iter().copied().filter(|&u| p.contains_var(u)).collect()
    }

    /// Substitutes the current state and strips factors known to be
    /// nonzero; `None` when an equation becomes a nonzero constant.
    fn normalize(&self, eqs: &[MPoly], st: &State) -> Option<Vec<MPoly>> {
        let nz = self.nonzero();
        let img = |v: usize| st.image(v);
        let mut out: Vec<MPoly> = Vec::new();
        for e in eqs {
            let f = FracElem::from_poly(e.clone()).substitute(&img).num;
            if f.is_zero() {
                continue;
            }
            let f = f.strip_monomial_factors(&nz);
            if f.is_constant() {
                return None;
            }
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out.sort_by_key(|f| (self.unknowns_in(f).len(), f.total_degree(), f.num_terms()));
        Some(out)
    }

    fn step(&self, eqs: Vec<MPoly>, st: State, out: &mut AnsatzOutcome, depth: usize) {
        if out.solutions.len() >= MAX_SOLUTIONS || depth > 4 * self.unknowns.len() + 8 {
            return;
        }
        let Some(eqs) = self.normalize(&eqs, &st) else { return };
        if eqs.is_empty() {
            if self.unknowns.iter().all(|u| st.values.iter().any(|(w, _)| w == u)) {
                let sol = AnsatzSolution { values: st.values, constraints: st.constraints, substitutions: st.subs };
                if !out.solutions.contains(&sol) {
                    out.solutions.push(sol);
                }
            }
            return;
        }
        if let Some(cond) = eqs.iter().find(|e| !self.has_unknown(e)) {
            if self.allow_constraints {
                self.impose(cond, &eqs, &st, out, depth);
            }
            return;
        }
        if let Some((v, val)) = self.pick_linear(&eqs) {
            let next = st.assign(v, val);
            self.step(eqs, next, out, depth + 1);
            return;
        }
        if let Some((v, roots)) = self.univariate_roots(&eqs) {
            for r in roots {
                if r.is_zero() && self.nonzero_unknowns.contains(&v) {
                    continue;
                }
                self.step(eqs.clone(), st.assign(v, r), out, depth + 1);
            }
            return;
        }
        out.stuck.push(eqs);
    }

    fn impose(&self, cond: &MPoly, eqs: &[MPoly], st: &State, out: &mut AnsatzOutcome, depth: usize) {
        for f in factor_limited(cond).factors {
            let mut constraints = st.constraints.clone();
            constraints.push(f.poly.clone());
            let Some(subs) = apply_constraints(&constraints, self.syms) else {
                out.stuck.push(vec![f.poly]);
                continue;
            };
            let img = |w: usize| subs.iter().find(|(v, _)| *v == w).map(|(_, x)| x.clone());
            let values = st.values.iter().map(|(v, x)| (*v, x.substitute(&img))).collect();
            self.step(eqs.to_vec(), State { values, constraints, subs }, out, depth + 1);
        }
    }

    /// An unknown occurring linearly with an unknown-free coefficient,
    /// preferring monomial coefficients and short equations.
    fn pick_linear(&self, eqs: &[MPoly]) -> Option<(usize, FracElem)> {
        let mut best: Option<((usize, usize), usize, FracElem)> = None;
        for e in eqs {
            for v in self.unknowns_in(e) {
                if e.degree_in(v) != 1 {
                    continue;
                }
                let parts = e.to_univariate(v);
                if self.has_unknown(&parts[1]) {
                    continue;
                }
                let score = (usize::from(parts[1].num_terms() > 1), e.num_terms());
                if best.as_ref().is_none_or(|b| score < b.0) {
                    best = Some((score, v, FracElem::new(parts[0].neg(), parts[1].clone())));
                }
            }
        }
        best.map(|(_, v, x)| (v, x))
    }

    /// Roots of the gcd of all equations involving a single unknown.
    fn univariate_roots(&self, eqs: &[MPoly]) -> Option<(usize, Vec<FracElem>)> {
        let v = eqs.iter().find_map(|e| match self.unknowns_in(e).as_slice() {
            [v] => Some(*v),
            _ => None,
        })?;
        let g = eqs
            .iter()
            .filter(|e| self.unknowns_in(e) == [v])
            .fold(MPoly::zero(), |acc, e| if acc.is_zero() { e.clone() } else { acc.gcd(e) });
        if !g.contains_var(v) {
            return Some((v, Vec::new()));
        }
        let mut roots: Vec<FracElem> = Vec::new();
        let mut irreducible = false;
        for f in factor_limited(&g).factors {
            let c = f.poly.to_univariate(v);
            let r = match f.poly.degree_in(v) {
                0 => continue,
                1 => vec![FracElem::new(c[0].neg(), c[1].clone())],
                2 => {
                    let (a, b, cc) =
                        (FracElem::from_poly(c[2].clone()), FracElem::from_poly(c[1].clone()), FracElem::from_poly(c[0].clone()));
                    let disc = b.mul(&b).sub(&a.mul(&cc).mul(&FracElem::from_int(4)));
                    match disc.sqrt() {
                        Some(s) => {
                            let two_a = a.mul(&FracElem::from_int(2));
                            vec![b.neg().add(&s).div(&two_a), b.neg().sub(&s).div(&two_a)]
                        }
                        None => {
                            irreducible = true;
                            continue;
                        }
                    }
                }
                _ => {
                    irreducible = true;
                    continue;
                }
            };
            for x in r {
                if !roots.contains(&x) {
                    roots.push(x);
                }
            }
        }
        if irreducible && roots.is_empty() {
            return None;
        }
        Some((v, roots))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SymbolKind;
    use crate::ode::{parse_frac, parse_params};

    fn setup(params: &str, unknowns: &[&str]) -> (Symbols, Vec<usize>) {
        let mut syms = parse_params(params).unwrap();
        let u = unknowns.iter().map(|n| syms.add(n, SymbolKind::Aux, false)).collect();
        (syms, u)
    }

    fn eqs(src: &[&str], syms: &Symbols) -> Vec<MPoly> {
        src.iter().map(|s| parse_frac(s, syms).unwrap().num).collect()
    }

    #[test]
    fn triangular_quadratic_system() {
        let (syms, u) = setup("a != 0", &["x", "y"]);
        let e = eqs(&["x^2 - 4*a^2", "x*y - a"], &syms);
        let out = Ansatz { syms: &syms, unknowns: u.clone(), nonzero_unknowns: vec![], allow_constraints: false }.solve(&e);
        assert_eq!(out.solutions.len(), 2);
        for s in &out.solutions {
            let x = s.value(u[0]).unwrap();
            let y = s.value(u[1]).unwrap();
            assert!(x.mul(y).sub(&FracElem::var(0)).is_zero());
        }
    }

    #[test]
    fn inconsistent_and_constrained() {
        let (syms, u) = setup("a, b", &["x"]);
        let e = eqs(&["x - 1", "x - a"], &syms);
        let strict = Ansatz { syms: &syms, unknowns: u.clone(), nonzero_unknowns: vec![], allow_constraints: false };
        assert!(strict.solve(&e).solutions.is_empty());
        let loose = Ansatz { allow_constraints: true, ..strict };
        let out = loose.solve(&e);
        assert_eq!(out.solutions.len(), 1);
        assert_eq!(out.solutions[0].substitutions, vec![(0, FracElem::one())]);
    }
}
