//! JSON reports, schema 1. Every expression is stored in the canonical text
//! format so a report can be parsed back and re-verified.

use bbsolve_core::arith::render::{render_frac, render_mpoly, render_rat};
use bbsolve_core::arith::{FracElem, MPoly, Rat, SymbolKind, Symbols};
use bbsolve_core::curve::closed::{ClosedForm, ClosedFormSolution, EllipticForm, RationalForm, TrigForm};
use bbsolve_core::ode::parse_frac;
use bbsolve_core::ode::SeriesExpr;
use bbsolve_core::pipeline::{
    display_form, display_solution_constraints, display_subeq, Analysis, BranchResult, SolveReport, SolvedForm, STABILITY_MARGIN,
};
use bbsolve_core::singular::{render_indicial, render_series, LaurentFamily};
use bbsolve_core::subeq::{canonical_constraint, render_subeq};
use bbsolve_core::verify::NumericOptions;
use serde::{Deserialize, Serialize};

use crate::problem::Problem;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    /// `analyzed`, `verified` or `no_closed_form`.
    pub status: String,
    pub problem: Problem,
    pub symbols: Vec<SymbolEntry>,
    pub families: Vec<FamilyEntry>,
    pub residues: Vec<ResidueEntry>,
    #[serde(default)]
    pub branches: Vec<BranchEntry>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub name: String,
    pub kind: String,
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub index: usize,
    /// `u ~ u0 chi^exponent`.
    pub exponent: i64,
    pub u0: String,
    pub multiplicity: u32,
    pub indicial: Option<String>,
    pub fuchs_indices: Vec<i64>,
    pub resonances: Vec<(i64, String)>,
    pub series: Option<String>,
    /// Why the expansion was not carried out, if it was not.
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub power: u32,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsequenceEntry {
    pub ok: bool,
    /// Exponent ranges of `chi` checked per family.
    pub checked: Vec<(i64, i64)>,
    pub differential: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub index: usize,
    pub constraints: Vec<String>,
    pub substitutions: Vec<(String, String)>,
    pub subequation: String,
    /// The subequation with coefficients written on the constraint locus.
    pub subequation_display: String,
    pub point: Vec<(String, String)>,
    pub scaled: Vec<(String, Option<String>)>,
    pub rows_used: Vec<usize>,
    pub nullity: usize,
    pub consequence: ConsequenceEntry,
    pub genus: Option<u32>,
    pub genus_error: Option<String>,
    pub closed_forms: Vec<FormEntry>,
    pub integration_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FormData {
    Elliptic { wp: Vec<String>, wpp: Vec<String>, g2: String, g3: String },
    Trigonometric { num: Vec<String>, den: Vec<String>, k2: String },
    Rational { num: Vec<String>, den: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormEntry {
    pub kind: String,
    /// `ansatz` for a direct fit, `degenerate` for a limit of an elliptic one.
    pub origin: String,
    pub display: String,
    pub constraints: Vec<String>,
    pub constraints_display: Vec<String>,
    pub substitutions: Vec<(String, String)>,
    pub form: FormData,
    pub scaled: Vec<(String, Option<String>)>,
    pub series_match: Option<bool>,
    pub verification: VerificationEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationEntry {
    pub verified: bool,
    pub exact: bool,
    pub remainder: String,
    /// Largest relative residual, two significant digits.
    pub numeric_max_residual: Option<String>,
    pub numeric_points: usize,
    pub numeric_error: Option<String>,
    pub parameters: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Truncation `J` of the linear system.
    pub terms: usize,
    /// Series length used to re-verify branches.
    pub series_terms: usize,
    pub rank_checks: Vec<(usize, usize)>,
    pub rows_used: Vec<usize>,
    pub residual_gcd: Option<String>,
    pub unresolved: Vec<String>,
    pub dropped_points: usize,
    pub seed: u64,
    pub numeric_seed: u64,
    pub numeric_points: usize,
    pub precision_bits: usize,
    pub versions: Vec<(String, String)>,
}

fn kind_name(k: SymbolKind) -> &'static str {
    match k {
        SymbolKind::Param => "param",
        SymbolKind::Resonance => "resonance",
        SymbolKind::Scaled => "scaled",
        SymbolKind::Aux => "aux",
    }
}

fn kind_of(name: &str) -> Option<SymbolKind> {
    Some(match name {
        "param" => SymbolKind::Param,
        "resonance" => SymbolKind::Resonance,
        "scaled" => SymbolKind::Scaled,
        "aux" => SymbolKind::Aux,
        _ => return None,
    })
}

pub fn symbol_entries(syms: &Symbols) -> Vec<SymbolEntry> {
    syms.iter().map(|s| SymbolEntry { name: s.name.clone(), kind: kind_name(s.kind).into(), nonzero: s.nonzero }).collect()
}

/// Rebuilds the symbol table in its recorded order.
pub fn symbols_of(entries: &[SymbolEntry]) -> Result<Symbols, String> {
    let mut syms = Symbols::new();
    for e in entries {
        let kind = kind_of(&e.kind).ok_or_else(|| format!("unknown symbol kind `{}`", e.kind))?;
        syms.add(&e.name, kind, e.nonzero);
    }
    Ok(syms)
}

fn rfrac(f: &FracElem, syms: &Symbols) -> String {
    render_frac(f, syms)
}

fn subs_entries(subs: &[(usize, FracElem)], syms: &Symbols) -> Vec<(String, String)> {
    subs.iter().map(|(v, f)| (syms.name(*v).to_string(), rfrac(f, syms))).collect()
}

fn scaled_entries(v: &[(String, Option<Rat>)]) -> Vec<(String, Option<String>)> {
    v.iter().map(|(n, r)| (n.clone(), r.as_ref().map(render_rat))).collect()
}

pub fn family_entries(analysis: &Analysis) -> Vec<FamilyEntry> {
    let syms = &analysis.syms;
    analysis
        .orders
        .families
        .iter()
        .enumerate()
        .map(|(i, fam)| {
            let lf = analysis.family(i);
            FamilyEntry {
                index: i,
                exponent: fam.p,
                u0: rfrac(&fam.u0, syms),
                multiplicity: fam.multiplicity,
                indicial: lf.map(|l| render_indicial(&l.indicial, syms)),
                fuchs_indices: lf.map(|l| l.indicial.integer_roots.iter().map(|r| r.0).collect()).unwrap_or_default(),
                resonances: lf.map(|l| l.resonances.iter().map(|(j, s)| (*j, syms.name(*s).to_string())).collect()).unwrap_or_default(),
                series: lf.map(|l| render_series(&series_head(l), syms)),
                skipped: analysis.skipped.iter().find(|(t, _)| *t == i).map(|(_, e)| e.to_string()),
            }
        })
        .collect()
}

/// Leading part of a family's series: two terms past the last resonance.
pub fn series_head(l: &LaurentFamily) -> SeriesExpr {
    let top = l.indicial.integer_roots.iter().map(|r| r.0).max().unwrap_or(0).max(1) as usize + 2;
    let n = (top + 1).min(l.series.coeffs.len());
    SeriesExpr::truncated(l.series.offset, l.series.coeffs[..n].to_vec())
}

pub fn residue_entries(analysis: &Analysis) -> Vec<ResidueEntry> {
    analysis.residues.iter().map(|r| ResidueEntry { power: r.power, value: rfrac(&r.value, &analysis.syms) }).collect()
}

fn form_data(form: &ClosedForm, syms: &Symbols) -> FormData {
    let v = |xs: &[FracElem]| xs.iter().map(|x| rfrac(x, syms)).collect();
    match form {
        ClosedForm::Elliptic(e) => FormData::Elliptic { wp: v(&e.wp), wpp: v(&e.wpp), g2: rfrac(&e.g2, syms), g3: rfrac(&e.g3, syms) },
        ClosedForm::Trig(t) => FormData::Trigonometric { num: v(&t.num), den: v(&t.den), k2: rfrac(&t.k2, syms) },
        ClosedForm::Rational(r) => FormData::Rational { num: v(&r.num), den: v(&r.den) },
    }
}

fn residual_text(x: f64) -> String {
    format!("{x:.1e}")
}

fn form_entry(f: &SolvedForm, syms: &Symbols) -> FormEntry {
    let sol = &f.solution;
    let (numeric_max_residual, numeric_points, numeric_error) = match &f.numeric {
        Ok(r) => (r.numeric_max_residual.map(residual_text), r.sample_points.len(), None),
        Err(e) => (None, 0, Some(e.to_string())),
    };
    FormEntry {
        kind: sol.form.kind().into(),
        origin: f.origin.into(),
        display: display_form(sol).render(syms),
        constraints: sol.constraints.iter().map(|c| render_mpoly(c, syms)).collect(),
        constraints_display: display_solution_constraints(sol).iter().map(|c| render_mpoly(c, syms)).collect(),
        substitutions: subs_entries(&sol.substitutions, syms),
        form: form_data(&sol.form, syms),
        scaled: scaled_entries(&f.scaled),
        series_match: f.series_match,
        verification: VerificationEntry {
            verified: f.verified(),
            exact: f.exact.exact_ok,
            remainder: f.exact.render_remainder(syms),
            numeric_max_residual,
            numeric_points,
            numeric_error,
            parameters: f.parameters.iter().map(render_rat).collect(),
        },
    }
}

fn branch_entry(i: usize, b: &BranchResult, syms: &Symbols) -> BranchEntry {
    let br = &b.branch;
    BranchEntry {
        index: i,
        constraints: br.constraints.iter().map(|c| render_mpoly(c, syms)).collect(),
        substitutions: subs_entries(&br.substitutions, syms),
        subequation: render_subeq(&br.subeq, syms),
        subequation_display: render_subeq(&display_subeq(br), syms),
        point: br.point.iter().map(|(n, r)| (n.clone(), render_rat(r))).collect(),
        scaled: scaled_entries(&b.scaled),
        rows_used: br.rows_used.clone(),
        nullity: br.nullity,
        consequence: ConsequenceEntry {
            ok: b.check.ok,
            checked: b.check.series.iter().map(|s| s.checked).collect(),
            differential: b.check.differential,
            detail: b.check.describe(syms),
        },
        genus: b.genus.as_ref().ok().map(|g| g.genus),
        genus_error: b.genus.as_ref().err().map(|e| e.to_string()),
        closed_forms: b.forms.iter().map(|f| form_entry(f, syms)).collect(),
        integration_error: b.integration_error.as_ref().map(|e| e.to_string()),
    }
}

pub fn versions() -> Vec<(String, String)> {
    vec![("bbsolve".into(), env!("CARGO_PKG_VERSION").into()), ("bbsolve-core".into(), bbsolve_core::VERSION.into())]
}

pub fn analysis_report(problem: &Problem, analysis: &Analysis, terms: usize, seed: u64, opts: &NumericOptions) -> Report {
    Report {
        schema: SCHEMA,
        command: "analyze".into(),
        status: "analyzed".into(),
        problem: problem.clone(),
        symbols: symbol_entries(&analysis.syms),
        families: family_entries(analysis),
        residues: residue_entries(analysis),
        branches: Vec::new(),
        provenance: Provenance {
            terms,
            series_terms: analysis.expanded,
            rank_checks: Vec::new(),
            rows_used: Vec::new(),
            residual_gcd: None,
            unresolved: Vec::new(),
            dropped_points: 0,
            seed,
            numeric_seed: opts.seed,
            numeric_points: opts.points,
            precision_bits: opts.precision,
            versions: versions(),
        },
    }
}

pub fn solve_report(problem: &Problem, rep: &SolveReport, opts: &NumericOptions) -> Report {
    let syms = &rep.syms;
    let outcome = rep.outcome.as_ref();
    let branches: Vec<BranchEntry> = rep.branches.iter().enumerate().map(|(i, b)| branch_entry(i, b, syms)).collect();
    let verified = rep.verified_forms().next().is_some();
    Report {
        schema: SCHEMA,
        command: "solve".into(),
        status: if verified { "verified" } else { "no_closed_form" }.into(),
        problem: problem.clone(),
        symbols: symbol_entries(syms),
        families: family_entries(&rep.analysis),
        residues: residue_entries(&rep.analysis),
        branches,
        provenance: Provenance {
            terms: rep.terms,
            series_terms: rep.terms + STABILITY_MARGIN,
            rank_checks: rep.rank_checks.clone(),
            rows_used: outcome.map(|o| o.rows_used.clone()).unwrap_or_default(),
            residual_gcd: outcome.and_then(|o| o.residual_gcd.as_ref()).map(|g| render_mpoly(&canonical_constraint(g), syms)),
            unresolved: outcome.map(|o| o.unresolved.iter().map(|u| render_mpoly(u, syms)).collect()).unwrap_or_default(),
            dropped_points: outcome.map_or(0, |o| o.dropped_points.len()),
            seed: rep.seed,
            numeric_seed: opts.seed,
            numeric_points: opts.points,
            precision_bits: opts.precision,
            versions: versions(),
        },
    }
}

/// Parsing stored expressions back into exact objects.
pub struct Reader<'a> {
    pub syms: &'a Symbols,
}

impl Reader<'_> {
    pub fn frac(&self, text: &str) -> Result<FracElem, String> {
        parse_frac(text, self.syms).map_err(|e| format!("`{text}`: {e}"))
    }

    fn fracs(&self, xs: &[String]) -> Result<Vec<FracElem>, String> {
        xs.iter().map(|x| self.frac(x)).collect()
    }

    pub fn poly(&self, text: &str) -> Result<MPoly, String> {
        let f = self.frac(text)?;
        if !f.den.is_constant() {
            return Err(format!("`{text}` is not a polynomial"));
        }
        Ok(f.num.scale(&f.den.constant_term().recip()))
    }

    pub fn substitutions(&self, subs: &[(String, String)]) -> Result<Vec<(usize, FracElem)>, String> {
        subs.iter()
            .map(|(n, e)| {
                let v = self.syms.index(n).ok_or_else(|| format!("unknown symbol `{n}`"))?;
                Ok((v, self.frac(e)?))
            })
            .collect()
    }

    pub fn form(&self, data: &FormData) -> Result<ClosedForm, String> {
        Ok(match data {
            FormData::Elliptic { wp, wpp, g2, g3 } => {
                ClosedForm::Elliptic(EllipticForm { wp: self.fracs(wp)?, wpp: self.fracs(wpp)?, g2: self.frac(g2)?, g3: self.frac(g3)? })
            }
            FormData::Trigonometric { num, den, k2 } => {
                ClosedForm::Trig(TrigForm { num: self.fracs(num)?, den: self.fracs(den)?, k2: self.frac(k2)? })
            }
            FormData::Rational { num, den } => ClosedForm::Rational(RationalForm { num: self.fracs(num)?, den: self.fracs(den)? }),
        })
    }

    pub fn solution(&self, entry: &FormEntry) -> Result<ClosedFormSolution, String> {
        Ok(ClosedFormSolution {
            form: self.form(&entry.form)?,
            constraints: entry.constraints.iter().map(|c| self.poly(c)).collect::<Result<_, _>>()?,
            substitutions: self.substitutions(&entry.substitutions)?,
        })
    }
}
