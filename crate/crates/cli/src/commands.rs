//! The `analyze`, `solve` and `verify` subcommands. Each returns an exit
//! code together with the JSON document and the human-readable summary.

use std::fmt::Write as _;

use bbsolve_core::ode::{parse_poly, u_var, AutonomousODE};
use bbsolve_core::pipeline::{analyze, solve, PipelineError, SolveOptions, NUMERIC_TOLERANCE};
use bbsolve_core::singular::{fuchs_indices, leading_orders};
use bbsolve_core::verify::{sample_parameters, verify_exact, verify_numeric, verify_subeq_consequence, NumericOptions};
use serde::Serialize;
use thiserror::Error;

use crate::problem::{Problem, ProblemError};
use crate::report::{analysis_report, solve_report, symbols_of, Reader, Report, SymbolEntry, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_CLOSED_FORM: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{path}: {source}")]
    Pipeline {
        path: String,
        #[source]
        source: PipelineError,
    },
    #[error("{path}: {message}")]
    Report { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Problem(_) => "problem",
            CliError::Pipeline { .. } => "pipeline",
            CliError::Report { .. } => "report",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: u32,
            error: Body<'a>,
        }
        let doc = Doc { schema: SCHEMA, error: Body { kind: self.kind(), message: self.to_string() } };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

/// Flag overrides shared by `analyze` and `solve`.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub terms: Option<usize>,
    pub families: Option<Vec<usize>>,
    pub bounds: Option<(usize, usize)>,
    pub scaling: Option<String>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, p: &Problem) -> Problem {
        let mut p = p.clone();
        if self.terms.is_some() {
            p.terms = self.terms;
        }
        if self.families.is_some() {
            p.families = self.families.clone();
        }
        if self.bounds.is_some() {
            p.bounds = self.bounds;
        }
        if self.scaling.is_some() {
            p.scaling = self.scaling.clone();
        }
        p
    }
}

pub const DEFAULT_SEED: u64 = 7;

pub struct Outcome {
    pub code: i32,
    pub json: String,
    pub text: String,
}

fn to_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("serializable")
}

fn numeric_options(seed: u64) -> NumericOptions {
    NumericOptions { seed, ..NumericOptions::default() }
}

/// Enough terms to pass every integer Fuchs index.
fn analysis_terms(ode: &AutonomousODE) -> Result<usize, PipelineError> {
    let orders = leading_orders(ode)?;
    let mut top = 1;
    for fam in &orders.families {
        if let Ok(ind) = fuchs_indices(fam, ode) {
            top = ind.integer_roots.iter().map(|r| r.0).fold(top, i64::max);
        }
    }
    Ok(top as usize + 2)
}

pub fn cmd_analyze(problem: &Problem, path: &str, seed: Option<u64>) -> Result<Outcome, CliError> {
    let ode = problem.ode();
    let wrap = |source| CliError::Pipeline { path: path.to_string(), source };
    let terms = match problem.terms {
        Some(t) => t,
        None => analysis_terms(&ode).map_err(wrap)?,
    };
    let analysis = analyze(&ode, terms, 1).map_err(wrap)?;
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let report = analysis_report(problem, &analysis, terms, seed, &numeric_options(seed));
    Ok(Outcome { code: EXIT_OK, json: to_json(&report), text: human(&report) })
}

pub fn cmd_solve(problem: &Problem, path: &str, seed: Option<u64>) -> Result<Outcome, CliError> {
    let ode = problem.ode();
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let opts = SolveOptions {
        terms: problem.terms,
        families: problem.families.clone(),
        bounds: problem.bounds,
        scaling: problem.scaling.clone(),
        seed,
        residue_power: 1,
        numeric: numeric_options(seed),
    };
    let rep = solve(&ode, &opts).map_err(|source| CliError::Pipeline { path: path.to_string(), source })?;
    let report = solve_report(problem, &rep, &opts.numeric);
    let code = if report.status == "verified" { EXIT_OK } else { EXIT_NO_CLOSED_FORM };
    Ok(Outcome { code, json: to_json(&report), text: human(&report) })
}

/// Human-readable summary of a report.
pub fn human(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ode: {} = 0   [{}]", r.problem.ode, r.problem.params);
    for f in &r.families {
        let _ = writeln!(s, "family {}: u ~ {} * chi^{}", f.index, f.u0, f.exponent);
        if let Some(ind) = &f.indicial {
            let _ = writeln!(s, "  indicial: {ind}   Fuchs indices {:?}", f.fuchs_indices);
        }
        if let Some(series) = &f.series {
            let _ = writeln!(s, "  u = {series}");
        }
        if let Some(why) = &f.skipped {
            let _ = writeln!(s, "  not expanded: {why}");
        }
    }
    for c in &r.residues {
        let _ = writeln!(s, "residue of u^{}: {}", c.power, c.value);
    }
    if r.command == "solve" {
        let p = &r.provenance;
        let _ = writeln!(s, "J = {}, ranks {:?}, rows used {:?}", p.terms, p.rank_checks, p.rows_used);
        if let Some(g) = &p.residual_gcd {
            let _ = writeln!(s, "residual gcd: {g}");
        }
        for b in &r.branches {
            let cons = if b.constraints.is_empty() { "generic".to_string() } else { b.constraints.join(", ") };
            let genus = b.genus.map_or_else(|| "?".to_string(), |g| g.to_string());
            let _ = writeln!(s, "branch {} [{}], genus {}", b.index, cons, genus);
            let _ = writeln!(s, "  F = {}", b.subequation_display);
            for f in &b.closed_forms {
                let tag = if f.verification.verified { "verified" } else { "UNVERIFIED" };
                let _ = writeln!(s, "  [{tag}] {}", f.display);
                if !f.constraints_display.is_empty() && f.constraints_display != b.constraints {
                    let _ = writeln!(s, "      on {}", f.constraints_display.join(", "));
                }
            }
            if let Some(e) = &b.integration_error {
                let _ = writeln!(s, "  integration: {e}");
            }
        }
        let _ = writeln!(s, "status: {}", r.status);
    }
    s
}

#[derive(Debug, Default, Serialize)]
pub struct VerifySummary {
    pub schema: u32,
    pub passed: bool,
    pub branches: usize,
    pub forms: usize,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

/// Re-runs the exact and numeric checks on a stored report.
pub fn cmd_verify(text: &str, path: &str, problem: Option<&Problem>) -> Result<Outcome, CliError> {
    let summary = verify_text(text, path, problem)?;
    let mut human = String::new();
    for w in &summary.warnings {
        let _ = writeln!(human, "warning: {w}");
    }
    for f in &summary.failures {
        let _ = writeln!(human, "FAIL {f}");
    }
    let _ =
        writeln!(human, "{}: {} branches, {} closed forms", if summary.passed { "pass" } else { "fail" }, summary.branches, summary.forms);
    let code = if summary.passed { EXIT_OK } else { EXIT_ERROR };
    Ok(Outcome { code, json: serde_json::to_string_pretty(&summary).expect("serializable"), text: human })
}

pub fn verify_text(text: &str, path: &str, problem: Option<&Problem>) -> Result<VerifySummary, CliError> {
    let bad = |message: String| CliError::Report { path: path.to_string(), message };
    let mut out = VerifySummary { schema: SCHEMA, passed: true, ..Default::default() };
    if text.trim().is_empty() {
        out.warnings.push("empty report; nothing to verify".into());
        return Ok(out);
    }
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if value.as_object().is_some_and(|o| o.is_empty()) {
        out.warnings.push("empty report; nothing to verify".into());
        return Ok(out);
    }
    match value.get("schema").and_then(|s| s.as_u64()) {
        Some(v) if v == u64::from(SCHEMA) => {}
        other => return Err(bad(format!("unsupported schema {other:?}"))),
    }
    let report: Report = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
    if let Some(p) = problem {
        if p.ode != report.problem.ode || p.params != report.problem.params {
            return Err(bad("report was produced for a different problem".into()));
        }
    }
    if report.branches.is_empty() {
        out.warnings.push("report has no branches; nothing to verify".into());
        return Ok(out);
    }
    // Parameters first so re-analysis recreates resonance names exactly.
    let params: Vec<SymbolEntry> = report.symbols.iter().filter(|e| e.kind == "param").cloned().collect();
    let params = symbols_of(&params).map_err(&bad)?;
    let ode = AutonomousODE::parse_with(&report.problem.ode, params).map_err(|e| bad(e.to_string()))?;
    let analysis = analyze(&ode, report.provenance.series_terms, 1).map_err(|e| bad(e.to_string()))?;
    let mut syms = analysis.syms.clone();
    for s in symbols_of(&report.symbols).map_err(&bad)?.iter() {
        syms.add(&s.name, s.kind, s.nonzero);
    }
    let reader = Reader { syms: &syms };
    let opts = NumericOptions {
        seed: report.provenance.numeric_seed,
        points: report.provenance.numeric_points,
        precision: report.provenance.precision_bits,
        ..NumericOptions::default()
    };
    let all: Vec<usize> = (0..report.families.len()).collect();
    let ids = report.problem.families.clone().unwrap_or(all);
    for b in &report.branches {
        out.branches += 1;
        let here = format!("branch {}", b.index);
        let subs = reader.substitutions(&b.substitutions).map_err(&bad)?;
        let img = |v: usize| subs.iter().find(|(w, _)| *w == v).map(|(_, f)| f.clone());
        let f = parse_poly(&b.subequation, &syms, &u_var).map_err(|e| bad(format!("{here}: {e}")))?;
        let series: Vec<_> = ids.iter().filter_map(|&i| analysis.family(i)).map(|l| l.series.map_coeffs(&|c| c.substitute(&img))).collect();
        let local = AutonomousODE { order: ode.order, poly: ode.poly.map_coeffs(|c| c.substitute(&img)), syms: syms.clone() };
        let check = verify_subeq_consequence(&f, &series, Some(&local));
        if check.ok != b.consequence.ok {
            out.failures.push(format!("{here}: subequation consequence check gives {} ({})", check.ok, check.describe(&syms)));
        }
        for (j, entry) in b.closed_forms.iter().enumerate() {
            out.forms += 1;
            let here = format!("branch {} form {j}", b.index);
            let sol = reader.solution(entry).map_err(|e| bad(format!("{here}: {e}")))?;
            let exact = verify_exact(&sol, &ode);
            let numeric = sample_parameters(&sol, &syms, report.provenance.seed)
                .and_then(|p| verify_numeric(&sol, &ode, &p, &opts))
                .ok()
                .and_then(|r| r.numeric_max_residual);
            let ok = exact.exact_ok && numeric.is_some_and(|x| x < NUMERIC_TOLERANCE);
            if ok == entry.verification.verified {
                continue;
            }
            if !ok {
                let first = exact.first_nonzero(&syms).unwrap_or_else(|| "none".into());
                let detail =
                    if exact.exact_ok { format!("numeric residual {numeric:?}") } else { format!("first nonzero remainder {first}") };
                out.failures.push(format!("{here}: stored as verified but fails: {detail}"));
            } else {
                out.warnings.push(format!("{here}: stored as unverified but now passes"));
            }
        }
    }
    out.passed = out.failures.is_empty();
    Ok(out)
}
