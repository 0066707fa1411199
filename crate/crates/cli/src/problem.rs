//! Problem files: `key: value` lines, `#` comments.
//!
//! ```text
//! ode: nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A
//! params: nu != 0, b, mu, A
//! scaling: x = b^2/(mu*nu), y = nu*A/mu^3, z = nu*k^2/mu
//! bounds: 1, 2
//! families: 0
//! terms: 18
//! ```

use std::path::Path;

use bbsolve_core::ode::AutonomousODE;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Field { path: String, line: usize, message: String },
    #[error("{path}: missing required field `{field}`")]
    Missing { path: String, field: &'static str },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub ode: String,
    pub params: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io { path: shown.clone(), source })?;
        Self::parse(&text, &shown)
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, ProblemError> {
        let mut p = Problem::default();
        let mut ode_line = None;
        let mut params_line = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ProblemError::Field { path: path.to_string(), line, message };
            let (key, value) = content.split_once(':').ok_or_else(|| err(format!("expected `key: value`, got `{content}`")))?;
            let value = value.trim().to_string();
            match key.trim() {
                "ode" => {
                    ode_line = Some(line);
                    p.ode = value;
                }
                "params" => {
                    params_line = Some(line);
                    p.params = value;
                }
                "scaling" => p.scaling = Some(value),
                "bounds" => p.bounds = Some(parse_bounds(&value).map_err(err)?),
                "families" => p.families = Some(parse_list(&value).map_err(err)?),
                "terms" => p.terms = Some(value.parse().map_err(|_| err(format!("bad truncation `{value}`")))?),
                other => return Err(err(format!("unknown field `{other}`"))),
            }
        }
        let Some(ode_line) = ode_line else {
            return Err(ProblemError::Missing { path: path.to_string(), field: "ode" });
        };
        if let Err(e) = AutonomousODE::parse(&p.ode, &p.params) {
            let line = match e {
                bbsolve_core::ode::OdeError::BadParamDecl(_) => params_line.unwrap_or(ode_line),
                _ => ode_line,
            };
            return Err(ProblemError::Field { path: path.to_string(), line, message: e.to_string() });
        }
        Ok(p)
    }

    pub fn ode(&self) -> AutonomousODE {
        AutonomousODE::parse(&self.ode, &self.params).expect("validated when loaded")
    }
}

/// `N, D` or `N` (a polynomial ansatz).
pub fn parse_bounds(text: &str) -> Result<(usize, usize), String> {
    let v = parse_list(text)?;
    match v.as_slice() {
        [n] => Ok((*n, 0)),
        [n, d] => Ok((*n, *d)),
        _ => Err(format!("bounds take one or two degrees, got `{text}`")),
    }
}

pub fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',').map(|s| s.trim().parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{}`", s.trim()))).collect()
}

/// Reads a scaling declaration from a file holding either a `scaling:` line
/// or bare declarations.
pub fn load_scaling(path: &Path) -> Result<String, ProblemError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io { path: shown, source })?;
    let parts: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.strip_prefix("scaling:").unwrap_or(l).trim())
        .collect();
    Ok(parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_problem() {
        let text = "# KS\node: nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A\nparams: nu != 0, b, mu, A\nbounds: 1, 2\nfamilies: 0\n";
        let p = Problem::parse(text, "ks.txt").unwrap();
        assert_eq!(p.bounds, Some((1, 2)));
        assert_eq!(p.families, Some(vec![0]));
        assert_eq!(p.ode().order, 3);
    }

    #[test]
    fn errors_carry_file_and_line() {
        let e = Problem::parse("ode: u1 - u0^2\nwibble: 3\n", "p.txt").unwrap_err();
        assert_eq!(e.to_string(), "p.txt:2: unknown field `wibble`");
        let e = Problem::parse("params: a\node: u1 - u0^\n", "p.txt").unwrap_err();
        assert!(e.to_string().starts_with("p.txt:2:"), "{e}");
        assert!(matches!(Problem::parse("params: a\n", "p.txt"), Err(ProblemError::Missing { .. })));
    }

    #[test]
    fn bounds_forms() {
        assert_eq!(parse_bounds("3"), Ok((3, 0)));
        assert_eq!(parse_bounds("1,2"), Ok((1, 2)));
        assert!(parse_bounds("1,2,3").is_err());
    }
}
