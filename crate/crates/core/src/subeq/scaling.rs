//! Scale-invariant parameter combinations such as `x = b^2/(mu*nu)`.

use crate::arith::{Coeff, FracElem, SymbolKind, Symbols};
use crate::ode::parse_frac;

use super::SubeqError;

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledVar {
    pub name: String,
    /// Symbol index of the variable itself.
    pub symbol: usize,
    pub expr: FracElem,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Scaling {
    pub vars: Vec<ScaledVar>,
}

impl Scaling {
    pub fn get(&self, name: &str) -> Option<&ScaledVar> {
        self.vars.iter().find(|v| v.name == name)
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses `x = b^2/(mu*nu), y = nu*A/mu^3, z = nu*k^2/mu`. Identifiers that
/// are not declared parameters (such as a wavenumber `k`) become auxiliary
/// symbols; the scaled names become `Scaled` symbols.
pub fn parse_scaling(text: &str, syms: &mut Symbols) -> Result<Scaling, SubeqError> {
    let mut vars = Vec::new();
    for item in split_top_level(text) {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (name, rhs) = item.split_once('=').ok_or_else(|| SubeqError::BadScaling(item.to_string()))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') || syms.index(name).is_some() {
            return Err(SubeqError::BadScaling(item.to_string()));
        }
        for ident in rhs.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
            if ident.chars().next().is_some_and(|c| c.is_alphabetic()) && syms.index(ident).is_none() {
                syms.add(ident, SymbolKind::Aux, false);
            }
        }
        let expr = parse_frac(rhs.trim(), syms).map_err(|e| SubeqError::BadScaling(format!("{item}: {e}")))?;
        if expr.is_zero() {
            return Err(SubeqError::BadScaling(item.to_string()));
        }
        let symbol = syms.add(name, SymbolKind::Scaled, false);
        vars.push(ScaledVar { name: name.to_string(), symbol, expr, text: rhs.trim().to_string() });
    }
    Ok(Scaling { vars })
}
