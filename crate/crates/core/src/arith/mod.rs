//! Exact arithmetic kernel: rationals, sparse multivariate polynomials in
//! parameter symbols, their fraction field, gcds, partial factorization and
//! fraction-free linear algebra.

pub mod bigfloat;
pub mod factor;
pub mod frac;
pub mod linalg;
pub mod mpoly;
pub mod poly;
pub mod quad;
pub mod render;
pub mod ring;
pub mod upoly;

pub type Rat = num_rational::BigRational;

pub use frac::FracElem;
pub use mpoly::MPoly;
pub use poly::{Monomial, Poly};
pub use ring::{Coeff, Field};
pub use upoly::UPoly;

/// Builds a rational from a numerator and denominator.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Origin of a symbol; reports distinguish equation parameters from
/// integration constants introduced at resonances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Param,
    Resonance,
    Scaled,
    Aux,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub nonzero: bool,
}

/// Name table for polynomial variables. Index order is declaration order and
/// fixes the monomial ordering.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    list: Vec<Symbol>,
}

impl Symbols {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a symbol, returning its index. Re-adding a name returns the
    /// existing index.
    pub fn add(&mut self, name: &str, kind: SymbolKind, nonzero: bool) -> usize {
        if let Some(i) = self.index(name) {
            return i;
        }
        self.list.push(Symbol { name: name.to_string(), kind, nonzero });
        self.list.len() - 1
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.list.iter().position(|s| s.name == name)
    }

    pub fn get(&self, i: usize) -> &Symbol {
        &self.list[i]
    }

    pub fn name(&self, i: usize) -> &str {
        self.list.get(i).map(|s| s.name.as_str()).unwrap_or("?")
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.list.iter()
    }

    pub fn nonzero_indices(&self) -> Vec<usize> {
        (0..self.list.len()).filter(|&i| self.list[i].nonzero).collect()
    }

    pub fn of_kind(&self, kind: SymbolKind) -> Vec<usize> {
        (0..self.list.len()).filter(|&i| self.list[i].kind == kind).collect()
    }

    /// A fresh name not yet in the table, built from `base`.
    pub fn fresh(&self, base: &str) -> String {
        if self.index(base).is_none() {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}_{i}")).find(|n| self.index(n).is_none()).unwrap()
    }
}
