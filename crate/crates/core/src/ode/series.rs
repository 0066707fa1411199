//! Truncated Laurent series in the local variable `chi` with parameter
//! fraction coefficients.

use thiserror::Error;

use crate::arith::{Coeff, FracElem, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series truncated too early: coefficient of chi^{requested} needed, known below chi^{order}")]
    TruncationTooShort { requested: i64, order: i64 },
}

/// `sum coeffs[j] chi^(offset + j) + O(chi^order)`. `order == None` marks
/// an exact (finite) expansion. Leading coefficients may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesExpr {
    pub offset: i64,
    pub coeffs: Vec<FracElem>,
    pub order: Option<i64>,
}

impl SeriesExpr {
    pub fn exact(offset: i64, coeffs: Vec<FracElem>) -> Self {
        SeriesExpr { offset, coeffs, order: None }
    }

    /// A series known through `chi^(offset + coeffs.len() - 1)`.
    pub fn truncated(offset: i64, coeffs: Vec<FracElem>) -> Self {
        let order = offset + coeffs.len() as i64;
        SeriesExpr { offset, coeffs, order: Some(order) }
    }

    pub fn constant(c: FracElem) -> Self {
        Self::exact(0, vec![c])
    }

    pub fn zero() -> Self {
        Self::exact(0, Vec::new())
    }

    /// Number of known relative coefficients (the J of the truncation plus one).
    pub fn known(&self) -> Option<usize> {
        self.order.map(|o| (o - self.offset).max(0) as usize)
    }

    /// Coefficient of `chi^e`.
    pub fn coeff(&self, e: i64) -> Result<FracElem, SeriesError> {
        if let Some(o) = self.order {
            if e >= o {
                return Err(SeriesError::TruncationTooShort { requested: e, order: o });
            }
        }
        if e < self.offset {
            return Ok(FracElem::zero());
        }
        Ok(self.coeffs.get((e - self.offset) as usize).cloned().unwrap_or_else(FracElem::zero))
    }

    /// Lowest exponent with a nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.offset + i as i64)
    }

    fn top(&self) -> i64 {
        match self.order {
            Some(o) => o,
            None => self.offset + self.coeffs.len() as i64,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let offset = self.offset.min(o.offset);
        let order = match (self.order, o.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let top = order.unwrap_or(self.top().max(o.top()));
        let coeffs = (offset..top).map(|e| self.coeff_or_zero(e).add(&o.coeff_or_zero(e))).collect();
        SeriesExpr { offset, coeffs, order }
    }

    fn coeff_or_zero(&self, e: i64) -> FracElem {
        if e < self.offset {
            return FracElem::zero();
        }
        self.coeffs.get((e - self.offset) as usize).cloned().unwrap_or_else(FracElem::zero)
    }

    pub fn neg(&self) -> Self {
        SeriesExpr { offset: self.offset, coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), order: self.order }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &FracElem) -> Self {
        SeriesExpr { offset: self.offset, coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(), order: self.order }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let offset = self.offset + o.offset;
        let order = match (self.order, o.order) {
            (Some(a), Some(b)) => Some((a + o.offset).min(b + self.offset)),
            (Some(a), None) => Some(a + o.offset),
            (None, Some(b)) => Some(b + self.offset),
            (None, None) => None,
        };
        let n = match order {
            Some(ord) => (ord - offset).max(0) as usize,
            None => (self.coeffs.len() + o.coeffs.len()).saturating_sub(1),
        };
        let mut coeffs = vec![FracElem::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        SeriesExpr { offset, coeffs, order }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(FracElem::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Term-by-term derivative in `chi`.
    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(j, c)| c.mul(&FracElem::from_int(self.offset + j as i64))).collect();
        SeriesExpr { offset: self.offset - 1, coeffs, order: self.order.map(|o| o - 1) }
    }

    pub fn map_coeffs(&self, f: &dyn Fn(&FracElem) -> FracElem) -> Self {
        SeriesExpr { offset: self.offset, coeffs: self.coeffs.iter().map(f).collect(), order: self.order }
    }

    /// Restricts to at most `n` known relative coefficients.
    pub fn truncate_to(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, FracElem::zero());
        let order = Some(self.offset + n as i64);
        let order = match (self.order, order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (_, b) => b,
        };
        let keep = (order.unwrap() - self.offset).max(0) as usize;
        coeffs.truncate(keep);
        SeriesExpr { offset: self.offset, coeffs, order }
    }
}

/// Evaluates a polynomial in `u0..uN` (variable `k` = `k`-th derivative) on
/// the series `s` and its derivatives.
pub fn eval_poly_on_series(p: &Poly<FracElem>, derivs: &[SeriesExpr]) -> SeriesExpr {
    let mut cache: std::collections::BTreeMap<(usize, u32), SeriesExpr> = Default::default();
    let mut acc = SeriesExpr::zero();
    for (m, c) in p.terms() {
        let mut t = SeriesExpr::constant(c.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                let pw = cache.entry((v, e)).or_insert_with(|| derivs[v].pow(e)).clone();
                t = t.mul(&pw);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// The list `s, s', ..., s^(n)`.
pub fn derivatives(s: &SeriesExpr, n: usize) -> Vec<SeriesExpr> {
    let mut out = vec![s.clone()];
    for _ in 0..n {
        let d = out.last().unwrap().derivative();
        out.push(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_derivative_of_double_pole() {
        let s = SeriesExpr::exact(-2, vec![FracElem::one()]);
        let d3 = derivatives(&s, 3).pop().unwrap();
        assert_eq!(d3.coeff(-5).unwrap(), FracElem::from_int(-24));
    }

    #[test]
    fn truncation_is_tracked() {
        let s = SeriesExpr::truncated(-1, vec![FracElem::one(), FracElem::zero(), FracElem::from_int(3)]);
        let sq = s.mul(&s);
        assert_eq!(sq.offset, -2);
        assert_eq!(sq.order, Some(1));
        assert_eq!(sq.coeff(0).unwrap(), FracElem::from_int(6));
        assert!(sq.coeff(1).is_err());
    }
}
