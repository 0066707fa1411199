//! Fraction-free (Bareiss) elimination over parameter polynomials.

use thiserror::Error;

use super::ring::{Coeff, Field};
use super::{FracElem, MPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("pivot denominator vanishes identically in row {row}")]
    DivisionByZeroDenominator { row: usize },
    #[error("matrix rows have inconsistent lengths")]
    Shape,
}

/// Output of [`bareiss_solve`].
#[derive(Clone, Debug)]
pub struct LinearSolution {
    /// Particular solution with every free unknown set to zero.
    pub solution: Vec<FracElem>,
    /// One basis vector per free unknown.
    pub nullspace: Vec<Vec<FracElem>>,
    /// `(row, numerator)` for each original row the solution does not satisfy.
    pub residuals: Vec<(usize, MPoly)>,
    pub rank: usize,
    /// Unknowns that were used as pivots, in elimination order.
    pub pivot_cols: Vec<usize>,
}

fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    let g = a.gcd(b);
    a.exact_div(&g).unwrap().mul(b)
}

/// Multiplies a row of fractions by the lcm of its denominators.
fn clear_row(row: &[FracElem]) -> Vec<MPoly> {
    let mut l = MPoly::one();
    for x in row {
        if !x.den.is_one() {
            l = lcm(&l, &x.den);
        }
    }
    row.iter().map(|x| x.num.mul(&l.exact_div(&x.den).unwrap())).collect()
}

/// Solves `A x = rhs` by fraction-free Gaussian elimination with full
/// pivoting. The pivot is the nonzero entry with the fewest terms, ties
/// broken by row-major position.
#[allow(clippy::needless_range_loop)]
pub fn bareiss_solve(a: &[Vec<FracElem>], rhs: &[FracElem]) -> Result<LinearSolution, LinalgError> {
    let rows = a.len();
    if rhs.len() != rows {
        return Err(LinalgError::Shape);
    }
    let n = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != n) {
        return Err(LinalgError::Shape);
    }
    let mut m: Vec<Vec<MPoly>> = a
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut full = r.clone();
            full.push(b.clone());
            clear_row(&full)
        })
        .collect();
    // col_order[k] = original unknown sitting in column k.
    let mut col_order: Vec<usize> = (0..n).collect();
    let mut prev = MPoly::one();
    let mut rank = 0;
    for k in 0..rows.min(n) {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().take(n).skip(k) {
                if !e.is_zero() {
                    let t = e.num_terms();
                    if best.is_none_or(|(bt, _, _)| t < bt) {
                        best = Some((t, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        col_order.swap(k, pj);
        let pivot = m[k][k].clone();
        for i in k + 1..rows {
            let f = m[i][k].clone();
            for j in k + 1..=n {
                let v = pivot.mul(&m[i][j]).sub(&f.mul(&m[k][j]));
                m[i][j] = if prev.is_one() { v } else { v.exact_div(&prev).ok_or(LinalgError::DivisionByZeroDenominator { row: i })? };
            }
            m[i][k] = MPoly::zero();
        }
        prev = pivot;
        rank += 1;
    }

    let back = |rhs_col: &dyn Fn(usize) -> FracElem, free: Option<usize>| -> Vec<FracElem> {
        let mut x = vec![FracElem::zero(); n];
        if let Some(f) = free {
            x[f] = FracElem::one();
        }
        for k in (0..rank).rev() {
            let mut s = rhs_col(k);
            for j in k + 1..n {
                let xj = &x[j];
                if !xj.is_zero() && !m[k][j].is_zero() {
                    s = s.sub(&FracElem::from_poly(m[k][j].clone()).mul(xj));
                }
            }
            x[k] = s.div(&FracElem::from_poly(m[k][k].clone()));
        }
        let mut out = vec![FracElem::zero(); n];
        for (k, &orig) in col_order.iter().enumerate() {
            out[orig] = x[k].clone();
        }
        out
    };
    let solution = back(&|k| FracElem::from_poly(m[k][n].clone()), None);
    let nullspace: Vec<Vec<FracElem>> = (rank..n).map(|f| back(&|_| FracElem::zero(), Some(f))).collect();

    let mut residuals = Vec::new();
    for (i, (row, b)) in a.iter().zip(rhs).enumerate() {
        let mut s = b.neg();
        for (aij, xj) in row.iter().zip(&solution) {
            if !aij.is_zero() && !xj.is_zero() {
                s = s.add(&aij.mul(xj));
            }
        }
        if !s.is_zero() {
            residuals.push((i, s.num));
        }
    }
    Ok(LinearSolution { solution, nullspace, residuals, rank, pivot_cols: col_order[..rank].to_vec() })
}

/// Determinant of a square polynomial matrix by Bareiss elimination.
pub fn determinant(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one();
    }
    let mut prev = MPoly::one();
    let mut sign_neg = false;
    for k in 0..n {
        let pick = (k..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| (m[i][k].num_terms(), i));
        let Some(p) = pick else { return MPoly::zero() };
        if p != k {
            m.swap(p, k);
            sign_neg = !sign_neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = if prev.is_one() { v } else { v.exact_div(&prev).expect("Bareiss division is exact") };
            }
            m[i][k] = MPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_neg {
        d.neg()
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn f(n: i64) -> FracElem {
        FracElem::from_int(n)
    }

    #[test]
    fn identity_system() {
        let a = vec![vec![f(1), f(0)], vec![f(0), f(1)]];
        let s = bareiss_solve(&a, &[f(3), f(-2)]).unwrap();
        assert_eq!(s.solution, vec![f(3), f(-2)]);
        assert!(s.residuals.is_empty());
        assert!(s.nullspace.is_empty());
    }

    #[test]
    fn overdetermined_with_parameter_residual() {
        // x = 1, x = a  -> residual a - 1
        let a = vec![vec![f(1)], vec![f(1)]];
        let s = bareiss_solve(&a, &[f(1), FracElem::var(0)]).unwrap();
        assert_eq!(s.solution, vec![f(1)]);
        assert_eq!(s.residuals.len(), 1);
        assert_eq!(s.residuals[0].1.monic(), MPoly::var(0).sub(&MPoly::one()));
    }

    #[test]
    fn symbolic_two_by_two() {
        // [[a, 1], [1, a]] x = [1, 0]
        let av = FracElem::var(0);
        let a = vec![vec![av.clone(), f(1)], vec![f(1), av.clone()]];
        let s = bareiss_solve(&a, &[f(1), f(0)]).unwrap();
        let det = av.mul(&av).sub(&f(1));
        assert_eq!(s.solution[0], av.div(&det));
        assert_eq!(s.solution[1], f(-1).div(&det));
        let sq = vec![vec![MPoly::var(0), MPoly::one()], vec![MPoly::one(), MPoly::var(0)]];
        assert_eq!(determinant(sq), MPoly::var(0).pow(2).sub(&MPoly::one()));
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = vec![vec![f(1), f(2)], vec![f(2), f(4)]];
        let s = bareiss_solve(&a, &[f(1), f(2)]).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.nullspace.len(), 1);
        let v = &s.nullspace[0];
        assert!(v[0].add(&v[1].mul(&FracElem::from_rat_value(rat(2, 1)))).is_zero());
    }
}
