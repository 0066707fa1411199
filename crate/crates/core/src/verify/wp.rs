//! Weierstrass `wp` in multiprecision: truncated Laurent series near the
//! origin followed by repeated duplication.

use crate::arith::bigfloat::{Complex, Real};

use super::VerifyError;

/// Terms of the Laurent series kept: `z^-2` through `z^18`.
const SERIES_K: usize = 10;
/// Argument radius as a fraction of the estimated distance to the nearest
/// nonzero lattice point.
const RADIUS_FRACTION: f64 = 1.0 / 32.0;
/// Bound on `|wp'^2 - 4 wp^3 + g2 wp + g3|` relative to the term sizes.
pub const SELF_CONSISTENCY: f64 = 1e-20;

/// Coefficients `c_k` of `wp = z^-2 + sum_{k>=2} c_k z^(2k-2)`, index `k`.
fn laurent_coeffs(g2: &Complex, g3: &Complex) -> Vec<Complex> {
    let p = g2.prec();
    let r = |n: i64| Real::from_i64(n, p);
    let mut c = vec![Complex::zero(p); SERIES_K + 1];
    c[2] = g2.scale(&r(1).div(&r(20)));
    c[3] = g3.scale(&r(1).div(&r(28)));
    for k in 4..=SERIES_K {
        let mut s = Complex::zero(p);
        for m in 2..=k - 2 {
            s = s.add(&c[m].mul(&c[k - m]));
        }
        c[k] = s.scale(&r(3).div(&r(((2 * k + 1) * (k - 3)) as i64)));
    }
    c
}

/// Cauchy-Hadamard estimate of the radius of convergence of the series,
/// i.e. the distance to the nearest nonzero lattice point.
fn lattice_radius(c: &[Complex]) -> f64 {
    (2..=SERIES_K)
        .filter_map(|k| {
            let a = c[k].abs().to_f64();
            (a > 0.0).then(|| a.powf(-1.0 / (2.0 * k as f64)))
        })
        .fold(f64::INFINITY, f64::min)
}

/// `(wp(xi), wp'(xi))` for invariants `g2`, `g3`.
pub fn wp_eval(g2: &Complex, g3: &Complex, xi: &Complex) -> Result<(Complex, Complex), VerifyError> {
    let p = xi.prec();
    let r = |n: i64| Real::from_i64(n, p);
    if xi.is_zero() {
        return Err(VerifyError::PrecisionLoss("wp has a pole at the origin".into()));
    }
    let c = laurent_coeffs(g2, g3);
    let rho = RADIUS_FRACTION * lattice_radius(&c).min(1e6);
    let size = xi.abs().to_f64();
    let steps = if size > rho { (size / rho).log2().ceil() as u32 } else { 0 };
    let z = xi.scale(&r(1).div(&Real::from_f64(2f64.powi(steps as i32), p)));
    let z2 = z.mul(&z);
    let mut x = z2.inv();
    let mut y = z2.mul(&z).inv().scale(&r(-2));
    let mut zp = Complex::from_real(r(1));
    for (k, ck) in c.iter().enumerate().skip(2) {
        // zp = z^(2k-4) here
        let dterm = ck.mul(&zp).mul(&z).scale(&r(2 * k as i64 - 2));
        x = x.add(&ck.mul(&zp).mul(&z2));
        y = y.add(&dterm);
        zp = zp.mul(&z2);
    }
    for _ in 0..steps {
        let lambda = x.mul(&x).scale(&r(12)).sub(g2).div(&y.scale(&r(2)));
        let x2 = lambda.mul(&lambda).scale(&r(1).div(&r(4))).sub(&x.scale(&r(2)));
        let y2 = lambda.mul(&x2.sub(&x)).add(&y).neg();
        x = x2;
        y = y2;
    }
    let defect = weierstrass_defect(g2, g3, &x, &y);
    if defect.is_nan() || defect >= SELF_CONSISTENCY {
        return Err(VerifyError::PrecisionLoss(format!("Weierstrass relation defect {defect:e}")));
    }
    Ok((x, y))
}

/// `|y^2 - 4x^3 + g2 x + g3|` relative to the sum of the term moduli.
pub fn weierstrass_defect(g2: &Complex, g3: &Complex, x: &Complex, y: &Complex) -> f64 {
    let p = x.prec();
    let y2 = y.mul(y);
    let x3 = x.mul(x).mul(x).scale(&Real::from_i64(4, p));
    let g2x = g2.mul(x);
    let num = y2.sub(&x3).add(&g2x).add(g3).abs();
    let den = y2.abs().add(&x3.abs()).add(&g2x.abs()).add(&g3.abs());
    num.div(&den).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    const PREC: usize = 320;

    fn c(re: f64, im: f64) -> Complex {
        Complex::from_f64(re, im, PREC)
    }

    fn coth_formula(d: f64, xi: &Complex) -> Complex {
        // -d + (3d/2) coth^2(sqrt(3d/2) xi)
        let s = Real::from_f64(1.5 * d, PREC);
        let t = xi.scale(&s.sqrt()).tanh();
        let coth2 = t.mul(&t).inv();
        coth2.scale(&s).sub(&Complex::from_f64(d, 0.0, PREC))
    }

    #[test]
    fn degenerate_lattice_matches_coth() {
        let d = 2.0;
        let (g2, g3) = (Complex::from_rat(&rat(12, 1), PREC), Complex::from_rat(&rat(-8, 1), PREC));
        let xi = c(0.3, 0.0);
        let (w, _) = wp_eval(&g2, &g3, &xi).unwrap();
        assert!((w.to_c64() - coth_formula(d, &xi).to_c64()).norm() < 1e-12);
    }

    #[test]
    fn double_pole_normalization() {
        let (g2, g3) = (c(1.0, 0.0), c(-2.0, 0.0));
        let xi = c(1e-3, 0.0);
        let (w, _) = wp_eval(&g2, &g3, &xi).unwrap();
        assert!((w.mul(&xi.mul(&xi)).to_c64().re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn far_argument_self_consistent() {
        let (g2, g3) = (c(7.0, 0.0), c(3.0, 0.0));
        for xi in [c(2.3, 0.7), c(-5.1, 3.3), c(0.01, -9.0)] {
            assert!(wp_eval(&g2, &g3, &xi).is_ok());
        }
    }
}
