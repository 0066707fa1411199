//! Geometric genus of a plane curve `F(u, v) = 0` over the rationals.
//!
//! Singular points are located through `gcd(Res_v(F, F_v), Res_v(F, F_u))`,
//! with coordinates in `Q` or a quadratic field. The delta invariant of each
//! point is the sum of `m(m-1)/2` over its infinitely near points, found by
//! blowing up along multiple tangent directions.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::factor::{approx_roots, rational_roots, roots_quadratic, to_upoly};
use crate::arith::render::render_rat;
use crate::arith::{Coeff, Field, FracElem, MPoly, Monomial, Poly, Rat, Symbols, UPoly};
use crate::singular::random_point;

use super::CurveError;

/// Coefficient fields in which singular points are resolved.
pub trait LocalField: Field + std::fmt::Debug {
    /// All roots of a square-free polynomial if they lie in the field.
    fn roots_in_field(p: &UPoly<Self>) -> Option<Vec<Self>>;
    fn render(&self) -> String;
}

impl LocalField for Rat {
    fn roots_in_field(p: &UPoly<Self>) -> Option<Vec<Self>> {
        let r = rational_roots(p);
        (r.len() == p.degree()).then_some(r)
    }
    fn render(&self) -> String {
        render_rat(self)
    }
}

impl LocalField for crate::arith::quad::QuadElem {
    fn roots_in_field(p: &UPoly<Self>) -> Option<Vec<Self>> {
        if p.degree() == 1 {
            return Some(vec![p.coeff(0).neg().div(&p.coeff(1))]);
        }
        if p.coeffs().iter().all(|c| c.is_rational()) {
            let q = UPoly::new(p.coeffs().iter().map(|c| c.a.clone()).collect());
            let r = rational_roots(&q);
            return (r.len() == p.degree()).then(|| r.iter().map(<Self as Coeff>::from_rat).collect());
        }
        None
    }
    fn render(&self) -> String {
        if self.is_rational() {
            return render_rat(&self.a);
        }
        format!("{} + {}*sqrt({})", render_rat(&self.a), render_rat(&self.b), render_rat(&self.d))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    /// Projective coordinates `[u : v : w]` as text.
    pub location: String,
    pub multiplicity: u32,
    pub delta: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenusReport {
    pub genus: u32,
    pub degree: u32,
    pub singular_points: Vec<SingularPoint>,
    /// Parameter values used when the curve had symbolic coefficients.
    pub sample: Vec<Rat>,
}

/// Genus of a curve with parameter coefficients, at a random rational
/// specialization of the parameters.
pub fn genus(f: &Poly<FracElem>, syms: &Symbols, seed: u64) -> Result<GenusReport, CurveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        let pt = random_point(syms.len(), &mut rng);
        let spec: Option<Vec<(Monomial, Rat)>> = f.terms().map(|(m, c)| c.eval_rat(&pt).map(|r| (m.clone(), r))).collect();
        let Some(spec) = spec else { continue };
        let g = MPoly::from_terms(spec);
        if g.total_degree() != f.total_degree() {
            continue;
        }
        let mut rep = genus_rat(&g)?;
        rep.sample = pt;
        return Ok(rep);
    }
    Err(CurveError::NotACurve("no admissible parameter sample".into()))
}

fn to_upoly_k<K: LocalField>(p: &Poly<K>, v: usize) -> UPoly<K> {
    let d = p.degree_in(v) as usize;
    let mut c = vec![K::zero(); d + 1];
    for (m, x) in p.terms() {
        let e = m.exp(v) as usize;
        c[e] = c[e].add(x);
    }
    UPoly::new(c)
}

fn lift<K: LocalField>(f: &MPoly) -> Poly<K> {
    f.map_coeffs(|c| <K as Coeff>::from_rat(c))
}

/// Homogeneous part of degree `k`.
fn form(f: &MPoly, k: u32) -> MPoly {
    MPoly::from_terms(f.terms().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())))
}

/// Genus of an irreducible curve with rational coefficients.
pub fn genus_rat(f: &MPoly) -> Result<GenusReport, CurveError> {
    let d = f.total_degree();
    if d == 0 || f.degree_in(1) == 0 || f.degree_in(0) == 0 && d < 2 {
        return Err(CurveError::NotACurve("polynomial must involve both u and u'".into()));
    }
    let mut points = Vec::new();
    affine_points(f, &mut points)?;
    infinite_points(f, &mut points)?;
    let pa = (d as i64 - 1) * (d as i64 - 2) / 2;
    let total: i64 = points.iter().map(|p: &SingularPoint| p.delta as i64).sum();
    if total > pa {
        return Err(CurveError::NotIrreducible);
    }
    Ok(GenusReport { genus: (pa - total) as u32, degree: d, singular_points: points, sample: Vec::new() })
}

fn affine_points(f: &MPoly, out: &mut Vec<SingularPoint>) -> Result<(), CurveError> {
    let fu = f.derivative(0);
    let fv = f.derivative(1);
    let r1 = f.resultant(&fv, 1);
    if r1.is_zero() {
        return Err(CurveError::NotIrreducible);
    }
    let g = if fu.is_zero() { r1 } else { r1.gcd(&f.resultant(&fu, 1)) };
    if g.is_constant() {
        return Ok(());
    }
    let gu = to_upoly(&g, 0).expect("resultant in u");
    let (roots, rest) = roots_quadratic(&gu);
    if rest.degree() > 0 {
        numeric_locus_check(f, &rest)?;
    }
    for a in roots {
        if a.is_rational() {
            points_over_rat(f, &a.a, out)?;
        } else {
            points_over_quad(f, &a, out)?;
        }
    }
    Ok(())
}

fn common_gcd<K: LocalField>(f: &MPoly, a: &K) -> UPoly<K> {
    let mut h = UPoly::zero();
    for p in [f.clone(), f.derivative(0), f.derivative(1)] {
        let q = lift::<K>(&p).eval_var(0, a);
        h = h.gcd(&to_upoly_k(&q, 1));
    }
    h
}

fn points_over_rat(f: &MPoly, a: &Rat, out: &mut Vec<SingularPoint>) -> Result<(), CurveError> {
    let h = common_gcd::<Rat>(f, a);
    if h.is_zero() || h.degree() == 0 {
        return Ok(());
    }
    let (roots, rest) = roots_quadratic(&h);
    if rest.degree() > 0 {
        return Err(CurveError::IrrationalSingularLocus(format!("u = {}", render_rat(a))));
    }
    for b in roots {
        if b.is_rational() {
            push_affine::<Rat>(f, a, &b.a, out)?;
        } else {
            let a_q = crate::arith::quad::QuadElem::new(a.clone(), Rat::zero(), b.d.clone());
            push_affine(f, &a_q, &b, out)?;
        }
    }
    Ok(())
}

fn points_over_quad(f: &MPoly, a: &crate::arith::quad::QuadElem, out: &mut Vec<SingularPoint>) -> Result<(), CurveError> {
    let h = common_gcd(f, a);
    if h.is_zero() || h.degree() == 0 {
        return Ok(());
    }
    let h = h.square_free_part();
    let roots = LocalField::roots_in_field(&h).ok_or_else(|| CurveError::IrrationalSingularLocus(format!("u = {}", a.render())))?;
    for b in roots {
        let b = crate::arith::quad::QuadElem::new(b.a, b.b, a.d.clone());
        push_affine(f, a, &b, out)?;
    }
    Ok(())
}

fn push_affine<K: LocalField>(f: &MPoly, a: &K, b: &K, out: &mut Vec<SingularPoint>) -> Result<(), CurveError> {
    let fk = lift::<K>(f);
    let shifted = fk.compose(&|v| {
        let c = if v == 0 { a } else { b };
        Some(Poly::var(v).add(&Poly::constant(c.clone())))
    });
    let (m, _) = shifted.lowest_form();
    if m < 2 {
        return Ok(());
    }
    let delta = delta(&shifted, 0)?;
    out.push(SingularPoint { location: format!("[{} : {} : 1]", a.render(), b.render()), multiplicity: m, delta });
    Ok(())
}

/// Complex singular points on a factor without rational or quadratic roots
/// cannot be handled; spurious projection roots are ignored.
fn numeric_locus_check(f: &MPoly, rest: &UPoly<Rat>) -> Result<(), CurveError> {
    let to_c = |p: &MPoly, a: Complex64| -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); p.degree_in(1) as usize + 1];
        for (m, x) in p.terms() {
            use num_traits::ToPrimitive;
            let xf = x.to_f64().unwrap_or(0.0);
            c[m.exp(1) as usize] += a.powu(m.exp(0)) * xf;
        }
        c
    };
    let eval = |c: &[Complex64], z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * z + x);
    for a in approx_roots(rest) {
        let cf = to_c(f, a);
        let cu = to_c(&f.derivative(0), a);
        let cv = to_c(&f.derivative(1), a);
        for b in durand_kerner(&cf) {
            let scale = 1.0 + b.norm().powi(cf.len() as i32);
            if eval(&cu, b).norm() < 1e-6 * scale && eval(&cv, b).norm() < 1e-6 * scale {
                return Err(CurveError::IrrationalSingularLocus(format!("u ~ {a:.6}")));
            }
        }
    }
    Ok(())
}

fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len().saturating_sub(1);
    if n == 0 || c[n].norm() == 0.0 {
        return Vec::new();
    }
    let monic: Vec<Complex64> = c.iter().map(|x| x / c[n]).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * z + x);
    let mut z: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, 0.4 + i as f64 * 6.2 / n as f64)).collect();
    for _ in 0..500 {
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() > 0.0 {
                let zi = z[i];
                z[i] = zi - eval(zi) / den;
            }
        }
    }
    z
}

fn infinite_points(f: &MPoly, out: &mut Vec<SingularPoint>) -> Result<(), CurveError> {
    let d = f.total_degree();
    let top = form(f, d);
    // p(t) = F_d(1, t); missing degree means [0 : 1 : 0] lies on the curve.
    let p = to_upoly(&top.eval_var(0, &Rat::one()), 1).unwrap();
    for (g, mult) in p.square_free() {
        if mult < 2 {
            continue;
        }
        let (roots, rest) = roots_quadratic(&g);
        if rest.degree() > 0 {
            return Err(CurveError::IrrationalSingularLocus("point at infinity".into()));
        }
        for t in roots {
            if t.is_rational() {
                at_infinity::<Rat>(f, Some(&t.a), out)?;
            } else {
                at_infinity(f, Some(&t), out)?;
            }
        }
    }
    if p.is_zero() || (p.degree() as u32) < d {
        at_infinity::<Rat>(f, None, out)?;
    }
    Ok(())
}

/// Local equation at `[1 : t : 0]` (or `[0 : 1 : 0]` for `None`).
fn at_infinity<K: LocalField>(f: &MPoly, t: Option<&K>, out: &mut Vec<SingularPoint>) -> Result<(), CurveError> {
    let d = f.total_degree();
    let mut local: Poly<K> = Poly::zero();
    for k in 0..=d {
        let fk = lift::<K>(&form(f, k));
        // Chart variables: 0 = affine coordinate along the line at infinity, 1 = z.
        let part = match t {
            Some(t) => fk.compose(&|v| Some(if v == 0 { Poly::constant(K::one()) } else { Poly::var(0).add(&Poly::constant(t.clone())) })),
            None => fk.compose(&|v| Some(if v == 0 { Poly::var(0) } else { Poly::constant(K::one()) })),
        };
        local = local.add(&part.mul(&Poly::monomial(Monomial::var(1, d - k), K::one())));
    }
    let (m, _) = local.lowest_form();
    if m < 2 {
        return Ok(());
    }
    let delta = delta(&local, 0)?;
    let location = match t {
        Some(t) => format!("[1 : {} : 0]", t.render()),
        None => "[0 : 1 : 0]".to_string(),
    };
    out.push(SingularPoint { location, multiplicity: m, delta });
    Ok(())
}

/// Delta invariant of `f` at the origin.
pub fn delta<K: LocalField>(f: &Poly<K>, depth: u32) -> Result<u32, CurveError> {
    if depth > 24 {
        return Err(CurveError::UnsupportedSingularity("blow-up sequence too long".into()));
    }
    if f.is_zero() {
        return Err(CurveError::NotIrreducible);
    }
    let (m, cone) = f.lowest_form();
    if m <= 1 {
        return Ok(0);
    }
    let mut total = m * (m - 1) / 2;
    let p = to_upoly_k(&cone.eval_var(0, &K::one()), 1);
    let vertical = m - p.degree() as u32;
    for (g, mult) in p.square_free() {
        if mult < 2 {
            continue;
        }
        let roots =
            K::roots_in_field(&g).ok_or_else(|| CurveError::UnsupportedSingularity("tangent directions outside the field".into()))?;
        for t in roots {
            let g =
                f.compose(&|v| Some(if v == 0 { Poly::var(0) } else { Poly::var(0).mul(&Poly::var(1).add(&Poly::constant(t.clone()))) }));
            let g = g.div_monomial(&Monomial::var(0, m)).expect("strict transform");
            total += delta(&g, depth + 1)?;
        }
    }
    if vertical >= 2 {
        let g = f.compose(&|v| Some(if v == 0 { Poly::var(0).mul(&Poly::var(1)) } else { Poly::var(1) }));
        let g = g.div_monomial(&Monomial::var(1, m)).expect("strict transform");
        total += delta(&g, depth + 1)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{parse_params, parse_poly, u_var};

    fn curve(text: &str) -> MPoly {
        let p = parse_poly(text, &Symbols::new(), &u_var).unwrap();
        p.map_coeffs(|c| c.as_rat().unwrap())
    }

    #[test]
    fn smooth_cubic_and_nodal_cubic() {
        assert_eq!(genus_rat(&curve("u1^2 - 4*u0^3 + u0 + 1")).unwrap().genus, 1);
        let nodal = genus_rat(&curve("u1^2 - u0^2*(u0 + 1)")).unwrap();
        assert_eq!(nodal.genus, 0);
        assert_eq!(nodal.singular_points[0].delta, 1);
        assert_eq!(genus_rat(&curve("u1^2 - u0^3")).unwrap().genus, 0);
    }

    #[test]
    fn quartic_with_tacnode() {
        // (v + u)^3 + u^4: triple point with a triple tangent.
        assert_eq!(genus_rat(&curve("(u1 + u0)^3 + u0^4")).unwrap().genus, 0);
        // smooth plane quartic
        assert_eq!(genus_rat(&curve("u0^4 + u1^4 + 1")).unwrap().genus, 3);
    }

    #[test]
    fn rational_ode_curve() {
        let r = genus_rat(&curve("2*u1^2 + (24*u0^2-3)*u1 + 72*u0^4 - 17*u0^2 + 1")).unwrap();
        assert_eq!(r.genus, 0, "{r:?}");
    }

    #[test]
    fn kdv_subequation_generic() {
        let syms = {
            let mut s = parse_params("a != 0").unwrap();
            s.add("U4", crate::arith::SymbolKind::Resonance, false);
            s.add("U6", crate::arith::SymbolKind::Resonance, false);
            s
        };
        let f = parse_poly("u1^2 - 2/a*u0^3 + 20*U4*u0 + 56*a*U6", &syms, &u_var).unwrap();
        assert_eq!(genus(&f, &syms, 3).unwrap().genus, 1);
    }
}
