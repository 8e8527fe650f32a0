//! Polynomial × complex-Gaussian functions of two real variables and their
//! exact integrals.
//!
//! A [`PolyGauss`] is `p(x, y) · exp(−qxx·x² − qyy·y² − qxy·xy + lx·x + ly·y + c)`
//! with complex `p` and complex exponent coefficients. The class is closed
//! under multiplication by `x`, `y`, differentiation, conjugation and
//! multiplication by another Gaussian, and every integral over the plane is a
//! finite sum of Gaussian moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly2};

/// Default cap on the total polynomial degree of a [`PolyGauss`].
pub const DEFAULT_DEGREE_CAP: u32 = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `exp(−qxx·x² − qyy·y² − qxy·xy + lx·x + ly·y + c)`.
///
/// Serialized as the six-tuple `[qxx, qyy, qxy, lx, ly, c]` of `[re, im]` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[Complex64; 6]", into = "[Complex64; 6]")]
pub struct QuadExponent {
    pub qxx: Complex64,
    pub qyy: Complex64,
    pub qxy: Complex64,
    pub lx: Complex64,
    pub ly: Complex64,
    pub c: Complex64,
}

impl From<[Complex64; 6]> for QuadExponent {
    fn from(v: [Complex64; 6]) -> Self {
        QuadExponent::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }
}

impl From<QuadExponent> for [Complex64; 6] {
    fn from(e: QuadExponent) -> Self {
        [e.qxx, e.qyy, e.qxy, e.lx, e.ly, e.c]
    }
}

impl Default for QuadExponent {
    fn default() -> Self {
        QuadExponent::new(ZERO, ZERO, ZERO, ZERO, ZERO, ZERO)
    }
}

impl QuadExponent {
    pub fn new(qxx: Complex64, qyy: Complex64, qxy: Complex64, lx: Complex64, ly: Complex64, c: Complex64) -> Self {
        QuadExponent { qxx, qyy, qxy, lx, ly, c }
    }

    /// Real diagonal Gaussian `exp(−qxx·x² − qyy·y²)`.
    pub fn gaussian(qxx: f64, qyy: f64) -> Self {
        QuadExponent { qxx: qxx.into(), qyy: qyy.into(), ..Default::default() }
    }

    /// All six coefficients from real numbers.
    pub fn real(qxx: f64, qyy: f64, qxy: f64, lx: f64, ly: f64, c: f64) -> Self {
        QuadExponent::new(qxx.into(), qyy.into(), qxy.into(), lx.into(), ly.into(), c.into())
    }

    pub fn with_linear(mut self, lx: Complex64, ly: Complex64) -> Self {
        self.lx = lx;
        self.ly = ly;
        self
    }

    pub fn with_constant(mut self, c: Complex64) -> Self {
        self.c = c;
        self
    }

    fn coeffs(&self) -> [Complex64; 6] {
        (*self).into()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `[[Re qxx, Re qxy/2], [Re qxy/2, Re qyy]]`.
    pub fn real_part_matrix(&self) -> [[f64; 2]; 2] {
        let off = 0.5 * self.qxy.re;
        [[self.qxx.re, off], [off, self.qyy.re]]
    }

    /// The real-part matrix is positive definite.
    pub fn is_integrable(&self) -> bool {
        let m = self.real_part_matrix();
        let trace = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        trace > 0.0 && det > 0.0
    }

    pub fn conj(&self) -> QuadExponent {
        let c = self.coeffs().map(|v| v.conj());
        c.into()
    }

    /// Exponent of the product of the two Gaussians.
    pub fn add(&self, other: &QuadExponent) -> QuadExponent {
        QuadExponent::new(
            self.qxx + other.qxx,
            self.qyy + other.qyy,
            self.qxy + other.qxy,
            self.lx + other.lx,
            self.ly + other.ly,
            self.c + other.c,
        )
    }

    /// Exponent of the reciprocal Gaussian.
    pub fn neg(&self) -> QuadExponent {
        let c = self.coeffs().map(|v| -v);
        c.into()
    }

    /// The argument of `exp` at `(x, y)`.
    pub fn argument(&self, x: f64, y: f64) -> Complex64 {
        -self.qxx * x * x - self.qyy * y * y - self.qxy * x * y + self.lx * x + self.ly * y + self.c
    }

    pub fn approx_eq(&self, other: &QuadExponent, tol: f64) -> bool {
        self.coeffs()
            .iter()
            .zip(other.coeffs().iter())
            .all(|(a, b)| (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm())))
    }

    fn det(&self) -> Complex64 {
        self.qxx * self.qyy - 0.25 * self.qxy * self.qxy
    }

    /// `sqrt(det M)` continued from the real-part matrix.
    ///
    /// With `M = Mr + i·Mi`, `det M = det Mr · det(I + i K)` where
    /// `K = Mr^{-1/2} Mi Mr^{-1/2}` is real symmetric. The eigenvalues of
    /// `I + i K` are `1 + iλ`, each with positive real part, so the sum of
    /// their arguments stays inside `(−π, π)` and the principal root of
    /// `det M / det Mr` is the continuous branch.
    fn sqrt_det(&self) -> Complex64 {
        let m = self.real_part_matrix();
        let det_r = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        det_r.sqrt() * (self.det() / det_r).sqrt()
    }
}

/// `∫_{ℝ²} exp(−xᵀMx + Lᵀx + c) dx dy = π·det(M)^{−1/2}·exp(¼·LᵀM⁻¹L + c)`.
pub fn gaussian_base_integral(e: &QuadExponent) -> Result<Complex64> {
    if !e.is_finite() {
        return Err(Error::NonFinite("exponent"));
    }
    if !e.is_integrable() {
        return Err(Error::NotIntegrable);
    }
    let det = e.det();
    let quad = (e.qyy * e.lx * e.lx - e.qxy * e.lx * e.ly + e.qxx * e.ly * e.ly) / (4.0 * det);
    Ok(PI / e.sqrt_det() * (quad + e.c).exp())
}

/// Table of `∫ x^i y^j exp(E) dx dy` for `i ≤ max_x`, `j ≤ max_y`.
///
/// Built from the base integral with the Gaussian integration-by-parts
/// recurrence
/// `m[i+1, j] = μx·m[i, j] + i·Σxx·m[i−1, j] + j·Σxy·m[i, j−1]`
/// (and its `y` analogue), where `μ = ½M⁻¹L` and `Σ = ½M⁻¹`. This is the
/// closed form of repeated differentiation of the base integral with respect
/// to `lx` and `ly`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    max_x: usize,
    max_y: usize,
    data: Vec<Complex64>,
}

impl MomentTable {
    pub fn new(e: &QuadExponent, max_x: u32, max_y: u32) -> Result<Self> {
        let z = gaussian_base_integral(e)?;
        let (mx, my) = (max_x as usize, max_y as usize);
        let det = e.det();
        let half_qxy = 0.5 * e.qxy;
        let mu_x = (e.qyy * e.lx - half_qxy * e.ly) / (2.0 * det);
        let mu_y = (e.qxx * e.ly - half_qxy * e.lx) / (2.0 * det);
        let s_xx = e.qyy / (2.0 * det);
        let s_yy = e.qxx / (2.0 * det);
        let s_xy = -half_qxy / (2.0 * det);

        let stride = my + 1;
        let mut data = vec![ZERO; (mx + 1) * stride];
        let idx = |i: usize, j: usize| i * stride + j;
        data[idx(0, 0)] = z;
        for i in 0..mx {
            let mut v = mu_x * data[idx(i, 0)];
            if i > 0 {
                v += (i as f64) * s_xx * data[idx(i - 1, 0)];
            }
            data[idx(i + 1, 0)] = v;
        }
        for j in 0..my {
            for i in 0..=mx {
                let mut v = mu_y * data[idx(i, j)];
                if i > 0 {
                    v += (i as f64) * s_xy * data[idx(i - 1, j)];
                }
                if j > 0 {
                    v += (j as f64) * s_yy * data[idx(i, j - 1)];
                }
                data[idx(i, j + 1)] = v;
            }
        }
        Ok(MomentTable { max_x: mx, max_y: my, data })
    }

    pub fn get(&self, i: u32, j: u32) -> Complex64 {
        let (i, j) = (i as usize, j as usize);
        assert!(i <= self.max_x && j <= self.max_y, "moment ({i},{j}) outside table");
        self.data[i * (self.max_y + 1) + j]
    }
}

/// One of the primitive moves used to realize operator actions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Scale(Complex64),
    MulX,
    MulY,
    Ddx,
    Ddy,
    Conj,
}

/// A polynomial times a complex Gaussian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyGauss {
    coeffs: Poly2,
    exponent: QuadExponent,
    #[serde(skip, default = "default_cap")]
    degree_cap: u32,
}

fn default_cap() -> u32 {
    DEFAULT_DEGREE_CAP
}

impl PolyGauss {
    /// Validating constructor with the default degree cap.
    pub fn new(coeffs: Poly2, exponent: QuadExponent) -> Result<Self> {
        PolyGauss::with_degree_cap(coeffs, exponent, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(coeffs: Poly2, exponent: QuadExponent, cap: u32) -> Result<Self> {
        if !coeffs.is_finite() {
            return Err(Error::NonFinite("coefficients"));
        }
        if !exponent.is_finite() {
            return Err(Error::NonFinite("exponent"));
        }
        let degree = coeffs.total_degree();
        if degree > cap {
            return Err(Error::DegreeCapExceeded { degree, cap });
        }
        Ok(PolyGauss { coeffs, exponent, degree_cap: cap })
    }

    /// `scale · exp(E)`.
    pub fn gaussian(exponent: QuadExponent, scale: Complex64) -> Result<Self> {
        PolyGauss::new(Poly2::constant(scale), exponent)
    }

    /// The zero function carrying the given exponent.
    pub fn zero(exponent: QuadExponent) -> Self {
        PolyGauss { coeffs: Poly2::zero(), exponent, degree_cap: DEFAULT_DEGREE_CAP }
    }

    pub fn coeffs(&self) -> &Poly2 {
        &self.coeffs
    }

    pub fn exponent(&self) -> &QuadExponent {
        &self.exponent
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn total_degree(&self) -> u32 {
        self.coeffs.total_degree()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn is_integrable(&self) -> bool {
        self.exponent.is_integrable()
    }

    /// Same exponent, new coefficients; enforces the degree cap.
    pub(crate) fn with_coeffs(&self, coeffs: Poly2) -> Result<Self> {
        let degree = coeffs.total_degree();
        if degree > self.degree_cap {
            return Err(Error::DegreeCapExceeded { degree, cap: self.degree_cap });
        }
        Ok(PolyGauss { coeffs, exponent: self.exponent, degree_cap: self.degree_cap })
    }

    pub fn scale(&self, s: Complex64) -> PolyGauss {
        PolyGauss { coeffs: self.coeffs.scale(s), ..self.clone() }
    }

    pub fn mul_x(&self) -> Result<PolyGauss> {
        self.with_coeffs(self.coeffs.mul_x())
    }

    pub fn mul_y(&self) -> Result<PolyGauss> {
        self.with_coeffs(self.coeffs.mul_y())
    }

    /// `∂x`, product rule on polynomial and exponent.
    pub fn ddx(&self) -> Result<PolyGauss> {
        let e = &self.exponent;
        let factor = Poly2::from_terms([((0, 0), e.lx), ((1, 0), -2.0 * e.qxx), ((0, 1), -e.qxy)]);
        self.with_coeffs(&self.coeffs.d_dx() + &(&self.coeffs * &factor))
    }

    /// `∂y`, product rule on polynomial and exponent.
    pub fn ddy(&self) -> Result<PolyGauss> {
        let e = &self.exponent;
        let factor = Poly2::from_terms([((0, 0), e.ly), ((0, 1), -2.0 * e.qyy), ((1, 0), -e.qxy)]);
        self.with_coeffs(&self.coeffs.d_dy() + &(&self.coeffs * &factor))
    }

    pub fn conj(&self) -> PolyGauss {
        PolyGauss { coeffs: self.coeffs.conj(), exponent: self.exponent.conj(), degree_cap: self.degree_cap }
    }

    pub fn apply(&self, kind: Primitive) -> Result<PolyGauss> {
        match kind {
            Primitive::Scale(s) => Ok(self.scale(s)),
            Primitive::MulX => self.mul_x(),
            Primitive::MulY => self.mul_y(),
            Primitive::Ddx => self.ddx(),
            Primitive::Ddy => self.ddy(),
            Primitive::Conj => Ok(self.conj()),
        }
    }

    /// Multiplies by `exp(E)`.
    pub fn mul_gaussian(&self, e: &QuadExponent) -> PolyGauss {
        PolyGauss { exponent: self.exponent.add(e), ..self.clone() }
    }

    pub fn mul_poly(&self, p: &Poly2) -> Result<PolyGauss> {
        self.with_coeffs(&self.coeffs * p)
    }

    /// Sum of two functions sharing an exponent (up to rounding).
    pub fn add(&self, other: &PolyGauss) -> Result<PolyGauss> {
        if !self.same_exponent(other) {
            return Err(Error::ExponentMismatch);
        }
        self.with_coeffs(&self.coeffs + &other.coeffs)
    }

    pub fn sub(&self, other: &PolyGauss) -> Result<PolyGauss> {
        if !self.same_exponent(other) {
            return Err(Error::ExponentMismatch);
        }
        self.with_coeffs(&self.coeffs - &other.coeffs)
    }

    /// `a·self + b·other` for functions sharing an exponent.
    pub fn axpby(&self, a: Complex64, other: &PolyGauss, b: Complex64) -> Result<PolyGauss> {
        self.scale(a).add(&other.scale(b))
    }

    pub fn same_exponent(&self, other: &PolyGauss) -> bool {
        self.exponent.approx_eq(&other.exponent, EXPONENT_TOL)
    }

    /// Equal exponents and coefficient-wise distance at most `tol`.
    pub fn approx_eq(&self, other: &PolyGauss, tol: f64) -> bool {
        self.exponent.approx_eq(&other.exponent, tol) && self.coeffs.max_abs_diff(&other.coeffs) <= tol
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let p = self.coeffs.eval(x.into(), y.into());
        if p == ZERO {
            return ZERO;
        }
        p * self.exponent.argument(x, y).exp()
    }

    /// `∫ f dx dy`.
    pub fn integral(&self) -> Result<Complex64> {
        let table = MomentTable::new(&self.exponent, self.coeffs.degree_x(), self.coeffs.degree_y())?;
        Ok(self.coeffs.terms().map(|((m, n), c)| c * table.get(m, n)).sum())
    }

    /// `∫ conj(self)·other`, conjugate-linear in `self`.
    pub fn inner(&self, other: &PolyGauss) -> Result<Complex64> {
        inner_product(self, other)
    }

    pub fn norm(&self) -> Result<f64> {
        norm(self)
    }
}

/// Relative tolerance under which two exponents are treated as identical.
pub const EXPONENT_TOL: f64 = 1e-13;

/// `⟨f, g⟩ = ∫ conj(f)·g`, exact via Gaussian moments.
pub fn inner_product(f: &PolyGauss, g: &PolyGauss) -> Result<Complex64> {
    let e = f.exponent.conj().add(&g.exponent);
    if !e.is_integrable() {
        return Err(Error::NotIntegrable);
    }
    if f.is_zero() || g.is_zero() {
        return Ok(ZERO);
    }
    let table =
        MomentTable::new(&e, f.coeffs.degree_x() + g.coeffs.degree_x(), f.coeffs.degree_y() + g.coeffs.degree_y())?;
    let ft: Vec<(Monomial, Complex64)> = f.coeffs.terms().collect();
    let mut acc = ZERO;
    for ((m2, n2), c2) in g.coeffs.terms() {
        let mut row = ZERO;
        for &((m1, n1), c1) in &ft {
            row += c1.conj() * table.get(m1 + m2, n1 + n2);
        }
        acc += row * c2;
    }
    Ok(acc)
}

/// `sqrt(⟨f, f⟩)`.
pub fn norm(f: &PolyGauss) -> Result<f64> {
    if !f.is_integrable() {
        return Err(Error::NotIntegrable);
    }
    Ok(inner_product(f, f)?.re.max(0.0).sqrt())
}

/// `‖f − g‖`. Uses the coefficient difference when the exponents agree and
/// `‖f‖² + ‖g‖² − 2·Re⟨f, g⟩` otherwise.
pub fn distance(f: &PolyGauss, g: &PolyGauss) -> Result<f64> {
    if f.same_exponent(g) {
        return norm(&f.sub(g)?);
    }
    Ok(distance_squared_cross(f, g)?.max(0.0).sqrt())
}

/// `‖f‖² + ‖g‖² − 2·Re⟨f, g⟩` without clamping.
pub fn distance_squared_cross(f: &PolyGauss, g: &PolyGauss) -> Result<f64> {
    let ff = inner_product(f, f)?.re;
    let gg = inner_product(g, g)?.re;
    let fg = inner_product(f, g)?.re;
    Ok(ff + gg - 2.0 * fg)
}

/// `‖f − g‖ / ‖g‖`.
pub fn relative_distance(f: &PolyGauss, g: &PolyGauss) -> Result<f64> {
    let d = distance(f, g)?;
    let n = norm(g)?;
    Ok(if n > 0.0 { d / n } else { d })
}

/// Random polynomial of total degree `≤ degree`, coefficients uniform in the
/// unit square, times `exp(E)`.
pub fn random_poly_gauss<R: rand::Rng>(rng: &mut R, degree: u32, exponent: QuadExponent) -> Result<PolyGauss> {
    let mut p = Poly2::zero();
    for i in 0..=degree {
        for j in 0..=degree - i {
            p.add_term((i, j), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    PolyGauss::new(p, exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn gauss(q: f64) -> QuadExponent {
        QuadExponent::gaussian(q, q)
    }

    #[test]
    fn construction_checks() {
        let p = Poly2::from_terms([((0, 0), c64(0.0, 0.0)), ((1, 0), c64(2.0, 0.0))]);
        let f = PolyGauss::new(p, gauss(0.25)).unwrap();
        assert_eq!(f.coeffs().len(), 1);
        assert_eq!(f.coeffs().coeff(1, 0), c64(2.0, 0.0));

        let bad = Poly2::constant(c64(f64::NAN, 0.0));
        assert_eq!(PolyGauss::new(bad, gauss(1.0)), Err(Error::NonFinite("coefficients")));

        let high = Poly2::monomial(40, 30, c64(1.0, 0.0));
        assert!(matches!(PolyGauss::new(high, gauss(1.0)), Err(Error::DegreeCapExceeded { degree: 70, cap: 64 })));
    }

    #[test]
    fn primitives() {
        // ∂x e^{−x²/2} = −x e^{−x²/2}
        let f = PolyGauss::gaussian(QuadExponent::gaussian(0.5, 0.0), c64(1.0, 0.0)).unwrap();
        let d = f.ddx().unwrap();
        assert_eq!(d.coeffs().coeff(1, 0), c64(-1.0, 0.0));
        assert_eq!(d.coeffs().len(), 1);

        let g = PolyGauss::gaussian(gauss(1.0), c64(1.0, 0.0)).unwrap();
        let gx = g.apply(Primitive::MulX).unwrap();
        assert_eq!(gx.coeffs().coeff(1, 0), c64(1.0, 0.0));
        assert_eq!(gx.exponent(), g.exponent());

        let e = QuadExponent::new(c64(0.0, 1.0), ZERO, ZERO, ZERO, ZERO, ZERO);
        let h = PolyGauss::gaussian(e, c64(0.0, 1.0)).unwrap();
        let hc = h.apply(Primitive::Conj).unwrap();
        assert_eq!(hc.exponent().qxx, c64(0.0, -1.0));
        assert_eq!(hc.coeffs().coeff(0, 0), c64(0.0, -1.0));
    }

    #[test]
    fn base_integral_examples() {
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-14 * b.norm();
        assert!(close(gaussian_base_integral(&gauss(1.0)).unwrap(), PI.into()));
        assert!(close(gaussian_base_integral(&gauss(0.5)).unwrap(), (2.0 * PI).into()));
        let e = QuadExponent::real(1.0, 1.0, 0.0, 1.0, 0.0, 0.0);
        assert!(close(gaussian_base_integral(&e).unwrap(), (PI * 0.25f64.exp()).into()));
        let bad = QuadExponent::real(1.0, -0.1, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(gaussian_base_integral(&bad), Err(Error::NotIntegrable));
    }

    #[test]
    fn inner_product_examples() {
        let s = (2.0 * PI).powf(-0.5);
        let vac = PolyGauss::gaussian(gauss(0.25), s.into()).unwrap();
        assert!((inner_product(&vac, &vac).unwrap() - 1.0).norm() < 1e-15);

        let g = PolyGauss::gaussian(gauss(0.5), c64(1.0, 0.0)).unwrap();
        let xg = g.mul_x().unwrap();
        assert_eq!(inner_product(&xg, &g).unwrap(), ZERO);
        let v = inner_product(&xg, &xg).unwrap();
        assert!((v - PI / 2.0).norm() < 1e-14);
    }

    #[test]
    fn eval_examples() {
        let f = PolyGauss::gaussian(gauss(0.25), c64(1.0, 0.0)).unwrap();
        assert_eq!(f.eval(0.0, 0.0), c64(1.0, 0.0));
        let g = PolyGauss::gaussian(QuadExponent::gaussian(1.0, 0.0), c64(1.0, 0.0)).unwrap().mul_x().unwrap();
        assert!((g.eval(1.0, 0.0) - (-1f64).exp()).norm() < 1e-16);
    }

    #[test]
    fn complex_determinant_branch_is_continuous() {
        // Rotating the imaginary part through large values must not flip the
        // sign of the root; compare against the 1-D factorization.
        for t in [-50.0, -3.0, -0.5, 0.0, 0.7, 4.0, 80.0] {
            let a = c64(1.0, t);
            let b = c64(0.5, -t);
            let e = QuadExponent::new(a, b, ZERO, ZERO, ZERO, ZERO);
            let want = (PI / a).sqrt() * (PI / b).sqrt();
            let got = gaussian_base_integral(&e).unwrap();
            assert!((got - want).norm() < 1e-13 * want.norm(), "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn non_integrable_values_are_constructible_but_refused_by_inner_product() {
        let e = QuadExponent::gaussian(1.0, -0.5);
        let f = PolyGauss::gaussian(e, c64(1.0, 0.0)).unwrap();
        assert!(!f.is_integrable());
        assert_eq!(inner_product(&f, &f), Err(Error::NotIntegrable));
        assert!(f.ddy().is_ok());
    }

    #[test]
    fn json_shape() {
        let f = PolyGauss::gaussian(gauss(0.25), c64(1.0, 0.0)).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["coeffs"][0][2][0], 1.0);
        assert_eq!(v["exponent"].as_array().unwrap().len(), 6);
        let back: PolyGauss = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
