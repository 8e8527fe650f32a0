//! Sparse bivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Coefficients with modulus below this are dropped. Only exact zeros and
/// deep subnormals fall under it.
pub const PRUNE_THRESHOLD: f64 = 1e-300;

/// Exponent pair `(m, n)` of the monomial `x^m y^n`.
pub type Monomial = (u32, u32);

type Term = (u32, u32, Complex64);

/// `Σ c_{m,n} x^m y^n`, stored sparsely. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Term>", into = "Vec<Term>")]
pub struct Poly2 {
    terms: BTreeMap<Monomial, Complex64>,
}

impl From<Vec<Term>> for Poly2 {
    fn from(terms: Vec<Term>) -> Self {
        Poly2::from_terms(terms.into_iter().map(|(m, n, c)| ((m, n), c)))
    }
}

impl From<Poly2> for Vec<Term> {
    fn from(p: Poly2) -> Self {
        p.terms.into_iter().map(|((m, n), c)| (m, n, c)).collect()
    }
}

fn negligible(c: Complex64) -> bool {
    c.norm() < PRUNE_THRESHOLD
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Poly2::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Poly2::constant(Complex64::new(1.0, 0.0))
    }

    pub fn x() -> Self {
        Poly2::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn y() -> Self {
        Poly2::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(m: u32, n: u32, c: Complex64) -> Self {
        let mut p = Poly2::zero();
        p.add_term((m, n), c);
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs; repeated
    /// monomials are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut p = Poly2::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    /// Adds `c·x^m y^n` in place.
    pub fn add_term(&mut self, key: Monomial, c: Complex64) {
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if negligible(*entry) {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, m: u32, n: u32) -> Complex64 {
        self.terms.get(&(m, n)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(m, n)| m + n).max().unwrap_or(0)
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|(m, _)| *m).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|(_, n)| *n).max().unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// The part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly2 {
        Poly2::from_terms(self.terms().filter(|((m, n), _)| m + n == d))
    }

    pub fn scale(&self, s: Complex64) -> Poly2 {
        Poly2::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    pub fn conj(&self) -> Poly2 {
        Poly2::from_terms(self.terms().map(|(k, c)| (k, c.conj())))
    }

    pub fn mul_x(&self) -> Poly2 {
        Poly2::from_terms(self.terms().map(|((m, n), c)| ((m + 1, n), c)))
    }

    pub fn mul_y(&self) -> Poly2 {
        Poly2::from_terms(self.terms().map(|((m, n), c)| ((m, n + 1), c)))
    }

    pub fn d_dx(&self) -> Poly2 {
        Poly2::from_terms(self.terms().filter(|((m, _), _)| *m > 0).map(|((m, n), c)| ((m - 1, n), c * m as f64)))
    }

    pub fn d_dy(&self) -> Poly2 {
        Poly2::from_terms(self.terms().filter(|((_, n), _)| *n > 0).map(|((m, n), c)| ((m, n - 1), c * n as f64)))
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        // Horner in y for each power of x would need a dense layout; the
        // polynomials here are small enough for direct powers.
        self.terms().map(|((m, n), c)| c * x.powu(m) * y.powu(n)).sum()
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Poly2) -> f64 {
        (self - other).max_abs()
    }

    pub fn pow(&self, k: u32) -> Poly2 {
        (0..k).fold(Poly2::one(), |acc, _| &acc * self)
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c);
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, -c);
        }
        out
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((m1, n1), c1) in self.terms() {
            for ((m2, n2), c2) in rhs.terms() {
                out.add_term((m1 + m2, n1 + n2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn zero_coefficients_are_not_stored() {
        let p = Poly2::from_terms([((0, 0), c64(0.0, 0.0)), ((1, 0), c64(2.0, 0.0))]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(1, 0), c64(2.0, 0.0));
        let q = &p - &p;
        assert!(q.is_zero());
    }

    #[test]
    fn derivatives_and_products() {
        // (x + i y)^2 = x^2 + 2i xy - y^2
        let w = &Poly2::x() + &Poly2::y().scale(c64(0.0, 1.0));
        let w2 = w.pow(2);
        assert_eq!(w2.coeff(2, 0), c64(1.0, 0.0));
        assert_eq!(w2.coeff(1, 1), c64(0.0, 2.0));
        assert_eq!(w2.coeff(0, 2), c64(-1.0, 0.0));
        // (∂x + i∂y) w^2 = 2w + i·2i·w = 0
        let lap = &w2.d_dx() + &w2.d_dy().scale(c64(0.0, 1.0));
        assert!(lap.is_zero());
        assert_eq!(w2.total_degree(), 2);
    }

    #[test]
    fn eval_matches_definition() {
        let p = Poly2::from_terms([((2, 1), c64(1.0, 1.0)), ((0, 0), c64(-3.0, 0.0))]);
        let v = p.eval(c64(2.0, 0.0), c64(0.5, 0.0));
        assert!((v - c64(-1.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn serde_roundtrip_as_term_list() {
        let p = Poly2::from_terms([((1, 2), c64(0.5, -1.0))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1,2,[0.5,-1.0]]]");
        let back: Poly2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
