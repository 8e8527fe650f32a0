use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GllOperators, GllParams};
use crate::affine::AffineOp;
use crate::error::{Error, Result};
use crate::poly::Poly2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Maximum polynomial degree accepted for a superpotential component.
pub const MAX_SUPERPOTENTIAL_DEGREE: u32 = 16;

/// Two complex vector superpotentials `W = (W₁, W₂)` and `V = (V₁, V₂)`.
///
/// They deform the canonical variables into
/// `P' = p_x + W₂`, `Q' = p_y − W₁`, `P = p_y + V₁`, `Q = p_x − V₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpotentialPair {
    pub w1: Poly2,
    pub w2: Poly2,
    pub v1: Poly2,
    pub v2: Poly2,
}

fn real(c: f64) -> Complex64 {
    Complex64::new(c, 0.0)
}

impl SuperpotentialPair {
    pub fn new(w1: Poly2, w2: Poly2, v1: Poly2, v2: Poly2) -> Result<Self> {
        let sp = SuperpotentialPair { w1, w2, v1, v2 };
        for p in sp.components() {
            if !p.is_finite() {
                return Err(Error::NonFinite("superpotential"));
            }
            if p.total_degree() > MAX_SUPERPOTENTIAL_DEGREE {
                return Err(Error::DegreeCapExceeded { degree: p.total_degree(), cap: MAX_SUPERPOTENTIAL_DEGREE });
            }
        }
        Ok(sp)
    }

    fn components(&self) -> [&Poly2; 4] {
        [&self.w1, &self.w2, &self.v1, &self.v2]
    }

    /// `W = V = −½(x, y)`.
    pub fn sll() -> Self {
        let w1 = Poly2::x().scale(real(-0.5));
        let w2 = Poly2::y().scale(real(-0.5));
        SuperpotentialPair { v1: w1.clone(), v2: w2.clone(), w1, w2 }
    }

    /// `V₁ = −a₁x + v₁(y)`, `V₂ = −a₂y + v₂(x)` with `a₁ + a₂ = 1`, and the
    /// partner `W₁ = −a₂x − v₁(y)`, `W₂ = −a₁y − v₂(x)` forced by the
    /// constraints (up to additive constants).
    pub fn perturbed_sll(a1: f64, v1_of_y: &Poly2, v2_of_x: &Poly2) -> Result<Self> {
        if v1_of_y.degree_x() > 0 || v2_of_x.degree_y() > 0 {
            return Err(Error::InvalidParams("v1 must depend on y only and v2 on x only".into()));
        }
        let a2 = 1.0 - a1;
        let v1 = &Poly2::x().scale(real(-a1)) + v1_of_y;
        let v2 = &Poly2::y().scale(real(-a2)) + v2_of_x;
        let w1 = &Poly2::x().scale(real(-a2)) - v1_of_y;
        let w2 = &Poly2::y().scale(real(-a1)) - v2_of_x;
        SuperpotentialPair::new(w1, w2, v1, v2)
    }

    /// `W₁ = −x/2 − i·k₁·y`, `W₂ = −y/2 − i·k₂·x`, and the matching
    /// `V₁ = −x/2 + i·k₁·y`, `V₂ = −y/2 + i·k₂·x`.
    pub fn linear_perturbation(k1: f64, k2: f64) -> Self {
        let v1 = Poly2::monomial(0, 1, I * k1);
        let v2 = Poly2::monomial(1, 0, I * k2);
        SuperpotentialPair::perturbed_sll(0.5, &v1, &v2).expect("linear data is valid")
    }

    /// `V₂ = xⁿyᵏ`, `V₁ = −x + v₁(y) − k/(n+1)·x^{n+1}y^{k−1}` and the partner
    /// `W₁ = −v₁(y) + k/(n+1)·x^{n+1}y^{k−1}`, `W₂ = −y − xⁿyᵏ`.
    pub fn monomial_family(n: u32, k: u32, v1_of_y: &Poly2) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidParams("exponents must be positive".into()));
        }
        if v1_of_y.degree_x() > 0 {
            return Err(Error::InvalidParams("v1 must depend on y only".into()));
        }
        let ratio = real(k as f64 / (n as f64 + 1.0));
        let corr = Poly2::monomial(n + 1, k - 1, ratio);
        let v2 = Poly2::monomial(n, k, real(1.0));
        let v1 = &(&Poly2::x().scale(real(-1.0)) + v1_of_y) - &corr;
        let w1 = &(-v1_of_y) + &corr;
        let w2 = &Poly2::y().scale(real(-1.0)) - &v2;
        SuperpotentialPair::new(w1, w2, v1, v2)
    }

    pub fn is_affine(&self) -> bool {
        self.components().iter().all(|p| p.total_degree() <= 1)
    }

    /// `(Q, P, Q', P')` as affine operators; fails for non-affine
    /// superpotentials.
    pub fn canonical_operators(&self) -> Result<[AffineOp; 4]> {
        if !self.is_affine() {
            return Err(Error::NonAffine("superpotential of degree > 1".into()));
        }
        let m = |p: &Poly2| AffineOp::multiplication(p);
        let q = AffineOp::px() - m(&self.v2)?;
        let p = AffineOp::py() + m(&self.v1)?;
        let qp = AffineOp::py() - m(&self.w1)?;
        let pp = AffineOp::px() + m(&self.w2)?;
        Ok([q, p, qp, pp])
    }

    /// `A = α(Q + iP)`, `B = γ(Q − iP)`, `A' = α'(Q' + iP')`, `B' = γ'(Q' − iP')`.
    pub fn ladder_operators(&self, params: &GllParams) -> Result<GllOperators> {
        let [q, p, qp, pp] = self.canonical_operators()?;
        Ok(GllOperators {
            a: (q + p * I) * params.alpha,
            b: (q - p * I) * params.gamma,
            ap: (qp + pp * I) * params.alphap,
            bp: (qp - pp * I) * params.gammap,
        })
    }
}

/// The six constraint residual polynomials, in order
/// `W₁ₓ − V₂ᵧ`, `W₂ₓ + V₂ₓ`, `W₁ᵧ + V₁ᵧ`, `W₂ᵧ − V₁ₓ`, `V₁ₓ + V₂ᵧ + 1`,
/// `W₁ₓ + W₂ᵧ + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub residuals: Vec<(String, Poly2)>,
    pub satisfied: bool,
}

impl ConstraintReport {
    pub fn violated(&self) -> Vec<&str> {
        self.residuals.iter().filter(|(_, p)| !p.is_zero()).map(|(name, _)| name.as_str()).collect()
    }
}

/// Checks that the deformed variables keep canonical commutators and that
/// both fields have unit flux density.
pub fn check_superpotential_constraints(sp: &SuperpotentialPair) -> ConstraintReport {
    let one = Poly2::one();
    let residuals = vec![
        ("W1_x - V2_y".to_string(), &sp.w1.d_dx() - &sp.v2.d_dy()),
        ("W2_x + V2_x".to_string(), &sp.w2.d_dx() + &sp.v2.d_dx()),
        ("W1_y + V1_y".to_string(), &sp.w1.d_dy() + &sp.v1.d_dy()),
        ("W2_y - V1_x".to_string(), &sp.w2.d_dy() - &sp.v1.d_dx()),
        ("V1_x + V2_y + 1".to_string(), &(&sp.v1.d_dx() + &sp.v2.d_dy()) + &one),
        ("W1_x + W2_y + 1".to_string(), &(&sp.w1.d_dx() + &sp.w2.d_dy()) + &one),
    ];
    let satisfied = residuals.iter().all(|(_, p)| p.is_zero());
    ConstraintReport { residuals, satisfied }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::commutator_scalar;
    use crate::gll::build_gll;

    #[test]
    fn standard_choice_is_admissible() {
        assert!(check_superpotential_constraints(&SuperpotentialPair::sll()).satisfied);
    }

    #[test]
    fn linear_perturbation_is_admissible() {
        let sp = SuperpotentialPair::linear_perturbation(0.2, -0.3);
        assert_eq!(sp.v1.coeff(0, 1), I * 0.2);
        assert_eq!(sp.v2.coeff(1, 0), I * -0.3);
        assert_eq!(sp.w1.coeff(0, 1), I * -0.2);
        assert!(check_superpotential_constraints(&sp).satisfied);
    }

    #[test]
    fn broken_choice_is_flagged() {
        let x = Poly2::x().scale(real(-1.0));
        let sp = SuperpotentialPair::new(x.clone(), Poly2::zero(), x, Poly2::zero()).unwrap();
        let r = check_superpotential_constraints(&sp);
        assert!(!r.satisfied);
        // W₁ₓ − V₂ᵧ = −1 and W₂ᵧ − V₁ₓ = 1; both traces hold.
        assert_eq!(r.violated(), vec!["W1_x - V2_y", "W2_y - V1_x"]);
        assert_eq!(r.residuals[3].1, Poly2::one());
    }

    #[test]
    fn monomial_family_is_admissible() {
        for (n, k) in [(1, 1), (2, 3), (3, 1)] {
            let v1 = Poly2::monomial(0, 2, Complex64::new(0.3, -1.0));
            let sp = SuperpotentialPair::monomial_family(n, k, &v1).unwrap();
            let r = check_superpotential_constraints(&sp);
            assert!(r.satisfied, "n={n} k={k}: {:?}", r.violated());
            assert!(sp.ladder_operators(&GllParams::sll()).is_err());
        }
    }

    #[test]
    fn asymmetric_perturbation_is_admissible() {
        let v1 = Poly2::monomial(0, 3, Complex64::new(0.0, 0.7));
        let v2 = Poly2::monomial(2, 0, Complex64::new(1.0, 0.2));
        let sp = SuperpotentialPair::perturbed_sll(0.3, &v1, &v2).unwrap();
        assert!(check_superpotential_constraints(&sp).satisfied);
    }

    #[test]
    fn ladder_route_matches_direct_construction() {
        for (k1, k2) in [(0.0, 0.0), (0.2, -0.3), (-0.4, 0.1)] {
            let params = GllParams::new(k1, k2).unwrap();
            let via_sp = SuperpotentialPair::linear_perturbation(k1, k2).ladder_operators(&params).unwrap();
            let direct = build_gll(&params).unwrap();
            for (u, v) in [(via_sp.a, direct.a), (via_sp.b, direct.b), (via_sp.ap, direct.ap), (via_sp.bp, direct.bp)] {
                assert!(u.approx_eq(&v, 1e-15), "{u:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn deformed_variables_stay_canonical() {
        let [q, p, qp, pp] = SuperpotentialPair::linear_perturbation(0.3, 0.1).canonical_operators().unwrap();
        assert_eq!(commutator_scalar(&q, &p), I);
        assert_eq!(commutator_scalar(&qp, &pp), I);
        for (u, v) in [(q, pp), (qp, p), (q, qp), (p, pp)] {
            assert_eq!(commutator_scalar(&u, &v), Complex64::new(0.0, 0.0));
        }
    }
}
