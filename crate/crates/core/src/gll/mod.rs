//! Generalized Landau levels: two complex vector superpotentials deform the
//! magnetic translations of the planar Landau problem into two independent
//! pseudo-bosonic modes `(A', B')` and `(A, B)`.
//!
//! The concrete model used throughout is the linear perturbation
//! `W₁ = −x/2 − i·k₁·y`, `W₂ = −y/2 − i·k₂·x` with `|k_j| < ½`, whose ladder
//! operators are affine and whose vacua are Gaussians.

mod family;
mod metric;
mod superpotential;

pub use family::{
    biorthogonality_matrix, closed_form_phi_0l, closed_form_phi_n0, closed_form_psi_0l, closed_form_psi_n0,
    eigen_residuals, expand_in_family, generate_family, phi_gram_matrix, EigenEntry, EigenResiduals, Expansion,
    FamilyTable, GramMatrix, MAX_FAMILY_INDEX,
};
pub use metric::{
    metric_ops_check, riesz_diagnostic, GaussianMultiplier, MetricOperators, MetricReport, RieszDiagnostic,
    RieszVerdict,
};
pub use superpotential::{check_superpotential_constraints, ConstraintReport, SuperpotentialPair};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::affine::{verify_commutation_table, with_adjoints, AffineOp, CommutationTable};
use crate::error::{Error, Result};
use crate::gauss::{PolyGauss, QuadExponent};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance on `α·γ = ½` and on the standard-coupling test.
pub const COUPLING_TOL: f64 = 1e-14;

/// Model parameters. `gamma` here is the ladder coupling paired with
/// `alpha`, not a damping rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GllParams {
    pub k1: f64,
    pub k2: f64,
    pub alpha: Complex64,
    pub gamma: Complex64,
    pub alphap: Complex64,
    pub gammap: Complex64,
}

impl GllParams {
    /// All four couplings `1/√2`.
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        GllParams::with_couplings(k1, k2, s, s, s, s)
    }

    /// The standard Landau levels, `k₁ = k₂ = 0`.
    pub fn sll() -> Self {
        GllParams::new(0.0, 0.0).expect("standard point is admissible")
    }

    pub fn with_couplings(
        k1: f64,
        k2: f64,
        alpha: Complex64,
        gamma: Complex64,
        alphap: Complex64,
        gammap: Complex64,
    ) -> Result<Self> {
        let p = GllParams { k1, k2, alpha, gamma, alphap, gammap };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("k1", self.k1), ("k2", self.k2)] {
            if !k.is_finite() || k <= -0.5 || k >= 0.5 {
                return Err(Error::InvalidParams(format!("{name} = {k} outside (-1/2, 1/2)")));
            }
        }
        for (name, a, g) in [("alpha*gamma", self.alpha, self.gamma), ("alphap*gammap", self.alphap, self.gammap)] {
            if (a * g - 0.5).norm() > COUPLING_TOL {
                return Err(Error::InvalidParams(format!("{name} = {} != 1/2", a * g)));
            }
        }
        Ok(())
    }

    pub fn has_standard_couplings(&self) -> bool {
        let s = FRAC_1_SQRT_2;
        [self.alpha, self.gamma, self.alphap, self.gammap].iter().all(|c| (c - s).norm() <= COUPLING_TOL)
    }

    pub fn is_sll(&self) -> bool {
        self.k1 == 0.0 && self.k2 == 0.0
    }

    // (1 ± 2k)/2, shared by operators and vacua so that annihilation is exact.
    fn hx_plus(&self) -> f64 {
        0.5 + self.k2
    }
    fn hx_minus(&self) -> f64 {
        0.5 - self.k2
    }
    fn hy_plus(&self) -> f64 {
        0.5 + self.k1
    }
    fn hy_minus(&self) -> f64 {
        0.5 - self.k1
    }

    /// Exponent of `φ₀₀`: `−(1+2k₂)x²/4 − (1−2k₁)y²/4`.
    pub fn phi_exponent(&self) -> QuadExponent {
        QuadExponent::gaussian(0.5 * self.hx_plus(), 0.5 * self.hy_minus())
    }

    /// Exponent of `Ψ₀₀`: `−(1−2k₂)x²/4 − (1+2k₁)y²/4`.
    pub fn psi_exponent(&self) -> QuadExponent {
        QuadExponent::gaussian(0.5 * self.hx_minus(), 0.5 * self.hy_plus())
    }
}

/// The two pseudo-bosonic pairs; `(ap, bp)` raise and lower the first
/// family index, `(a, b)` the second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GllOperators {
    pub a: AffineOp,
    pub b: AffineOp,
    pub ap: AffineOp,
    pub bp: AffineOp,
}

impl GllOperators {
    /// `h' = B'A' − ½` applied to `f`.
    pub fn h_prime(&self, f: &PolyGauss) -> Result<PolyGauss> {
        let n = AffineOp::apply_product(&[self.bp, self.ap], f)?;
        n.sub(&f.scale(0.5.into()))
    }

    /// `h = BA − ½` applied to `f`.
    pub fn h(&self, f: &PolyGauss) -> Result<PolyGauss> {
        let n = AffineOp::apply_product(&[self.b, self.a], f)?;
        n.sub(&f.scale(0.5.into()))
    }

    /// `h'† = A'†B'† − ½` applied to `f`.
    pub fn h_prime_dag(&self, f: &PolyGauss) -> Result<PolyGauss> {
        let n = AffineOp::apply_product(&[self.ap.adjoint(), self.bp.adjoint()], f)?;
        n.sub(&f.scale(0.5.into()))
    }

    /// `h† = A†B† − ½` applied to `f`.
    pub fn h_dag(&self, f: &PolyGauss) -> Result<PolyGauss> {
        let n = AffineOp::apply_product(&[self.a.adjoint(), self.b.adjoint()], f)?;
        n.sub(&f.scale(0.5.into()))
    }

    /// Verifies `[A',B'] = [A,B] = 1` and the vanishing of the four
    /// cross-mode commutators.
    pub fn commutation_table(&self) -> CommutationTable {
        let ops = [self.ap, self.bp, self.a, self.b];
        verify_commutation_table(&ops, &CommutationTable::two_mode(["A'", "B'", "A", "B"]))
            .expect("indices are in range")
    }

    /// The same table extended by the cross-mode pairs that involve an
    /// adjoint. These only vanish at `k₁ = k₂ = 0`:
    /// `[A',B†] = 2iα'γ̄(k₂ − k₁)` and `[A',A†] = 2iα'ᾱ(k₁ + k₂)`.
    pub fn sharp_commutation_table(&self) -> CommutationTable {
        let ops = with_adjoints([self.ap, self.bp, self.a, self.b]);
        verify_commutation_table(&ops, &CommutationTable::two_mode_sharp(["A'", "B'", "A", "B"]))
            .expect("indices are in range")
    }
}

/// Ladder operators of the linear perturbation, with coefficients
///
/// ```text
/// A' = α'(∂x − i∂y + x(1+2k₂)/2 − iy(1−2k₁)/2)
/// B' = γ'(−∂x − i∂y + x(1−2k₂)/2 + iy(1+2k₁)/2)
/// A  = α(−i∂x + ∂y − ix(1+2k₂)/2 + y(1−2k₁)/2)
/// B  = γ(−i∂x − ∂y + ix(1−2k₂)/2 + y(1+2k₁)/2)
/// ```
pub fn build_gll(params: &GllParams) -> Result<GllOperators> {
    params.validate()?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (hxp, hxm, hyp, hym) = (params.hx_plus(), params.hx_minus(), params.hy_plus(), params.hy_minus());
    let ap = AffineOp::new(zero, hxp.into(), -I * hym, one, -I) * params.alphap;
    let bp = AffineOp::new(zero, hxm.into(), I * hyp, -one, -I) * params.gammap;
    let a = AffineOp::new(zero, -I * hxp, hym.into(), -I, one) * params.alpha;
    let b = AffineOp::new(zero, I * hxm, hyp.into(), -I, -one) * params.gamma;
    Ok(GllOperators { a, b, ap, bp })
}

/// `N_φ = N_Ψ = (2π)^{−1/2}`, so that `⟨Ψ₀₀, φ₀₀⟩ = 1`.
pub fn vacuum_normalization() -> f64 {
    (2.0 * PI).powf(-0.5)
}

/// `(φ₀₀, Ψ₀₀)`, annihilated by `A, A'` and by `B†, B'†` respectively.
pub fn vacuum_pair(params: &GllParams) -> Result<(PolyGauss, PolyGauss)> {
    params.validate()?;
    let n = Complex64::new(vacuum_normalization(), 0.0);
    Ok((PolyGauss::gaussian(params.phi_exponent(), n)?, PolyGauss::gaussian(params.psi_exponent(), n)?))
}

/// The standard vacuum `(2π)^{−1/2}·e^{−(x²+y²)/4}`.
pub fn standard_vacuum() -> PolyGauss {
    vacuum_pair(&GllParams::sll()).expect("standard point is admissible").0
}

/// Norms of `Aφ₀₀, A'φ₀₀, B†Ψ₀₀, B'†Ψ₀₀` and the overlap `⟨Ψ₀₀, φ₀₀⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VacuumCheck {
    pub a_phi: f64,
    pub ap_phi: f64,
    pub b_dag_psi: f64,
    pub bp_dag_psi: f64,
    pub overlap: Complex64,
}

impl VacuumCheck {
    pub fn max_annihilation_residual(&self) -> f64 {
        self.a_phi.max(self.ap_phi).max(self.b_dag_psi).max(self.bp_dag_psi)
    }
}

pub fn vacuum_check(params: &GllParams) -> Result<VacuumCheck> {
    let ops = build_gll(params)?;
    let (phi, psi) = vacuum_pair(params)?;
    Ok(VacuumCheck {
        a_phi: ops.a.apply(&phi)?.norm()?,
        ap_phi: ops.ap.apply(&phi)?.norm()?,
        b_dag_psi: ops.b.adjoint().apply(&psi)?.norm()?,
        bp_dag_psi: ops.bp.adjoint().apply(&psi)?.norm()?,
        overlap: psi.inner(&phi)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn sll_lowering_operator_matches_magnetic_translation_form() {
        let ops = build_gll(&GllParams::sll()).unwrap();
        let s = FRAC_1_SQRT_2;
        // (1/√2)(−i∂x + ∂y − ix/2 + y/2)
        let want =
            AffineOp::new(c64(0.0, 0.0), c64(0.0, -0.5), c64(0.5, 0.0), c64(0.0, -1.0), c64(1.0, 0.0)) * c64(s, 0.0);
        assert!(ops.a.approx_eq(&want, 1e-16));
        // Q₀ + iP₀ with Q₀ = p_x + y/2, P₀ = p_y − x/2
        let q0 = AffineOp::px() + AffineOp::y() * c64(0.5, 0.0);
        let p0 = AffineOp::py() - AffineOp::x() * c64(0.5, 0.0);
        assert!(ops.a.approx_eq(&((q0 + p0 * I) * c64(s, 0.0)), 1e-16));
    }

    #[test]
    fn ladder_commutators_are_unit() {
        for (k1, k2) in [(0.0, 0.0), (0.2, -0.3), (-0.49, 0.49)] {
            let ops = build_gll(&GllParams::new(k1, k2).unwrap()).unwrap();
            let t = ops.commutation_table();
            assert!(t.max_residual() < 1e-14, "({k1},{k2}): {}", t.max_residual());
        }
    }

    #[test]
    fn adjoint_cross_relations_hold_only_at_standard_point() {
        let ops = build_gll(&GllParams::sll()).unwrap();
        assert!(ops.sharp_commutation_table().max_residual() < 1e-15);
        let ops = build_gll(&GllParams::new(0.2, -0.3).unwrap()).unwrap();
        let t = ops.sharp_commutation_table();
        let get = |label: &str| t.entries.iter().find(|e| e.label == label).unwrap().computed.unwrap();
        assert!((get("[A',B†]") - c64(0.0, -0.5)).norm() < 1e-15);
        assert!((get("[A',A†]") - c64(0.0, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn admissible_range() {
        assert!(GllParams::new(0.0, 0.49).is_ok());
        assert!(matches!(GllParams::new(0.0, 0.5), Err(Error::InvalidParams(_))));
        assert!(matches!(GllParams::new(-0.5, 0.0), Err(Error::InvalidParams(_))));
        let bad = GllParams::with_couplings(0.1, 0.1, c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.5, 0.0));
        assert!(matches!(bad, Err(Error::InvalidParams(_))));
        let ok = GllParams::with_couplings(0.1, 0.1, c64(2.0, 0.0), c64(0.25, 0.0), c64(0.0, 1.0), c64(0.0, -0.5));
        assert!(ok.is_ok());
        assert!(!ok.unwrap().has_standard_couplings());
    }

    #[test]
    fn vacua() {
        let (phi, psi) = vacuum_pair(&GllParams::sll()).unwrap();
        assert_eq!(phi, psi);
        assert_eq!(phi.exponent(), &QuadExponent::gaussian(0.25, 0.25));

        let c = vacuum_check(&GllParams::new(0.2, -0.3).unwrap()).unwrap();
        assert!(c.max_annihilation_residual() < 1e-12);
        assert!((c.overlap - 1.0).norm() < 1e-14);
    }

    #[test]
    fn b_is_not_the_adjoint_of_a_off_the_standard_point() {
        let ops = build_gll(&GllParams::new(0.0, 0.2).unwrap()).unwrap();
        assert!(ops.b.max_abs_diff(&ops.a.adjoint()) > 0.1);
        let sll = build_gll(&GllParams::sll()).unwrap();
        assert!(sll.b.approx_eq(&sll.a.adjoint(), 1e-16));
        assert!(sll.bp.approx_eq(&sll.ap.adjoint(), 1e-16));
    }
}
