//! The quantized damped harmonic oscillator `mẍ + γẋ + kx = 0`, doubled into
//! two pseudo-bosonic modes with complex frequencies `ω± = Ω ± iγ/2m`.
//!
//! Representation (`p_x = −i∂x`, `p_y = −i∂y`, `D = Γδ̄ − δΓ̄`):
//!
//! ```text
//! x₊ = (Γ̄p_y + δ̄x)/D     x₋ = −(Γp_y + δx)/D
//! p₊ = Γp_x + δy          p₋ = Γ̄p_x + δ̄y
//! a± = √(ω±/2)(x± + ip±/ω±)     b± = √(ω±/2)(x± − ip±/ω±)
//! ```
//!
//! The formal vacuum annihilated by both `a₊` and `a₋` exists only under a
//! phase constraint on `(Γ, δ)`, and under that constraint it is never square
//! integrable.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::{verify_commutation_table, AffineOp, CommutationTable};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gauss::{norm, random_poly_gauss, PolyGauss, QuadExponent};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest `|Im(Γ̄δ)|` relative to `|Γ||δ|` accepted as non-degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhoParams {
    pub m: f64,
    pub gamma_damp: f64,
    pub k: f64,
    #[serde(rename = "Gamma")]
    pub big_gamma: Complex64,
    pub delta: Complex64,
}

impl DhoParams {
    pub fn new(m: f64, gamma_damp: f64, k: f64, big_gamma: Complex64, delta: Complex64) -> Result<Self> {
        let p = DhoParams { m, gamma_damp, k, big_gamma, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.m, self.gamma_damp, self.k].iter().all(|v| v.is_finite())
            && self.big_gamma.is_finite()
            && self.delta.is_finite();
        if !finite {
            return Err(Error::InvalidParams("DHO parameters must be finite".into()));
        }
        if self.m <= 0.0 || self.k <= 0.0 || self.gamma_damp < 0.0 {
            return Err(Error::InvalidParams(format!(
                "need m > 0, k > 0, gamma >= 0 (got m={}, k={}, gamma={})",
                self.m, self.k, self.gamma_damp
            )));
        }
        if self.k < self.gamma_damp * self.gamma_damp / (4.0 * self.m) {
            return Err(Error::InvalidParams("overdamped: need k >= gamma^2/(4m)".into()));
        }
        let scale = self.big_gamma.norm() * self.delta.norm();
        if scale == 0.0 || (self.big_gamma.conj() * self.delta).im.abs() <= DEGENERACY_TOL * scale {
            return Err(Error::InvalidParams("Gamma*conj(delta) must differ from delta*conj(Gamma)".into()));
        }
        Ok(())
    }

    pub fn with_delta(self, delta: Complex64) -> Self {
        DhoParams { delta, ..self }
    }

    /// `Ω = √((k − γ²/4m)/m)`.
    pub fn omega(&self) -> f64 {
        ((self.k - self.gamma_damp * self.gamma_damp / (4.0 * self.m)) / self.m).max(0.0).sqrt()
    }

    /// `ω₊ = Ω + iγ/2m`.
    pub fn omega_plus(&self) -> Complex64 {
        Complex64::new(self.omega(), self.gamma_damp / (2.0 * self.m))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhoDerived {
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    /// `Γ̄/D`
    pub alpha: Complex64,
    /// `δ̄/D`
    pub beta: Complex64,
}

/// `x₊, x₋, p₊, p₋` as affine operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPairs {
    pub x_plus: AffineOp,
    pub x_minus: AffineOp,
    pub p_plus: AffineOp,
    pub p_minus: AffineOp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhoOperators {
    pub a_plus: AffineOp,
    pub a_minus: AffineOp,
    pub b_plus: AffineOp,
    pub b_minus: AffineOp,
    pub canonical: CanonicalPairs,
    pub derived: DhoDerived,
}

fn mul(c: Complex64, op: AffineOp) -> AffineOp {
    op * c
}

pub fn build_dho(params: &DhoParams) -> Result<DhoOperators> {
    params.validate()?;
    let (g, d) = (params.big_gamma, params.delta);
    let den = g * d.conj() - d * g.conj();
    let omega = params.omega();
    let wp = params.omega_plus();
    let wm = wp.conj();
    let derived = DhoDerived { omega, omega_plus: wp, omega_minus: wm, alpha: g.conj() / den, beta: d.conj() / den };

    let (x, y, px, py) = (AffineOp::x(), AffineOp::y(), AffineOp::px(), AffineOp::py());
    let x_plus = mul(g.conj() / den, py) + mul(d.conj() / den, x);
    let x_minus = mul(-g / den, py) + mul(-d / den, x);
    let p_plus = mul(g, px) + mul(d, y);
    let p_minus = mul(g.conj(), px) + mul(d.conj(), y);

    let ladder =
        |xo: AffineOp, po: AffineOp, w: Complex64, sign: f64| mul((w / 2.0).sqrt(), xo + mul(I * sign / w, po));
    Ok(DhoOperators {
        a_plus: ladder(x_plus, p_plus, wp, 1.0),
        a_minus: ladder(x_minus, p_minus, wm, 1.0),
        b_plus: ladder(x_plus, p_plus, wp, -1.0),
        b_minus: ladder(x_minus, p_minus, wm, -1.0),
        canonical: CanonicalPairs { x_plus, x_minus, p_plus, p_minus },
        derived,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhoAlgebraReport {
    /// `[a₊,b₊] = [a₋,b₋] = 1` and the four cross pairs.
    pub ladder_table: CommutationTable,
    /// `[x₊,p₊] = [x₋,p₋] = i` and the remaining pairs zero.
    pub canonical_table: CommutationTable,
    /// `max(‖b₊ − a₋†‖, ‖b₋ − a₊†‖)` over coefficients.
    pub conjugation_residual: f64,
    /// `max(‖x₊† − x₋‖, ‖p₊† − p₋‖)` over coefficients.
    pub compatibility_residual: f64,
}

impl DhoAlgebraReport {
    pub fn max_commutator_residual(&self) -> f64 {
        self.ladder_table.max_residual().max(self.canonical_table.max_residual())
    }
}

pub fn dho_algebra_check(params: &DhoParams) -> Result<DhoAlgebraReport> {
    let ops = build_dho(params)?;
    let ladder_table = verify_commutation_table(
        &[ops.a_plus, ops.b_plus, ops.a_minus, ops.b_minus],
        &CommutationTable::two_mode(["a+", "b+", "a-", "b-"]),
    )?;
    let c = ops.canonical;
    let names = ["x+", "p+", "x-", "p-"];
    let mut expected = CommutationTable::default();
    for i in 0..4 {
        for j in i + 1..4 {
            let value = if (i, j) == (0, 1) || (i, j) == (2, 3) { I } else { ZERO };
            expected.push(i, j, format!("[{},{}]", names[i], names[j]), value);
        }
    }
    let canonical_table = verify_commutation_table(&[c.x_plus, c.p_plus, c.x_minus, c.p_minus], &expected)?;
    let conjugation_residual =
        ops.b_plus.max_abs_diff(&ops.a_minus.adjoint()).max(ops.b_minus.max_abs_diff(&ops.a_plus.adjoint()));
    let compatibility_residual =
        c.x_plus.adjoint().max_abs_diff(&c.x_minus).max(c.p_plus.adjoint().max_abs_diff(&c.p_minus));
    Ok(DhoAlgebraReport { ladder_table, canonical_table, conjugation_residual, compatibility_residual })
}

/// `ω₊/ω₋` against `−(δ/δ̄)(Γ/Γ̄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioConstraint {
    pub holds: bool,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Tolerance on `|lhs − rhs|` (both sides have unit modulus).
pub const RATIO_TOL: f64 = 1e-12;

pub fn ratio_constraint(params: &DhoParams) -> Result<RatioConstraint> {
    params.validate()?;
    let wp = params.omega_plus();
    let lhs = wp / wp.conj();
    let (g, d) = (params.big_gamma, params.delta);
    let rhs = -(d / d.conj()) * (g / g.conj());
    let residual = (lhs - rhs).norm();
    Ok(RatioConstraint { holds: residual < RATIO_TOL, lhs, rhs, residual })
}

/// Reduces an angle into `[0, π)`.
fn reduce_mod_pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// `δ = |δ|e^{iθ}` with `θ = ½(arg(ω₊/ω₋) + π) − arg Γ` reduced to `[0, π)`.
/// The constraint only fixes `2θ mod 2π`; the other branch is `θ + π`,
/// i.e. `−δ`.
pub fn solve_ratio_constraint(omega_plus: Complex64, big_gamma: Complex64, delta_abs: f64) -> Result<Complex64> {
    if !(omega_plus.is_finite() && big_gamma.is_finite() && delta_abs.is_finite()) || big_gamma.norm() == 0.0 {
        return Err(Error::InvalidParams("solver inputs must be finite with Gamma != 0".into()));
    }
    if delta_abs <= 0.0 || omega_plus.norm() == 0.0 {
        return Err(Error::InvalidParams("need |delta| > 0 and omega_plus != 0".into()));
    }
    let phase = (omega_plus / omega_plus.conj()).arg();
    let theta = reduce_mod_pi(0.5 * (phase + PI) - big_gamma.arg());
    Ok(Complex64::from_polar(delta_abs, theta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VacuumFeasibility {
    /// `exp(−βω₊/(2Γ)·x² + δ/(2αω₊)·y²)`; possibly not integrable.
    pub vacuum: PolyGauss,
    /// `Re(βω₊/(2Γ))`
    pub re1: f64,
    /// `Re(δ/(2αω₊))`
    pub re2: f64,
    /// `re1 > 0 && re2 < 0`
    pub normalizable: bool,
    /// Largest coefficient of `a₊·vacuum`, `a₋·vacuum`, which are computed
    /// symbolically and so make sense without integrability.
    pub annihilation_residual: f64,
}

pub fn vacuum_feasibility(params: &DhoParams) -> Result<VacuumFeasibility> {
    let ratio = ratio_constraint(params)?;
    if !ratio.holds {
        return Err(Error::ConstraintNotSatisfied(ratio.residual));
    }
    let ops = build_dho(params)?;
    let DhoDerived { omega_plus: wp, alpha, beta, .. } = ops.derived;
    let qxx = beta * wp / (2.0 * params.big_gamma);
    let qyy = -params.delta / (2.0 * alpha * wp);
    let vacuum = PolyGauss::gaussian(QuadExponent::new(qxx, qyy, ZERO, ZERO, ZERO, ZERO), ONE)?;
    let annihilation_residual = [ops.a_plus, ops.a_minus]
        .iter()
        .map(|op| op.apply(&vacuum).map(|v| v.coeffs().max_abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (re1, re2) = (qxx.re, -qyy.re);
    Ok(VacuumFeasibility { vacuum, re1, re2, normalizable: re1 > 0.0 && re2 < 0.0, annihilation_residual })
}

/// `(H₁f, H₂f)` with `H₁ = ω₊b₊a₊ + ω₋b₋a₋ + (ω₊+ω₋)/2` and
/// `H₂ = ½(p₊² + ω₊²x₊²) + ½(p₋² + ω₋²x₋²)`. Purely symbolic, so `f` need
/// not be integrable.
pub fn hamiltonian_forms(ops: &DhoOperators, f: &PolyGauss) -> Result<(PolyGauss, PolyGauss)> {
    let d = ops.derived;
    let c = ops.canonical;
    let n_plus = AffineOp::apply_product(&[ops.b_plus, ops.a_plus], f)?;
    let n_minus = AffineOp::apply_product(&[ops.b_minus, ops.a_minus], f)?;
    let h1 =
        n_plus.axpby(d.omega_plus, &n_minus, d.omega_minus)?.axpby(ONE, f, (d.omega_plus + d.omega_minus) * 0.5)?;
    let sq = |op: AffineOp| AffineOp::apply_product(&[op, op], f);
    let plus = sq(c.p_plus)?.axpby(ONE, &sq(c.x_plus)?, d.omega_plus * d.omega_plus)?;
    let minus = sq(c.p_minus)?.axpby(ONE, &sq(c.x_minus)?, d.omega_minus * d.omega_minus)?;
    let h2 = plus.axpby(Complex64::new(0.5, 0.0), &minus, Complex64::new(0.5, 0.0))?;
    Ok((h1, h2))
}

/// `‖H₁f − H₂f‖ / max(‖H₁f‖, ‖f‖)` maximized over integrable samples.
pub fn hamiltonian_identity_check(params: &DhoParams, samples: &[PolyGauss]) -> Result<f64> {
    let ops = build_dho(params)?;
    let mut worst: f64 = 0.0;
    for f in samples {
        if !f.is_integrable() {
            return Err(Error::NotIntegrable);
        }
        let (h1, h2) = hamiltonian_forms(&ops, f)?;
        let scale = norm(&h1)?.max(norm(f)?);
        let diff = norm(&h1.sub(&h2)?)?;
        worst = worst.max(if scale > 0.0 { diff / scale } else { diff });
    }
    Ok(worst)
}

/// Random polynomial of total degree `≤ degree` times `e^{−(x²+y²)/2}`.
pub fn random_sample<R: Rng>(rng: &mut R, degree: u32) -> PolyGauss {
    random_poly_gauss(rng, degree, QuadExponent::gaussian(0.5, 0.5)).expect("finite coefficients")
}

/// One draw of the parameter sweep: `m, k ∈ [0.5, 2]`, `γ ∈ (0, 2√(mk)]`,
/// `|Γ|, |δ| ∈ [0.5, 2]`, `arg Γ` uniform, `arg δ` from the solver.
pub fn random_params<R: Rng>(rng: &mut R) -> Result<DhoParams> {
    let m: f64 = rng.gen_range(0.5..=2.0);
    let k = rng.gen_range(0.5..=2.0);
    let gamma_damp = 2.0 * (m * k).sqrt() * (1.0 - rng.gen::<f64>());
    let big_gamma = Complex64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(0.0..2.0 * PI));
    let delta_abs = rng.gen_range(0.5..=2.0);
    let probe = DhoParams { m, gamma_damp, k, big_gamma, delta: ONE };
    let delta = solve_ratio_constraint(probe.omega_plus(), big_gamma, delta_abs)?;
    DhoParams::new(m, gamma_damp, k, big_gamma, delta)
}

/// Per-draw outcome of [`dho_sweep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub index: usize,
    pub params: DhoParams,
    pub re1: f64,
    pub re2: f64,
    pub normalizable: bool,
    pub annihilation_residual: f64,
    pub commutator_residual: f64,
    pub ratio_residual: f64,
    pub hamiltonian_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub samples: usize,
    pub normalizable_count: usize,
    pub max_annihilation_residual: f64,
    pub max_commutator_residual: f64,
    pub max_ratio_residual: f64,
    pub max_hamiltonian_residual: f64,
    /// Smallest `re1·re2` seen; a normalizable vacuum would need it negative.
    pub min_re_product: f64,
    pub cases: Vec<SweepCase>,
}

/// Number of Hamiltonian-identity samples drawn per sweep case.
pub const HAMILTONIAN_SAMPLES: usize = 5;

/// Sweep case `i` draws from its own ChaCha stream, so results do not depend
/// on scheduling.
pub fn dho_sweep(n: usize, seed: u64, exec: Exec) -> Result<SweepSummary> {
    let cases: Vec<Result<SweepCase>> = exec.map(n, |index| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let params = random_params(&mut rng)?;
        let vac = vacuum_feasibility(&params)?;
        let algebra = dho_algebra_check(&params)?;
        let samples: Vec<PolyGauss> = (0..HAMILTONIAN_SAMPLES).map(|_| random_sample(&mut rng, 3)).collect();
        Ok(SweepCase {
            index,
            params,
            re1: vac.re1,
            re2: vac.re2,
            normalizable: vac.normalizable,
            annihilation_residual: vac.annihilation_residual,
            commutator_residual: algebra.max_commutator_residual(),
            ratio_residual: ratio_constraint(&params)?.residual,
            hamiltonian_residual: hamiltonian_identity_check(&params, &samples)?,
        })
    });
    let cases = cases.into_iter().collect::<Result<Vec<_>>>()?;
    let max = |f: fn(&SweepCase) -> f64| cases.iter().map(f).fold(0.0, f64::max);
    Ok(SweepSummary {
        seed,
        samples: n,
        normalizable_count: cases.iter().filter(|c| c.normalizable).count(),
        max_annihilation_residual: max(|c| c.annihilation_residual),
        max_commutator_residual: max(|c| c.commutator_residual),
        max_ratio_residual: max(|c| c.ratio_residual),
        max_hamiltonian_residual: max(|c| c.hamiltonian_residual),
        min_re_product: cases.iter().map(|c| c.re1 * c.re2).fold(f64::INFINITY, f64::min),
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::poly::Poly2;

    fn undamped() -> DhoParams {
        DhoParams::new(1.0, 0.0, 1.0, ONE, I).unwrap()
    }

    #[test]
    fn frequencies() {
        let p = undamped();
        assert_eq!(p.omega(), 1.0);
        assert_eq!(p.omega_plus(), ONE);
        let p = DhoParams::new(1.0, 1.0, 1.0, ONE, I).unwrap();
        assert!((p.omega() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p.omega_plus() - c64(3f64.sqrt() / 2.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(DhoParams::new(1.0, 0.0, 1.0, ONE, c64(2.0, 0.0)), Err(Error::InvalidParams(_))));
        assert!(matches!(DhoParams::new(1.0, 3.0, 1.0, ONE, I), Err(Error::InvalidParams(_))));
        assert!(matches!(DhoParams::new(0.0, 0.0, 1.0, ONE, I), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn undamped_limit_pairs_modes_by_adjoint() {
        let ops = build_dho(&undamped()).unwrap();
        assert!(ops.b_plus.approx_eq(&ops.a_minus.adjoint(), 1e-15));
        assert!(ops.b_minus.approx_eq(&ops.a_plus.adjoint(), 1e-15));
        assert_eq!(ops.derived.omega_plus, ops.derived.omega_minus);
        // The partner of a₊ is a₋†, not a₊†.
        assert!(ops.b_plus.max_abs_diff(&ops.a_plus.adjoint()) > 1.0);
    }

    #[test]
    fn algebra_is_exact() {
        let p = DhoParams::new(1.0, 0.5, 2.0, c64(1.0, 1.0), c64(0.0, 2.0)).unwrap();
        let r = dho_algebra_check(&p).unwrap();
        assert!(r.max_commutator_residual() < 1e-14, "{r:?}");
        assert_eq!(r.conjugation_residual, 0.0);
        assert!(r.compatibility_residual < 1e-15);
        assert_eq!(r.ladder_table.entries.len(), 6);
        assert_eq!(r.canonical_table.entries.len(), 6);
    }

    #[test]
    fn operators_are_continuous_in_damping() {
        let limit = build_dho(&undamped()).unwrap();
        let gap = |g: f64| {
            let ops = build_dho(&DhoParams::new(1.0, g, 1.0, ONE, I).unwrap()).unwrap();
            [
                ops.a_plus.max_abs_diff(&limit.a_plus),
                ops.a_minus.max_abs_diff(&limit.a_minus),
                ops.b_plus.max_abs_diff(&limit.b_plus),
                ops.b_minus.max_abs_diff(&limit.b_minus),
                (ops.derived.omega_plus - ops.derived.omega_minus).norm(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        };
        let gaps: Vec<f64> = [1.0, 0.1, 0.01, 0.001].iter().map(|&g| gap(g)).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 2e-3);
    }

    #[test]
    fn ratio_solver() {
        let p = undamped();
        assert!(ratio_constraint(&p).unwrap().holds);
        let base = DhoParams::new(1.0, 1.0, 1.0, ONE, I).unwrap();
        let delta = solve_ratio_constraint(base.omega_plus(), ONE, 1.3).unwrap();
        assert!((delta.norm() - 1.3).abs() < 1e-15);
        assert!((0.0..PI).contains(&delta.arg().rem_euclid(2.0 * PI)));
        let r = ratio_constraint(&base.with_delta(delta)).unwrap();
        assert!(r.residual < 1e-12);
        // The other candidate, θ + π, gives the same ratio but is not returned.
        assert!(ratio_constraint(&base.with_delta(-delta)).unwrap().holds);
        assert!(!ratio_constraint(&base.with_delta(delta * I)).unwrap().holds);
    }

    #[test]
    fn vacuum_is_formal_but_not_normalizable() {
        let base = DhoParams::new(1.0, 1.0, 1.0, ONE, I).unwrap();
        let p = base.with_delta(solve_ratio_constraint(base.omega_plus(), ONE, 1.0).unwrap());
        let v = vacuum_feasibility(&p).unwrap();
        assert!(!v.normalizable);
        assert!(v.re1 * v.re2 > 0.0, "{} {}", v.re1, v.re2);
        assert!(v.annihilation_residual < 1e-12);
        let off = base.with_delta(c64(1.0, 1.0));
        assert!(matches!(vacuum_feasibility(&off), Err(Error::ConstraintNotSatisfied(_))));
    }

    #[test]
    fn hamiltonian_forms_agree() {
        // Formal vacuum of the undamped pair e^{−x²/4 + y²}: both forms give
        // (ω₊+ω₋)/2 = 1 times the vacuum, on the coefficient level.
        let p = undamped();
        let ops = build_dho(&p).unwrap();
        let v = vacuum_feasibility(&p).unwrap().vacuum;
        assert!(!v.is_integrable());
        assert!(ops.a_plus.apply(&v).unwrap().is_zero());
        let (h1, h2) = hamiltonian_forms(&ops, &v).unwrap();
        assert!(h1.approx_eq(&v, 1e-15) && h2.approx_eq(&v, 1e-15), "{h1:?} {h2:?}");
        assert!(matches!(hamiltonian_identity_check(&p, &[v]), Err(Error::NotIntegrable)));

        let p = DhoParams::new(1.0, 0.5, 2.0, c64(1.0, 1.0), c64(0.0, 2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut samples: Vec<PolyGauss> = (0..5).map(|_| random_sample(&mut rng, 3)).collect();
        samples.push(PolyGauss::new(Poly2::x(), QuadExponent::gaussian(1.0, 1.0)).unwrap());
        assert!(hamiltonian_identity_check(&p, &samples).unwrap() < 1e-10);
    }

    #[test]
    fn sweep_is_reproducible_and_never_normalizable() {
        let a = dho_sweep(64, 7, Exec::Parallel).unwrap();
        let b = dho_sweep(64, 7, Exec::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.normalizable_count, 0);
        assert!(a.min_re_product > 0.0);
        assert!(a.max_annihilation_residual < 1e-12);
        assert!(a.max_hamiltonian_residual < 1e-10);
        assert_ne!(a.cases[0].params, dho_sweep(1, 8, Exec::Sequential).unwrap().cases[0].params);
    }
}
