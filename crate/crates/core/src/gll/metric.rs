use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_gll, FamilyTable, GllParams};
use crate::affine::AffineOp;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gauss::{norm, relative_distance, PolyGauss, QuadExponent};

/// Multiplication by `exp(E)` for a (possibly growing) Gaussian `E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMultiplier {
    pub exponent: QuadExponent,
}

impl GaussianMultiplier {
    pub fn new(exponent: QuadExponent) -> Self {
        GaussianMultiplier { exponent }
    }

    pub fn identity() -> Self {
        GaussianMultiplier::new(QuadExponent::default())
    }

    pub fn apply(&self, f: &PolyGauss) -> PolyGauss {
        f.mul_gaussian(&self.exponent)
    }

    pub fn compose(&self, other: &GaussianMultiplier) -> GaussianMultiplier {
        GaussianMultiplier::new(self.exponent.add(&other.exponent))
    }

    pub fn inverse(&self) -> GaussianMultiplier {
        GaussianMultiplier::new(self.exponent.neg())
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.exponent.approx_eq(&QuadExponent::default(), tol)
    }

    /// Bounded on L² iff the exponent's real part never grows.
    pub fn is_bounded(&self) -> bool {
        let m = self.exponent.real_part_matrix();
        let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
        a >= 0.0 && c >= 0.0 && a * c - b * b >= 0.0 && self.exponent.lx.re == 0.0 && self.exponent.ly.re == 0.0
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.exponent.argument(x, y).exp()
    }
}

/// `T_φ = φ₀₀/φ⁰₀₀`, `T_Ψ = Ψ₀₀/φ⁰₀₀`, `S_φ = T_φT_Ψ⁻¹`, `S_Ψ = S_φ⁻¹`.
///
/// With `N_φ = N_Ψ = (2π)^{−1/2}`:
/// `T_φ = e^{−k₂x²/2 + k₁y²/2}`, `T_Ψ = e^{k₂x²/2 − k₁y²/2}`,
/// `S_φ = e^{−k₂x² + k₁y²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricOperators {
    pub t_phi: GaussianMultiplier,
    pub t_psi: GaussianMultiplier,
    pub s_phi: GaussianMultiplier,
    pub s_psi: GaussianMultiplier,
}

impl MetricOperators {
    pub fn new(params: &GllParams) -> Result<Self> {
        params.validate()?;
        if !params.has_standard_couplings() {
            return Err(Error::UnsupportedCouplings);
        }
        let std = GllParams::sll();
        let t_phi = GaussianMultiplier::new(params.phi_exponent().add(&std.phi_exponent().neg()));
        let t_psi = GaussianMultiplier::new(params.psi_exponent().add(&std.phi_exponent().neg()));
        let s_phi = t_phi.compose(&t_psi.inverse());
        Ok(MetricOperators { t_phi, t_psi, s_phi, s_psi: s_phi.inverse() })
    }
}

/// Largest relative residuals of the metric and intertwining identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// `‖φ_{n,l} − T_φφ⁰_{n,l}‖/‖φ_{n,l}‖`
    pub t_phi_reproduction: f64,
    /// `‖Ψ_{n,l} − T_Ψφ⁰_{n,l}‖/‖Ψ_{n,l}‖`
    pub t_psi_reproduction: f64,
    /// `S_φΨ_{n,l} = φ_{n,l}` and `S_Ψφ_{n,l} = Ψ_{n,l}`
    pub s_maps_families: f64,
    /// `S_ΨS_φ = S_φS_Ψ = 1` on the samples
    pub s_inverse_pair: f64,
    /// `B'ⁿT_φ = T_φ(A₀'†)ⁿ`, `BⁿT_φ = T_φ(A₀†)ⁿ` and the Ψ analogues on samples
    pub ladder_intertwining: f64,
    /// `S_ΨN_j = 𝔑_jS_Ψ` on φ, `N_jS_φ = S_φ𝔑_j` on Ψ
    pub number_intertwining: f64,
    pub operators: MetricOperators,
}

impl MetricReport {
    pub fn max(&self) -> f64 {
        [
            self.t_phi_reproduction,
            self.t_psi_reproduction,
            self.s_maps_families,
            self.s_inverse_pair,
            self.ladder_intertwining,
            self.number_intertwining,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn max_of(values: Vec<Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0, |acc, v| Ok(f64::max(acc, v?)))
}

/// Verifies the metric operators against `table` and the intertwining
/// relations on `samples` (which must stay integrable after multiplication by
/// `T_φ`, `T_Ψ`).
pub fn metric_ops_check(
    params: &GllParams,
    table: &FamilyTable,
    standard: &FamilyTable,
    samples: &[PolyGauss],
    exec: Exec,
) -> Result<MetricReport> {
    let m = MetricOperators::new(params)?;
    if standard.params != GllParams::sll() || standard.nmax < table.nmax || standard.lmax < table.lmax {
        return Err(Error::InvalidParams(
            "reference table must be the standard family of at least the same size".into(),
        ));
    }
    let labels = table.labels();
    let ops = build_gll(params)?;
    let std_ops = build_gll(&GllParams::sll())?;

    let t_phi_reproduction = max_of(exec.map(labels.len(), |i| {
        let (n, l) = labels[i];
        relative_distance(&m.t_phi.apply(standard.phi(n, l)), table.phi(n, l))
    }))?;
    let t_psi_reproduction = max_of(exec.map(labels.len(), |i| {
        let (n, l) = labels[i];
        relative_distance(&m.t_psi.apply(standard.phi(n, l)), table.psi(n, l))
    }))?;
    let s_maps_families = max_of(exec.map(labels.len(), |i| {
        let (n, l) = labels[i];
        let a = relative_distance(&m.s_phi.apply(table.psi(n, l)), table.phi(n, l))?;
        let b = relative_distance(&m.s_psi.apply(table.phi(n, l)), table.psi(n, l))?;
        Ok(a.max(b))
    }))?;
    let s_inverse_pair = max_of(exec.map(samples.len(), |i| {
        let f = &samples[i];
        let a = relative_distance(&m.s_psi.apply(&m.s_phi.apply(f)), f)?;
        let b = relative_distance(&m.s_phi.apply(&m.s_psi.apply(f)), f)?;
        Ok(a.max(b))
    }))?;

    // (raiser of the deformed family, multiplier, raiser of the standard family)
    let pairs: [(AffineOp, GaussianMultiplier, AffineOp); 4] = [
        (ops.bp, m.t_phi, std_ops.ap.adjoint()),
        (ops.b, m.t_phi, std_ops.a.adjoint()),
        (ops.ap.adjoint(), m.t_psi, std_ops.ap.adjoint()),
        (ops.a.adjoint(), m.t_psi, std_ops.a.adjoint()),
    ];
    const POWERS: usize = 3;
    let ladder_intertwining = max_of(exec.map(samples.len() * pairs.len() * POWERS, |i| {
        let f = &samples[i / (pairs.len() * POWERS)];
        let (raise, t, raise0) = &pairs[(i / POWERS) % pairs.len()];
        let power = i % POWERS + 1;
        let left = AffineOp::apply_product(&vec![*raise; power], &t.apply(f))?;
        let right = t.apply(&AffineOp::apply_product(&vec![*raise0; power], f)?);
        relative_distance(&left, &right)
    }))?;

    let numbers = [(ops.b, ops.a), (ops.bp, ops.ap)];
    let number_intertwining = max_of(exec.map(labels.len(), |i| {
        let (n, l) = labels[i];
        let mut worst: f64 = 0.0;
        for (raise, lower) in numbers {
            let number = [raise, lower];
            let number_dag = [lower.adjoint(), raise.adjoint()];
            let phi = table.phi(n, l);
            let lhs = m.s_psi.apply(&AffineOp::apply_product(&number, phi)?);
            let rhs = AffineOp::apply_product(&number_dag, &m.s_psi.apply(phi))?;
            worst = worst.max(scaled_distance(&lhs, &rhs, phi)?);
            let psi = table.psi(n, l);
            let lhs = AffineOp::apply_product(&number, &m.s_phi.apply(psi))?;
            let rhs = m.s_phi.apply(&AffineOp::apply_product(&number_dag, psi)?);
            worst = worst.max(scaled_distance(&lhs, &rhs, psi)?);
        }
        Ok(worst)
    }))?;

    Ok(MetricReport {
        t_phi_reproduction,
        t_psi_reproduction,
        s_maps_families,
        s_inverse_pair,
        ladder_intertwining,
        number_intertwining,
        operators: m,
    })
}

// The number operators annihilate the vacuum, so residuals are measured
// against the norm of the mapped input instead of the (possibly zero) output.
fn scaled_distance(a: &PolyGauss, b: &PolyGauss, input: &PolyGauss) -> Result<f64> {
    let d = crate::gauss::distance(a, b)?;
    let scale = norm(a)?.max(norm(b)?).max(norm(input)?);
    Ok(if scale > 0.0 { d / scale } else { d })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RieszVerdict {
    #[serde(rename = "Riesz-compatible")]
    RieszCompatible,
    #[serde(rename = "norm growth detected")]
    NormGrowthDetected,
}

impl fmt::Display for RieszVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RieszVerdict::RieszCompatible => "Riesz-compatible",
            RieszVerdict::NormGrowthDetected => "norm growth detected",
        })
    }
}

/// Finite-window growth of `r_{n,l} = ‖φ_{n,l}‖·‖Ψ_{n,l}‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszDiagnostic {
    /// `r_{n,n}` for `n ≤ min(nmax, lmax)`.
    pub diagonal: Vec<f64>,
    /// Largest `r_{n,l}` over the whole table.
    pub sup: f64,
    pub verdict: RieszVerdict,
}

impl RieszDiagnostic {
    pub fn diagonal_strictly_increasing(&self) -> bool {
        self.diagonal.windows(2).all(|w| w[1] > w[0])
    }
}

/// Verdict threshold on `sup r_{n,l}` over the computed window.
pub const RIESZ_THRESHOLD: f64 = 1.0 + 1e-6;

pub fn riesz_diagnostic(table: &FamilyTable, exec: Exec) -> Result<RieszDiagnostic> {
    let labels = table.labels();
    let r: Vec<Result<f64>> = exec.map(labels.len(), |i| {
        let (n, l) = labels[i];
        Ok(norm(table.phi(n, l))? * norm(table.psi(n, l))?)
    });
    let r = r.into_iter().collect::<Result<Vec<f64>>>()?;
    let width = table.lmax + 1;
    let diagonal = (0..=table.nmax.min(table.lmax)).map(|n| r[n * width + n]).collect();
    let sup = r.iter().copied().fold(0.0, f64::max);
    let verdict = if sup <= RIESZ_THRESHOLD { RieszVerdict::RieszCompatible } else { RieszVerdict::NormGrowthDetected };
    Ok(RieszDiagnostic { diagonal, sup, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gll::generate_family;

    #[test]
    fn standard_point_metrics_are_identity() {
        let m = MetricOperators::new(&GllParams::sll()).unwrap();
        for op in [m.t_phi, m.t_psi, m.s_phi, m.s_psi] {
            assert!(op.is_identity(0.0));
        }
    }

    #[test]
    fn metric_multiplier_closed_form() {
        let (k1, k2) = (0.2, -0.3);
        let m = MetricOperators::new(&GllParams::new(k1, k2).unwrap()).unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, -0.5), (-2.0, 1.5)] {
            let want = (-k2 * x * x + k1 * y * y).exp();
            assert!((m.s_phi.eval(x, y) - want).norm() < 1e-14 * want);
            let want = (-k2 * x * x / 2.0 + k1 * y * y / 2.0).exp();
            assert!((m.t_phi.eval(x, y) - want).norm() < 1e-14 * want);
        }
        // S_φ grows along y; S_Ψ = e^{k₂x² − k₁y²} decays here.
        assert!(!m.s_phi.is_bounded());
        assert!(m.s_psi.is_bounded());
    }

    #[test]
    fn nonstandard_couplings_are_rejected() {
        let p = GllParams::with_couplings(
            0.1,
            0.0,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
        )
        .unwrap();
        assert_eq!(MetricOperators::new(&p), Err(Error::UnsupportedCouplings));
    }

    #[test]
    fn riesz_verdicts() {
        let t = generate_family(&GllParams::sll(), 4, 4, Exec::Sequential).unwrap();
        let d = riesz_diagnostic(&t, Exec::Sequential).unwrap();
        assert_eq!(d.verdict, RieszVerdict::RieszCompatible);
        assert!(d.diagonal.iter().all(|r| (r - 1.0).abs() < 1e-12));

        let t = generate_family(&GllParams::new(0.0, 0.3).unwrap(), 4, 4, Exec::Sequential).unwrap();
        let d = riesz_diagnostic(&t, Exec::Sequential).unwrap();
        assert_eq!(d.verdict, RieszVerdict::NormGrowthDetected);
        assert_eq!(d.verdict.to_string(), "norm growth detected");
    }
}
