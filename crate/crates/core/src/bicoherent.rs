//! Bicoherent states of the generalized Landau levels.
//!
//! The closed-form pair `(φ̃, Ψ̃)` solves `Aφ̃ = zφ̃`, `A'φ̃ = z'φ̃`,
//! `B†Ψ̃ = zΨ̃`, `B'†Ψ̃ = z'Ψ̃` and is normalized by `⟨Ψ̃, φ̃⟩ = 1`. Both
//! are single Gaussians sharing the vacuum quadratic forms, with linear terms
//! `(z'+iz)x/√2 + (z+iz')y/√2`. The truncated series states built from the
//! biorthogonal families are provided alongside, so the two constructions can
//! be compared numerically.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::affine::AffineOp;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gauss::{inner_product, norm, PolyGauss};
use crate::gll::{build_gll, FamilyTable, GllParams};
use crate::quadrature::{QuadratureGrid4D, MIN_NODES};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicoherentPair {
    pub params: GllParams,
    pub z: Complex64,
    pub zp: Complex64,
    pub phi_t: PolyGauss,
    pub psi_t: PolyGauss,
}

/// Residuals of the four eigenvalue equations, relative to the eigenvector
/// norm, plus the mutual overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicoherentCheck {
    pub a_phi: f64,
    pub ap_phi: f64,
    pub b_dag_psi: f64,
    pub bp_dag_psi: f64,
    pub overlap: Complex64,
}

impl BicoherentCheck {
    pub fn max_eigen_residual(&self) -> f64 {
        self.a_phi.max(self.ap_phi).max(self.b_dag_psi).max(self.bp_dag_psi)
    }
}

fn check_labels(z: Complex64, zp: Complex64) -> Result<()> {
    if !(z.is_finite() && zp.is_finite()) {
        return Err(Error::InvalidParams("eigenvalues must be finite".into()));
    }
    Ok(())
}

/// `(z'+iz)/√2`, `(z+iz')/√2`: the linear exponent terms shared by φ̃ and Ψ̃.
fn linear_terms(z: Complex64, zp: Complex64) -> (Complex64, Complex64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((zp + I * z) * s, (z + I * zp) * s)
}

/// `ln N_A = ln N_B = −½ ln 2π − ½|z − i·conj(z')|²`.
fn log_normalization(z: Complex64, zp: Complex64) -> f64 {
    -0.5 * (2.0 * PI).ln() - 0.5 * (z - I * zp.conj()).norm_sqr()
}

pub fn bicoherent_pair(params: &GllParams, z: Complex64, zp: Complex64) -> Result<BicoherentPair> {
    params.validate()?;
    if !params.has_standard_couplings() {
        return Err(Error::UnsupportedCouplings);
    }
    check_labels(z, zp)?;
    let (lx, ly) = linear_terms(z, zp);
    let c = Complex64::new(log_normalization(z, zp), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let phi_t = PolyGauss::gaussian(params.phi_exponent().with_linear(lx, ly).with_constant(c), one)?;
    let psi_t = PolyGauss::gaussian(params.psi_exponent().with_linear(lx, ly).with_constant(c), one)?;
    Ok(BicoherentPair { params: *params, z, zp, phi_t, psi_t })
}

fn eigen_residual(op: &AffineOp, v: &PolyGauss, eigenvalue: Complex64) -> Result<f64> {
    let r = op.apply(v)?.sub(&v.scale(eigenvalue))?;
    Ok(norm(&r)? / norm(v)?)
}

impl BicoherentPair {
    pub fn check(&self) -> Result<BicoherentCheck> {
        let ops = build_gll(&self.params)?;
        Ok(BicoherentCheck {
            a_phi: eigen_residual(&ops.a, &self.phi_t, self.z)?,
            ap_phi: eigen_residual(&ops.ap, &self.phi_t, self.zp)?,
            b_dag_psi: eigen_residual(&ops.b.adjoint(), &self.psi_t, self.z)?,
            bp_dag_psi: eigen_residual(&ops.bp.adjoint(), &self.psi_t, self.zp)?,
            overlap: inner_product(&self.psi_t, &self.phi_t)?,
        })
    }
}

fn check_truncation(table: &FamilyTable, n: usize) -> Result<()> {
    let available = table.nmax.min(table.lmax);
    if n > available {
        return Err(Error::TruncationTooLarge { requested: n, available });
    }
    Ok(())
}

/// `Σ_{n,l ≤ N} c_n(z₁)c_l(z₂)·v_{n,l}` with `c_n(z) = e^{−|z|²/2}zⁿ/√n!`.
fn series(
    table: &FamilyTable,
    pick: impl Fn(usize, usize) -> PolyGauss,
    z1: Complex64,
    z2: Complex64,
    n: usize,
) -> Result<PolyGauss> {
    check_truncation(table, n)?;
    let weights = |z: Complex64| {
        let mut w = Vec::with_capacity(n + 1);
        let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
        for j in 0..=n {
            if j > 0 {
                c = c * z / (j as f64).sqrt();
            }
            w.push(c);
        }
        w
    };
    let (w1, w2) = (weights(z1), weights(z2));
    let mut acc = PolyGauss::zero(*pick(0, 0).exponent());
    for (i, a) in w1.iter().enumerate() {
        for (j, b) in w2.iter().enumerate() {
            acc = acc.axpby(Complex64::new(1.0, 0.0), &pick(i, j), a * b)?;
        }
    }
    Ok(acc)
}

/// Truncated `e^{−(|z₁|²+|z₂|²)/2} Σ z₁ⁿz₂ˡ/√(n!l!)·φ_{n,l}`.
pub fn series_coherent(table: &FamilyTable, z1: Complex64, z2: Complex64, n: usize) -> Result<PolyGauss> {
    series(table, |i, j| table.phi(i, j).clone(), z1, z2, n)
}

/// The Ψ-family counterpart of [`series_coherent`].
pub fn series_coherent_psi(table: &FamilyTable, z1: Complex64, z2: Complex64, n: usize) -> Result<PolyGauss> {
    series(table, |i, j| table.psi(i, j).clone(), z1, z2, n)
}

/// `max(‖A's − z₁s‖, ‖As − z₂s‖)/‖s‖` for the truncated series state `s`.
pub fn series_eigen_residual(table: &FamilyTable, z1: Complex64, z2: Complex64, n: usize) -> Result<f64> {
    let s = series_coherent(table, z1, z2, n)?;
    let ops = table.operators();
    Ok(eigen_residual(&ops.ap, &s, z1)?.max(eigen_residual(&ops.a, &s, z2)?))
}

/// Which series label carries which closed-form eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mapping {
    /// `z₁ = z'`, `z₂ = z`: the first index is raised by `B'`, whose partner
    /// `A'` has eigenvalue `z'`.
    Natural,
    /// `z₁ = z`, `z₂ = z'`.
    Swapped,
}

impl Mapping {
    pub const ALL: [Mapping; 2] = [Mapping::Natural, Mapping::Swapped];

    pub fn labels(self, z: Complex64, zp: Complex64) -> (Complex64, Complex64) {
        match self {
            Mapping::Natural => (zp, z),
            Mapping::Swapped => (z, zp),
        }
    }
}

/// Distances between a series state `s` and the closed form `φ̃`:
/// `‖s − φ̃‖`, `min_θ ‖s − e^{iθ}φ̃‖`, and `sin∠(s, φ̃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub mapping: Mapping,
    pub raw: f64,
    pub phase_aligned: f64,
    pub projective: f64,
}

pub fn series_vs_closed(
    table: &FamilyTable,
    z: Complex64,
    zp: Complex64,
    n: usize,
    mapping: Mapping,
) -> Result<SeriesComparison> {
    let closed = bicoherent_pair(&table.params, z, zp)?.phi_t;
    let (z1, z2) = mapping.labels(z, zp);
    let s = series_coherent(table, z1, z2, n)?;
    let ss = inner_product(&s, &s)?.re;
    let cc = inner_product(&closed, &closed)?.re;
    let sc = inner_product(&s, &closed)?;
    let raw = (ss + cc - 2.0 * sc.re).max(0.0).sqrt();
    let phase_aligned = (ss + cc - 2.0 * sc.norm()).max(0.0).sqrt();
    let projective = if ss > 0.0 && cc > 0.0 { (1.0 - sc.norm_sqr() / (ss * cc)).max(0.0).sqrt() } else { 1.0 };
    Ok(SeriesComparison { mapping, raw, phase_aligned, projective })
}

/// Result of the weak resolution-of-identity quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoiResult {
    pub nodes: usize,
    pub scale: f64,
    pub value: Complex64,
    pub target: Complex64,
    pub abs_err: f64,
    /// Nodes of the comparison grid used for the refinement check.
    pub reference_nodes: usize,
    /// `|I(nodes) − I(reference_nodes)|`.
    pub refinement_delta: f64,
}

impl RoiResult {
    pub fn within(&self, tol: f64) -> bool {
        self.abs_err <= tol * (1.0 + self.target.norm())
    }
}

/// `(1/π²)∫ ⟨f, φ̃(z,z')⟩⟨Ψ̃(z,z'), g⟩ d²z d²z'` on a single grid.
pub fn roi_value(
    params: &GllParams,
    f: &PolyGauss,
    g: &PolyGauss,
    grid: &QuadratureGrid4D,
    exec: Exec,
) -> Result<Complex64> {
    params.validate()?;
    if !params.has_standard_couplings() {
        return Err(Error::UnsupportedCouplings);
    }
    if !(f.is_integrable() && g.is_integrable()) {
        return Err(Error::NotIntegrable);
    }
    let v = grid.integrate(
        |z, zp| {
            let pair = bicoherent_pair(params, z, zp)?;
            Ok(inner_product(f, &pair.phi_t)? * inner_product(&pair.psi_t, g)?)
        },
        exec,
    )?;
    Ok(v / (PI * PI))
}

fn reference_nodes(nodes: usize) -> usize {
    if nodes >= MIN_NODES + 4 {
        nodes - 4
    } else {
        nodes + 4
    }
}

/// Evaluates the weak identity on `grid` and on a grid four nodes coarser
/// (finer when already at the minimum). Fails with `GridTooCoarse` when the
/// two differ by more than `10·tol·(1 + |I|)`.
pub fn weak_resolution_identity(
    params: &GllParams,
    f: &PolyGauss,
    g: &PolyGauss,
    grid: &QuadratureGrid4D,
    tol: f64,
    exec: Exec,
) -> Result<RoiResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    let value = roi_value(params, f, g, grid, exec)?;
    let reference = QuadratureGrid4D::new(reference_nodes(grid.nodes), grid.scale)?;
    let coarse = roi_value(params, f, g, &reference, exec)?;
    let delta = (value - coarse).norm();
    let limit = 10.0 * tol * (1.0 + value.norm());
    if delta > limit {
        return Err(Error::GridTooCoarse { delta, limit });
    }
    let target = inner_product(f, g)?;
    Ok(RoiResult {
        nodes: grid.nodes,
        scale: grid.scale,
        value,
        target,
        abs_err: (value - target).norm(),
        reference_nodes: reference.nodes,
        refinement_delta: delta,
    })
}

/// The weak identity with truncated series states in place of the closed
/// form. The pairings `⟨f, φ_{n,l}⟩` and `⟨Ψ_{n,l}, g⟩` are computed once, so
/// each node only evaluates two polynomials in `(z₁, z₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRoiProbe {
    pub truncation: usize,
    pub nodes: usize,
    pub value: Complex64,
    pub target: Complex64,
    /// `Σ_{n,l ≤ N} ⟨f, φ_{n,l}⟩⟨Ψ_{n,l}, g⟩`, the exact value of the
    /// truncated integral.
    pub truncated_sum: Complex64,
    pub abs_err: f64,
}

pub fn series_roi_probe(
    table: &FamilyTable,
    f: &PolyGauss,
    g: &PolyGauss,
    n: usize,
    grid: &QuadratureGrid4D,
    exec: Exec,
) -> Result<SeriesRoiProbe> {
    check_truncation(table, n)?;
    let mut c = vec![Complex64::new(0.0, 0.0); (n + 1) * (n + 1)];
    let mut d = c.clone();
    let mut truncated_sum = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let scale = (1..=i).chain(1..=j).map(|k| (k as f64).sqrt().recip()).product::<f64>();
            let cij = inner_product(f, table.phi(i, j))?;
            let dij = inner_product(table.psi(i, j), g)?;
            truncated_sum += cij * dij;
            c[i * (n + 1) + j] = cij * scale;
            d[i * (n + 1) + j] = dij * scale;
        }
    }
    let powers = |z: Complex64| {
        let mut p = vec![Complex64::new(1.0, 0.0); n + 1];
        for k in 1..=n {
            p[k] = p[k - 1] * z;
        }
        p
    };
    let v = grid.integrate(
        |z, zp| {
            let (z1, z2) = Mapping::Natural.labels(z, zp);
            let (p1, p2) = (powers(z1), powers(z2));
            let mut left = Complex64::new(0.0, 0.0);
            let mut right = Complex64::new(0.0, 0.0);
            for i in 0..=n {
                for j in 0..=n {
                    let m = p1[i] * p2[j];
                    left += c[i * (n + 1) + j] * m;
                    right += d[i * (n + 1) + j] * m.conj();
                }
            }
            let damp = (-(z1.norm_sqr() + z2.norm_sqr())).exp();
            Ok(left * right * damp)
        },
        exec,
    )?;
    let value = v / (PI * PI);
    let target = inner_product(f, g)?;
    Ok(SeriesRoiProbe {
        truncation: n,
        nodes: grid.nodes,
        value,
        target,
        truncated_sum,
        abs_err: (value - target).norm(),
    })
}
