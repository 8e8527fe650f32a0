use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_gll, vacuum_pair, GllOperators, GllParams};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gauss::{norm, PolyGauss};
use crate::poly::Poly2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest ladder index accepted by [`generate_family`].
pub const MAX_FAMILY_INDEX: usize = 24;

/// `φ_{n,l} = B'ⁿBˡφ₀₀/√(n!l!)` and `Ψ_{n,l} = (A'†)ⁿ(A†)ˡΨ₀₀/√(n!l!)`
/// for `n ≤ nmax`, `l ≤ lmax`, indexed `phi[n][l]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyTable {
    pub params: GllParams,
    pub nmax: usize,
    pub lmax: usize,
    pub phi: Vec<Vec<PolyGauss>>,
    pub psi: Vec<Vec<PolyGauss>>,
}

impl FamilyTable {
    pub fn phi(&self, n: usize, l: usize) -> &PolyGauss {
        &self.phi[n][l]
    }

    pub fn psi(&self, n: usize, l: usize) -> &PolyGauss {
        &self.psi[n][l]
    }

    /// Row-major `(n, l)` labels.
    pub fn labels(&self) -> Vec<(usize, usize)> {
        (0..=self.nmax).flat_map(|n| (0..=self.lmax).map(move |l| (n, l))).collect()
    }

    pub fn operators(&self) -> GllOperators {
        build_gll(&self.params).expect("table parameters were validated")
    }
}

/// Builds one ladder: `out[0] = start`, `out[j] = raise(out[j−1])/√j`.
fn ladder(start: PolyGauss, len: usize, raise: &crate::AffineOp) -> Result<Vec<PolyGauss>> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(start);
    for j in 1..=len {
        let next = raise.apply(&out[j - 1])?.scale(((j as f64).sqrt()).recip().into());
        out.push(next);
    }
    Ok(out)
}

fn build_grid(
    start: PolyGauss,
    first: &crate::AffineOp,
    second: &crate::AffineOp,
    nmax: usize,
    lmax: usize,
    exec: Exec,
) -> Result<Vec<Vec<PolyGauss>>> {
    // Row n = 0 via the second-index raiser, then each column l in parallel
    // via the first-index raiser.
    let row0 = ladder(start, lmax, second)?;
    let columns: Vec<Result<Vec<PolyGauss>>> = exec.map(lmax + 1, |l| ladder(row0[l].clone(), nmax, first));
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..=nmax).map(|n| (0..=lmax).map(|l| columns[l][n].clone()).collect()).collect())
}

pub fn generate_family(params: &GllParams, nmax: usize, lmax: usize, exec: Exec) -> Result<FamilyTable> {
    let worst = nmax.max(lmax);
    if worst > MAX_FAMILY_INDEX {
        return Err(Error::DegreeCapExceeded { degree: worst as u32, cap: MAX_FAMILY_INDEX as u32 });
    }
    let ops = build_gll(params)?;
    let (phi00, psi00) = vacuum_pair(params)?;
    let phi = build_grid(phi00, &ops.bp, &ops.b, nmax, lmax, exec)?;
    let psi = build_grid(psi00, &ops.ap.adjoint(), &ops.a.adjoint(), nmax, lmax, exec)?;
    Ok(FamilyTable { params: *params, nmax, lmax, phi, psi })
}

/// `G[(n,l),(m,k)] = ⟨Ψ_{n,l}, φ_{m,k}⟩`, row-major over [`FamilyTable::labels`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub labels: Vec<(usize, usize)>,
    pub data: Vec<Complex64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    /// `max |G − I|`.
    pub fn max_kronecker_residual(&self) -> f64 {
        let d = self.dim();
        (0..d * d)
            .map(|i| {
                let want = if i / d == i % d { 1.0 } else { 0.0 };
                (self.data[i] - want).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `"n.l"` labels as used in CSV exports.
    pub fn label_strings(&self) -> Vec<String> {
        self.labels.iter().map(|(n, l)| format!("{n}.{l}")).collect()
    }

    /// Header row and column of `"n.l"` labels, cells as `re+imj`.
    pub fn to_csv(&self) -> String {
        let labels = self.label_strings();
        let mut out = String::new();
        out.push(',');
        out.push_str(&labels.join(","));
        out.push('\n');
        for (r, label) in labels.iter().enumerate() {
            out.push_str(label);
            for c in 0..self.dim() {
                let v = self.get(r, c);
                out.push(',');
                out.push_str(&format!("{:.16e}{:+.16e}j", v.re, v.im));
            }
            out.push('\n');
        }
        out
    }
}

fn gram(rows: &[&PolyGauss], cols: &[&PolyGauss], exec: Exec) -> Result<Vec<Complex64>> {
    let d = cols.len();
    let cells: Vec<Result<Complex64>> = exec.map(rows.len() * d, |i| rows[i / d].inner(cols[i % d]));
    cells.into_iter().collect()
}

/// Full Gram matrix between the Ψ and φ families.
pub fn biorthogonality_matrix(table: &FamilyTable, exec: Exec) -> Result<GramMatrix> {
    let labels = table.labels();
    let psi: Vec<&PolyGauss> = labels.iter().map(|&(n, l)| table.psi(n, l)).collect();
    let phi: Vec<&PolyGauss> = labels.iter().map(|&(n, l)| table.phi(n, l)).collect();
    Ok(GramMatrix { data: gram(&psi, &phi, exec)?, labels })
}

/// `⟨φ_{n,l}, φ_{m,k}⟩`, used to check orthonormality at the standard point.
pub fn phi_gram_matrix(table: &FamilyTable, exec: Exec) -> Result<GramMatrix> {
    let labels = table.labels();
    let phi: Vec<&PolyGauss> = labels.iter().map(|&(n, l)| table.phi(n, l)).collect();
    Ok(GramMatrix { data: gram(&phi, &phi, exec)?, labels })
}

/// Eigenvalue residuals `‖h'φ − (n−½)φ‖`, `‖hφ − (l−½)φ‖`,
/// `‖h'†Ψ − (n−½)Ψ‖`, `‖h†Ψ − (l−½)Ψ‖`, each divided by the norm of the
/// eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub n: usize,
    pub l: usize,
    pub h_prime: f64,
    pub h: f64,
    pub h_prime_dag: f64,
    pub h_dag: f64,
}

impl EigenEntry {
    pub fn max(&self) -> f64 {
        self.h_prime.max(self.h).max(self.h_prime_dag).max(self.h_dag)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResiduals {
    pub entries: Vec<EigenEntry>,
}

impl EigenResiduals {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(EigenEntry::max).fold(0.0, f64::max)
    }
}

fn eigen_residual(apply: impl Fn(&PolyGauss) -> Result<PolyGauss>, v: &PolyGauss, eigenvalue: f64) -> Result<f64> {
    let hv = apply(v)?;
    let r = hv.sub(&v.scale(eigenvalue.into()))?;
    Ok(norm(&r)? / norm(v)?)
}

pub fn eigen_residuals(table: &FamilyTable, exec: Exec) -> Result<EigenResiduals> {
    let ops = table.operators();
    let labels = table.labels();
    let entries: Vec<Result<EigenEntry>> = exec.map(labels.len(), |i| {
        let (n, l) = labels[i];
        let (phi, psi) = (table.phi(n, l), table.psi(n, l));
        let en = n as f64 - 0.5;
        let el = l as f64 - 0.5;
        Ok(EigenEntry {
            n,
            l,
            h_prime: eigen_residual(|f| ops.h_prime(f), phi, en)?,
            h: eigen_residual(|f| ops.h(f), phi, el)?,
            h_prime_dag: eigen_residual(|f| ops.h_prime_dag(f), psi, en)?,
            h_dag: eigen_residual(|f| ops.h_dag(f), psi, el)?,
        })
    });
    Ok(EigenResiduals { entries: entries.into_iter().collect::<Result<_>>()? })
}

fn inv_sqrt_factorial(n: usize) -> f64 {
    (1..=n).map(|j| (j as f64).sqrt().recip()).product()
}

fn w_plus() -> Poly2 {
    &Poly2::x() + &Poly2::y().scale(I)
}

fn w_minus() -> Poly2 {
    &Poly2::x() - &Poly2::y().scale(I)
}

/// `φ_{n,0} = γ'ⁿ/√n!·(x+iy)ⁿ·φ₀₀`.
pub fn closed_form_phi_n0(params: &GllParams, n: usize) -> Result<PolyGauss> {
    let (phi00, _) = vacuum_pair(params)?;
    let c = params.gammap.powu(n as u32) * inv_sqrt_factorial(n);
    phi00.mul_poly(&w_plus().pow(n as u32).scale(c))
}

/// `φ_{0,l} = (iγ)ˡ/√l!·(x−iy)ˡ·φ₀₀`.
pub fn closed_form_phi_0l(params: &GllParams, l: usize) -> Result<PolyGauss> {
    let (phi00, _) = vacuum_pair(params)?;
    let c = (I * params.gamma).powu(l as u32) * inv_sqrt_factorial(l);
    phi00.mul_poly(&w_minus().pow(l as u32).scale(c))
}

/// `Ψ_{n,0} = conj(α')ⁿ/√n!·(x+iy)ⁿ·Ψ₀₀`.
pub fn closed_form_psi_n0(params: &GllParams, n: usize) -> Result<PolyGauss> {
    let (_, psi00) = vacuum_pair(params)?;
    let c = params.alphap.conj().powu(n as u32) * inv_sqrt_factorial(n);
    psi00.mul_poly(&w_plus().pow(n as u32).scale(c))
}

/// `Ψ_{0,l} = (i·conj(α))ˡ/√l!·(x−iy)ˡ·Ψ₀₀`.
pub fn closed_form_psi_0l(params: &GllParams, l: usize) -> Result<PolyGauss> {
    let (_, psi00) = vacuum_pair(params)?;
    let c = (I * params.alpha.conj()).powu(l as u32) * inv_sqrt_factorial(l);
    psi00.mul_poly(&w_minus().pow(l as u32).scale(c))
}

/// Rewrites a polynomial in `x, y` as a polynomial in `w = x + iy`,
/// `w̄ = x − iy` (stored with `w` as the first variable).
fn to_w_basis(p: &Poly2) -> Poly2 {
    let half = Complex64::new(0.5, 0.0);
    let x = Poly2::from_terms([((1, 0), half), ((0, 1), half)]);
    let y = Poly2::from_terms([((1, 0), -I * 0.5), ((0, 1), I * 0.5)]);
    let mut out = Poly2::zero();
    for ((m, n), c) in p.terms() {
        let t = (&x.pow(m) * &y.pow(n)).scale(c);
        out = &out + &t;
    }
    out
}

/// Coefficients keyed by `(n, l)`.
pub type Expansion = BTreeMap<(usize, usize), Complex64>;

/// Expresses `p(x, y)·φ₀₀` as a finite combination `Σ c_{i,j} φ_{i,j}`.
///
/// The top-degree part of `φ_{i,j}` is a multiple of `wⁱw̄ʲ`, so the
/// coefficients follow from a triangular sweep from the highest degree down.
/// Returns the coefficients and the largest coefficient of what is left over,
/// which is zero up to rounding when the expansion is exact.
pub fn expand_in_family(table: &FamilyTable, p: &Poly2) -> Result<(Expansion, f64)> {
    let degree = p.total_degree() as usize;
    if degree > table.nmax || degree > table.lmax {
        return Err(Error::TruncationTooLarge { requested: degree, available: table.nmax.min(table.lmax) });
    }
    let phi00 = table.phi(0, 0);
    let mut rest = phi00.mul_poly(p)?;
    let mut coeffs = BTreeMap::new();
    for d in (0..=degree as u32).rev() {
        let top = to_w_basis(&rest.coeffs().homogeneous_part(d));
        for i in 0..=d {
            let j = d - i;
            let want = top.coeff(i, j);
            if want == Complex64::new(0.0, 0.0) {
                continue;
            }
            let basis = table.phi(i as usize, j as usize);
            let lead = to_w_basis(&basis.coeffs().homogeneous_part(d)).coeff(i, j);
            let c = want / lead;
            rest = rest.sub(&basis.scale(c))?;
            *coeffs.entry((i as usize, j as usize)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    Ok((coeffs, rest.coeffs().max_abs()))
}
