//! First-order differential operators with affine coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::PolyGauss;
use crate::poly::Poly2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `c0 + cx·x + cy·y + cdx·∂x + cdy·∂y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineOp {
    pub c0: Complex64,
    pub cx: Complex64,
    pub cy: Complex64,
    pub cdx: Complex64,
    pub cdy: Complex64,
}

impl Default for AffineOp {
    fn default() -> Self {
        AffineOp::new(ZERO, ZERO, ZERO, ZERO, ZERO)
    }
}

impl AffineOp {
    pub fn new(c0: Complex64, cx: Complex64, cy: Complex64, cdx: Complex64, cdy: Complex64) -> Self {
        AffineOp { c0, cx, cy, cdx, cdy }
    }

    pub fn constant(c: Complex64) -> Self {
        AffineOp { c0: c, ..Default::default() }
    }

    pub fn identity() -> Self {
        AffineOp::constant(ONE)
    }

    pub fn x() -> Self {
        AffineOp { cx: ONE, ..Default::default() }
    }

    pub fn y() -> Self {
        AffineOp { cy: ONE, ..Default::default() }
    }

    pub fn ddx() -> Self {
        AffineOp { cdx: ONE, ..Default::default() }
    }

    pub fn ddy() -> Self {
        AffineOp { cdy: ONE, ..Default::default() }
    }

    /// `p_x = −i∂x`.
    pub fn px() -> Self {
        AffineOp { cdx: -I, ..Default::default() }
    }

    /// `p_y = −i∂y`.
    pub fn py() -> Self {
        AffineOp { cdy: -I, ..Default::default() }
    }

    /// Multiplication by an affine polynomial `a + b·x + c·y`.
    pub fn multiplication(p: &Poly2) -> Result<Self> {
        if p.total_degree() > 1 {
            return Err(Error::NonAffine(format!("degree {} multiplier", p.total_degree())));
        }
        Ok(AffineOp { c0: p.coeff(0, 0), cx: p.coeff(1, 0), cy: p.coeff(0, 1), ..Default::default() })
    }

    pub fn coefficients(&self) -> [Complex64; 5] {
        [self.c0, self.cx, self.cy, self.cdx, self.cdy]
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Formal adjoint on the Gaussian-dense domain: multiplication parts are
    /// conjugated, derivative parts conjugated and negated.
    pub fn adjoint(&self) -> AffineOp {
        AffineOp {
            c0: self.c0.conj(),
            cx: self.cx.conj(),
            cy: self.cy.conj(),
            cdx: -self.cdx.conj(),
            cdy: -self.cdy.conj(),
        }
    }

    /// Largest coefficient-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &AffineOp) -> f64 {
        (*self - *other).coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &AffineOp, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `L f`, exact.
    pub fn apply(&self, f: &PolyGauss) -> Result<PolyGauss> {
        apply_affine(self, f)
    }

    /// Applies `ops[0]·ops[1]·…·ops[k−1]` to `f` (rightmost acts first).
    pub fn apply_product(ops: &[AffineOp], f: &PolyGauss) -> Result<PolyGauss> {
        ops.iter().rev().try_fold(f.clone(), |acc, op| op.apply(&acc))
    }
}

/// Exact action of an affine operator on a polynomial × Gaussian.
///
/// With `f = p·exp(E)`, `∂x f = (∂x p + p·(lx − 2qxx·x − qxy·y))·exp(E)`; the
/// multiplier parts of `L` are gathered with the exponent's contribution
/// before touching the polynomial so that matched Gaussians annihilate
/// exactly.
pub fn apply_affine(op: &AffineOp, f: &PolyGauss) -> Result<PolyGauss> {
    let e = f.exponent();
    let p = f.coeffs();
    let k0 = op.c0 + op.cdx * e.lx + op.cdy * e.ly;
    let kx = op.cx - op.cdx * e.qxx * 2.0 - op.cdy * e.qxy;
    let ky = op.cy - op.cdx * e.qxy - op.cdy * e.qyy * 2.0;

    let mut out = Poly2::zero();
    for ((m, n), c) in p.terms() {
        if k0 != ZERO {
            out.add_term((m, n), k0 * c);
        }
        if kx != ZERO {
            out.add_term((m + 1, n), kx * c);
        }
        if ky != ZERO {
            out.add_term((m, n + 1), ky * c);
        }
        if m > 0 && op.cdx != ZERO {
            out.add_term((m - 1, n), op.cdx * c * m as f64);
        }
        if n > 0 && op.cdy != ZERO {
            out.add_term((m, n - 1), op.cdy * c * n as f64);
        }
    }
    f.with_coeffs(out)
}

/// `[L1, L2]`, which for affine operators is the scalar
/// `(cdx₁·cx₂ − cx₁·cdx₂) + (cdy₁·cy₂ − cy₁·cdy₂)`.
pub fn commutator_scalar(l1: &AffineOp, l2: &AffineOp) -> Complex64 {
    (l1.cdx * l2.cx - l1.cx * l2.cdx) + (l1.cdy * l2.cy - l1.cy * l2.cdy)
}

/// Sum of the moduli of the products entering [`commutator_scalar`].
pub fn commutator_scale(l1: &AffineOp, l2: &AffineOp) -> f64 {
    (l1.cdx * l2.cx).norm() + (l1.cx * l2.cdx).norm() + (l1.cdy * l2.cy).norm() + (l1.cy * l2.cdy).norm()
}

impl Add for AffineOp {
    type Output = AffineOp;
    fn add(self, r: AffineOp) -> AffineOp {
        AffineOp::new(self.c0 + r.c0, self.cx + r.cx, self.cy + r.cy, self.cdx + r.cdx, self.cdy + r.cdy)
    }
}

impl Sub for AffineOp {
    type Output = AffineOp;
    fn sub(self, r: AffineOp) -> AffineOp {
        self + (-r)
    }
}

impl Neg for AffineOp {
    type Output = AffineOp;
    fn neg(self) -> AffineOp {
        self * Complex64::new(-1.0, 0.0)
    }
}

impl Mul<Complex64> for AffineOp {
    type Output = AffineOp;
    fn mul(self, s: Complex64) -> AffineOp {
        AffineOp::new(self.c0 * s, self.cx * s, self.cy * s, self.cdx * s, self.cdy * s)
    }
}

impl Mul<AffineOp> for Complex64 {
    type Output = AffineOp;
    fn mul(self, op: AffineOp) -> AffineOp {
        op * self
    }
}

/// One expected commutation relation `[ops[left], ops[right]] = expected`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationEntry {
    pub left: usize,
    pub right: usize,
    pub label: String,
    pub expected: Complex64,
    pub computed: Option<Complex64>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CommutationTable {
    pub entries: Vec<CommutationEntry>,
}

impl CommutationTable {
    pub fn push(&mut self, left: usize, right: usize, label: impl Into<String>, expected: Complex64) {
        self.entries.push(CommutationEntry {
            left,
            right,
            label: label.into(),
            expected,
            computed: None,
            residual: None,
        });
    }

    /// Relations of two independent pseudo-bosonic modes for the operator
    /// list `[a1, b1, a2, b2, a1†, b1†, a2†, b2†]`: `[a_j, b_j] = 1` and every
    /// commutator between a mode-1 and a mode-2 operator (daggered or not)
    /// vanishes.
    /// `[o₀,o₁] = [o₂,o₃] = 1` and the four cross-mode pairs vanish.
    pub fn two_mode(names: [&str; 4]) -> CommutationTable {
        let mut t = CommutationTable::default();
        t.push(0, 1, format!("[{},{}]", names[0], names[1]), ONE);
        t.push(2, 3, format!("[{},{}]", names[2], names[3]), ONE);
        for i in [0usize, 1] {
            for j in [2usize, 3] {
                t.push(i, j, format!("[{},{}]", names[i], names[j]), ZERO);
            }
        }
        t
    }

    /// [`two_mode`](Self::two_mode) plus every cross-mode pair involving an
    /// adjoint; expects the eight operators laid out by [`with_adjoints`].
    pub fn two_mode_sharp(names: [&str; 4]) -> CommutationTable {
        let mut t = CommutationTable::two_mode(names);
        let label = |i: usize| {
            if i < 4 {
                names[i].to_string()
            } else {
                format!("{}†", names[i - 4])
            }
        };
        for i in [0usize, 1, 4, 5] {
            for j in [2usize, 3, 6, 7] {
                if i < 4 && j < 4 {
                    continue;
                }
                t.push(i, j, format!("[{},{}]", label(i), label(j)), ZERO);
            }
        }
        t
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().filter_map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|e| e.residual.is_some())
    }
}

/// Fills `computed` and `residual` for every entry. The residual is
/// `|computed − expected|` divided by the cancellation scale when that
/// exceeds one, so it measures rounding rather than coefficient size.
pub fn verify_commutation_table(ops: &[AffineOp], expected: &CommutationTable) -> Result<CommutationTable> {
    let mut out = expected.clone();
    for e in &mut out.entries {
        for index in [e.left, e.right] {
            if index >= ops.len() {
                return Err(Error::IndexOutOfRange { index, len: ops.len() });
            }
        }
        let c = commutator_scalar(&ops[e.left], &ops[e.right]);
        e.computed = Some(c);
        let scale = commutator_scale(&ops[e.left], &ops[e.right]).max(1.0);
        e.residual = Some((c - e.expected).norm() / scale);
    }
    Ok(out)
}

/// `[a1, b1, a2, b2]` extended with their adjoints, in the order expected by
/// [`CommutationTable::two_mode_sharp`].
pub fn with_adjoints(ops: [AffineOp; 4]) -> Vec<AffineOp> {
    let mut v = ops.to_vec();
    v.extend(ops.iter().map(AffineOp::adjoint));
    v
}
