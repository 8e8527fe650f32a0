//! Gauss–Hermite rules and the 4-D tensor grid used for the `(z, z′)` plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Exec};

/// Minimum nodes per axis accepted by [`QuadratureGrid4D`].
pub const MIN_NODES: usize = 8;
/// Upper bound keeping the `e^{t²}` weight factors finite.
pub const MAX_NODES: usize = 128;

/// Nodes `t_i` and weights `w_i` of the `n`-point rule for `∫ e^{−t²} f(t) dt`,
/// nodes in increasing order.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidParams(format!("Gauss-Hermite order must be in 1..={MAX_NODES}, got {n}")));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let half = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..half {
        // Standard asymptotic starting guesses, largest root first.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut dp = 0.0;
        for _ in 0..100 {
            // Orthonormal Hermite recurrence.
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            dp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (dp * dp);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[half - 1] = 0.0;
    }
    nodes.reverse();
    weights.reverse();
    Ok((nodes, weights))
}

/// Tensor Gauss–Hermite grid over `(Re z, Im z, Re z′, Im z′)`, rescaled so
/// that `∫ F ≈ Σ W_i F(s·t_i)` with `W_i = Π_axes w·e^{t²}·s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid4D {
    pub nodes: usize,
    pub scale: f64,
    #[serde(skip)]
    axis: Vec<(f64, f64)>,
}

impl QuadratureGrid4D {
    pub fn new(nodes: usize, scale: f64) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidParams(format!("at least {MIN_NODES} nodes per axis required, got {nodes}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParams(format!("scale must be positive, got {scale}")));
        }
        let (t, w) = gauss_hermite(nodes)?;
        let axis = t.iter().zip(&w).map(|(&t, &w)| (scale * t, w * (t * t).exp() * scale)).collect();
        Ok(QuadratureGrid4D { nodes, scale, axis })
    }

    pub fn total_nodes(&self) -> usize {
        self.nodes.pow(4)
    }

    /// The `(node, weight)` pairs of one rescaled axis.
    pub fn axis(&self) -> &[(f64, f64)] {
        &self.axis
    }

    /// `(z, z′, W)` for flat index `i`, last axis fastest.
    pub fn point(&self, i: usize) -> (Complex64, Complex64, f64) {
        let n = self.nodes;
        let (a, b, c, d) = (i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n);
        let (x0, w0) = self.axis[a];
        let (x1, w1) = self.axis[b];
        let (x2, w2) = self.axis[c];
        let (x3, w3) = self.axis[d];
        (Complex64::new(x0, x1), Complex64::new(x2, x3), w0 * w1 * w2 * w3)
    }

    /// `∫ F(z, z′) d²z d²z′`, evaluated node by node and summed pairwise.
    pub fn integrate<F>(&self, f: F, exec: Exec) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64) -> Result<Complex64> + Sync + Send,
    {
        let values = exec.map(self.total_nodes(), |i| {
            let (z, zp, w) = self.point(i);
            f(z, zp).map(|v| v * w)
        });
        let values = values.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules() {
        let (t, w) = gauss_hermite(2).unwrap();
        assert!((t[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - PI.sqrt() / 2.0).abs() < 1e-15);
        let (t, w) = gauss_hermite(3).unwrap();
        assert_eq!(t[1], 0.0);
        assert!((t[2] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 2.0 * PI.sqrt() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn moments_are_exact() {
        // ∫ e^{−t²} t^{2k} = Γ(k + ½)
        for n in [8, 16, 24, 40] {
            let (t, w) = gauss_hermite(n).unwrap();
            assert!(t.windows(2).all(|p| p[0] < p[1]));
            let mut gamma = PI.sqrt();
            for k in 0..n {
                let m: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(2 * k as i32)).sum();
                assert!((m - gamma).abs() < 1e-12 * gamma, "n={n} k={k}: {m} vs {gamma}");
                gamma *= k as f64 + 0.5;
            }
        }
    }

    #[test]
    fn grid_integrates_gaussian_weight() {
        let gauss = |z: Complex64, zp: Complex64| Ok(Complex64::new((-z.norm_sqr() - zp.norm_sqr()).exp(), 0.0));
        let g = QuadratureGrid4D::new(8, 1.0).unwrap();
        assert_eq!(g.total_nodes(), 4096);
        assert!((g.integrate(gauss, Exec::Sequential).unwrap().re - PI * PI).abs() < 1e-12);
        // A mismatched scale is no longer exact but still converges.
        let g = QuadratureGrid4D::new(24, 0.9).unwrap();
        assert!((g.integrate(gauss, Exec::Parallel).unwrap().re - PI * PI).abs() < 1e-8);
        let g = QuadratureGrid4D::new(8, 0.9).unwrap();
        let seq = g.integrate(|z, zp| Ok(z * zp.conj() * (-(z.norm_sqr() + zp.norm_sqr())).exp()), Exec::Sequential);
        let par = g.integrate(|z, zp| Ok(z * zp.conj() * (-(z.norm_sqr() + zp.norm_sqr())).exp()), Exec::Parallel);
        assert_eq!(seq.unwrap(), par.unwrap());
    }

    #[test]
    fn rejects_coarse_or_bad_grids() {
        assert!(QuadratureGrid4D::new(7, 1.0).is_err());
        assert!(QuadratureGrid4D::new(8, 0.0).is_err());
        assert!(gauss_hermite(0).is_err());
    }
}
