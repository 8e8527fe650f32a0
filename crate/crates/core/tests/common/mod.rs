//! Shared helpers for integration tests: an adaptive Gauss–Kronrod oracle for
//! `∫∫ conj(f)·g dx dy` that only uses point evaluation, and random inputs.

#![allow(dead_code, clippy::excessive_precision)]

use pseudoboson::{c64, Complex64, Poly2, PolyGauss, QuadExponent};
use rand::Rng;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate and its embedded 7-point Gauss estimate.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, Complex64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let (f1, f2) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    (k * h, g * h)
}

fn adapt<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (Complex64, Complex64),
    tol: f64,
    depth: u32,
) -> Complex64 {
    let (k, g) = whole;
    if (k - g).norm() <= tol * (b - a) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    adapt(f, a, m, left, tol, depth - 1) + adapt(f, m, b, right, tol, depth - 1)
}

/// `∫_{−∞}^{∞} h(x) dx` via `x = t/(1 − t²)` and adaptive GK15 in `t`, with
/// the error target `rel` times the total absolute mass of a first pass.
pub fn integrate_line<F: Fn(f64) -> Complex64>(h: F, rel: f64) -> Complex64 {
    let g = |t: f64| {
        let s = 1.0 - t * t;
        let v = h(t / s);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * ((1.0 + t * t) / (s * s))
        }
    };
    let panels = 16;
    let edges: Vec<f64> = (0..=panels).map(|i| -1.0 + 2.0 * i as f64 / panels as f64).collect();
    let first: Vec<_> = edges.windows(2).map(|w| gk15(&g, w[0], w[1])).collect();
    let mass: f64 = first.iter().map(|(k, _)| k.norm()).sum();
    if mass == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let tol = rel * mass / 2.0;
    edges.windows(2).zip(first).map(|(w, est)| adapt(&g, w[0], w[1], est, tol, 20)).sum()
}

/// `⟨f, g⟩ = ∫∫ conj(f)·g` by nested adaptive quadrature.
pub fn oracle_inner(f: &PolyGauss, g: &PolyGauss) -> Complex64 {
    let rel = 1e-11;
    integrate_line(|x| integrate_line(|y| f.eval(x, y).conj() * g.eval(x, y), rel), rel)
}

/// A random integrable exponent: real part diagonally dominant, arbitrary
/// imaginary parts, moderate linear and constant terms.
pub fn random_exponent<R: Rng>(rng: &mut R) -> QuadExponent {
    let qxx: f64 = rng.gen_range(0.3..1.5);
    let qyy = rng.gen_range(0.3..1.5);
    let qxy = rng.gen_range(-1.0..1.0) * (qxx * qyy).sqrt();
    let mut im = || rng.gen_range(-1.0..1.0);
    let q = [im(), im(), im(), im(), im(), im(), im(), im(), im()];
    QuadExponent::new(
        c64(qxx, q[0]),
        c64(qyy, q[1]),
        c64(qxy, q[2]),
        c64(q[3], q[4]),
        c64(q[5], q[6]),
        c64(0.3 * q[7], q[8]),
    )
}

pub fn random_poly<R: Rng>(rng: &mut R, degree: u32) -> Poly2 {
    let mut p = Poly2::zero();
    for i in 0..=degree {
        for j in 0..=degree - i {
            p.add_term((i, j), c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    p
}

pub fn random_function<R: Rng>(rng: &mut R, degree: u32) -> PolyGauss {
    let e = random_exponent(rng);
    PolyGauss::new(random_poly(rng, degree), e).expect("random function")
}
