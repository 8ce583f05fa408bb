//! Gauss-Legendre rules on a finite interval.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub order: usize,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> QuadratureRule<T> {
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `m`-point Gauss-Legendre rule on `[a, b]`, exact for polynomials of degree
/// up to `2m - 1`.
pub fn gauss_legendre<T: Real>(m: usize, a: T, b: T) -> Result<QuadratureRule<T>> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("quadrature limits must be finite".into()));
    }
    if m == 0 {
        return Err(Error::Domain("quadrature order must be at least 1".into()));
    }
    if a >= b {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    // Nodes are found in f64 by Newton's method on the three-term recurrence.
    let mut x = vec![0.0f64; m];
    let mut w = vec![0.0f64; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    let (af, bf) = (a.f64(), b.f64());
    let half = 0.5 * (bf - af);
    let mid = 0.5 * (bf + af);
    Ok(QuadratureRule {
        nodes: x.iter().map(|&t| T::c(mid + half * t)).collect(),
        weights: w.iter().map(|&wi| T::c(half * wi)).collect(),
        order: m,
        lower: a,
        upper: b,
    })
}

/// `(P_m(z), P_m'(z))`.
fn legendre(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
