//! Deterministic quadrature paths: polar shells, intervals, planar polygons
//! by iterated Gauss-Legendre, and a midpoint tensor grid as the fallback.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{Estimate, Integrand};
use crate::bodies::Body;
use crate::corekit::{gauss_legendre, QuadratureRule};
use crate::densities::Density;
use crate::error::Result;

const ORDER: usize = 16;
/// Per-axis cap for the three dimensional midpoint grid.
pub(crate) const GRID_CAP_3D: usize = 128;

fn rule(a: f64, b: f64) -> QuadratureRule<f64> {
    gauss_legendre(ORDER, a, b).expect("valid interval")
}

/// Composite Gauss-Legendre of `f` over `[a, b]` with `panels` pieces.
fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + h * p as f64;
            rule(lo, lo + h).integrate(&mut f)
        })
        .sum()
}

/// Angle subtended inside the disc `|z - c| <= radius` by the circle of
/// radius `r` about the origin, with `d = |c|`.
fn arc_angle(r: f64, d: f64, radius: f64) -> f64 {
    if r + d <= radius {
        return 2.0 * PI;
    }
    if r >= radius + d || r <= d - radius || d == 0.0 {
        return 0.0;
    }
    2.0 * ((r * r + d * d - radius * radius) / (2.0 * r * d)).clamp(-1.0, 1.0).acos()
}

/// Integral of a rotation-invariant planar density over a disc, split at the
/// density's jump radii and at the radii where the arc geometry changes.
/// Each piece uses `r = a + (b - a)(1 - cos s)/2`, which removes the
/// square-root behaviour of the arc at tangency radii.
pub(crate) fn polar(density: &Density, breaks: &[f64], center: &[f64], radius: f64, grid: usize) -> Estimate {
    let d = center.iter().map(|c| c * c).sum::<f64>().sqrt();
    let (r_lo, r_hi) = ((d - radius).max(0.0), d + radius);
    let mut cuts = vec![r_lo, r_hi, (radius - d).abs()];
    cuts.extend(breaks.iter().copied());
    cuts.retain(|c| *c >= r_lo && *c <= r_hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * r_hi.max(1.0));
    let panels = (grid / (2 * ORDER)).max(2);
    let mut total = 0.0;
    let mut nodes = 0u64;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let profile = |r: f64| density.radial_profile(r).unwrap_or(0.0);
        total += composite(0.0, PI, panels, |s| {
            let r = a + (b - a) * 0.5 * (1.0 - s.cos());
            let dr = (b - a) * 0.5 * s.sin();
            profile(r) * r * arc_angle(r, d, radius) * dr
        });
        nodes += (panels * ORDER) as u64;
    }
    Estimate::quadrature(total, nodes)
}

/// `∫_a^b φ` for a one dimensional body.
pub(crate) fn interval(integrand: &Integrand, a: f64, b: f64, grid: usize) -> Estimate {
    let panels = (grid / ORDER).max(4);
    let v = composite(a, b, panels, |x| integrand.eval(&[x]));
    Estimate::quadrature(v, (panels * ORDER) as u64)
}

/// Planar polygons use iterated Gauss-Legendre between vertex abscissae;
/// other bodies use a midpoint grid over the bounding box.
pub(crate) fn tensor(integrand: &Integrand, body: &Body<f64>, lo: &[f64], hi: &[f64], grid: usize) -> Result<Estimate> {
    if body.dim() == 2 {
        if let Some(p) = body.polytope() {
            if let Some(facets) = p.facets() {
                let mut xs: Vec<f64> = p.vertices().iter().map(|v| v[0]).collect();
                xs.sort_by(f64::total_cmp);
                xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
                let panels = (grid / (ORDER * xs.len().max(2))).max(2);
                let chord = |x: f64| {
                    let (mut ylo, mut yhi) = (lo[1], hi[1]);
                    for f in facets {
                        let (a0, a1, b) = (f.normal[0], f.normal[1], f.offset);
                        if a1.abs() > 1e-14 {
                            let y = (b - a0 * x) / a1;
                            if a1 > 0.0 {
                                yhi = yhi.min(y);
                            } else {
                                ylo = ylo.max(y);
                            }
                        }
                    }
                    (ylo, yhi)
                };
                let mut total = 0.0;
                for w in xs.windows(2) {
                    total += composite(w[0], w[1], panels, |x| {
                        let (ylo, yhi) = chord(x);
                        composite(ylo, yhi, panels, |y| integrand.eval(&[x, y]))
                    });
                }
                let nodes = ((xs.len() - 1) * panels * ORDER * panels * ORDER) as u64;
                return Ok(Estimate::quadrature(total, nodes));
            }
        }
    }
    let n = body.dim();
    let m = if n >= 3 { grid.min(GRID_CAP_3D) } else { grid };
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / m as f64).collect();
    let cell: f64 = h.iter().product();
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0.0; n];
            x[0] = lo[0] + (i as f64 + 0.5) * h[0];
            let rest = m.pow(n as u32 - 1);
            let mut s = 0.0;
            for mut idx in 0..rest {
                for k in 1..n {
                    x[k] = lo[k] + ((idx % m) as f64 + 0.5) * h[k];
                    idx /= m;
                }
                if body.contains(&x) {
                    s += integrand.eval(&x);
                }
            }
            s
        })
        .collect();
    Ok(Estimate::quadrature(rows.iter().sum::<f64>() * cell, m.pow(n as u32) as u64))
}
