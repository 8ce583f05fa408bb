//! Translated averages, searches over translates, and θ-integrals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::PointCloud;
use super::{measure, quad, volume, Estimate, IntegrateConfig};
use crate::bodies::{Body, Form};
use crate::corekit::rng::mix;
use crate::corekit::{gauss_legendre, RandomStream};
use crate::densities::Density;
use crate::error::{Error, Result};

const CLOUD_A: u64 = 0x5a17_0001;
const CLOUD_B: u64 = 0x5a17_0002;
const CLOUD_FINAL: u64 = 0x5a17_0003;
const VOLUME: u64 = 0x5a17_0004;

fn sub(cfg: &IntegrateConfig, tag: u64) -> IntegrateConfig {
    cfg.stream(mix(cfg.stream ^ mix(tag)))
}

fn stream(cfg: &IntegrateConfig, tag: u64) -> RandomStream {
    cfg.rng().substream(tag)
}

/// `∫_K μ(x + L) dx = vol(K) vol(L) E[φ(x + w)]` with `x, w` uniform in
/// `K, L`.
pub fn pair_average(density: &Density, k: &Body<f64>, l: &Body<f64>, cfg: &IntegrateConfig) -> Result<Estimate> {
    cfg.validate()?;
    let vk = volume(k, &sub(cfg, VOLUME))?;
    let vl = volume(l, &sub(cfg, VOLUME + 1))?;
    if density.is_lebesgue() {
        return Ok(vk.mul(vl));
    }
    if vk.value == 0.0 || vl.value == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let xs = PointCloud::sample(k, cfg.n_samples, &stream(cfg, CLOUD_A))?;
    let ws = PointCloud::sample(l, cfg.n_samples, &stream(cfg, CLOUD_B))?;
    let (mean, se) = xs.pair_mean(&ws, |x, w| with_buf(x.len(), |z| {
        z.iter_mut().zip(x.iter().zip(w)).for_each(|(o, (a, b))| *o = a + b);
        density.eval(z)
    }));
    Ok(vk.mul(vl).mul(Estimate::mc(mean, se, cfg.n_samples as u64)))
}

/// `(1/vol K) ∫_K μ(K - y) dy = vol(K) E[φ(z - y)]`, `y, z` uniform in `K`.
pub fn translated_average(density: &Density, k: &Body<f64>, cfg: &IntegrateConfig) -> Result<Estimate> {
    cfg.validate()?;
    let vk = volume(k, &sub(cfg, VOLUME))?;
    if density.is_lebesgue() || vk.value == 0.0 {
        return Ok(vk);
    }
    let ys = PointCloud::sample(k, cfg.n_samples, &stream(cfg, CLOUD_A))?;
    let zs = PointCloud::sample(k, cfg.n_samples, &stream(cfg, CLOUD_B))?;
    let (mean, se) = ys.pair_mean(&zs, |y, z| with_buf(y.len(), |d| {
        d.iter_mut().zip(z.iter().zip(y)).for_each(|(o, (a, b))| *o = a - b);
        density.eval(d)
    }));
    Ok(vk.mul(Estimate::mc(mean, se, cfg.n_samples as u64)))
}

/// Box of translation vectors to search, optionally restricted to a body.
#[derive(Clone, Debug)]
pub struct SearchRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub within: Option<Body<f64>>,
}

impl SearchRegion {
    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        SearchRegion { lo, hi, within: None }
    }

    /// Translates of a body restricted to lie in `region`.
    pub fn within(region: &Body<f64>) -> Self {
        let (lo, hi) = region.bounding_box();
        SearchRegion { lo, hi, within: Some(region.clone()) }
    }

    /// Translates `x` for which `x + K` can meet the density's effective
    /// support; a symmetric box around the origin when the support is
    /// unbounded.
    pub fn for_translates(density: &Density, k: &Body<f64>) -> Self {
        let (klo, khi) = k.bounding_box();
        match density.support_box() {
            Some((slo, shi)) => SearchRegion::boxed(
                slo.iter().zip(&khi).map(|(s, b)| s - b).collect(),
                shi.iter().zip(&klo).map(|(s, b)| s - b).collect(),
            ),
            None => {
                let r = klo.iter().chain(&khi).fold(1.0f64, |m, v| m.max(v.abs())) * 2.0;
                SearchRegion::boxed(vec![-r; k.dim()], vec![r; k.dim()])
            }
        }
    }

    fn admits(&self, x: &[f64]) -> bool {
        self.within.as_ref().is_none_or(|b| b.contains(x))
    }
}

/// Result of a grid-plus-refinement maximization. The value is a lower bound
/// on the true supremum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupResult {
    pub estimate: Estimate,
    pub argmax: Vec<f64>,
    /// Best screening value after the coarse grid and after each refinement.
    pub history: Vec<f64>,
    /// The last two refinements moved the best value by at most 0.5%.
    pub converged: bool,
}

fn converged(history: &[f64]) -> bool {
    let n = history.len();
    if n < 3 {
        return false;
    }
    let last = history[n - 1].abs().max(f64::MIN_POSITIVE);
    (history[n - 1] - history[n - 3]).abs() <= 0.005 * last
}

/// Coarse grid over the region, then halving refinements around the best.
/// Returns the best point and the best value after each stage.
pub fn grid_maximize<F>(region: &SearchRegion, per_axis: usize, rounds: usize, extra: Vec<Vec<f64>>, f: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = region.lo.len();
    if region.lo.iter().zip(&region.hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::Domain("empty or unbounded search region".into()));
    }
    let m = per_axis.max(1);
    let step: Vec<f64> = region.lo.iter().zip(&region.hi).map(|(a, b)| if m > 1 { (b - a) / (m - 1) as f64 } else { 0.0 }).collect();
    let mut candidates: Vec<Vec<f64>> = (0..m.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|k| {
                    let i = idx % m;
                    idx /= m;
                    if m > 1 {
                        region.lo[k] + step[k] * i as f64
                    } else {
                        0.5 * (region.lo[k] + region.hi[k])
                    }
                })
                .collect()
        })
        .collect();
    candidates.extend(extra);
    candidates.retain(|x| region.admits(x));
    if candidates.is_empty() {
        return Err(Error::Domain("no admissible point in the search region".into()));
    }
    let best_of = |pts: &[Vec<f64>]| -> Option<(usize, f64)> {
        let vals: Vec<f64> = pts.par_iter().map(|x| f(x)).collect();
        vals.iter().enumerate().fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, b)) if b >= *v => acc,
            _ if v.is_nan() => acc,
            _ => Some((i, *v)),
        })
    };
    let (i, mut best) = best_of(&candidates).ok_or_else(|| Error::Domain("search objective is undefined everywhere".into()))?;
    let mut arg = candidates[i].clone();
    let mut history = vec![best];
    let mut h: Vec<f64> = step.iter().map(|s| if *s > 0.0 { *s } else { 1e-3 }).collect();
    for _ in 0..rounds {
        h.iter_mut().for_each(|s| *s *= 0.5);
        let mut nbrs = Vec::new();
        for mut idx in 0..3usize.pow(n as u32) {
            let mut x = arg.clone();
            let mut moved = false;
            for k in 0..n {
                let d = (idx % 3) as f64 - 1.0;
                idx /= 3;
                x[k] += d * h[k];
                moved |= d != 0.0;
            }
            if moved && region.admits(&x) {
                nbrs.push(x);
            }
        }
        if let Some((j, v)) = best_of(&nbrs) {
            if v > best {
                best = v;
                arg = nbrs[j].clone();
            }
        }
        history.push(best);
    }
    Ok((arg, history))
}

fn translated(point: &[f64], shift: &[f64]) -> Vec<f64> {
    point.iter().zip(shift).map(|(a, b)| a + b).collect()
}

/// Runs `f` on a zeroed stack buffer of length `n`.
fn with_buf<R>(n: usize, f: impl FnOnce(&mut [f64]) -> R) -> R {
    let mut buf = [0.0; crate::bodies::MAX_DIM + 1];
    f(&mut buf[..n])
}

/// Lower bound on `sup_x μ(x + K)` over the region.
pub fn sup_translate(density: &Density, k: &Body<f64>, region: &SearchRegion, cfg: &IntegrateConfig) -> Result<SupResult> {
    cfg.validate()?;
    let n = k.dim();
    let per_axis = if n >= 3 { cfg.search_points.min(7) } else { cfg.search_points };
    let extra = region
        .within
        .as_ref()
        .and_then(|b| b.vertices().map(|v| v.to_vec()))
        .map(|mut v| {
            let c: Vec<f64> = (0..n).map(|i| v.iter().map(|p| p[i]).sum::<f64>() / v.len() as f64).collect();
            v.push(c);
            v
        })
        .unwrap_or_default();
    if density.is_lebesgue() {
        let v = volume(k, cfg)?;
        let (arg, _) = grid_maximize(region, 1, 0, extra, |_| 0.0)?;
        return Ok(SupResult { estimate: v, argmax: arg, history: vec![v.value; 3], converged: true });
    }
    if let (Some(breaks), Form::Ball { center, radius }) = (density.annular_breakpoints(), k.form()) {
        if n == 2 && density.dim() == 2 {
            let f = |x: &[f64]| quad::polar(density, &breaks, &translated(center, x), *radius, cfg.grid).value;
            let (arg, history) = grid_maximize(region, per_axis, cfg.refine_rounds, extra, f)?;
            let estimate = quad::polar(density, &breaks, &translated(center, &arg), *radius, cfg.grid);
            let converged = converged(&history);
            return Ok(SupResult { estimate, argmax: arg, history, converged });
        }
    }
    let vk = volume(k, &sub(cfg, VOLUME))?;
    if vk.value == 0.0 {
        let (arg, _) = grid_maximize(region, 1, 0, extra, |_| 0.0)?;
        return Ok(SupResult { estimate: vk, argmax: arg, history: vec![0.0; 3], converged: true });
    }
    let screen = PointCloud::sample(k, cfg.search_samples.min(cfg.n_samples), &stream(cfg, CLOUD_A))?;
    let mean_at = |cloud: &PointCloud, x: &[f64]| {
        cloud.mean(|u| with_buf(n, |z| {
            z.iter_mut().zip(u.iter().zip(x)).for_each(|(o, (a, b))| *o = a + b);
            density.eval(z)
        }))
    };
    let (arg, history) = grid_maximize(region, per_axis, cfg.refine_rounds, extra, |x| vk.value * mean_at(&screen, x).0)?;
    let full = PointCloud::sample(k, cfg.n_samples, &stream(cfg, CLOUD_FINAL))?;
    let (mean, se) = mean_at(&full, &arg);
    let estimate = vk.mul(Estimate::mc(mean, se, cfg.n_samples as u64));
    let converged = converged(&history);
    Ok(SupResult { estimate, argmax: arg, history, converged })
}

/// Result of the search over `(y, θ)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolatedSup {
    pub estimate: Estimate,
    pub y: Vec<f64>,
    pub theta: f64,
    /// `‖φ‖_∞ vol(B)`, an upper bound for the searched quantity.
    pub bound: f64,
    pub converged: bool,
}

/// Lower bound on `sup_{y∈K, θ∈[θ_min,1]} μ((1-θ)y + θB)/θ^n`, evaluated as
/// `vol(B) E_{u∈B}[φ((1-θ)y + θu)]`.
pub fn sup_interpolated(density: &Density, k: &Body<f64>, b: &Body<f64>, cfg: &IntegrateConfig) -> Result<InterpolatedSup> {
    cfg.validate()?;
    if !(cfg.theta_min > 0.0) {
        return Err(Error::Domain(format!("theta_min = {} must be positive", cfg.theta_min)));
    }
    let n = k.dim();
    let vb = volume(b, &sub(cfg, VOLUME))?;
    let bound = density.sup() * vb.value;
    let mut ys: Vec<Vec<f64>> = k.vertices().map(|v| v.to_vec()).unwrap_or_default();
    if let Some(v) = k.vertices() {
        ys.push((0..n).map(|i| v.iter().map(|p| p[i]).sum::<f64>() / v.len() as f64).collect());
    }
    let origin = vec![0.0; n];
    if k.contains(&origin) {
        ys.push(origin);
    }
    if density.is_lebesgue() || vb.value == 0.0 {
        let y = ys.first().cloned().unwrap_or_else(|| vec![0.0; n]);
        return Ok(InterpolatedSup { estimate: vb, y, theta: 1.0, bound, converged: true });
    }
    let interior = PointCloud::sample(k, 24, &stream(cfg, CLOUD_B))?;
    ys.extend((0..interior.len()).map(|i| interior.point(i).to_vec()));
    let steps = 16;
    let thetas: Vec<f64> = (0..steps).map(|i| cfg.theta_min.powf(1.0 - i as f64 / (steps - 1) as f64)).collect();
    let at = |y: &[f64], theta: f64, u: &[f64]| {
        with_buf(n, |z| {
            z.iter_mut().zip(y.iter().zip(u)).for_each(|(o, (a, w))| *o = (1.0 - theta) * a + theta * w);
            density.eval(z)
        })
    };
    let screen = PointCloud::sample(b, cfg.search_samples.min(cfg.n_samples), &stream(cfg, CLOUD_A))?;
    let objective = |y: &[f64], theta: f64| screen.mean(|u| at(y, theta, u)).0;
    let pairs: Vec<(usize, f64)> = ys.iter().enumerate().flat_map(|(i, _)| thetas.iter().map(move |t| (i, *t))).collect();
    let vals: Vec<f64> = pairs.par_iter().map(|(i, t)| objective(&ys[*i], *t)).collect();
    let best = vals.iter().enumerate().fold(0, |bi, (i, v)| if *v > vals[bi] { i } else { bi });
    let (yi, theta0) = pairs[best];
    // Local refinement in (y, log θ), staying inside K and [θ_min, 1].
    let (klo, khi) = k.bounding_box();
    let mut h: Vec<f64> = klo.iter().zip(&khi).map(|(a, c)| 0.25 * (c - a)).collect();
    let mut log_step = -cfg.theta_min.ln() / (steps - 1) as f64;
    let (mut y, mut theta, mut value) = (ys[yi].clone(), theta0, vals[best]);
    let mut history = vec![value];
    for _ in 0..cfg.refine_rounds {
        h.iter_mut().for_each(|s| *s *= 0.5);
        log_step *= 0.5;
        let mut cands: Vec<(Vec<f64>, f64)> = Vec::new();
        for d in [-1.0, 1.0] {
            let t = (theta * (d * log_step).exp()).clamp(cfg.theta_min, 1.0);
            cands.push((y.clone(), t));
            for i in 0..n {
                let mut z = y.clone();
                z[i] += d * h[i];
                if k.contains(&z) {
                    cands.push((z, theta));
                }
            }
        }
        let vals: Vec<f64> = cands.par_iter().map(|(z, t)| objective(z, *t)).collect();
        for (c, v) in cands.into_iter().zip(vals) {
            if v > value {
                value = v;
                (y, theta) = c;
            }
        }
        history.push(value);
    }
    let full = PointCloud::sample(b, cfg.n_samples, &stream(cfg, CLOUD_FINAL))?;
    let (mean, se) = full.mean(|u| at(&y, theta, u));
    Ok(InterpolatedSup {
        estimate: vb.mul(Estimate::mc(mean, se, cfg.n_samples as u64)),
        y,
        theta,
        bound,
        converged: converged(&history),
    })
}

/// Lower bound on `sup_{y∈K, θ} μ((1-θ)y - θK)/θ^n`.
pub fn sup_interpolated_translate(density: &Density, k: &Body<f64>, cfg: &IntegrateConfig) -> Result<InterpolatedSup> {
    sup_interpolated(density, k, &k.reflect(), cfg)
}

/// `∫_0^1 μ((1-θ)K + θL) dθ` by Gauss-Legendre in θ, with `L = -K` when
/// `other` is `None`. Monte-Carlo nodes each get `4N/order` samples (at
/// least 1000), so the whole integral costs about four plain measures.
pub fn ck_integral(density: &Density, k: &Body<f64>, other: Option<&Body<f64>>, cfg: &IntegrateConfig) -> Result<Estimate> {
    cfg.validate()?;
    let n = k.dim();
    if other.is_none() && !k.contains(&vec![0.0; n]) {
        return Err(Error::Precondition("the body must contain the origin".into()));
    }
    let rule = gauss_legendre::<f64>(cfg.theta_order, 0.0, 1.0)?;
    let mut total = Estimate::exact(0.0);
    for (i, (theta, w)) in rule.iter().enumerate() {
        let body = match other {
            None => k.theta_difference(theta)?,
            Some(l) => k.scaled(1.0 - theta)?.minkowski_sum(&l.scaled(theta)?)?,
        };
        let node_cfg = sub(cfg, 0x7e7a_0000 + i as u64).samples((4 * cfg.n_samples / cfg.theta_order).max(1000));
        let est = measure(density, &body, &node_cfg)?;
        total = total.add(est.scale(w));
    }
    Ok(total)
}
