//! Chunked sampling with counter-based substreams: chunk `i` always draws
//! from substream `i`, and partial sums are folded in chunk order, so results
//! do not depend on the worker count.

use rayon::prelude::*;

use super::{Estimate, IntegrateConfig};
use crate::bodies::Body;
use crate::corekit::RandomStream;
use crate::error::{Error, Result};

pub const CHUNK: usize = 4096;
const MAX_TRIES_PER_POINT: usize = 1 << 20;

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sumsq: f64,
    count: u64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sumsq += v * v;
        self.count += 1;
    }

    fn merge(mut self, o: Moments) -> Moments {
        self.sum += o.sum;
        self.sumsq += o.sumsq;
        self.count += o.count;
        self
    }

    /// Mean and its standard error.
    fn mean_se(&self) -> (f64, f64) {
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sumsq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

fn chunks(total: usize) -> Vec<(u64, usize)> {
    (0..total.div_ceil(CHUNK)).map(|i| (i as u64, CHUNK.min(total - i * CHUNK))).collect()
}

fn fold(parts: Vec<Moments>) -> Moments {
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

/// `box_vol · mean(f · 1_K)` over uniform points of the box.
pub(crate) fn mc_box<F>(body: &Body<f64>, lo: &[f64], hi: &[f64], cfg: &IntegrateConfig, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let box_vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    if box_vol <= 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let base = cfg.rng();
    let parts: Vec<Moments> = chunks(cfg.n_samples)
        .into_par_iter()
        .map(|(i, len)| {
            let mut rng = base.substream(i);
            let mut x = vec![0.0; lo.len()];
            let mut m = Moments::default();
            for _ in 0..len {
                rng.fill_box(lo, hi, &mut x);
                m.push(if body.contains(&x) { f(&x) } else { 0.0 });
            }
            m
        })
        .collect();
    let (mean, se) = fold(parts).mean_se();
    Ok(Estimate::mc(box_vol * mean, box_vol * se, cfg.n_samples as u64))
}

/// Points drawn uniformly from a body by rejection from its bounding box.
#[derive(Clone, Debug)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn sample(body: &Body<f64>, count: usize, stream: &RandomStream) -> Result<Self> {
        let (lo, hi) = super::finite_box(body)?;
        let dim = body.dim();
        let parts: Vec<Result<Vec<f64>>> = chunks(count)
            .into_par_iter()
            .map(|(i, len)| {
                let mut rng = stream.substream(i);
                let mut out = Vec::with_capacity(len * dim);
                let mut x = vec![0.0; dim];
                for _ in 0..len {
                    let mut tries = 0;
                    loop {
                        rng.fill_box(&lo, &hi, &mut x);
                        if body.contains(&x) {
                            break;
                        }
                        tries += 1;
                        if tries > MAX_TRIES_PER_POINT {
                            return Err(Error::Degenerate("rejection sampling found no interior points".into()));
                        }
                    }
                    out.extend_from_slice(&x);
                }
                Ok(out)
            })
            .collect();
        let mut coords = Vec::with_capacity(count * dim);
        for p in parts {
            coords.extend(p?);
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Keeps the first `m` points.
    pub fn truncated(&self, m: usize) -> PointCloud {
        let m = m.min(self.len());
        PointCloud { dim: self.dim, coords: self.coords[..m * self.dim].to_vec() }
    }

    /// Mean of `f` over the points and its standard error.
    pub fn mean<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let parts: Vec<Moments> = chunks(self.len())
            .into_par_iter()
            .map(|(i, len)| {
                let start = i as usize * CHUNK;
                let mut m = Moments::default();
                for j in start..start + len {
                    m.push(f(self.point(j)));
                }
                m
            })
            .collect();
        fold(parts).mean_se()
    }

    /// Mean of `f(a_i, b_i)` over paired points of two clouds of equal size.
    pub fn pair_mean<F>(&self, other: &PointCloud, f: F) -> (f64, f64)
    where
        F: Fn(&[f64], &[f64]) -> f64 + Sync,
    {
        let len = self.len().min(other.len());
        let parts: Vec<Moments> = chunks(len)
            .into_par_iter()
            .map(|(i, l)| {
                let start = i as usize * CHUNK;
                let mut m = Moments::default();
                for j in start..start + l {
                    m.push(f(self.point(j), other.point(j)));
                }
                m
            })
            .collect();
        fold(parts).mean_se()
    }
}
