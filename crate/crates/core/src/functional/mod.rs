//! Quasi-concave functions stored as nested superlevel families, the
//! difference operators acting level by level, projections, and layer-cake
//! integrals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, BodyJson, Form, SubspaceSpec};
use crate::corekit::rng::mix;
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::integrate::{measure, Estimate, IntegrateConfig};

pub const MAX_LEVELS: usize = 129;
pub const DEFAULT_LEVELS: usize = 64;

#[derive(Clone, Debug)]
pub struct Level {
    pub t: f64,
    pub body: Body<f64>,
}

/// `f(x) = sup · max{t_i : x ∈ S(t_i)}`; the first level is the support.
#[derive(Clone, Debug)]
pub struct QcFunction {
    dim: usize,
    sup: f64,
    levels: Vec<Level>,
    /// Declared concavity exponent, when the builder knows one.
    p_concave: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "tag")]
pub enum DeltaKind {
    MinusInf,
    MinusInfTheta { theta: f64 },
    Tilde,
}

fn nested_in(inner: &Body<f64>, outer: &Body<f64>) -> bool {
    match (inner.form(), outer.form()) {
        (Form::Ball { center: c1, radius: r1 }, Form::Ball { center: c2, radius: r2 }) => {
            let d = c1.iter().zip(c2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            d + r1 <= r2 + 1e-9
        }
        _ => match inner.vertices() {
            Some(vs) => vs.iter().all(|v| outer.contains(v) || outer.contains_lp(v)),
            None => true,
        },
    }
}

impl QcFunction {
    /// Levels must have increasing `t` in `[0, 1]` and nested bodies.
    pub fn new(levels: Vec<Level>, sup: f64) -> Result<Self> {
        if levels.is_empty() || levels.len() > MAX_LEVELS {
            return Err(Error::Domain(format!("level count {} outside 1..={MAX_LEVELS}", levels.len())));
        }
        if !(sup > 0.0 && sup.is_finite()) {
            return Err(Error::Domain(format!("sup value {sup} must be positive")));
        }
        let dim = levels[0].body.dim();
        for (i, l) in levels.iter().enumerate() {
            if l.body.dim() != dim {
                return Err(Error::DimensionMismatch(format!("level {i} has dimension {}", l.body.dim())));
            }
            if !(0.0..=1.0).contains(&l.t) {
                return Err(Error::Domain(format!("level {i} has t = {} outside [0, 1]", l.t)));
            }
        }
        for (i, w) in levels.windows(2).enumerate() {
            if !(w[1].t > w[0].t) {
                return Err(Error::Nesting(format!("level values must increase (levels {i} and {})", i + 1)));
            }
            if !nested_in(&w[1].body, &w[0].body) {
                return Err(Error::Nesting(format!("level {} is not contained in level {i}", i + 1)));
            }
        }
        let (lo, hi) = levels[0].body.bounding_box();
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::Domain("the support must be bounded".into()));
        }
        Ok(QcFunction { dim, sup, levels, p_concave: None })
    }

    /// `χ_K`, a single level.
    pub fn indicator(k: Body<f64>) -> Self {
        let dim = k.dim();
        QcFunction { dim, sup: 1.0, levels: vec![Level { t: 1.0, body: k }], p_concave: Some(f64::INFINITY) }
    }

    /// `(1 - ‖x - a‖_{K - a})^r` sampled on `m + 1` uniform levels, whose
    /// superlevels are `a + (1 - t^{1/r})(K - a)`.
    pub fn cone_profile(k: &Body<f64>, apex: &[f64], r: f64, m: usize) -> Result<Self> {
        if !(r > 0.0) || m == 0 || m + 1 > MAX_LEVELS {
            return Err(Error::Domain(format!("cone profile needs r > 0 and 1 <= m < {MAX_LEVELS}")));
        }
        if !k.contains(apex) {
            return Err(Error::Domain("cone apex must lie in the body".into()));
        }
        let levels = (0..=m)
            .map(|i| {
                let t = i as f64 / m as f64;
                let s = 1.0 - t.powf(1.0 / r);
                let shift: Vec<f64> = apex.iter().map(|a| a * (1.0 - s)).collect();
                let body = if s > 0.0 { k.transform(s, &shift)? } else { Body::hull_of(vec![apex.to_vec()])? };
                Ok(Level { t, body })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut f = QcFunction::new(levels, 1.0)?;
        f.p_concave = Some(1.0 / r);
        Ok(f)
    }

    pub fn with_sup(mut self, sup: f64) -> Result<Self> {
        if !(sup > 0.0 && sup.is_finite()) {
            return Err(Error::Domain(format!("sup value {sup} must be positive")));
        }
        self.sup = sup;
        Ok(self)
    }

    pub fn with_p_concave(mut self, p: Option<f64>) -> Self {
        self.p_concave = p;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn p_concave(&self) -> Option<f64> {
        self.p_concave
    }

    pub fn support(&self) -> &Body<f64> {
        &self.levels[0].body
    }

    pub fn is_indicator(&self) -> bool {
        self.levels.len() == 1
    }

    /// Superlevel set `S(t)` for `t` on the grid, as the first level with
    /// `t_i >= t`.
    pub fn superlevel(&self, t: f64) -> Option<&Body<f64>> {
        self.levels.iter().find(|l| l.t >= t - 1e-12).map(|l| &l.body)
    }

    /// Index of the highest level containing `x`.
    pub fn level_index(&self, x: &[f64]) -> Option<usize> {
        // Membership is monotone along the nested levels.
        let (mut lo, mut hi) = (0usize, self.levels.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.levels[mid].body.contains(x) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo.checked_sub(1)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.level_index(x).map_or(0.0, |i| self.sup * self.levels[i].t)
    }

    fn map_levels<F>(&self, dim: usize, f: F) -> Result<QcFunction>
    where
        F: Fn(&Body<f64>) -> Result<Body<f64>> + Sync,
    {
        let bodies: Vec<Result<Body<f64>>> = self.levels.par_iter().map(|l| f(&l.body)).collect();
        let levels = self
            .levels
            .iter()
            .zip(bodies)
            .map(|(l, b)| Ok(Level { t: l.t, body: b? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(QcFunction { dim, sup: self.sup, levels, p_concave: None })
    }

    fn require_polytopes(&self) -> Result<()> {
        if self.levels.iter().all(|l| l.body.is_polytope()) {
            Ok(())
        } else {
            Err(Error::Form("level-wise operators need polytope levels".into()))
        }
    }
}

/// Level-wise difference operators: `S ↦ S - S`, `(1-θ)S - θS`, or
/// `conv(S ∪ -S)`.
pub fn delta(f: &QcFunction, kind: DeltaKind) -> Result<QcFunction> {
    f.require_polytopes()?;
    match kind {
        DeltaKind::MinusInf => f.map_levels(f.dim, |b| b.difference_body()),
        DeltaKind::MinusInfTheta { theta } => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::Domain(format!("theta {theta} outside [0, 1]")));
            }
            f.map_levels(f.dim, |b| b.theta_difference(theta))
        }
        DeltaKind::Tilde => f.map_levels(f.dim, |b| b.conv_union(&b.reflect())),
    }
}

/// Decomposition grid per axis for the p-difference oracle.
pub const P_DIFF_GRID: usize = 256;

/// `Δ_p f(z) = sup_{z = x - y} (f(x)^p + f(y)^p)^{1/p}` for `p < 0`,
/// maximized over a grid of `x` in the support box.
pub struct PDifference<'a> {
    f: &'a QcFunction,
    p: f64,
    grid: usize,
}

impl<'a> PDifference<'a> {
    pub fn new(f: &'a QcFunction, p: f64, grid: usize) -> Result<Self> {
        if !(p < 0.0) {
            return Err(Error::Domain(format!("p-difference needs p < 0, got {p}")));
        }
        if f.dim > 2 {
            return Err(Error::Unsupported("p-difference oracle beyond dimension two".into()));
        }
        Ok(PDifference { f, p, grid: grid.max(2) })
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let (lo, hi) = self.f.support().bounding_box();
        let n = self.f.dim;
        let m = self.grid;
        let total = m.pow(n as u32);
        let mut best: f64 = 0.0;
        let mut x = vec![0.0; n];
        for mut idx in 0..total {
            for k in 0..n {
                x[k] = lo[k] + (hi[k] - lo[k]) * (idx % m) as f64 / (m - 1) as f64;
                idx /= m;
            }
            let a = self.f.eval(&x);
            if a <= best {
                continue;
            }
            let y: Vec<f64> = x.iter().zip(z).map(|(xi, zi)| xi - zi).collect();
            let b = self.f.eval(&y);
            if a > 0.0 && b > 0.0 {
                best = best.max((a.powf(self.p) + b.powf(self.p)).powf(1.0 / self.p));
            }
        }
        best
    }
}

/// `P_H f(x) = sup_{y ∈ H^⊥} f(x + y)`, level by level.
pub fn project_fn(f: &QcFunction, h: &SubspaceSpec) -> Result<QcFunction> {
    f.require_polytopes()?;
    let mut g = f.map_levels(h.dim(), |b| b.project(h))?;
    g.p_concave = f.p_concave;
    Ok(g)
}

/// `sup · ∫_0^1 a(t) dt` from per-level values `a_i = a(t_i)`: constant
/// below the first level, trapezoids between levels.
pub fn layer_cake(f: &QcFunction, per_level: &[Estimate]) -> Estimate {
    assert_eq!(per_level.len(), f.levels.len(), "one value per level");
    let mut total = per_level[0].scale(f.levels[0].t);
    for i in 1..per_level.len() {
        let dt = f.levels[i].t - f.levels[i - 1].t;
        total = total.add(per_level[i - 1].scale(0.5 * dt)).add(per_level[i].scale(0.5 * dt));
    }
    total.scale(f.sup)
}

/// Independent configuration for level `i`.
pub fn level_config(cfg: &IntegrateConfig, i: usize) -> IntegrateConfig {
    cfg.stream(mix(cfg.stream ^ mix(0xf0_0000 + i as u64)))
}

/// `∫ f dμ` by the layer-cake formula.
pub fn fn_integral(f: &QcFunction, density: &Density, cfg: &IntegrateConfig) -> Result<Estimate> {
    let measures = f
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| measure(density, &l.body, &level_config(cfg, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(layer_cake(f, &measures))
}

/// Restriction of `f` to `x0 + H^⊥`, in the coordinates of `H^⊥`.
pub fn section_fn(f: &QcFunction, h: &SubspaceSpec, x0: &[f64]) -> Result<QcFunction> {
    f.map_levels(h.ambient() - h.dim(), |b| b.slice(h, x0))
}

/// `‖f‖_∞` and a point where it is attained.
pub fn fn_sup(f: &QcFunction) -> (f64, Vec<f64>) {
    let top = f.levels.last().expect("at least one level");
    let point = match top.body.vertices() {
        Some(v) => (0..f.dim).map(|i| v.iter().map(|p| p[i]).sum::<f64>() / v.len() as f64).collect(),
        None => {
            let (lo, hi) = top.body.bounding_box();
            lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
        }
    };
    (f.sup * top.t, point)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelJson {
    pub t: f64,
    pub body: BodyJson,
}

/// `{"sup": s, "levels": [{"t": t, "body": …}, …], "p": optional}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QcFunctionJson {
    pub sup: f64,
    pub levels: Vec<LevelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl QcFunction {
    pub fn to_json(&self) -> Result<QcFunctionJson> {
        Ok(QcFunctionJson {
            sup: self.sup,
            levels: self
                .levels
                .iter()
                .map(|l| Ok(LevelJson { t: l.t, body: l.body.to_json()? }))
                .collect::<Result<Vec<_>>>()?,
            p: self.p_concave.filter(|p| p.is_finite()),
        })
    }

    pub fn from_json(j: &QcFunctionJson) -> Result<Self> {
        let levels = j
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Ok(Level { t: l.t, body: Body::from_json(&l.body).map_err(|e| Error::Parse(format!("levels[{i}].body: {e}")))? })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = j.p.or(if levels.len() == 1 { Some(f64::INFINITY) } else { None });
        Ok(QcFunction::new(levels, j.sup)?.with_p_concave(p))
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_json()?).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: QcFunctionJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&j)
    }
}

#[cfg(test)]
mod tests;
