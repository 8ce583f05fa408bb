//! The measure engine: volumes, density integrals over bodies, translated
//! averages, searches over translates and the θ-integral behind the
//! Chakerian-type body.

mod engine;
mod quad;
mod search;

use serde::{Deserialize, Serialize};

use crate::bodies::{Body, Exact, Form, Frame};
use crate::corekit::RandomStream;
use crate::densities::{Density, Kind};
use crate::error::{Error, Result};

pub use engine::{PointCloud, CHUNK};
pub use search::{
    ck_integral, grid_maximize, pair_average, sup_interpolated, sup_interpolated_translate, sup_translate, translated_average, InterpolatedSup, SearchRegion,
    SupResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    McBox,
    GridQuadrature,
}

/// A value with its standard error. Deterministic methods report zero error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: Method,
}

// These propagate standard errors, so they are not the plain operator traits.
#[allow(clippy::should_implement_trait)]
impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0, n_samples: 0, method: Method::Exact }
    }

    pub fn quadrature(value: f64, nodes: u64) -> Self {
        Estimate { value, std_error: 0.0, n_samples: nodes, method: Method::GridQuadrature }
    }

    pub fn mc(value: f64, std_error: f64, n_samples: u64) -> Self {
        Estimate { value, std_error, n_samples, method: Method::McBox }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate { value: self.value * c, std_error: self.std_error * c.abs(), ..self }
    }

    fn join(a: Method, b: Method) -> Method {
        use Method::*;
        match (a, b) {
            (McBox, _) | (_, McBox) => McBox,
            (GridQuadrature, _) | (_, GridQuadrature) => GridQuadrature,
            _ => Exact,
        }
    }

    /// Sum of independent estimates.
    pub fn add(self, other: Estimate) -> Self {
        Estimate {
            value: self.value + other.value,
            std_error: self.std_error.hypot(other.std_error),
            n_samples: self.n_samples + other.n_samples,
            method: Self::join(self.method, other.method),
        }
    }

    /// Product of independent estimates, first-order error propagation.
    pub fn mul(self, other: Estimate) -> Self {
        Estimate {
            value: self.value * other.value,
            std_error: (self.value * other.std_error).hypot(other.value * self.std_error),
            n_samples: self.n_samples + other.n_samples,
            method: Self::join(self.method, other.method),
        }
    }

    pub fn div(self, other: Estimate) -> Self {
        let value = self.value / other.value;
        let rel = (self.std_error / self.value).hypot(other.std_error / other.value);
        Estimate {
            value,
            std_error: if self.value == 0.0 { self.std_error / other.value.abs() } else { value.abs() * rel },
            n_samples: self.n_samples + other.n_samples,
            method: Self::join(self.method, other.method),
        }
    }

    /// Smaller of two estimates, carrying the error of the chosen one.
    pub fn min(self, other: Estimate) -> Self {
        if other.value < self.value {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodPreference {
    /// Closed forms when available, quadrature for thin planar shells and
    /// one-dimensional bodies, Monte-Carlo otherwise.
    Auto,
    McBox,
    Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrateConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub stream: u64,
    pub method: MethodPreference,
    /// Nodes per axis for planar and spatial quadrature.
    pub grid: usize,
    pub theta_order: usize,
    pub theta_min: f64,
    /// Grid points per axis of the coarse translate search.
    pub search_points: usize,
    pub refine_rounds: usize,
    /// Sample size used while screening candidates in sup searches.
    pub search_samples: usize,
}

impl Default for IntegrateConfig {
    fn default() -> Self {
        IntegrateConfig {
            n_samples: 200_000,
            seed: 0,
            stream: 0,
            method: MethodPreference::Auto,
            grid: 512,
            theta_order: 33,
            theta_min: 1e-3,
            search_points: 9,
            refine_rounds: 12,
            search_samples: 20_000,
        }
    }
}

impl IntegrateConfig {
    pub fn with_seed(seed: u64) -> Self {
        IntegrateConfig { seed, ..Default::default() }
    }

    pub fn stream(&self, id: u64) -> Self {
        IntegrateConfig { stream: id, ..self.clone() }
    }

    pub fn samples(&self, n: usize) -> Self {
        IntegrateConfig { n_samples: n, ..self.clone() }
    }

    pub fn rng(&self) -> RandomStream {
        RandomStream::new(self.seed, self.stream)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::Domain(format!("n_samples = {} is below 1000", self.n_samples)));
        }
        if self.grid < 16 {
            return Err(Error::Domain(format!("grid resolution {} is below 16", self.grid)));
        }
        if self.theta_order == 0 || !(self.theta_min > 0.0 && self.theta_min < 1.0) {
            return Err(Error::Domain("theta order must be positive and theta_min in (0, 1)".into()));
        }
        if self.search_points == 0 || self.search_samples < 100 {
            return Err(Error::Domain("search grid and search sample size must be positive".into()));
        }
        Ok(())
    }
}

/// What a body reduces to for integration purposes.
pub(crate) enum Target<'a> {
    Null,
    Body(&'a Body<f64>),
}

pub(crate) fn resolve(body: &Body<f64>) -> Target<'_> {
    let b = match body.exact() {
        Some(Exact::Empty) => return Target::Null,
        Some(Exact::Is(_)) => body.exact_body().unwrap(),
        _ => body,
    };
    if let Some(p) = b.polytope() {
        if !p.is_full_dimensional() {
            return Target::Null;
        }
    }
    if let Form::Ball { radius, .. } = b.form() {
        if *radius <= 0.0 {
            return Target::Null;
        }
    }
    Target::Body(b)
}

pub(crate) fn finite_box(body: &Body<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = body.bounding_box();
    if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
        return Err(Error::Domain("body has an unbounded bounding box".into()));
    }
    Ok((lo, hi))
}

/// Evaluates a density in a body's own coordinates, embedding through the
/// body's frame when the density lives in the ambient space.
#[derive(Clone)]
pub(crate) struct Integrand<'a> {
    density: &'a Density,
    frame: Option<Frame<f64>>,
}

impl<'a> Integrand<'a> {
    pub(crate) fn new(density: &'a Density, body: &Body<f64>) -> Result<Self> {
        if density.dim() == body.dim() {
            return Ok(Integrand { density, frame: None });
        }
        match body.frame() {
            Some(f) if f.ambient == density.dim() => Ok(Integrand { density, frame: Some(f.clone()) }),
            _ => Err(Error::DimensionMismatch(format!(
                "density '{}' has dimension {} but the body has dimension {}",
                density.spec(),
                density.dim(),
                body.dim()
            ))),
        }
    }

    pub(crate) fn eval(&self, y: &[f64]) -> f64 {
        match &self.frame {
            Some(f) => self.density.eval(&f.embed(y)),
            None => self.density.eval(y),
        }
    }

    /// True when the density is the constant one on the body's coordinates.
    fn is_unit(&self) -> bool {
        self.density.is_lebesgue()
    }
}

/// Lebesgue measure of a bounded body.
pub fn volume(body: &Body<f64>, cfg: &IntegrateConfig) -> Result<Estimate> {
    cfg.validate()?;
    let b = match resolve(body) {
        Target::Null => return Ok(Estimate::exact(0.0)),
        Target::Body(b) => b,
    };
    let (lo, hi) = finite_box(b)?;
    if cfg.method != MethodPreference::McBox {
        if let Ok(v) = b.exact_volume() {
            return Ok(Estimate::exact(v));
        }
    }
    if b.dim() == 1 {
        return Ok(Estimate::exact(hi[0] - lo[0]));
    }
    engine::mc_box(b, &lo, &hi, cfg, |_| 1.0)
}

/// `∫_K φ`, in the body's own coordinates for sliced bodies.
pub fn measure(density: &Density, body: &Body<f64>, cfg: &IntegrateConfig) -> Result<Estimate> {
    cfg.validate()?;
    let b = match resolve(body) {
        Target::Null => return Ok(Estimate::exact(0.0)),
        Target::Body(b) => b,
    };
    let integrand = Integrand::new(density, body)?;
    if integrand.is_unit() {
        return volume(b, cfg);
    }
    let (lo, hi) = finite_box(b)?;
    let n = b.dim();
    if cfg.method != MethodPreference::McBox {
        if let (Kind::Indicator(l), None) = (density.kind(), &integrand.frame) {
            if let Some(v) = indicator_overlap(b, l) {
                return Ok(Estimate::exact(v));
            }
        }
        if let (Some(breaks), Form::Ball { center, radius }, None) = (density.annular_breakpoints(), b.form(), &integrand.frame) {
            if n == 2 {
                return Ok(quad::polar(density, &breaks, center, *radius, cfg.grid));
            }
        }
        if n == 1 {
            return Ok(quad::interval(&integrand, lo[0], hi[0], cfg.grid));
        }
        if cfg.method == MethodPreference::Grid && n <= 3 {
            return quad::tensor(&integrand, b, &lo, &hi, cfg.grid);
        }
    }
    engine::mc_box(b, &lo, &hi, cfg, |x| integrand.eval(x))
}

fn indicator_overlap(k: &Body<f64>, l: &Body<f64>) -> Option<f64> {
    let both_cached = |b: &Body<f64>| b.polytope().is_some_and(|p| p.facets().is_some());
    if !both_cached(k) || !both_cached(l) {
        return None;
    }
    k.intersect(l).ok()?.exact_volume().ok()
}
