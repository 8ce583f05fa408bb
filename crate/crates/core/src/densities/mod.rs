//! Densities with declared concavity classes, the p-mean, superlevel sets
//! and sampling audits of the declared classes.

mod audit;
mod parse;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bodies::{Body, Form};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use audit::{audit_class, AuditVerdict, ClassAuditReport, DensityClass, Witness};
pub use parse::load_body;

/// Power mean of two non-negative numbers; zero whenever either one is.
pub fn p_mean<T: Real>(a: T, b: T, lambda: T, p: T) -> T {
    if a * b == T::zero() {
        return T::zero();
    }
    let one = T::one();
    if p == T::infinity() {
        a.max(b)
    } else if p == T::neg_infinity() {
        a.min(b)
    } else if p == T::zero() {
        a.powf(one - lambda) * b.powf(lambda)
    } else {
        ((one - lambda) * a.powf(p) + lambda * b.powf(p)).powf(one / p)
    }
}

/// Declared class membership. `p_concave` is the largest declared exponent
/// (`-inf` for plain quasi-concavity, `+inf` for indicator-like densities).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFlags {
    pub radially_decreasing: bool,
    pub quasi_concave: bool,
    pub p_concave: Option<f64>,
    pub even: bool,
    pub continuous_at_origin: bool,
}

#[derive(Clone, Debug)]
pub struct Factor {
    pub density: Density,
    pub coords: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum Kind {
    Lebesgue,
    /// Standard Gaussian, normalized.
    Gaussian,
    /// `exp(-|x|)`.
    ExpNorm,
    /// `exp(-|x|^2)`, unnormalized.
    ExpSq,
    Indicator(Body<f64>),
    /// Indicator of `δB_2 ∪ (2B_2 \ (2-ε)B_2)`.
    Ring { eps: f64, delta: f64 },
    /// Indicator of the planar cone with opening angle `theta` above the x-axis.
    Wedge { theta: f64 },
    /// `(1 - ‖y‖_K)_+^r`.
    ConePower { body: Body<f64>, r: f64 },
    /// Product of factors acting on coordinate groups; uncovered
    /// coordinates carry the constant factor 1.
    Product(Vec<Factor>),
}

#[derive(Clone, Debug)]
pub struct Density {
    dim: usize,
    kind: Kind,
    flags: ClassFlags,
    sup: f64,
    argmax: Option<Vec<f64>>,
    spec: String,
}

const TAIL: f64 = 1e-9;

impl Density {
    fn new(dim: usize, kind: Kind, flags: ClassFlags, sup: f64, argmax: Option<Vec<f64>>, spec: String) -> Self {
        Density { dim, kind, flags, sup, argmax, spec }
    }

    fn radial_builtin(n: usize, kind: Kind, p: f64, sup: f64, spec: &str) -> Result<Self> {
        if n == 0 || n > crate::bodies::MAX_DIM {
            return Err(Error::Domain(format!("density dimension {n}")));
        }
        let flags = ClassFlags {
            radially_decreasing: true,
            quasi_concave: true,
            p_concave: Some(p),
            even: true,
            continuous_at_origin: true,
        };
        Ok(Self::new(n, kind, flags, sup, Some(vec![0.0; n]), spec.into()))
    }

    pub fn lebesgue(n: usize) -> Result<Self> {
        Self::radial_builtin(n, Kind::Lebesgue, f64::INFINITY, 1.0, "lebesgue")
    }

    pub fn gaussian(n: usize) -> Result<Self> {
        Self::radial_builtin(n, Kind::Gaussian, 0.0, (2.0 * PI).powf(-(n as f64) / 2.0), "gaussian")
    }

    pub fn exp_norm(n: usize) -> Result<Self> {
        Self::radial_builtin(n, Kind::ExpNorm, 0.0, 1.0, "exp-norm")
    }

    pub fn exp_sq(n: usize) -> Result<Self> {
        Self::radial_builtin(n, Kind::ExpSq, 0.0, 1.0, "exp-sq")
    }

    pub fn indicator(body: Body<f64>) -> Self {
        let n = body.dim();
        let origin = vec![0.0; n];
        let contains_origin = body.contains(&origin);
        let flags = ClassFlags {
            radially_decreasing: contains_origin,
            quasi_concave: true,
            p_concave: Some(f64::INFINITY),
            even: body.is_symmetric(),
            continuous_at_origin: body.origin_in_interior(),
        };
        let argmax = Some(if contains_origin { origin } else { interior_point(&body) });
        let spec = format!("indicator:{}", body.label().unwrap_or("body"));
        Self::new(n, Kind::Indicator(body), flags, 1.0, argmax, spec)
    }

    pub fn ring(eps: f64, delta: f64) -> Result<Self> {
        if !(0.0 < eps && eps < delta && delta < 2.0) {
            return Err(Error::Domain(format!("ring needs 0 < eps < delta < 2, got eps={eps}, delta={delta}")));
        }
        let flags = ClassFlags {
            radially_decreasing: false,
            quasi_concave: false,
            p_concave: None,
            even: true,
            continuous_at_origin: true,
        };
        Ok(Self::new(2, Kind::Ring { eps, delta }, flags, 1.0, Some(vec![0.0, 0.0]), format!("ring:eps={eps},delta={delta}")))
    }

    pub fn wedge(theta: f64) -> Result<Self> {
        if !(0.0 < theta && theta < PI / 2.0) {
            return Err(Error::Domain(format!("wedge angle {theta} outside (0, pi/2)")));
        }
        // A convex cone with apex at the origin: every ray from the origin
        // stays inside once it enters, so radial decay holds; evenness does not.
        let flags = ClassFlags {
            radially_decreasing: true,
            quasi_concave: true,
            p_concave: Some(f64::INFINITY),
            even: false,
            continuous_at_origin: false,
        };
        Ok(Self::new(2, Kind::Wedge { theta }, flags, 1.0, Some(vec![1.0, 0.0]), format!("wedge:theta={theta}")))
    }

    pub fn cone_power(body: Body<f64>, r: f64) -> Result<Self> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::Domain(format!("cone exponent {r} must be at least 1")));
        }
        if !body.origin_in_interior() {
            return Err(Error::Domain("cone density needs the origin in the interior of its body".into()));
        }
        let n = body.dim();
        let flags = ClassFlags {
            radially_decreasing: true,
            quasi_concave: true,
            p_concave: Some(1.0 / r),
            even: body.is_symmetric(),
            continuous_at_origin: true,
        };
        let spec = format!("cone:{},r={r}", body.label().unwrap_or("body"));
        Ok(Self::new(n, Kind::ConePower { body, r }, flags, 1.0, Some(vec![0.0; n]), spec))
    }

    /// Product over coordinate groups of `R^dim`. Groups may overlap, which
    /// gives pointwise products.
    pub fn product(dim: usize, factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            if f.coords.len() != f.density.dim {
                return Err(Error::DimensionMismatch(format!(
                    "factor '{}' has dimension {} but acts on {} coordinates",
                    f.density.spec,
                    f.density.dim,
                    f.coords.len()
                )));
            }
            let mut sorted = f.coords.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != f.coords.len() || sorted.last().is_some_and(|&c| c >= dim) {
                return Err(Error::Domain(format!("factor coordinates {:?} out of range or repeated", f.coords)));
            }
        }
        let all = |pred: &dyn Fn(&ClassFlags) -> bool| factors.iter().all(|f| pred(&f.density.flags));
        let ps: Vec<f64> = factors.iter().map(|f| f.density.flags.p_concave.unwrap_or(f64::NAN)).collect();
        let p = if ps.iter().all(|p| *p >= 0.0) {
            let inv: f64 = ps.iter().map(|p| if *p == 0.0 { f64::INFINITY } else { 1.0 / p }).sum();
            Some(if inv == f64::INFINITY { 0.0 } else if inv == 0.0 { f64::INFINITY } else { 1.0 / inv })
        } else if ps.iter().filter(|p| **p != f64::INFINITY).count() <= 1 && ps.iter().all(|p| !p.is_nan()) {
            ps.iter().cloned().fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.min(p))))
        } else {
            None
        };
        let flags = ClassFlags {
            radially_decreasing: all(&|f| f.radially_decreasing),
            quasi_concave: p.is_some(),
            p_concave: p,
            even: all(&|f| f.even),
            continuous_at_origin: all(&|f| f.continuous_at_origin),
        };
        let sup: f64 = factors.iter().map(|f| f.density.sup).product();
        let mut argmax = Some(vec![0.0; dim]);
        let mut set = vec![false; dim];
        for f in &factors {
            match (&f.density.argmax, argmax.as_mut()) {
                (Some(a), Some(x)) => {
                    for (&c, v) in f.coords.iter().zip(a) {
                        if set[c] && x[c] != *v {
                            // The sup of the product would no longer be the product of sups.
                            return Err(Error::Domain("overlapping factors peak at different points".into()));
                        }
                        x[c] = *v;
                        set[c] = true;
                    }
                }
                _ => argmax = None,
            }
        }
        let spec = format!(
            "product:{}",
            factors
                .iter()
                .map(|f| format!("{}@{:?}", f.density.spec, f.coords))
                .collect::<Vec<_>>()
                .join("|")
        );
        Ok(Self::new(dim, Kind::Product(factors), flags, sup, argmax, spec))
    }

    /// `a(x) b(y)` with `x` the leading `a.dim()` coordinates.
    pub fn split_product(a: Density, b: Density) -> Result<Self> {
        let (na, nb) = (a.dim, b.dim);
        let spec = format!("{}|{}:split={na}", a.spec, b.spec);
        let mut d = Self::product(
            na + nb,
            vec![Factor { density: a, coords: (0..na).collect() }, Factor { density: b, coords: (na..na + nb).collect() }],
        )?;
        d.spec = spec;
        Ok(d)
    }

    /// `a(x) b(x)` on the same space.
    pub fn pointwise_product(a: Density, b: Density) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim, b.dim)));
        }
        let n = a.dim;
        let spec = format!("{}*{}", a.spec, b.spec);
        let mut d = Self::product(n, vec![Factor { density: a, coords: (0..n).collect() }, Factor { density: b, coords: (0..n).collect() }])?;
        d.spec = spec;
        Ok(d)
    }

    /// `g(P_H x)` on `R^dim` for a density `g` living on the listed axes.
    pub fn lift(g: Density, dim: usize, coords: Vec<usize>) -> Result<Self> {
        let spec = format!("lift:{}@{:?}", g.spec, coords);
        let mut d = Self::product(dim, vec![Factor { density: g, coords }])?;
        d.spec = spec;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn flags(&self) -> &ClassFlags {
        &self.flags
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn argmax(&self) -> Option<&[f64]> {
        self.argmax.as_deref()
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn with_spec(mut self, spec: impl Into<String>) -> Self {
        self.spec = spec.into();
        self
    }

    pub fn is_lebesgue(&self) -> bool {
        match &self.kind {
            Kind::Lebesgue => true,
            Kind::Product(fs) => fs.iter().all(|f| f.density.is_lebesgue()),
            _ => false,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Lebesgue => 1.0,
            Kind::Gaussian => self.sup * (-0.5 * sq(x)).exp(),
            Kind::ExpNorm => (-sq(x).sqrt()).exp(),
            Kind::ExpSq => (-sq(x)).exp(),
            Kind::Indicator(b) => ind(b.contains(x)),
            Kind::Ring { eps, delta } => {
                let r = sq(x).sqrt();
                ind(r <= *delta || (r >= 2.0 - eps && r <= 2.0))
            }
            Kind::Wedge { theta } => {
                let (a, b) = (x[0], x[1]);
                ind(b >= 0.0 && b * theta.cos() <= a * theta.sin() + 1e-15 * (a.abs() + b.abs()))
            }
            Kind::ConePower { body, r } => {
                let g = gauge(body, x);
                if g >= 1.0 {
                    0.0
                } else {
                    (1.0 - g).powf(*r)
                }
            }
            Kind::Product(fs) => {
                let mut v = 1.0;
                let mut buf = [0.0; crate::bodies::MAX_DIM + 1];
                for f in fs {
                    let part = &mut buf[..f.coords.len()];
                    part.iter_mut().zip(&f.coords).for_each(|(o, &c)| *o = x[c]);
                    v *= f.density.eval(part);
                    if v == 0.0 {
                        break;
                    }
                }
                v
            }
        }
    }

    /// Box outside of which the density is negligible (relative level
    /// 1e-9) or zero; `None` for unbounded support.
    pub fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.dim;
        let cube = |r: f64| Some((vec![-r; n], vec![r; n]));
        match &self.kind {
            Kind::Lebesgue | Kind::Wedge { .. } => None,
            Kind::Gaussian => cube((-2.0 * TAIL.ln()).sqrt()),
            Kind::ExpNorm => cube(-TAIL.ln()),
            Kind::ExpSq => cube((-TAIL.ln()).sqrt()),
            Kind::Indicator(b) | Kind::ConePower { body: b, .. } => Some(b.bounding_box()),
            Kind::Ring { .. } => cube(2.0),
            Kind::Product(fs) => {
                let mut lo = vec![f64::NEG_INFINITY; n];
                let mut hi = vec![f64::INFINITY; n];
                for f in fs {
                    let (l, h) = f.density.support_box()?;
                    for (k, &c) in f.coords.iter().enumerate() {
                        lo[c] = lo[c].max(l[k]);
                        hi[c] = hi[c].min(h[k]);
                    }
                }
                if lo.iter().chain(&hi).all(|v| v.is_finite()) {
                    Some((lo, hi))
                } else {
                    None
                }
            }
        }
    }

    /// Probe region for class audits: the support box, or `[-4, 4]^n`
    /// when the support is unbounded.
    pub fn audit_box(&self) -> (Vec<f64>, Vec<f64>) {
        self.support_box().unwrap_or_else(|| (vec![-4.0; self.dim], vec![4.0; self.dim]))
    }

    /// Radii at which a rotation-invariant planar density jumps; present only
    /// for densities that want polar quadrature.
    pub fn annular_breakpoints(&self) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Ring { eps, delta } => Some(vec![*delta, 2.0 - eps, 2.0]),
            _ => None,
        }
    }

    /// Radial profile `r ↦ φ(r u)` for rotation-invariant densities.
    pub fn radial_profile(&self, r: f64) -> Option<f64> {
        let mut x = vec![0.0; self.dim];
        match &self.kind {
            Kind::Lebesgue | Kind::Gaussian | Kind::ExpNorm | Kind::ExpSq | Kind::Ring { .. } => {
                x[0] = r;
                Some(self.eval(&x))
            }
            _ => None,
        }
    }

    /// `C_t = {x : φ(x) >= t ‖φ‖_∞}`.
    pub fn superlevel(&self, t: f64) -> Result<Body<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("level {t} outside [0, 1]")));
        }
        if !self.flags.quasi_concave {
            return Err(Error::Class(format!("'{}' is not declared quasi-concave", self.spec)));
        }
        let n = self.dim;
        let origin = || Body::hull_of(vec![vec![0.0; n]]);
        let ball = |r: f64| if r > 0.0 { Body::ball(vec![0.0; n], r) } else { origin() };
        let unbounded = || Err(Error::UnboundedSupport(format!("superlevel set of '{}' at t={t}", self.spec)));
        match &self.kind {
            Kind::Lebesgue | Kind::Wedge { .. } => unbounded(),
            Kind::Gaussian if t > 0.0 => ball((-2.0 * t.ln()).sqrt()),
            Kind::ExpNorm if t > 0.0 => ball(-t.ln()),
            Kind::ExpSq if t > 0.0 => ball((-t.ln()).sqrt()),
            Kind::Gaussian | Kind::ExpNorm | Kind::ExpSq => unbounded(),
            Kind::Indicator(b) => Ok(b.clone()),
            Kind::ConePower { body, r } => {
                let s = 1.0 - t.powf(1.0 / r);
                if s <= 0.0 {
                    origin()
                } else {
                    body.scaled(s)
                }
            }
            Kind::Ring { .. } => Err(Error::Class("ring density is not quasi-concave".into())),
            Kind::Product(_) => {
                let (lo, hi) = match self.support_box() {
                    Some(b) => b,
                    None => return unbounded(),
                };
                let me = self.clone();
                let level = t * self.sup;
                Body::oracle(lo, hi, std::sync::Arc::new(move |x: &[f64]| me.eval(x) >= level * (1.0 - 1e-9) && me.eval(x) > 0.0))
            }
        }
    }
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn interior_point(b: &Body<f64>) -> Vec<f64> {
    match b.vertices() {
        Some(v) => (0..b.dim()).map(|i| v.iter().map(|p| p[i]).sum::<f64>() / v.len() as f64).collect(),
        None => {
            let (lo, hi) = b.bounding_box();
            lo.iter().zip(&hi).map(|(a, c)| 0.5 * (a + c)).collect()
        }
    }
}

/// Minkowski gauge of a body with the origin in its interior.
pub fn gauge(body: &Body<f64>, y: &[f64]) -> f64 {
    if let Some(fs) = body.polytope().and_then(|p| p.facets()) {
        return fs.iter().map(|f| crate::scalar::dot(&f.normal, y) / f.offset).fold(0.0, f64::max);
    }
    let r = sq(y).sqrt();
    if r == 0.0 {
        return 0.0;
    }
    if let Form::Ball { center, radius } = body.form() {
        if center.iter().all(|c| *c == 0.0) {
            return r / radius;
        }
    }
    match body.radial(y) {
        Ok(rho) if rho > 0.0 => 1.0 / rho,
        _ => f64::INFINITY,
    }
}
