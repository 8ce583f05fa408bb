//! Convex bodies in vertex, ball or membership-oracle form.

mod hull;
mod json;
mod ops;
mod subspace;
mod volume;

use std::fmt;
use std::sync::Arc;

use crate::corekit::{solve_lp, LpProblem, RandomStream, Sense};
use crate::error::{Error, Result};
use crate::scalar::{dot, norm, Real};

pub use hull::Facet;
pub use json::BodyJson;
pub use subspace::SubspaceSpec;

pub const MAX_DIM: usize = 6;

pub type Predicate<T> = Arc<dyn Fn(&[T]) -> bool + Send + Sync>;

/// A polytope kept as its pruned vertex list plus, when affordable, the
/// facet list used for fast membership.
#[derive(Clone, Debug)]
pub struct Polytope<T> {
    vertices: Vec<Vec<T>>,
    facets: Option<Arc<Vec<Facet<T>>>>,
    full_dim: bool,
}

/// How the coordinates of a lower dimensional body sit in an ambient space:
/// `free` coordinates are the body's own, `fixed` ones are pinned.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    pub ambient: usize,
    pub free: Vec<usize>,
    pub fixed: Vec<(usize, T)>,
}

impl<T: Real> Frame<T> {
    pub fn embed(&self, y: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.ambient];
        for (k, &i) in self.free.iter().enumerate() {
            x[i] = y[k];
        }
        for &(i, v) in &self.fixed {
            x[i] = v;
        }
        x
    }
}

#[derive(Clone)]
pub struct OracleBody<T> {
    predicate: Predicate<T>,
    lo: Vec<T>,
    hi: Vec<T>,
    frame: Option<Frame<T>>,
    exact: Exact<T>,
}

/// What is known exactly about the set an oracle body describes.
#[derive(Clone)]
pub enum Exact<T> {
    Unknown,
    Empty,
    Is(Arc<Body<T>>),
}

#[derive(Clone)]
pub enum Form<T> {
    VPolytope(Polytope<T>),
    Ball { center: Vec<T>, radius: T },
    Oracle(OracleBody<T>),
}

#[derive(Clone)]
pub struct Body<T> {
    dim: usize,
    form: Form<T>,
    label: Option<String>,
}

impl<T: Real> fmt::Debug for Body<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Body");
        s.field("dim", &self.dim);
        match &self.form {
            Form::VPolytope(p) => s.field("vertices", &p.vertices),
            Form::Ball { center, radius } => s.field("center", center).field("radius", radius),
            Form::Oracle(o) => s.field("oracle_box", &(&o.lo, &o.hi)),
        };
        if let Some(l) = &self.label {
            s.field("label", l);
        }
        s.finish()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Domain(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

impl<T: Real> Polytope<T> {
    fn build(points: Vec<Vec<T>>) -> Self {
        let vertices = hull::prune(points);
        let d = vertices[0].len();
        let scale = hull::scale_of(&vertices);
        let full_dim = hull::affine_rank(&vertices, T::feas_tol() * scale) == d;
        let facets = if full_dim { hull::facets(&vertices).map(Arc::new) } else { None };
        Polytope { vertices, facets, full_dim }
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> Option<&[Facet<T>]> {
        self.facets.as_deref().map(|v| v.as_slice())
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.full_dim
    }
}

impl<T: Real> Body<T> {
    fn from_form(dim: usize, form: Form<T>) -> Self {
        Body { dim, form, label: None }
    }

    /// Convex hull of `points`, which must affinely span the ambient space.
    pub fn from_vertices(points: Vec<Vec<T>>) -> Result<Self> {
        let b = Self::hull_of(points)?;
        if !b.polytope().is_some_and(|p| p.full_dim) {
            return Err(Error::Degenerate("vertex list does not affinely span the space".into()));
        }
        Ok(b)
    }

    /// Convex hull of `points`, allowing lower dimensional results.
    pub fn hull_of(points: Vec<Vec<T>>) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| Error::Degenerate("no vertices".into()))?;
        check_dim(dim)?;
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch("ragged vertex list".into()));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite vertex coordinate".into()));
        }
        Ok(Self::from_form(dim, Form::VPolytope(Polytope::build(points))))
    }

    /// Standard simplex `conv{0, e_1, ..., e_n}`.
    pub fn simplex(n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut v = vec![vec![T::zero(); n]];
        for i in 0..n {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            v.push(e);
        }
        Ok(Self::from_vertices(v)?.with_label(format!("simplex:{n}")))
    }

    /// Cube `[-h, h]^n`.
    pub fn cube(n: usize, half_width: T) -> Result<Self> {
        let lo = vec![-half_width; n];
        let hi = vec![half_width; n];
        Ok(Self::axis_box(&lo, &hi)?.with_label(format!("cube:{n}:{half_width}")))
    }

    pub fn axis_box(lo: &[T], hi: &[T]) -> Result<Self> {
        let n = lo.len();
        check_dim(n)?;
        if hi.len() != n {
            return Err(Error::DimensionMismatch("box corners".into()));
        }
        if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Degenerate("empty box".into()));
        }
        let v = (0..1usize << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { hi[i] } else { lo[i] }).collect())
            .collect();
        Self::from_vertices(v)
    }

    /// Cross-polytope `conv{±e_i}`.
    pub fn cross_polytope(n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut v = Vec::new();
        for i in 0..n {
            for s in [T::one(), -T::one()] {
                let mut e = vec![T::zero(); n];
                e[i] = s;
                v.push(e);
            }
        }
        Ok(Self::from_vertices(v)?.with_label(format!("cross:{n}")))
    }

    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        check_dim(center.len())?;
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Domain(format!("ball radius {radius} must be positive")));
        }
        Ok(Self::from_form(center.len(), Form::Ball { center, radius }))
    }

    pub fn unit_ball(n: usize) -> Result<Self> {
        Ok(Self::ball(vec![T::zero(); n], T::one())?.with_label(format!("ball:{n}:1")))
    }

    /// Hull of `v` points drawn uniformly on the unit sphere.
    pub fn random_polytope(n: usize, v: usize, seed: u64, stream_id: u64) -> Result<Self> {
        check_dim(n)?;
        if v < n + 1 {
            return Err(Error::Degenerate(format!("{v} points cannot span dimension {n}")));
        }
        let mut rng = RandomStream::new(seed, stream_id);
        let pts = (0..v)
            .map(|_| loop {
                let g: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
                let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if r > 1e-8 {
                    break g.iter().map(|x| T::c(x / r)).collect::<Vec<T>>();
                }
            })
            .collect();
        Ok(Self::from_vertices(pts)?.with_label(format!("random:{n}:{v}:{seed}:{stream_id}")))
    }

    /// Membership oracle body. The box must contain every accepted point.
    pub fn oracle(lo: Vec<T>, hi: Vec<T>, predicate: Predicate<T>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("oracle box".into()));
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::UnboundedSupport("oracle box must be finite".into()));
        }
        Ok(Self::from_form(lo.len(), Form::Oracle(OracleBody { predicate, lo, hi, frame: None, exact: Exact::Unknown })))
    }

    pub(crate) fn oracle_with(
        lo: Vec<T>,
        hi: Vec<T>,
        predicate: Predicate<T>,
        frame: Option<Frame<T>>,
        exact: Exact<T>,
    ) -> Self {
        Self::from_form(lo.len(), Form::Oracle(OracleBody { predicate, lo, hi, frame, exact }))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &Form<T> {
        &self.form
    }

    pub fn polytope(&self) -> Option<&Polytope<T>> {
        match &self.form {
            Form::VPolytope(p) => Some(p),
            _ => None,
        }
    }

    pub fn vertices(&self) -> Option<&[Vec<T>]> {
        self.polytope().map(|p| p.vertices())
    }

    pub fn is_polytope(&self) -> bool {
        matches!(self.form, Form::VPolytope(_))
    }

    /// Exact description of an oracle body, if its constructor knew one.
    pub fn exact(&self) -> Option<&Exact<T>> {
        match &self.form {
            Form::Oracle(o) => Some(&o.exact),
            _ => None,
        }
    }

    pub(crate) fn exact_body(&self) -> Option<&Body<T>> {
        match &self.form {
            Form::Oracle(OracleBody { exact: Exact::Is(b), .. }) => Some(b),
            _ => None,
        }
    }

    pub fn frame(&self) -> Option<&Frame<T>> {
        match &self.form {
            Form::Oracle(o) => o.frame.as_ref(),
            _ => None,
        }
    }

    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        match &self.form {
            Form::VPolytope(p) => {
                let mut lo = p.vertices[0].clone();
                let mut hi = p.vertices[0].clone();
                for v in &p.vertices {
                    for i in 0..self.dim {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Form::Ball { center, radius } => (
                center.iter().map(|c| *c - *radius).collect(),
                center.iter().map(|c| *c + *radius).collect(),
            ),
            Form::Oracle(o) => (o.lo.clone(), o.hi.clone()),
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.form {
            Form::VPolytope(p) => match &p.facets {
                Some(fs) => {
                    let tol = T::feas_tol() * hull::scale_of(&p.vertices);
                    fs.iter().all(|f| dot(&f.normal, x) <= f.offset + tol)
                }
                None => hull::in_hull_lp(&p.vertices, x),
            },
            Form::Ball { center, radius } => {
                let d2: T = x.iter().zip(center).map(|(a, c)| (*a - *c) * (*a - *c)).sum();
                d2.sqrt() <= *radius + T::feas_tol()
            }
            Form::Oracle(o) => (o.predicate)(x),
        }
    }

    /// Membership through the LP route, bypassing the facet cache.
    pub fn contains_lp(&self, x: &[T]) -> bool {
        match &self.form {
            Form::VPolytope(p) => x.len() == self.dim && hull::in_hull_lp(&p.vertices, x),
            _ => self.contains(x),
        }
    }

    pub fn support(&self, u: &[T]) -> Result<T> {
        self.check_direction(u)?;
        match &self.form {
            Form::VPolytope(p) => Ok(p.vertices.iter().map(|v| dot(v, u)).fold(T::neg_infinity(), T::max)),
            Form::Ball { center, radius } => Ok(dot(center, u) + *radius * norm(u)),
            Form::Oracle(o) => match &o.exact {
                Exact::Is(b) => b.support(u),
                _ => self.oracle_support(u),
            },
        }
    }

    /// Largest `rho` with `rho * u` in the body.
    pub fn radial(&self, u: &[T]) -> Result<T> {
        self.check_direction(u)?;
        if !self.origin_in_interior() {
            return Err(Error::Precondition("radial function needs the origin in the interior".into()));
        }
        match &self.form {
            Form::VPolytope(p) => {
                // maximize rho subject to sum l_i v_i - rho u = 0, sum l_i = 1, l >= 0
                let v = p.vertices.len();
                let mut obj = vec![T::zero(); v + 1];
                obj[v] = T::one();
                let mut lp = LpProblem::maximize(obj);
                for j in 0..self.dim {
                    let mut row: Vec<T> = p.vertices.iter().map(|w| w[j]).collect();
                    row.push(-u[j]);
                    lp.push(row, Sense::Eq, T::zero());
                }
                let mut row = vec![T::one(); v];
                row.push(T::zero());
                lp.push(row, Sense::Eq, T::one());
                let s = solve_lp(&lp)?;
                if !s.is_optimal() {
                    return Err(Error::Degenerate("radial LP did not reach an optimum".into()));
                }
                Ok(s.value)
            }
            Form::Ball { center, radius } => {
                // |rho u - c|^2 = r^2, larger root
                let a = dot(u, u);
                let b = -T::c(2.0) * dot(u, center);
                let c = dot(center, center) - *radius * *radius;
                let disc = (b * b - T::c(4.0) * a * c).max(T::zero());
                Ok((-b + disc.sqrt()) / (T::c(2.0) * a))
            }
            Form::Oracle(o) => {
                let reach = o.lo.iter().chain(&o.hi).fold(T::zero(), |m, x| m.max(x.abs()));
                let mut hi = reach * T::c(2.0) * T::c(self.dim as f64).sqrt() / norm(u);
                let mut lo = T::zero();
                let mu = |r: T| u.iter().map(|x| *x * r).collect::<Vec<T>>();
                while hi - lo > T::c(1e-12) * hi.max(T::one()) {
                    let mid = (lo + hi) / T::c(2.0);
                    if self.contains(&mu(mid)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(lo)
            }
        }
    }

    /// Whether the origin is an interior point.
    pub fn origin_in_interior(&self) -> bool {
        let zero = vec![T::zero(); self.dim];
        match &self.form {
            Form::VPolytope(p) => {
                if !p.full_dim {
                    return false;
                }
                match &p.facets {
                    Some(fs) => {
                        let tol = T::feas_tol() * hull::scale_of(&p.vertices);
                        fs.iter().all(|f| f.offset > tol)
                    }
                    None => {
                        let h = T::c(1e-7) * hull::scale_of(&p.vertices);
                        (0..self.dim).all(|i| {
                            [h, -h].iter().all(|s| {
                                let mut e = zero.clone();
                                e[i] = *s;
                                hull::in_hull_lp(&p.vertices, &e)
                            })
                        })
                    }
                }
            }
            Form::Ball { center, radius } => norm(center) < *radius,
            Form::Oracle(_) => {
                let h = T::c(1e-7);
                self.contains(&zero)
                    && (0..self.dim).all(|i| {
                        [h, -h].iter().all(|s| {
                            let mut e = zero.clone();
                            e[i] = *s;
                            self.contains(&e)
                        })
                    })
            }
        }
    }

    /// Whether `x ↦ -x` maps the body onto itself.
    pub fn is_symmetric(&self) -> bool {
        match &self.form {
            Form::VPolytope(p) => {
                let tol = T::feas_tol() * hull::scale_of(&p.vertices);
                p.vertices.iter().all(|v| {
                    p.vertices.iter().any(|w| v.iter().zip(w).all(|(a, b)| (*a + *b).abs() <= tol))
                })
            }
            Form::Ball { center, .. } => center.iter().all(|c| c.abs() <= T::feas_tol()),
            Form::Oracle(_) => self.exact_body().is_some_and(|b| b.is_symmetric()),
        }
    }

    fn check_direction(&self, u: &[T]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("direction has {} coordinates, body {}", u.len(), self.dim)));
        }
        if !(norm(u) > T::zero()) {
            return Err(Error::Domain("zero direction".into()));
        }
        Ok(())
    }

    /// Support of an oracle body: bisection toward `u` from every accepted
    /// probe of a coarse box grid.
    fn oracle_support(&self, u: &[T]) -> Result<T> {
        let (lo, hi) = self.bounding_box();
        let per_axis = match self.dim {
            1 => 33,
            2 => 17,
            3 => 9,
            _ => 5,
        };
        let diam = norm(&lo.iter().zip(&hi).map(|(a, b)| *b - *a).collect::<Vec<_>>());
        let unit: Vec<T> = u.iter().map(|x| *x / norm(u)).collect();
        let mut best: Option<T> = None;
        let total = usize::pow(per_axis, self.dim as u32);
        for k in 0..total {
            let mut rem = k;
            let p: Vec<T> = (0..self.dim)
                .map(|i| {
                    let j = rem % per_axis;
                    rem /= per_axis;
                    lo[i] + (hi[i] - lo[i]) * T::c(j as f64 / (per_axis - 1) as f64)
                })
                .collect();
            if !self.contains(&p) {
                continue;
            }
            let (mut a, mut b) = (T::zero(), diam);
            while b - a > T::c(1e-9) * diam.max(T::one()) {
                let m = (a + b) / T::c(2.0);
                let q: Vec<T> = p.iter().zip(&unit).map(|(x, e)| *x + *e * m).collect();
                if self.contains(&q) {
                    a = m;
                } else {
                    b = m;
                }
            }
            let end: Vec<T> = p.iter().zip(&unit).map(|(x, e)| *x + *e * a).collect();
            let val = dot(&end, u);
            best = Some(best.map_or(val, |v: T| v.max(val)));
        }
        best.ok_or_else(|| Error::Degenerate("oracle body accepted no probe point".into()))
    }
}

#[cfg(test)]
mod tests;
