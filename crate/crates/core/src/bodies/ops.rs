//! Minkowski calculus, derived bodies, projections and sections.

use std::sync::Arc;

use super::hull::{self, Facet};
use super::{Body, Exact, Form, Frame, OracleBody, Polytope, SubspaceSpec, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

impl<T: Real> Body<T> {
    /// Vertex form of the body, looking through exact oracle descriptions.
    fn as_polytope(&self) -> Option<&Polytope<T>> {
        match &self.form {
            Form::VPolytope(p) => Some(p),
            Form::Oracle(OracleBody { exact: Exact::Is(b), .. }) => b.polytope(),
            _ => None,
        }
    }

    /// `x ↦ scale·x + shift`.
    pub fn transform(&self, scale: T, shift: &[T]) -> Result<Self> {
        if scale == T::zero() || !scale.is_finite() {
            return Err(Error::Degenerate(format!("scale {scale} is not allowed")));
        }
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch("translation vector".into()));
        }
        let map = |x: &[T]| -> Vec<T> { x.iter().zip(shift).map(|(a, v)| scale * *a + *v).collect() };
        let form = match &self.form {
            Form::VPolytope(p) => {
                let vertices: Vec<Vec<T>> = p.vertices.iter().map(|v| map(v)).collect();
                let sign = if scale > T::zero() { T::one() } else { -T::one() };
                let facets = p.facets.as_ref().map(|fs| {
                    Arc::new(
                        fs.iter()
                            .map(|f| {
                                let normal: Vec<T> = f.normal.iter().map(|a| *a * sign).collect();
                                let offset = scale.abs() * f.offset + dot(&normal, shift);
                                Facet { normal, offset }
                            })
                            .collect(),
                    )
                });
                Form::VPolytope(Polytope { vertices, facets, full_dim: p.full_dim })
            }
            Form::Ball { center, radius } => Form::Ball { center: map(center), radius: *radius * scale.abs() },
            Form::Oracle(o) => {
                let a = map(&o.lo);
                let b = map(&o.hi);
                let lo = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
                let hi = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
                let inner = o.predicate.clone();
                let offset = shift.to_vec();
                let predicate: super::Predicate<T> = Arc::new(move |y: &[T]| {
                    let x: Vec<T> = y.iter().zip(&offset).map(|(a, v)| (*a - *v) / scale).collect();
                    inner(&x)
                });
                let exact = match &o.exact {
                    Exact::Is(b) => Exact::Is(Arc::new(b.transform(scale, shift)?)),
                    e => e.clone(),
                };
                Form::Oracle(OracleBody { predicate, lo, hi, frame: None, exact })
            }
        };
        Ok(Body { dim: self.dim, form, label: None })
    }

    pub fn reflect(&self) -> Self {
        self.transform(-T::one(), &vec![T::zero(); self.dim]).expect("reflection is always valid")
    }

    pub fn scaled(&self, scale: T) -> Result<Self> {
        self.transform(scale, &vec![T::zero(); self.dim])
    }

    pub fn translated(&self, shift: &[T]) -> Result<Self> {
        self.transform(T::one(), shift)
    }

    pub fn minkowski_sum(&self, other: &Body<T>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        if let (Form::Ball { center: c1, radius: r1 }, Form::Ball { center: c2, radius: r2 }) = (&self.form, &other.form) {
            let c = c1.iter().zip(c2).map(|(a, b)| *a + *b).collect();
            return Body::ball(c, *r1 + *r2);
        }
        match (self.as_polytope(), other.as_polytope()) {
            (Some(p), Some(q)) => {
                let mut sums = Vec::with_capacity(p.vertices.len() * q.vertices.len());
                for a in &p.vertices {
                    for b in &q.vertices {
                        sums.push(a.iter().zip(b).map(|(x, y)| *x + *y).collect());
                    }
                }
                Body::hull_of(sums)
            }
            _ => Err(Error::Form("Minkowski sums need two polytopes or two balls".into())),
        }
    }

    /// `K - K`.
    pub fn difference_body(&self) -> Result<Self> {
        if !matches!(self.form, Form::VPolytope(_) | Form::Ball { .. }) {
            return Err(Error::Form("difference body needs a polytope or a ball".into()));
        }
        self.minkowski_sum(&self.reflect())
    }

    /// `conv(K ∪ L)`.
    pub fn conv_union(&self, other: &Body<T>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        match (self.as_polytope(), other.as_polytope()) {
            (Some(p), Some(q)) => Body::hull_of(p.vertices.iter().chain(&q.vertices).cloned().collect()),
            _ => Err(Error::Form("convex hull of a union needs two polytopes".into())),
        }
    }

    /// `conv(K × {0} ∪ (−K) × {1})` in dimension `n + 1`.
    pub fn ck_body(&self) -> Result<Self> {
        let p = self.polytope().ok_or_else(|| Error::Form("CK body needs a polytope".into()))?;
        if self.dim + 1 > MAX_DIM {
            return Err(Error::Domain(format!("CK body of a {}-dimensional body exceeds the dimension cap", self.dim)));
        }
        if !self.contains_lp(&vec![T::zero(); self.dim]) {
            return Err(Error::Precondition("CK body requires the origin in K".into()));
        }
        let mut pts = Vec::with_capacity(2 * p.vertices.len());
        for v in &p.vertices {
            let mut a = v.clone();
            a.push(T::zero());
            pts.push(a);
            let mut b: Vec<T> = v.iter().map(|x| -*x).collect();
            b.push(T::one());
            pts.push(b);
        }
        Body::hull_of(pts)
    }

    /// `(1 − θ)K − θK`.
    pub fn theta_difference(&self, theta: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::one()) {
            return Err(Error::Domain(format!("theta {theta} outside [0, 1]")));
        }
        if theta == T::zero() {
            return Ok(self.clone());
        }
        if theta == T::one() {
            return Ok(self.reflect());
        }
        self.scaled(T::one() - theta)?.minkowski_sum(&self.scaled(-theta)?)
    }

    /// Orthogonal projection onto the coordinate subspace `h`.
    pub fn project(&self, h: &SubspaceSpec) -> Result<Self> {
        if h.ambient() != self.dim {
            return Err(Error::DimensionMismatch(format!("subspace of R^{} for a body in R^{}", h.ambient(), self.dim)));
        }
        if let Form::Ball { center, radius } = &self.form {
            return Body::ball(h.project_point(center), *radius);
        }
        match self.as_polytope() {
            Some(p) => Body::hull_of(p.vertices.iter().map(|v| h.project_point(v)).collect()),
            None => Err(Error::Form("projection of a general oracle body".into())),
        }
    }

    /// `K ∩ (x0 + H^⊥)` in the coordinates of `H^⊥`, with `x0` given in `H`.
    pub fn slice(&self, h: &SubspaceSpec, x0: &[T]) -> Result<Self> {
        if h.ambient() != self.dim || x0.len() != h.dim() {
            return Err(Error::DimensionMismatch("slice subspace or offset".into()));
        }
        let perp = h.complement();
        let frame = Frame {
            ambient: self.dim,
            free: perp.clone(),
            fixed: h.indices().iter().copied().zip(x0.iter().copied()).collect(),
        };
        let exact = self.slice_exact(h, x0, &perp);
        let (lo, hi) = match &exact {
            Exact::Is(b) => b.bounding_box(),
            _ => {
                let (lo, hi) = self.bounding_box();
                (perp.iter().map(|&i| lo[i]).collect(), perp.iter().map(|&i| hi[i]).collect())
            }
        };
        let body = self.clone();
        let f = frame.clone();
        let predicate: super::Predicate<T> = Arc::new(move |y: &[T]| body.contains(&f.embed(y)));
        Ok(Body::oracle_with(lo, hi, predicate, Some(frame), exact))
    }

    fn slice_exact(&self, h: &SubspaceSpec, x0: &[T], perp: &[usize]) -> Exact<T> {
        match &self.form {
            Form::Ball { center, radius } => {
                let off: T = h.indices().iter().zip(x0).map(|(&i, x)| (*x - center[i]) * (*x - center[i])).sum();
                let r2 = *radius * *radius - off;
                if r2 <= T::zero() {
                    return Exact::Empty;
                }
                let c = perp.iter().map(|&i| center[i]).collect();
                match Body::ball(c, r2.sqrt()) {
                    Ok(b) => Exact::Is(Arc::new(b)),
                    Err(_) => Exact::Unknown,
                }
            }
            _ => match self.as_polytope().and_then(|p| p.facets.as_ref()) {
                Some(fs) => {
                    let scale = hull::scale_of(&self.as_polytope().unwrap().vertices);
                    let tol = T::feas_tol() * scale;
                    let mut rows = Vec::new();
                    for f in fs.iter() {
                        let fixed: T = h.indices().iter().zip(x0).map(|(&i, x)| f.normal[i] * *x).sum();
                        let normal: Vec<T> = perp.iter().map(|&i| f.normal[i]).collect();
                        let offset = f.offset - fixed;
                        let len = normal.iter().map(|a| *a * *a).sum::<T>().sqrt();
                        if len <= T::c(1e-12) {
                            if offset < -tol {
                                return Exact::Empty;
                            }
                            continue;
                        }
                        rows.push(Facet { normal: normal.iter().map(|a| *a / len).collect(), offset: offset / len });
                    }
                    from_rows(&rows, perp.len())
                }
                None => Exact::Unknown,
            },
        }
    }

    /// `K ∩ L` as an oracle body.
    pub fn intersect(&self, other: &Body<T>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        let (l1, h1) = self.bounding_box();
        let (l2, h2) = other.bounding_box();
        let mut lo: Vec<T> = l1.iter().zip(&l2).map(|(a, b)| a.max(*b)).collect();
        let mut hi: Vec<T> = h1.iter().zip(&h2).map(|(a, b)| a.min(*b)).collect();
        let box_empty = lo.iter().zip(&hi).any(|(a, b)| a > b);
        let exact = if box_empty {
            Exact::Empty
        } else {
            match (
                self.as_polytope().and_then(|p| p.facets.as_ref()),
                other.as_polytope().and_then(|p| p.facets.as_ref()),
            ) {
                (Some(a), Some(b)) => {
                    let rows: Vec<Facet<T>> = a.iter().chain(b.iter()).cloned().collect();
                    from_rows(&rows, self.dim)
                }
                _ => Exact::Unknown,
            }
        };
        if box_empty {
            hi = lo.clone();
        } else if let Exact::Is(b) = &exact {
            (lo, hi) = b.bounding_box();
        }
        let (a, b) = (self.clone(), other.clone());
        let predicate: super::Predicate<T> = Arc::new(move |x: &[T]| a.contains(x) && b.contains(x));
        Ok(Body::oracle_with(lo, hi, predicate, None, exact))
    }
}

fn from_rows<T: Real>(rows: &[Facet<T>], d: usize) -> Exact<T> {
    match hull::hrep_vertices(rows, d) {
        Some(v) if v.is_empty() => Exact::Empty,
        Some(v) => match Body::hull_of(v) {
            Ok(b) => Exact::Is(Arc::new(b)),
            Err(_) => Exact::Unknown,
        },
        None => Exact::Unknown,
    }
}
