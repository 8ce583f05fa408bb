use super::hull;
use super::{Body, Exact, Form, OracleBody};
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
}

impl<T: Real> Body<T> {
    /// Exact Lebesgue measure for polytopes up to dimension three, simplices,
    /// axis boxes and balls.
    pub fn exact_volume(&self) -> Result<T> {
        match &self.form {
            Form::Ball { radius, .. } => Ok(T::c(unit_ball_volume(self.dim)) * radius.powi(self.dim as i32)),
            Form::Oracle(OracleBody { exact, .. }) => match exact {
                Exact::Is(b) => b.exact_volume(),
                Exact::Empty => Ok(T::zero()),
                Exact::Unknown => Err(Error::Unsupported("exact volume of an oracle body".into())),
            },
            Form::VPolytope(p) => {
                let n = self.dim;
                if !p.full_dim {
                    return Ok(T::zero());
                }
                let v = &p.vertices;
                if v.len() == n + 1 {
                    let m = v[1..].iter().map(|w| w.iter().zip(&v[0]).map(|(a, b)| *a - *b).collect()).collect();
                    let fact: f64 = (1..=n).map(|k| k as f64).product();
                    return Ok(hull::det(m).abs() / T::c(fact));
                }
                if let Some(vol) = box_volume(v) {
                    return Ok(vol);
                }
                if n <= 3 {
                    return hull_volume(v).ok_or_else(|| Error::Unsupported("too many vertices for the exact path".into()));
                }
                Err(Error::Unsupported(format!("exact volume of a general polytope in dimension {n}")))
            }
        }
    }
}

fn box_volume<T: Real>(v: &[Vec<T>]) -> Option<T> {
    let n = v[0].len();
    if v.len() != 1 << n {
        return None;
    }
    let tol = T::feas_tol() * hull::scale_of(v);
    let mut vol = T::one();
    for i in 0..n {
        let lo = v.iter().map(|p| p[i]).fold(T::infinity(), T::min);
        let hi = v.iter().map(|p| p[i]).fold(T::neg_infinity(), T::max);
        if !v.iter().all(|p| (p[i] - lo).abs() <= tol || (p[i] - hi).abs() <= tol) {
            return None;
        }
        vol = vol * (hi - lo);
    }
    Some(vol)
}

/// Pyramid decomposition over facets from the vertex centroid.
fn hull_volume<T: Real>(v: &[Vec<T>]) -> Option<T> {
    let d = v[0].len();
    if d == 1 {
        let lo = v.iter().map(|p| p[0]).fold(T::infinity(), T::min);
        let hi = v.iter().map(|p| p[0]).fold(T::neg_infinity(), T::max);
        return Some(hi - lo);
    }
    let scale = hull::scale_of(v);
    let tol = T::feas_tol() * scale;
    if hull::affine_rank(v, tol) < d {
        return Some(T::zero());
    }
    let facets = hull::facets(v)?;
    let c: Vec<T> = (0..d).map(|i| v.iter().map(|p| p[i]).sum::<T>() / T::c(v.len() as f64)).collect();
    let mut total = T::zero();
    for f in &facets {
        let basis = complement_basis(&f.normal);
        let on: Vec<Vec<T>> = v
            .iter()
            .filter(|p| (dot(&f.normal, p) - f.offset).abs() <= tol * T::c(10.0))
            .map(|p| basis.iter().map(|b| dot(b, p)).collect())
            .collect();
        let h = f.offset - dot(&f.normal, &c);
        let area = if on.len() < d { T::zero() } else { hull_volume(&on)? };
        total = total + h * area / T::c(d as f64);
    }
    Some(total)
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `a`.
fn complement_basis<T: Real>(a: &[T]) -> Vec<Vec<T>> {
    let d = a.len();
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(d - 1);
    let mut axes: Vec<usize> = (0..d).collect();
    axes.sort_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).unwrap());
    for &k in &axes {
        if basis.len() == d - 1 {
            break;
        }
        let mut e = vec![T::zero(); d];
        e[k] = T::one();
        let p = dot(&e, a);
        for (x, y) in e.iter_mut().zip(a) {
            *x = *x - p * *y;
        }
        for b in &basis {
            let p = dot(&e, b);
            for (x, y) in e.iter_mut().zip(b) {
                *x = *x - p * *y;
            }
        }
        let len = dot(&e, &e).sqrt();
        if len > T::c(1e-6) {
            basis.push(e.iter().map(|x| *x / len).collect());
        }
    }
    basis
}
