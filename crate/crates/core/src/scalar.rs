//! Scalar abstraction shared by the geometric substrate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point types the LP solver, quadrature and body calculus run on.
///
/// Tolerances are per type: `f64` uses the 1e-9 feasibility / 1e-12 pivot
/// thresholds the rest of the crate assumes, `f32` widens them to what its
/// mantissa can actually resolve.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Feasibility / membership tolerance.
    fn feas_tol() -> Self;
    /// Smallest pivot the simplex method accepts.
    fn pivot_tol() -> Self;
    /// Distance below which two vertices are merged.
    fn merge_tol() -> Self;

    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn feas_tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-12
    }
    fn merge_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn feas_tol() -> Self {
        2e-4
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn merge_tol() -> Self {
        1e-6
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
