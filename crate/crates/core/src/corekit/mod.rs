//! Numeric substrate: dense LP, counter-based random streams, Gauss-Legendre
//! quadrature and a few special functions.

pub mod lp;
pub mod quadrature;
pub mod rng;

pub use lp::{solve_lp, Goal, LpProblem, LpSolution, LpStatus, Sense};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use rng::RandomStream;

/// `binom(n, k)` for non-negative integers, exact in `f64` for the sizes used here.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// Generalized binomial coefficient through the Gamma function.
pub fn binomial_real(a: f64, b: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if (a.fract() == 0.0) && (b.fract() == 0.0) && a >= 0.0 && b >= 0.0 {
        return binomial(a as u64, b as u64);
    }
    (ln_gamma(a + 1.0) - ln_gamma(b + 1.0) - ln_gamma(a - b + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_binomials() {
        assert_eq!(binomial(2, 1), 2.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert!((binomial_real(3.5, 1.0) - 3.5).abs() < 1e-12);
    }
}
