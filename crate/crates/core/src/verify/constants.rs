use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{Builder, Direction, Hypothesis, IneqReport, Severity};
use crate::corekit::{binomial, gauss_legendre};
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::integrate::{Estimate, IntegrateConfig};

/// Quadrature order for the α constants.
pub const ALPHA_ORDER: usize = 65;

/// `∫_0^1 (1 - θ^p)^n θ^{pq} dθ` two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaPair {
    pub closed: f64,
    pub quadrature: f64,
}

/// `Γ(1/p + q) Γ(1 + n) / (p Γ(1 + n + 1/p + q))`; `p = ∞` gives 1 when
/// `q = 0`.
pub(crate) fn alpha_closed(n: usize, p: f64, q: f64) -> f64 {
    if p.is_infinite() {
        return if q == 0.0 { 1.0 } else { 0.0 };
    }
    let a = 1.0 / p + q;
    (ln_gamma(a) + ln_gamma(1.0 + n as f64) - p.ln() - ln_gamma(1.0 + n as f64 + a)).exp()
}

/// Gauss-Legendre nodes in `θ` after substituting `θ = s^m`, with `m` the
/// smallest integer making `θ^p` smooth in `s` when `1/p` is an integer.
pub(crate) fn theta_rule(p: f64, order: usize) -> Result<Vec<(f64, f64)>> {
    let inv = 1.0 / p;
    let m = if p.is_infinite() {
        1.0
    } else if (inv - inv.round()).abs() < 1e-9 {
        inv.round().max(1.0)
    } else {
        inv.ceil().max(1.0)
    };
    let rule = gauss_legendre::<f64>(order, 0.0, 1.0)?;
    Ok(rule.iter().map(|(s, w)| (s.powf(m), w * m * s.powf(m - 1.0))).collect())
}

pub fn alpha_constant(n: usize, p: f64, q: f64) -> Result<AlphaPair> {
    if n == 0 || !(p > 0.0) || !(q >= 0.0) {
        return Err(Error::Domain(format!("alpha needs n >= 1, p > 0, q >= 0 (got {n}, {p}, {q})")));
    }
    let quadrature = theta_rule(p, ALPHA_ORDER)?
        .iter()
        .map(|&(t, w)| {
            let tp = if p.is_infinite() { if t < 1.0 { 0.0 } else { 1.0 } } else { t.powf(p) };
            w * (1.0 - tp).powi(n as i32) * tp.powf(q)
        })
        .sum();
    Ok(AlphaPair { closed: alpha_closed(n, p, q), quadrature })
}

const LEMMA_PANELS: usize = 8;
const LEMMA_ORDER: usize = 33;
const MONOTONE_PROBES: usize = 1000;

/// `∫_0^x (1 - t/x)^n t^{m-1} φ(t) dt >= binom(n + m, n)^{-1} ∫_0^x t^{m-1} φ(t) dt`
/// for a density `φ` decreasing on `[0, ∞)`.
pub fn check_lemma_f(phi: &Density, n: usize, m: usize, x: f64, cfg: &IntegrateConfig) -> Result<IneqReport> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch(format!("expected a one-dimensional density, got dimension {}", phi.dim())));
    }
    if n == 0 || m == 0 || !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("need n, m >= 1 and x > 0 (got {n}, {m}, {x})")));
    }
    let c = 1.0 / binomial((n + m) as u64, n as u64);
    let mut b = Builder::new("lemma_F", "decreasing", cfg);
    b.density(phi).note("n", n).note("m", m).note("x", x);
    let declared = phi.flags().radially_decreasing;
    let values: Vec<f64> = (0..=MONOTONE_PROBES).map(|i| phi.eval(&[x * i as f64 / MONOTONE_PROBES as f64])).collect();
    let monotone = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
    b.hypothesis(Hypothesis::checked(
        "density decreasing on [0, x]",
        Severity::Required,
        declared && monotone,
        format!("declared: {declared}; {MONOTONE_PROBES}-step grid monotone: {monotone}"),
    ));
    if b.failed() {
        return Ok(b.abort(c, Direction::Lower));
    }
    let h = x / LEMMA_PANELS as f64;
    let mut lhs = 0.0;
    let mut base = 0.0;
    for k in 0..LEMMA_PANELS {
        let rule = gauss_legendre::<f64>(LEMMA_ORDER, k as f64 * h, (k + 1) as f64 * h)?;
        for (t, w) in rule.iter() {
            let common = w * t.powi(m as i32 - 1) * phi.eval(&[t]);
            lhs += common * (1.0 - t / x).powi(n as i32);
            base += common;
        }
    }
    let nodes = (LEMMA_PANELS * LEMMA_ORDER) as u64;
    Ok(b.finish(Estimate::quadrature(lhs, nodes), Estimate::quadrature(c * base, nodes), c, Direction::Lower))
}
