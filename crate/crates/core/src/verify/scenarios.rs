use std::f64::consts::PI;

use super::{decide, named_variants, row, Builder, Direction, IneqReport, Side, SupInfo, Verdict};
use crate::bodies::{Body, SubspaceSpec};
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::integrate::{
    grid_maximize, measure, sup_translate, volume, Estimate, IntegrateConfig, MethodPreference, SearchRegion,
};

named_variants!(Scenario {
    Ring => "ring",
    Wedge => "wedge",
    Parallelogram => "parallelogram",
});

#[derive(Clone, Debug, Default)]
pub struct ScenarioParams {
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub thetas: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
}

pub const RING_EPS: f64 = 1e-5;
pub const WEDGE_THETAS: [f64; 3] = [0.5, 0.1, 0.02];
pub const PARALLELOGRAM_ALPHAS: [f64; 3] = [0.3, 0.9, 1.4];
/// Refinement rounds for the ring's sup search; the margin being
/// demonstrated is a few parts in 10^5.
const RING_ROUNDS: usize = 40;

pub fn run_counterexample(id: Scenario, params: &ScenarioParams, cfg: &IntegrateConfig) -> Result<IneqReport> {
    match id {
        Scenario::Ring => ring(params, cfg),
        Scenario::Wedge => wedge(params, cfg),
        Scenario::Parallelogram => parallelogram(params, cfg),
    }
}

fn ring(params: &ScenarioParams, cfg: &IntegrateConfig) -> Result<IneqReport> {
    let eps = params.eps.unwrap_or(RING_EPS);
    if !(eps > 0.0 && eps < 1e-4) {
        return Err(Error::Domain(format!("ring needs 0 < eps < 1e-4, got {eps}")));
    }
    let delta = params.delta.unwrap_or(eps.sqrt() / 100.0);
    let phi = Density::ring(eps, delta)?;
    let disc = Body::unit_ball(2)?;
    let c = 6.0;
    let mut b = Builder::new("counterexample", "ring", cfg);
    b.body("B", &disc).density(&phi).note("eps", eps).note("delta", delta).expect(Verdict::Violated);
    let lhs = measure(&phi, &disc.scaled(2.0)?, cfg)?;
    let closed = 4.0 * PI * eps + PI * (delta * delta - eps * eps);
    b.note("closed_form_lhs", closed).note("closed_form_rel_error", (lhs.value - closed).abs() / closed);
    let scfg = IntegrateConfig { refine_rounds: cfg.refine_rounds.max(RING_ROUNDS), ..cfg.clone() };
    let region = SearchRegion::boxed(vec![-3.0; 2], vec![3.0; 2]);
    let sup = sup_translate(&phi, &disc, &region, &scfg)?;
    b.sup("sup_x mu(x+B)", Side::Rhs, &sup);
    Ok(b.finish(lhs, sup.estimate.scale(c), c, Direction::Upper))
}

/// The wedge density is the indicator of the cone of angle `θ` along the
/// positive first axis; this triangle covers it inside `[-r, r]^2`.
fn cone_patch(theta: f64, r: f64) -> Result<Body<f64>> {
    Body::from_vertices(vec![vec![0.0, 0.0], vec![r, 0.0], vec![r, r * theta.tan()]])
}

fn wedge(params: &ScenarioParams, cfg: &IntegrateConfig) -> Result<IneqReport> {
    let thetas = params.thetas.clone().unwrap_or_else(|| WEDGE_THETAS.to_vec());
    if thetas.is_empty() || thetas.iter().any(|t| !(*t > 0.0 && *t < PI / 2.0)) {
        return Err(Error::Domain("wedge angles must lie in (0, pi/2)".into()));
    }
    let mut b = Builder::new("counterexample", "wedge", cfg);
    b.expect(Verdict::Violated);
    let mut diffs = Vec::new();
    let mut sups = Vec::new();
    for &theta in &thetas {
        let phi = Density::wedge(theta)?;
        b.density(&phi);
        let depth = 2.0 / theta;
        let center = [depth * (theta / 2.0).cos(), depth * (theta / 2.0).sin()];
        let k = Body::axis_box(&[center[0] - 0.5, center[1] - 0.5], &[center[0] + 0.5, center[1] + 0.5])?;
        let cone = cone_patch(theta, depth + 4.0)?;
        // K - K = [-1, 1]^2 sits at the apex of the wedge.
        let diff = volume(&k.difference_body()?.intersect(&cone)?, cfg)?;
        let region = SearchRegion::boxed(vec![-1.0; 2], vec![1.0; 2]);
        let (arg, history) = grid_maximize(&region, cfg.search_points, cfg.refine_rounds, vec![vec![0.0, 0.0]], |x| {
            k.translated(x).and_then(|kx| kx.intersect(&cone)).and_then(|s| volume(&s, cfg)).map_or(0.0, |e| e.value)
        })?;
        let sup = volume(&k.translated(&arg)?.intersect(&cone)?, cfg)?;
        let converged = super::sections::converged(&history);
        b.sup_info(SupInfo { name: format!("sup_x mu(x+K), theta = {theta}"), side: Side::Rhs, converged, argmax: arg, history });
        b.row(row(&[("theta", theta), ("mu_diff", diff.value), ("sup_translate", sup.value), ("vol_K", 1.0)]));
        diffs.push(diff);
        sups.push(sup);
    }
    let decreasing = diffs.windows(2).all(|w| w[1].value < w[0].value);
    let fraction = diffs.last().unwrap().value / diffs[0].value;
    let sup_close = sups.iter().all(|s| (s.value - 1.0).abs() <= 0.05);
    b.note("mu_diff_decreasing", decreasing).note("mu_diff_final_fraction", fraction).note("sup_within_5pct", sup_close);
    // A reverse bound sup μ(x+K) <= C μ(K-K), with C fitted on the first
    // angle, fails at the last one.
    let fitted = sups[0].value / diffs[0].value;
    b.note("fitted_constant", fitted);
    let last = diffs.len() - 1;
    let lhs = diffs[last].scale(fitted);
    let rhs = sups[last];
    let trend_ok = decreasing && fraction < 0.1 && sup_close;
    let verdict = if trend_ok { decide(&lhs, &rhs, Direction::Lower, true) } else { Verdict::Inconclusive };
    Ok(b.finish_with(lhs, rhs, fitted, Direction::Lower, verdict))
}

/// `conv{(±1, ±tan α ± 1)}` with the signs of the two coordinates tied.
pub fn tilted_parallelogram(alpha: f64) -> Result<Body<f64>> {
    let t = alpha.tan();
    Ok(Body::from_vertices(vec![vec![1.0, t + 1.0], vec![1.0, t - 1.0], vec![-1.0, -t + 1.0], vec![-1.0, -t - 1.0]])?
        .with_label(format!("parallelogram:{alpha}")))
}

fn parallelogram(params: &ScenarioParams, cfg: &IntegrateConfig) -> Result<IneqReport> {
    let alphas = params.alphas.clone().unwrap_or_else(|| PARALLELOGRAM_ALPHAS.to_vec());
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a < PI / 2.0)) {
        return Err(Error::Domain("parallelogram angles must lie in (0, pi/2)".into()));
    }
    let c = 2.0;
    let h = SubspaceSpec::new(2, vec![0])?;
    let mu1 = Density::exp_sq(1)?;
    let mu2 = Density::exp_sq(2)?;
    let qcfg = IntegrateConfig { method: MethodPreference::Grid, ..cfg.clone() };
    let mut b = Builder::new("counterexample", "parallelogram", cfg);
    b.density(&mu1).density(&mu2).note("subspace", vec![0]).expect(Verdict::Violated);
    let mut ratios = Vec::new();
    let mut last: Option<(Estimate, Estimate)> = None;
    for &alpha in &alphas {
        let k = tilted_parallelogram(alpha)?;
        b.body(&format!("K_{alpha}"), &k);
        let proj = measure(&mu1, &k.project(&h)?, &qcfg)?;
        let section = measure(&mu1, &k.slice(&h, &[0.0])?, &qcfg)?;
        let lhs = proj.mul(section);
        let rhs = measure(&mu2, &k, &qcfg)?.scale(c);
        let ratio = lhs.value / rhs.value;
        let t = alpha.tan();
        b.row(row(&[("alpha", alpha), ("lhs", lhs.value), ("rhs", rhs.value), ("ratio", ratio), ("projection_inside", (t <= 1.0) as u8 as f64)]));
        ratios.push(ratio);
        last = Some((lhs, rhs));
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let growth = ratios.last().unwrap() / ratios[0];
    b.note("ratio_increasing", increasing).note("ratio_growth", growth);
    let (lhs, rhs) = last.unwrap();
    Ok(b.finish(lhs, rhs, c, Direction::Upper))
}
