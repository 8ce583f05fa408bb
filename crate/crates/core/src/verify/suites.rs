use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    alpha_constant, check_lemma_f, named_variants, run_counterexample, verify_ck, verify_difference_body, verify_functional, verify_shifted, CkVariant,
    DiffVariant, FunctionalInputs, FunctionalVariant, IneqReport, Scenario, ScenarioParams, ShiftedVariant, Verdict,
};
use crate::bodies::Body;
use crate::corekit::binomial;
use crate::corekit::rng::mix;
use crate::densities::Density;
use crate::error::Result;
use crate::functional::QcFunction;
use crate::integrate::IntegrateConfig;

named_variants!(SuiteName {
    EqualityBattery => "equality-battery",
    SoundnessSweep => "soundness-sweep",
    Counterexamples => "counterexamples",
    Constants => "constants",
});

/// One CSV line of a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub inequality: String,
    pub variant: String,
    pub params: String,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    pub ratio: f64,
    pub verdict: String,
    pub pass: bool,
}

impl SuiteRow {
    pub fn from_report(r: &IneqReport, params: String, pass: bool) -> Self {
        SuiteRow {
            inequality: r.inequality.clone(),
            variant: r.variant.clone(),
            params,
            lhs: r.lhs.value,
            lhs_se: r.lhs.std_error,
            rhs: r.rhs.value,
            rhs_se: r.rhs.std_error,
            ratio: r.ratio,
            verdict: r.verdict.as_str().into(),
            pass,
        }
    }
}

/// Polytopes per dimension in the soundness sweep.
pub const SWEEP_POLYTOPES: usize = 30;
pub const SWEEP_DIMS: [usize; 2] = [2, 3];
pub const SWEEP_DENSITIES: [&str; 3] = ["lebesgue", "gaussian", "exp-norm"];

pub fn run_suite(name: SuiteName, cfg: &IntegrateConfig) -> Result<Vec<SuiteRow>> {
    match name {
        SuiteName::EqualityBattery => equality_battery(cfg),
        SuiteName::SoundnessSweep => soundness_sweep(cfg),
        SuiteName::Counterexamples => counterexamples(cfg),
        SuiteName::Constants => constants(cfg),
    }
}

fn sub(cfg: &IntegrateConfig, i: u64) -> IntegrateConfig {
    cfg.stream(mix(cfg.stream ^ mix(0x5017_e000 + i)))
}

fn equality_row(r: &IneqReport, params: String) -> SuiteRow {
    SuiteRow::from_report(r, params, r.verdict == Verdict::Equality)
}

fn equality_battery(cfg: &IntegrateConfig) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for n in 1..=3usize {
        let t = Body::simplex(n)?;
        let leb = Density::lebesgue(n)?;
        let p = format!("simplex:{n}");
        let c = sub(cfg, n as u64 * 16);
        rows.push(equality_row(&verify_difference_body(DiffVariant::Classical, &leb, &t, None, &c)?, p.clone()));
        rows.push(equality_row(&verify_difference_body(DiffVariant::Radial, &leb, &t, None, &c)?, p.clone()));
        rows.push(equality_row(&verify_ck(CkVariant::ClassicalCk, &leb, &t, None, &c)?, p.clone()));
        rows.push(equality_row(&verify_ck(CkVariant::ClassicalConv, &leb, &t, None, &c)?, p.clone()));
        rows.push(equality_row(&verify_ck(CkVariant::MeasureCk, &leb, &t, None, &c)?, p.clone()));
        rows.push(equality_row(&verify_shifted(ShiftedVariant::Quasi, &leb, &t, &vec![0.0; n], &c)?, format!("{p};omega=0")));
        let f = QcFunction::indicator(t.clone());
        let inputs = FunctionalInputs { f: &f, g: None, phi: None, h: None, p: None };
        rows.push(equality_row(&verify_functional(FunctionalVariant::DeltaDiff, inputs, &c)?, format!("indicator:{p}")));
    }
    Ok(rows)
}

/// Random polytope `i` of dimension `n`, translated so that its vertex
/// centroid is the origin.
pub fn sweep_polytope(n: usize, i: usize, seed: u64) -> Result<Body<f64>> {
    let v = n + 2 + i % 4;
    let k = Body::random_polytope(n, v, seed, mix(0x5eed_0000 + (n * 1000 + i) as u64))?;
    let verts = k.vertices().expect("polytope");
    let c: Vec<f64> = (0..n).map(|j| -verts.iter().map(|p| p[j]).sum::<f64>() / verts.len() as f64).collect();
    Ok(k.translated(&c)?.with_label(format!("random:{n}:{v}:#{i}")))
}

fn soundness_sweep(cfg: &IntegrateConfig) -> Result<Vec<SuiteRow>> {
    let jobs: Vec<(usize, usize)> = SWEEP_DIMS.iter().flat_map(|&n| (0..SWEEP_POLYTOPES).map(move |i| (n, i))).collect();
    let chunks: Vec<Result<Vec<SuiteRow>>> = jobs
        .par_iter()
        .map(|&(n, i)| {
            let k = sweep_polytope(n, i, cfg.seed)?;
            let mut rows = Vec::new();
            for (d, spec) in SWEEP_DENSITIES.iter().enumerate() {
                let phi = Density::parse(spec, n)?;
                let c = sub(cfg, ((n * 1000 + i) * 8 + d) as u64);
                let params = format!("n={n};polytope={i};density={spec}");
                let radial = verify_difference_body(DiffVariant::Radial, &phi, &k, None, &c)?;
                rows.push(SuiteRow::from_report(&radial, params.clone(), radial.acceptable()));
                let ck = verify_ck(CkVariant::MeasureCk, &phi, &k, None, &c)?;
                rows.push(SuiteRow::from_report(&ck, params, ck.acceptable()));
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(rows)
}

fn counterexamples(cfg: &IntegrateConfig) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let params = ScenarioParams::default();
    for (i, id) in Scenario::ALL.iter().enumerate() {
        let r = run_counterexample(*id, &params, &sub(cfg, 1 << 20 | i as u64))?;
        let note = |k: &str| r.note(k).cloned().unwrap_or(serde_json::Value::Null);
        let (pass, extra) = match id {
            Scenario::Ring => (r.acceptable(), format!("closed_form_rel_error={}", note("closed_form_rel_error"))),
            Scenario::Wedge => (
                r.acceptable(),
                format!("final_fraction={};sup_within_5pct={}", note("mu_diff_final_fraction"), note("sup_within_5pct")),
            ),
            Scenario::Parallelogram => {
                let growth = note("ratio_growth").as_f64().unwrap_or(0.0);
                let increasing = note("ratio_increasing").as_bool().unwrap_or(false);
                (r.acceptable() && increasing && growth > 2.0, format!("ratio_increasing={increasing};ratio_growth={growth}"))
            }
        };
        rows.push(SuiteRow::from_report(&r, format!("{};{extra}", id.name()), pass));
    }
    Ok(rows)
}

pub const ALPHA_PS: [f64; 4] = [1.0 / 3.0, 0.5, 1.0, 2.0];
pub const ALPHA_TOL: f64 = 1e-8;
pub const LEMMA_TOL: f64 = 1e-12;
pub const LEMMA_GAP: f64 = 1e-3;

fn constant_row(inequality: &str, variant: &str, params: String, lhs: f64, rhs: f64, tol: f64) -> SuiteRow {
    let ok = (lhs - rhs).abs() <= tol;
    SuiteRow {
        inequality: inequality.into(),
        variant: variant.into(),
        params,
        lhs,
        lhs_se: 0.0,
        rhs,
        rhs_se: 0.0,
        ratio: lhs / rhs,
        verdict: if ok { "equality" } else { "violated" }.into(),
        pass: ok,
    }
}

fn constants(cfg: &IntegrateConfig) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for n in 1..=6 {
        for &p in &ALPHA_PS {
            for q in [0.0, 1.0] {
                let a = alpha_constant(n, p, q)?;
                rows.push(constant_row("alpha", "closed_vs_quadrature", format!("n={n};p={p};q={q}"), a.closed, a.quadrature, ALPHA_TOL));
            }
        }
    }
    for n in 2..=6usize {
        for k in 1..n {
            let a = alpha_constant(n - k, 1.0 / k as f64, 0.0)?;
            let scaled = a.closed * binomial(n as u64, k as u64);
            rows.push(constant_row("alpha", "binomial_identity", format!("n={n};k={k}"), scaled, 1.0, ALPHA_TOL));
        }
    }
    let flat = Density::lebesgue(1)?;
    let decay = Density::exp_norm(1)?;
    for n in 1..=4 {
        for m in 1..=4 {
            let r = check_lemma_f(&flat, n, m, 1.0, cfg)?;
            rows.push(constant_row("lemma_F", "constant", format!("n={n};m={m};x=1"), r.lhs.value, r.rhs.value, LEMMA_TOL));
            let r = check_lemma_f(&decay, n, m, 1.0, cfg)?;
            // Both sides shrink like binom(n+m, n)^{-1}, so the gap is judged
            // relative to the right side; the absolute one still counts at n = m = 1.
            let gap = r.lhs.value - r.rhs.value;
            let rel_gap = gap / r.rhs.value;
            let strict = rel_gap > LEMMA_GAP && (n > 1 || m > 1 || gap > LEMMA_GAP);
            rows.push(SuiteRow::from_report(
                &r,
                format!("n={n};m={m};x=1;gap={gap:.3e};rel_gap={rel_gap:.3e}"),
                r.verdict == Verdict::Holds && strict,
            ));
        }
    }
    Ok(rows)
}
