use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use rslab_core::verify::{
    alpha_constant, check_lemma_f, run_counterexample, run_suite, verify_ck, verify_difference_body, verify_functional,
    verify_section_projection, verify_shifted, AlphaPair, CkVariant, DiffVariant, FunctionalInputs, FunctionalVariant, Scenario,
    ScenarioParams, SectionInputs, SectionVariant, ShiftedVariant, SuiteName, SuiteRow,
};
use rslab_core::{Body, IneqReport, IntegrateConfig, Verdict};
use serde_json::json;

use crate::output::{resolve_format, write_csv, write_json};
use crate::{inputs, CfgArgs, Command, Family, Format, OutArgs, VerifyArgs};

pub const THREADS_VAR: &str = "RSLAB_THREADS";

pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| anyhow!("{THREADS_VAR}='{v}' is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

enum Outcome {
    Report(Box<IneqReport>),
    Alpha { n: usize, p: f64, q: f64, pair: AlphaPair },
}

impl Outcome {
    fn row(&self, params: String) -> SuiteRow {
        match self {
            Outcome::Report(r) => SuiteRow::from_report(r, params, r.acceptable()),
            Outcome::Alpha { pair, .. } => {
                let ok = (pair.closed - pair.quadrature).abs() <= 1e-8;
                SuiteRow {
                    inequality: "alpha".into(),
                    variant: "closed_vs_quadrature".into(),
                    params,
                    lhs: pair.closed,
                    lhs_se: 0.0,
                    rhs: pair.quadrature,
                    rhs_se: 0.0,
                    ratio: pair.closed / pair.quadrature,
                    verdict: if ok { "equality" } else { "violated" }.into(),
                    pass: ok,
                }
            }
        }
    }

    fn json(&self) -> Result<serde_json::Value> {
        Ok(match self {
            Outcome::Report(r) => serde_json::to_value(r)?,
            Outcome::Alpha { n, p, q, pair } => json!({ "inequality": "alpha", "n": n, "p": p, "q": q, "closed": pair.closed, "quadrature": pair.quadrature }),
        })
    }

    fn code(&self) -> u8 {
        match self {
            Outcome::Report(r) => report_code(r),
            Outcome::Alpha { .. } => 0,
        }
    }
}

fn report_code(r: &IneqReport) -> u8 {
    if r.expected == Some(r.verdict) {
        return 0;
    }
    match r.verdict {
        Verdict::Violated => 1,
        Verdict::HypothesisFailed => 3,
        _ => 0,
    }
}

/// Worst exit code: a violation outranks a failed hypothesis.
fn combine(codes: impl IntoIterator<Item = u8>) -> u8 {
    codes.into_iter().fold(0, |acc, c| match (acc, c) {
        (1, _) | (_, 1) => 1,
        (3, _) | (_, 3) => 3,
        _ => 0,
    })
}

fn suite_code(rows: &[SuiteRow]) -> u8 {
    combine(rows.iter().filter(|r| !r.pass).map(|r| if r.verdict == "hypothesis_failed" { 3 } else { 1 }))
}

/// Families and variants whose answer comes from exact volumes or fixed
/// quadrature rules.
fn deterministic(family: Family, variant: Option<&str>) -> bool {
    match family {
        Family::Lemma | Family::Alpha => true,
        Family::DifferenceBody => variant == Some("classical"),
        Family::Ck => matches!(variant, Some("classical_ck" | "classical_conv")),
        Family::SectionProjection => variant == Some("classical"),
        Family::Shifted | Family::Functional => false,
    }
}

fn config(c: &CfgArgs, needs_seed: bool, what: &str) -> Result<IntegrateConfig> {
    if needs_seed && c.seed.is_none() {
        bail!("{what} uses Monte-Carlo estimates; pass --seed");
    }
    let mut cfg = IntegrateConfig::with_seed(c.seed.unwrap_or(0));
    if let Some(n) = c.samples {
        cfg.n_samples = n;
    }
    if let Some(g) = c.grid {
        cfg.grid = g;
    }
    if let Some(o) = c.theta_order {
        cfg.theta_order = o;
    }
    if let Some(t) = c.theta_min {
        cfg.theta_min = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn variant<V: std::str::FromStr<Err = rslab_core::Error>>(a: &VerifyArgs) -> Result<V> {
    let v = a.variant.as_deref().ok_or_else(|| anyhow!("--variant is required"))?;
    Ok(v.parse()?)
}

/// Body edits applied by sweeps before the check runs.
#[derive(Clone, Debug, Default)]
struct BodyEdit {
    scale: Option<f64>,
    shift: Option<(usize, f64)>,
}

impl BodyEdit {
    fn apply(&self, k: Body) -> Result<Body> {
        let mut k = k;
        if let Some(s) = self.scale {
            k = k.scaled(s)?;
        }
        if let Some((i, v)) = self.shift {
            if i >= k.dim() {
                bail!("shift.{i} is out of range for dimension {}", k.dim());
            }
            let mut t = vec![0.0; k.dim()];
            t[i] = v;
            k = k.translated(&t)?;
        }
        Ok(k)
    }
}

fn verify(family: Family, a: &VerifyArgs, edit: &BodyEdit) -> Result<Outcome> {
    let cfg = config(&a.cfg, !deterministic(family, a.variant.as_deref()), "this check")?;
    let load = |spec: Option<&str>, flag: &str| -> Result<Body> { edit.apply(inputs::body(spec, flag)?) };
    let report = match family {
        Family::DifferenceBody => {
            let k = load(a.body.as_deref(), "body")?;
            let l = a.body2.as_deref().map(|s| load(Some(s), "body2")).transpose()?;
            let d = inputs::density(a.density.as_deref(), k.dim(), "density")?;
            verify_difference_body(variant::<DiffVariant>(a)?, &d, &k, l.as_ref(), &cfg)?
        }
        Family::Shifted => {
            let k = load(a.body.as_deref(), "body")?;
            let d = inputs::density(a.density.as_deref(), k.dim(), "density")?;
            let omega = a.omega.clone().unwrap_or_else(|| vec![0.0; k.dim()]);
            verify_shifted(variant::<ShiftedVariant>(a)?, &d, &k, &omega, &cfg)?
        }
        Family::Ck => {
            let k = load(a.body.as_deref(), "body")?;
            let l = a.body2.as_deref().map(|s| load(Some(s), "body2")).transpose()?;
            let d = inputs::density(a.density.as_deref(), k.dim(), "density")?;
            verify_ck(variant::<CkVariant>(a)?, &d, &k, l.as_ref(), &cfg)?
        }
        Family::SectionProjection => {
            let k = load(a.body.as_deref(), "body")?;
            let d = inputs::density(a.density.as_deref(), k.dim(), "density")?;
            let h = inputs::subspace(a.subspace.as_deref(), k.dim(), "subspace")?;
            let e = a.subspace2.as_deref().map(|s| inputs::subspace(Some(s), k.dim(), "subspace2")).transpose()?;
            let inputs = SectionInputs { density: &d, body: &k, h: &h, e: e.as_ref(), r: a.r };
            verify_section_projection(variant::<SectionVariant>(a)?, inputs, &cfg)?
        }
        Family::Functional => {
            let v = variant::<FunctionalVariant>(a)?;
            let f = inputs::function(a.fn_spec.as_deref(), a.apex.as_deref())?;
            let n = f.dim();
            let h = a.subspace.as_deref().map(|s| inputs::subspace(Some(s), n, "subspace")).transpose()?;
            let phi = a.density.as_deref().map(|s| inputs::density(Some(s), n, "density")).transpose()?;
            let g_dim = match (v, &h) {
                (FunctionalVariant::ProjSectWeighted, Some(h)) => h.dim(),
                _ => n,
            };
            let g = a.weight.as_deref().map(|s| inputs::density(Some(s), g_dim, "weight")).transpose()?;
            let inputs = FunctionalInputs { f: &f, g: g.as_ref(), phi: phi.as_ref(), h: h.as_ref(), p: a.p };
            verify_functional(v, inputs, &cfg)?
        }
        Family::Lemma => {
            let d = inputs::density(a.density.as_deref(), 1, "density")?;
            check_lemma_f(&d, a.n.unwrap_or(1), a.m.unwrap_or(1), a.x.unwrap_or(1.0), &cfg)?
        }
        Family::Alpha => {
            let (n, p, q) = (a.n.unwrap_or(1), a.p.ok_or_else(|| anyhow!("--p is required"))?, a.q.unwrap_or(0.0));
            return Ok(Outcome::Alpha { n, p, q, pair: alpha_constant(n, p, q)? });
        }
    };
    Ok(Outcome::Report(Box::new(report)))
}

fn describe(a: &VerifyArgs) -> String {
    let mut parts = Vec::new();
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            parts.push(format!("{k}={v}"));
        }
    };
    push("body", a.body.clone());
    push("body2", a.body2.clone());
    push("density", a.density.clone());
    push("fn", a.fn_spec.clone());
    push("subspace", a.subspace.clone());
    push("subspace2", a.subspace2.clone());
    push("r", a.r.map(|v| v.to_string()));
    push("omega", a.omega.as_ref().map(|o| o.iter().map(f64::to_string).collect::<Vec<_>>().join("/")));
    push("n", a.n.map(|v| v.to_string()));
    push("m", a.m.map(|v| v.to_string()));
    push("x", a.x.map(|v| v.to_string()));
    push("p", a.p.map(|v| v.to_string()));
    push("q", a.q.map(|v| v.to_string()));
    parts.join(";")
}

fn emit_outcomes(out: &OutArgs, default: Format, outcomes: &[(String, Outcome)]) -> Result<u8> {
    match resolve_format(out, default)? {
        Format::Json => {
            let payload = if let [(_, o)] = outcomes {
                o.json()?
            } else {
                let items = outcomes
                    .iter()
                    .map(|(p, o)| Ok(json!({ "params": p, "report": o.json()? })))
                    .collect::<Result<Vec<_>>>()?;
                json!({ "sweep": items })
            };
            write_json(out, payload)?;
        }
        Format::Csv => {
            let rows: Vec<SuiteRow> = outcomes.iter().map(|(p, o)| o.row(p.clone())).collect();
            write_csv(out, &rows)?;
        }
    }
    for (p, o) in outcomes {
        if let Outcome::Report(r) = o {
            if r.verdict == Verdict::Inconclusive && r.expected.is_none() {
                eprintln!("note: {} {} ({p}) is inconclusive", r.inequality, r.variant);
            }
        }
    }
    Ok(combine(outcomes.iter().map(|(_, o)| o.code())))
}

fn apply_param(a: &mut VerifyArgs, edit: &mut BodyEdit, name: &str, value: f64) -> Result<()> {
    let whole = || -> Result<u64> {
        if value < 0.0 || (value - value.round()).abs() > 1e-9 {
            bail!("{name} takes whole numbers, got {value}");
        }
        Ok(value.round() as u64)
    };
    let index = |prefix: &str| -> Option<Result<usize>> {
        name.strip_prefix(prefix).map(|i| i.parse::<usize>().with_context(|| format!("bad index in '{name}'")))
    };
    match name {
        "scale" => edit.scale = Some(value),
        "r" => a.r = Some(whole()? as u32),
        "x" => a.x = Some(value),
        "n" => a.n = Some(whole()? as usize),
        "m" => a.m = Some(whole()? as usize),
        "p" => a.p = Some(value),
        "q" => a.q = Some(value),
        "samples" => a.cfg.samples = Some(whole()? as usize),
        _ => {
            if let Some(i) = index("shift.") {
                edit.shift = Some((i?, value));
            } else if let Some(i) = index("omega.") {
                let i = i?;
                let dim = match &a.body {
                    Some(b) => inputs::body(Some(b), "body")?.dim(),
                    None => i + 1,
                };
                let omega = a.omega.get_or_insert_with(|| vec![0.0; dim]);
                if i >= omega.len() {
                    bail!("{name} is out of range for an omega of length {}", omega.len());
                }
                omega[i] = value;
            } else {
                bail!("unknown sweep parameter '{name}'");
            }
        }
    }
    Ok(())
}

fn sweep(family: Family, spec: &str, args: &VerifyArgs, out: &OutArgs) -> Result<u8> {
    let (name, values) = inputs::param_range(spec)?;
    let points = values
        .iter()
        .map(|&v| {
            let mut a = args.clone();
            let mut edit = BodyEdit::default();
            apply_param(&mut a, &mut edit, &name, v)?;
            Ok((format!("{name}={v}"), a, edit))
        })
        .collect::<Result<Vec<_>>>()?;
    let outcomes = points
        .par_iter()
        .map(|(label, a, edit)| Ok((format!("{label};{}", describe(a)), verify(family, a, edit)?)))
        .collect::<Result<Vec<_>>>()?;
    emit_outcomes(out, Format::Csv, &outcomes)
}

pub fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Verify { family, args, out } => {
            let outcome = verify(family, &args, &BodyEdit::default())?;
            emit_outcomes(&out, Format::Json, &[(describe(&args), outcome)])
        }
        Command::Sweep { family, param, args, out } => sweep(family, &param, &args, &out),
        Command::Suite { name, cfg, out } => {
            let suite: SuiteName = name.parse()?;
            let cfg = config(&cfg, suite != SuiteName::Constants, "this suite")?;
            let rows = run_suite(suite, &cfg)?;
            match resolve_format(&out, Format::Csv)? {
                Format::Csv => write_csv(&out, &rows)?,
                Format::Json => write_json(&out, json!({ "suite": suite.name(), "rows": rows }))?,
            }
            Ok(suite_code(&rows))
        }
        Command::Counterexample { id, eps, delta, thetas, alphas, cfg, out } => {
            let scenario: Scenario = id.parse()?;
            let cfg = config(&cfg, false, "counterexample")?;
            let params = ScenarioParams { eps, delta, thetas, alphas };
            let report = run_counterexample(scenario, &params, &cfg)?;
            emit_outcomes(&out, Format::Json, &[(scenario.name().to_string(), Outcome::Report(Box::new(report)))])
        }
        Command::Export { body, fn_spec, out } => {
            let text = match (body, fn_spec) {
                (Some(b), None) => inputs::body(Some(&b), "body")?.to_json_string()?,
                (None, Some(f)) => inputs::function(Some(&f), None)?.to_json_string()?,
                _ => bail!("pass exactly one of --body or --fn"),
            };
            let out = OutArgs { out, format: Some(Format::Json), plot: None };
            write_json_raw(&out, &text)?;
            Ok(0)
        }
    }
}

/// Body and function files stay in their own schema so they reload as-is.
fn write_json_raw(out: &OutArgs, text: &str) -> Result<()> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    match &out.out {
        Some(p) => crate::output::write_atomic(p, s.as_bytes()),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_combine() {
        assert_eq!(combine([0, 3, 0]), 3);
        assert_eq!(combine([3, 1]), 1);
        assert_eq!(combine([]), 0);
    }

    #[test]
    fn seeds_are_required_for_sampling() {
        let a = VerifyArgs { variant: Some("radial".into()), body: Some("simplex:2".into()), ..Default::default() };
        assert!(verify(Family::DifferenceBody, &a, &BodyEdit::default()).is_err());
        let a = VerifyArgs { variant: Some("classical".into()), ..a };
        assert!(verify(Family::DifferenceBody, &a, &BodyEdit::default()).is_ok());
    }

    #[test]
    fn sweep_parameters() {
        let mut a = VerifyArgs { body: Some("simplex:2".into()), ..Default::default() };
        let mut e = BodyEdit::default();
        apply_param(&mut a, &mut e, "omega.1", 0.5).unwrap();
        assert_eq!(a.omega, Some(vec![0.0, 0.5]));
        apply_param(&mut a, &mut e, "shift.0", 2.0).unwrap();
        assert_eq!(e.shift, Some((0, 2.0)));
        assert!(apply_param(&mut a, &mut e, "r", 1.5).is_err());
        assert!(apply_param(&mut a, &mut e, "bogus", 1.0).is_err());
        let k = e.apply(Body::simplex(2).unwrap()).unwrap();
        assert!(k.contains(&[2.1, 0.1]));
    }
}
