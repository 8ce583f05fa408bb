use anyhow::{anyhow, bail, Context, Result};
use rslab_core::bodies::SubspaceSpec;
use rslab_core::densities::load_body;
use rslab_core::functional::QcFunction;
use rslab_core::{Body, Density};

pub fn body(spec: Option<&str>, flag: &str) -> Result<Body> {
    let spec = spec.ok_or_else(|| anyhow!("--{flag} is required"))?;
    load_body(spec).with_context(|| format!("--{flag} '{spec}'"))
}

pub fn density(spec: Option<&str>, dim: usize, flag: &str) -> Result<Density> {
    let spec = spec.unwrap_or("lebesgue");
    Density::parse(spec, dim).with_context(|| format!("--{flag} '{spec}'"))
}

pub fn subspace(spec: Option<&str>, dim: usize, flag: &str) -> Result<SubspaceSpec> {
    let spec = spec.ok_or_else(|| anyhow!("--{flag} is required"))?;
    SubspaceSpec::parse(dim, spec).with_context(|| format!("--{flag} '{spec}'"))
}

/// `@file.json`, `indicator:<body>` or `cone:<r>:<levels>:<body>`.
pub fn function(spec: Option<&str>, apex: Option<&[f64]>) -> Result<QcFunction> {
    let spec = spec.ok_or_else(|| anyhow!("--fn is required"))?;
    let ctx = || format!("--fn '{spec}'");
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read function file '{path}'"))?;
        return QcFunction::from_json_str(&text).with_context(|| format!("function file '{path}'"));
    }
    if let Some(b) = spec.strip_prefix("indicator:") {
        return Ok(QcFunction::indicator(load_body(b).with_context(ctx)?));
    }
    if let Some(rest) = spec.strip_prefix("cone:") {
        let mut parts = rest.splitn(3, ':');
        let (Some(r), Some(m), Some(b)) = (parts.next(), parts.next(), parts.next()) else {
            bail!("{}: expected cone:<r>:<levels>:<body>", ctx());
        };
        let r: f64 = r.parse().with_context(|| format!("{}: bad exponent '{r}'", ctx()))?;
        let m: usize = m.parse().with_context(|| format!("{}: bad level count '{m}'", ctx()))?;
        let k = load_body(b).with_context(ctx)?;
        let peak = apex.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; k.dim()]);
        return QcFunction::cone_profile(&k, &peak, r, m).with_context(ctx);
    }
    bail!("{}: expected @file.json, indicator:<body> or cone:<r>:<levels>:<body>", ctx())
}

/// `name=a:b:steps` into evenly spaced values.
pub fn param_range(spec: &str) -> Result<(String, Vec<f64>)> {
    let (name, range) = spec.split_once('=').ok_or_else(|| anyhow!("--param '{spec}': expected name=a:b:steps"))?;
    let fields: Vec<&str> = range.split(':').collect();
    let [a, b, steps] = fields[..] else {
        bail!("--param '{spec}': expected name=a:b:steps");
    };
    let a: f64 = a.parse().with_context(|| format!("--param '{spec}': bad start"))?;
    let b: f64 = b.parse().with_context(|| format!("--param '{spec}': bad end"))?;
    let steps: usize = steps.parse().with_context(|| format!("--param '{spec}': bad step count"))?;
    if steps == 0 {
        bail!("--param '{spec}': step count must be positive");
    }
    let values = if steps == 1 { vec![a] } else { (0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect() };
    Ok((name.to_string(), values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let (name, v) = param_range("omega.0=0:1:5").unwrap();
        assert_eq!(name, "omega.0");
        assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(param_range("r=2:9:1").unwrap().1, vec![2.0]);
        assert!(param_range("r=0:1").is_err());
        assert!(param_range("r=0:1:0").is_err());
    }

    #[test]
    fn functions() {
        let f = function(Some("cone:1:4:cube:2:1"), None).unwrap();
        assert_eq!(f.levels().len(), 5);
        assert!(function(Some("indicator:simplex:2"), None).unwrap().is_indicator());
        assert!(function(Some("cone:1:cube:2"), None).is_err());
        let err = function(Some("@/nonexistent/f.json"), None).unwrap_err();
        assert!(format!("{err:#}").contains("/nonexistent/f.json"));
    }
}
