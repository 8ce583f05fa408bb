use std::path::Path;

use super::Density;
use crate::bodies::Body;
use crate::error::{Error, Result};

/// Loads a body from `@path` (JSON) or a shorthand such as `cube:2:1`.
pub fn load_body(src: &str) -> Result<Body<f64>> {
    match src.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| Error::Parse(format!("cannot read body file '{path}': {e}")))?;
            let label = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or(path).to_string();
            let body = Body::from_json_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            Ok(if body.label().is_some() { body } else { body.with_label(label) })
        }
        None => Body::parse_shorthand(src),
    }
}

fn param(spec: &str, body: &str, key: &str) -> Result<f64> {
    body.split(',')
        .filter_map(|kv| kv.trim().split_once('='))
        .find(|(k, _)| k.trim() == key)
        .ok_or_else(|| Error::Parse(format!("density '{spec}' is missing '{key}='")))?
        .1
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("density '{spec}': bad value for '{key}': {e}")))
}

impl Density {
    /// Parses a density description for `R^dim`.
    ///
    /// Grammar: `lebesgue`, `gaussian`, `exp-norm`, `exp-sq`,
    /// `ring:eps=..,delta=..`, `wedge:theta=..`, `indicator:<body>`,
    /// `cone:<body>,r=..`, and `[product:]<spec>|<spec>:split=k` where the
    /// first factor acts on the leading `k` coordinates. `<body>` is either
    /// `@file.json` or a body shorthand.
    pub fn parse(spec: &str, dim: usize) -> Result<Density> {
        let spec = spec.trim();
        let check = |d: Density| -> Result<Density> {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "density '{spec}' lives in dimension {} but the body has dimension {dim}",
                    d.dim()
                )));
            }
            Ok(d.with_spec(spec))
        };
        let inner = spec.strip_prefix("product:").unwrap_or(spec);
        if inner.contains('|') {
            let (factors, split) = match inner.rsplit_once(":split=") {
                Some((f, k)) => {
                    let k = k.trim().parse::<usize>().map_err(|e| Error::Parse(format!("density '{spec}': bad split: {e}")))?;
                    (f, k)
                }
                None => return Err(Error::Parse(format!("product density '{spec}' needs ':split=k'"))),
            };
            let (a, b) = factors
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("product density '{spec}' needs two factors")))?;
            if split == 0 || split >= dim {
                return Err(Error::Parse(format!("product density '{spec}': split must lie in 1..{dim}")));
            }
            let a = Density::parse(a, split)?;
            let b = Density::parse(b, dim - split)?;
            return check(Density::split_product(a, b)?);
        }
        let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let d = match head {
            "lebesgue" => Density::lebesgue(dim)?,
            "gaussian" => Density::gaussian(dim)?,
            "exp-norm" => Density::exp_norm(dim)?,
            "exp-sq" => Density::exp_sq(dim)?,
            "ring" => Density::ring(param(spec, rest, "eps")?, param(spec, rest, "delta")?)?,
            "wedge" => Density::wedge(param(spec, rest, "theta")?)?,
            "indicator" => Density::indicator(load_body(rest)?),
            "cone" => {
                let (src, r) = match rest.rsplit_once(",r=") {
                    Some((src, r)) => (src, r.trim().parse::<f64>().map_err(|e| Error::Parse(format!("density '{spec}': bad r: {e}")))?),
                    None => (rest, 1.0),
                };
                Density::cone_power(load_body(src)?, r)?
            }
            _ => return Err(Error::Parse(format!("unknown density '{spec}'"))),
        };
        check(d)
    }
}

