use serde::{Deserialize, Serialize};

use super::{Body, Form};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Serialized body: `{"dim", "form", "vertices" | "center" + "radius", "label"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyJson {
    pub dim: usize,
    pub form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl<T: Real> Body<T> {
    pub fn to_json(&self) -> Result<BodyJson> {
        let conv = |v: &[T]| v.iter().map(|x| x.f64()).collect::<Vec<f64>>();
        let label = self.label.clone();
        match &self.form {
            Form::VPolytope(p) => Ok(BodyJson {
                dim: self.dim,
                form: "vpolytope".into(),
                vertices: Some(p.vertices.iter().map(|v| conv(v)).collect()),
                center: None,
                radius: None,
                label,
            }),
            Form::Ball { center, radius } => Ok(BodyJson {
                dim: self.dim,
                form: "ball".into(),
                vertices: None,
                center: Some(conv(center)),
                radius: Some(radius.f64()),
                label,
            }),
            Form::Oracle(_) => Err(Error::Form("oracle bodies cannot be serialized".into())),
        }
    }

    pub fn from_json(j: &BodyJson) -> Result<Self> {
        let conv = |v: &[f64]| v.iter().map(|x| T::c(*x)).collect::<Vec<T>>();
        let body = match j.form.as_str() {
            "vpolytope" => {
                let vs = j.vertices.as_ref().ok_or_else(|| Error::Parse("field 'vertices' missing".into()))?;
                Body::hull_of(vs.iter().map(|v| conv(v)).collect())?
            }
            "ball" => {
                let c = j.center.as_ref().ok_or_else(|| Error::Parse("field 'center' missing".into()))?;
                let r = j.radius.ok_or_else(|| Error::Parse("field 'radius' missing".into()))?;
                Body::ball(conv(c), T::c(r))?
            }
            other => return Err(Error::Parse(format!("field 'form': unknown body form '{other}'"))),
        };
        if body.dim != j.dim {
            return Err(Error::Parse(format!("field 'dim' is {} but the data has dimension {}", j.dim, body.dim)));
        }
        Ok(match &j.label {
            Some(l) => body.with_label(l.clone()),
            None => body,
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_json()?).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: BodyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&j)
    }

    /// Shorthand bodies: `simplex:n`, `cube:n[:h]`, `ball:n[:r]`, `cross:n`,
    /// `random:n:v:seed`.
    pub fn parse_shorthand(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("'{s}': missing field {i}")))?
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("'{s}': field {i} is not an integer")))
        };
        let real = |i: usize, default: f64| -> Result<T> {
            match parts.get(i) {
                None => Ok(T::c(default)),
                Some(t) => t.parse::<f64>().map(T::c).map_err(|_| Error::Parse(format!("'{s}': field {i} is not a number"))),
            }
        };
        match parts[0] {
            "simplex" => Body::simplex(int(1)?),
            "cube" => Body::cube(int(1)?, real(2, 1.0)?),
            "ball" => {
                let n = int(1)?;
                Ok(Body::ball(vec![T::zero(); n], real(2, 1.0)?)?.with_label(s.to_string()))
            }
            "cross" => Body::cross_polytope(int(1)?),
            "random" => Body::random_polytope(int(1)?, int(2)?, int(3)? as u64, 0),
            other => Err(Error::Parse(format!("unknown body shorthand '{other}'"))),
        }
    }
}
