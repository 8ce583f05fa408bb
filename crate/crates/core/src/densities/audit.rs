use serde::{Deserialize, Serialize};

use super::{p_mean, Density};
use crate::corekit::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DensityClass {
    RadiallyDecreasing,
    QuasiConcave,
    PConcave(f64),
    Even,
    MaxAtOrigin,
}

/// A violated probe: `lhs >= rhs` was expected at `points` (with parameter
/// `t` or `lambda`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditVerdict {
    Consistent,
    Violated,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassAuditReport {
    pub class: DensityClass,
    pub probes: usize,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    pub verdict: AuditVerdict,
}

impl ClassAuditReport {
    pub fn passed(&self) -> bool {
        self.verdict == AuditVerdict::Consistent
    }
}

const MAX_WITNESSES: usize = 16;

/// Samples the defining inequality of `class` on `probes` random points of
/// the box `[lo, hi]`.
pub fn audit_class(
    density: &Density,
    class: DensityClass,
    probes: usize,
    stream: &RandomStream,
    lo: &[f64],
    hi: &[f64],
) -> ClassAuditReport {
    let n = density.dim();
    let tol = 1e-9 * density.sup().max(f64::MIN_POSITIVE);
    let mut rng = stream.clone();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut violations = 0;
    let mut witnesses = Vec::new();
    let origin = vec![0.0; n];
    let at_origin = density.eval(&origin);
    for _ in 0..probes {
        rng.fill_box(lo, hi, &mut x);
        let (points, param, lhs, rhs) = match class {
            DensityClass::RadiallyDecreasing => {
                let t = rng.uniform();
                let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
                (vec![x.clone()], t, density.eval(&tx), density.eval(&x))
            }
            DensityClass::Even => {
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                let (a, b) = (density.eval(&x), density.eval(&neg));
                // Symmetric check: report the smaller side as lhs.
                (vec![x.clone()], 0.0, a.min(b), a.max(b))
            }
            DensityClass::MaxAtOrigin => (vec![x.clone()], 0.0, at_origin, density.eval(&x)),
            DensityClass::QuasiConcave | DensityClass::PConcave(_) => {
                rng.fill_box(lo, hi, &mut y);
                let lambda = rng.uniform();
                let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect();
                let (fx, fy) = (density.eval(&x), density.eval(&y));
                let p = match class {
                    DensityClass::PConcave(p) => p,
                    _ => f64::NEG_INFINITY,
                };
                (vec![x.clone(), y.clone()], lambda, density.eval(&z), p_mean(fx, fy, lambda, p))
            }
        };
        if lhs < rhs - tol {
            violations += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness { points, param, lhs, rhs });
            }
        }
    }
    let verdict = if witnesses.is_empty() { AuditVerdict::Consistent } else { AuditVerdict::Violated };
    ClassAuditReport { class, probes, violations, witnesses, verdict }
}
