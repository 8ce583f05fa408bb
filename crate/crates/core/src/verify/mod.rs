//! Inequality verifiers. Each one computes both sides of an inequality,
//! audits the density-class hypotheses it relies on, and turns the two
//! estimates into a verdict with a 3σ guard band.

mod constants;
mod difference;
mod functional;
mod scenarios;
mod sections;
mod suites;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bodies::Body;
use crate::corekit::rng::mix;
use crate::corekit::RandomStream;
use crate::densities::{audit_class, ClassAuditReport, Density, DensityClass};
use crate::error::{Error, Result};
use crate::integrate::{Estimate, IntegrateConfig, SupResult};

pub use constants::{alpha_constant, check_lemma_f, AlphaPair};
pub use difference::{verify_ck, verify_difference_body, verify_shifted, CkVariant, DiffVariant, ShiftedVariant};
pub use functional::{verify_functional, FunctionalInputs, FunctionalVariant};
pub use scenarios::{run_counterexample, tilted_parallelogram, Scenario, ScenarioParams};
pub use sections::{verify_section_projection, SectionInputs, SectionVariant};
pub use suites::{run_suite, sweep_polytope, SuiteName, SuiteRow};

/// Guard band width in combined standard errors.
pub const Z: f64 = 3.0;
/// Relative slack added to the band so that exact pipelines are not split by
/// rounding.
pub const REL_TOL: f64 = 1e-9;
/// Probes per sampled class audit.
pub const AUDIT_PROBES: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Equality,
    Violated,
    Inconclusive,
    HypothesisFailed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Equality => "equality",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
            Verdict::HypothesisFailed => "hypothesis_failed",
        }
    }

    fn severity(&self) -> u8 {
        match self {
            Verdict::Equality => 0,
            Verdict::Holds => 1,
            Verdict::Inconclusive => 2,
            Verdict::Violated => 3,
            Verdict::HypothesisFailed => 4,
        }
    }

    /// The more alarming of two verdicts.
    pub fn worst(self, other: Verdict) -> Verdict {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Upper` checks `lhs <= rhs`, `Lower` checks `lhs >= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lhs,
    Rhs,
}

/// How a failed hypothesis affects the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// Failure yields `hypothesis_failed`.
    Required,
    /// Failure is recorded only.
    Warn,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub severity: Severity,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<ClassAuditReport>,
}

impl Hypothesis {
    pub fn checked(name: &str, severity: Severity, passed: bool, detail: impl Into<String>) -> Self {
        Hypothesis { name: name.into(), severity, passed, detail: detail.into(), audit: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupInfo {
    pub name: String,
    pub side: Side,
    pub converged: bool,
    pub argmax: Vec<f64>,
    pub history: Vec<f64>,
}

impl SupInfo {
    pub fn from_result(name: &str, side: Side, r: &SupResult) -> Self {
        SupInfo { name: name.into(), side, converged: r.converged, argmax: r.argmax.clone(), history: r.history.clone() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyInfo {
    pub role: String,
    pub label: String,
    pub dim: usize,
    /// FNV-1a of the body's JSON, or of its label for oracle bodies.
    pub hash: String,
}

impl BodyInfo {
    pub fn new(role: &str, body: &Body<f64>) -> Self {
        let text = body.to_json_string().unwrap_or_else(|_| body.label().unwrap_or("oracle").to_string());
        BodyInfo { role: role.into(), label: body.label().unwrap_or("").to_string(), dim: body.dim(), hash: format!("{:016x}", fnv1a(text.as_bytes())) }
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IneqReport {
    pub inequality: String,
    pub variant: String,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub constant: f64,
    pub ratio: f64,
    pub direction: Direction,
    pub verdict: Verdict,
    /// Set by scenario runs whose purpose is to exhibit a specific verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Verdict>,
    pub hypotheses: Vec<Hypothesis>,
    pub sup_searches: Vec<SupInfo>,
    pub bodies: Vec<BodyInfo>,
    pub densities: Vec<String>,
    pub config: IntegrateConfig,
    pub notes: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<BTreeMap<String, f64>>,
}

impl IneqReport {
    /// Whether the verdict is acceptable: holds, equality, or the expected
    /// verdict of a scenario.
    pub fn acceptable(&self) -> bool {
        match self.expected {
            Some(e) => self.verdict == e,
            None => matches!(self.verdict, Verdict::Holds | Verdict::Equality),
        }
    }

    pub fn note(&self, key: &str) -> Option<&Value> {
        self.notes.get(key)
    }
}

/// Guard-band comparison. `gate` is false when a sup search on the side that
/// should be larger did not converge; such a run cannot prove a violation.
pub fn decide(lhs: &Estimate, rhs: &Estimate, direction: Direction, gate: bool) -> Verdict {
    if !(lhs.value.is_finite() && rhs.value.is_finite()) {
        return Verdict::Inconclusive;
    }
    let sigma = lhs.std_error.hypot(rhs.std_error);
    let tol = Z * sigma + REL_TOL * lhs.value.abs().max(rhs.value.abs());
    let (small, big) = match direction {
        Direction::Upper => (lhs.value, rhs.value),
        Direction::Lower => (rhs.value, lhs.value),
    };
    if (small - big).abs() <= tol {
        Verdict::Equality
    } else if small <= big + tol {
        Verdict::Holds
    } else if gate {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Accumulates the metadata of one report.
pub(crate) struct Builder {
    inequality: String,
    variant: String,
    cfg: IntegrateConfig,
    hypotheses: Vec<Hypothesis>,
    searches: Vec<SupInfo>,
    bodies: Vec<BodyInfo>,
    densities: Vec<String>,
    notes: BTreeMap<String, Value>,
    table: Vec<BTreeMap<String, f64>>,
    expected: Option<Verdict>,
}

impl Builder {
    pub(crate) fn new(inequality: &str, variant: &str, cfg: &IntegrateConfig) -> Self {
        Builder {
            inequality: inequality.into(),
            variant: variant.into(),
            cfg: cfg.clone(),
            hypotheses: Vec::new(),
            searches: Vec::new(),
            bodies: Vec::new(),
            densities: Vec::new(),
            notes: BTreeMap::new(),
            table: Vec::new(),
            expected: None,
        }
    }

    pub(crate) fn body(&mut self, role: &str, body: &Body<f64>) -> &mut Self {
        self.bodies.push(BodyInfo::new(role, body));
        self
    }

    pub(crate) fn density(&mut self, d: &Density) -> &mut Self {
        self.densities.push(d.spec().to_string());
        self
    }

    pub(crate) fn note(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.notes.insert(key.into(), v.into());
        self
    }

    pub(crate) fn est_note(&mut self, key: &str, e: &Estimate) -> &mut Self {
        self.note(key, serde_json::to_value(e).unwrap_or(Value::Null))
    }

    pub(crate) fn sup(&mut self, name: &str, side: Side, r: &SupResult) -> &mut Self {
        self.searches.push(SupInfo::from_result(name, side, r));
        self
    }

    pub(crate) fn sup_info(&mut self, info: SupInfo) -> &mut Self {
        self.searches.push(info);
        self
    }

    pub(crate) fn row(&mut self, row: BTreeMap<String, f64>) -> &mut Self {
        self.table.push(row);
        self
    }

    pub(crate) fn expect(&mut self, v: Verdict) -> &mut Self {
        self.expected = Some(v);
        self
    }

    pub(crate) fn hypothesis(&mut self, h: Hypothesis) -> &mut Self {
        self.hypotheses.push(h);
        self
    }

    /// Audits `class` for `density`; a declared flag that contradicts the
    /// class fails without sampling.
    pub(crate) fn audit(&mut self, density: &Density, class: DensityClass, severity: Severity) -> &mut Self {
        let h = audit_hypothesis(density, class, severity, &self.cfg);
        self.hypotheses.push(h);
        self
    }

    pub(crate) fn failed(&self) -> bool {
        self.hypotheses.iter().any(|h| h.severity == Severity::Required && !h.passed)
    }

    /// Report for a run stopped by a failed hypothesis.
    pub(crate) fn abort(self, constant: f64, direction: Direction) -> IneqReport {
        let nan = Estimate::exact(f64::NAN);
        self.finish_with(nan, nan, constant, direction, Verdict::HypothesisFailed)
    }

    pub(crate) fn finish(self, lhs: Estimate, rhs: Estimate, constant: f64, direction: Direction) -> IneqReport {
        let big = match direction {
            Direction::Upper => Side::Rhs,
            Direction::Lower => Side::Lhs,
        };
        let gate = self.searches.iter().filter(|s| s.side == big).all(|s| s.converged);
        let mut verdict = decide(&lhs, &rhs, direction, gate);
        if self.failed() {
            verdict = Verdict::HypothesisFailed;
        }
        self.finish_with(lhs, rhs, constant, direction, verdict)
    }

    pub(crate) fn finish_with(self, lhs: Estimate, rhs: Estimate, constant: f64, direction: Direction, verdict: Verdict) -> IneqReport {
        let ratio = if rhs.value != 0.0 { lhs.value / rhs.value } else { f64::NAN };
        IneqReport {
            inequality: self.inequality,
            variant: self.variant,
            lhs,
            rhs,
            constant,
            ratio,
            direction,
            verdict,
            expected: self.expected,
            hypotheses: self.hypotheses,
            sup_searches: self.searches,
            bodies: self.bodies,
            densities: self.densities,
            config: self.cfg,
            notes: self.notes,
            table: self.table,
        }
    }
}

fn class_name(class: DensityClass) -> String {
    match class {
        DensityClass::RadiallyDecreasing => "radially_decreasing".into(),
        DensityClass::QuasiConcave => "quasi_concave".into(),
        DensityClass::PConcave(p) => format!("p_concave({p})"),
        DensityClass::Even => "even".into(),
        DensityClass::MaxAtOrigin => "max_at_origin".into(),
    }
}

/// Declared flags that already settle whether `class` can hold.
fn declared_contradiction(density: &Density, class: DensityClass) -> Option<String> {
    let f = density.flags();
    match class {
        DensityClass::RadiallyDecreasing if !f.radially_decreasing => Some("declared not radially decreasing".into()),
        DensityClass::QuasiConcave if !f.quasi_concave => Some("declared not quasi-concave".into()),
        DensityClass::Even if !f.even => Some("declared not even".into()),
        DensityClass::PConcave(p) => match f.p_concave {
            None => Some("declared without p-concavity".into()),
            Some(q) if q < p => Some(format!("declared {q}-concave, weaker than {p}")),
            _ => None,
        },
        _ => None,
    }
}

pub(crate) fn audit_stream(cfg: &IntegrateConfig, class: DensityClass) -> RandomStream {
    let tag = match class {
        DensityClass::RadiallyDecreasing => 1,
        DensityClass::QuasiConcave => 2,
        DensityClass::PConcave(_) => 3,
        DensityClass::Even => 4,
        DensityClass::MaxAtOrigin => 5,
    };
    RandomStream::new(cfg.seed, mix(0xa0d1_7000 + tag))
}

pub(crate) fn audit_hypothesis(density: &Density, class: DensityClass, severity: Severity, cfg: &IntegrateConfig) -> Hypothesis {
    let name = format!("{} is {}", density.spec(), class_name(class));
    if let Some(why) = declared_contradiction(density, class) {
        return Hypothesis::checked(&name, severity, false, why);
    }
    let (lo, hi) = density.audit_box();
    let report = audit_class(density, class, AUDIT_PROBES, &audit_stream(cfg, class), &lo, &hi);
    let detail = format!("{} probes, {} violations", report.probes, report.violations);
    Hypothesis { name, severity, passed: report.passed(), detail, audit: Some(report) }
}

/// Independent sub-configuration for one role within a report.
pub(crate) fn part(cfg: &IntegrateConfig, tag: u64) -> IntegrateConfig {
    cfg.stream(mix(cfg.stream ^ mix(0x7e00_0000 + tag)))
}

pub(crate) fn require_dim(density: &Density, n: usize) -> Result<()> {
    if density.dim() != n {
        return Err(Error::DimensionMismatch(format!("density '{}' has dimension {}, expected {n}", density.spec(), density.dim())));
    }
    Ok(())
}

pub(crate) fn origin_in(body: &Body<f64>) -> bool {
    body.contains_lp(&vec![0.0; body.dim()])
}

pub(crate) fn row(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

macro_rules! named_variants {
    ($ty:ident { $($v:ident => $s:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
        pub enum $ty { $(#[serde(rename = $s)] $v),+ }

        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$v),+];

            pub fn name(&self) -> &'static str {
                match self { $($ty::$v => $s),+ }
            }
        }

        impl std::str::FromStr for $ty {
            type Err = crate::error::Error;

            fn from_str(s: &str) -> crate::error::Result<Self> {
                match s {
                    $($s => Ok($ty::$v),)+
                    _ => Err(crate::error::Error::Parse(format!(
                        "unknown variant '{}', expected one of: {}",
                        s,
                        [$($s),+].join(", ")
                    ))),
                }
            }
        }
    };
}
pub(crate) use named_variants;
