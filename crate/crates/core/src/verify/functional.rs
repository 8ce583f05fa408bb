use super::constants::{alpha_closed, theta_rule};
use super::sections::{audit_points, max_section, maximize_offsets};
use super::{named_variants, origin_in, part, require_dim, Builder, Direction, Hypothesis, IneqReport, Severity, Side, Z};
use crate::bodies::SubspaceSpec;
use crate::corekit::binomial;
use crate::densities::{Density, DensityClass};
use crate::error::{Error, Result};
use crate::functional::{
    delta, fn_integral, fn_sup, layer_cake, level_config, project_fn, section_fn, DeltaKind, QcFunction,
};
use crate::integrate::{
    ck_integral, sup_interpolated_translate, translated_average, volume, Estimate, IntegrateConfig, PointCloud, SupResult,
};

named_variants!(FunctionalVariant {
    ProjSectWeighted => "proj_sect_weighted",
    ProjSect => "proj_sect",
    DeltaDiff => "delta_diff",
    CkFamily => "ck_family",
    SupportBound => "support_bound",
    SupportShifted => "support_shifted",
});

#[derive(Clone, Copy)]
pub struct FunctionalInputs<'a> {
    pub f: &'a QcFunction,
    /// Weight function: on `H` for the projection variants, on the ambient
    /// space for `support_bound`.
    pub g: Option<&'a Density>,
    pub phi: Option<&'a Density>,
    pub h: Option<&'a SubspaceSpec>,
    /// Concavity exponent of `f`; defaults to the declared one.
    pub p: Option<f64>,
}

/// Levels checked by the section audit.
const AUDITED_LEVELS: usize = 8;

fn lebesgue_or(phi: Option<&Density>, n: usize) -> Result<Density> {
    let d = match phi {
        Some(d) => d.clone(),
        None => Density::lebesgue(n)?,
    };
    require_dim(&d, n)?;
    Ok(d)
}

/// Every audited level has its largest section through the origin.
fn level_sections_audit(f: &QcFunction, h: &SubspaceSpec, cfg: &IntegrateConfig) -> Result<Hypothesis> {
    let levels = f.levels();
    let step = (levels.len() as f64 / AUDITED_LEVELS as f64).max(1.0);
    let picked: Vec<usize> = (0..levels.len().min(AUDITED_LEVELS)).map(|i| (i as f64 * step) as usize).collect();
    let origin = vec![0.0; h.dim()];
    let vcfg = part(cfg, 60);
    for &i in &picked {
        let body = &levels[i].body;
        let region = body.project(h)?;
        let at_zero = volume(&body.slice(h, &origin)?, &vcfg)?;
        for p in audit_points(&region) {
            let v = volume(&body.slice(h, &p)?, &vcfg)?;
            let tol = Z * v.std_error.hypot(at_zero.std_error) + 1e-9 * at_zero.value.abs().max(v.value.abs());
            if v.value > at_zero.value + tol {
                return Ok(Hypothesis::checked(
                    "level sections peak at the origin",
                    Severity::Required,
                    false,
                    format!("level {i}: section at {p:?} has volume {:.6e} > {:.6e}", v.value, at_zero.value),
                ));
            }
        }
    }
    Ok(Hypothesis::checked("level sections peak at the origin", Severity::Required, true, format!("{} levels on a 5-per-axis offset grid", picked.len())))
}

/// `max_x ∫_{x + H^⊥} f`, searched over offsets in the projection of the
/// support.
fn max_fn_section(f: &QcFunction, h: &SubspaceSpec, cfg: &IntegrateConfig) -> Result<SupResult> {
    let leb = Density::lebesgue(h.ambient() - h.dim())?;
    if f.is_indicator() {
        // Same search as the body version, so the two reports agree.
        let sup = f.sup();
        let mut r = max_section(&leb, f.support(), h, |_| 1.0, cfg)?;
        r.estimate = r.estimate.scale(sup);
        r.history.iter_mut().for_each(|v| *v *= sup);
        return Ok(r);
    }
    let region = f.support().project(h)?;
    let screen = part(cfg, 40).samples(cfg.search_samples.clamp(1000, cfg.n_samples.max(1000)));
    let (arg, history) = maximize_offsets(&region, cfg, |x| {
        section_fn(f, h, x).and_then(|s| fn_integral(&s, &leb, &screen)).map_or(0.0, |e| e.value)
    })?;
    let estimate = fn_integral(&section_fn(f, h, &arg)?, &leb, &part(cfg, 41))?;
    let converged = super::sections::converged(&history);
    Ok(SupResult { estimate, argmax: arg, history, converged })
}

/// `∫_0^1 (1 - θ^p)^n g((1 - θ^p) x) dθ`.
fn theta_average(g: &Density, x: &[f64], n: usize, p: f64, rule: &[(f64, f64)]) -> f64 {
    if p.is_infinite() {
        return g.eval(x);
    }
    let mut y = x.to_vec();
    rule.iter()
        .map(|&(theta, w)| {
            let s = 1.0 - theta.powf(p);
            y.iter_mut().zip(x).for_each(|(o, v)| *o = s * v);
            w * s.powi(n as i32) * g.eval(&y)
        })
        .sum()
}

pub fn verify_functional(variant: FunctionalVariant, inputs: FunctionalInputs<'_>, cfg: &IntegrateConfig) -> Result<IneqReport> {
    let FunctionalInputs { f, g, phi, h, p } = inputs;
    let n = f.dim();
    let (norm, x0) = fn_sup(f);
    let mut b = Builder::new("functional", variant.name(), cfg);
    b.body("supp f", f.support()).note("levels", f.levels().len()).note("sup_f", norm);
    match variant {
        FunctionalVariant::ProjSectWeighted | FunctionalVariant::ProjSect => {
            let h = h.ok_or_else(|| Error::Precondition(format!("{} needs a subspace H", variant.name())))?;
            if h.ambient() != n {
                return Err(Error::DimensionMismatch("subspace and function differ in ambient dimension".into()));
            }
            let kdim = n - h.dim();
            let c = binomial(n as u64, kdim as u64);
            let projected = project_fn(f, h)?;
            b.note("subspace", h.indices().to_vec());
            if variant == FunctionalVariant::ProjSect {
                b.density(&Density::lebesgue(n)?);
                let proj = fn_integral(&projected, &Density::lebesgue(h.dim())?, &part(cfg, 1))?;
                let sec = max_fn_section(f, h, &part(cfg, 2))?;
                b.sup("max section integral", Side::Lhs, &sec);
                let rhs = fn_integral(f, &Density::lebesgue(n)?, &part(cfg, 3))?.scale(c * norm);
                return Ok(b.finish(proj.mul(sec.estimate), rhs, c, Direction::Upper));
            }
            let g = lebesgue_or(g, h.dim())?;
            b.density(&g);
            b.audit(&g, DensityClass::RadiallyDecreasing, Severity::Required);
            let sections = level_sections_audit(f, h, cfg)?;
            b.hypothesis(sections);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let a = fn_integral(&projected, &g, &part(cfg, 1))?;
            let central = fn_integral(&section_fn(f, h, &vec![0.0; h.dim()])?, &Density::lebesgue(kdim)?, &part(cfg, 2))?;
            let lifted = if g.is_lebesgue() { Density::lebesgue(n)? } else { Density::lift(g.clone(), n, h.indices().to_vec())? };
            let rhs = fn_integral(f, &lifted, &part(cfg, 3))?.scale(c * norm);
            Ok(b.finish(a.mul(central), rhs, c, Direction::Upper))
        }
        FunctionalVariant::DeltaDiff => {
            let phi = lebesgue_or(phi, n)?;
            let c = binomial(2 * n as u64, n as u64);
            b.density(&phi);
            b.audit(&phi, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let lhs = fn_integral(&delta(f, DeltaKind::MinusInf)?, &phi, &part(cfg, 1))?;
            let rcfg = part(cfg, 2);
            let avgs = f
                .levels()
                .iter()
                .enumerate()
                .map(|(i, l)| translated_average(&phi, &l.body, &level_config(&rcfg, i)))
                .collect::<Result<Vec<_>>>()?;
            Ok(b.finish(lhs, layer_cake(f, &avgs).scale(c), c, Direction::Upper))
        }
        FunctionalVariant::CkFamily => {
            let phi = lebesgue_or(phi, n)?;
            let two_n = 2f64.powi(n as i32);
            let c = two_n / (n as f64 + 1.0);
            b.density(&phi);
            if let Some(i) = f.levels().iter().position(|l| !origin_in(&l.body)) {
                return Err(Error::Precondition(format!("level {i} does not contain the origin")));
            }
            b.audit(&phi, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let (lcfg, scfg) = (part(cfg, 1), part(cfg, 2));
            let mut ck = Vec::new();
            let mut sups = Vec::new();
            let mut all_converged = true;
            for (i, l) in f.levels().iter().enumerate() {
                ck.push(ck_integral(&phi, &l.body, None, &level_config(&lcfg, i))?);
                let s = sup_interpolated_translate(&phi, &l.body, &level_config(&scfg, i))?;
                all_converged &= s.converged;
                sups.push(s.estimate);
            }
            let sup_cake = layer_cake(f, &sups);
            b.sup_info(super::SupInfo {
                name: "level-wise sup over (y, theta)".into(),
                side: Side::Rhs,
                converged: all_converged,
                argmax: Vec::new(),
                history: vec![sup_cake.value],
            });
            let tilde = fn_integral(&delta(f, DeltaKind::Tilde)?, &phi, &part(cfg, 3))?;
            let tilde_rhs = sup_cake.scale(two_n);
            let tilde_verdict = super::decide(&tilde, &tilde_rhs, Direction::Upper, all_converged);
            b.est_note("conv_lhs", &tilde).est_note("conv_rhs", &tilde_rhs).note("conv_verdict", tilde_verdict.as_str());
            let mut report = b.finish(layer_cake(f, &ck), sup_cake.scale(c), c, Direction::Upper);
            if report.verdict != super::Verdict::HypothesisFailed {
                report.verdict = report.verdict.worst(tilde_verdict);
            }
            Ok(report)
        }
        FunctionalVariant::SupportBound | FunctionalVariant::SupportShifted => {
            let phi = lebesgue_or(phi, n)?;
            b.density(&phi);
            let p = p.or(f.p_concave()).ok_or_else(|| Error::Precondition("the concavity exponent p of f is unknown".into()))?;
            if !(p > 0.0) {
                return Err(Error::Precondition(format!("p = {p} must be positive")));
            }
            let declared_ok = f.p_concave().is_none_or(|q| q >= p);
            b.hypothesis(Hypothesis::checked(
                "f is p-concave",
                Severity::Required,
                declared_ok,
                match f.p_concave() {
                    Some(q) => format!("declared {q}, using p = {p}"),
                    None => format!("p = {p} taken from input"),
                },
            ));
            let alpha = alpha_closed(n, p, 0.0);
            b.note("p", p).note("alpha", alpha);
            let supp = f.support();
            if variant == FunctionalVariant::SupportShifted {
                b.audit(&phi, DensityClass::QuasiConcave, Severity::Required).note("x0", x0.clone());
                if b.failed() {
                    return Ok(b.abort(alpha, Direction::Upper));
                }
                let weight = phi.eval(&x0) / phi.sup();
                let lhs = crate::integrate::measure(&phi, supp, &part(cfg, 1))?.scale(alpha * weight);
                let rhs = fn_integral(f, &phi, &part(cfg, 2))?.scale(1.0 / norm);
                return Ok(b.finish(lhs, rhs, alpha, Direction::Upper));
            }
            b.audit(&phi, DensityClass::QuasiConcave, Severity::Required)
                .audit(&phi, DensityClass::MaxAtOrigin, Severity::Required);
            let at_origin = f.eval(&vec![0.0; n]);
            b.hypothesis(Hypothesis::checked(
                "f peaks at the origin",
                Severity::Required,
                at_origin >= norm * (1.0 - 1e-12),
                format!("f(0) = {at_origin}, sup = {norm}"),
            ));
            if b.failed() {
                return Ok(b.abort(alpha, Direction::Upper));
            }
            match g {
                None => {
                    let lhs = crate::integrate::measure(&phi, supp, &part(cfg, 1))?.scale(alpha);
                    let rhs = fn_integral(f, &phi, &part(cfg, 2))?.scale(1.0 / norm);
                    Ok(b.finish(lhs, rhs, alpha, Direction::Upper))
                }
                Some(g) => {
                    require_dim(g, n)?;
                    b.density(g);
                    let rule = theta_rule(p, cfg.theta_order)?;
                    let vol = volume(supp, &part(cfg, 3))?;
                    let cloud = PointCloud::sample(supp, cfg.n_samples, &part(cfg, 1).rng())?;
                    let (mean, se) = cloud.mean(|x| phi.eval(x) * theta_average(g, x, n, p, &rule));
                    let lhs = vol.mul(Estimate::mc(mean, se, cfg.n_samples as u64));
                    let weight = if phi.is_lebesgue() { g.clone() } else { Density::pointwise_product(g.clone(), phi.clone())? };
                    let rhs = fn_integral(f, &weight, &part(cfg, 2))?.scale(1.0 / norm);
                    Ok(b.finish(lhs, rhs, 1.0, Direction::Upper))
                }
            }
        }
    }
}
