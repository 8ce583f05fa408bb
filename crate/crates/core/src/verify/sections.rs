use super::{named_variants, part, require_dim, Builder, Direction, Hypothesis, IneqReport, Severity, Side, Z};
use crate::bodies::{Body, Exact, Form, SubspaceSpec};
use crate::corekit::binomial;
use crate::densities::{Density, DensityClass, Kind};
use crate::error::{Error, Result};
use crate::integrate::{grid_maximize, measure, volume, Estimate, IntegrateConfig, SearchRegion, SupResult};

named_variants!(SectionVariant {
    Classical => "classical",
    ProductMixed => "product_mixed",
    ProductQuasi => "product_quasi",
    MaxSections => "max_sections",
    TwoSubspace => "two_subspace",
    PConcave => "p_concave",
});

/// Inputs of a section/projection check. `h` is the projection subspace;
/// sections are taken parallel to its complement. `e` is the second
/// subspace of the two-subspace variant.
#[derive(Clone, Copy)]
pub struct SectionInputs<'a> {
    pub density: &'a Density,
    pub body: &'a Body<f64>,
    pub h: &'a SubspaceSpec,
    pub e: Option<&'a SubspaceSpec>,
    pub r: Option<u32>,
}

/// Offsets per axis for the `(x, t)` audit grid.
const AUDIT_GRID: usize = 5;
const AUDIT_LEVELS: [f64; 3] = [0.25, 0.5, 0.75];

pub(crate) fn region_extras(region: &Body<f64>) -> Vec<Vec<f64>> {
    let n = region.dim();
    let mut extra = region.vertices().map(|v| v.to_vec()).unwrap_or_default();
    if !extra.is_empty() {
        let c: Vec<f64> = (0..n).map(|i| extra.iter().map(|p| p[i]).sum::<f64>() / extra.len() as f64).collect();
        extra.push(c);
    }
    let origin = vec![0.0; n];
    if region.contains(&origin) {
        extra.push(origin);
    }
    extra
}

/// Grid-plus-refinement maximization of `objective` over offsets in
/// `region`.
pub(crate) fn maximize_offsets<F>(region: &Body<f64>, cfg: &IntegrateConfig, objective: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let per_axis = if region.dim() >= 3 { cfg.search_points.min(7) } else { cfg.search_points };
    grid_maximize(&SearchRegion::within(region), per_axis, cfg.refine_rounds, region_extras(region), objective)
}

pub(crate) fn converged(history: &[f64]) -> bool {
    let n = history.len();
    n >= 3 && (history[n - 1] - history[n - 3]).abs() <= 0.005 * history[n - 1].abs().max(f64::MIN_POSITIVE)
}

/// `max_x weight(x) μ(K ∩ (x + offsets^⊥))` over offsets `x` in the
/// projection of `K` onto `offsets`.
pub(crate) fn max_section<W>(density: &Density, k: &Body<f64>, offsets: &SubspaceSpec, weight: W, cfg: &IntegrateConfig) -> Result<SupResult>
where
    W: Fn(&[f64]) -> f64 + Sync,
{
    let region = k.project(offsets)?;
    let screen = part(cfg, 40).samples(cfg.search_samples.clamp(1000, cfg.n_samples.max(1000)));
    // Surface dimension problems before the search swallows them.
    let probe = region_extras(&region).into_iter().next().unwrap_or_else(|| {
        let (lo, hi) = region.bounding_box();
        lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
    });
    measure(density, &k.slice(offsets, &probe)?, &screen)?;
    let (arg, history) = maximize_offsets(&region, cfg, |x| {
        let w = weight(x);
        if w == 0.0 {
            return 0.0;
        }
        match k.slice(offsets, x).and_then(|s| measure(density, &s, &screen)) {
            Ok(e) => w * e.value,
            Err(_) => 0.0,
        }
    })?;
    let estimate = measure(density, &k.slice(offsets, &arg)?, &part(cfg, 41))?.scale(weight(&arg));
    let converged = converged(&history);
    Ok(SupResult { estimate, argmax: arg, history, converged })
}

/// The factors of a product density along `h` and its complement.
fn split(density: &Density, h: &SubspaceSpec) -> Result<(Density, Density)> {
    let on_h = h.indices().to_vec();
    let on_perp = h.complement();
    if density.is_lebesgue() {
        return Ok((Density::lebesgue(on_h.len())?, Density::lebesgue(on_perp.len())?));
    }
    let not_split = || Error::Precondition(format!("density '{}' is not a product along the subspace and its complement", density.spec()));
    let Kind::Product(factors) = density.kind() else {
        return Err(not_split());
    };
    let find = |coords: &[usize]| {
        factors.iter().find(|f| {
            let mut c = f.coords.clone();
            c.sort_unstable();
            c == coords
        })
    };
    let covered: usize = factors.iter().map(|f| f.coords.len()).sum();
    match (find(&on_h), find(&on_perp)) {
        (Some(a), Some(b)) if factors.len() == 2 => Ok((a.density.clone(), b.density.clone())),
        (Some(a), None) if factors.len() == 1 && covered == on_h.len() => Ok((a.density.clone(), Density::lebesgue(on_perp.len())?)),
        (None, Some(b)) if factors.len() == 1 && covered == on_perp.len() => Ok((Density::lebesgue(on_h.len())?, b.density.clone())),
        _ => Err(not_split()),
    }
}

/// `P_H K ⊆ K`, checked on the projected vertices.
fn projection_inside(k: &Body<f64>, h: &SubspaceSpec) -> Result<bool> {
    let zeros = vec![0.0; h.ambient() - h.dim()];
    if let Form::Ball { center, .. } = k.form() {
        return Ok(h.perp_point(center).iter().all(|v| v.abs() <= 1e-12));
    }
    let verts = k.vertices().ok_or_else(|| Error::Form("projection containment needs a polytope or ball".into()))?;
    Ok(verts.iter().all(|v| k.contains(&h.embed(&h.project_point(v), &zeros))))
}

fn require_projection_inside(k: &Body<f64>, h: &SubspaceSpec) -> Result<()> {
    if projection_inside(k, h)? {
        Ok(())
    } else {
        Err(Error::Precondition("the projection of K onto H is not contained in K".into()))
    }
}

fn solid(b: &Body<f64>) -> Option<Body<f64>> {
    match b.exact() {
        Some(Exact::Empty) => None,
        Some(Exact::Is(s)) => Some((**s).clone()),
        _ => Some(b.clone()),
    }
}

/// Grid points of `region`: vertices, centroid, origin and an inner grid.
pub(crate) fn audit_points(region: &Body<f64>) -> Vec<Vec<f64>> {
    let mut pts = region_extras(region);
    let (lo, hi) = region.bounding_box();
    let d = lo.len();
    let total = AUDIT_GRID.pow(d as u32);
    for idx in 0..total {
        let mut rem = idx;
        let p: Vec<f64> = (0..d)
            .map(|i| {
                let j = rem % AUDIT_GRID;
                rem /= AUDIT_GRID;
                lo[i] + (hi[i] - lo[i]) * (j as f64 + 0.5) / AUDIT_GRID as f64
            })
            .collect();
        if region.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// `vol_k(C_t(φ_k) ∩ K(x))` is largest at `x = 0` on a finite `(x, t)`
/// grid.
fn level_section_audit(phi_k: &Density, k: &Body<f64>, h: &SubspaceSpec, cfg: &IntegrateConfig) -> Result<Hypothesis> {
    let region = k.project(h)?;
    let pts = audit_points(&region);
    let origin = vec![0.0; h.dim()];
    let vcfg = part(cfg, 50).samples(cfg.search_samples.max(1000));
    let mut worst: Option<(Vec<f64>, f64, f64, f64)> = None;
    for &t in &AUDIT_LEVELS {
        let level = match phi_k.superlevel(t) {
            Ok(b) => Some(b),
            Err(Error::UnboundedSupport(_)) => None,
            Err(e) => return Err(e),
        };
        let section_volume = |x: &[f64]| -> Result<Estimate> {
            let s = k.slice(h, x)?;
            let Some(s) = solid(&s) else { return Ok(Estimate::exact(0.0)) };
            match &level {
                Some(c) => volume(&s.intersect(c)?, &vcfg),
                None => volume(&s, &vcfg),
            }
        };
        let at_zero = section_volume(&origin)?;
        for p in &pts {
            let v = section_volume(p)?;
            let excess = v.value - at_zero.value - Z * v.std_error.hypot(at_zero.std_error) - 1e-9 * at_zero.value.abs();
            if excess > 0.0 && worst.as_ref().is_none_or(|w| excess > w.3) {
                worst = Some((p.clone(), t, v.value, excess));
            }
        }
    }
    let detail = format!("{} offsets x {} levels", pts.len(), AUDIT_LEVELS.len());
    Ok(match worst {
        None => Hypothesis::checked("level sections peak at x = 0", Severity::Warn, true, detail),
        Some((p, t, v, _)) => Hypothesis::checked(
            "level sections peak at x = 0",
            Severity::Warn,
            false,
            format!("{detail}; section at {p:?}, t = {t} has volume {v:.6e}"),
        ),
    })
}

pub fn verify_section_projection(variant: SectionVariant, inputs: SectionInputs<'_>, cfg: &IntegrateConfig) -> Result<IneqReport> {
    let SectionInputs { density, body: k, h, e, r } = inputs;
    let n = k.dim();
    if h.ambient() != n {
        return Err(Error::DimensionMismatch(format!("subspace of R^{} for a body in R^{n}", h.ambient())));
    }
    let perp = h.complement_spec();
    let kdim = perp.dim();
    let c = binomial(n as u64, kdim as u64);
    let mut b = Builder::new("section_projection", variant.name(), cfg);
    b.body("K", k).note("subspace", h.indices().to_vec());
    match variant {
        SectionVariant::Classical => {
            let leb = Density::lebesgue(kdim)?;
            b.density(&Density::lebesgue(n)?);
            let proj = volume(&k.project(h)?, &part(cfg, 1))?;
            let sec = max_section(&leb, k, h, |_| 1.0, &part(cfg, 2))?;
            b.sup("max section", Side::Lhs, &sec);
            let rhs = volume(k, &part(cfg, 3))?.scale(c);
            Ok(b.finish(proj.mul(sec.estimate), rhs, c, Direction::Upper))
        }
        SectionVariant::ProductMixed | SectionVariant::ProductQuasi | SectionVariant::PConcave => {
            require_dim(density, n)?;
            b.density(density);
            let (phi_h, phi_k) = split(density, h)?;
            let constant = match variant {
                SectionVariant::PConcave => {
                    let r = r.ok_or_else(|| Error::Precondition("p_concave needs r".into()))?;
                    b.note("r", r);
                    binomial((n as u64) + r as u64, (n - kdim) as u64)
                }
                _ => c,
            };
            match variant {
                SectionVariant::ProductMixed => {
                    require_projection_inside(k, h)?;
                    b.audit(&phi_k, DensityClass::QuasiConcave, Severity::Required)
                        .audit(&phi_k, DensityClass::MaxAtOrigin, Severity::Required)
                        .audit(&phi_h, DensityClass::RadiallyDecreasing, Severity::Required)
                        .note("continuous_at_origin_declared", phi_k.flags().continuous_at_origin);
                    let h_audit = level_section_audit(&phi_k, k, h, cfg)?;
                    b.hypothesis(h_audit);
                }
                SectionVariant::ProductQuasi => {
                    require_projection_inside(k, h)?;
                    b.audit(density, DensityClass::QuasiConcave, Severity::Required)
                        .audit(&phi_h, DensityClass::MaxAtOrigin, Severity::Required)
                        .audit(&phi_k, DensityClass::MaxAtOrigin, Severity::Required);
                }
                _ => {
                    let p = r.map(|r| if r == 0 { f64::INFINITY } else { 1.0 / r as f64 }).unwrap();
                    b.audit(&phi_k, DensityClass::PConcave(p), Severity::Required)
                        .audit(&phi_h, DensityClass::RadiallyDecreasing, Severity::Required);
                }
            }
            if b.failed() {
                return Ok(b.abort(constant, Direction::Upper));
            }
            let proj = measure(&phi_h, &k.project(h)?, &part(cfg, 1))?;
            let rhs = measure(density, k, &part(cfg, 3))?.scale(constant);
            let origin = vec![0.0; h.dim()];
            let central = measure(&phi_k, &k.slice(h, &origin)?, &part(cfg, 2))?;
            if variant == SectionVariant::ProductQuasi {
                let top = phi_h.sup();
                let sec = max_section(&phi_k, k, h, |x| phi_h.eval(x) / top, &part(cfg, 4))?;
                b.sup("max weighted section", Side::Lhs, &sec);
                // The search can only improve on the central section.
                let best = if central.value > sec.estimate.value { central } else { sec.estimate };
                return Ok(b.finish(proj.mul(best), rhs, constant, Direction::Upper));
            }
            if variant == SectionVariant::PConcave {
                let sec = max_section(&phi_k, k, h, |_| 1.0, &part(cfg, 4))?;
                let tol = Z * sec.estimate.std_error.hypot(central.std_error) + 1e-9 * central.value.abs();
                let ok = sec.estimate.value <= central.value + tol;
                b.hypothesis(Hypothesis::checked(
                    "largest section through the origin",
                    Severity::Required,
                    ok,
                    format!("central {:.6e}, searched max {:.6e} at {:?}", central.value, sec.estimate.value, sec.argmax),
                ));
                if !ok {
                    return Ok(b.abort(constant, Direction::Upper));
                }
            }
            Ok(b.finish(proj.mul(central), rhs, constant, Direction::Upper))
        }
        SectionVariant::MaxSections => {
            require_dim(density, n)?;
            b.density(density);
            b.audit(density, DensityClass::QuasiConcave, Severity::Required)
                .audit(density, DensityClass::MaxAtOrigin, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let along_h = max_section(density, k, &perp, |_| 1.0, &part(cfg, 1))?;
            let along_perp = max_section(density, k, h, |_| 1.0, &part(cfg, 2))?;
            b.sup("max section parallel to H", Side::Lhs, &along_h)
                .sup("max section parallel to the complement", Side::Lhs, &along_perp);
            let rhs = measure(density, k, &part(cfg, 3))?.scale(c * density.sup());
            Ok(b.finish(along_h.estimate.mul(along_perp.estimate), rhs, c, Direction::Upper))
        }
        SectionVariant::TwoSubspace => {
            require_dim(density, n)?;
            b.density(density);
            let e = e.ok_or_else(|| Error::Precondition("two_subspace needs a second subspace E".into()))?;
            if e.ambient() != n {
                return Err(Error::DimensionMismatch("E and K differ in ambient dimension".into()));
            }
            let (i, j) = (e.dim(), h.dim());
            if n < 3 || !(2..n).contains(&i) || !(2..n).contains(&j) || i + j < n + 1 {
                return Err(Error::Precondition(format!("need 2 <= dim E, dim H <= n - 1 and dim E + dim H >= n + 1 (got {i}, {j}, n = {n})")));
            }
            if !e.complement_spec().is_within(h) {
                return Err(Error::Precondition("the complement of E must lie in H".into()));
            }
            let f_axes: Vec<usize> = e.indices().iter().copied().filter(|a| h.indices().contains(a)).collect();
            let f = SubspaceSpec::new(n, f_axes)?;
            let fk = f.dim();
            let constant = binomial((n - fk) as u64, (n - i) as u64);
            b.note("second_subspace", e.indices().to_vec()).note("intersection", f.indices().to_vec());
            b.audit(density, DensityClass::PConcave(-1.0 / n as f64), Severity::Required);
            if b.failed() {
                return Ok(b.abort(constant, Direction::Upper));
            }
            let se = max_section(density, k, &e.complement_spec(), |_| 1.0, &part(cfg, 1))?;
            let sh = max_section(density, k, &h.complement_spec(), |_| 1.0, &part(cfg, 2))?;
            let sf = max_section(density, k, &f.complement_spec(), |_| 1.0, &part(cfg, 3))?;
            b.sup("max section parallel to E", Side::Lhs, &se)
                .sup("max section parallel to H", Side::Lhs, &sh)
                .sup("max section parallel to E and H", Side::Rhs, &sf);
            let mu = measure(density, k, &part(cfg, 4))?;
            Ok(b.finish(se.estimate.mul(sh.estimate), sf.estimate.mul(mu).scale(constant), constant, Direction::Upper))
        }
    }
}
