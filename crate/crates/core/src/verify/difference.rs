use super::{named_variants, origin_in, part, require_dim, Builder, Direction, IneqReport, Severity, Side, SupInfo};
use crate::bodies::Body;
use crate::corekit::binomial;
use crate::densities::{Density, DensityClass};
use crate::error::{Error, Result};
use crate::integrate::{
    ck_integral, grid_maximize, measure, pair_average, sup_interpolated, sup_interpolated_translate, sup_translate, translated_average, volume,
    IntegrateConfig, InterpolatedSup, SearchRegion,
};

named_variants!(DiffVariant {
    Classical => "classical",
    Radial => "radial",
    SupTranslate => "sup_translate",
    PairKl => "pair_KL",
    Reverse => "reverse",
});

named_variants!(ShiftedVariant {
    RadDecreasing => "rad_decreasing",
    Quasi => "quasi",
    QuestionProbe => "question_probe",
});

named_variants!(CkVariant {
    ClassicalCk => "classical_ck",
    ClassicalConv => "classical_conv",
    MeasureCk => "measure_ck",
    MeasureConv => "measure_conv",
    PairKl => "pair_KL",
});

/// Difference-body bounds: `μ(K - K)` against `binom(2n, n)` times a
/// one-body quantity.
pub fn verify_difference_body(
    variant: DiffVariant,
    density: &Density,
    k: &Body<f64>,
    l: Option<&Body<f64>>,
    cfg: &IntegrateConfig,
) -> Result<IneqReport> {
    let n = k.dim();
    let c = binomial(2 * n as u64, n as u64);
    let mut b = Builder::new("difference_body", variant.name(), cfg);
    b.body("K", k);
    if variant == DiffVariant::Classical {
        b.densities.push("lebesgue".into());
        let lhs = volume(&k.difference_body()?, &part(cfg, 1))?;
        let rhs = volume(k, &part(cfg, 2))?.scale(c);
        return Ok(b.finish(lhs, rhs, c, Direction::Upper));
    }
    require_dim(density, n)?;
    b.density(density);
    match variant {
        DiffVariant::Classical => unreachable!(),
        DiffVariant::Radial => {
            b.audit(density, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let lhs = measure(density, &k.difference_body()?, &part(cfg, 1))?;
            // The pair estimator is invariant under reflecting K, so one run
            // covers both translated averages.
            let avg = translated_average(density, k, &part(cfg, 2))?;
            b.est_note("translated_average", &avg);
            Ok(b.finish(lhs, avg.scale(c), c, Direction::Upper))
        }
        DiffVariant::SupTranslate => {
            b.audit(density, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let lhs = measure(density, &k.difference_body()?, &part(cfg, 1))?;
            let plus = sup_translate(density, k, &SearchRegion::for_translates(density, k), &part(cfg, 2))?;
            let minus_k = k.reflect();
            let minus = sup_translate(density, &minus_k, &SearchRegion::for_translates(density, &minus_k), &part(cfg, 3))?;
            b.sup("sup_x mu(x+K)", Side::Rhs, &plus).sup("sup_x mu(x-K)", Side::Rhs, &minus);
            let rhs = plus.estimate.min(minus.estimate).scale(c);
            Ok(b.finish(lhs, rhs, c, Direction::Upper))
        }
        DiffVariant::PairKl => {
            let l = l.ok_or_else(|| Error::Precondition("pair_KL needs a second body L".into()))?;
            if l.dim() != n {
                return Err(Error::DimensionMismatch("K and L differ in dimension".into()));
            }
            b.body("L", l);
            b.audit(density, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let sum = measure(density, &k.minkowski_sum(l)?, &part(cfg, 1))?;
            let overlap = volume(&k.intersect(&l.reflect())?, &part(cfg, 2))?;
            let avg = pair_average(density, k, l, &part(cfg, 3))?;
            b.est_note("overlap_volume", &overlap);
            Ok(b.finish(sum.mul(overlap), avg.scale(c), c, Direction::Upper))
        }
        DiffVariant::Reverse => {
            b.audit(density, DensityClass::Even, Severity::Required);
            b.audit(density, DensityClass::QuasiConcave, Severity::Required);
            if b.failed() {
                return Ok(b.abort(1.0, Direction::Lower));
            }
            // Common random numbers make the symmetric case an exact tie.
            let same = part(cfg, 1);
            let double = measure(density, &k.scaled(2.0)?, &same)?;
            let diff = measure(density, &k.difference_body()?, &same)?;
            b.est_note("mu_2K", &double);
            Ok(b.finish(diff, double, 1.0, Direction::Lower))
        }
    }
}

fn vertices_plus(body: &Body<f64>, extra: &[f64]) -> Vec<Vec<f64>> {
    let mut v = body.vertices().map(|v| v.to_vec()).unwrap_or_default();
    v.push(extra.to_vec());
    v
}

/// Bounds for `μ(K - K + ω)`.
pub fn verify_shifted(variant: ShiftedVariant, density: &Density, k: &Body<f64>, omega: &[f64], cfg: &IntegrateConfig) -> Result<IneqReport> {
    let n = k.dim();
    require_dim(density, n)?;
    if omega.len() != n || omega.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("omega must be a finite vector of the body's dimension".into()));
    }
    let c = binomial(2 * n as u64, n as u64);
    let mut b = Builder::new("shifted", variant.name(), cfg);
    b.body("K", k).density(density).note("omega", omega.to_vec());
    let diff = k.difference_body()?;
    match variant {
        ShiftedVariant::RadDecreasing | ShiftedVariant::Quasi => {
            b.audit(density, DensityClass::QuasiConcave, Severity::Required);
            if b.failed() {
                return Ok(b.abort(c, Direction::Upper));
            }
            let shifted = diff.translated(omega)?;
            let mu = measure(density, &shifted, &part(cfg, 1))?;
            // sup over y ∈ K of μ(y + ω - K)
            let omega_minus_k = k.reflect().translated(omega)?;
            let first = sup_translate(density, &omega_minus_k, &SearchRegion::within(k), &part(cfg, 2))?;
            b.sup("sup_y mu(y+omega-K)", Side::Rhs, &first);
            if variant == ShiftedVariant::RadDecreasing {
                let region = SearchRegion::within(&shifted);
                let (w, hist) = grid_maximize(&region, cfg.search_points, cfg.refine_rounds, vertices_plus(&shifted, omega), |x| density.eval(x))?;
                let shift: Vec<f64> = w.iter().zip(omega).map(|(a, o)| a - o).collect();
                let overlap = volume(&k.intersect(&k.translated(&shift)?)?, &part(cfg, 3))?;
                let vk = volume(k, &part(cfg, 4))?;
                let c_omega = overlap.div(vk);
                b.note("omega_prime", w.clone())
                    .note("phi_at_omega_prime", *hist.last().unwrap_or(&density.eval(&w)))
                    .est_note("c_omega", &c_omega);
                return Ok(b.finish(mu.mul(c_omega), first.estimate.scale(c), c, Direction::Upper));
            }
            // sup over y ∈ K of μ(-y + ω + K): translates by vectors of -K.
            let omega_plus_k = k.translated(omega)?;
            let second = sup_translate(density, &omega_plus_k, &SearchRegion::within(&k.reflect()), &part(cfg, 5))?;
            b.sup("sup_y mu(-y+omega+K)", Side::Rhs, &second);
            let weight = density.eval(omega) / density.sup();
            b.note("phi_ratio_at_omega", weight);
            let rhs = first.estimate.min(second.estimate).scale(c);
            Ok(b.finish(mu.scale(weight), rhs, c, Direction::Upper))
        }
        ShiftedVariant::QuestionProbe => {
            // sup over ω of μ(K - K + ω), searched on [-4, 4]^n
            let region = SearchRegion::boxed(vec![-4.0; n], vec![4.0; n]);
            let lhs = sup_translate(density, &diff, &region, &part(cfg, 1))?;
            let plus = sup_translate(density, k, &SearchRegion::for_translates(density, k), &part(cfg, 2))?;
            let minus_k = k.reflect();
            let minus = sup_translate(density, &minus_k, &SearchRegion::for_translates(density, &minus_k), &part(cfg, 3))?;
            b.sup("sup_omega mu(K-K+omega)", Side::Lhs, &lhs)
                .sup("sup_x mu(x+K)", Side::Rhs, &plus)
                .sup("sup_x mu(x-K)", Side::Rhs, &minus);
            let rhs = plus.estimate.min(minus.estimate).scale(c);
            b.note("max_ratio", lhs.estimate.value / rhs.value);
            Ok(b.finish_with(lhs.estimate, rhs, c, Direction::Upper, super::Verdict::Inconclusive))
        }
    }
}

fn interp_info(name: &str, side: Side, s: &InterpolatedSup) -> SupInfo {
    let mut argmax = s.y.clone();
    argmax.push(s.theta);
    SupInfo { name: name.into(), side, converged: s.converged, argmax, history: vec![s.estimate.value] }
}

/// θ-integrals over the Rogers-Shephard body and the convex hull of `K ∪ -K`.
pub fn verify_ck(variant: CkVariant, density: &Density, k: &Body<f64>, l: Option<&Body<f64>>, cfg: &IntegrateConfig) -> Result<IneqReport> {
    let n = k.dim();
    if !origin_in(k) {
        return Err(Error::Precondition("the origin must lie in K".into()));
    }
    let two_n = 2f64.powi(n as i32);
    let ck_c = two_n / (n as f64 + 1.0);
    let mut b = Builder::new("ck", variant.name(), cfg);
    b.body("K", k);
    let lebesgue = Density::lebesgue(n)?;
    match variant {
        CkVariant::ClassicalCk => {
            b.density(&lebesgue);
            let lhs = ck_integral(&lebesgue, k, None, &part(cfg, 1))?;
            let rhs = volume(k, &part(cfg, 2))?.scale(ck_c);
            Ok(b.finish(lhs, rhs, ck_c, Direction::Upper))
        }
        CkVariant::ClassicalConv => {
            b.density(&lebesgue);
            let lhs = volume(&k.conv_union(&k.reflect())?, &part(cfg, 1))?;
            let rhs = volume(k, &part(cfg, 2))?.scale(two_n);
            Ok(b.finish(lhs, rhs, two_n, Direction::Upper))
        }
        CkVariant::MeasureCk | CkVariant::MeasureConv => {
            require_dim(density, n)?;
            b.density(density);
            let constant = if variant == CkVariant::MeasureCk { ck_c } else { two_n };
            b.audit(density, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(constant, Direction::Upper));
            }
            let lhs = if variant == CkVariant::MeasureCk {
                ck_integral(density, k, None, &part(cfg, 1))?
            } else {
                measure(density, &k.conv_union(&k.reflect())?, &part(cfg, 1))?
            };
            let s = sup_interpolated_translate(density, k, &part(cfg, 2))?;
            b.sup_info(interp_info("sup_(y,theta) mu((1-theta)y - theta K)/theta^n", Side::Rhs, &s))
                .note("sup_upper_bound", s.bound);
            Ok(b.finish(lhs, s.estimate.scale(constant), constant, Direction::Upper))
        }
        CkVariant::PairKl => {
            require_dim(density, n)?;
            b.density(density);
            let l = l.ok_or_else(|| Error::Precondition("pair_KL needs a second body L".into()))?;
            if l.dim() != n {
                return Err(Error::DimensionMismatch("K and L differ in dimension".into()));
            }
            b.body("L", l);
            if !origin_in(l) {
                return Err(Error::Precondition("the origin must lie in L".into()));
            }
            let overlap = volume(&k.intersect(&l.reflect())?, &part(cfg, 3))?;
            if overlap.value <= 0.0 {
                return Err(Error::Precondition("K and -L must overlap in a set of positive volume".into()));
            }
            b.audit(density, DensityClass::RadiallyDecreasing, Severity::Required);
            if b.failed() {
                return Ok(b.abort(ck_c, Direction::Upper));
            }
            let mid = ck_integral(density, k, Some(l), &part(cfg, 1))?;
            let lower = measure(density, &k.conv_union(l)?, &part(cfg, 2))?.scale(1.0 / (n as f64 + 1.0));
            let vk = volume(k, &part(cfg, 4))?;
            let s = sup_interpolated(density, k, l, &part(cfg, 5))?;
            b.sup_info(interp_info("sup_(y,theta) mu((1-theta)y + theta L)/theta^n", Side::Rhs, &s));
            let rhs = s.estimate.mul(vk.div(overlap)).scale(ck_c);
            // The chain also bounds the θ-integral from below.
            let low_verdict = super::decide(&lower, &mid, Direction::Upper, true);
            b.est_note("lower_side", &lower).note("lower_verdict", low_verdict.as_str());
            let mut report = b.finish(mid, rhs, ck_c, Direction::Upper);
            report.verdict = report.verdict.worst(low_verdict);
            Ok(report)
        }
    }
}
