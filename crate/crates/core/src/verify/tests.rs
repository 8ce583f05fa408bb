use super::*;
use crate::bodies::SubspaceSpec;
use crate::functional::QcFunction;
use crate::integrate::Estimate;

fn cfg() -> IntegrateConfig {
    IntegrateConfig::with_seed(7)
}

fn square() -> Body<f64> {
    Body::cube(2, 1.0).unwrap()
}

fn triangle() -> Body<f64> {
    Body::simplex(2).unwrap()
}

fn d(spec: &str, n: usize) -> Density {
    Density::parse(spec, n).unwrap()
}

fn x_axis() -> SubspaceSpec {
    SubspaceSpec::new(2, vec![0]).unwrap()
}

#[test]
fn verdict_rule() {
    let a = Estimate::mc(1.0, 0.01, 1000);
    let b = Estimate::mc(1.02, 0.01, 1000);
    assert_eq!(decide(&a, &b, Direction::Upper, true), Verdict::Equality);
    let c = Estimate::mc(1.2, 0.01, 1000);
    assert_eq!(decide(&a, &c, Direction::Upper, true), Verdict::Holds);
    assert_eq!(decide(&c, &a, Direction::Upper, true), Verdict::Violated);
    assert_eq!(decide(&c, &a, Direction::Upper, false), Verdict::Inconclusive);
    assert_eq!(decide(&c, &a, Direction::Lower, false), Verdict::Holds);
    assert_eq!(decide(&a, &c, Direction::Lower, true), Verdict::Violated);
    let x = Estimate::exact(3.0);
    assert_eq!(decide(&x, &Estimate::exact(3.0 + 1e-12), Direction::Upper, true), Verdict::Equality);
    assert_eq!(Verdict::Holds.worst(Verdict::Violated), Verdict::Violated);
    assert_eq!(Verdict::Equality.worst(Verdict::Holds), Verdict::Holds);
}

#[test]
fn variant_names_parse() {
    assert_eq!("pair_KL".parse::<DiffVariant>().unwrap(), DiffVariant::PairKl);
    assert_eq!("measure_conv".parse::<CkVariant>().unwrap(), CkVariant::MeasureConv);
    assert!("nope".parse::<SectionVariant>().is_err());
    for v in FunctionalVariant::ALL {
        assert_eq!(v.name().parse::<FunctionalVariant>().unwrap(), *v);
    }
}

#[test]
fn difference_body_examples() {
    let leb = d("lebesgue", 2);
    let r = verify_difference_body(DiffVariant::Classical, &leb, &triangle(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Equality);
    assert!((r.ratio - 1.0).abs() < 1e-12);
    let r = verify_difference_body(DiffVariant::Classical, &leb, &square(), None, &cfg()).unwrap();
    assert!((r.lhs.value - 16.0).abs() < 1e-9 && (r.rhs.value - 24.0).abs() < 1e-9);
    assert_eq!(r.verdict, Verdict::Holds);
    assert_eq!(r.bodies[0].hash.len(), 16);

    let g = d("gaussian", 2);
    let r = verify_difference_body(DiffVariant::Radial, &g, &triangle(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Holds, "{:?} {:?}", r.lhs, r.rhs);
    let r = verify_difference_body(DiffVariant::SupTranslate, &g, &triangle(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    assert_eq!(r.sup_searches.len(), 2);
    let l = triangle().reflect();
    let r = verify_difference_body(DiffVariant::PairKl, &g, &triangle(), Some(&l), &cfg()).unwrap();
    assert!(r.acceptable(), "{:?}", r.verdict);
    assert!(verify_difference_body(DiffVariant::PairKl, &g, &triangle(), None, &cfg()).is_err());
}

#[test]
fn reverse_examples() {
    let g = d("gaussian", 2);
    let r = verify_difference_body(DiffVariant::Reverse, &g, &square(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Equality);
    assert_eq!(r.direction, Direction::Lower);
    let r = verify_difference_body(DiffVariant::Reverse, &g, &triangle(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    let sigma = r.lhs.std_error.hypot(r.rhs.std_error);
    assert!(r.lhs.value - r.rhs.value >= 5.0 * sigma);
}

#[test]
fn failed_audits_stop_the_run() {
    let ring = Density::ring(0.1, 0.2).unwrap();
    let r = verify_difference_body(DiffVariant::Radial, &ring, &Body::unit_ball(2).unwrap(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesisFailed);
    assert!(r.lhs.value.is_nan());
    assert!(r.hypotheses.iter().any(|h| !h.passed));
    // Declared-flag contradictions need no sampling.
    let wedge = Density::wedge(0.3).unwrap();
    let r = verify_difference_body(DiffVariant::Reverse, &wedge, &square(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesisFailed);
    assert!(r.hypotheses.iter().any(|h| !h.passed && h.audit.is_none()));
}

#[test]
fn shifted_examples() {
    let leb = d("lebesgue", 2);
    let r = verify_shifted(ShiftedVariant::Quasi, &leb, &triangle(), &[0.0, 0.0], &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Equality);
    let g = d("gaussian", 2);
    let r = verify_shifted(ShiftedVariant::RadDecreasing, &g, &triangle(), &[3.0, 0.0], &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Holds, "{:?} {:?}", r.lhs, r.rhs);
    let w = r.note("omega_prime").unwrap().as_array().unwrap();
    // The maximizer of a Gaussian over K - K + ω is its point nearest the origin.
    assert!((w[0].as_f64().unwrap() - 2.0).abs() < 1e-2, "{w:?}");
    let r = verify_shifted(ShiftedVariant::QuestionProbe, &g, &triangle(), &[0.0, 0.0], &cfg().samples(20_000)).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.note("max_ratio").unwrap().as_f64().unwrap() <= 1.0 + 3.0 * r.lhs.std_error.hypot(r.rhs.std_error) / r.rhs.value);
}

#[test]
fn ck_examples() {
    let leb1 = d("lebesgue", 1);
    let seg = Body::axis_box(&[0.0], &[1.0]).unwrap();
    let r = verify_ck(CkVariant::ClassicalCk, &leb1, &seg, None, &cfg()).unwrap();
    assert!((r.lhs.value - 1.0).abs() < 1e-9 && (r.rhs.value - 1.0).abs() < 1e-9);
    assert_eq!(r.verdict, Verdict::Equality);
    let leb = d("lebesgue", 2);
    let r = verify_ck(CkVariant::ClassicalConv, &leb, &triangle(), None, &cfg()).unwrap();
    assert!((r.lhs.value - 2.0).abs() < 1e-9);
    assert_eq!(r.verdict, Verdict::Equality);
    let r = verify_ck(CkVariant::MeasureCk, &leb, &triangle(), None, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Equality);
    let off = triangle().translated(&[1.0, 1.0]).unwrap();
    assert!(matches!(verify_ck(CkVariant::ClassicalCk, &leb, &off, None, &cfg()), Err(Error::Precondition(_))));
    let g = d("gaussian", 2);
    let r = verify_ck(CkVariant::MeasureConv, &g, &triangle(), None, &cfg()).unwrap();
    assert!(r.acceptable(), "{:?}", r.verdict);
    let r = verify_ck(CkVariant::PairKl, &g, &square(), Some(&square()), &cfg().samples(50_000)).unwrap();
    assert!(r.acceptable(), "{:?} {:?}", r.verdict, r.notes);
}

#[test]
fn section_examples() {
    let leb = d("lebesgue", 2);
    let h = x_axis();
    let inputs = |k| SectionInputs { density: &leb, body: k, h: &h, e: None, r: None };
    let sq = square();
    let r = verify_section_projection(SectionVariant::Classical, inputs(&sq), &cfg()).unwrap();
    assert!((r.lhs.value - 4.0).abs() < 1e-9 && (r.rhs.value - 8.0).abs() < 1e-9);
    assert_eq!(r.verdict, Verdict::Holds);
    let t = triangle();
    let r = verify_section_projection(SectionVariant::Classical, inputs(&t), &cfg()).unwrap();
    assert!((r.lhs.value - 1.0).abs() < 1e-9, "{:?}", r.lhs);
    assert_eq!(r.verdict, Verdict::Equality);

    let prod = d("exp-norm|cone:cube:1:1,r=1:split=1", 2);
    let r = verify_section_projection(
        SectionVariant::PConcave,
        SectionInputs { density: &prod, body: &sq, h: &h, e: None, r: Some(1) },
        &cfg(),
    )
    .unwrap();
    assert_eq!(r.constant, 3.0);
    assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.hypotheses);

    let gg = d("gaussian|gaussian:split=1", 2);
    let gin = SectionInputs { density: &gg, body: &sq, h: &h, e: None, r: None };
    for v in [SectionVariant::ProductMixed, SectionVariant::ProductQuasi, SectionVariant::MaxSections] {
        let r = verify_section_projection(v, gin, &cfg()).unwrap();
        assert!(r.acceptable(), "{v:?}: {:?} {:?} {:?}", r.verdict, r.lhs, r.rhs);
    }
    let tilted = scenarios::tilted_parallelogram(1.4).unwrap();
    let bad = SectionInputs { body: &tilted, ..gin };
    assert!(matches!(verify_section_projection(SectionVariant::ProductMixed, bad, &cfg()), Err(Error::Precondition(_))));
    let mixed = d("gaussian", 2);
    assert!(verify_section_projection(SectionVariant::ProductQuasi, SectionInputs { density: &mixed, ..gin }, &cfg()).is_err());
}

#[test]
fn two_subspace_sections() {
    let leb = d("lebesgue", 3);
    let cube = Body::cube(3, 1.0).unwrap();
    let h = SubspaceSpec::new(3, vec![0, 2]).unwrap();
    let e = SubspaceSpec::new(3, vec![0, 1]).unwrap();
    let r = verify_section_projection(
        SectionVariant::TwoSubspace,
        SectionInputs { density: &leb, body: &cube, h: &h, e: Some(&e), r: None },
        &cfg(),
    )
    .unwrap();
    assert_eq!(r.constant, 2.0);
    // 4 * 4 <= 2 * 2 * 8
    assert!((r.lhs.value - 16.0).abs() < 1e-9 && (r.rhs.value - 32.0).abs() < 1e-9);
    assert_eq!(r.verdict, Verdict::Holds);
    let wrong = SubspaceSpec::new(3, vec![0]).unwrap();
    assert!(verify_section_projection(
        SectionVariant::TwoSubspace,
        SectionInputs { density: &leb, body: &cube, h: &h, e: Some(&wrong), r: None },
        &cfg()
    )
    .is_err());
}

#[test]
fn functional_examples() {
    let t = QcFunction::indicator(triangle());
    let base = FunctionalInputs { f: &t, g: None, phi: None, h: None, p: None };
    let r = verify_functional(FunctionalVariant::DeltaDiff, base, &cfg()).unwrap();
    assert!((r.lhs.value - 3.0).abs() < 1e-9 && (r.rhs.value - 3.0).abs() < 1e-9);
    assert_eq!(r.verdict, Verdict::Equality);

    let h = x_axis();
    let sq = QcFunction::indicator(square());
    let r = verify_functional(FunctionalVariant::ProjSect, FunctionalInputs { f: &sq, h: Some(&h), ..base }, &cfg()).unwrap();
    let leb = d("lebesgue", 2);
    let c = verify_section_projection(SectionVariant::Classical, SectionInputs { density: &leb, body: &square(), h: &h, e: None, r: None }, &cfg())
        .unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    assert!((r.lhs.value - c.lhs.value).abs() < 1e-12 && (r.rhs.value - c.rhs.value).abs() < 1e-12);

    let seg = Body::cube(1, 1.0).unwrap();
    let cone = QcFunction::cone_profile(&seg, &[0.0], 1.0, 16).unwrap();
    let r = verify_functional(FunctionalVariant::SupportBound, FunctionalInputs { f: &cone, ..base }, &cfg()).unwrap();
    assert!((r.lhs.value - 1.0).abs() < 1e-12 && (r.rhs.value - 1.0).abs() < 1e-12, "{:?} {:?}", r.lhs, r.rhs);
    assert_eq!(r.verdict, Verdict::Equality);
}

#[test]
fn functional_weighted_variants() {
    let h = x_axis();
    let cone = QcFunction::cone_profile(&square(), &[0.0, 0.0], 1.0, 8).unwrap();
    let g1 = d("gaussian", 1);
    let g2 = d("gaussian", 2);
    let base = FunctionalInputs { f: &cone, g: None, phi: None, h: None, p: None };
    let r = verify_functional(FunctionalVariant::ProjSectWeighted, FunctionalInputs { g: Some(&g1), h: Some(&h), ..base }, &cfg()).unwrap();
    assert!(r.acceptable(), "{:?} {:?}", r.verdict, r.hypotheses);
    let r = verify_functional(FunctionalVariant::CkFamily, FunctionalInputs { phi: Some(&g2), ..base }, &cfg().samples(50_000)).unwrap();
    assert!(r.acceptable(), "{:?} {:?}", r.verdict, r.notes);
    let r = verify_functional(FunctionalVariant::SupportBound, FunctionalInputs { phi: Some(&g2), g: Some(&g2), ..base }, &cfg()).unwrap();
    assert!(r.acceptable(), "{:?} {:?} {:?}", r.verdict, r.lhs, r.rhs);

    // Off-center peak: only the shifted form applies.
    let shifted = QcFunction::cone_profile(&square(), &[0.5, 0.0], 1.0, 8).unwrap();
    let inputs = FunctionalInputs { f: &shifted, phi: Some(&g2), ..base };
    assert_eq!(verify_functional(FunctionalVariant::SupportBound, inputs, &cfg()).unwrap().verdict, Verdict::HypothesisFailed);
    let r = verify_functional(FunctionalVariant::SupportShifted, inputs, &cfg()).unwrap();
    assert!(r.acceptable(), "{:?} {:?} {:?}", r.verdict, r.lhs, r.rhs);
}

#[test]
fn lemma_and_alpha_examples() {
    let flat = d("lebesgue", 1);
    let r = check_lemma_f(&flat, 1, 1, 1.0, &cfg()).unwrap();
    assert!((r.lhs.value - 0.5).abs() < 1e-14 && (r.rhs.value - 0.5).abs() < 1e-14);
    assert_eq!(r.verdict, Verdict::Equality);
    let r = check_lemma_f(&flat, 3, 2, 2.0, &cfg()).unwrap();
    assert!((r.lhs.value - r.rhs.value).abs() < 1e-12);
    let r = check_lemma_f(&d("exp-norm", 1), 1, 1, 1.0, &cfg()).unwrap();
    assert!(r.lhs.value - r.rhs.value > 1e-3);
    assert_eq!(r.verdict, Verdict::Holds);
    assert!(check_lemma_f(&d("gaussian", 2), 1, 1, 1.0, &cfg()).is_err());
    assert!(check_lemma_f(&flat, 0, 1, 1.0, &cfg()).is_err());

    for (n, p, want) in [(2, 1.0, 1.0 / 3.0), (2, 1.0, 1.0 / 3.0), (1, 2.0, 2.0 / 3.0)] {
        let a = alpha_constant(n, p, 0.0).unwrap();
        assert!((a.closed - want).abs() < 1e-12 && (a.quadrature - want).abs() < 1e-12);
    }
    let a = alpha_constant(2, 1.0, 0.0).unwrap();
    assert!((a.closed - 1.0 / 3.0).abs() < 1e-12);
    assert!(alpha_constant(1, -1.0, 0.0).is_err());
}

#[test]
fn report_serializes() {
    let r = verify_difference_body(DiffVariant::Classical, &d("lebesgue", 2), &triangle(), None, &cfg()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["verdict"], "equality");
    assert_eq!(v["config"]["seed"], 7);
    let back: IneqReport = serde_json::from_value(v).unwrap();
    assert_eq!(back.verdict, r.verdict);
}
