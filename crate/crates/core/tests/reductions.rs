//! Weighted checks must collapse to their classical versions when the
//! density is Lebesgue measure.

use rslab_core::bodies::SubspaceSpec;
use rslab_core::functional::QcFunction;
use rslab_core::verify::{
    run_suite, verify_ck, verify_difference_body, verify_functional, verify_section_projection, CkVariant, DiffVariant,
    FunctionalInputs, FunctionalVariant, SectionInputs, SectionVariant, SuiteName,
};
use rslab_core::{Body, Density, IntegrateConfig, Verdict};

fn cfg() -> IntegrateConfig {
    IntegrateConfig::with_seed(21)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn lebesgue_weighted_difference_body_matches_classical() {
    for n in 1..=3 {
        let k = Body::simplex(n).unwrap();
        let leb = Density::lebesgue(n).unwrap();
        let c = verify_difference_body(DiffVariant::Classical, &leb, &k, None, &cfg()).unwrap();
        let w = verify_difference_body(DiffVariant::Radial, &leb, &k, None, &cfg()).unwrap();
        assert!(rel(w.lhs.value, c.lhs.value) < 1e-9 && rel(w.rhs.value, c.rhs.value) < 1e-9, "n = {n}");
        assert_eq!(w.verdict, Verdict::Equality);
    }
}

#[test]
fn lebesgue_measure_ck_matches_classical() {
    let k = Body::cube(2, 1.0).unwrap();
    let leb = Density::lebesgue(2).unwrap();
    for (classical, weighted) in [(CkVariant::ClassicalCk, CkVariant::MeasureCk), (CkVariant::ClassicalConv, CkVariant::MeasureConv)] {
        let c = verify_ck(classical, &leb, &k, None, &cfg()).unwrap();
        let w = verify_ck(weighted, &leb, &k, None, &cfg()).unwrap();
        assert!(rel(w.lhs.value, c.lhs.value) < 1e-9, "{:?} {:?}", w.lhs, c.lhs);
        assert!(rel(w.rhs.value, c.rhs.value) < 1e-9, "{:?} {:?}", w.rhs, c.rhs);
    }
}

#[test]
fn lebesgue_sections_match_classical() {
    let k = Body::simplex(3).unwrap();
    let leb = Density::lebesgue(3).unwrap();
    let h = SubspaceSpec::new(3, vec![0, 1]).unwrap();
    let inputs = SectionInputs { density: &leb, body: &k, h: &h, e: None, r: None };
    let c = verify_section_projection(SectionVariant::Classical, inputs, &cfg()).unwrap();
    let m = verify_section_projection(SectionVariant::MaxSections, inputs, &cfg()).unwrap();
    assert_eq!(c.constant, m.constant);
    assert!(m.acceptable());
    let f = QcFunction::indicator(k.clone());
    let fi = FunctionalInputs { f: &f, g: None, phi: None, h: Some(&h), p: None };
    let p = verify_functional(FunctionalVariant::ProjSect, fi, &cfg()).unwrap();
    assert!(rel(p.lhs.value, c.lhs.value) < 1e-9 && rel(p.rhs.value, c.rhs.value) < 1e-9);
}

#[test]
fn equality_battery_is_all_equalities() {
    let rows = run_suite(SuiteName::EqualityBattery, &cfg()).unwrap();
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert!(r.pass, "{} {} {}: {} vs {} ({})", r.inequality, r.variant, r.params, r.lhs, r.rhs, r.verdict);
    }
}

#[test]
fn constants_suite_passes() {
    let rows = run_suite(SuiteName::Constants, &cfg()).unwrap();
    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn counterexamples_exhibit_violations() {
    let rows = run_suite(SuiteName::Counterexamples, &cfg()).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.pass, "{r:?}");
        assert_eq!(r.verdict, "violated");
    }
}
