use approx::assert_relative_eq;

use super::*;
use crate::corekit::{solve_lp, LpProblem, RandomStream, Sense};

fn tri() -> Body<f64> {
    Body::simplex(2).unwrap()
}

fn cfg() -> IntegrateConfig {
    IntegrateConfig::with_seed(21)
}

/// LP test oracle: is `z = Σ_s c_s x_s` for some `x_s ∈ conv(V_s)`?
fn in_combination(z: &[f64], sets: &[(f64, &[Vec<f64>])]) -> bool {
    let n = z.len();
    let cols: usize = sets.iter().map(|(_, v)| v.len()).sum();
    let mut lp = LpProblem::<f64>::maximize(vec![0.0; cols]);
    let mut offset = 0;
    for (_, vs) in sets {
        let mut row = vec![0.0; cols];
        row[offset..offset + vs.len()].iter_mut().for_each(|v| *v = 1.0);
        lp.push(row, Sense::Eq, 1.0);
        offset += vs.len();
    }
    for k in 0..n {
        let mut row = Vec::with_capacity(cols);
        for (c, vs) in sets {
            row.extend(vs.iter().map(|v| c * v[k]));
        }
        lp.push(row, Sense::Eq, z[k]);
    }
    solve_lp(&lp).map(|s| s.is_optimal()).unwrap_or(false)
}

#[test]
fn builders() {
    let f = QcFunction::indicator(tri());
    assert!(f.is_indicator());
    assert_eq!(f.eval(&[0.2, 0.2]), 1.0);
    assert_eq!(f.eval(&[0.8, 0.8]), 0.0);
    assert_eq!(fn_sup(&f).0, 1.0);
    assert!(tri().contains(&fn_sup(&f).1));

    let seg = Body::cube(1, 1.0).unwrap();
    let cone = QcFunction::cone_profile(&seg, &[0.0], 1.0, 128).unwrap();
    for i in 0..=200 {
        let x = -1.0 + 2.0 * i as f64 / 200.0;
        assert!((cone.eval(&[x]) - (1.0 - x.abs())).abs() <= 1.0 / 128.0 + 1e-12);
    }
    let (s, arg) = fn_sup(&cone);
    assert_eq!((s, arg), (1.0, vec![0.0]));
    let scaled = cone.clone().with_sup(0.7).unwrap();
    assert_eq!(fn_sup(&scaled), (0.7, vec![0.0]));

    let reversed = vec![Level { t: 0.0, body: Body::cube(1, 0.5).unwrap() }, Level { t: 1.0, body: Body::cube(1, 1.0).unwrap() }];
    assert!(matches!(QcFunction::new(reversed, 1.0), Err(Error::Nesting(_))));
    let unordered = vec![Level { t: 0.5, body: seg.clone() }, Level { t: 0.2, body: seg.clone() }];
    assert!(matches!(QcFunction::new(unordered, 1.0), Err(Error::Nesting(_))));
}

#[test]
fn delta_of_indicators() {
    let f = QcFunction::indicator(tri());
    let d = delta(&f, DeltaKind::MinusInf).unwrap();
    assert_relative_eq!(d.support().exact_volume().unwrap(), 3.0, epsilon = 1e-12);
    let d0 = delta(&f, DeltaKind::MinusInfTheta { theta: 0.0 }).unwrap();
    assert_relative_eq!(d0.support().exact_volume().unwrap(), 0.5, epsilon = 1e-12);
    let dt = delta(&f, DeltaKind::Tilde).unwrap();
    let leb = Density::lebesgue(2).unwrap();
    // conv(T ∪ -T) is the cross-polytope: 2^n vol(T)
    assert_relative_eq!(fn_integral(&dt, &leb, &cfg()).unwrap().value, 2.0, epsilon = 1e-12);
    let ball = QcFunction::indicator(Body::unit_ball(2).unwrap());
    assert!(matches!(delta(&ball, DeltaKind::MinusInf), Err(Error::Form(_))));
}

#[test]
fn projections() {
    let h = SubspaceSpec::parse(2, "1").unwrap();
    let f = QcFunction::indicator(tri());
    let p = project_fn(&f, &h).unwrap();
    assert_eq!(p.dim(), 1);
    assert_relative_eq!(p.support().exact_volume().unwrap(), 1.0, epsilon = 1e-12);

    let sq = Body::cube(2, 1.0).unwrap();
    let cone = QcFunction::cone_profile(&sq, &[0.0, 0.0], 1.0, 32).unwrap();
    let pc = project_fn(&cone, &h).unwrap();
    let c1 = QcFunction::cone_profile(&Body::cube(1, 1.0).unwrap(), &[0.0], 1.0, 32).unwrap();
    for i in 0..=64 {
        let x = -1.0 + 2.0 * i as f64 / 64.0 + 1e-7;
        assert_eq!(pc.eval(&[x]), c1.eval(&[x]));
    }

    // projecting in stages equals projecting at once
    let k = Body::random_polytope(3, 8, 4, 0).unwrap();
    let apex = fn_sup(&QcFunction::indicator(k.clone())).1;
    let g = QcFunction::cone_profile(&k, &apex, 2.0, 8).unwrap();
    let xy = SubspaceSpec::parse(3, "1,2").unwrap();
    let x_in_xy = SubspaceSpec::parse(2, "1").unwrap();
    let x = SubspaceSpec::parse(3, "1").unwrap();
    let staged = project_fn(&project_fn(&g, &xy).unwrap(), &x_in_xy).unwrap();
    let direct = project_fn(&g, &x).unwrap();
    for (a, b) in staged.levels().iter().zip(direct.levels()) {
        assert_relative_eq!(a.body.exact_volume().unwrap(), b.body.exact_volume().unwrap(), epsilon = 1e-12);
    }
}

#[test]
fn integrals() {
    let c = cfg();
    let leb1 = Density::lebesgue(1).unwrap();
    let seg = Body::cube(1, 1.0).unwrap();
    let cone = QcFunction::cone_profile(&seg, &[0.0], 1.0, 128).unwrap();
    assert!((fn_integral(&cone, &leb1, &c).unwrap().value - 1.0).abs() < 1e-3);

    let leb = Density::lebesgue(2).unwrap();
    assert_relative_eq!(fn_integral(&QcFunction::indicator(tri()), &leb, &c).unwrap().value, 0.5);
    let g = Density::gaussian(2).unwrap();
    let via_fn = fn_integral(&QcFunction::indicator(tri()), &g, &c).unwrap();
    let direct = measure(&g, &tri(), &c.stream(mix(c.stream ^ mix(0xf0_0000)))).unwrap();
    assert_eq!(via_fn.value, direct.value);

    // refining the level grid does not hurt the cone integral
    let sq = Body::cube(2, 1.0).unwrap();
    let mut last = f64::INFINITY;
    for m in [4, 16, 64] {
        let f = QcFunction::cone_profile(&sq, &[0.0, 0.0], 1.0, m).unwrap();
        let err = (fn_integral(&f, &leb, &c).unwrap().value - 4.0 / 3.0).abs();
        assert!(err <= last + 1e-12);
        last = err;
    }
}

#[test]
fn p_difference_is_below_minus_infinity_difference() {
    let sq = Body::cube(2, 1.0).unwrap();
    let f = QcFunction::cone_profile(&sq, &[0.2, -0.1], 1.0, 16).unwrap();
    let d = delta(&f, DeltaKind::MinusInf).unwrap();
    for p in [-1.0, -2.0] {
        let oracle = PDifference::new(&f, p, 48).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let z = [-1.5 + 0.5 * i as f64, -1.5 + 0.5 * j as f64];
                assert!(oracle.eval(&z) <= d.eval(&z) + 1e-12);
            }
        }
    }
    assert!(PDifference::new(&f, 1.0, 16).is_err());
    let g3 = QcFunction::indicator(Body::cube(3, 1.0).unwrap());
    assert!(matches!(PDifference::new(&g3, -1.0, 16), Err(Error::Unsupported(_))));
}

#[test]
fn superlevel_identities_match_lp_oracle() {
    let mut rng = RandomStream::new(77, 0);
    for seed in 0..3 {
        let k = Body::random_polytope(2, 6, seed, 3).unwrap();
        let apex = fn_sup(&QcFunction::indicator(k.clone())).1;
        let f = QcFunction::cone_profile(&k, &apex, 1.5, 8).unwrap();
        let theta = 0.3;
        let kinds = [DeltaKind::MinusInf, DeltaKind::MinusInfTheta { theta }, DeltaKind::Tilde];
        for kind in kinds {
            let d = delta(&f, kind).unwrap();
            for _ in 0..60 {
                let i = (rng.uniform() * f.levels().len() as f64) as usize;
                let vs = f.levels()[i].body.vertices().unwrap();
                let (lo, hi) = d.levels()[i].body.bounding_box();
                let z: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.uniform_in(a - 0.1, b + 0.1)).collect();
                let expected = match kind {
                    DeltaKind::MinusInf => in_combination(&z, &[(1.0, vs), (-1.0, vs)]),
                    DeltaKind::MinusInfTheta { theta } => in_combination(&z, &[(1.0 - theta, vs), (-theta, vs)]),
                    DeltaKind::Tilde => {
                        let both: Vec<Vec<f64>> = vs.iter().cloned().chain(vs.iter().map(|v| v.iter().map(|x| -x).collect())).collect();
                        in_combination(&z, &[(1.0, &both)])
                    }
                };
                let got = d.level_index(&z).is_some_and(|j| j >= i);
                assert_eq!(got, expected, "{kind:?} level {i} z {z:?}");
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let sq = Body::cube(2, 1.0).unwrap();
    let f = QcFunction::cone_profile(&sq, &[0.0, 0.0], 2.0, 4).unwrap();
    let back = QcFunction::from_json_str(&f.to_json_string().unwrap()).unwrap();
    assert_eq!(back.levels().len(), 5);
    assert_eq!(back.p_concave(), Some(0.5));
    assert_eq!(back.to_json_string().unwrap(), f.to_json_string().unwrap());
    let bad = r#"{"sup": 1.0, "levels": [{"t": 1.0, "body": {"dim": 2, "form": "vpolytope"}}]}"#;
    let err = QcFunction::from_json_str(bad).unwrap_err().to_string();
    assert!(err.contains("levels[0]") && err.contains("vertices"));
}
