use super::*;

type B = Body<f64>;

fn tri() -> B {
    B::simplex(2).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn constructors() {
    assert_eq!(tri().vertices().unwrap().len(), 3);
    let sq = B::cube(2, 1.0).unwrap();
    assert_eq!(sq.vertices().unwrap().len(), 4);
    let disk = B::unit_ball(2).unwrap();
    assert!(disk.contains(&[0.6, 0.8]));
    assert!(!disk.contains(&[0.6, 0.81]));
    assert!(matches!(B::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]), Err(Error::Degenerate(_))));
    assert!(B::simplex(7).is_err());
    let r1 = B::random_polytope(3, 8, 5, 0).unwrap();
    let r2 = B::random_polytope(3, 8, 5, 0).unwrap();
    assert_eq!(r1.vertices(), r2.vertices());
}

#[test]
fn transforms() {
    let t = tri().reflect();
    let mut v = t.vertices().unwrap().to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(v, vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 0.0]]);
    let sq = B::cube(2, 1.0).unwrap().translated(&[5.0, 0.0]).unwrap();
    assert_eq!(sq.bounding_box(), (vec![4.0, -1.0], vec![6.0, 1.0]));
    assert!(sq.contains(&[4.5, 0.9]) && !sq.contains(&[3.9, 0.0]));
    let b2 = B::unit_ball(2).unwrap().scaled(2.0).unwrap();
    assert!(close(b2.exact_volume().unwrap(), 4.0 * std::f64::consts::PI, 1e-12));
    assert!(matches!(tri().scaled(0.0), Err(Error::Degenerate(_))));
}

#[test]
fn minkowski_and_difference_bodies() {
    let seg = B::from_vertices(vec![vec![0.0], vec![1.0]]).unwrap();
    assert_eq!(seg.minkowski_sum(&seg).unwrap().bounding_box(), (vec![0.0], vec![2.0]));
    let hex = tri().difference_body().unwrap();
    assert_eq!(hex.vertices().unwrap().len(), 6);
    assert!(close(hex.exact_volume().unwrap(), 3.0, 1e-12));
    assert!(hex.contains(&[1.0, -1.0]));
    let sq = B::cube(2, 1.0).unwrap().difference_body().unwrap();
    assert!(close(sq.exact_volume().unwrap(), 16.0, 1e-12));
    let bb = B::unit_ball(2).unwrap().minkowski_sum(&B::unit_ball(2).unwrap()).unwrap();
    assert!(matches!(bb.form(), Form::Ball { radius, .. } if *radius == 2.0));
    assert!(matches!(tri().minkowski_sum(&B::unit_ball(2).unwrap()), Err(Error::Form(_))));
    assert_eq!(seg.difference_body().unwrap().bounding_box(), (vec![-1.0], vec![1.0]));
}

#[test]
fn conv_union_and_ck() {
    let seg = B::from_vertices(vec![vec![0.0], vec![1.0]]).unwrap();
    assert_eq!(seg.conv_union(&seg.reflect()).unwrap().bounding_box(), (vec![-1.0], vec![1.0]));
    let cu = tri().conv_union(&tri().reflect()).unwrap();
    assert_eq!(cu.vertices().unwrap().len(), 4);
    assert!(close(cu.exact_volume().unwrap(), 2.0, 1e-12));
    assert_eq!(tri().conv_union(&tri()).unwrap().vertices().unwrap().len(), 3);

    let ck = seg.ck_body().unwrap();
    assert_eq!(ck.vertices().unwrap().len(), 4);
    assert!(close(ck.exact_volume().unwrap(), 1.0, 1e-12));
    let ck2 = tri().ck_body().unwrap();
    let h = SubspaceSpec::new(3, vec![2]).unwrap();
    let s0 = ck2.slice(&h, &[0.0]).unwrap();
    assert!(close(s0.exact_volume().unwrap(), 0.5, 1e-12));
    let half = ck2.slice(&h, &[0.5]).unwrap();
    assert!(close(half.exact_volume().unwrap(), 0.75, 1e-12));
    let moved = tri().translated(&[1.0, 1.0]).unwrap();
    assert!(matches!(moved.ck_body(), Err(Error::Precondition(_))));
}

#[test]
fn support_radial_contains() {
    let sq = B::cube(2, 1.0).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!(close(sq.support(&[1.0, 0.0]).unwrap(), 1.0, 1e-12));
    assert!(close(sq.support(&[r, r]).unwrap(), 2f64.sqrt(), 1e-12));
    assert!(close(B::unit_ball(2).unwrap().support(&[0.6, 0.8]).unwrap(), 1.0, 1e-12));
    assert!(matches!(sq.support(&[0.0, 0.0]), Err(Error::Domain(_))));
    assert!(close(sq.radial(&[1.0, 0.0]).unwrap(), 1.0, 1e-9));
    assert!(close(sq.radial(&[r, r]).unwrap(), 2f64.sqrt(), 1e-9));
    let hex = tri().difference_body().unwrap();
    assert!(close(hex.radial(&[1.0, 0.0]).unwrap(), 1.0, 1e-9));
    assert!(matches!(tri().radial(&[1.0, 0.0]), Err(Error::Precondition(_))));
    assert!(sq.contains(&[0.0, 0.0]) && !sq.contains(&[2.0, 0.0]));
    // oracle support agrees with the vertex route within line-search tolerance
    let o = sq.intersect(&sq).unwrap();
    let via_oracle = o.oracle_support(&[r, r]).unwrap();
    assert!(close(via_oracle, 2f64.sqrt(), 1e-7));
}

#[test]
fn projections_and_slices() {
    let x = SubspaceSpec::new(2, vec![0]).unwrap();
    assert_eq!(B::cube(2, 1.0).unwrap().project(&x).unwrap().bounding_box(), (vec![-1.0], vec![1.0]));
    let a: f64 = 0.9;
    let ka = B::from_vertices(vec![
        vec![1.0, a.tan() + 1.0],
        vec![1.0, a.tan() - 1.0],
        vec![-1.0, -a.tan() + 1.0],
        vec![-1.0, -a.tan() - 1.0],
    ])
    .unwrap();
    assert_eq!(ka.project(&x).unwrap().bounding_box(), (vec![-1.0], vec![1.0]));
    let sec = ka.slice(&x, &[0.0]).unwrap();
    assert!(close(sec.exact_volume().unwrap(), 2.0, 1e-12));
    assert!(sec.contains(&[0.99]) && !sec.contains(&[1.01]));
    assert_eq!(tri().project(&x).unwrap().bounding_box(), (vec![0.0], vec![1.0]));
    let face = tri().slice(&x, &[1.0]).unwrap();
    assert_eq!(face.exact_volume().unwrap(), 0.0);
    let sq = B::cube(2, 1.0).unwrap().slice(&x, &[0.0]).unwrap();
    assert!(close(sq.exact_volume().unwrap(), 2.0, 1e-12));
    assert_eq!(sq.frame().unwrap().embed(&[0.5]), vec![0.0, 0.5]);
    let ball_slice = B::unit_ball(2).unwrap().slice(&x, &[0.6]).unwrap();
    assert!(close(ball_slice.exact_volume().unwrap(), 1.6, 1e-12));
    assert!(matches!(B::unit_ball(2).unwrap().slice(&x, &[1.5]).unwrap().exact_volume(), Ok(v) if v == 0.0));
}

#[test]
fn intersections() {
    let a = B::cube(2, 1.0).unwrap();
    let b = B::axis_box(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
    let i = a.intersect(&b).unwrap();
    for k in 0..21 {
        for l in 0..21 {
            let p = [-1.0 + 0.15 * k as f64, -1.0 + 0.15 * l as f64];
            let inside = (0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]);
            assert_eq!(i.contains(&p), inside, "{p:?}");
        }
    }
    assert!(close(i.exact_volume().unwrap(), 1.0, 1e-12));
    assert!(close(a.intersect(&a).unwrap().exact_volume().unwrap(), 4.0, 1e-12));
    let t = tri();
    let touch = t.intersect(&t.translated(&[1.0, 0.0]).unwrap()).unwrap();
    assert_eq!(touch.exact_volume().unwrap(), 0.0);
    let far = t.intersect(&t.translated(&[5.0, 0.0]).unwrap()).unwrap();
    assert_eq!(far.exact_volume().unwrap(), 0.0);
}

#[test]
fn exact_volumes() {
    assert!(close(B::simplex(3).unwrap().exact_volume().unwrap(), 1.0 / 6.0, 1e-15));
    assert!(close(B::unit_ball(2).unwrap().exact_volume().unwrap(), std::f64::consts::PI, 1e-12));
    assert!(close(B::cube(5, 1.0).unwrap().exact_volume().unwrap(), 32.0, 1e-12));
    let oct = B::cross_polytope(3).unwrap();
    assert!(close(oct.exact_volume().unwrap(), 8.0 / 6.0, 1e-12));
    assert!(matches!(B::cross_polytope(4).unwrap().exact_volume(), Err(Error::Unsupported(_))));
    let d3 = B::simplex(3).unwrap().difference_body().unwrap();
    assert!(close(d3.exact_volume().unwrap(), 20.0 / 6.0, 1e-12));
}

#[test]
fn json_round_trip() {
    for b in [tri().difference_body().unwrap(), B::unit_ball(3).unwrap().with_label("b")] {
        let s = b.to_json_string().unwrap();
        let back = B::from_json_str(&s).unwrap();
        assert_eq!(back.to_json().unwrap(), b.to_json().unwrap());
    }
    assert!(B::from_json_str(r#"{"dim":2,"form":"ball","center":[0,0]}"#).is_err());
    assert!(B::from_json_str(r#"{"dim":3,"form":"ball","center":[0,0],"radius":1}"#).is_err());
    assert!(tri().intersect(&tri()).unwrap().to_json().is_err());
    assert_eq!(B::parse_shorthand("cube:3:1").unwrap().vertices().unwrap().len(), 8);
    assert!(B::parse_shorthand("dodeca:3").is_err());
}

#[test]
fn lp_and_facet_membership_agree() {
    let k = B::random_polytope(3, 10, 3, 1).unwrap();
    let mut rng = RandomStream::new(9, 0);
    for _ in 0..300 {
        let x: Vec<f64> = (0..3).map(|_| rng.uniform_in(-1.2, 1.2)).collect();
        assert_eq!(k.contains(&x), k.contains_lp(&x), "{x:?}");
    }
}

#[test]
fn works_in_f32() {
    let t = Body::<f32>::simplex(2).unwrap().difference_body().unwrap();
    assert!((t.exact_volume().unwrap() - 3.0).abs() < 1e-5);
    assert!(t.contains(&[0.5, -0.5]));
}
