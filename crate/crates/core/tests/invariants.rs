use proptest::prelude::*;
use rslab_core::bodies::SubspaceSpec;
use rslab_core::corekit::{binomial, solve_lp, LpProblem, LpStatus, Sense};
use rslab_core::Body;

fn polytope(n: usize, v: usize, seed: u64) -> Body {
    Body::random_polytope(n, v, seed, 3).unwrap()
}

fn unit(raw: &[f64]) -> Vec<f64> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
    raw.iter().map(|x| x / norm).collect()
}

fn vol(k: &Body) -> f64 {
    k.exact_volume().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // max c·x, Ax <= b, x >= 0 against min b·y, A^T y >= c, y >= 0.
    #[test]
    fn lp_strong_duality(a in prop::collection::vec(0.1f64..3.0, 6), b in prop::collection::vec(0.5f64..4.0, 3),
                         c in prop::collection::vec(-1.0f64..2.0, 2)) {
        let rows: Vec<Vec<f64>> = a.chunks(2).map(|r| r.to_vec()).collect();
        let mut primal = LpProblem::maximize(c.clone());
        for (r, bi) in rows.iter().zip(&b) {
            primal.push(r.clone(), Sense::Le, *bi);
        }
        let mut dual = LpProblem::minimize(b.clone());
        for j in 0..2 {
            dual.push(rows.iter().map(|r| r[j]).collect(), Sense::Ge, c[j]);
        }
        let p = solve_lp(&primal).unwrap();
        let d = solve_lp(&dual).unwrap();
        prop_assert_eq!(p.status, LpStatus::Optimal);
        prop_assert_eq!(d.status, LpStatus::Optimal);
        prop_assert!((p.value - d.value).abs() <= 1e-9 * (1.0 + p.value.abs()), "{} vs {}", p.value, d.value);
        for (r, bi) in rows.iter().zip(&b) {
            prop_assert!(r[0] * p.point[0] + r[1] * p.point[1] <= bi + 1e-9);
        }
    }

    #[test]
    fn support_is_additive_under_minkowski_sums(n in 2usize..4, s1 in 0u64..500, s2 in 0u64..500,
                                                raw in prop::collection::vec(-1.0f64..1.0, 3)) {
        let k = polytope(n, n + 3, s1);
        let l = polytope(n, n + 2, s2 + 1000);
        let u = unit(&raw[..n]);
        let sum = k.minkowski_sum(&l).unwrap();
        let lhs = sum.support(&u).unwrap();
        let rhs = k.support(&u).unwrap() + l.support(&u).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn brunn_minkowski(n in 2usize..4, s1 in 0u64..500, s2 in 0u64..500) {
        let k = polytope(n, n + 3, s1);
        let l = polytope(n, n + 4, s2 + 2000);
        let e = 1.0 / n as f64;
        let mid = k.scaled(0.5).unwrap().minkowski_sum(&l.scaled(0.5).unwrap()).unwrap();
        prop_assert!(vol(&mid).powf(e) >= 0.5 * (vol(&k).powf(e) + vol(&l).powf(e)) - 1e-9);
    }

    #[test]
    fn reflection_flips_support(n in 2usize..4, s in 0u64..500, raw in prop::collection::vec(-1.0f64..1.0, 3)) {
        let k = polytope(n, n + 3, s);
        let u = unit(&raw[..n]);
        let minus: Vec<f64> = u.iter().map(|x| -x).collect();
        prop_assert!((k.reflect().support(&u).unwrap() - k.support(&minus).unwrap()).abs() < 1e-12);
        prop_assert!((vol(&k.reflect()) - vol(&k)).abs() < 1e-9);
    }

    #[test]
    fn difference_body_volume_bounds(n in 2usize..4, s in 0u64..500) {
        let k = polytope(n, n + 3, s);
        let ratio = vol(&k.difference_body().unwrap()) / vol(&k);
        prop_assert!(ratio >= 2f64.powi(n as i32) - 1e-9);
        prop_assert!(ratio <= binomial(2 * n as u64, n as u64) + 1e-9);
    }

    // Slicing conv(K × {0} ∪ −K × {1}) at height θ gives (1 − θ)K − θK.
    #[test]
    fn ck_slices_are_theta_differences(s in 0u64..500, theta in 0.05f64..0.95) {
        let k = Body::random_polytope(2, 5, s, 9).unwrap();
        let c: Vec<f64> = (0..2).map(|j| -k.vertices().unwrap().iter().map(|v| v[j]).sum::<f64>() / 5.0).collect();
        let k = k.translated(&c).unwrap();
        let ck = k.ck_body().unwrap();
        let height = SubspaceSpec::new(3, vec![2]).unwrap();
        let slice = ck.slice(&height, &[theta]).unwrap();
        let expect = k.theta_difference(theta).unwrap();
        prop_assert!((vol(&slice) - vol(&expect)).abs() < 1e-9);
        for raw in [[1.0, 0.3], [-0.2, 1.0], [-1.0, -1.0]] {
            let u = unit(&raw);
            prop_assert!((slice.support(&u).unwrap() - expect.support(&u).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_support_matches_embedded_direction(s in 0u64..500, axis in 0usize..3, raw in prop::collection::vec(-1.0f64..1.0, 2)) {
        let k = polytope(3, 7, s);
        let h = SubspaceSpec::new(3, (0..3).filter(|&j| j != axis).collect()).unwrap();
        let u = unit(&raw);
        let lifted = h.embed(&u, &[0.0]);
        prop_assert!((k.project(&h).unwrap().support(&u).unwrap() - k.support(&lifted).unwrap()).abs() < 1e-9);
    }
}
