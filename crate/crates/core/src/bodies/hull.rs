//! Small dense linear algebra and brute-force hull machinery for low
//! dimensional point sets.

use crate::corekit::{solve_lp, LpProblem, Sense};
use crate::scalar::{dot, Real};

/// Supporting halfspace `normal · x <= offset` with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

/// Above this many candidate subsets the facet cache is skipped and
/// membership falls back to the LP route.
pub(crate) const MAX_FACET_SUBSETS: f64 = 4.0e5;

pub(crate) fn scale_of<T: Real>(points: &[Vec<T>]) -> T {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(T::one(), |m, x| m.max(x.abs()))
}

/// Lexicographic k-subsets of `0..n`, visited without allocation per subset.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn n_subsets(n: usize, k: usize) -> f64 {
    crate::corekit::binomial(n as u64, k as u64)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det<T: Real>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut d = T::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())
            .unwrap();
        if m[p][c] == T::zero() {
            return T::zero();
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d = d * m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let v = m[c][k];
                m[r][k] = m[r][k] - f * v;
            }
        }
    }
    d
}

/// Solves the square system `a x = b`; `None` when numerically singular.
pub(crate) fn solve<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>, tol: T) -> Option<Vec<T>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
            .unwrap();
        if a[p][c].abs() <= tol {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != T::zero() {
                    for k in c..n {
                        let v = a[c][k];
                        a[r][k] = a[r][k] - f * v;
                    }
                    let v = b[c];
                    b[r] = b[r] - f * v;
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Affine rank of a point set.
pub(crate) fn affine_rank<T: Real>(points: &[Vec<T>], tol: T) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let mut rows: Vec<Vec<T>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| *a - *b).collect())
        .collect();
    let cols = points[0].len();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let p = (rank..rows.len())
            .max_by(|&a, &b| rows[a][c].abs().partial_cmp(&rows[b][c].abs()).unwrap())
            .unwrap();
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(p, rank);
        for r in rank + 1..rows.len() {
            let f = rows[r][c] / rows[rank][c];
            for k in c..cols {
                let v = rows[rank][k];
                rows[r][k] = rows[r][k] - f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Normal of the hyperplane through `d` points of `R^d` (generalized cross
/// product of the edge vectors). Not normalized.
fn hyperplane_normal<T: Real>(pts: &[&Vec<T>]) -> Vec<T> {
    let d = pts[0].len();
    let edges: Vec<Vec<T>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0].iter()).map(|(a, b)| *a - *b).collect())
        .collect();
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<T>> = edges
                .iter()
                .map(|e| e.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                .collect();
            let m = det(minor);
            if j % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .collect()
}

/// All facets of the hull of a full-dimensional point set, by brute force
/// over `d`-subsets. Returns `None` when the set is too large.
pub(crate) fn facets<T: Real>(points: &[Vec<T>]) -> Option<Vec<Facet<T>>> {
    let d = points.first()?.len();
    if points.len() < d + 1 || n_subsets(points.len(), d) > MAX_FACET_SUBSETS {
        return None;
    }
    let scale = scale_of(points);
    let tol = T::feas_tol() * scale;
    let mut out: Vec<Facet<T>> = Vec::new();
    for_each_subset(points.len(), d, |idx| {
        let pts: Vec<&Vec<T>> = idx.iter().map(|&i| &points[i]).collect();
        let raw = hyperplane_normal(&pts);
        let len = dot(&raw, &raw).sqrt();
        if len <= T::c(1e-12) * scale.powi(d as i32 - 1) {
            return;
        }
        let mut normal: Vec<T> = raw.iter().map(|v| *v / len).collect();
        let mut offset = dot(&normal, pts[0]);
        let (mut above, mut below) = (false, false);
        for p in points {
            let s = dot(&normal, p) - offset;
            above |= s > tol;
            below |= s < -tol;
            if above && below {
                return;
            }
        }
        if above {
            normal.iter_mut().for_each(|v| *v = -*v);
            offset = -offset;
        }
        let dup = out.iter().any(|f| {
            (f.offset - offset).abs() <= tol
                && f.normal.iter().zip(&normal).all(|(a, b)| (*a - *b).abs() <= T::c(1e-9))
        });
        if !dup {
            out.push(Facet { normal, offset });
        }
    });
    Some(out)
}

/// LP feasibility test `x ∈ conv(points)`.
pub(crate) fn in_hull_lp<T: Real>(points: &[Vec<T>], x: &[T]) -> bool {
    if points.is_empty() {
        return false;
    }
    let v = points.len();
    let mut lp = LpProblem::maximize(vec![T::zero(); v]);
    for j in 0..x.len() {
        lp.push(points.iter().map(|p| p[j]).collect(), Sense::Eq, x[j]);
    }
    lp.push(vec![T::one(); v], Sense::Eq, T::one());
    matches!(solve_lp(&lp), Ok(s) if s.is_optimal())
}

/// Merges near-duplicates and drops every point inside the hull of the rest.
pub(crate) fn prune<T: Real>(points: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let scale = scale_of(&points);
    let mut uniq: Vec<Vec<T>> = Vec::with_capacity(points.len());
    for p in points {
        let dup = uniq
            .iter()
            .any(|q| q.iter().zip(&p).all(|(a, b)| (*a - *b).abs() <= T::merge_tol() * scale));
        if !dup {
            uniq.push(p);
        }
    }
    if uniq.len() <= 2 {
        return uniq;
    }
    let mut keep = vec![true; uniq.len()];
    for i in 0..uniq.len() {
        let others: Vec<Vec<T>> = uniq
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && keep[*j])
            .map(|(_, p)| p.clone())
            .collect();
        if in_hull_lp(&others, &uniq[i]) {
            keep[i] = false;
        }
    }
    uniq.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect()
}

/// Vertices of `{x : a_i · x <= b_i}` by brute force over `d`-subsets of rows.
/// Returns `None` when there are too many rows.
pub(crate) fn hrep_vertices<T: Real>(rows: &[Facet<T>], d: usize) -> Option<Vec<Vec<T>>> {
    if n_subsets(rows.len(), d) > MAX_FACET_SUBSETS * 4.0 {
        return None;
    }
    let scale = rows.iter().fold(T::one(), |m, f| m.max(f.offset.abs()));
    let tol = T::feas_tol() * scale;
    let mut pts: Vec<Vec<T>> = Vec::new();
    for_each_subset(rows.len(), d, |idx| {
        let a: Vec<Vec<T>> = idx.iter().map(|&i| rows[i].normal.clone()).collect();
        let b: Vec<T> = idx.iter().map(|&i| rows[i].offset).collect();
        if let Some(x) = solve(a, b, T::c(1e-10)) {
            if rows.iter().all(|f| dot(&f.normal, &x) <= f.offset + tol)
                && !pts.iter().any(|q| q.iter().zip(&x).all(|(u, v)| (*u - *v).abs() <= tol))
            {
                pts.push(x);
            }
        }
    });
    Some(pts)
}
