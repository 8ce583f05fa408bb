//! Dense two-phase simplex method with Bland's anti-cycling rule.
//!
//! Problem sizes in this crate are tiny (a few dozen columns), so the solver
//! keeps a full tableau and recomputes reduced costs every iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITERATIONS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Goal {
    Maximize,
    Minimize,
}

/// `goal objective·x` subject to `rows[i]·x (sense[i]) rhs[i]`.
///
/// Variables are non-negative unless flagged in `free`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    pub goal: Goal,
    pub objective: Vec<T>,
    pub rows: Vec<Vec<T>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<T>,
    pub free: Vec<bool>,
}

impl<T: Real> LpProblem<T> {
    pub fn new(goal: Goal, objective: Vec<T>) -> Self {
        let n = objective.len();
        LpProblem {
            goal,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            free: vec![false; n],
        }
    }

    pub fn maximize(objective: Vec<T>) -> Self {
        Self::new(Goal::Maximize, objective)
    }

    pub fn minimize(objective: Vec<T>) -> Self {
        Self::new(Goal::Minimize, objective)
    }

    pub fn constraint(mut self, row: Vec<T>, sense: Sense, rhs: T) -> Self {
        self.push(row, sense, rhs);
        self
    }

    pub fn push(&mut self, row: Vec<T>, sense: Sense, rhs: T) {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    pub fn free_var(mut self, j: usize) -> Self {
        self.free[j] = true;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("LP needs at least one column".into()));
        }
        if self.rows.len() != self.rhs.len() || self.rows.len() != self.senses.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows, {} right-hand sides, {} senses",
                self.rows.len(),
                self.rhs.len(),
                self.senses.len()
            )));
        }
        if self.free.len() != n {
            return Err(Error::DimensionMismatch("sign restriction length".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} coefficients, objective has {n}",
                    row.len()
                )));
            }
        }
        let finite = self.objective.iter().chain(self.rhs.iter()).chain(self.rows.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("non-finite LP coefficient".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub value: T,
    pub point: Vec<T>,
}

impl<T: Real> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn without_point(status: LpStatus, value: T) -> Self {
        LpSolution { status, value, point: Vec::new() }
    }
}

struct Tableau<T> {
    /// m rows of `ncols + 1` entries; the last entry is the right-hand side.
    a: Vec<Vec<T>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<T: Real> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v = *v / p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != T::zero() {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = *v - f * *pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn objective(&self, cost: &[T]) -> T {
        self.basis.iter().zip(&self.a).map(|(&b, row)| cost[b] * row[self.ncols]).sum()
    }

    /// Minimizes `cost·x` over columns with `allowed[j]`, starting from the
    /// current basis, using Bland's rule for both entering and leaving choice.
    fn run(&mut self, cost: &[T], allowed: &[bool]) -> Result<Step> {
        let opt_tol = T::feas_tol();
        for _ in 0..MAX_ITERATIONS {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let reduced = cost[j] - self.basis.iter().zip(&self.a).map(|(&b, row)| cost[b] * row[j]).sum::<T>();
                if reduced < -opt_tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(Step::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            let mut tiny_positive = false;
            for (i, row) in self.a.iter().enumerate() {
                let coef = row[c];
                if coef > T::pivot_tol() {
                    let ratio = row[self.ncols] / coef;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - T::pivot_tol() || (ratio <= br + T::pivot_tol() && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                } else if coef > T::zero() {
                    tiny_positive = true;
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None if tiny_positive => {
                    return Err(Error::Degenerate("no pivot above 1e-12 in entering column".into()))
                }
                None => return Ok(Step::Unbounded),
            }
        }
        Err(Error::Degenerate(format!("simplex exceeded {MAX_ITERATIONS} iterations")))
    }
}

/// Solves a dense LP by the two-phase simplex method.
pub fn solve_lp<T: Real>(problem: &LpProblem<T>) -> Result<LpSolution<T>> {
    problem.validate()?;
    let n = problem.num_vars();
    let m = problem.rows.len();

    // Column layout: structural (free vars split in two), slacks, artificials.
    let mut col_of = Vec::with_capacity(n);
    let mut nstruct = 0;
    for &f in &problem.free {
        col_of.push((nstruct, if f { Some(nstruct + 1) } else { None }));
        nstruct += if f { 2 } else { 1 };
    }
    let nslack = problem.senses.iter().filter(|s| **s != Sense::Eq).count();
    let nart = problem.senses.iter().zip(&problem.rhs).filter(|(s, b)| needs_artificial(**s, **b)).count();
    let ncols = nstruct + nslack + nart;

    let mut a = vec![vec![T::zero(); ncols + 1]; m];
    let mut basis = vec![0; m];
    let mut slack = nstruct;
    let mut art = nstruct + nslack;
    for i in 0..m {
        let flip = problem.rhs[i] < T::zero();
        let sign = if flip { -T::one() } else { T::one() };
        let sense = match (problem.senses[i], flip) {
            (Sense::Le, true) => Sense::Ge,
            (Sense::Ge, true) => Sense::Le,
            (s, _) => s,
        };
        for (j, &(pos, neg)) in col_of.iter().enumerate() {
            let v = sign * problem.rows[i][j];
            a[i][pos] = v;
            if let Some(k) = neg {
                a[i][k] = -v;
            }
        }
        a[i][ncols] = sign * problem.rhs[i];
        match sense {
            Sense::Le => {
                a[i][slack] = T::one();
                basis[i] = slack;
                slack += 1;
            }
            Sense::Ge => {
                a[i][slack] = -T::one();
                slack += 1;
                a[i][art] = T::one();
                basis[i] = art;
                art += 1;
            }
            Sense::Eq => {
                a[i][art] = T::one();
                basis[i] = art;
                art += 1;
            }
        }
    }
    let mut tab = Tableau { a, basis, ncols };
    let first_art = nstruct + nslack;

    if nart > 0 {
        let mut cost = vec![T::zero(); ncols];
        for c in cost.iter_mut().skip(first_art) {
            *c = T::one();
        }
        let allowed = vec![true; ncols];
        tab.run(&cost, &allowed)?;
        let scale = T::one().max(problem.rhs.iter().fold(T::zero(), |acc, b| acc.max(b.abs())));
        if tab.objective(&cost) > T::feas_tol() * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, T::nan()));
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.a.len() {
            if tab.basis[i] >= first_art {
                let col = (0..first_art).find(|&j| tab.a[i][j].abs() > T::pivot_tol());
                match col {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.a.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let sign = match problem.goal {
        Goal::Maximize => -T::one(),
        Goal::Minimize => T::one(),
    };
    let mut cost = vec![T::zero(); ncols];
    for (j, &(pos, neg)) in col_of.iter().enumerate() {
        cost[pos] = sign * problem.objective[j];
        if let Some(k) = neg {
            cost[k] = -sign * problem.objective[j];
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < first_art).collect();
    match tab.run(&cost, &allowed)? {
        Step::Unbounded => {
            let inf = match problem.goal {
                Goal::Maximize => T::infinity(),
                Goal::Minimize => T::neg_infinity(),
            };
            Ok(LpSolution::without_point(LpStatus::Unbounded, inf))
        }
        Step::Optimal => {
            let mut raw = vec![T::zero(); ncols];
            for (row, &b) in tab.a.iter().zip(&tab.basis) {
                raw[b] = row[ncols];
            }
            let point: Vec<T> = col_of
                .iter()
                .map(|&(pos, neg)| raw[pos] - neg.map_or(T::zero(), |k| raw[k]))
                .collect();
            let value = point.iter().zip(&problem.objective).map(|(x, c)| *x * *c).sum();
            Ok(LpSolution { status: LpStatus::Optimal, value, point })
        }
    }
}

fn needs_artificial<T: Real>(sense: Sense, rhs: T) -> bool {
    match sense {
        Sense::Eq => true,
        Sense::Le => rhs < T::zero(),
        Sense::Ge => rhs >= T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_box() {
        let lp = LpProblem::<f64>::maximize(vec![1.0]).constraint(vec![1.0], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_face() {
        let lp = LpProblem::<f64>::maximize(vec![1.0, 1.0]).constraint(vec![1.0, 1.0], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds() {
        let lp = LpProblem::<f64>::maximize(vec![1.0])
            .constraint(vec![1.0], Sense::Ge, 2.0)
            .constraint(vec![1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let lp = LpProblem::<f64>::maximize(vec![1.0, 0.0]).constraint(vec![0.0, 1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_goes_negative() {
        let lp = LpProblem::<f64>::minimize(vec![1.0]).constraint(vec![1.0], Sense::Ge, -3.0).free_var(0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 3.0).abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // x + y = 1 stated twice, maximize x - y.
        let lp = LpProblem::<f64>::maximize(vec![1.0, -1.0])
            .constraint(vec![1.0, 1.0], Sense::Eq, 1.0)
            .constraint(vec![2.0, 2.0], Sense::Eq, 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let mut lp = LpProblem::<f64>::maximize(vec![1.0, 1.0]);
        lp.push(vec![1.0], Sense::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::DimensionMismatch(_))));
        let empty: LpProblem<f64> = LpProblem::<f64>::maximize(vec![]);
        assert!(matches!(solve_lp(&empty), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let lp = LpProblem::<f64>::minimize(vec![-0.75, 150.0, -0.02, 6.0])
            .constraint(vec![0.25, -60.0, -0.04, 9.0], Sense::Le, 0.0)
            .constraint(vec![0.5, -90.0, -0.02, 3.0], Sense::Le, 0.0)
            .constraint(vec![0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 0.05).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn works_in_f32() {
        let lp = LpProblem::<f32>::maximize(vec![1.0, 2.0])
            .constraint(vec![1.0, 1.0], Sense::Le, 4.0)
            .constraint(vec![0.0, 1.0], Sense::Le, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 7.0).abs() < 1e-5);
    }
}
