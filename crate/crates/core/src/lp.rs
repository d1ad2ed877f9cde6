//! Exact two-phase simplex over big rationals with Bland's rule.
//!
//! Problems are small (hundreds of columns) but answers must be exact, so the
//! tableau is dense and pivots skip zero entries of the pivot row.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Q)>,
    pub cmp: Cmp,
    pub rhs: Q,
}

/// Constraints over `n` non-negative variables.
#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub n: usize,
    pub rows: Vec<LpRow>,
}

impl Lp {
    pub fn new(n: usize) -> Self {
        Lp { n, rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<(usize, Q)>, cmp: Cmp, rhs: Q) {
        self.rows.push(LpRow { coeffs, cmp, rhs });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Q> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// A feasible basis for fixed constraints; objectives are optimized from a
/// copy of it, so phase one runs once per constraint set.
#[derive(Debug, Clone)]
pub struct Simplex {
    n: usize,
    /// Total columns: structural, slack/surplus, artificial.
    cols: usize,
    first_artificial: usize,
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
}

impl Simplex {
    /// Runs phase one; `None` when the constraints are infeasible.
    pub fn new(lp: &Lp) -> Option<Simplex> {
        let n = lp.n;
        let m = lp.rows.len();
        let mut normalized: Vec<(Vec<Q>, Cmp, Q)> = Vec::with_capacity(m);
        for r in &lp.rows {
            let mut dense = vec![Q::zero(); n];
            for (j, c) in &r.coeffs {
                dense[*j] += c;
            }
            let (mut cmp, mut rhs) = (r.cmp, r.rhs.clone());
            if rhs.is_negative() {
                for v in dense.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
                cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
            normalized.push((dense, cmp, rhs));
        }
        let n_slack = normalized.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = normalized.iter().filter(|r| r.1 != Cmp::Le).count();
        let first_artificial = n + n_slack;
        let cols = first_artificial + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, first_artificial);
        for (dense, cmp, b) in normalized {
            let mut row = dense;
            row.resize(cols, Q::zero());
            match cmp {
                Cmp::Le => {
                    row[s] = Q::one();
                    basis.push(s);
                    s += 1;
                }
                Cmp::Ge => {
                    row[s] = -Q::one();
                    s += 1;
                    row[a] = Q::one();
                    basis.push(a);
                    a += 1;
                }
                Cmp::Eq => {
                    row[a] = Q::one();
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        let mut t = Simplex {
            n,
            cols,
            first_artificial,
            rows,
            rhs,
            basis,
        };
        if n_art > 0 {
            // maximize -(sum of artificials)
            let mut cost = vec![Q::zero(); cols];
            for c in cost.iter_mut().skip(first_artificial) {
                *c = -Q::one();
            }
            match t.optimize_in_place(&cost, cols) {
                Some(v) if v.is_zero() => {}
                _ => return None,
            }
            t.drive_out_artificials();
        }
        t.cols = t.first_artificial;
        for r in t.rows.iter_mut() {
            r.truncate(t.first_artificial);
        }
        Some(t)
    }

    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero());
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // redundant row
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = Q::one() / &self.rows[pr][pc];
        let nz: Vec<usize> = (0..self.rows[pr].len())
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        for &j in &nz {
            self.rows[pr][j] *= &inv;
        }
        self.rhs[pr] *= &inv;
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr || self.rows[r][pc].is_zero() {
                continue;
            }
            let f = self.rows[r][pc].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[r][j] -= d;
            }
            let d = &f * &prhs;
            self.rhs[r] -= d;
        }
        self.basis[pr] = pc;
    }

    /// Maximizes `cost` over columns `< limit`; returns the optimal value or
    /// `None` when unbounded.
    fn optimize_in_place(&mut self, cost: &[Q], limit: usize) -> Option<Q> {
        // reduced costs d_j = c_j - sum_i c_{B_i} a_ij, kept up to date by pivots
        let mut d: Vec<Q> = cost[..limit].to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                if !self.rows[i][j].is_zero() {
                    *dj -= &cost[b] * &self.rows[i][j];
                }
            }
        }
        loop {
            let entering = (0..limit).find(|&j| d[j].is_positive());
            let Some(pc) = entering else {
                let mut v = Q::zero();
                for (i, &b) in self.basis.iter().enumerate() {
                    v += &cost[b] * &self.rhs[i];
                }
                return Some(v);
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][pc];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let (pr, _) = best?;
            self.pivot(pr, pc);
            let f = d[pc].clone();
            for (j, dj) in d.iter_mut().enumerate() {
                if !self.rows[pr][j].is_zero() {
                    *dj -= &f * &self.rows[pr][j];
                }
            }
        }
    }

    fn solution(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }

    /// Any feasible point.
    pub fn point(&self) -> Vec<Q> {
        self.solution()
    }

    pub fn maximize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        let mut cost = vec![Q::zero(); self.cols];
        for (j, c) in objective {
            cost[*j] += c;
        }
        let mut t = self.clone();
        match t.optimize_in_place(&cost, self.cols) {
            Some(value) => LpOutcome::Optimal {
                value,
                x: t.solution(),
            },
            None => LpOutcome::Unbounded,
        }
    }

    pub fn minimize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        let neg: Vec<(usize, Q)> = objective.iter().map(|(j, c)| (*j, -c.clone())).collect();
        match self.maximize(&neg) {
            LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
            other => other,
        }
    }
}

pub fn maximize(lp: &Lp, objective: &[(usize, Q)]) -> LpOutcome {
    match Simplex::new(lp) {
        Some(s) => s.maximize(objective),
        None => LpOutcome::Infeasible,
    }
}

pub fn minimize(lp: &Lp, objective: &[(usize, Q)]) -> LpOutcome {
    match Simplex::new(lp) {
        Some(s) => s.minimize(objective),
        None => LpOutcome::Infeasible,
    }
}

/// Largest support of a nonzero point of the cone `{y >= 0 : rows}` where
/// every row is homogeneous (`rhs = 0`). Returns `None` when the cone is `{0}`.
///
/// Solved as one LP: maximize `sum t_j` with `t_j <= y_j`, `t_j <= 1`; an index
/// that can be positive at all reaches `t_j = 1` after scaling.
pub fn max_support(n: usize, rows: &[LpRow]) -> Option<Vec<bool>> {
    max_support_point(n, rows).map(|y| y.iter().map(Signed::is_positive).collect())
}

/// A point of the cone attaining [`max_support`].
pub fn max_support_point(n: usize, rows: &[LpRow]) -> Option<Vec<Q>> {
    let mut lp = Lp::new(2 * n);
    for r in rows {
        debug_assert!(r.rhs.is_zero(), "max_support expects homogeneous rows");
        lp.rows.push(r.clone());
    }
    for j in 0..n {
        lp.push(vec![(n + j, Q::one()), (j, -Q::one())], Cmp::Le, Q::zero());
        lp.push(vec![(n + j, Q::one())], Cmp::Le, Q::one());
    }
    let obj: Vec<(usize, Q)> = (0..n).map(|j| (n + j, Q::one())).collect();
    match maximize(&lp, &obj) {
        LpOutcome::Optimal { mut x, .. } => {
            x.truncate(n);
            x.iter().any(Signed::is_positive).then_some(x)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = Lp::new(2);
        lp.push(vec![(0, q(1, 1))], Cmp::Le, q(4, 1));
        lp.push(vec![(1, q(2, 1))], Cmp::Le, q(12, 1));
        lp.push(vec![(0, q(3, 1)), (1, q(2, 1))], Cmp::Le, q(18, 1));
        let out = maximize(&lp, &[(0, q(3, 1)), (1, q(5, 1))]);
        let LpOutcome::Optimal { value, x } = out else { panic!() };
        assert_eq!(value, q(36, 1));
        assert_eq!(x, vec![q(2, 1), q(6, 1)]);
    }

    #[test]
    fn equality_and_ge_rows() {
        // x + y + z = 1, x >= 1/3, min z - y
        let mut lp = Lp::new(3);
        lp.push(vec![(0, q(1, 1)), (1, q(1, 1)), (2, q(1, 1))], Cmp::Eq, q(1, 1));
        lp.push(vec![(0, q(1, 1))], Cmp::Ge, q(1, 3));
        let out = minimize(&lp, &[(2, q(1, 1)), (1, q(-1, 1))]);
        assert_eq!(out.value(), Some(&q(-2, 3)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.push(vec![(0, q(1, 1))], Cmp::Ge, q(3, 5));
        lp.push(vec![(0, q(1, 1))], Cmp::Le, q(2, 5));
        assert_eq!(maximize(&lp, &[(0, q(1, 1))]), LpOutcome::Infeasible);
        let mut lp = Lp::new(1);
        lp.push(vec![(0, q(1, 1))], Cmp::Ge, q(1, 1));
        assert_eq!(maximize(&lp, &[(0, q(1, 1))]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let mut lp = Lp::new(2);
        lp.push(vec![(0, q(1, 1)), (1, q(1, 1))], Cmp::Eq, q(1, 1));
        lp.push(vec![(0, q(2, 1)), (1, q(2, 1))], Cmp::Eq, q(2, 1));
        let out = maximize(&lp, &[(0, q(1, 1))]);
        assert_eq!(out.value(), Some(&q(1, 1)));
    }

    #[test]
    fn negative_rhs_is_normalized() {
        let mut lp = Lp::new(1);
        lp.push(vec![(0, q(-1, 1))], Cmp::Le, q(-1, 2));
        assert_eq!(minimize(&lp, &[(0, q(1, 1))]).value(), Some(&q(1, 2)));
    }

    #[test]
    fn support_of_a_cone() {
        // y0 - y1 = 0, y2 = 0 (as y2 <= 0)
        let rows = vec![
            LpRow { coeffs: vec![(0, q(1, 1)), (1, q(-1, 1))], cmp: Cmp::Eq, rhs: q(0, 1) },
            LpRow { coeffs: vec![(2, q(1, 1))], cmp: Cmp::Le, rhs: q(0, 1) },
        ];
        assert_eq!(max_support(3, &rows), Some(vec![true, true, false]));
        let rows = vec![LpRow { coeffs: vec![(0, q(1, 1))], cmp: Cmp::Le, rhs: q(0, 1) }];
        assert_eq!(max_support(1, &rows), None);
    }
}
