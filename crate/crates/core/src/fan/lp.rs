//! Exact rational linear programming.
//!
//! A dense two-phase simplex over `BigRational` with Bland's rule, which
//! terminates without any tolerance fiddling. Problem sizes here are tiny
//! (at most a few dozen variables), so no effort is spent on efficiency.

use num_traits::{One, Signed, Zero};

use crate::ratlin::Rational;

/// `maximize c . x` subject to `a . x <= rhs` for each constraint; `x` free.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub constraints: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpProblem {
    pub fn new(n: usize) -> Self {
        LpProblem { objective: vec![Rational::zero(); n], constraints: Vec::new() }
    }

    pub fn set_objective(&mut self, c: Vec<Rational>) {
        assert_eq!(c.len(), self.objective.len());
        self.objective = c;
    }

    /// `a . x <= rhs`
    pub fn leq(&mut self, a: Vec<Rational>, rhs: Rational) {
        assert_eq!(a.len(), self.objective.len());
        self.constraints.push((a, rhs));
    }

    /// `a . x >= rhs`
    pub fn geq(&mut self, a: Vec<Rational>, rhs: Rational) {
        self.leq(a.iter().map(|v| -v).collect(), -rhs);
    }

    /// `a . x = rhs` as a pair of inequalities.
    pub fn eq(&mut self, a: Vec<Rational>, rhs: Rational) {
        self.leq(a.clone(), rhs.clone());
        self.geq(a, rhs);
    }

    pub fn solve(&self) -> LpResult {
        Simplex::run(self)
    }
}

struct Simplex {
    // Tableau rows: one per constraint, columns: variables then rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cost: Vec<Rational>, // reduced-cost row, last entry = -objective value
    n_total: usize,
}

impl Simplex {
    fn run(p: &LpProblem) -> LpResult {
        let n = p.objective.len();
        let m = p.constraints.len();
        // Columns: 2n split vars, m slacks, m artificials, rhs.
        let n_struct = 2 * n + m;
        let n_total = n_struct + m;
        let mut rows = Vec::with_capacity(m);
        for (i, (a, rhs)) in p.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); n_total + 1];
            for (j, c) in a.iter().enumerate() {
                row[j] = c.clone();
                row[n + j] = -c.clone();
            }
            row[2 * n + i] = Rational::one();
            row[n_total] = rhs.clone();
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[n_struct + i] = Rational::one();
            rows.push(row);
        }
        let basis: Vec<usize> = (0..m).map(|i| n_struct + i).collect();
        let mut s = Simplex { rows, basis, cost: vec![Rational::zero(); n_total + 1], n_total };

        // Phase 1: minimize the sum of artificials.
        let mut phase1 = vec![Rational::zero(); n_total];
        for j in n_struct..n_total {
            phase1[j] = Rational::one();
        }
        s.load_cost(&phase1);
        s.pivot_loop(n_total);
        let infeas = -s.cost[s.n_total].clone();
        if !infeas.is_zero() {
            return LpResult::Infeasible;
        }
        s.evict_artificials(n_struct);

        // Phase 2: minimize -objective over structural columns only.
        let mut phase2 = vec![Rational::zero(); n_total];
        for j in 0..n {
            phase2[j] = -p.objective[j].clone();
            phase2[n + j] = p.objective[j].clone();
        }
        s.load_cost(&phase2);
        if !s.pivot_loop(n_struct) {
            return LpResult::Unbounded;
        }
        // cost rhs tracks -(phase-2 minimum), which is the original maximum.
        let value = s.cost[s.n_total].clone();
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in s.basis.iter().enumerate() {
            if b < n {
                x[b] += s.rows[i][s.n_total].clone();
            } else if b < 2 * n {
                x[b - n] -= s.rows[i][s.n_total].clone();
            }
        }
        LpResult::Optimal { value, x }
    }

    fn load_cost(&mut self, c: &[Rational]) {
        let nt = self.n_total;
        let mut cost = vec![Rational::zero(); nt + 1];
        cost[..nt].clone_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            if !c[b].is_zero() {
                let f = c[b].clone();
                for j in 0..=nt {
                    let v = &cost[j] - &f * &self.rows[i][j];
                    cost[j] = v;
                }
            }
        }
        self.cost = cost;
    }

    /// Bland pivoting over columns `0..limit`; returns false on unboundedness.
    fn pivot_loop(&mut self, limit: usize) -> bool {
        loop {
            let Some(enter) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][enter].is_positive() {
                    let ratio = &self.rows[i][self.n_total] / &self.rows[i][enter];
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            ratio < *b
                                || (ratio == *b
                                    && self.basis[i] < self.basis[leave.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            let Some(leave) = leave else {
                return false;
            };
            self.pivot(leave, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let nt = self.n_total;
        let p = self.rows[row][col].clone();
        for j in 0..=nt {
            let v = &self.rows[row][j] / &p;
            self.rows[row][j] = v;
        }
        for i in 0..self.rows.len() {
            if i != row && !self.rows[i][col].is_zero() {
                let f = self.rows[i][col].clone();
                for j in 0..=nt {
                    let v = &self.rows[i][j] - &f * &self.rows[row][j];
                    self.rows[i][j] = v;
                }
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for j in 0..=nt {
                let v = &self.cost[j] - &f * &self.rows[row][j];
                self.cost[j] = v;
            }
        }
        self.basis[row] = col;
    }

    /// After phase 1, pivot basic artificials out (or leave redundant rows).
    fn evict_artificials(&mut self, n_struct: usize) {
        for i in 0..self.rows.len() {
            if self.basis[i] >= n_struct {
                if let Some(col) = (0..n_struct).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(i, col);
                }
            }
        }
    }
}

/// Strict feasibility of `g . x > 0` for all rows `g` of `strict`, subject to
/// `h . x >= 0` for all rows of `weak`. Returns a witness maximizing the
/// minimum strict slack (capped at 1), or `None`.
pub fn strict_cone_point(
    strict: &[Vec<Rational>],
    weak: &[Vec<Rational>],
    dim: usize,
) -> Option<Vec<Rational>> {
    // Variables: x (dim) then t.
    let nv = dim + 1;
    let mut lp = LpProblem::new(nv);
    let mut obj = vec![Rational::zero(); nv];
    obj[dim] = Rational::one();
    lp.set_objective(obj);
    for g in strict {
        // t - g.x <= 0
        let mut a = g.iter().map(|v| -v).collect::<Vec<_>>();
        a.push(Rational::one());
        lp.leq(a, Rational::zero());
    }
    for h in weak {
        let mut a = h.iter().map(|v| -v).collect::<Vec<_>>();
        a.push(Rational::zero());
        lp.leq(a, Rational::zero());
    }
    let mut cap = vec![Rational::zero(); nv];
    cap[dim] = Rational::one();
    lp.leq(cap, Rational::one());
    match lp.solve() {
        LpResult::Optimal { value, x } if value.is_positive() => Some(x[..dim].to_vec()),
        _ => None,
    }
}
