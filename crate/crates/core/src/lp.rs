//! Dense two-phase tableau simplex over exact rationals.
//!
//! Solves `min c·x` subject to linear rows `a·x (<=|>=|=) b` and `x >= 0`.
//! Pivoting follows Bland's rule throughout, so degenerate instances (the
//! common case on a simplex, where vertices make many rows tight) terminate.
//! Every optimal solve also yields dual multipliers that can be re-checked
//! independently with [`Solution::verify`].

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::rational::{self, dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn flipped(self) -> Sense {
        match self {
            Sense::Le => Sense::Ge,
            Sense::Ge => Sense::Le,
            Sense::Eq => Sense::Eq,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, sense: Sense, rhs: Rational) -> Self {
        Constraint { coeffs, sense, rhs }
    }
}

/// `minimize objective·x` over `x >= 0` and the listed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Optimal {
        value: Rational,
        x: Vec<Rational>,
        /// One multiplier per constraint row, in input order.
        duals: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, sense: Sense, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, sense, rhs));
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> Result<Solution> {
        for (i, row) in self.constraints.iter().enumerate() {
            check_dim(self.vars(), row.coeffs.len(), format!("constraint row {i}"))?;
        }
        Ok(Tableau::build(self).run(self))
    }

    /// Solves and returns the plain-text tableau dump of the final state.
    pub fn solve_with_dump(&self) -> Result<(Solution, String)> {
        for (i, row) in self.constraints.iter().enumerate() {
            check_dim(self.vars(), row.coeffs.len(), format!("constraint row {i}"))?;
        }
        let mut tableau = Tableau::build(self);
        let solution = tableau.solve_phases(self);
        let dump = tableau.dump();
        Ok((solution, dump))
    }
}

impl Solution {
    /// Independent audit of an optimal solution: primal feasibility, the
    /// objective value, dual sign conditions, dual feasibility `Aᵀy <= c`,
    /// and strong duality `b·y = c·x`, all in exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> Result<()> {
        let Solution::Optimal { value, x, duals } = self else {
            return Ok(());
        };
        let fail = |what: String| Err(Error::Internal(format!("LP certificate: {what}")));
        if x.len() != lp.vars() || duals.len() != lp.constraints.len() {
            return fail("shape mismatch".into());
        }
        if x.iter().any(Rational::is_negative) {
            return fail("negative primal variable".into());
        }
        for (i, row) in lp.constraints.iter().enumerate() {
            let lhs = dot(&row.coeffs, x);
            if !row.sense.holds(&lhs, &row.rhs) {
                return fail(format!("primal row {i} violated"));
            }
            let sign_ok = match row.sense {
                Sense::Ge => !duals[i].is_negative(),
                Sense::Le => !duals[i].is_positive(),
                Sense::Eq => true,
            };
            if !sign_ok {
                return fail(format!("dual multiplier {i} has the wrong sign"));
            }
        }
        if &dot(&lp.objective, x) != value {
            return fail("primal objective does not match reported value".into());
        }
        for j in 0..lp.vars() {
            let col: Rational = lp
                .constraints
                .iter()
                .zip(duals)
                .fold(Rational::zero(), |acc, (row, y)| acc + &row.coeffs[j] * y);
            if col > lp.objective[j] {
                return fail(format!("dual infeasible in column {j}"));
            }
        }
        let rhs: Vec<Rational> = lp.constraints.iter().map(|r| r.rhs.clone()).collect();
        if &dot(&rhs, duals) != value {
            return fail("duality gap is nonzero".into());
        }
        Ok(())
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Solution::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    /// Each row holds the column coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Column that formed the identity for each row at start.
    unit_column: Vec<usize>,
    /// Rows whose sign was flipped to make the right-hand side nonnegative.
    negated: Vec<bool>,
    /// Reduced-cost row; last entry is the negated objective value.
    cost: Vec<Rational>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.vars();
        let m = lp.constraints.len();
        let mut negated = Vec::with_capacity(m);
        let mut normalized = Vec::with_capacity(m);
        for row in &lp.constraints {
            if row.rhs.is_negative() {
                negated.push(true);
                normalized.push((
                    row.coeffs.iter().map(|a| -a).collect::<Vec<_>>(),
                    row.sense.flipped(),
                    -row.rhs.clone(),
                ));
            } else {
                negated.push(false);
                normalized.push((row.coeffs.clone(), row.sense, row.rhs.clone()));
            }
        }
        let slack_count = normalized.iter().filter(|r| r.1 != Sense::Eq).count();
        let art_count = normalized.iter().filter(|r| r.1 != Sense::Le).count();
        let width = n + slack_count + art_count;

        let mut kinds = vec![ColumnKind::Structural; n];
        kinds.extend(std::iter::repeat_n(ColumnKind::Slack, slack_count));
        kinds.extend(std::iter::repeat_n(ColumnKind::Artificial, art_count));

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut unit_column = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, n + slack_count);
        for (coeffs, sense, rhs) in normalized {
            let mut row = coeffs;
            row.resize(width + 1, Rational::zero());
            row[width] = rhs;
            match sense {
                Sense::Le => {
                    row[next_slack] = rational::int(1);
                    basis.push(next_slack);
                    unit_column.push(next_slack);
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = rational::int(-1);
                    next_slack += 1;
                    row[next_art] = rational::int(1);
                    basis.push(next_art);
                    unit_column.push(next_art);
                    next_art += 1;
                }
                Sense::Eq => {
                    row[next_art] = rational::int(1);
                    basis.push(next_art);
                    unit_column.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            kinds,
            unit_column,
            negated,
            cost: vec![Rational::zero(); width + 1],
        }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn run(mut self, lp: &LinearProgram) -> Solution {
        self.solve_phases(lp)
    }

    fn solve_phases(&mut self, lp: &LinearProgram) -> Solution {
        let width = self.width();
        // Phase 1: minimize the sum of artificials.
        let phase1: Vec<Rational> = self
            .kinds
            .iter()
            .map(|k| match k {
                ColumnKind::Artificial => rational::int(1),
                _ => Rational::zero(),
            })
            .collect();
        self.price(&phase1);
        if !self.iterate(|_| true) {
            unreachable!("phase one is bounded below by zero");
        }
        if self.cost[width].is_negative() {
            return Solution::Infeasible;
        }
        self.evict_artificials();

        let mut phase2 = lp.objective.clone();
        phase2.resize(width, Rational::zero());
        self.price(&phase2);
        let kinds = self.kinds.clone();
        if !self.iterate(|j| kinds[j] != ColumnKind::Artificial) {
            return Solution::Unbounded;
        }

        let mut x = vec![Rational::zero(); lp.vars()];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.vars() {
                x[b] = self.rows[i][width].clone();
            }
        }
        let duals = (0..self.rows.len())
            .map(|i| {
                let y = -self.cost[self.unit_column[i]].clone();
                if self.negated[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        Solution::Optimal {
            value: -self.cost[width].clone(),
            x,
            duals,
        }
    }

    /// Resets the reduced-cost row for objective `c` against the current basis.
    fn price(&mut self, c: &[Rational]) {
        let width = self.width();
        let mut cost: Vec<Rational> = c.to_vec();
        cost.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=width {
                if !row[j].is_zero() {
                    cost[j] -= cb * &row[j];
                }
            }
        }
        self.cost = cost;
    }

    /// Bland's rule iterations. Returns false if the objective is unbounded.
    fn iterate(&mut self, allowed: impl Fn(usize) -> bool) -> bool {
        let width = self.width();
        loop {
            let Some(enter) = (0..width).find(|&j| allowed(j) && self.cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, enter);
        }
    }

    /// Pivots basic artificials (all at level zero after a feasible phase one)
    /// out of the basis where a non-artificial column allows it. Rows where
    /// none does are redundant and keep their artificial at zero.
    fn evict_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.kinds[self.basis[i]] != ColumnKind::Artificial {
                continue;
            }
            if let Some(j) = (0..self.width())
                .find(|&j| self.kinds[j] != ColumnKind::Artificial && !self.rows[i][j].is_zero())
            {
                self.pivot(i, j);
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.width();
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for j in 0..=width {
                if !pivot_row[j].is_zero() {
                    row[j] -= &factor * &pivot_row[j];
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    fn dump(&self) -> String {
        let mut out = String::new();
        let width = self.width();
        let label = |j: usize| match self.kinds[j] {
            ColumnKind::Structural => format!("x{j}"),
            ColumnKind::Slack => format!("s{j}"),
            ColumnKind::Artificial => format!("a{j}"),
        };
        let header: Vec<String> = (0..width).map(label).collect();
        let _ = writeln!(out, "basis | {} | rhs", header.join(" "));
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cells: Vec<String> = row.iter().map(rational::format).collect();
            let _ = writeln!(out, "{} | {}", label(b), cells.join(" "));
        }
        let cells: Vec<String> = self.cost.iter().map(rational::format).collect();
        let _ = writeln!(out, "cost | {}", cells.join(" "));
        out
    }
}
