//! The one LP normal form every geometric check reduces to: minimize, over
//! beliefs in the simplex (optionally cut by extra rows), the pointwise
//! maximum of finitely many linear forms.

use num_traits::{One, Zero};

use crate::belief::Belief;
use crate::error::{check_dim, Error, Result};
use crate::lp::{LinearProgram, Sense, Solution};
use crate::rational::{self, Rational};

/// An extra linear row `coeffs·p (sense) rhs` on the belief variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefConstraint {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `min over p in the simplex ∩ extra of max_i <p, w_i>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexLP {
    pub states: usize,
    pub objective_vectors: Vec<Vec<Rational>>,
    pub extra: Vec<BeliefConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LPOutcome {
    Optimal { value: Rational, witness: Belief },
    Infeasible,
}

impl LPOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LPOutcome::Optimal { value, .. } => Some(value),
            LPOutcome::Infeasible => None,
        }
    }
}

/// The concrete LP a [`SimplexLP`] was lowered to, with its raw solution.
/// `verify` re-checks primal and dual feasibility and the zero duality gap.
#[derive(Debug, Clone)]
pub struct Audit {
    pub program: LinearProgram,
    pub solution: Solution,
}

impl Audit {
    pub fn verify(&self) -> Result<()> {
        self.solution.verify(&self.program)
    }
}

impl SimplexLP {
    pub fn new(states: usize, objective_vectors: Vec<Vec<Rational>>) -> Self {
        SimplexLP {
            states,
            objective_vectors,
            extra: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.states == 0 {
            return Err(Error::Invalid("empty state space".into()));
        }
        if self.objective_vectors.is_empty() {
            return Err(Error::Invalid(
                "min-of-max needs at least one vector".into(),
            ));
        }
        for (i, w) in self.objective_vectors.iter().enumerate() {
            check_dim(self.states, w.len(), format!("objective vector {i}"))?;
        }
        for (i, c) in self.extra.iter().enumerate() {
            check_dim(self.states, c.coeffs.len(), format!("extra constraint {i}"))?;
        }
        Ok(())
    }

    /// Variables are `(p_1..p_n, s)` with the epigraph level `t = s + floor`,
    /// where `floor` is the smallest entry of any vector, so `s >= 0` never
    /// cuts off the optimum.
    fn lower(&self) -> (LinearProgram, Rational) {
        let n = self.states;
        let floor = self
            .objective_vectors
            .iter()
            .flatten()
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero);
        let mut objective = vec![Rational::zero(); n];
        objective.push(Rational::one());
        let mut lp = LinearProgram::new(objective);

        let mut total = vec![Rational::one(); n];
        total.push(Rational::zero());
        lp.push(total, Sense::Eq, Rational::one());
        for w in &self.objective_vectors {
            let mut row = w.clone();
            row.push(-Rational::one());
            lp.push(row, Sense::Le, floor.clone());
        }
        for c in &self.extra {
            let mut row = c.coeffs.clone();
            row.push(Rational::zero());
            lp.push(row, c.sense, c.rhs.clone());
        }
        (lp, floor)
    }

    pub fn solve(&self) -> Result<LPOutcome> {
        self.solve_audited().map(|(outcome, _)| outcome)
    }

    pub fn solve_audited(&self) -> Result<(LPOutcome, Audit)> {
        self.validate()?;
        let (program, floor) = self.lower();
        let solution = program.solve()?;
        let outcome = match &solution {
            Solution::Infeasible => LPOutcome::Infeasible,
            Solution::Unbounded => {
                return Err(Error::Internal("min-of-max LP reported unbounded".into()))
            }
            Solution::Optimal { x, .. } => {
                let witness = Belief::new(x[..self.states].to_vec())
                    .map_err(|e| Error::Internal(format!("LP witness off the simplex: {e}")))?;
                // The epigraph variable is tight at an optimum, so the
                // objective evaluated at the witness is the optimal value.
                let value = self
                    .objective_vectors
                    .iter()
                    .map(|w| rational::dot(witness.coords(), w))
                    .max()
                    .expect("nonempty objective");
                if solution.value().map(|v| v + &floor).as_ref() != Some(&value) {
                    return Err(Error::Internal(
                        "min-of-max witness does not attain the LP optimum".into(),
                    ));
                }
                LPOutcome::Optimal { value, witness }
            }
        };
        Ok((outcome, Audit { program, solution }))
    }

    pub fn dump(&self) -> Result<String> {
        self.validate()?;
        let (program, _) = self.lower();
        Ok(program.solve_with_dump()?.1)
    }
}

/// Exact `min over p of max_i <p, w_i>`, with `p` ranging over the simplex
/// intersected with `extra`.
pub fn min_of_max(
    states: usize,
    vectors: &[Vec<Rational>],
    extra: &[BeliefConstraint],
) -> Result<LPOutcome> {
    let lp = SimplexLP {
        states,
        objective_vectors: vectors.to_vec(),
        extra: extra.to_vec(),
    };
    lp.solve()
}

/// Largest margin `eps <= 1` such that some belief satisfies
/// `<p, d_j> >= eps` for every `j`, with the attaining belief.
///
/// Solved as `-(min over p of max(-1, max_j <p, -d_j>))`; the constant `-1`
/// enters as the all-ones vector since coordinates sum to one.
pub fn max_margin(states: usize, differences: &[Vec<Rational>]) -> Result<(Rational, Belief)> {
    for (j, d) in differences.iter().enumerate() {
        check_dim(states, d.len(), format!("margin vector {j}"))?;
    }
    let mut vectors: Vec<Vec<Rational>> = differences
        .iter()
        .map(|d| d.iter().map(|x| -x).collect())
        .collect();
    vectors.push(vec![-Rational::one(); states]);
    match min_of_max(states, &vectors, &[])? {
        LPOutcome::Optimal { value, witness } => Ok((-value, witness)),
        LPOutcome::Infeasible => Err(Error::Internal("margin LP infeasible".into())),
    }
}
