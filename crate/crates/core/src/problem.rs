//! Finite decision problems and their value functions.

use std::collections::HashSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::{check_dim, Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub label: String,
    pub utilities: Vec<Rational>,
}

/// A utility function on `actions × states`, stored as one utility vector per
/// action. The value function is the pointwise max of the induced linear
/// forms on the belief simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionProblem {
    states: Vec<String>,
    actions: Vec<Action>,
}

/// A value that may be `+∞`, as taken by the homogeneous extension outside
/// the nonnegative orthant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtendedValue {
    Finite(#[serde(with = "rational::as_string")] Rational),
    PlusInfinity,
}

impl ExtendedValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedValue::Finite(v) => Some(v),
            ExtendedValue::PlusInfinity => None,
        }
    }
}

impl DecisionProblem {
    pub fn new(states: Vec<String>, actions: Vec<Action>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Invalid(
                "a decision problem needs at least one state".into(),
            ));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(Error::Invalid(format!("duplicate state label {s:?}")));
            }
        }
        if actions.is_empty() {
            return Err(Error::Invalid(
                "a decision problem needs at least one action".into(),
            ));
        }
        for a in &actions {
            check_dim(
                states.len(),
                a.utilities.len(),
                format!("utilities of action {:?}", a.label),
            )?;
        }
        Ok(DecisionProblem { states, actions })
    }

    /// States labelled `w1, w2, ...` and actions `a0, a1, ...`.
    pub fn from_vectors(vectors: Vec<Vec<Rational>>) -> Result<Self> {
        let n = vectors.first().map_or(0, Vec::len);
        let states = default_state_labels(n);
        let actions = vectors
            .into_iter()
            .enumerate()
            .map(|(i, utilities)| Action {
                label: format!("a{i}"),
                utilities,
            })
            .collect();
        DecisionProblem::new(states, actions)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        DecisionProblem::from_vectors(rows.iter().map(|r| rational::ints(r)).collect())
    }

    /// Same states as `self`, new action vectors.
    pub fn with_vectors(&self, labelled: Vec<(String, Vec<Rational>)>) -> Result<Self> {
        let actions = labelled
            .into_iter()
            .map(|(label, utilities)| Action { label, utilities })
            .collect();
        DecisionProblem::new(self.states.clone(), actions)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Vec<Rational>> {
        self.actions.iter().map(|a| &a.utilities)
    }

    pub fn vector(&self, i: usize) -> &[Rational] {
        &self.actions[i].utilities
    }

    pub(crate) fn check_belief(&self, p: &Belief) -> Result<()> {
        check_dim(self.state_count(), p.dim(), "belief")
    }

    /// Errors unless both problems live on the same labelled state space.
    pub fn check_same_states(&self, other: &DecisionProblem) -> Result<()> {
        check_dim(
            self.state_count(),
            other.state_count(),
            "state count of second problem",
        )?;
        if self.states != other.states {
            return Err(Error::Invalid(format!(
                "state labels differ: {:?} vs {:?}",
                self.states, other.states
            )));
        }
        Ok(())
    }

    fn payoffs<'a>(&'a self, p: &'a Belief) -> impl Iterator<Item = Rational> + 'a {
        self.vectors().map(move |u| rational::dot(p.coords(), u))
    }

    /// Maximal expected utility at belief `p`.
    pub fn evaluate(&self, p: &Belief) -> Result<Rational> {
        self.check_belief(p)?;
        Ok(self.payoffs(p).max().expect("nonempty action set"))
    }

    /// Indices of every action attaining the maximum at `p`, in input order.
    pub fn optimal_actions(&self, p: &Belief) -> Result<Vec<usize>> {
        let best = self.evaluate(p)?;
        Ok(self
            .payoffs(p)
            .enumerate()
            .filter(|(_, v)| *v == best)
            .map(|(i, _)| i)
            .collect())
    }

    /// Value function extended to the whole space by positive homogeneity:
    /// `0` at the origin, `<y,1>·V(y/<y,1>)` on the rest of the nonnegative
    /// orthant, `+∞` elsewhere.
    pub fn homogeneous_extension_eval(&self, y: &[Rational]) -> Result<ExtendedValue> {
        check_dim(self.state_count(), y.len(), "extension argument")?;
        if y.iter().any(Rational::is_negative) {
            return Ok(ExtendedValue::PlusInfinity);
        }
        let mass: Rational = y.iter().sum();
        if mass.is_zero() {
            return Ok(ExtendedValue::Finite(Rational::zero()));
        }
        let p = Belief::new(y.iter().map(|v| v / &mass).collect())?;
        Ok(ExtendedValue::Finite(&mass * self.evaluate(&p)?))
    }

    /// Relabels states: state `i` of the result is state `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<DecisionProblem> {
        check_dim(self.state_count(), perm.len(), "permutation")?;
        let states = perm.iter().map(|&j| self.states[j].clone()).collect();
        let actions = self
            .actions
            .iter()
            .map(|a| Action {
                label: a.label.clone(),
                utilities: perm.iter().map(|&j| a.utilities[j].clone()).collect(),
            })
            .collect();
        DecisionProblem::new(states, actions)
    }

    pub fn has_duplicate_actions(&self) -> bool {
        let mut seen = HashSet::new();
        !self.vectors().all(|u| seen.insert(u))
    }
}

pub fn default_state_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

/// The parallel problem: actions are pairs `(l, n)` with utility
/// `U_L(l,·) + U_N(n,·)`, enumerated with the `L` index outermost.
pub fn compose(l: &DecisionProblem, n: &DecisionProblem) -> Result<DecisionProblem> {
    l.check_same_states(n)?;
    let mut actions = Vec::with_capacity(l.action_count() * n.action_count());
    for a in l.actions() {
        for b in n.actions() {
            actions.push(Action {
                label: format!("({}, {})", a.label, b.label),
                utilities: rational::add(&a.utilities, &b.utilities),
            });
        }
    }
    DecisionProblem::new(l.states.clone(), actions)
}
