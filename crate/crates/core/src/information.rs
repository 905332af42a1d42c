//! Information structures (finitely supported distributions of posterior
//! beliefs) and the value of information.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::{check_dim, Error, Result};
use crate::problem::DecisionProblem;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPoint {
    pub weight: Rational,
    pub posterior: Belief,
}

/// Positive weights summing to one over pairwise distinct posteriors. The
/// prior is derived as the barycenter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationStructure {
    support: Vec<SupportPoint>,
}

impl InformationStructure {
    /// Validates weights and merges repeated posteriors by adding their
    /// weights (first occurrence keeps its position).
    pub fn new(points: Vec<(Rational, Belief)>) -> Result<Self> {
        let Some(dim) = points.first().map(|(_, p)| p.dim()) else {
            return Err(Error::Invalid(
                "information structure has empty support".into(),
            ));
        };
        let mut support: Vec<SupportPoint> = Vec::with_capacity(points.len());
        let mut total = Rational::zero();
        for (i, (weight, posterior)) in points.into_iter().enumerate() {
            check_dim(dim, posterior.dim(), format!("posterior {i}"))?;
            if !weight.is_positive() {
                return Err(Error::Invalid(format!(
                    "weight {i} is {}, must be positive",
                    rational::format(&weight)
                )));
            }
            total += &weight;
            match support.iter_mut().find(|s| s.posterior == posterior) {
                Some(existing) => existing.weight += weight,
                None => support.push(SupportPoint { weight, posterior }),
            }
        }
        if !total.is_one() {
            return Err(Error::Invalid(format!(
                "weights sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(InformationStructure { support })
    }

    pub fn point_mass(p: Belief) -> Self {
        InformationStructure {
            support: vec![SupportPoint {
                weight: Rational::one(),
                posterior: p,
            }],
        }
    }

    pub fn support(&self) -> &[SupportPoint] {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.support[0].posterior.dim()
    }

    /// The prior: weighted average of the posteriors.
    pub fn barycenter(&self) -> Belief {
        let mut coords = vec![Rational::zero(); self.dim()];
        for s in &self.support {
            for (c, x) in coords.iter_mut().zip(s.posterior.coords()) {
                *c += &s.weight * x;
            }
        }
        Belief::new(coords).expect("convex combination of beliefs is a belief")
    }

    pub fn permuted(&self, perm: &[usize]) -> InformationStructure {
        InformationStructure {
            support: self
                .support
                .iter()
                .map(|s| SupportPoint {
                    weight: s.weight.clone(),
                    posterior: s.posterior.permuted(perm),
                })
                .collect(),
        }
    }

    /// `Σ w_i f(p_i) - f(prior)` for any function on beliefs.
    pub fn jensen_gap<F>(&self, mut f: F) -> Result<Rational>
    where
        F: FnMut(&Belief) -> Result<Rational>,
    {
        let mut expected = Rational::zero();
        for s in &self.support {
            expected += &s.weight * f(&s.posterior)?;
        }
        Ok(expected - f(&self.barycenter())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoIReport {
    #[serde(with = "rational::as_string")]
    pub voi: Rational,
    pub prior: Belief,
    #[serde(with = "rational::as_string")]
    pub expected_posterior_value: Rational,
    #[serde(with = "rational::as_string")]
    pub prior_value: Rational,
}

/// Expected value under the posteriors minus the value at the prior.
pub fn voi(problem: &DecisionProblem, q: &InformationStructure) -> Result<VoIReport> {
    check_dim(problem.state_count(), q.dim(), "information structure")?;
    let mut expected = Rational::zero();
    for s in q.support() {
        expected += &s.weight * problem.evaluate(&s.posterior)?;
    }
    let prior = q.barycenter();
    let prior_value = problem.evaluate(&prior)?;
    let voi = &expected - &prior_value;
    if voi.is_negative() {
        return Err(Error::Internal(format!(
            "negative value of information {} (value function not convex?)",
            rational::format(&voi)
        )));
    }
    Ok(VoIReport {
        voi,
        prior,
        expected_posterior_value: expected,
        prior_value,
    })
}

/// `VoI_M(Q) - VoI_L(Q)`; negative exactly when `Q` witnesses that `M` does
/// not value information more than `L`.
pub fn voi_difference(
    m: &DecisionProblem,
    l: &DecisionProblem,
    q: &InformationStructure,
) -> Result<Rational> {
    m.check_same_states(l)?;
    Ok(voi(m, q)?.voi - voi(l, q)?.voi)
}
