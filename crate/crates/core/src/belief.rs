//! Points of the probability simplex over a finite state space.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A probability distribution over the states: nonnegative coordinates that
/// sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "BeliefRepr", into = "BeliefRepr")]
pub struct Belief(Vec<Rational>);

impl Belief {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("belief over an empty state space".into()));
        }
        if let Some(i) = coords.iter().position(Rational::is_negative) {
            return Err(Error::Invalid(format!(
                "belief coordinate {i} is negative ({})",
                rational::format(&coords[i])
            )));
        }
        let total: Rational = coords.iter().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!(
                "belief coordinates sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(Belief(coords))
    }

    pub fn vertex(states: usize, i: usize) -> Self {
        let mut coords = vec![Rational::zero(); states];
        coords[i] = Rational::one();
        Belief(coords)
    }

    pub fn uniform(states: usize) -> Self {
        let share = rational::ratio(1, states as i64);
        Belief(vec![share; states])
    }

    /// Convex combination `(1 - t)·self + t·other`, with `t` in `[0, 1]`.
    pub fn toward(&self, other: &Belief, t: &Rational) -> Belief {
        let keep = Rational::one() - t;
        Belief(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| &keep * a + t * b)
                .collect(),
        )
    }

    /// Relabels states: coordinate `i` of the result is coordinate
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Belief {
        Belief(perm.iter().map(|&j| self.0[j].clone()).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }
}

impl std::fmt::Display for Belief {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        rational::VecDisplay(&self.0).fmt(f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct BeliefRepr(#[serde(with = "rational::vec_as_strings")] Vec<Rational>);

impl TryFrom<BeliefRepr> for Belief {
    type Error = Error;

    fn try_from(repr: BeliefRepr) -> Result<Self> {
        Belief::new(repr.0)
    }
}

impl From<Belief> for BeliefRepr {
    fn from(b: Belief) -> Self {
        BeliefRepr(b.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, vec_of};

    #[test]
    fn validates_simplex_membership() {
        assert!(Belief::new(vec_of(&[(1, 2), (1, 2)])).is_ok());
        assert!(Belief::new(vec_of(&[(1, 2), (1, 3)])).is_err());
        assert!(Belief::new(vec_of(&[(3, 2), (-1, 2)])).is_err());
        assert!(Belief::new(vec![]).is_err());
    }

    #[test]
    fn mixing_stays_on_the_simplex() {
        let p = Belief::vertex(3, 0);
        let q = Belief::uniform(3);
        let m = p.toward(&q, &ratio(3, 4));
        assert_eq!(m.coords(), vec_of(&[(1, 2), (1, 4), (1, 4)]).as_slice());
        assert!(Belief::new(m.into_coords()).is_ok());
    }

    #[test]
    fn serde_uses_rational_strings() {
        let p = Belief::new(vec_of(&[(1, 3), (2, 3)])).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"["1/3","2/3"]"#);
        assert_eq!(serde_json::from_str::<Belief>(&text).unwrap(), p);
        assert!(serde_json::from_str::<Belief>(r#"["1/3","1/3"]"#).is_err());
    }
}
