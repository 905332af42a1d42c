//! Exact comparisons between value functions, and minimal representations.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::kernel::{self, LPOutcome};
use crate::problem::DecisionProblem;
use crate::rational::{self, Rational};

/// A belief where one value function strictly exceeds another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderViolation {
    pub belief: Belief,
    /// The larger of the two values at `belief`.
    #[serde(with = "rational::as_string")]
    pub left: Rational,
    #[serde(with = "rational::as_string")]
    pub right: Rational,
    /// `false` when the first argument is the larger side, `true` when the
    /// second one is (only produced by [`value_equal`]).
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueOrderReport {
    pub holds: bool,
    pub violation: Option<OrderViolation>,
    /// Per action of the lower side, in order: the exact LP minimum of
    /// `max_t <p, t - s>` over the simplex. Nonnegative iff that action is
    /// covered. Stops at the first negative entry.
    #[serde(with = "rational::vec_as_strings")]
    pub slacks: Vec<Rational>,
}

/// Decides `V_S <= V_T` on the whole simplex, one min-of-max LP per action
/// of `S`.
pub fn value_leq(s: &DecisionProblem, t: &DecisionProblem) -> Result<ValueOrderReport> {
    s.check_same_states(t)?;
    let n = s.state_count();
    let mut slacks = Vec::with_capacity(s.action_count());
    for u in s.vectors() {
        let shifted: Vec<Vec<Rational>> = t.vectors().map(|w| rational::sub(w, u)).collect();
        let LPOutcome::Optimal { value, witness } = kernel::min_of_max(n, &shifted, &[])? else {
            return Err(Error::Internal(
                "unconstrained simplex LP infeasible".into(),
            ));
        };
        let negative = value.is_negative();
        slacks.push(value);
        if negative {
            let left = s.evaluate(&witness)?;
            let right = t.evaluate(&witness)?;
            if left <= right {
                return Err(Error::Internal(format!(
                    "value_leq witness {witness} does not separate the value functions"
                )));
            }
            return Ok(ValueOrderReport {
                holds: false,
                violation: Some(OrderViolation {
                    belief: witness,
                    left,
                    right,
                    reversed: false,
                }),
                slacks,
            });
        }
    }
    Ok(ValueOrderReport {
        holds: true,
        violation: None,
        slacks,
    })
}

/// `value_leq` in both directions.
pub fn value_equal(s: &DecisionProblem, t: &DecisionProblem) -> Result<ValueOrderReport> {
    let forward = value_leq(s, t)?;
    if !forward.holds {
        return Ok(forward);
    }
    let mut backward = value_leq(t, s)?;
    if let Some(v) = backward.violation.as_mut() {
        v.reversed = true;
    }
    Ok(backward)
}

/// Removes duplicate actions and every action that is optimal only on a
/// lower-dimensional part of the simplex. Scans in input order; among
/// identical vectors the first one survives.
pub fn prune(problem: &DecisionProblem) -> Result<DecisionProblem> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, u) in problem.vectors().enumerate() {
        if !kept.iter().any(|&k| problem.vector(k) == u.as_slice()) {
            kept.push(i);
        }
    }

    let n = problem.state_count();
    let mut pos = 0;
    while pos < kept.len() {
        if kept.len() == 1 {
            break;
        }
        let me = problem.vector(kept[pos]);
        let differences: Vec<Vec<Rational>> = kept
            .iter()
            .filter(|&&k| k != kept[pos])
            .map(|&k| rational::sub(me, problem.vector(k)))
            .collect();
        let (margin, _) = kernel::max_margin(n, &differences)?;
        if margin.is_positive() {
            pos += 1;
        } else {
            kept.remove(pos);
        }
    }

    let labelled = kept
        .into_iter()
        .map(|k| {
            let a = &problem.actions()[k];
            (a.label.clone(), a.utilities.clone())
        })
        .collect();
    problem.with_vectors(labelled)
}

/// True when no action can be dropped without changing the value function.
pub fn is_minimal(problem: &DecisionProblem) -> Result<bool> {
    Ok(prune(problem)?.action_count() == problem.action_count())
}

/// Smallest value of `V_S - V_T` reported by an LP, useful in diagnostics.
pub fn min_gap(s: &DecisionProblem, t: &DecisionProblem) -> Result<Rational> {
    let report = value_leq(s, t)?;
    Ok(report
        .slacks
        .into_iter()
        .min()
        .unwrap_or_else(Rational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ints, ratio, vec_of};

    fn problem(rows: &[&[i64]]) -> DecisionProblem {
        DecisionProblem::from_ints(rows).unwrap()
    }

    fn rational_problem(rows: &[&[(i64, i64)]]) -> DecisionProblem {
        DecisionProblem::from_vectors(rows.iter().map(|r| vec_of(r)).collect()).unwrap()
    }

    #[test]
    fn leq_subset_of_actions() {
        let r = value_leq(&problem(&[&[1, 0]]), &problem(&[&[1, 0], &[0, 1]])).unwrap();
        assert!(r.holds);
        assert!(r.violation.is_none());
    }

    #[test]
    fn leq_vertex_violation() {
        let r = value_leq(&problem(&[&[1, 0]]), &problem(&[&[0, 1]])).unwrap();
        assert!(!r.holds);
        let v = r.violation.unwrap();
        assert_eq!(v.belief, Belief::vertex(2, 0));
        assert_eq!((v.left, v.right), (int(1), int(0)));
    }

    #[test]
    fn leq_touching_at_the_kink() {
        // min over p of max(p1, p2) - 1/2 is 0 at the uniform belief; the
        // same LP written directly on the shifted vectors agrees.
        let s = rational_problem(&[&[(1, 2), (1, 2)]]);
        let r = value_leq(&s, &problem(&[&[1, 0], &[0, 1]])).unwrap();
        assert!(r.holds);
        assert_eq!(r.slacks, vec![int(0)]);
        let direct = kernel::min_of_max(
            2,
            &[vec_of(&[(1, 2), (-1, 2)]), vec_of(&[(-1, 2), (1, 2)])],
            &[],
        )
        .unwrap();
        assert_eq!(direct.value(), Some(&int(0)));
    }

    #[test]
    fn equal_examples() {
        let with_middle =
            rational_problem(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 2), (1, 2)]]);
        let m = problem(&[&[1, 0], &[0, 1]]);
        assert!(value_equal(&with_middle, &m).unwrap().holds);
        assert!(value_equal(&m, &m).unwrap().holds);

        let r = value_equal(&problem(&[&[2, 0], &[0, 1]]), &m).unwrap();
        assert!(!r.holds);
        let v = r.violation.unwrap();
        assert_eq!(v.belief, Belief::vertex(2, 0));
        assert!(!v.reversed);
        assert_eq!((v.left, v.right), (int(2), int(1)));

        let r = value_equal(&m, &problem(&[&[2, 0], &[0, 1]])).unwrap();
        assert!(r.violation.unwrap().reversed);
    }

    #[test]
    fn mismatched_states_are_rejected() {
        assert!(value_leq(&problem(&[&[1, 0]]), &problem(&[&[1, 0, 0]])).is_err());
    }

    #[test]
    fn prune_examples() {
        let p = prune(&problem(&[&[1, 0], &[1, 0]])).unwrap();
        assert_eq!(
            p.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[1, 0])]
        );

        let p = prune(&problem(&[&[1, 1], &[0, 0]])).unwrap();
        assert_eq!(
            p.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[1, 1])]
        );

        let with_middle =
            rational_problem(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 2), (1, 2)]]);
        let p = prune(&with_middle).unwrap();
        assert_eq!(
            p.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[1, 0]), ints(&[0, 1])]
        );
        assert!(value_equal(&with_middle, &p).unwrap().holds);
    }

    #[test]
    fn prune_keeps_first_label_among_duplicates() {
        let m = problem(&[&[0, 1], &[0, 1], &[1, 0]]);
        let p = prune(&m).unwrap();
        assert_eq!(
            p.actions()
                .iter()
                .map(|a| a.label.as_str())
                .collect::<Vec<_>>(),
            vec!["a0", "a2"]
        );
        assert!(is_minimal(&p).unwrap());
    }

    #[test]
    fn prune_drops_constant_shift_when_dominated() {
        // (1,2) = (0,1) + 1: strictly better everywhere.
        let p = prune(&problem(&[&[0, 1], &[1, 2], &[3, 0]])).unwrap();
        assert_eq!(
            p.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[1, 2]), ints(&[3, 0])]
        );
    }

    #[test]
    fn gap_reports_the_worst_slack() {
        let gap = min_gap(&problem(&[&[0, 0]]), &problem(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(gap, ratio(1, 2));
    }
}
