//! Two-point information structures that witness a Jensen failure of `h`.

use num_traits::{One, Signed};

use crate::belief::Belief;
use crate::dominance::cells::{h_value, CompatiblePair};
use crate::error::{Error, Result};
use crate::information::InformationStructure;
use crate::problem::DecisionProblem;
use crate::rational::{self, Rational};

/// Builds `Q = (1 - t)·δ_q + t·δ_{p*}` where `q` is the witness of the cell
/// that produced `c`. The barycenter is kept inside that closed cell by an
/// exact ratio test, so `h` is linear with gradient `c` there, and `t` is
/// the midpoint of the feasible interval.
///
/// Requires `<p*, c> > h(p*)`. The result satisfies
/// `Σ w_i h(p_i) < h(barycenter)`.
pub fn build_counterexample(
    m: &DecisionProblem,
    l: &DecisionProblem,
    c: &[Rational],
    p_star: &Belief,
    cell: &CompatiblePair,
) -> Result<InformationStructure> {
    let q = &cell.witness;
    let h_star = h_value(m, l, p_star)?;
    if rational::dot(p_star.coords(), c) <= h_star {
        return Err(Error::Precondition(
            "counterexample needs a belief where the candidate lies strictly above h".into(),
        ));
    }
    if h_value(m, l, q)? != rational::dot(q.coords(), c) {
        return Err(Error::Precondition(
            "cell witness does not lie on the candidate's linear piece".into(),
        ));
    }
    if q == p_star {
        return Err(Error::Internal("degenerate counterexample segment".into()));
    }

    let direction = rational::sub(p_star.coords(), q.coords());
    let rows = cell_rows(m, cell.m_index).chain(cell_rows(l, cell.l_index));
    let mut t_max = Rational::one();
    for row in rows {
        let at_q = rational::dot(q.coords(), &row);
        let rate = rational::dot(&direction, &row);
        if rate.is_negative() {
            let limit = at_q / -rate;
            if limit < t_max {
                t_max = limit;
            }
        }
    }
    if !t_max.is_positive() {
        return Err(Error::Internal(
            "cell witness is not interior to its cell".into(),
        ));
    }
    let t = t_max / rational::int(2);
    let q_info =
        InformationStructure::new(vec![(Rational::one() - &t, q.clone()), (t, p_star.clone())])?;

    let gap = q_info.jensen_gap(|p| h_value(m, l, p))?;
    if !gap.is_negative() {
        return Err(Error::Internal(format!(
            "constructed information structure does not violate Jensen (gap {})",
            rational::format(&gap)
        )));
    }
    Ok(q_info)
}

/// Rows `u_me - u_k >= 0` describing where action `me` is optimal.
fn cell_rows(problem: &DecisionProblem, me: usize) -> impl Iterator<Item = Vec<Rational>> + '_ {
    let mine = problem.vector(me);
    (0..problem.action_count())
        .filter(move |&k| k != me)
        .map(move |k| rational::sub(mine, problem.vector(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::cells::{enumerate_full_dim_pairs, synthesize_candidates};
    use crate::information::voi_difference;
    use crate::rational::{ints, ratio, vec_of};

    fn problem(rows: &[&[i64]]) -> DecisionProblem {
        DecisionProblem::from_ints(rows).unwrap()
    }

    #[test]
    fn concave_difference_with_hand_picked_witness() {
        // h = -max(p1, p2). Candidate c = (-1, 0) lives on the cell p1 >= 1/2.
        let m = problem(&[&[0, 0]]);
        let l = problem(&[&[1, 0], &[0, 1]]);
        let cell = CompatiblePair {
            m_index: 0,
            l_index: 0,
            margin: ratio(1, 2),
            witness: Belief::new(vec_of(&[(3, 4), (1, 4)])).unwrap(),
        };
        let p_star = Belief::vertex(2, 1);
        let q = build_counterexample(&m, &l, &ints(&[-1, 0]), &p_star, &cell).unwrap();
        // Ratio test on p1 - p2 >= 0 along (3/4,1/4) -> (0,1): 1/2 - 3t/2 >= 0,
        // so t <= 1/3 and the midpoint is 1/6; barycenter (5/8, 3/8).
        assert_eq!(q.support()[1].weight, ratio(1, 6));
        assert!(q.barycenter().coords()[0] >= ratio(1, 2));
        // Σ w h = 5/6 (-3/4) + 1/6 (-1) = -19/24, h(bary) = -5/8.
        assert_eq!(voi_difference(&m, &l, &q).unwrap(), ratio(-1, 6));
    }

    #[test]
    fn engine_witness_on_the_three_cell_pair() {
        let m = problem(&[&[0, 1], &[1, 0]]);
        let l = problem(&[&[2, 0], &[0, 1]]);
        let set = synthesize_candidates(&m, &l, enumerate_full_dim_pairs(&m, &l).unwrap());
        // Candidate (-2, 1) from the cell [1/3, 1/2], witness (2/5, 3/5).
        // It exceeds h at p* = (0, 1): 1 > 0.
        let cell = set.origin(0);
        let q = build_counterexample(&m, &l, &ints(&[-2, 1]), &Belief::vertex(2, 1), cell).unwrap();
        // 2/5 (1 - t) >= 1/3 gives t <= 1/6, so t = 1/12; barycenter p1 = 11/30.
        // Σ w h = 11/12 (-1/5) + 1/12 (0) = -11/60, h(11/30) = -1/10.
        assert_eq!(q.support()[1].weight, ratio(1, 12));
        assert_eq!(voi_difference(&m, &l, &q).unwrap(), ratio(-1, 12));
    }

    #[test]
    fn rejects_candidate_not_above_h() {
        let m = problem(&[&[1, 0], &[0, 1]]);
        let l = problem(&[&[0, 0]]);
        let cell = CompatiblePair {
            m_index: 0,
            l_index: 0,
            margin: ratio(1, 1),
            witness: Belief::vertex(2, 0),
        };
        let err = build_counterexample(&m, &l, &ints(&[1, 0]), &Belief::vertex(2, 1), &cell);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
