//! Full-dimensional simultaneous-optimality cells and the candidate
//! gradients of `h = V_M - V_L` they carry.

use std::collections::HashMap;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::kernel::{self, LPOutcome};
use crate::problem::DecisionProblem;
use crate::rational::{self, Rational};

/// Actions `m` of M and `l` of L that are simultaneously optimal on a
/// full-dimensional region of the simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatiblePair {
    pub m_index: usize,
    pub l_index: usize,
    /// Slack of both actions against every competitor at `witness`.
    #[serde(with = "rational::as_string")]
    pub margin: Rational,
    pub witness: Belief,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    /// `U_M(m,·) - U_L(l,·)`.
    pub vector: Vec<Rational>,
    /// Indices into [`CandidateSet::pairs`] producing this vector.
    pub provenance: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
    pub pairs: Vec<CompatiblePair>,
}

impl CandidateSet {
    pub fn vectors(&self) -> impl Iterator<Item = &Vec<Rational>> {
        self.candidates.iter().map(|c| &c.vector)
    }

    /// `max_c <p, c>`; never below `h(p)`.
    pub fn envelope(&self, p: &Belief) -> Option<Rational> {
        self.vectors().map(|c| rational::dot(p.coords(), c)).max()
    }

    /// The pair whose witness certifies candidate `i`.
    pub fn origin(&self, i: usize) -> &CompatiblePair {
        &self.pairs[self.candidates[i].provenance[0]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BelowCheck {
    AllBelow,
    /// `V_L(p_star) + <p_star, c> > V_M(p_star)` for candidate `candidate`.
    Violation {
        candidate: usize,
        p_star: Belief,
    },
}

fn competitors(problem: &DecisionProblem, me: usize) -> impl Iterator<Item = Vec<Rational>> + '_ {
    let mine = problem.vector(me);
    (0..problem.action_count())
        .filter(move |&k| k != me)
        .map(move |k| rational::sub(mine, problem.vector(k)))
}

/// Every `(m, l)` whose joint optimality region has nonempty interior in
/// the simplex, decided by a margin LP against all competitors in both
/// problems. Both inputs must be free of duplicate actions.
pub fn enumerate_full_dim_pairs(
    m: &DecisionProblem,
    l: &DecisionProblem,
) -> Result<Vec<CompatiblePair>> {
    m.check_same_states(l)?;
    if m.has_duplicate_actions() || l.has_duplicate_actions() {
        return Err(Error::Invalid(
            "cell enumeration needs problems without duplicate actions (prune first)".into(),
        ));
    }
    let n = m.state_count();
    let grid: Vec<(usize, usize)> = (0..m.action_count())
        .flat_map(|i| (0..l.action_count()).map(move |j| (i, j)))
        .collect();
    let found: Vec<Option<CompatiblePair>> = grid
        .par_iter()
        .map(|&(i, j)| {
            let differences: Vec<Vec<Rational>> =
                competitors(m, i).chain(competitors(l, j)).collect();
            let (margin, witness) = kernel::max_margin(n, &differences)?;
            Ok(margin.is_positive().then_some(CompatiblePair {
                m_index: i,
                l_index: j,
                margin,
                witness,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Deduplicated gradient differences over the compatible pairs, in pair
/// order.
pub fn synthesize_candidates(
    m: &DecisionProblem,
    l: &DecisionProblem,
    pairs: Vec<CompatiblePair>,
) -> CandidateSet {
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut index: HashMap<Vec<Rational>, usize> = HashMap::new();
    for (k, pair) in pairs.iter().enumerate() {
        let vector = rational::sub(m.vector(pair.m_index), l.vector(pair.l_index));
        match index.get(&vector) {
            Some(&i) => candidates[i].provenance.push(k),
            None => {
                index.insert(vector.clone(), candidates.len());
                candidates.push(Candidate {
                    vector,
                    provenance: vec![k],
                });
            }
        }
    }
    CandidateSet { candidates, pairs }
}

/// Checks `V_L + <·, c> <= V_M` on the whole simplex for every candidate,
/// one min-of-max LP per `(c, l)`. The first failure in `(candidate, l)`
/// order is reported.
pub fn check_candidates_below(
    m: &DecisionProblem,
    l: &DecisionProblem,
    candidates: &CandidateSet,
) -> Result<BelowCheck> {
    let n = m.state_count();
    let jobs: Vec<(usize, usize)> = (0..candidates.candidates.len())
        .flat_map(|c| (0..l.action_count()).map(move |j| (c, j)))
        .collect();
    let outcomes: Vec<Option<Belief>> = jobs
        .par_iter()
        .map(|&(c, j)| {
            let raised = rational::add(l.vector(j), &candidates.candidates[c].vector);
            let shifted: Vec<Vec<Rational>> =
                m.vectors().map(|u| rational::sub(u, &raised)).collect();
            match kernel::min_of_max(n, &shifted, &[])? {
                LPOutcome::Optimal { value, witness } => Ok(value.is_negative().then_some(witness)),
                LPOutcome::Infeasible => Err(Error::Internal(
                    "unconstrained simplex LP infeasible".into(),
                )),
            }
        })
        .collect::<Result<_>>()?;
    for (&(c, _), outcome) in jobs.iter().zip(outcomes) {
        if let Some(p_star) = outcome {
            return Ok(BelowCheck::Violation {
                candidate: c,
                p_star,
            });
        }
    }
    Ok(BelowCheck::AllBelow)
}

/// `h(p) = V_M(p) - V_L(p)`.
pub fn h_value(m: &DecisionProblem, l: &DecisionProblem, p: &Belief) -> Result<Rational> {
    Ok(m.evaluate(p)? - l.evaluate(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ints, ratio, vec_of};

    fn problem(rows: &[&[i64]]) -> DecisionProblem {
        DecisionProblem::from_ints(rows).unwrap()
    }

    fn index_pairs(pairs: &[CompatiblePair]) -> Vec<(usize, usize)> {
        pairs.iter().map(|p| (p.m_index, p.l_index)).collect()
    }

    #[test]
    fn perfect_info_against_zero() {
        let m = problem(&[&[1, 0], &[0, 1]]);
        let l = problem(&[&[0, 0]]);
        let pairs = enumerate_full_dim_pairs(&m, &l).unwrap();
        assert_eq!(index_pairs(&pairs), vec![(0, 0), (1, 0)]);
        // Regions are the half-simplices p1 >= 1/2 and p1 <= 1/2.
        assert_eq!(pairs[0].margin, int(1));
        assert_eq!(pairs[0].witness, Belief::vertex(2, 0));
        assert_eq!(pairs[1].margin, int(1));
        assert_eq!(pairs[1].witness, Belief::vertex(2, 1));

        let set = synthesize_candidates(&m, &l, pairs);
        assert_eq!(
            set.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[1, 0]), ints(&[0, 1])]
        );
        assert_eq!(
            check_candidates_below(&m, &l, &set).unwrap(),
            BelowCheck::AllBelow
        );
    }

    #[test]
    fn identical_problems_keep_only_diagonal_pairs() {
        let m = problem(&[&[1, 0], &[0, 1]]);
        let pairs = enumerate_full_dim_pairs(&m, &m).unwrap();
        assert_eq!(index_pairs(&pairs), vec![(0, 0), (1, 1)]);
        let set = synthesize_candidates(&m, &m, pairs);
        assert_eq!(
            set.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[0, 0])]
        );
        assert_eq!(set.candidates[0].provenance, vec![0, 1]);
        assert_eq!(
            check_candidates_below(&m, &m, &set).unwrap(),
            BelowCheck::AllBelow
        );
    }

    #[test]
    fn three_cells_of_the_non_convex_pair() {
        // Optimality in p1: M splits at 1/2, L splits at 1/3.
        let m = problem(&[&[0, 1], &[1, 0]]);
        let l = problem(&[&[2, 0], &[0, 1]]);
        let pairs = enumerate_full_dim_pairs(&m, &l).unwrap();
        assert_eq!(index_pairs(&pairs), vec![(0, 0), (0, 1), (1, 0)]);
        // Cell [1/3, 1/2]: both margins p2 - p1 and 2p1 - p2 equal 1/5 at p1 = 2/5.
        assert_eq!(pairs[0].margin, ratio(1, 5));
        assert_eq!(
            pairs[0].witness.coords(),
            vec_of(&[(2, 5), (3, 5)]).as_slice()
        );

        let set = synthesize_candidates(&m, &l, pairs);
        assert_eq!(
            set.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[-2, 1]), ints(&[0, 0]), ints(&[-1, 0])]
        );
        match check_candidates_below(&m, &l, &set).unwrap() {
            BelowCheck::Violation { candidate, p_star } => {
                let c = &set.candidates[candidate].vector;
                let h = h_value(&m, &l, &p_star).unwrap();
                assert!(rational::dot(p_star.coords(), c) > h);
            }
            BelowCheck::AllBelow => panic!("h is not convex here"),
        }
    }

    #[test]
    fn zero_candidate_fails_where_l_beats_m() {
        // For l = (2,0), c = 0: min over p of max(p2 - 2p1, p1 - 2p1) = -1 at (1,0).
        let m = problem(&[&[0, 1], &[1, 0]]);
        let l = problem(&[&[2, 0], &[0, 1]]);
        let set = CandidateSet {
            candidates: vec![Candidate {
                vector: ints(&[0, 0]),
                provenance: vec![0],
            }],
            pairs: vec![],
        };
        let BelowCheck::Violation { p_star, .. } = check_candidates_below(&m, &l, &set).unwrap()
        else {
            panic!("expected a violation");
        };
        assert_eq!(p_star, Belief::vertex(2, 0));
        assert_eq!(m.evaluate(&p_star).unwrap(), int(1));
        assert_eq!(l.evaluate(&p_star).unwrap(), int(2));
    }

    #[test]
    fn lower_dimensional_pairs_are_excluded() {
        // With x = p1 - p2: V_L = max(0, x), V_M = max(0, 2x). The pair
        // (M: slope 2, L: flat) meets only at the kink x = 0; its difference
        // 2x lies strictly above h = max(0, x) for x > 0.
        let m = problem(&[&[0, 0], &[2, -2]]);
        let l = problem(&[&[0, 0], &[1, -1]]);
        let pairs = enumerate_full_dim_pairs(&m, &l).unwrap();
        assert_eq!(index_pairs(&pairs), vec![(0, 0), (1, 1)]);
        let set = synthesize_candidates(&m, &l, pairs);
        for p in [
            Belief::vertex(2, 0),
            Belief::vertex(2, 1),
            Belief::uniform(2),
        ] {
            let h = h_value(&m, &l, &p).unwrap();
            assert!(set.envelope(&p).unwrap() >= h);
        }
        assert_eq!(
            check_candidates_below(&m, &l, &set).unwrap(),
            BelowCheck::AllBelow
        );
    }

    #[test]
    fn duplicates_are_rejected() {
        let m = problem(&[&[1, 0], &[1, 0]]);
        let l = problem(&[&[0, 0]]);
        assert!(matches!(
            enumerate_full_dim_pairs(&m, &l),
            Err(Error::Invalid(_))
        ));
    }
}
