//! Two-state fast path. With `x = p(ω1)`, both value functions are upper
//! envelopes of lines on `[0, 1]`, so `h` is piecewise linear in `x` and is
//! convex iff its slopes never decrease.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::dominance::{certify_decomposition, Counterexample, Decomposition, DominanceVerdict};
use crate::error::{Error, Result};
use crate::information::{voi, InformationStructure};
use crate::order::prune;
use crate::problem::DecisionProblem;
use crate::rational::{self, Rational};

/// `h(x) = intercept + slope·x` on `[start, end]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "rational::as_string")]
    pub start: Rational,
    #[serde(with = "rational::as_string")]
    pub end: Rational,
    #[serde(with = "rational::as_string")]
    pub slope: Rational,
    #[serde(with = "rational::as_string")]
    pub intercept: Rational,
}

/// `(intercept, slope)` of each action's expected utility as a function of x.
fn lines(problem: &DecisionProblem) -> Vec<(Rational, Rational)> {
    problem
        .vectors()
        .map(|u| (u[1].clone(), &u[0] - &u[1]))
        .collect()
}

fn crossings(lines: &[(Rational, Rational)], out: &mut Vec<Rational>) {
    let (zero, one) = (Rational::zero(), Rational::one());
    for (i, (a_i, b_i)) in lines.iter().enumerate() {
        for (a_j, b_j) in &lines[i + 1..] {
            if b_i == b_j {
                continue;
            }
            let x = (a_j - a_i) / (b_i - b_j);
            if x > zero && x < one {
                out.push(x);
            }
        }
    }
}

fn active(lines: &[(Rational, Rational)], x: &Rational) -> (Rational, Rational) {
    lines
        .iter()
        .max_by(|(a1, b1), (a2, b2)| (a1 + b1 * x).cmp(&(a2 + b2 * x)))
        .cloned()
        .expect("nonempty action set")
}

fn belief_at(x: &Rational) -> Belief {
    Belief::new(vec![x.clone(), Rational::one() - x]).expect("x lies in [0, 1]")
}

fn require_two_states(m: &DecisionProblem, l: &DecisionProblem) -> Result<()> {
    m.check_same_states(l)?;
    if m.state_count() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: m.state_count(),
            context: "one-dimensional dominance check".into(),
        });
    }
    Ok(())
}

/// The linear pieces of `h = V_M - V_L` over `x ∈ [0, 1]`, adjacent pieces
/// with equal slope merged.
pub fn h_pieces(m: &DecisionProblem, l: &DecisionProblem) -> Result<Vec<Piece>> {
    require_two_states(m, l)?;
    let (m_lines, l_lines) = (lines(m), lines(l));
    let mut cuts = vec![Rational::zero(), Rational::one()];
    crossings(&m_lines, &mut cuts);
    crossings(&l_lines, &mut cuts);
    cuts.sort();
    cuts.dedup();

    let two = rational::int(2);
    let mut pieces: Vec<Piece> = Vec::new();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        let (a_m, b_m) = active(&m_lines, &mid);
        let (a_l, b_l) = active(&l_lines, &mid);
        let slope = b_m - b_l;
        let intercept = a_m - a_l;
        match pieces.last_mut() {
            Some(last) if last.slope == slope => last.end = w[1].clone(),
            _ => pieces.push(Piece {
                start: w[0].clone(),
                end: w[1].clone(),
                slope,
                intercept,
            }),
        }
    }
    Ok(pieces)
}

/// Interior kinks of `h`.
pub fn breakpoints(pieces: &[Piece]) -> Vec<Rational> {
    pieces.iter().skip(1).map(|p| p.start.clone()).collect()
}

/// Decides dominance for two states by slope monotonicity. On failure the
/// counterexample is `1/2·δ_{b-δ} + 1/2·δ_{b+δ}` around the first kink `b`
/// where the slope drops, with `δ` the width of the narrower adjacent piece.
pub fn decide_1d(m: &DecisionProblem, l: &DecisionProblem) -> Result<DominanceVerdict> {
    let pieces = h_pieces(m, l)?;
    let drop = pieces.windows(2).position(|w| w[1].slope < w[0].slope);
    match drop {
        None => {
            // Pieces nearest the first vertex come first.
            let labelled = pieces
                .iter()
                .rev()
                .enumerate()
                .map(|(i, p)| {
                    let at_one = &p.intercept + &p.slope;
                    (format!("n{i}"), vec![at_one, p.intercept.clone()])
                })
                .collect();
            let n = prune(&m.with_vectors(labelled)?)?;
            let certificate = certify_decomposition(m, l, &n)?;
            Ok(DominanceVerdict::Dominates(Decomposition {
                n,
                certificate,
            }))
        }
        Some(k) => {
            let (left, right) = (&pieces[k], &pieces[k + 1]);
            let kink = &right.start;
            let width = (kink - &left.start).min(&right.end - kink);
            let half = rational::ratio(1, 2);
            let q = InformationStructure::new(vec![
                (half.clone(), belief_at(&(kink - &width))),
                (half, belief_at(&(kink + &width))),
            ])?;
            Counterexample::recompute(m, l, q).map(DominanceVerdict::NotDominates)
        }
    }
}

pub(crate) fn voi_pair(
    m: &DecisionProblem,
    l: &DecisionProblem,
    q: &InformationStructure,
) -> Result<(Rational, Rational)> {
    Ok((voi(m, q)?.voi, voi(l, q)?.voi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::value_equal;
    use crate::rational::{int, ints, ratio};

    fn problem(rows: &[&[i64]]) -> DecisionProblem {
        DecisionProblem::from_ints(rows).unwrap()
    }

    #[test]
    fn three_piece_pair_has_a_slope_drop() {
        let m = problem(&[&[0, 1], &[1, 0]]);
        let l = problem(&[&[2, 0], &[0, 1]]);
        let pieces = h_pieces(&m, &l).unwrap();
        assert_eq!(breakpoints(&pieces), vec![ratio(1, 3), ratio(1, 2)]);
        let slopes: Vec<Rational> = pieces.iter().map(|p| p.slope.clone()).collect();
        assert_eq!(slopes, vec![int(0), int(-3), int(-1)]);

        let DominanceVerdict::NotDominates(cx) = decide_1d(&m, &l).unwrap() else {
            panic!("expected a counterexample");
        };
        // Straddles 1/3 with half-width 1/6: posteriors p1 = 1/6 and 1/2.
        let posteriors: Vec<&Belief> = cx.q.support().iter().map(|s| &s.posterior).collect();
        assert_eq!(
            posteriors[0].coords(),
            rational::vec_of(&[(1, 6), (5, 6)]).as_slice()
        );
        assert_eq!(posteriors[1], &Belief::uniform(2));
        assert_eq!((cx.voi_m.clone(), cx.voi_l.clone()), (int(0), ratio(1, 4)));
        assert_eq!(cx.gap, ratio(1, 4));
    }

    #[test]
    fn perfect_info_over_zero_is_convex() {
        let m = problem(&[&[1, 0], &[0, 1]]);
        let l = problem(&[&[0, 0]]);
        let pieces = h_pieces(&m, &l).unwrap();
        assert_eq!(breakpoints(&pieces), vec![ratio(1, 2)]);
        assert_eq!(pieces[0].slope, int(-1));
        assert_eq!(pieces[1].slope, int(1));
        let DominanceVerdict::Dominates(d) = decide_1d(&m, &l).unwrap() else {
            panic!("expected dominance");
        };
        assert_eq!(
            d.n.vectors().cloned().collect::<Vec<_>>(),
            vec![ints(&[1, 0]), ints(&[0, 1])]
        );
    }

    #[test]
    fn identical_problems_give_the_zero_decomposition() {
        let m = problem(&[&[3, -1], &[0, 2], &[1, 1]]);
        let DominanceVerdict::Dominates(d) = decide_1d(&m, &m).unwrap() else {
            panic!("expected dominance");
        };
        assert!(value_equal(&d.n, &problem(&[&[0, 0]])).unwrap().holds);
    }

    #[test]
    fn reverse_of_perfect_info_has_gap_one_half() {
        let m = problem(&[&[0, 0]]);
        let l = problem(&[&[1, 0], &[0, 1]]);
        let DominanceVerdict::NotDominates(cx) = decide_1d(&m, &l).unwrap() else {
            panic!("expected a counterexample");
        };
        assert_eq!(cx.gap, ratio(1, 2));
        assert_eq!(cx.q.barycenter(), Belief::uniform(2));
    }

    #[test]
    fn rejects_other_dimensions() {
        let m = problem(&[&[1, 0, 0]]);
        assert!(matches!(decide_1d(&m, &m), Err(Error::Dimension { .. })));
    }
}
