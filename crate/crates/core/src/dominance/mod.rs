//! Deciding whether one decision problem values information more than
//! another, constructively.
//!
//! `M` dominates `L` iff `h = V_M - V_L` is convex on the simplex. The gradient
//! of `h` on each full-dimensional cell where a fixed pair of actions is
//! jointly optimal is `u_m - u_l`; the max of these candidates is never below
//! `h`, and equals `h` exactly when `h` is convex. So:
//!
//! 1. enumerate full-dimensional cells with margin LPs ([`cells`]);
//! 2. check every candidate stays below `h` with min-of-max LPs;
//! 3. if so, the candidates form the parallel problem `N` and
//!    `V_{L⊕N} = V_M` is certified by two more LP comparisons;
//! 4. otherwise a violating belief yields a two-point information structure
//!    on which `L` gains strictly more from information than `M`.

pub mod cells;
pub mod counterexample;
pub mod one_dim;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::InformationStructure;
use crate::order::{prune, value_leq, ValueOrderReport};
use crate::problem::{compose, DecisionProblem};
use crate::rational::{self, Rational};

pub use cells::{
    check_candidates_below, enumerate_full_dim_pairs, h_value, synthesize_candidates, BelowCheck,
    Candidate, CandidateSet, CompatiblePair,
};
pub use counterexample::build_counterexample;
pub use one_dim::{breakpoints, decide_1d, h_pieces, Piece};

/// The two LP comparisons behind `V_{L⊕N} = V_M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityCertificate {
    /// `V_{L⊕N} <= V_M`.
    pub composed_below: ValueOrderReport,
    /// `V_M <= V_{L⊕N}`.
    pub composed_above: ValueOrderReport,
}

impl EqualityCertificate {
    pub fn holds(&self) -> bool {
        self.composed_below.holds && self.composed_above.holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub n: DecisionProblem,
    pub certificate: EqualityCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub q: InformationStructure,
    pub voi_m: Rational,
    pub voi_l: Rational,
    /// `voi_l - voi_m > 0`.
    pub gap: Rational,
}

impl Counterexample {
    /// Computes both values of information for `q` and checks that `L`
    /// strictly gains more.
    pub fn recompute(
        m: &DecisionProblem,
        l: &DecisionProblem,
        q: InformationStructure,
    ) -> Result<Self> {
        let (voi_m, voi_l) = one_dim::voi_pair(m, l, &q)?;
        let gap = &voi_l - &voi_m;
        if !gap.is_positive() {
            return Err(Error::Internal(format!(
                "counterexample does not separate: VoI_M = {}, VoI_L = {}",
                rational::format(&voi_m),
                rational::format(&voi_l)
            )));
        }
        Ok(Counterexample {
            q,
            voi_m,
            voi_l,
            gap,
        })
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DominanceVerdict {
    Dominates(Decomposition),
    NotDominates(Counterexample),
}

impl DominanceVerdict {
    pub fn dominates(&self) -> bool {
        matches!(self, DominanceVerdict::Dominates(_))
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match self {
            DominanceVerdict::Dominates(d) => Some(d),
            DominanceVerdict::NotDominates(_) => None,
        }
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            DominanceVerdict::Dominates(_) => None,
            DominanceVerdict::NotDominates(c) => Some(c),
        }
    }
}

/// Runs both LP comparisons between `compose(l, n)` and `m`.
pub fn equality_certificate(
    m: &DecisionProblem,
    l: &DecisionProblem,
    n: &DecisionProblem,
) -> Result<EqualityCertificate> {
    let composed = compose(l, n)?;
    Ok(EqualityCertificate {
        composed_below: value_leq(&composed, m)?,
        composed_above: value_leq(m, &composed)?,
    })
}

/// Like [`equality_certificate`] but an unequal result is an internal error.
pub(crate) fn certify_decomposition(
    m: &DecisionProblem,
    l: &DecisionProblem,
    n: &DecisionProblem,
) -> Result<EqualityCertificate> {
    let certificate = equality_certificate(m, l, n)?;
    if !certificate.holds() {
        return Err(Error::Internal(
            "synthesized parallel problem does not reproduce V_M".into(),
        ));
    }
    Ok(certificate)
}

/// Exact dominance decision in any number of states via the LP candidate
/// method.
pub fn decide_dominance(m: &DecisionProblem, l: &DecisionProblem) -> Result<DominanceVerdict> {
    m.check_same_states(l)?;
    let m_min = prune(m)?;
    let l_min = prune(l)?;
    let pairs = enumerate_full_dim_pairs(&m_min, &l_min)?;
    let candidates = synthesize_candidates(&m_min, &l_min, pairs);
    if candidates.candidates.is_empty() {
        return Err(Error::Internal("no full-dimensional cells found".into()));
    }
    match check_candidates_below(&m_min, &l_min, &candidates)? {
        BelowCheck::AllBelow => {
            let labelled = candidates
                .vectors()
                .enumerate()
                .map(|(i, c)| (format!("n{i}"), c.clone()))
                .collect();
            let n = prune(&m.with_vectors(labelled)?)?;
            let certificate = certify_decomposition(m, l, &n)?;
            Ok(DominanceVerdict::Dominates(Decomposition {
                n,
                certificate,
            }))
        }
        BelowCheck::Violation { candidate, p_star } => {
            let c = &candidates.candidates[candidate].vector;
            let cell = candidates.origin(candidate);
            let q = build_counterexample(&m_min, &l_min, c, &p_star, cell)?;
            Counterexample::recompute(m, l, q).map(DominanceVerdict::NotDominates)
        }
    }
}

/// Which decision procedure produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Slope monotonicity of `h` on the segment, for two states.
    OneDimensional,
    /// LP candidate method, any number of states.
    LpCandidates,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::OneDimensional => "one_dimensional",
            Method::LpCandidates => "lp_candidates",
        }
    }
}

/// Uses [`decide_1d`] for two states and [`decide_dominance`] otherwise.
pub fn decide(m: &DecisionProblem, l: &DecisionProblem) -> Result<(DominanceVerdict, Method)> {
    m.check_same_states(l)?;
    if m.state_count() == 2 {
        Ok((decide_1d(m, l)?, Method::OneDimensional))
    } else {
        Ok((decide_dominance(m, l)?, Method::LpCandidates))
    }
}

/// The parallel problem `N` with `V_{L⊕N} = V_M`. Errors with
/// [`Error::Precondition`] when `M` does not dominate `L`.
pub fn decompose(m: &DecisionProblem, l: &DecisionProblem) -> Result<DecisionProblem> {
    match decide_dominance(m, l)? {
        DominanceVerdict::Dominates(d) => Ok(d.n),
        DominanceVerdict::NotDominates(cx) => Err(Error::Precondition(format!(
            "M does not value information more than L (gap {} on a two-point structure)",
            rational::format(&cx.gap)
        ))),
    }
}
