//! Independent validators for the engine: seeded instance generators,
//! a brute-force Jensen scan of `h = V_M - V_L`, and verdict
//! cross-validation.
//!
//! Nothing here calls the LP kernel or the dominance engine. Value functions
//! are recomputed by direct enumeration over the raw utility vectors.

pub mod suites;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::document::InstanceDocument;
use crate::dominance::DominanceVerdict;
use crate::error::{Error, Result};
use crate::information::{voi, InformationStructure};
use crate::order::value_equal;
use crate::problem::{compose, default_state_labels, Action, DecisionProblem};
use crate::rational::{self, Rational};

/// Largest denominator used for random posteriors.
pub const MAX_DENOMINATOR: i64 = 64;
/// Jensen-scan budget used by [`cross_validate`].
pub const DEFAULT_SCAN_SEGMENTS: usize = 1000;
const LAMBDA_GRID: [(i64, i64); 3] = [(1, 4), (1, 2), (3, 4)];

pub type OracleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> OracleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Recipe for a random decision problem. Generation is a pure function of
/// the spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub states: usize,
    pub min_actions: usize,
    pub max_actions: usize,
    pub pool: Vec<Rational>,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn integers(states: usize, actions: (usize, usize), range: (i64, i64), seed: u64) -> Self {
        InstanceSpec {
            states,
            min_actions: actions.0,
            max_actions: actions.1,
            pool: (range.0..=range.1).map(rational::int).collect(),
            seed,
        }
    }
}

pub fn generate_problem(spec: &InstanceSpec) -> Result<DecisionProblem> {
    generate_problem_with(&mut rng(spec.seed), spec)
}

pub fn generate_problem_with(rng: &mut OracleRng, spec: &InstanceSpec) -> Result<DecisionProblem> {
    if spec.pool.is_empty() {
        return Err(Error::Invalid("utility pool is empty".into()));
    }
    if spec.states == 0 || spec.min_actions == 0 || spec.min_actions > spec.max_actions {
        return Err(Error::Invalid(format!("bad instance spec {spec:?}")));
    }
    let count = rng.gen_range(spec.min_actions..=spec.max_actions);
    let actions = (0..count)
        .map(|i| Action {
            label: format!("a{i}"),
            utilities: (0..spec.states)
                .map(|_| spec.pool[rng.gen_range(0..spec.pool.len())].clone())
                .collect(),
        })
        .collect();
    DecisionProblem::new(default_state_labels(spec.states), actions)
}

/// A random belief whose coordinates share a denominator of at most
/// [`MAX_DENOMINATOR`]. Vertices come up regularly (denominator 1).
pub fn random_belief(rng: &mut OracleRng, states: usize) -> Belief {
    let denom = rng.gen_range(1..=MAX_DENOMINATOR);
    let mut cuts: Vec<i64> = (0..states - 1).map(|_| rng.gen_range(0..=denom)).collect();
    cuts.sort_unstable();
    let mut coords = Vec::with_capacity(states);
    let mut last = 0;
    for c in cuts.into_iter().chain(std::iter::once(denom)) {
        coords.push(rational::ratio(c - last, denom));
        last = c;
    }
    Belief::new(coords).expect("composition of the denominator")
}

/// `k` distinct posteriors with positive weights summing to one.
pub fn sample_information_structure(
    states: usize,
    k: usize,
    seed: u64,
) -> Result<InformationStructure> {
    sample_information_structure_with(&mut rng(seed), states, k)
}

pub fn sample_information_structure_with(
    rng: &mut OracleRng,
    states: usize,
    k: usize,
) -> Result<InformationStructure> {
    if k == 0 || states == 0 {
        return Err(Error::Invalid(
            "need at least one state and one support point".into(),
        ));
    }
    let mut posteriors: Vec<Belief> = Vec::with_capacity(k);
    let mut attempts = 0;
    while posteriors.len() < k {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::Invalid(format!(
                "cannot draw {k} distinct posteriors over {states} states"
            )));
        }
        let p = random_belief(rng, states);
        if !posteriors.contains(&p) {
            posteriors.push(p);
        }
    }
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=16)).collect();
    let total: i64 = raw.iter().sum();
    InformationStructure::new(
        raw.into_iter()
            .map(|w| rational::ratio(w, total))
            .zip(posteriors)
            .collect(),
    )
}

/// Value function by direct enumeration, independent of
/// [`DecisionProblem::evaluate`].
pub fn brute_value(problem: &DecisionProblem, p: &Belief) -> Rational {
    let mut best: Option<Rational> = None;
    for a in problem.actions() {
        let mut total = Rational::zero();
        for (x, u) in p.coords().iter().zip(&a.utilities) {
            total += x * u;
        }
        if best.as_ref().is_none_or(|b| total > *b) {
            best = Some(total);
        }
    }
    best.expect("nonempty action set")
}

pub fn brute_h(m: &DecisionProblem, l: &DecisionProblem, p: &Belief) -> Rational {
    brute_value(m, p) - brute_value(l, p)
}

/// Value of information by direct enumeration.
pub fn brute_voi(problem: &DecisionProblem, q: &InformationStructure) -> Rational {
    let mut expected = Rational::zero();
    let mut prior = vec![Rational::zero(); q.dim()];
    for s in q.support() {
        expected += &s.weight * brute_value(problem, &s.posterior);
        for (c, x) in prior.iter_mut().zip(s.posterior.coords()) {
            *c += &s.weight * x;
        }
    }
    let prior = Belief::new(prior).expect("barycenter of beliefs");
    expected - brute_value(problem, &prior)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ScanVerdict {
    NoViolationFound,
    /// `h(λp + (1-λ)q) - λh(p) - (1-λ)h(q) = gap > 0`.
    ViolationFound {
        p: Belief,
        q: Belief,
        #[serde(with = "rational::as_string")]
        lambda: Rational,
        #[serde(with = "rational::as_string")]
        gap: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub result: ScanVerdict,
    pub segments_checked: usize,
}

impl ScanReport {
    pub fn found_violation(&self) -> bool {
        matches!(self.result, ScanVerdict::ViolationFound { .. })
    }
}

/// Random-segment falsifier for convexity of `h = V_M - V_L` on the grid
/// `λ ∈ {1/4, 1/2, 3/4}`. A violation is an exact certificate; finding none
/// proves nothing.
pub fn midpoint_scan(
    m: &DecisionProblem,
    l: &DecisionProblem,
    segments: usize,
    seed: u64,
) -> Result<ScanReport> {
    m.check_same_states(l)?;
    let mut rng = rng(seed);
    let n = m.state_count();
    for done in 0..segments {
        let p = random_belief(&mut rng, n);
        let q = random_belief(&mut rng, n);
        let (hp, hq) = (brute_h(m, l, &p), brute_h(m, l, &q));
        for &(num, den) in &LAMBDA_GRID {
            let lambda = rational::ratio(num, den);
            let mid = q.toward(&p, &lambda);
            let chord = &lambda * &hp + (Rational::one() - &lambda) * &hq;
            let gap = brute_h(m, l, &mid) - chord;
            if gap.is_positive() {
                return Ok(ScanReport {
                    result: ScanVerdict::ViolationFound { p, q, lambda, gap },
                    segments_checked: done + 1,
                });
            }
        }
    }
    Ok(ScanReport {
        result: ScanVerdict::NoViolationFound,
        segments_checked: segments,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub consistent: bool,
    pub checks: Vec<Check>,
    /// Serialized `(M, L[, Q])` when a check failed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub offending_instance: Option<String>,
}

/// Audits an engine verdict against the oracles. Failures are report
/// content, not errors.
pub fn cross_validate(
    m: &DecisionProblem,
    l: &DecisionProblem,
    verdict: &DominanceVerdict,
    q_samples: usize,
    seed: u64,
) -> Result<CrossValidationReport> {
    m.check_same_states(l)?;
    let mut checks = Vec::new();
    let offending_q;
    match verdict {
        DominanceVerdict::Dominates(d) => {
            let composed = compose(l, &d.n)?;
            let equal = value_equal(&composed, m)?;
            checks.push(Check {
                name: "certificate: V_{L+N} = V_M re-verified".into(),
                passed: equal.holds,
                detail: match &equal.violation {
                    Some(v) => format!("values differ at {}", v.belief),
                    None => "both LP directions hold".into(),
                },
            });

            let mut rng = rng(seed);
            let mut worst: Option<(Rational, InformationStructure)> = None;
            for _ in 0..q_samples {
                let k = rng.gen_range(1..=6);
                let q = sample_information_structure_with(&mut rng, m.state_count(), k)?;
                let diff = brute_voi(m, &q) - brute_voi(l, &q);
                if diff.is_negative() && worst.as_ref().is_none_or(|(w, _)| diff < *w) {
                    worst = Some((diff, q));
                }
            }
            checks.push(Check {
                name: format!("VoI_M - VoI_L >= 0 on {q_samples} random structures"),
                passed: worst.is_none(),
                detail: match &worst {
                    Some((d, _)) => format!("difference {}", rational::format(d)),
                    None => "no negative difference".into(),
                },
            });
            offending_q = worst.map(|(_, q)| q);

            let scan = midpoint_scan(m, l, DEFAULT_SCAN_SEGMENTS, seed.wrapping_add(1))?;
            checks.push(Check {
                name: format!("Jensen scan of h over {DEFAULT_SCAN_SEGMENTS} segments"),
                passed: !scan.found_violation(),
                detail: serde_json::to_string(&scan.result).unwrap_or_default(),
            });
        }
        DominanceVerdict::NotDominates(cx) => {
            let (vm, vl) = (brute_voi(m, &cx.q), brute_voi(l, &cx.q));
            checks.push(Check {
                name: "counterexample VoIs recomputed by enumeration".into(),
                passed: vm == cx.voi_m && vl == cx.voi_l,
                detail: format!(
                    "VoI_M = {}, VoI_L = {}",
                    rational::format(&vm),
                    rational::format(&vl)
                ),
            });
            let engine_side = voi(m, &cx.q)?.voi < voi(l, &cx.q)?.voi;
            checks.push(Check {
                name: "counterexample separates strictly".into(),
                passed: vm < vl && engine_side,
                detail: format!("gap {}", rational::format(&(&vl - &vm))),
            });
            offending_q = Some(cx.q.clone());
        }
    }
    let consistent = checks.iter().all(|c| c.passed);
    Ok(CrossValidationReport {
        consistent,
        checks,
        offending_instance: (!consistent)
            .then(|| InstanceDocument::new(m, l, offending_q.as_ref()).to_json()),
    })
}
