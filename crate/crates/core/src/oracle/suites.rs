//! Seeded property suites, one per acceptance criterion. Trials run in
//! parallel; each trial draws from its own RNG derived from `(seed, suite,
//! index)` and results are aggregated in index order, so a report depends on
//! the seed and trial count only.

use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    brute_value, brute_voi, generate_problem_with, midpoint_scan, random_belief, rng,
    sample_information_structure_with, InstanceSpec, OracleRng, ScanVerdict,
};
use crate::belief::Belief;
use crate::document::{InstanceDocument, ProblemDocument};
use crate::dominance::{
    decide, decide_1d, decide_dominance, Counterexample, Decomposition, DominanceVerdict,
    EqualityCertificate,
};
use crate::error::Result;
use crate::information::{voi, InformationStructure};
use crate::order::{value_equal, ValueOrderReport};
use crate::problem::{compose, DecisionProblem, ExtendedValue};
use crate::rational::{self, int, ratio, Rational};

pub const VOI_SIGN_TRIALS: usize = 10_000;
pub const SUFFICIENCY_TRIALS: usize = 1000;
pub const NECESSITY_TRIALS: usize = 1000;
pub const ONE_DIM_TRIALS: usize = 1000;
pub const ADDITIVITY_TRIALS: usize = 1000;
pub const HOMOGENEITY_TRIALS: usize = 1000;
pub const Q_PER_PAIR: usize = 100;
pub const BELIEFS_PER_PAIR: usize = 100;
pub const SCAN_SEGMENTS: usize = 1000;

const POOL: (i64, i64) = (-3, 3);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides every suite's trial count when set.
    pub trials: Option<usize>,
    /// Replaces engine verdicts with their opposite in the necessity and
    /// 1-D suites. A negative control: those suites must then fail.
    pub inject_fault: bool,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            trials: None,
            inject_fault: false,
        }
    }

    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub criterion: u8,
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Description of the lowest-index failing trial, with the serialized
    /// instance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_failure: Option<String>,
    pub notes: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} criterion {} ({}): {}/{} trials passed{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.trials - self.failures,
            self.trials,
            if self.notes.is_empty() {
                String::new()
            } else {
                format!("; {}", self.notes)
            }
        )
    }
}

/// Per-trial result: `Ok(tag)` on success, `Err(description)` on failure.
type Trial = std::result::Result<Tag, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Plain,
    Dominates,
    NotDominates,
}

fn trial_seed(seed: u64, suite: u64, index: usize) -> u64 {
    // splitmix64 finalizer over the packed triple
    let mut z = seed
        .wrapping_add(suite.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run<F>(criterion: u8, name: &str, seed: u64, trials: usize, f: F) -> (SuiteReport, Vec<Tag>)
where
    F: Fn(&mut OracleRng, usize) -> Result<Trial> + Sync,
{
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(trial_seed(seed, criterion as u64, i));
            match f(&mut r, i) {
                Ok(t) => t,
                Err(e) => Err(format!("error: {e}")),
            }
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_err()).count();
    let first_failure = results
        .iter()
        .enumerate()
        .find_map(|(i, r)| r.as_ref().err().map(|e| format!("trial {i}: {e}")));
    let tags: Vec<Tag> = results
        .iter()
        .map(|r| *r.as_ref().unwrap_or(&Tag::Plain))
        .collect();
    let dominates = tags.iter().filter(|t| **t == Tag::Dominates).count();
    let not = tags.iter().filter(|t| **t == Tag::NotDominates).count();
    let notes = if dominates + not > 0 {
        format!("{dominates} dominates, {not} not dominates")
    } else {
        String::new()
    };
    (
        SuiteReport {
            criterion,
            name: name.to_string(),
            trials,
            failures,
            first_failure,
            notes,
        },
        tags,
    )
}

fn random_problem(
    r: &mut OracleRng,
    states: usize,
    actions: (usize, usize),
) -> Result<DecisionProblem> {
    let spec = InstanceSpec::integers(states, actions, POOL, 0);
    generate_problem_with(r, &spec)
}

fn random_structure(r: &mut OracleRng, states: usize) -> Result<InformationStructure> {
    let k = r.gen_range(1..=6);
    sample_information_structure_with(r, states, k)
}

fn instance(m: &DecisionProblem, l: &DecisionProblem, q: Option<&InformationStructure>) -> String {
    InstanceDocument::new(m, l, q).to_json()
}

fn flip(verdict: DominanceVerdict, states: usize) -> DominanceVerdict {
    match verdict {
        DominanceVerdict::Dominates(_) => DominanceVerdict::NotDominates(Counterexample {
            q: InformationStructure::point_mass(Belief::uniform(states)),
            voi_m: int(0),
            voi_l: int(1),
            gap: int(1),
        }),
        DominanceVerdict::NotDominates(_) => {
            let n = DecisionProblem::from_vectors(vec![vec![Rational::zero(); states]])
                .expect("zero singleton");
            let claimed = ValueOrderReport {
                holds: true,
                violation: None,
                slacks: vec![],
            };
            DominanceVerdict::Dominates(Decomposition {
                n,
                certificate: EqualityCertificate {
                    composed_below: claimed.clone(),
                    composed_above: claimed,
                },
            })
        }
    }
}

/// Checks a counterexample by enumeration, independently of the engine's
/// own recomputation.
fn check_counterexample(
    m: &DecisionProblem,
    l: &DecisionProblem,
    cx: &Counterexample,
) -> std::result::Result<(), String> {
    let (vm, vl) = (brute_voi(m, &cx.q), brute_voi(l, &cx.q));
    if vm != cx.voi_m || vl != cx.voi_l {
        return Err(format!(
            "reported VoIs ({}, {}) recompute to ({}, {}); {}",
            rational::format(&cx.voi_m),
            rational::format(&cx.voi_l),
            rational::format(&vm),
            rational::format(&vl),
            instance(m, l, Some(&cx.q))
        ));
    }
    if vm >= vl || (&vl - &vm) != cx.gap {
        return Err(format!(
            "counterexample does not separate (gap {}); {}",
            rational::format(&(&vl - &vm)),
            instance(m, l, Some(&cx.q))
        ));
    }
    Ok(())
}

/// Criterion 1: `VoI_U(Q) >= 0` on random problems and structures.
pub fn voi_sign(config: &SuiteConfig) -> SuiteReport {
    let trials = config.trials(VOI_SIGN_TRIALS);
    run(1, "VoI sign and finiteness", config.seed, trials, |r, _| {
        let states = r.gen_range(2..=5);
        let p = random_problem(r, states, (1, 8))?;
        let q = random_structure(r, states)?;
        let report = voi(&p, &q)?;
        let brute = brute_voi(&p, &q);
        if report.voi.is_negative() || report.voi != brute {
            return Ok(Err(format!(
                "voi {} (enumeration {}); problem {}",
                rational::format(&report.voi),
                rational::format(&brute),
                serde_json::to_string(&ProblemDocument::from_problem(&p)).unwrap_or_default()
            )));
        }
        Ok(Ok(Tag::Plain))
    })
    .0
}

/// Criterion 2: `compose(L, N)` dominates `L`, certified, and no sampled
/// structure reverses the VoI order.
pub fn sufficiency(config: &SuiteConfig) -> SuiteReport {
    let trials = config.trials(SUFFICIENCY_TRIALS);
    run(
        2,
        "sufficiency of decomposition",
        config.seed,
        trials,
        |r, _| {
            let states = r.gen_range(2..=4);
            let l = random_problem(r, states, (1, 4))?;
            let n = random_problem(r, states, (1, 4))?;
            let m = compose(&l, &n)?;
            let verdict = decide_dominance(&m, &l)?;
            let Some(d) = verdict.decomposition() else {
                return Ok(Err(format!(
                    "composed problem reported as not dominating; {}",
                    instance(&m, &l, None)
                )));
            };
            if !d.certificate.holds() || !value_equal(&compose(&l, &d.n)?, &m)?.holds {
                return Ok(Err(format!(
                    "decomposition certificate fails; {}",
                    instance(&m, &l, None)
                )));
            }
            for _ in 0..Q_PER_PAIR {
                let q = random_structure(r, states)?;
                let diff = brute_voi(&m, &q) - brute_voi(&l, &q);
                if diff.is_negative() {
                    return Ok(Err(format!(
                        "VoI difference {}; {}",
                        rational::format(&diff),
                        instance(&m, &l, Some(&q))
                    )));
                }
            }
            Ok(Ok(Tag::Dominates))
        },
    )
    .0
}

/// The corpus for criteria 3 and 5. One pair in four is `(compose(L, N), L)`
/// so that both verdicts are well represented; the rest are independent.
fn necessity_pair(r: &mut OracleRng, index: usize) -> Result<(DecisionProblem, DecisionProblem)> {
    let states = r.gen_range(2..=4);
    if index.is_multiple_of(4) {
        let l = random_problem(r, states, (1, 3))?;
        let n = random_problem(r, states, (1, 3))?;
        Ok((compose(&l, &n)?, l))
    } else {
        let m = random_problem(r, states, (1, 6))?;
        let l = random_problem(r, states, (1, 6))?;
        Ok((m, l))
    }
}

/// Criterion 3, also returning the pairs the engine marked as dominating
/// (the corpus for [`oracle_consistency`]).
pub fn necessity(config: &SuiteConfig) -> (SuiteReport, Vec<(DecisionProblem, DecisionProblem)>) {
    let trials = config.trials(NECESSITY_TRIALS);
    let seed = config.seed;
    let (report, tags) = run(3, "constructive necessity", seed, trials, |r, i| {
        let (m, l) = necessity_pair(r, i)?;
        let mut verdict = decide_dominance(&m, &l)?;
        if config.inject_fault {
            verdict = flip(verdict, m.state_count());
        }
        match &verdict {
            DominanceVerdict::Dominates(d) => {
                let composed = compose(&l, &d.n)?;
                let equal = value_equal(&composed, &m)?;
                if !equal.holds {
                    return Ok(Err(format!(
                        "V_(L+N) != V_M by LP; {}",
                        instance(&m, &l, None)
                    )));
                }
                for _ in 0..BELIEFS_PER_PAIR {
                    let p = random_belief(r, m.state_count());
                    if brute_value(&composed, &p) != brute_value(&m, &p) {
                        return Ok(Err(format!(
                            "V_(L+N) != V_M at {p}; {}",
                            instance(&m, &l, None)
                        )));
                    }
                }
                Ok(Ok(Tag::Dominates))
            }
            DominanceVerdict::NotDominates(cx) => {
                Ok(check_counterexample(&m, &l, cx).map(|_| Tag::NotDominates))
            }
        }
    });
    let mut corpus = Vec::new();
    for (i, tag) in tags.iter().enumerate() {
        if *tag == Tag::Dominates {
            let mut r = rng(trial_seed(seed, 3, i));
            if let Ok(pair) = necessity_pair(&mut r, i) {
                corpus.push(pair);
            }
        }
    }
    (report, corpus)
}

/// Criterion 5: the Jensen scan finds nothing on dominating pairs.
pub fn oracle_consistency(
    config: &SuiteConfig,
    corpus: &[(DecisionProblem, DecisionProblem)],
) -> SuiteReport {
    run(
        5,
        "oracle consistency",
        config.seed,
        corpus.len(),
        |_, i| {
            let (m, l) = &corpus[i];
            let scan = midpoint_scan(m, l, SCAN_SEGMENTS, trial_seed(config.seed, 50, i))?;
            match scan.result {
                ScanVerdict::NoViolationFound => Ok(Ok(Tag::Plain)),
                ScanVerdict::ViolationFound { p, q, lambda, gap } => Ok(Err(format!(
                    "Jensen violation {} at p = {p}, q = {q}, lambda = {}; {}",
                    rational::format(&gap),
                    rational::format(&lambda),
                    instance(m, l, None)
                ))),
            }
        },
    )
    .0
}

/// Criterion 4: the 1-D procedure and the LP method agree on two states.
pub fn one_dim_agreement(config: &SuiteConfig) -> SuiteReport {
    let trials = config.trials(ONE_DIM_TRIALS);
    run(4, "1-D agreement", config.seed, trials, |r, _| {
        let m = random_problem(r, 2, (1, 6))?;
        let l = random_problem(r, 2, (1, 6))?;
        let mut fast = decide_1d(&m, &l)?;
        if config.inject_fault {
            fast = flip(fast, 2);
        }
        let lp = decide_dominance(&m, &l)?;
        if fast.dominates() != lp.dominates() {
            return Ok(Err(format!(
                "verdicts differ (1-D {}, LP {}); {}",
                fast.dominates(),
                lp.dominates(),
                instance(&m, &l, None)
            )));
        }
        match (&fast, &lp) {
            (DominanceVerdict::NotDominates(a), DominanceVerdict::NotDominates(b)) => {
                if let Err(e) = check_counterexample(&m, &l, a).and(check_counterexample(&m, &l, b))
                {
                    return Ok(Err(e));
                }
                Ok(Ok(Tag::NotDominates))
            }
            _ => Ok(Ok(Tag::Dominates)),
        }
    })
    .0
}

/// Criterion 6: the value function of a composition is the sum.
pub fn additivity(config: &SuiteConfig) -> SuiteReport {
    let trials = config.trials(ADDITIVITY_TRIALS);
    run(
        6,
        "support-function additivity",
        config.seed,
        trials,
        |r, _| {
            let states = r.gen_range(2..=5);
            let l = random_problem(r, states, (1, 6))?;
            let n = random_problem(r, states, (1, 6))?;
            let p = random_belief(r, states);
            let composed = compose(&l, &n)?.evaluate(&p)?;
            let sum = l.evaluate(&p)? + n.evaluate(&p)?;
            if composed != sum || composed != brute_value(&l, &p) + brute_value(&n, &p) {
                return Ok(Err(format!(
                    "V_(L+N)({p}) = {} but V_L + V_N = {}; {}",
                    rational::format(&composed),
                    rational::format(&sum),
                    instance(&l, &n, None)
                )));
            }
            Ok(Ok(Tag::Plain))
        },
    )
    .0
}

fn random_point(r: &mut OracleRng, states: usize) -> Vec<Rational> {
    let denom = r.gen_range(1..=8);
    if r.gen_ratio(1, 20) {
        return vec![Rational::zero(); states];
    }
    (0..states)
        .map(|_| ratio(r.gen_range(0..=10), denom))
        .collect()
}

/// Criterion 7: the homogeneous extension is positively homogeneous,
/// agrees with the value function on the simplex, and is `+∞` off the
/// nonnegative orthant.
pub fn homogeneity(config: &SuiteConfig) -> SuiteReport {
    let trials = config.trials(HOMOGENEITY_TRIALS);
    run(7, "homogeneous extension", config.seed, trials, |r, _| {
        let states = r.gen_range(2..=5);
        let u = random_problem(r, states, (1, 8))?;
        let dump = || serde_json::to_string(&ProblemDocument::from_problem(&u)).unwrap_or_default();
        let y = random_point(r, states);
        let lambda = ratio(r.gen_range(1..=20), r.gen_range(1..=20));
        let scaled: Vec<Rational> = y.iter().map(|v| v * &lambda).collect();
        let (ExtendedValue::Finite(hy), ExtendedValue::Finite(hly)) = (
            u.homogeneous_extension_eval(&y)?,
            u.homogeneous_extension_eval(&scaled)?,
        ) else {
            return Ok(Err(format!(
                "infinite on the nonnegative orthant; {}",
                dump()
            )));
        };
        if hly != &lambda * &hy {
            return Ok(Err(format!(
                "h({}) = {} but lambda h(y) = {}; {}",
                rational::VecDisplay(&scaled),
                rational::format(&hly),
                rational::format(&(&lambda * &hy)),
                dump()
            )));
        }

        let p = random_belief(r, states);
        let on_simplex = u.homogeneous_extension_eval(p.coords())?;
        if on_simplex != ExtendedValue::Finite(brute_value(&u, &p)) {
            return Ok(Err(format!("extension differs from V at {p}; {}", dump())));
        }

        let mut negative = y.clone();
        let j = r.gen_range(0..states);
        negative[j] = ratio(-r.gen_range(1..=10), r.gen_range(1..=8));
        if u.homogeneous_extension_eval(&negative)? != ExtendedValue::PlusInfinity {
            return Ok(Err(format!(
                "finite at {}; {}",
                rational::VecDisplay(&negative),
                dump()
            )));
        }
        Ok(Ok(Tag::Plain))
    })
    .0
}

/// A named fixture with its expected outcome.
pub struct Fixture {
    pub name: &'static str,
    pub m: DecisionProblem,
    pub l: DecisionProblem,
    /// `Ok(N vectors)` for dominance, `Err(gap)` otherwise.
    pub expected: std::result::Result<Vec<Vec<Rational>>, Rational>,
}

pub fn fixtures() -> Vec<Fixture> {
    let perfect = DecisionProblem::from_ints(&[&[1, 0], &[0, 1]]).expect("fixture");
    let zero = DecisionProblem::from_ints(&[&[0, 0]]).expect("fixture");
    // h has slopes 0, -3, -1 in p1 with breakpoints 1/3 and 1/2.
    let slopes_m = DecisionProblem::from_ints(&[&[0, 1], &[1, 0]]).expect("fixture");
    let slopes_l = DecisionProblem::from_ints(&[&[2, 0], &[0, 1]]).expect("fixture");
    vec![
        Fixture {
            name: "perfect information over the zero singleton",
            m: perfect.clone(),
            l: zero.clone(),
            expected: Ok(vec![rational::ints(&[1, 0]), rational::ints(&[0, 1])]),
        },
        Fixture {
            name: "zero singleton over perfect information",
            m: zero,
            l: perfect,
            expected: Err(ratio(1, 2)),
        },
        Fixture {
            name: "slopes (0, -3, -1)",
            m: slopes_m,
            l: slopes_l,
            expected: Err(ratio(1, 4)),
        },
    ]
}

/// Criterion 8, in process: the worked fixtures through [`decide`].
pub fn worked_fixtures(_config: &SuiteConfig) -> SuiteReport {
    let list = fixtures();
    run(8, "worked fixtures", 0, list.len(), |_, i| {
        let f = &list[i];
        let (verdict, _) = decide(&f.m, &f.l)?;
        let outcome = match (&f.expected, &verdict) {
            (Ok(n), DominanceVerdict::Dominates(d)) => {
                let mut got: Vec<Vec<Rational>> = d.n.vectors().cloned().collect();
                let mut want = n.clone();
                got.sort();
                want.sort();
                if got == want {
                    Ok(Tag::Dominates)
                } else {
                    Err(format!("{}: N = {:?}", f.name, got))
                }
            }
            (Err(gap), DominanceVerdict::NotDominates(cx)) => {
                if let Err(e) = check_counterexample(&f.m, &f.l, cx) {
                    Err(e)
                } else if &cx.gap == gap {
                    Ok(Tag::NotDominates)
                } else {
                    Err(format!("{}: gap {}", f.name, rational::format(&cx.gap)))
                }
            }
            _ => Err(format!("{}: wrong verdict", f.name)),
        };
        Ok(outcome)
    })
    .0
}

/// Runs every suite in criterion order.
pub fn run_all(config: &SuiteConfig) -> Vec<SuiteReport> {
    let (necessity_report, corpus) = necessity(config);
    vec![
        voi_sign(config),
        sufficiency(config),
        necessity_report,
        one_dim_agreement(config),
        oracle_consistency(config, &corpus),
        additivity(config),
        homogeneity(config),
        worked_fixtures(config),
    ]
}
