//! JSON documents for problems, information structures and verdicts.
//!
//! Rationals travel as strings (`"3/4"`, `"-2"`) so nothing is rounded on the
//! way in or out. Conversion errors name the offending field.

use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::dominance::{DominanceVerdict, EqualityCertificate};
use crate::error::{Error, Result};
use crate::information::InformationStructure;
use crate::problem::{Action, DecisionProblem};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDocument {
    pub label: String,
    pub utilities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub states: Vec<String>,
    pub actions: Vec<ActionDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDocument {
    pub weight: String,
    pub belief: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformationDocument {
    pub points: Vec<PointDocument>,
}

fn parse_field(text: &str, field: impl FnOnce() -> String) -> Result<Rational> {
    rational::parse(text)
        .map_err(|_| Error::Parse(format!("{}: invalid rational {text:?}", field())))
}

fn format_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::format).collect()
}

impl ProblemDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem document: {e}")))
    }

    pub fn to_problem(&self) -> Result<DecisionProblem> {
        let mut actions = Vec::with_capacity(self.actions.len());
        for (i, a) in self.actions.iter().enumerate() {
            if a.utilities.len() != self.states.len() {
                return Err(Error::Parse(format!(
                    "actions[{i}].utilities: expected {} entries (one per state), found {}",
                    self.states.len(),
                    a.utilities.len()
                )));
            }
            let utilities = a
                .utilities
                .iter()
                .enumerate()
                .map(|(j, u)| parse_field(u, || format!("actions[{i}].utilities[{j}]")))
                .collect::<Result<_>>()?;
            actions.push(Action {
                label: a.label.clone(),
                utilities,
            });
        }
        if self.actions.is_empty() {
            return Err(Error::Parse(
                "actions: at least one action is required".into(),
            ));
        }
        if self.states.is_empty() {
            return Err(Error::Parse(
                "states: at least one state is required".into(),
            ));
        }
        DecisionProblem::new(self.states.clone(), actions)
            .map_err(|e| Error::Parse(format!("problem document: {e}")))
    }

    pub fn from_problem(problem: &DecisionProblem) -> Self {
        ProblemDocument {
            states: problem.states().to_vec(),
            actions: problem
                .actions()
                .iter()
                .map(|a| ActionDocument {
                    label: a.label.clone(),
                    utilities: format_all(&a.utilities),
                })
                .collect(),
        }
    }
}

impl InformationDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("information document: {e}")))
    }

    pub fn to_structure(&self) -> Result<InformationStructure> {
        if self.points.is_empty() {
            return Err(Error::Parse(
                "points: at least one point is required".into(),
            ));
        }
        let mut points = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            let weight = parse_field(&p.weight, || format!("points[{i}].weight"))?;
            let coords = p
                .belief
                .iter()
                .enumerate()
                .map(|(j, x)| parse_field(x, || format!("points[{i}].belief[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let belief = Belief::new(coords)
                .map_err(|e| Error::Parse(format!("points[{i}].belief: {e}")))?;
            points.push((weight, belief));
        }
        InformationStructure::new(points).map_err(|e| Error::Parse(format!("points: {e}")))
    }

    pub fn from_structure(q: &InformationStructure) -> Self {
        InformationDocument {
            points: q
                .support()
                .iter()
                .map(|s| PointDocument {
                    weight: rational::format(&s.weight),
                    belief: format_all(s.posterior.coords()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Dominates,
    NotDominates,
}

/// Machine-readable form of a [`DominanceVerdict`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub verdict: VerdictKind,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<ProblemDocument>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<EqualityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<InformationDocument>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub voi_m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub voi_l: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gap: Option<String>,
}

impl VerdictDocument {
    pub fn from_verdict(verdict: &DominanceVerdict, method: &str) -> Self {
        match verdict {
            DominanceVerdict::Dominates(d) => VerdictDocument {
                verdict: VerdictKind::Dominates,
                method: method.to_string(),
                decomposition: Some(ProblemDocument::from_problem(&d.n)),
                certificate: Some(d.certificate.clone()),
                counterexample: None,
                voi_m: None,
                voi_l: None,
                gap: None,
            },
            DominanceVerdict::NotDominates(cx) => VerdictDocument {
                verdict: VerdictKind::NotDominates,
                method: method.to_string(),
                decomposition: None,
                certificate: None,
                counterexample: Some(InformationDocument::from_structure(&cx.q)),
                voi_m: Some(rational::format(&cx.voi_m)),
                voi_l: Some(rational::format(&cx.voi_l)),
                gap: Some(rational::format(&cx.gap)),
            },
        }
    }
}

/// A pair of problems serialized together, used when reporting a failing
/// instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub m: ProblemDocument,
    pub l: ProblemDocument,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<InformationDocument>,
}

impl InstanceDocument {
    pub fn new(m: &DecisionProblem, l: &DecisionProblem, q: Option<&InformationStructure>) -> Self {
        InstanceDocument {
            m: ProblemDocument::from_problem(m),
            l: ProblemDocument::from_problem(l),
            q: q.map(InformationDocument::from_structure),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const PROBLEM: &str = r#"{
        "states": ["rain", "sun"],
        "actions": [
            {"label": "umbrella", "utilities": ["1", "0"]},
            {"label": "hat", "utilities": ["-1/2", "3/4"]}
        ]
    }"#;

    #[test]
    fn parses_problem_documents() {
        let doc = ProblemDocument::from_json(PROBLEM).unwrap();
        let p = doc.to_problem().unwrap();
        assert_eq!(p.states(), &["rain", "sun"]);
        assert_eq!(p.vector(1)[0], ratio(-1, 2));
        assert_eq!(ProblemDocument::from_problem(&p), doc);
    }

    #[test]
    fn problem_errors_name_the_field() {
        let bad = PROBLEM.replace("\"3/4\"", "\"3/0\"");
        let err = ProblemDocument::from_json(&bad)
            .unwrap()
            .to_problem()
            .unwrap_err();
        assert!(err.to_string().contains("actions[1].utilities[1]"), "{err}");

        let short = PROBLEM.replace("[\"1\", \"0\"]", "[\"1\"]");
        let err = ProblemDocument::from_json(&short)
            .unwrap()
            .to_problem()
            .unwrap_err();
        assert!(err.to_string().contains("actions[0].utilities"), "{err}");

        assert!(ProblemDocument::from_json("{\"states\": []}").is_err());
    }

    #[test]
    fn parses_information_documents() {
        let text = r#"{"points": [
            {"weight": "1/3", "belief": ["3/4", "1/4"]},
            {"weight": "2/3", "belief": ["3/8", "5/8"]}
        ]}"#;
        let q = InformationDocument::from_json(text)
            .unwrap()
            .to_structure()
            .unwrap();
        assert_eq!(q.barycenter(), Belief::uniform(2));

        let bad = text.replace("\"5/8\"", "\"1/8\"");
        let err = InformationDocument::from_json(&bad)
            .unwrap()
            .to_structure()
            .unwrap_err();
        assert!(err.to_string().contains("points[1].belief"), "{err}");

        let bad = text.replace("\"2/3\"", "\"1/2\"");
        let err = InformationDocument::from_json(&bad)
            .unwrap()
            .to_structure()
            .unwrap_err();
        assert!(err.to_string().contains("weights sum"), "{err}");
    }
}
