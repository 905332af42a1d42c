//! Exact value-of-information analysis for finite decision problems.
//!
//! A decision problem is a finite list of state-indexed utility vectors; its
//! value function on the belief simplex is the maximum of the induced linear
//! forms. This crate evaluates value functions and values of information in
//! exact rational arithmetic, and decides whether one problem values
//! information more than another for every information structure. When it
//! does, the difference of value functions is realized as a parallel problem
//! `N` with `V_{L⊕N} = V_M`; when it does not, a two-point information
//! structure witnesses the failure.

pub mod belief;
pub mod document;
pub mod dominance;
pub mod error;
pub mod information;
pub mod kernel;
pub mod lp;
pub mod oracle;
pub mod order;
pub mod problem;
pub mod rational;

pub use belief::Belief;
pub use dominance::{decide, decide_1d, decide_dominance, decompose, DominanceVerdict, Method};
pub use error::{Error, Result};
pub use information::{voi, voi_difference, InformationStructure, VoIReport};
pub use order::{prune, value_equal, value_leq, ValueOrderReport};
pub use problem::{compose, Action, DecisionProblem, ExtendedValue};
pub use rational::Rational;
