//! `infoval`: batch front end for exact value-of-information analysis.
//!
//! Exit codes: 0 success (or Dominates), 1 NotDominates or a failing
//! selftest, 2 bad input, 3 internal inconsistency.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use infoval::document::{InformationDocument, ProblemDocument, VerdictDocument};
use infoval::dominance::{decide, decide_dominance, Counterexample, Method};
use infoval::oracle::suites::{run_all, SuiteConfig};
use infoval::oracle::{brute_voi, cross_validate, CrossValidationReport};
use infoval::rational::{self, Rational};
use infoval::{compose, prune, value_equal, voi, Belief, DecisionProblem, DominanceVerdict, Error};

#[derive(Parser)]
#[command(
    name = "infoval",
    version,
    about = "Exact value-of-information analysis"
)]
struct Cli {
    /// Human-readable output with decimal hints instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value of a problem at a belief, with the optimal actions.
    Eval {
        problem: PathBuf,
        /// Belief coordinates in state order, e.g. `1/2 1/2`.
        #[arg(required = true, num_args = 1..)]
        belief: Vec<String>,
    },
    /// Value of information of a problem under an information structure.
    Voi {
        problem: PathBuf,
        information: PathBuf,
    },
    /// Decide whether M values information more than L.
    Compare {
        m: PathBuf,
        l: PathBuf,
        /// Re-verify every certificate before printing.
        #[arg(long)]
        certify: bool,
        /// Cross-validate the verdict against the oracles with this many
        /// random information structures.
        #[arg(long, value_name = "K")]
        oracle_samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write N (problem document) or Q (information document) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the parallel problem N with V_(L+N) = V_M.
    Decompose {
        m: PathBuf,
        l: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove actions that never matter to the value function.
    Prune {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per suite.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Run every suite at its full acceptance count instead of `--trials`.
    #[arg(long, conflicts_with = "trials")]
    full: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn inconsistent(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Dimension { .. } | Error::Invalid(_) => 2,
            Error::Precondition(_) => 1,
            Error::Internal(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let human = cli.human;
    let result = match cli.command {
        Command::Eval { problem, belief } => cmd_eval(&problem, &belief, human),
        Command::Voi {
            problem,
            information,
        } => cmd_voi(&problem, &information, human),
        Command::Compare {
            m,
            l,
            certify,
            oracle_samples,
            seed,
            out,
        } => cmd_compare(&m, &l, certify, oracle_samples, seed, out.as_deref(), human),
        Command::Decompose { m, l, out } => cmd_decompose(&m, &l, out.as_deref(), human),
        Command::Prune { problem, out } => cmd_prune(&problem, out.as_deref(), human),
        Command::Selftest(args) => cmd_selftest(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("infoval: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<DecisionProblem, Failure> {
    ProblemDocument::from_json(&read(path)?)
        .and_then(|d| d.to_problem())
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_information(path: &Path) -> Result<infoval::InformationStructure, Failure> {
    InformationDocument::from_json(&read(path)?)
        .and_then(|d| d.to_structure())
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_pair(m: &Path, l: &Path) -> Result<(DecisionProblem, DecisionProblem), Failure> {
    let (m, l) = (load_problem(m)?, load_problem(l)?);
    m.check_same_states(&l)?;
    Ok((m, l))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("documents always serialize");
    std::fs::write(path, text + "\n")
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("documents always serialize")
    );
}

/// Exact rational, followed by a marked decimal hint when it is not an
/// integer.
fn show(value: &Rational) -> String {
    if value.is_integer() {
        rational::format(value)
    } else {
        format!(
            "{}  [≈ {}]",
            rational::format(value),
            rational::decimal_hint(value)
        )
    }
}

fn show_vec(values: &[Rational]) -> String {
    rational::VecDisplay(values).to_string()
}

fn show_problem(out: &mut String, p: &DecisionProblem) {
    for a in p.actions() {
        let _ = writeln!(out, "  {}: {}", a.label, show_vec(&a.utilities));
    }
}

#[derive(Serialize)]
struct EvalOutput {
    value: String,
    optimal_actions: Vec<String>,
}

fn cmd_eval(path: &Path, coords: &[String], human: bool) -> Outcome {
    let problem = load_problem(path)?;
    let coords = coords
        .iter()
        .enumerate()
        .map(|(i, x)| {
            rational::parse(x)
                .map_err(|_| Failure::input(format!("belief[{i}]: invalid rational {x:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != problem.state_count() {
        return Err(Failure::input(format!(
            "belief: expected {} coordinates (one per state), found {}",
            problem.state_count(),
            coords.len()
        )));
    }
    let belief = Belief::new(coords).map_err(|e| Failure::input(format!("belief: {e}")))?;
    let value = problem.evaluate(&belief)?;
    let optimal: Vec<String> = problem
        .optimal_actions(&belief)?
        .into_iter()
        .map(|i| problem.actions()[i].label.clone())
        .collect();
    if human {
        println!("value = {}", show(&value));
        println!("optimal actions: {}", optimal.join(", "));
    } else {
        print_json(&EvalOutput {
            value: rational::format(&value),
            optimal_actions: optimal,
        });
    }
    Ok(0)
}

fn cmd_voi(problem: &Path, information: &Path, human: bool) -> Outcome {
    let p = load_problem(problem)?;
    let q = load_information(information)?;
    let report = voi(&p, &q)?;
    if human {
        println!("prior = {}", show_vec(report.prior.coords()));
        println!(
            "expected posterior value = {}",
            show(&report.expected_posterior_value)
        );
        println!("prior value = {}", show(&report.prior_value));
        println!("voi = {}", show(&report.voi));
    } else {
        print_json(&report);
    }
    Ok(0)
}

#[derive(Serialize)]
struct CompareOutput {
    #[serde(flatten)]
    verdict: VerdictDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<CrossValidationReport>,
}

/// Re-verifies a verdict from scratch: the equality certificate by fresh LP
/// calls, a counterexample by enumeration, and for two states agreement
/// with the LP candidate method.
fn certify(
    m: &DecisionProblem,
    l: &DecisionProblem,
    verdict: &DominanceVerdict,
    method: Method,
) -> Result<(), Failure> {
    match verdict {
        DominanceVerdict::Dominates(d) => {
            if !d.certificate.holds() || !value_equal(&compose(l, &d.n)?, m)?.holds {
                return Err(Failure::inconsistent(
                    "decomposition certificate does not re-verify",
                ));
            }
        }
        DominanceVerdict::NotDominates(cx) => {
            let again = Counterexample::recompute(m, l, cx.q.clone())?;
            let brute = (brute_voi(m, &cx.q), brute_voi(l, &cx.q));
            if again != *cx || brute != (cx.voi_m.clone(), cx.voi_l.clone()) {
                return Err(Failure::inconsistent("counterexample does not re-verify"));
            }
        }
    }
    if method == Method::OneDimensional
        && decide_dominance(m, l)?.dominates() != verdict.dominates()
    {
        return Err(Failure::inconsistent(
            "1-D and LP candidate methods disagree",
        ));
    }
    Ok(())
}

fn render_verdict(verdict: &DominanceVerdict, method: Method) -> String {
    let mut out = String::new();
    match verdict {
        DominanceVerdict::Dominates(d) => {
            let _ = writeln!(
                out,
                "verdict: M values information more than L ({})",
                method.name()
            );
            let _ = writeln!(out, "parallel problem N with V_(L+N) = V_M:");
            show_problem(&mut out, &d.n);
            let _ = writeln!(
                out,
                "certificate: {}",
                if d.certificate.holds() {
                    "verified in both directions"
                } else {
                    "FAILED"
                }
            );
        }
        DominanceVerdict::NotDominates(cx) => {
            let _ = writeln!(
                out,
                "verdict: M does not value information more than L ({})",
                method.name()
            );
            let _ = writeln!(out, "counterexample Q:");
            for s in cx.q.support() {
                let _ = writeln!(
                    out,
                    "  weight {} at {}",
                    rational::format(&s.weight),
                    show_vec(s.posterior.coords())
                );
            }
            let _ = writeln!(out, "VoI_M(Q) = {}", show(&cx.voi_m));
            let _ = writeln!(out, "VoI_L(Q) = {}", show(&cx.voi_l));
            let _ = writeln!(out, "gap = {}", show(&cx.gap));
        }
    }
    out
}

fn cmd_compare(
    m_path: &Path,
    l_path: &Path,
    certify_flag: bool,
    oracle_samples: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    human: bool,
) -> Outcome {
    let (m, l) = load_pair(m_path, l_path)?;
    let (verdict, method) = decide(&m, &l)?;
    if certify_flag {
        certify(&m, &l, &verdict, method)?;
    }
    let oracle = match oracle_samples {
        Some(k) => Some(cross_validate(&m, &l, &verdict, k, seed)?),
        None => None,
    };
    if let Some(path) = out {
        match &verdict {
            DominanceVerdict::Dominates(d) => {
                write_json(path, &ProblemDocument::from_problem(&d.n))?
            }
            DominanceVerdict::NotDominates(cx) => {
                write_json(path, &InformationDocument::from_structure(&cx.q))?
            }
        }
    }
    if human {
        print!("{}", render_verdict(&verdict, method));
        if certify_flag {
            println!("all certificates re-verified");
        }
        if let Some(report) = &oracle {
            for c in &report.checks {
                println!(
                    "oracle {}: {} ({})",
                    if c.passed { "ok" } else { "FAILED" },
                    c.name,
                    c.detail
                );
            }
        }
    } else {
        print_json(&CompareOutput {
            verdict: VerdictDocument::from_verdict(&verdict, method.name()),
            certified: certify_flag.then_some(true),
            oracle: oracle.clone(),
        });
    }
    if let Some(report) = oracle.filter(|r| !r.consistent) {
        return Err(Failure::inconsistent(format!(
            "engine and oracle disagree on {}",
            report.offending_instance.unwrap_or_default()
        )));
    }
    Ok(if verdict.dominates() { 0 } else { 1 })
}

fn cmd_decompose(m_path: &Path, l_path: &Path, out: Option<&Path>, human: bool) -> Outcome {
    let (m, l) = load_pair(m_path, l_path)?;
    let (verdict, _) = decide(&m, &l)?;
    let d = match verdict {
        DominanceVerdict::Dominates(d) => d,
        DominanceVerdict::NotDominates(cx) => {
            eprintln!(
                "infoval: M does not value information more than L (gap {} on a two-point structure); nothing written",
                rational::format(&cx.gap)
            );
            return Ok(1);
        }
    };
    if !value_equal(&compose(&l, &d.n)?, &m)?.holds {
        return Err(Failure::inconsistent("decomposition does not round-trip"));
    }
    emit_problem(&d.n, out, human)
}

fn cmd_prune(path: &Path, out: Option<&Path>, human: bool) -> Outcome {
    let problem = load_problem(path)?;
    let pruned = prune(&problem)?;
    if !value_equal(&pruned, &problem)?.holds {
        return Err(Failure::inconsistent(
            "pruned problem changed the value function",
        ));
    }
    emit_problem(&pruned, out, human)
}

fn emit_problem(p: &DecisionProblem, out: Option<&Path>, human: bool) -> Outcome {
    let doc = ProblemDocument::from_problem(p);
    match out {
        Some(path) => write_json(path, &doc)?,
        None if human => {
            let mut text = String::new();
            show_problem(&mut text, p);
            print!("{text}");
        }
        None => print_json(&doc),
    }
    Ok(0)
}

fn cmd_selftest(args: &SelftestArgs) -> Outcome {
    let config = SuiteConfig {
        seed: args.seed,
        trials: (!args.full).then_some(args.trials),
        inject_fault: args.inject_fault,
    };
    let reports = run_all(&config);
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        if let Some(detail) = &r.first_failure {
            println!("criterion {} offending instance: {detail}", r.criterion);
        }
    }
    println!(
        "selftest seed {}: {}/{} suites passed",
        args.seed,
        reports.len() - failed.len(),
        reports.len()
    );
    Ok(if failed.is_empty() { 0 } else { 1 })
}
