//! `drd interactive`: a terminal session where a person plays the oracle,
//! answering the greedily selected tests until a region is decided.

use std::io::BufRead;
use std::path::PathBuf;

use clap::Args;
use num::BigRational;

use drd::weights::total_edge_mass;
use drd::{
    apply_test, consistent_hypotheses, is_solved, objective_f, select_test_greedy, CoverageMode,
    DocumentMetadata, Evidence, Mass, OutcomeId, ProblemInstance, SubregionIndex, TestId,
};

use crate::{ArithMode, CmdError};

#[derive(Args)]
pub struct InteractiveArgs {
    /// Instance file to load.
    instance: PathBuf,
    /// Coverage handling; defaults to the instance's declared mode.
    #[arg(long)]
    coverage: Option<CoverageMode>,
    /// Hyperedge cardinality override (at least the formula value).
    #[arg(long)]
    k: Option<usize>,
    /// Scalar arithmetic for weight computation.
    #[arg(long, value_enum, default_value_t = ArithMode::Float)]
    arith: ArithMode,
}

pub fn cmd_interactive(args: InteractiveArgs, quiet: bool) -> Result<(), CmdError> {
    let doc = drd::load_instance(&args.instance)?;
    let coverage = args
        .coverage
        .or_else(|| doc.coverage_hint())
        .unwrap_or(CoverageMode::Strict);
    let (instance, report) = doc.instantiate(coverage)?;
    if !quiet {
        for warning in &report.warnings {
            eprintln!("warning: {warning}");
        }
    }
    let index = match args.k {
        Some(k) => SubregionIndex::build_with_k(&instance, k)?,
        None => SubregionIndex::build(&instance),
    };
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    match args.arith {
        ArithMode::Float => session::<f64>(&instance, &index, &doc.metadata, &mut lines),
        ArithMode::Rational => session::<BigRational>(&instance, &index, &doc.metadata, &mut lines),
    }
}

fn prompt(instance: &ProblemInstance, metadata: &DocumentMetadata, test: TestId) {
    let label = metadata
        .test_labels
        .as_ref()
        .and_then(|labels| labels.get(test.index()));
    match label {
        Some(label) => println!("Q: test {test} ({label})"),
        None => println!("Q: test {test}"),
    }
    let per_test = metadata
        .outcome_labels
        .as_ref()
        .and_then(|labels| labels.get(test.index()));
    let answers: Vec<String> = (0..instance.arity(test))
        .map(|o| match per_test.and_then(|labels| labels.get(o as usize)) {
            Some(label) => format!("{o} ({label})"),
            None => o.to_string(),
        })
        .collect();
    println!("  answers: {} | undo | status | quit", answers.join(", "));
}

fn print_status<M: Mass>(
    instance: &ProblemInstance,
    index: &SubregionIndex,
    evidence: &Evidence,
    w_total: f64,
) -> Result<(), CmdError> {
    let version = consistent_hypotheses(instance, evidence)?;
    let cut = objective_f::<M>(instance, evidence, index)?.to_f64();
    println!(
        "status: {} hypothesis(es) remain, mass {:.6}, edge mass cut {:.6} of {:.6}",
        version.len(),
        version.total_mass(),
        cut,
        w_total,
    );
    Ok(())
}

/// Apply one answer without committing: contradictions and malformed
/// outcomes come back as a message for the prompt loop.
fn try_answer(
    instance: &ProblemInstance,
    evidence: &Evidence,
    test: TestId,
    outcome: OutcomeId,
) -> Result<Evidence, String> {
    let candidate = apply_test(instance, evidence, test, outcome).map_err(|e| e.to_string())?;
    match consistent_hypotheses(instance, &candidate) {
        Ok(_) => Ok(candidate),
        Err(drd::Error::ContradictoryEvidence) => Err(
            "that answer contradicts every remaining hypothesis; answer again, or undo an earlier answer"
                .into(),
        ),
        Err(e) => Err(e.to_string()),
    }
}

fn session<M: Mass>(
    instance: &ProblemInstance,
    index: &SubregionIndex,
    metadata: &DocumentMetadata,
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
) -> Result<(), CmdError> {
    let w_total = total_edge_mass::<M>(instance, index)?.to_f64();
    let mut evidence = Evidence::empty();
    loop {
        if let Some(region) = is_solved(instance, &evidence)? {
            println!(
                "SOLVED: region {region} after {} question(s)",
                evidence.len()
            );
            return Ok(());
        }
        let test = match select_test_greedy::<M>(instance, &evidence, index, None)? {
            Some(test) => test,
            // The selection rule reports an undecidable state as an error,
            // so a quiet None here would be a bug in it.
            None => return Err(CmdError::failure("selection stopped with the problem undecided")),
        };
        prompt(instance, metadata, test);
        loop {
            let Some(line) = lines.next() else {
                // Scripted input ran out; leave quietly like `quit`.
                return Ok(());
            };
            let line = line.map_err(drd::Error::from)?;
            match line.trim() {
                "" => continue,
                "quit" => return Ok(()),
                "status" => {
                    print_status::<M>(instance, index, &evidence, w_total)?;
                    continue;
                }
                "undo" => match evidence.undo() {
                    Some(previous) => {
                        evidence = previous;
                        break;
                    }
                    None => {
                        println!("nothing to undo");
                        continue;
                    }
                },
                word => {
                    let Ok(outcome) = word.parse::<u32>() else {
                        println!("answer with an outcome id, undo, status, or quit");
                        continue;
                    };
                    match try_answer(instance, &evidence, test, OutcomeId(outcome)) {
                        Ok(next) => {
                            evidence = next;
                            break;
                        }
                        Err(message) => {
                            println!("{message}");
                            continue;
                        }
                    }
                }
            }
        }
    }
}
