//! `drd run`: execute policies against an instance, write the results CSV,
//! and print per-policy summaries.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use num::BigRational;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use drd::{
    expected_cost, make_baseline_with_index, CoverageMode, HypothesisId, Mass, PolicyKind,
    PolicyRunner, PreparedPolicy, ProblemInstance, ResultRow, SubregionIndex,
};

use crate::{ArithMode, CmdError};

#[derive(Args)]
pub struct RunArgs {
    /// Instance file to load.
    instance: PathBuf,
    /// Comma-separated policies: hec, gbs, gbs-hec, ec2, ec2-hec, voi.
    #[arg(long, value_delimiter = ',', default_value = "hec")]
    policies: Vec<PolicyKind>,
    /// Ground truths to sample from the prior.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Seeds truth sampling and the EC2 region assignment.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run every hypothesis as ground truth instead of sampling, and print
    /// exact expected costs.
    #[arg(long)]
    exhaustive: bool,
    /// Scalar arithmetic for weight computation.
    #[arg(long, value_enum, default_value_t = ArithMode::Float)]
    arith: ArithMode,
    /// Coverage handling; defaults to the instance's declared mode.
    #[arg(long)]
    coverage: Option<CoverageMode>,
    /// Hyperedge cardinality override (at least the formula value).
    #[arg(long)]
    k: Option<usize>,
    /// Record wall-clock milliseconds per row (off by default so output is
    /// byte-reproducible).
    #[arg(long)]
    timing: bool,
    /// Results CSV path.
    #[arg(short, long, default_value = "results.csv")]
    output: PathBuf,
}

pub fn cmd_run(args: RunArgs, quiet: bool) -> Result<(), CmdError> {
    if args.trials == 0 {
        return Err(CmdError::usage("--trials must be at least 1"));
    }
    if args.policies.is_empty() {
        return Err(CmdError::usage("--policies must name at least one policy"));
    }
    match args.arith {
        ArithMode::Float => run_generic::<f64>(args, quiet),
        ArithMode::Rational => run_generic::<BigRational>(args, quiet),
    }
}

fn load(args: &RunArgs, quiet: bool) -> Result<(Arc<ProblemInstance>, String), CmdError> {
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
    Ok((Arc::new(instance), doc.instance_id()))
}

fn run_generic<M: Mass>(args: RunArgs, quiet: bool) -> Result<(), CmdError> {
    let (instance, instance_id) = load(&args, quiet)?;
    let index = match args.k {
        Some(k) => Arc::new(SubregionIndex::build_with_k(&instance, k)?),
        None => Arc::new(SubregionIndex::build(&instance)),
    };

    let prepared: Vec<PreparedPolicy> = args
        .policies
        .iter()
        .map(|&kind| make_baseline_with_index(kind, &instance, args.seed, index.clone()))
        .collect::<Result<_, _>>()?;

    let mut rows: Vec<ResultRow> = Vec::new();
    let mut summaries: Vec<String> = Vec::new();

    if args.exhaustive {
        exhaustive_runs::<M>(&args, &instance, &instance_id, &prepared, &mut rows, &mut summaries)?;
    } else {
        sampled_runs::<M>(&args, &instance, &instance_id, &prepared, &mut rows, &mut summaries)?;
    }

    let file = std::fs::File::create(&args.output).map_err(drd::Error::from)?;
    drd::write_results(&rows, std::io::BufWriter::new(file))?;
    for line in &summaries {
        println!("{line}");
    }
    if !quiet {
        println!("wrote {} rows to {}", rows.len(), args.output.display());
    }
    Ok(())
}

fn row_for(
    instance_id: &str,
    args: &RunArgs,
    prep: &PreparedPolicy,
    instance: &ProblemInstance,
    queries: usize,
    solved: bool,
    wall_ms: u64,
) -> ResultRow {
    ResultRow {
        instance_id: instance_id.to_string(),
        seed: args.seed,
        policy: prep.policy().kind,
        k: prep.selection_k(),
        num_regions: instance.num_regions(),
        queries,
        solved,
        wall_ms,
    }
}

/// One row per (hypothesis, policy), hypothesis-major, plus the exact
/// prior-weighted expected cost per policy.
fn exhaustive_runs<M: Mass>(
    args: &RunArgs,
    instance: &Arc<ProblemInstance>,
    instance_id: &str,
    prepared: &[PreparedPolicy],
    rows: &mut Vec<ResultRow>,
    summaries: &mut Vec<String>,
) -> Result<(), CmdError> {
    let mut runners: Vec<PolicyRunner<M>> = prepared
        .iter()
        .map(PolicyRunner::new)
        .collect::<Result<_, _>>()?;
    let mut stalls = vec![0usize; prepared.len()];
    let mut grid: Vec<Vec<ResultRow>> = vec![Vec::new(); instance.num_hypotheses()];
    for (p, runner) in runners.iter_mut().enumerate() {
        for h in 0..instance.num_hypotheses() {
            let start = Instant::now();
            let trace = runner.run(HypothesisId(h as u32))?;
            let wall_ms = if args.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            if !trace.solved() {
                stalls[p] += 1;
            }
            grid[h].push(row_for(
                instance_id,
                args,
                &prepared[p],
                instance,
                trace.cost(),
                trace.solved(),
                wall_ms,
            ));
        }
    }
    for per_hypothesis in grid {
        rows.extend(per_hypothesis);
    }
    for (p, prep) in prepared.iter().enumerate() {
        let kind = prep.policy().kind;
        if stalls[p] == 0 {
            let eval = expected_cost::<M>(prep)?;
            summaries.push(format!("{kind}: expected cost {}", eval.expected_cost));
        } else {
            eprintln!(
                "warning: policy {kind} cannot decide {} of {} hypotheses",
                stalls[p],
                instance.num_hypotheses()
            );
            summaries.push(format!("{kind}: expected cost n/a (infeasible truths)"));
        }
    }
    Ok(())
}

/// One row per (trial, policy), trial-major, truths sampled from the prior.
fn sampled_runs<M: Mass>(
    args: &RunArgs,
    instance: &Arc<ProblemInstance>,
    instance_id: &str,
    prepared: &[PreparedPolicy],
    rows: &mut Vec<ResultRow>,
    summaries: &mut Vec<String>,
) -> Result<(), CmdError> {
    let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
    let weights = WeightedIndex::new(instance.priors().iter().copied())
        .map_err(|e| CmdError::failure(format!("prior is not sampleable: {e}")))?;
    let truths: Vec<HypothesisId> = (0..args.trials)
        .map(|_| HypothesisId(weights.sample(&mut rng) as u32))
        .collect();

    let mut runners: Vec<PolicyRunner<M>> = prepared
        .iter()
        .map(PolicyRunner::new)
        .collect::<Result<_, _>>()?;

    let mut totals = vec![0usize; prepared.len()];
    let mut stalls = vec![0usize; prepared.len()];
    let mut grid: Vec<Vec<ResultRow>> = vec![Vec::new(); truths.len()];
    for (p, runner) in runners.iter_mut().enumerate() {
        for (trial, &truth) in truths.iter().enumerate() {
            let start = Instant::now();
            let trace = runner.run(truth)?;
            let wall_ms = if args.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            if !trace.solved() {
                stalls[p] += 1;
                eprintln!(
                    "warning: policy {} cannot decide truth {truth}; recording solved=false",
                    prepared[p].policy().kind
                );
            }
            totals[p] += trace.cost();
            grid[trial].push(row_for(
                instance_id,
                args,
                &prepared[p],
                instance,
                trace.cost(),
                trace.solved(),
                wall_ms,
            ));
        }
    }
    for per_trial in grid {
        rows.extend(per_trial);
    }
    for (p, prep) in prepared.iter().enumerate() {
        summaries.push(format!(
            "{}: mean queries {} over {} trials",
            prep.policy().kind,
            totals[p] as f64 / args.trials as f64,
            args.trials
        ));
    }
    Ok(())
}
