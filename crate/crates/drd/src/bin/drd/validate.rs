//! `drd validate`: sweep the oracle checks over seeded random instances and
//! report counterexamples for replay.

use std::ops::Range;

use clap::Args;
use num::BigRational;

use drd::{
    check_adaptive_properties, check_theorem1, check_theorem3, check_weight_equivalence,
    random_instance, Mass, OracleReport, SubregionIndex,
};

use crate::{ArithMode, CmdError};

#[derive(Args)]
pub struct ValidateArgs {
    /// Instance seed range, "start..end" or a single seed.
    #[arg(long, default_value = "0..100")]
    seeds: String,
    /// Reduced per-instance work for a fast smoke pass.
    #[arg(long)]
    quick: bool,
    /// Hyperedge cardinality override, screened against every sampled
    /// instance before any check runs.
    #[arg(long)]
    k: Option<usize>,
    /// Scalar arithmetic for the weight-sensitive checks.
    #[arg(long, value_enum, default_value_t = ArithMode::Float)]
    arith: ArithMode,
}

fn parse_seeds(text: &str) -> Result<Range<u64>, CmdError> {
    let bad = || CmdError::usage(format!("--seeds expects \"start..end\" or one seed, got {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let start: u64 = a.trim().parse().map_err(|_| bad())?;
        let end: u64 = b.trim().parse().map_err(|_| bad())?;
        if start >= end {
            return Err(CmdError::usage(format!("--seeds range {text:?} is empty")));
        }
        Ok(start..end)
    } else {
        let seed: u64 = text.trim().parse().map_err(|_| bad())?;
        Ok(seed..seed + 1)
    }
}

fn suite<M: Mass>(
    seeds: Range<u64>,
    walks: usize,
    chains: usize,
    states: usize,
) -> Vec<(&'static str, OracleReport)> {
    vec![
        (
            "solved iff every edge cut",
            check_theorem1(seeds.clone(), walks),
        ),
        (
            "adaptive monotone submodular",
            check_adaptive_properties::<M>(seeds.clone(), chains),
        ),
        ("greedy cost bound", check_theorem3(seeds.clone())),
        (
            "weight oracle equivalence",
            check_weight_equivalence::<M>(seeds, states),
        ),
    ]
}

pub fn cmd_validate(args: ValidateArgs, quiet: bool) -> Result<(), CmdError> {
    let seeds = parse_seeds(&args.seeds)?;
    if let Some(k) = args.k {
        // An override below some sampled instance's formula value is a flag
        // mistake; reject it before spending time on the sweep.
        for seed in seeds.clone() {
            SubregionIndex::build_with_k(&random_instance(seed), k)?;
        }
    }
    let (walks, chains, states) = if args.quick { (5, 5, 2) } else { (20, 50, 3) };

    let reports = match args.arith {
        ArithMode::Float => suite::<f64>(seeds, walks, chains, states),
        ArithMode::Rational => suite::<BigRational>(seeds, walks, chains, states),
    };

    let mut failures = 0usize;
    for (name, report) in &reports {
        println!("{name}: {report}");
        for counterexample in &report.counterexamples {
            failures += 1;
            println!("  {counterexample}");
        }
    }
    if failures > 0 {
        return Err(CmdError::failure(format!(
            "{failures} counterexample(s); rerun the printed seeds to replay"
        )));
    }
    if !quiet {
        println!("all checks passed");
    }
    Ok(())
}
