//! `drd generate`: synthetic instance files plus a one-line summary.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use drd::hypergraph::SubregionIndex;
use drd::{ClusteredParams, CoverageMode, InstanceDocument, LocalizationParams};

use crate::CmdError;

#[derive(Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Subcommand)]
enum Family {
    /// Points in Euclidean space, clustered; tests compare two points.
    Clustered(ClusteredArgs),
    /// Planar poses with disc decisions and quantized line probes.
    Localization2d(LocalizationArgs),
}

#[derive(Args)]
struct ClusteredArgs {
    /// Number of points (hypotheses).
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Embedding dimension (ignored with --embeddings).
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Cluster count (one region per cluster).
    #[arg(long, default_value_t = 12)]
    clusters: usize,
    /// Each point joins its alpha nearest clusters' regions.
    #[arg(long, default_value_t = 2)]
    alpha: usize,
    /// Comparison tests to sample (default: min(4·points, all pairs)).
    #[arg(long)]
    tests: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV of precomputed embeddings (header id,x0,…) replacing the
    /// synthetic mixture.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Instance file to write.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct LocalizationArgs {
    /// Number of pose hypotheses.
    #[arg(long, default_value_t = 500)]
    hypotheses: usize,
    /// Pose standard deviation per axis.
    #[arg(long, default_value_t = 0.2)]
    sigma: f64,
    /// Number of disc decision regions.
    #[arg(long, default_value_t = 20)]
    decisions: usize,
    /// Disc radius.
    #[arg(long, default_value_t = 0.15)]
    radius: f64,
    /// Number of guarded-move tests.
    #[arg(long, default_value_t = 60)]
    moves: usize,
    /// Outcome bins per guarded move.
    #[arg(long, default_value_t = 4)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance file to write.
    #[arg(short, long)]
    output: PathBuf,
}

pub fn cmd_generate(args: GenerateArgs, quiet: bool) -> Result<(), CmdError> {
    let (doc, output) = match args.family {
        Family::Clustered(a) => {
            let params = ClusteredParams {
                num_points: a.points,
                dim: a.dim,
                num_clusters: a.clusters,
                assign_alpha: a.alpha,
                num_tests: a.tests,
                seed: a.seed,
            };
            let doc = match &a.embeddings {
                Some(path) => {
                    let points = drd::load_embeddings(path)?;
                    drd::generate_clustered_from_embeddings(&params, &points)?
                }
                None => drd::generate_clustered(&params)?,
            };
            (doc, a.output)
        }
        Family::Localization2d(a) => {
            let params = LocalizationParams {
                num_hypotheses: a.hypotheses,
                gaussian_sigma: a.sigma,
                num_decisions: a.decisions,
                decision_radius: a.radius,
                num_guarded_moves: a.moves,
                num_bins: a.bins,
                seed: a.seed,
            };
            (drd::generate_localization_2d(&params)?, a.output)
        }
    };

    drd::save_instance(&doc, &output)?;
    if !quiet {
        println!("{}", summary(&doc)?);
        println!("wrote {}", output.display());
    }
    Ok(())
}

/// |H|, |T|, |R|, |G|, and k for a freshly generated document.
fn summary(doc: &InstanceDocument) -> Result<String, CmdError> {
    let coverage = doc.coverage_hint().unwrap_or(CoverageMode::Strict);
    let (instance, _) = doc.instantiate(coverage)?;
    let index = SubregionIndex::build(&instance);
    Ok(format!(
        "{}: {} hypotheses, {} tests, {} regions, {} subregions, k={}",
        doc.instance_id(),
        instance.num_hypotheses(),
        instance.num_tests(),
        instance.num_regions(),
        index.num_subregions(),
        index.k()
    ))
}
