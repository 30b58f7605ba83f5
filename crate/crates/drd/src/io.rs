//! Instance files, result tables, and synthetic instance generators.
//!
//! Instances travel as JSON documents with a mandatory `schema_version`,
//! stable key order, and dense ids; loading re-validates everything.
//! Two generator families produce experiment instances: `clustered` embeds
//! points in Euclidean space, clusters them, and asks comparison questions
//! ("which of these two points is closer?"), while `localization2d` places
//! Gaussian-distributed poses in the plane, decisions as discs, and tests as
//! quantized line probes. Both are pure functions of their parameters.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CoverageMode, InstanceParts, ProblemInstance, ValidationReport};
use crate::policies::PolicyKind;

/// The only instance-file schema this build reads.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEntry {
    pub id: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub id: u32,
    pub arity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEntry {
    pub id: u32,
    pub hypothesis_ids: Vec<u32>,
}

/// Optional provenance and presentation data. Everything here is advisory;
/// solvers never read it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DocumentMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    /// Intended coverage mode ("strict" or "wrap"); loaders honor it unless
    /// overridden.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_id: Option<String>,
    /// Human-readable test names for interactive sessions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_labels: Option<Vec<String>>,
    /// Human-readable outcome names per test, same shape as the arity list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_labels: Option<Vec<Vec<String>>>,
}

impl DocumentMetadata {
    fn is_empty(&self) -> bool {
        self == &DocumentMetadata::default()
    }
}

/// An instance as it appears on disk. Ids are dense (`entries[i].id == i`);
/// the document refuses to convert otherwise, keeping files and in-memory
/// indexes aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub schema_version: u32,
    pub hypotheses: Vec<HypothesisEntry>,
    pub tests: Vec<TestEntry>,
    /// Row-major: `outcomes[h][t]`.
    pub outcomes: Vec<Vec<u32>>,
    pub regions: Vec<RegionEntry>,
    #[serde(default, skip_serializing_if = "DocumentMetadata::is_empty")]
    pub metadata: DocumentMetadata,
}

impl InstanceDocument {
    pub fn from_parts(parts: &InstanceParts, metadata: DocumentMetadata) -> Self {
        InstanceDocument {
            schema_version: SCHEMA_VERSION,
            hypotheses: parts
                .weights
                .iter()
                .enumerate()
                .map(|(id, &weight)| HypothesisEntry {
                    id: id as u32,
                    weight,
                })
                .collect(),
            tests: parts
                .arities
                .iter()
                .enumerate()
                .map(|(id, &arity)| TestEntry {
                    id: id as u32,
                    arity,
                })
                .collect(),
            outcomes: parts.outcomes.clone(),
            regions: parts
                .regions
                .iter()
                .enumerate()
                .map(|(id, members)| RegionEntry {
                    id: id as u32,
                    hypothesis_ids: members.clone(),
                })
                .collect(),
            metadata,
        }
    }

    /// Strip the document down to raw parts, enforcing dense ids.
    pub fn to_parts(&self) -> Result<InstanceParts> {
        let mut errors = Vec::new();
        for (i, h) in self.hypotheses.iter().enumerate() {
            if h.id as usize != i {
                errors.push(format!("hypothesis at position {i} has id {}", h.id));
            }
        }
        for (i, t) in self.tests.iter().enumerate() {
            if t.id as usize != i {
                errors.push(format!("test at position {i} has id {}", t.id));
            }
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.id as usize != i {
                errors.push(format!("region at position {i} has id {}", r.id));
            }
        }
        if !errors.is_empty() {
            return Err(Error::InvalidInstance { errors });
        }
        Ok(InstanceParts {
            weights: self.hypotheses.iter().map(|h| h.weight).collect(),
            arities: self.tests.iter().map(|t| t.arity).collect(),
            outcomes: self.outcomes.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| r.hypothesis_ids.clone())
                .collect(),
        })
    }

    /// The coverage mode the document declares for itself, when valid.
    pub fn coverage_hint(&self) -> Option<CoverageMode> {
        self.metadata
            .coverage
            .as_deref()
            .and_then(|s| s.parse().ok())
    }

    /// Validate and build the runnable instance.
    pub fn instantiate(
        &self,
        coverage: CoverageMode,
    ) -> Result<(ProblemInstance, ValidationReport)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                got: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        ProblemInstance::from_parts(self.to_parts()?, coverage)
    }

    /// A stable identifier for result tables: the declared one, or a hash of
    /// the document's content.
    pub fn instance_id(&self) -> String {
        if let Some(id) = &self.metadata.instance_id {
            return id.clone();
        }
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in render_instance_document(self).bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("instance-{hash:016x}")
    }
}

/// The canonical byte rendering: pretty JSON, stable key order, trailing
/// newline. Loading and re-rendering a rendered document is the identity.
pub fn render_instance_document(doc: &InstanceDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}

/// Parse a document, reporting malformed input with line, column, and byte
/// offset, and refusing unknown schema versions.
pub fn parse_instance_document(text: &str) -> Result<InstanceDocument> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    if let Some(v) = value.get("schema_version").and_then(|v| v.as_u64()) {
        if v != SCHEMA_VERSION as u64 {
            return Err(Error::SchemaVersion {
                got: v as u32,
                expected: SCHEMA_VERSION,
            });
        }
    }
    serde_json::from_value(value).map_err(|e| parse_error(text, e))
}

fn parse_error(text: &str, e: serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = text
        .lines()
        .take(line.saturating_sub(1))
        .map(|l| l.len() + 1)
        .sum::<usize>()
        + column.saturating_sub(1);
    Error::Parse {
        offset,
        line,
        column,
        message: e.to_string(),
    }
}

/// Write the canonical rendering to a file.
pub fn save_instance(doc: &InstanceDocument, path: &Path) -> Result<()> {
    std::fs::write(path, render_instance_document(doc))?;
    Ok(())
}

/// Read and parse an instance file. Validation happens at
/// [`InstanceDocument::instantiate`], once a coverage mode is chosen.
pub fn load_instance(path: &Path) -> Result<InstanceDocument> {
    let text = std::fs::read_to_string(path)?;
    parse_instance_document(&text)
}

/// One line of a result table: a single policy run on a single instance.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub instance_id: String,
    pub seed: u64,
    pub policy: PolicyKind,
    /// Hyperedge cardinality driving the policy's selection.
    pub k: usize,
    pub num_regions: usize,
    pub queries: usize,
    pub solved: bool,
    /// Wall-clock milliseconds; zero unless timing was requested, keeping
    /// default output byte-reproducible.
    pub wall_ms: u64,
}

/// Header line of every results table.
pub const RESULTS_HEADER: &str = "instance_id,seed,policy,k,num_regions,queries,solved,wall_ms";

/// Write rows as CSV in the order given, after the fixed header.
pub fn write_results<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "result table needs at least one row",
        )));
    }
    writeln!(out, "{RESULTS_HEADER}")?;
    for row in rows {
        if row.instance_id.contains([',', '\n', '\r']) {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("instance id {:?} cannot appear in CSV", row.instance_id),
            )));
        }
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.instance_id,
            row.seed,
            row.policy,
            row.k,
            row.num_regions,
            row.queries,
            row.solved,
            row.wall_ms
        )?;
    }
    Ok(())
}

/// Embeddings CSV: header `id,x0,…,x{d-1}`, one dense-id row per point.
pub fn parse_embeddings(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        offset: 0,
        line: 1,
        column: 1,
        message: "empty embeddings file".into(),
    })?;
    let fields: Vec<&str> = header.split(',').collect();
    let dim = fields.len().saturating_sub(1);
    let mut header_ok = fields.first() == Some(&"id") && dim >= 1;
    for (i, f) in fields.iter().skip(1).enumerate() {
        if *f != format!("x{i}") {
            header_ok = false;
        }
    }
    if !header_ok {
        return Err(Error::Parse {
            offset: 0,
            line: 1,
            column: 1,
            message: format!("embeddings header must be id,x0,…,x{{d-1}}, got {header:?}"),
        });
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != dim + 1 {
            return Err(Error::Parse {
                offset: 0,
                line: line_no,
                column: 1,
                message: format!("expected {} fields, got {}", dim + 1, cells.len()),
            });
        }
        let id: usize = cells[0].trim().parse().map_err(|_| Error::Parse {
            offset: 0,
            line: line_no,
            column: 1,
            message: format!("bad id {:?}", cells[0]),
        })?;
        if id != points.len() {
            return Err(Error::Parse {
                offset: 0,
                line: line_no,
                column: 1,
                message: format!("ids must be dense and ascending; expected {}", points.len()),
            });
        }
        let mut point = Vec::with_capacity(dim);
        for (c, cell) in cells[1..].iter().enumerate() {
            point.push(cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                offset: 0,
                line: line_no,
                column: c + 2,
                message: format!("bad coordinate {cell:?}"),
            })?);
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            offset: 0,
            line: 1,
            column: 1,
            message: "embeddings file has a header but no points".into(),
        });
    }
    Ok(points)
}

/// Load an embeddings CSV from disk.
pub fn load_embeddings(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    parse_embeddings(&text)
}

/// Parameters for the clustered comparison-question family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteredParams {
    pub num_points: usize,
    pub dim: usize,
    pub num_clusters: usize,
    /// Each point joins the regions of its `assign_alpha` nearest centroids.
    pub assign_alpha: usize,
    /// Comparison pairs to sample; defaults to min(4·points, all pairs).
    pub num_tests: Option<usize>,
    pub seed: u64,
}

impl Default for ClusteredParams {
    fn default() -> Self {
        ClusteredParams {
            num_points: 200,
            dim: 8,
            num_clusters: 12,
            assign_alpha: 2,
            num_tests: None,
            seed: 0,
        }
    }
}

/// Parameters for the planar localization family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalizationParams {
    pub num_hypotheses: usize,
    /// Pose standard deviation per axis (0.2 gives per-axis variance 0.04).
    pub gaussian_sigma: f64,
    pub num_decisions: usize,
    pub decision_radius: f64,
    pub num_guarded_moves: usize,
    /// Contact readings are quantized into this many distance bins.
    pub num_bins: usize,
    pub seed: u64,
}

impl Default for LocalizationParams {
    fn default() -> Self {
        LocalizationParams {
            num_hypotheses: 500,
            gaussian_sigma: 0.2,
            num_decisions: 20,
            decision_radius: 0.15,
            num_guarded_moves: 60,
            num_bins: 4,
            seed: 0,
        }
    }
}

fn params_error(errors: Vec<String>) -> Error {
    Error::InvalidInstance { errors }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Deterministic Lloyd clustering: farthest-point seeded, exactly 25
/// iterations, empty clusters re-seeded from the worst-fit point.
fn lloyd_clustering(points: &[Vec<f64>], num_clusters: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(num_clusters);
    centroids.push(points[rng.gen_range(0..points.len())].clone());
    while centroids.len() < num_clusters {
        let (mut best, mut best_d) = (0, -1.0);
        for (i, p) in points.iter().enumerate() {
            let d = centroids
                .iter()
                .map(|c| dist2(p, c))
                .fold(f64::INFINITY, f64::min);
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        centroids.push(points[best].clone());
    }

    let mut assignment = vec![0usize; points.len()];
    for _ in 0..25 {
        for (i, p) in points.iter().enumerate() {
            let mut nearest = 0;
            let mut nearest_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = dist2(p, centroid);
                if d < nearest_d {
                    nearest_d = d;
                    nearest = c;
                }
            }
            assignment[i] = nearest;
        }
        let mut sums = vec![vec![0.0; dim]; num_clusters];
        let mut counts = vec![0usize; num_clusters];
        for (i, p) in points.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (s, x) in sums[assignment[i]].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut reseeded: HashSet<usize> = HashSet::new();
        for c in 0..num_clusters {
            if counts[c] == 0 {
                // Move this centroid onto the point that fits its current
                // cluster worst, skipping points already taken this round.
                let (mut worst, mut worst_d) = (usize::MAX, -1.0);
                for (i, p) in points.iter().enumerate() {
                    if reseeded.contains(&i) {
                        continue;
                    }
                    let d = dist2(p, &centroids[assignment[i]]);
                    if d > worst_d {
                        worst_d = d;
                        worst = i;
                    }
                }
                centroids[c] = points[worst].clone();
                reseeded.insert(worst);
            } else {
                for (x, s) in centroids[c].iter_mut().zip(&sums[c]) {
                    *x = s / counts[c] as f64;
                }
            }
        }
    }
    centroids
}

fn clustered_document(
    params: &ClusteredParams,
    points: &[Vec<f64>],
    rng: &mut ChaCha20Rng,
) -> Result<InstanceDocument> {
    let n = points.len();
    let num_clusters = params.num_clusters;
    let alpha = params.assign_alpha;

    let centroids = lloyd_clustering(points, num_clusters, rng);

    // Regions: point h joins the regions of its alpha nearest centroids
    // (ties to the lower centroid id).
    let mut regions: Vec<Vec<u32>> = vec![Vec::new(); num_clusters];
    for (h, p) in points.iter().enumerate() {
        let mut by_distance: Vec<usize> = (0..num_clusters).collect();
        by_distance.sort_by(|&a, &b| {
            dist2(p, &centroids[a])
                .partial_cmp(&dist2(p, &centroids[b]))
                .expect("distances are finite")
                .then(a.cmp(&b))
        });
        for &c in by_distance.iter().take(alpha) {
            regions[c].push(h as u32);
        }
    }
    regions.retain(|r| !r.is_empty());

    // Tests: distinct unordered point pairs, in sampling order.
    let all_pairs = n * (n - 1) / 2;
    let num_tests = params.num_tests.unwrap_or_else(|| (4 * n).min(all_pairs));
    if num_tests > all_pairs {
        return Err(params_error(vec![format!(
            "{num_tests} comparison tests requested but only {all_pairs} distinct pairs exist"
        )]));
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(num_tests);
    while pairs.len() < num_tests {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let pair = (i.min(j), i.max(j));
        if seen.insert(pair) {
            pairs.push(pair);
        }
    }

    let outcomes: Vec<Vec<u32>> = points
        .iter()
        .map(|p| {
            pairs
                .iter()
                .map(|&(a, b)| u32::from(dist2(p, &points[a]) > dist2(p, &points[b])))
                .collect()
        })
        .collect();

    let parts = InstanceParts {
        weights: vec![1.0; n],
        arities: vec![2; pairs.len()],
        outcomes,
        regions,
    };
    let metadata = DocumentMetadata {
        generator: Some("clustered".into()),
        seed: Some(params.seed),
        params: Some(serde_json::to_value(params).expect("params serialize")),
        coverage: Some(CoverageMode::Strict.as_str().into()),
        instance_id: Some(format!("clustered-{}", params.seed)),
        ..DocumentMetadata::default()
    };
    Ok(InstanceDocument::from_parts(&parts, metadata))
}

fn validate_clustered(params: &ClusteredParams, num_points: usize, dim: usize) -> Result<()> {
    let mut errors = Vec::new();
    if num_points < 2 {
        errors.push("need at least 2 points".into());
    }
    if dim == 0 {
        errors.push("dimension must be at least 1".into());
    }
    if params.num_clusters == 0 {
        errors.push("need at least 1 cluster".into());
    }
    if params.num_clusters > num_points {
        errors.push(format!(
            "{} clusters cannot be seeded from {} points",
            params.num_clusters, num_points
        ));
    }
    if params.assign_alpha == 0 {
        errors.push("assign_alpha must be at least 1".into());
    }
    if params.assign_alpha > params.num_clusters {
        errors.push(format!(
            "assign_alpha {} exceeds the {} clusters",
            params.assign_alpha, params.num_clusters
        ));
    }
    if params.num_tests == Some(0) {
        errors.push("need at least 1 test".into());
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(params_error(errors))
    }
}

/// Generate a clustered comparison instance on synthetic mixture points:
/// cluster centers at 2.5× standard normal scale, unit-variance points
/// around them, uniform prior.
pub fn generate_clustered(params: &ClusteredParams) -> Result<InstanceDocument> {
    validate_clustered(params, params.num_points, params.dim)?;
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let centers: Vec<Vec<f64>> = (0..params.num_clusters)
        .map(|_| (0..params.dim).map(|_| 2.5 * normal(&mut rng)).collect())
        .collect();
    let points: Vec<Vec<f64>> = (0..params.num_points)
        .map(|_| {
            let center = &centers[rng.gen_range(0..centers.len())];
            center.iter().map(|x| x + normal(&mut rng)).collect()
        })
        .collect();
    clustered_document(params, &points, &mut rng)
}

/// The same construction on caller-provided embeddings (one point per
/// hypothesis, any dimension); `num_points`/`dim` come from the data.
pub fn generate_clustered_from_embeddings(
    params: &ClusteredParams,
    points: &[Vec<f64>],
) -> Result<InstanceDocument> {
    let dim = points.first().map_or(0, Vec::len);
    if points.iter().any(|p| p.len() != dim) {
        return Err(params_error(vec!["embedding rows differ in dimension".into()]));
    }
    validate_clustered(params, points.len(), dim)?;
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    clustered_document(params, points, &mut rng)
}

fn validate_localization(params: &LocalizationParams) -> Result<()> {
    let mut errors = Vec::new();
    if params.num_hypotheses == 0 {
        errors.push("need at least 1 hypothesis".into());
    }
    if !(params.gaussian_sigma > 0.0) {
        errors.push("gaussian_sigma must be positive".into());
    }
    if params.num_decisions == 0 {
        errors.push("need at least 1 decision".into());
    }
    if !(params.decision_radius > 0.0) {
        errors.push("decision_radius must be positive".into());
    }
    if params.num_guarded_moves == 0 {
        errors.push("need at least 1 guarded move".into());
    }
    if params.num_bins == 0 {
        errors.push("need at least 1 outcome bin".into());
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(params_error(errors))
    }
}

/// Generate a planar localization instance: Gaussian pose hypotheses, disc
/// decision regions centered near sampled poses, and guarded-move tests that
/// probe along random lines, reporting the contact position quantized into
/// equal-width bins.
///
/// Poses outside every disc are possible; the document declares `wrap`
/// coverage when that happens so loaders give them singleton regions.
pub fn generate_localization_2d(params: &LocalizationParams) -> Result<InstanceDocument> {
    validate_localization(params)?;
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let sigma = params.gaussian_sigma;

    let poses: Vec<[f64; 2]> = (0..params.num_hypotheses)
        .map(|_| [sigma * normal(&mut rng), sigma * normal(&mut rng)])
        .collect();

    // Decisions succeed on poses within a disc; centers hug the pose cloud
    // so regions are tight but non-degenerate.
    let jitter = sigma / 4.0;
    let centers: Vec<[f64; 2]> = (0..params.num_decisions)
        .map(|_| {
            let p = poses[rng.gen_range(0..poses.len())];
            [
                p[0] + jitter * normal(&mut rng),
                p[1] + jitter * normal(&mut rng),
            ]
        })
        .collect();
    let r2 = params.decision_radius * params.decision_radius;
    let regions: Vec<Vec<u32>> = centers
        .iter()
        .map(|c| {
            poses
                .iter()
                .enumerate()
                .filter(|(_, p)| dist2(&p[..], &c[..]) <= r2)
                .map(|(h, _)| h as u32)
                .collect()
        })
        .collect();
    let covered = {
        let mut covered = vec![false; poses.len()];
        for region in &regions {
            for &h in region {
                covered[h as usize] = true;
            }
        }
        covered.into_iter().all(|c| c)
    };

    // Guarded moves: a line probe from an offset point along a random
    // direction; the reading is the pose's position along the line,
    // quantized into equal bins between the extremes.
    let bins = params.num_bins;
    let mut outcomes: Vec<Vec<u32>> = vec![Vec::with_capacity(params.num_guarded_moves); poses.len()];
    for _ in 0..params.num_guarded_moves {
        let a = [2.0 * sigma * normal(&mut rng), 2.0 * sigma * normal(&mut rng)];
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let u = [theta.cos(), theta.sin()];
        let readings: Vec<f64> = poses
            .iter()
            .map(|p| (p[0] - a[0]) * u[0] + (p[1] - a[1]) * u[1])
            .collect();
        let lo = readings.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = readings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        for (h, &s) in readings.iter().enumerate() {
            let bin = if width > 0.0 {
                (((s - lo) / width) as usize).min(bins - 1)
            } else {
                0
            };
            outcomes[h].push(bin as u32);
        }
    }

    let coverage = if covered {
        CoverageMode::Strict
    } else {
        CoverageMode::Wrap
    };
    let parts = InstanceParts {
        weights: vec![1.0; poses.len()],
        arities: vec![bins as u32; params.num_guarded_moves],
        outcomes,
        regions: {
            let mut regions = regions;
            regions.retain(|r| !r.is_empty());
            regions
        },
    };
    let metadata = DocumentMetadata {
        generator: Some("localization2d".into()),
        seed: Some(params.seed),
        params: Some(serde_json::to_value(params).expect("params serialize")),
        coverage: Some(coverage.as_str().into()),
        instance_id: Some(format!("loc2d-{}", params.seed)),
        ..DocumentMetadata::default()
    };
    Ok(InstanceDocument::from_parts(&parts, metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::SubregionIndex;
    use crate::instance::RegionId;

    fn tiny_params() -> ClusteredParams {
        ClusteredParams {
            num_points: 30,
            dim: 3,
            num_clusters: 4,
            assign_alpha: 2,
            num_tests: Some(40),
            seed: 7,
        }
    }

    #[test]
    fn documents_round_trip_byte_identically() {
        let doc = generate_clustered(&tiny_params()).unwrap();
        let bytes = render_instance_document(&doc);
        let reloaded = parse_instance_document(&bytes).unwrap();
        assert_eq!(reloaded, doc);
        assert_eq!(render_instance_document(&reloaded), bytes);
        assert!(bytes.ends_with('\n'));
    }

    #[test]
    fn truncated_files_report_position() {
        let doc = generate_clustered(&tiny_params()).unwrap();
        let bytes = render_instance_document(&doc);
        let truncated = &bytes[..bytes.len() / 2];
        match parse_instance_document(truncated) {
            Err(Error::Parse { offset, line, .. }) => {
                assert!(offset > 0);
                assert!(line > 1);
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_schema_versions_are_refused() {
        let doc = generate_clustered(&tiny_params()).unwrap();
        let bytes = render_instance_document(&doc).replace(
            "\"schema_version\": 1",
            "\"schema_version\": 9",
        );
        assert!(matches!(
            parse_instance_document(&bytes),
            Err(Error::SchemaVersion { got: 9, expected: 1 })
        ));
    }

    #[test]
    fn non_dense_ids_are_refused() {
        let mut doc = generate_clustered(&tiny_params()).unwrap();
        doc.hypotheses[1].id = 5;
        assert!(matches!(
            doc.to_parts(),
            Err(Error::InvalidInstance { .. })
        ));
    }

    #[test]
    fn hand_written_document_builds_the_overlap_topology() {
        let text = r#"{
  "schema_version": 1,
  "hypotheses": [
    { "id": 0, "weight": 1.0 },
    { "id": 1, "weight": 1.0 },
    { "id": 2, "weight": 1.0 }
  ],
  "tests": [
    { "id": 0, "arity": 2 },
    { "id": 1, "arity": 2 }
  ],
  "outcomes": [ [0, 0], [1, 0], [1, 1] ],
  "regions": [
    { "id": 0, "hypothesis_ids": [0, 1] },
    { "id": 1, "hypothesis_ids": [1, 2] }
  ]
}"#;
        let doc = parse_instance_document(text).unwrap();
        let (inst, report) = doc.instantiate(CoverageMode::Strict).unwrap();
        assert!(report.is_ok());
        let index = SubregionIndex::build(&inst);
        assert_eq!(index.num_subregions(), 3);
        assert_eq!(index.k(), 3);
        let signatures: Vec<&[RegionId]> = index
            .subregions()
            .iter()
            .map(|g| g.signature.as_slice())
            .collect();
        assert_eq!(
            signatures,
            vec![
                &[RegionId(0)][..],
                &[RegionId(0), RegionId(1)][..],
                &[RegionId(1)][..],
            ]
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_clustered(&tiny_params()).unwrap();
        let b = generate_clustered(&tiny_params()).unwrap();
        assert_eq!(render_instance_document(&a), render_instance_document(&b));

        let params = LocalizationParams {
            num_hypotheses: 40,
            num_decisions: 5,
            num_guarded_moves: 12,
            seed: 3,
            ..LocalizationParams::default()
        };
        let a = generate_localization_2d(&params).unwrap();
        let b = generate_localization_2d(&params).unwrap();
        assert_eq!(render_instance_document(&a), render_instance_document(&b));
    }

    #[test]
    fn alpha_equal_to_clusters_puts_everyone_everywhere() {
        let params = ClusteredParams {
            assign_alpha: 4,
            ..tiny_params()
        };
        let doc = generate_clustered(&params).unwrap();
        let (inst, _) = doc.instantiate(CoverageMode::Strict).unwrap();
        for r in 0..inst.num_regions() {
            assert_eq!(
                inst.region_members(RegionId(r as u32)).len(),
                inst.num_hypotheses()
            );
        }
        // Everything shares a region, so the problem is decided at the start.
        let empty = crate::instance::Evidence::empty();
        assert!(crate::instance::is_solved(&inst, &empty).unwrap().is_some());
    }

    #[test]
    fn alpha_two_keeps_cardinality_at_most_three() {
        let doc = generate_clustered(&tiny_params()).unwrap();
        let (inst, _) = doc.instantiate(CoverageMode::Strict).unwrap();
        let index = SubregionIndex::build(&inst);
        assert!(index.k() <= 3, "k = {}", index.k());
    }

    #[test]
    fn alpha_one_partitions_the_points() {
        let params = ClusteredParams {
            assign_alpha: 1,
            ..tiny_params()
        };
        let doc = generate_clustered(&params).unwrap();
        let (inst, _) = doc.instantiate(CoverageMode::Strict).unwrap();
        let mut seen = vec![0usize; inst.num_hypotheses()];
        for r in 0..inst.num_regions() {
            for h in inst.region_members(RegionId(r as u32)) {
                seen[h.index()] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        let index = SubregionIndex::build(&inst);
        assert_eq!(index.k(), 2);
    }

    #[test]
    fn clustered_rejects_bad_params() {
        let params = ClusteredParams {
            assign_alpha: 9,
            num_clusters: 4,
            ..tiny_params()
        };
        assert!(matches!(
            generate_clustered(&params),
            Err(Error::InvalidInstance { .. })
        ));
    }

    #[test]
    fn one_giant_decision_region_costs_nothing() {
        let params = LocalizationParams {
            num_hypotheses: 30,
            num_decisions: 1,
            decision_radius: 100.0,
            num_guarded_moves: 8,
            seed: 5,
            ..LocalizationParams::default()
        };
        let doc = generate_localization_2d(&params).unwrap();
        assert_eq!(doc.coverage_hint(), Some(CoverageMode::Strict));
        let (inst, _) = doc.instantiate(CoverageMode::Strict).unwrap();
        let empty = crate::instance::Evidence::empty();
        assert!(crate::instance::is_solved(&inst, &empty).unwrap().is_some());
    }

    #[test]
    fn localization_declares_wrap_when_poses_escape_every_disc() {
        let params = LocalizationParams {
            num_hypotheses: 60,
            num_decisions: 2,
            decision_radius: 0.02,
            num_guarded_moves: 6,
            seed: 1,
            ..LocalizationParams::default()
        };
        let doc = generate_localization_2d(&params).unwrap();
        assert_eq!(doc.coverage_hint(), Some(CoverageMode::Wrap));
        let (inst, report) = doc.instantiate(CoverageMode::Wrap).unwrap();
        assert!(report.is_ok());
        assert!(inst.wrapped_from().is_some());
    }

    #[test]
    fn generated_instances_validate_in_their_declared_mode() {
        for seed in 0..5u64 {
            let doc = generate_clustered(&ClusteredParams {
                seed,
                num_points: 25,
                num_clusters: 3,
                ..tiny_params()
            })
            .unwrap();
            let mode = doc.coverage_hint().unwrap();
            let (_, report) = doc.instantiate(mode).unwrap();
            assert!(report.is_ok(), "clustered seed {seed}");

            let doc = generate_localization_2d(&LocalizationParams {
                num_hypotheses: 50,
                num_decisions: 6,
                num_guarded_moves: 10,
                seed,
                ..LocalizationParams::default()
            })
            .unwrap();
            let mode = doc.coverage_hint().unwrap();
            let (_, report) = doc.instantiate(mode).unwrap();
            assert!(report.is_ok(), "localization seed {seed}");
        }
    }

    #[test]
    fn results_table_has_fixed_header_and_one_line_per_row() {
        let rows = vec![ResultRow {
            instance_id: "clustered-7".into(),
            seed: 3,
            policy: PolicyKind::Hec,
            k: 3,
            num_regions: 4,
            queries: 5,
            solved: true,
            wall_ms: 0,
        }];
        let mut out = Vec::new();
        write_results(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines[1], "clustered-7,3,hec,3,4,5,true,0");

        assert!(write_results(&[], &mut Vec::new()).is_err());
    }

    #[test]
    fn embeddings_parse_and_reject_malformed_input() {
        let good = "id,x0,x1\n0,0.5,1.25\n1,-2.0,0.0\n";
        let points = parse_embeddings(good).unwrap();
        assert_eq!(points, vec![vec![0.5, 1.25], vec![-2.0, 0.0]]);

        assert!(parse_embeddings("id,y0\n0,1.0\n").is_err());
        assert!(parse_embeddings("id,x0\n1,1.0\n").is_err());
        assert!(parse_embeddings("id,x0\n0,abc\n").is_err());
        assert!(parse_embeddings("id,x0\n").is_err());
    }

    #[test]
    fn embeddings_drive_the_clustered_generator() {
        // Four well-separated points, two clusters, alpha 1: the regions
        // must split {0,1} from {2,3}.
        let points = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![10.0, 10.0],
            vec![10.1, 10.0],
        ];
        let params = ClusteredParams {
            num_points: 0, // replaced by the data
            dim: 0,
            num_clusters: 2,
            assign_alpha: 1,
            num_tests: Some(6),
            seed: 2,
            ..ClusteredParams::default()
        };
        let doc = generate_clustered_from_embeddings(&params, &points).unwrap();
        let (inst, _) = doc.instantiate(CoverageMode::Strict).unwrap();
        assert_eq!(inst.num_regions(), 2);
        let mut groups: Vec<Vec<u32>> = (0..2)
            .map(|r| {
                inst.region_members(RegionId(r))
                    .iter()
                    .map(|h| h.0)
                    .collect()
            })
            .collect();
        groups.sort();
        assert_eq!(groups, vec![vec![0, 1], vec![2, 3]]);
    }
}
