//! Problem instances, evidence, and version spaces.
//!
//! An instance is a finite Bayesian identification problem: hypotheses with a
//! prior, tests whose outcome each hypothesis determines, and overlapping
//! decision regions over the hypotheses. A policy queries tests adaptively;
//! the game ends when every hypothesis still consistent with the answers lies
//! inside one region.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<u32> for $name {
            fn from(v: u32) -> Self {
                $name(v)
            }
        }
    };
}

id_type!(
    /// Index of a hypothesis; dense 0..n.
    HypothesisId
);
id_type!(
    /// Index of a test; dense 0..n.
    TestId
);
id_type!(
    /// Index of an outcome within one test; dense 0..arity.
    OutcomeId
);
id_type!(
    /// Index of a decision region; dense 0..n.
    RegionId
);

/// What to do with hypotheses no region contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverageMode {
    /// Uncovered hypotheses are a validation error.
    #[default]
    Strict,
    /// Each uncovered hypothesis gets a fresh singleton region appended
    /// before anything else looks at the instance.
    Wrap,
}

impl CoverageMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverageMode::Strict => "strict",
            CoverageMode::Wrap => "wrap",
        }
    }
}

impl std::str::FromStr for CoverageMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "strict" => Ok(CoverageMode::Strict),
            "wrap" => Ok(CoverageMode::Wrap),
            other => Err(format!("unknown coverage mode {other:?} (strict|wrap)")),
        }
    }
}

/// Raw positional pieces of an instance, before validation.
///
/// `outcomes[h][t]` is hypothesis `h`'s answer to test `t`; `regions[r]`
/// lists member hypothesis indices.
#[derive(Debug, Clone, Default)]
pub struct InstanceParts {
    pub weights: Vec<f64>,
    pub arities: Vec<u32>,
    pub outcomes: Vec<Vec<u32>>,
    pub regions: Vec<Vec<u32>>,
}

/// Violations and soft issues found while checking an instance.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Check raw parts against the instance invariants.
///
/// Errors make the instance unbuildable; warnings are survivable oddities
/// (empty regions, arity-1 tests, weights that need normalization).
pub fn validate_instance(parts: &InstanceParts, mode: CoverageMode) -> ValidationReport {
    let mut report = ValidationReport::default();
    let err = |r: &mut ValidationReport, msg: String| r.errors.push(msg);
    let warn = |r: &mut ValidationReport, msg: String| r.warnings.push(msg);

    let num_h = parts.weights.len();
    if num_h == 0 {
        err(&mut report, "no hypotheses".into());
    }

    let mut sum = 0.0;
    for (h, &w) in parts.weights.iter().enumerate() {
        if !w.is_finite() {
            err(&mut report, format!("hypothesis {h}: weight {w} is not finite"));
        } else if w == 0.0 {
            err(&mut report, format!("hypothesis {h}: zero prior weight"));
        } else if w < 0.0 {
            err(&mut report, format!("hypothesis {h}: negative prior weight {w}"));
        } else {
            sum += w;
        }
    }
    if report.errors.is_empty() && (sum - 1.0).abs() > 1e-12 {
        warn(
            &mut report,
            format!("prior weights sum to {sum}; they will be normalized"),
        );
    }

    for (t, &arity) in parts.arities.iter().enumerate() {
        if arity == 0 {
            err(&mut report, format!("test {t}: arity 0"));
        } else if arity == 1 {
            warn(&mut report, format!("test {t}: arity 1 is uninformative"));
        }
    }

    if parts.outcomes.len() != num_h {
        err(
            &mut report,
            format!(
                "outcome matrix has {} rows, expected {num_h}",
                parts.outcomes.len()
            ),
        );
    }
    for (h, row) in parts.outcomes.iter().enumerate() {
        if row.len() != parts.arities.len() {
            err(
                &mut report,
                format!(
                    "outcome row {h} has {} entries, expected {}",
                    row.len(),
                    parts.arities.len()
                ),
            );
            continue;
        }
        for (t, (&o, &arity)) in row.iter().zip(&parts.arities).enumerate() {
            if o >= arity {
                err(
                    &mut report,
                    format!("outcome[{h}][{t}] = {o} out of range for arity {arity}"),
                );
            }
        }
    }

    let mut covered = vec![false; num_h];
    for (r, members) in parts.regions.iter().enumerate() {
        if members.is_empty() {
            warn(&mut report, format!("region {r} is empty"));
        }
        let mut seen = vec![false; num_h];
        for &h in members {
            if h as usize >= num_h {
                err(
                    &mut report,
                    format!("region {r}: member {h} is not a hypothesis"),
                );
            } else if seen[h as usize] {
                err(&mut report, format!("region {r}: duplicate member {h}"));
            } else {
                seen[h as usize] = true;
                covered[h as usize] = true;
            }
        }
    }
    for (h, &c) in covered.iter().enumerate() {
        if !c {
            match mode {
                CoverageMode::Strict => err(
                    &mut report,
                    format!("hypothesis {h} belongs to no region (strict coverage)"),
                ),
                CoverageMode::Wrap => warn(
                    &mut report,
                    format!("hypothesis {h} belongs to no region; a singleton region will wrap it"),
                ),
            }
        }
    }

    report
}

/// A decision region: the set of hypotheses for which this decision succeeds.
#[derive(Debug, Clone)]
struct Region {
    members: Vec<HypothesisId>,
    bits: BitSet,
}

/// Immutable identification problem. See the module docs.
///
/// Construction normalizes the prior and precomputes region membership in
/// both directions; all query methods are cheap and the whole structure is
/// freely shareable across threads.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    priors: Vec<f64>,
    arities: Vec<u32>,
    outcomes: Vec<u32>,
    regions: Vec<Region>,
    regions_of: Vec<Vec<RegionId>>,
    wrapped_from: Option<usize>,
}

impl ProblemInstance {
    /// Validate parts and build. Errors in the report abort with
    /// [`Error::InvalidInstance`]; the surviving report carries warnings.
    pub fn from_parts(
        parts: InstanceParts,
        mode: CoverageMode,
    ) -> Result<(Self, ValidationReport)> {
        let report = validate_instance(&parts, mode);
        if !report.is_ok() {
            return Err(Error::InvalidInstance {
                errors: report.errors,
            });
        }

        let InstanceParts {
            weights,
            arities,
            outcomes,
            mut regions,
        } = parts;

        let num_h = weights.len();
        let mut wrapped_from = None;
        if mode == CoverageMode::Wrap {
            let mut covered = vec![false; num_h];
            for members in &regions {
                for &h in members {
                    covered[h as usize] = true;
                }
            }
            if covered.iter().any(|&c| !c) {
                wrapped_from = Some(regions.len());
                for (h, &c) in covered.iter().enumerate() {
                    if !c {
                        regions.push(vec![h as u32]);
                    }
                }
            }
        }

        let total: f64 = weights.iter().sum();
        let priors: Vec<f64> = weights.iter().map(|w| w / total).collect();

        let flat: Vec<u32> = outcomes.into_iter().flatten().collect();

        let built_regions: Vec<Region> = regions
            .iter()
            .map(|members| {
                let mut bits = BitSet::empty(num_h);
                let mut ids: Vec<HypothesisId> =
                    members.iter().map(|&h| HypothesisId(h)).collect();
                ids.sort_unstable();
                for h in &ids {
                    bits.insert(h.index());
                }
                Region { members: ids, bits }
            })
            .collect();

        let mut regions_of: Vec<Vec<RegionId>> = vec![Vec::new(); num_h];
        for (r, region) in built_regions.iter().enumerate() {
            for h in &region.members {
                regions_of[h.index()].push(RegionId(r as u32));
            }
        }

        Ok((
            ProblemInstance {
                priors,
                arities,
                outcomes: flat,
                regions: built_regions,
                regions_of,
                wrapped_from,
            },
            report,
        ))
    }

    pub fn num_hypotheses(&self) -> usize {
        self.priors.len()
    }

    pub fn num_tests(&self) -> usize {
        self.arities.len()
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    /// Normalized prior of one hypothesis.
    pub fn prior(&self, h: HypothesisId) -> f64 {
        self.priors[h.index()]
    }

    /// Normalized prior over all hypotheses (sums to 1 ± 1e-12).
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn arity(&self, t: TestId) -> u32 {
        self.arities[t.index()]
    }

    /// The answer hypothesis `h` gives to test `t`.
    pub fn outcome(&self, h: HypothesisId, t: TestId) -> OutcomeId {
        OutcomeId(self.outcomes[h.index() * self.arities.len() + t.index()])
    }

    pub(crate) fn outcome_raw(&self, h: usize, t: usize) -> u32 {
        self.outcomes[h * self.arities.len() + t]
    }

    pub fn region_members(&self, r: RegionId) -> &[HypothesisId] {
        &self.regions[r.index()].members
    }

    /// Regions containing `h`, ascending.
    pub fn regions_of(&self, h: HypothesisId) -> &[RegionId] {
        &self.regions_of[h.index()]
    }

    /// Index of the first region added by coverage wrapping, if any were.
    pub fn wrapped_from(&self) -> Option<usize> {
        self.wrapped_from
    }

    /// Full answer row of a hypothesis, one outcome per test.
    pub fn answer_row(&self, h: HypothesisId) -> &[u32] {
        let t = self.arities.len();
        &self.outcomes[h.index() * t..(h.index() + 1) * t]
    }

    /// Stable fingerprint of the instance contents (FNV-1a).
    pub fn digest(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x1000_0000_01b3);
            }
        };
        eat(&(self.priors.len() as u64).to_le_bytes());
        for p in &self.priors {
            eat(&p.to_bits().to_le_bytes());
        }
        eat(&(self.arities.len() as u64).to_le_bytes());
        for &a in &self.arities {
            eat(&a.to_le_bytes());
        }
        for &o in &self.outcomes {
            eat(&o.to_le_bytes());
        }
        eat(&(self.regions.len() as u64).to_le_bytes());
        for region in &self.regions {
            eat(&(region.members.len() as u64).to_le_bytes());
            for h in &region.members {
                eat(&h.0.to_le_bytes());
            }
        }
        hash
    }

    fn check_test(&self, t: TestId) -> Result<()> {
        if t.index() < self.num_tests() {
            Ok(())
        } else {
            Err(Error::UnknownTest(t))
        }
    }

    fn check_pair(&self, t: TestId, o: OutcomeId) -> Result<()> {
        self.check_test(t)?;
        let arity = self.arity(t);
        if o.0 >= arity {
            return Err(Error::OutcomeOutOfRange {
                test: t,
                outcome: o,
                arity,
            });
        }
        Ok(())
    }

    /// Hypotheses consistent with the evidence, as a bit set.
    pub(crate) fn version_bits(&self, evidence: &Evidence) -> Result<BitSet> {
        let mut bits = BitSet::full(self.num_hypotheses());
        for &(t, o) in evidence.pairs() {
            self.check_pair(t, o)?;
            self.filter_in_place(&mut bits, t, o);
        }
        Ok(bits)
    }

    pub(crate) fn filter_in_place(&self, bits: &mut BitSet, t: TestId, o: OutcomeId) {
        bits.retain(|h| self.outcome_raw(h, t.index()) == o.0);
    }

    pub(crate) fn mass_of(&self, bits: &BitSet) -> f64 {
        bits.iter().map(|h| self.priors[h]).sum()
    }

    /// Lowest-index region containing every hypothesis in `bits`, if one does.
    pub(crate) fn solved_region(&self, bits: &BitSet) -> Option<RegionId> {
        debug_assert!(!bits.is_empty());
        // Candidate regions all contain the first surviving hypothesis.
        let first = bits.first()?;
        for &r in &self.regions_of[first] {
            if bits.is_subset_of(&self.regions[r.index()].bits) {
                return Some(r);
            }
        }
        None
    }

    /// True when some policy could still finish from this version space with
    /// the full test set: answering every remaining test collapses the
    /// version space to one indistinguishability class, so the instance is
    /// winnable iff every class fits inside one region.
    pub fn feasible_from(&self, version: &VersionSpace) -> bool {
        let mut classes: Vec<(HypothesisId, BitSet)> = Vec::new();
        'next: for h in version.bits().iter() {
            let row = self.answer_row(HypothesisId(h as u32));
            for (rep, class) in classes.iter_mut() {
                if self.answer_row(*rep) == row {
                    class.insert(h);
                    continue 'next;
                }
            }
            let mut class = BitSet::empty(self.num_hypotheses());
            class.insert(h);
            classes.push((HypothesisId(h as u32), class));
        }
        classes
            .iter()
            .all(|(_, class)| self.solved_region(class).is_some())
    }
}

/// Answered tests, in answer order. Value-semantic: extending produces a new
/// `Evidence`, the original is untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    pairs: Vec<(TestId, OutcomeId)>,
}

impl Evidence {
    pub fn empty() -> Self {
        Evidence::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(TestId, OutcomeId)] {
        &self.pairs
    }

    pub fn contains_test(&self, t: TestId) -> bool {
        self.pairs.iter().any(|&(pt, _)| pt == t)
    }

    /// Evidence with the final answer removed, or `None` if already empty.
    pub fn undo(&self) -> Option<Evidence> {
        if self.pairs.is_empty() {
            return None;
        }
        let mut pairs = self.pairs.clone();
        pairs.pop();
        Some(Evidence { pairs })
    }
}

/// Record one more answered test. The input evidence is unchanged; the
/// extension is returned. Errors on unknown tests, out-of-range outcomes, and
/// tests already answered.
pub fn apply_test(
    instance: &ProblemInstance,
    evidence: &Evidence,
    test: TestId,
    outcome: OutcomeId,
) -> Result<Evidence> {
    instance.check_pair(test, outcome)?;
    if evidence.contains_test(test) {
        return Err(Error::DuplicateTest(test));
    }
    let mut pairs = evidence.pairs.clone();
    pairs.push((test, outcome));
    Ok(Evidence { pairs })
}

/// The hypotheses consistent with some evidence, plus their prior mass.
#[derive(Debug, Clone)]
pub struct VersionSpace {
    bits: BitSet,
    total_mass: f64,
}

impl VersionSpace {
    pub(crate) fn new(bits: BitSet, total_mass: f64) -> Self {
        VersionSpace { bits, total_mass }
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Total prior mass of the consistent set (not renormalized).
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn contains(&self, h: HypothesisId) -> bool {
        self.bits.contains(h.index())
    }

    /// Consistent hypothesis ids, ascending.
    pub fn ids(&self) -> Vec<HypothesisId> {
        self.bits.iter().map(|h| HypothesisId(h as u32)).collect()
    }

    pub(crate) fn bits(&self) -> &BitSet {
        &self.bits
    }
}

/// The version space: hypotheses agreeing with every answered test.
///
/// Errors with [`Error::ContradictoryEvidence`] when nothing survives.
pub fn consistent_hypotheses(
    instance: &ProblemInstance,
    evidence: &Evidence,
) -> Result<VersionSpace> {
    let bits = instance.version_bits(evidence)?;
    if bits.is_empty() {
        return Err(Error::ContradictoryEvidence);
    }
    let mass = instance.mass_of(&bits);
    Ok(VersionSpace::new(bits, mass))
}

/// Posterior over all hypotheses: the prior restricted to the version space
/// and renormalized. Eliminated hypotheses get probability 0.
pub fn posterior(instance: &ProblemInstance, evidence: &Evidence) -> Result<Vec<f64>> {
    let version = consistent_hypotheses(instance, evidence)?;
    let mut probs = vec![0.0; instance.num_hypotheses()];
    for h in version.bits().iter() {
        probs[h] = instance.priors[h] / version.total_mass();
    }
    Ok(probs)
}

/// The region the problem is decided for, if any: the lowest-index region
/// containing the whole version space.
pub fn is_solved(instance: &ProblemInstance, evidence: &Evidence) -> Result<Option<RegionId>> {
    let version = consistent_hypotheses(instance, evidence)?;
    Ok(instance.solved_region(version.bits()))
}
