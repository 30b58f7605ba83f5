//! Test-selection policies and their execution.
//!
//! The core policy greedily maximizes the expected reduction in surviving
//! hyperedge mass. Baselines reuse the same machinery on transformed
//! instances (singleton regions for generalized binary search, a seeded
//! random partition for equivalence-class cutting) or swap the score for
//! myopic value of information. A policy is *prepared* once per instance —
//! transforms and hypergraph indexes frozen — then run against any ground
//! truth.
//!
//! Selection cost is kept down two ways, both exact:
//!
//! * a decision-tree cache keyed by the version space — the gain of a test
//!   depends only on the surviving set, so revisited states (across truths
//!   and trials) replay their choice for free;
//! * lazy greedy — gains computed at an ancestor state are upper bounds at
//!   every descendant (adaptive submodularity), so a priority scan recomputes
//!   only candidates whose stale bound still beats the best fresh value. The
//!   selected test is identical, in rank and tie-break, to a full scan.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::arith::Mass;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::hypergraph::SubregionIndex;
use crate::instance::{
    consistent_hypotheses, CoverageMode, Evidence, HypothesisId, InstanceParts, OutcomeId,
    ProblemInstance, RegionId, TestId, VersionSpace,
};
use crate::weights::{embedded_priors, hyperedge_weight, masses_from_priors};

/// The six supported policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Hyperedge cutting on the instance as given.
    Hec,
    /// Generalized binary search: edge cutting on singleton regions, done
    /// when one hypothesis remains.
    Gbs,
    /// GBS selection, but done as soon as the original problem is decided.
    GbsHec,
    /// Equivalence class cutting on a seeded random partition, done when one
    /// assigned class remains.
    Ec2,
    /// EC2 selection with the original decision criterion.
    Ec2Hec,
    /// Myopic value of information on the original regions.
    Voi,
}

/// When a policy stops querying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Version space inside one original region.
    DrdSolved,
    /// Version space is a single hypothesis.
    SingleHypothesis,
    /// Version space inside one randomly-assigned class.
    SingleAssignedRegion,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Hec,
        PolicyKind::Gbs,
        PolicyKind::GbsHec,
        PolicyKind::Ec2,
        PolicyKind::Ec2Hec,
        PolicyKind::Voi,
    ];

    pub fn termination(self) -> Termination {
        match self {
            PolicyKind::Gbs => Termination::SingleHypothesis,
            PolicyKind::Ec2 => Termination::SingleAssignedRegion,
            _ => Termination::DrdSolved,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Hec => "hec",
            PolicyKind::Gbs => "gbs",
            PolicyKind::GbsHec => "gbs-hec",
            PolicyKind::Ec2 => "ec2",
            PolicyKind::Ec2Hec => "ec2-hec",
            PolicyKind::Voi => "voi",
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown policy {s:?} (hec|gbs|gbs-hec|ec2|ec2-hec|voi)"))
    }
}

/// A policy choice plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Policy {
    pub kind: PolicyKind,
    /// Seeds the EC2 region assignment; ignored by the other kinds.
    pub seed: u64,
}

impl Policy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Policy { kind, seed }
    }

    pub fn termination(&self) -> Termination {
        self.kind.termination()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Score {
    EdgeMass,
    ValueOfInformation,
}

/// A policy frozen against one instance: transforms built, hypergraph indexes
/// computed, ready to run against any ground truth.
#[derive(Debug, Clone)]
pub struct PreparedPolicy {
    policy: Policy,
    score: Score,
    original: Arc<ProblemInstance>,
    original_index: Arc<SubregionIndex>,
    selection_instance: Arc<ProblemInstance>,
    selection_index: Option<Arc<SubregionIndex>>,
    termination_instance: Arc<ProblemInstance>,
    assignment: Option<Vec<RegionId>>,
}

impl PreparedPolicy {
    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn instance(&self) -> &Arc<ProblemInstance> {
        &self.original
    }

    pub fn original_index(&self) -> &Arc<SubregionIndex> {
        &self.original_index
    }

    /// The instance whose gains drive selection (a transform for GBS/EC2
    /// variants, the original otherwise).
    pub fn selection_instance(&self) -> &Arc<ProblemInstance> {
        &self.selection_instance
    }

    /// Hyperedge cardinality driving selection; the original instance's for
    /// value of information, which builds no hypergraph of its own.
    pub fn selection_k(&self) -> usize {
        match &self.selection_index {
            Some(index) => index.k(),
            None => self.original_index.k(),
        }
    }

    /// EC2's random region assignment, one original region per hypothesis.
    pub fn assignment(&self) -> Option<&[RegionId]> {
        self.assignment.as_deref()
    }
}

fn transform_parts(instance: &ProblemInstance, regions: Vec<Vec<u32>>) -> InstanceParts {
    InstanceParts {
        weights: instance.priors().to_vec(),
        arities: (0..instance.num_tests())
            .map(|t| instance.arity(TestId(t as u32)))
            .collect(),
        outcomes: (0..instance.num_hypotheses())
            .map(|h| {
                (0..instance.num_tests())
                    .map(|t| instance.outcome_raw(h, t))
                    .collect()
            })
            .collect(),
        regions,
    }
}

fn build_transform(instance: &ProblemInstance, regions: Vec<Vec<u32>>) -> Arc<ProblemInstance> {
    let (inst, _) = ProblemInstance::from_parts(transform_parts(instance, regions), CoverageMode::Strict)
        .expect("transforms of a valid instance are valid");
    Arc::new(inst)
}

/// EC2's seeded assignment: each hypothesis keeps exactly one of its regions,
/// chosen uniformly by a generator keyed on (instance digest, seed).
fn ec2_assignment(instance: &ProblemInstance, seed: u64) -> Result<Vec<RegionId>> {
    let key = instance
        .digest()
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(seed);
    let mut rng = ChaCha20Rng::seed_from_u64(key);
    let mut assignment = Vec::with_capacity(instance.num_hypotheses());
    for h in 0..instance.num_hypotheses() {
        let regions = instance.regions_of(HypothesisId(h as u32));
        if regions.is_empty() {
            return Err(Error::Infeasible(format!(
                "EC2 needs every hypothesis inside some region; hypothesis {h} is uncovered"
            )));
        }
        assignment.push(regions[rng.gen_range(0..regions.len())]);
    }
    Ok(assignment)
}

/// Freeze a policy against an instance, reusing a prebuilt hypergraph index
/// for the original (shared across policies by callers running several).
pub fn make_baseline_with_index(
    kind: PolicyKind,
    instance: &Arc<ProblemInstance>,
    seed: u64,
    original_index: Arc<SubregionIndex>,
) -> Result<PreparedPolicy> {
    let policy = Policy::new(kind, seed);
    let (score, selection_instance, termination_instance, assignment) = match kind {
        PolicyKind::Hec => (Score::EdgeMass, instance.clone(), instance.clone(), None),
        PolicyKind::Voi => (
            Score::ValueOfInformation,
            instance.clone(),
            instance.clone(),
            None,
        ),
        PolicyKind::Gbs | PolicyKind::GbsHec => {
            let singletons: Vec<Vec<u32>> =
                (0..instance.num_hypotheses() as u32).map(|h| vec![h]).collect();
            let transform = build_transform(instance, singletons);
            let termination = if kind == PolicyKind::Gbs {
                transform.clone()
            } else {
                instance.clone()
            };
            (Score::EdgeMass, transform, termination, None)
        }
        PolicyKind::Ec2 | PolicyKind::Ec2Hec => {
            let assignment = ec2_assignment(instance, seed)?;
            let mut classes: Vec<Vec<u32>> = vec![Vec::new(); instance.num_regions()];
            for (h, r) in assignment.iter().enumerate() {
                classes[r.index()].push(h as u32);
            }
            classes.retain(|members| !members.is_empty());
            let transform = build_transform(instance, classes);
            let termination = if kind == PolicyKind::Ec2 {
                transform.clone()
            } else {
                instance.clone()
            };
            (Score::EdgeMass, transform, termination, Some(assignment))
        }
    };

    let selection_index = match score {
        Score::ValueOfInformation => None,
        Score::EdgeMass => {
            if Arc::ptr_eq(&selection_instance, instance) {
                Some(original_index.clone())
            } else {
                Some(Arc::new(SubregionIndex::build(&selection_instance)))
            }
        }
    };

    Ok(PreparedPolicy {
        policy,
        score,
        original: instance.clone(),
        original_index,
        selection_instance,
        selection_index,
        termination_instance,
        assignment,
    })
}

/// Freeze a policy against an instance with the formula cardinality.
pub fn make_baseline(
    kind: PolicyKind,
    instance: &Arc<ProblemInstance>,
    seed: u64,
) -> Result<PreparedPolicy> {
    let index = Arc::new(SubregionIndex::build(instance));
    make_baseline_with_index(kind, instance, seed, index)
}

/// One answered test in a policy run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub test: TestId,
    pub outcome: OutcomeId,
    /// The selection score of the chosen test at selection time.
    pub gain: f64,
    /// Edge mass cut so far on the original instance, after this answer.
    pub objective_after: f64,
}

/// A full policy run against one ground-truth hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTrace {
    pub truth: HypothesisId,
    pub steps: Vec<TraceStep>,
    /// Lowest original region containing the final version space; `None`
    /// when the policy stalled with every remaining gain at zero (possible
    /// only on instances infeasible from that state).
    pub terminal_region: Option<RegionId>,
}

impl PolicyTrace {
    pub fn solved(&self) -> bool {
        self.terminal_region.is_some()
    }

    pub fn cost(&self) -> usize {
        self.steps.len()
    }
}

/// Prior-weighted cost summary over every hypothesis as ground truth.
#[derive(Debug, Clone)]
pub struct PolicyEvaluation {
    /// Σ_h P(h) · cost(h).
    pub expected_cost: f64,
    /// Query count per ground-truth hypothesis, by hypothesis index.
    pub per_hypothesis: Vec<usize>,
    pub max_cost: usize,
    /// Wall time for the whole evaluation (measurement, not an output that
    /// participates in determinism guarantees).
    pub wall: std::time::Duration,
}

/// Expected reduction in surviving hyperedge mass from answering `test`,
/// taken over its outcome distribution under the current posterior.
///
/// This is the score [`select_test_greedy`] maximizes. Never negative (a
/// float undershoot within tolerance clamps to zero; beyond it, errors).
pub fn marginal_gain<M: Mass>(
    instance: &ProblemInstance,
    evidence: &Evidence,
    test: TestId,
    index: &SubregionIndex,
) -> Result<M> {
    if test.index() >= instance.num_tests() {
        return Err(Error::UnknownTest(test));
    }
    if evidence.contains_test(test) {
        return Err(Error::DuplicateTest(test));
    }
    let version = consistent_hypotheses(instance, evidence)?;
    let priors = embedded_priors::<M>(instance)?;
    let masses = masses_from_priors(index, version.bits(), &priors);
    let w_cur = hyperedge_weight(index, &masses)?;
    let mut scratch = GainScratch::new(instance, index);
    edge_gain(
        instance,
        index,
        &priors,
        version.bits(),
        &w_cur,
        test.index(),
        &mut scratch,
    )
}

pub(crate) struct GainScratch<M> {
    per_outcome: Vec<Vec<M>>,
    totals: Vec<M>,
}

impl<M: Mass> GainScratch<M> {
    pub(crate) fn new(instance: &ProblemInstance, index: &SubregionIndex) -> Self {
        let max_arity = (0..instance.num_tests())
            .map(|t| instance.arity(TestId(t as u32)) as usize)
            .max()
            .unwrap_or(0);
        GainScratch {
            per_outcome: vec![vec![M::zero(); index.num_subregions()]; max_arity],
            totals: vec![M::zero(); max_arity],
        }
    }
}

/// Δ(test | state): current edge mass minus outcome-expected edge mass.
pub(crate) fn edge_gain<M: Mass>(
    instance: &ProblemInstance,
    index: &SubregionIndex,
    priors: &[M],
    bits: &BitSet,
    w_cur: &M,
    test: usize,
    scratch: &mut GainScratch<M>,
) -> Result<M> {
    let arity = instance.arity(TestId(test as u32)) as usize;
    for o in 0..arity {
        scratch.totals[o] = M::zero();
        for m in scratch.per_outcome[o].iter_mut() {
            *m = M::zero();
        }
    }
    for h in bits.iter() {
        let o = instance.outcome_raw(h, test) as usize;
        scratch.per_outcome[o][index.subregion_of_raw(h)].add_assign(&priors[h]);
        scratch.totals[o].add_assign(&priors[h]);
    }
    let mut n_total = M::zero();
    for o in 0..arity {
        n_total.add_assign(&scratch.totals[o]);
    }

    let mut expected = M::zero();
    for o in 0..arity {
        if scratch.totals[o].is_zero() {
            continue;
        }
        let w_o = hyperedge_weight(index, &scratch.per_outcome[o])?;
        expected.add_assign(&scratch.totals[o].div(&n_total).mul(&w_o));
    }

    let delta = w_cur.sub(&expected);
    if delta.is_negative_beyond_tolerance() {
        return Err(Error::NegativeMass {
            value: delta.to_f64(),
            context: format!("marginal gain of test {test}"),
        });
    }
    Ok(delta.clamp_rounding())
}

/// `(gain, id)` ranking: higher gain first, lower id on ties.
fn beats<M: Mass>(gain: &M, t: usize, than_gain: &M, than_t: usize) -> bool {
    match gain.partial_cmp(than_gain) {
        Some(std::cmp::Ordering::Greater) => true,
        Some(std::cmp::Ordering::Equal) => t < than_t,
        _ => false,
    }
}

struct ScanOutcome<M> {
    /// Best test and its gain, before the stop-floor is applied.
    best: Option<(usize, M)>,
    /// Per-test upper bounds after this scan: fresh values where recomputed,
    /// inherited stale values elsewhere.
    bounds: Vec<M>,
}

/// Evaluate gains at one state. With `stale` bounds from an ancestor state,
/// the scan is lazy: candidates are visited in stale order and recomputed
/// until no stale bound (plus the float-safety slack) can beat the best fresh
/// value — yielding exactly the full scan's winner and tie-break. Without
/// bounds, every test is evaluated.
fn scan_state<M: Mass>(
    instance: &ProblemInstance,
    index: &SubregionIndex,
    priors: &[M],
    bits: &BitSet,
    w_cur: &M,
    stale: Option<&[M]>,
    scratch: &mut GainScratch<M>,
) -> Result<ScanOutcome<M>> {
    let num_tests = instance.num_tests();
    let mut best: Option<(usize, M)> = None;

    match stale {
        None => {
            let mut bounds = Vec::with_capacity(num_tests);
            for t in 0..num_tests {
                let gain = edge_gain(instance, index, priors, bits, w_cur, t, scratch)?;
                if best
                    .as_ref()
                    .map_or(true, |(bt, bg)| beats(&gain, t, bg, *bt))
                {
                    best = Some((t, gain.clone()));
                }
                bounds.push(gain);
            }
            Ok(ScanOutcome { best, bounds })
        }
        Some(stale) => {
            debug_assert_eq!(stale.len(), num_tests);
            let mut bounds = stale.to_vec();
            // Stale order: bound descending, id ascending. A sorted pass is
            // as good as a heap here — every entry may be visited anyway, and
            // the cut-off test below is identical.
            let mut order: Vec<usize> = (0..num_tests).collect();
            order.sort_by(|&a, &b| {
                stale[b]
                    .partial_cmp(&stale[a])
                    .expect("gains are finite")
                    .then(a.cmp(&b))
            });
            let slack = M::lazy_slack();
            for &t in &order {
                if let Some((bt, bg)) = &best {
                    let optimistic = bounds[t].add(&slack);
                    if !beats(&optimistic, t, bg, *bt) {
                        break;
                    }
                }
                let gain = edge_gain(instance, index, priors, bits, w_cur, t, scratch)?;
                if best
                    .as_ref()
                    .map_or(true, |(bt, bg)| beats(&gain, t, bg, *bt))
                {
                    best = Some((t, gain.clone()));
                }
                bounds[t] = gain;
            }
            Ok(ScanOutcome { best, bounds })
        }
    }
}

/// Carry-over state for lazy greedy selection: per-test upper bounds from the
/// gains computed at ancestor evidence states.
#[derive(Debug, Clone)]
pub struct LazyState<M> {
    bounds: Option<Vec<M>>,
}

impl<M: Mass> LazyState<M> {
    /// No bounds yet; the first selection is a full scan.
    pub fn new() -> Self {
        LazyState { bounds: None }
    }
}

impl<M: Mass> Default for LazyState<M> {
    fn default() -> Self {
        Self::new()
    }
}

/// The greedy rule: the not-yet-answered test of maximal [`marginal_gain`],
/// ties to the lowest test id; `None` exactly when no test clears the gain
/// floor, which coincides with the instance being decided.
///
/// Pass the same [`LazyState`] across successive calls along one evidence
/// chain to get lazy evaluation; pass `None` for a full scan. The result is
/// identical either way.
///
/// A state where the two sides of that "exactly when" disagree is diagnosed:
/// decidable-but-no-gain is an internal fault, undecidable-and-no-gain means
/// the instance is infeasible from here.
pub fn select_test_greedy<M: Mass>(
    instance: &ProblemInstance,
    evidence: &Evidence,
    index: &SubregionIndex,
    lazy: Option<&mut LazyState<M>>,
) -> Result<Option<TestId>> {
    let version = consistent_hypotheses(instance, evidence)?;
    let priors = embedded_priors::<M>(instance)?;
    let masses = masses_from_priors(index, version.bits(), &priors);
    let w_cur = hyperedge_weight(index, &masses)?;
    let mut scratch = GainScratch::new(instance, index);

    let stale = match &lazy {
        Some(state) => state.bounds.as_deref(),
        None => None,
    };
    let scan = scan_state(instance, index, &priors, version.bits(), &w_cur, stale, &mut scratch)?;
    if let Some(state) = lazy {
        state.bounds = Some(scan.bounds);
    }

    let floor = M::gain_floor();
    let choice = match scan.best {
        Some((t, gain)) if gain > floor => Some(TestId(t as u32)),
        _ => None,
    };

    let solved = instance.solved_region(version.bits()).is_some();
    match (choice, solved) {
        (None, false) => {
            if instance.feasible_from(&version) {
                Err(Error::InconsistentSelection(
                    "no positive-gain test at an unsolved but feasible state".into(),
                ))
            } else {
                Err(Error::Infeasible(
                    "every remaining gain is zero and no region can absorb the version space"
                        .into(),
                ))
            }
        }
        (Some(t), true) => Err(Error::InconsistentSelection(format!(
            "test {t} has positive gain at a decided state"
        ))),
        _ => Ok(choice),
    }
}

struct CacheNode<M> {
    choice: Option<u32>,
    gain: M,
    bounds: Rc<Vec<M>>,
}

/// Executes one prepared policy against ground truths, reusing work across
/// runs (decision-tree cache plus inherited lazy bounds). Create once per
/// (instance, policy) and feed it every truth you need.
pub struct PolicyRunner<'a, M: Mass> {
    prepared: &'a PreparedPolicy,
    priors: Vec<M>,
    orig_w_total: M,
    cache: HashMap<BitSet, Rc<CacheNode<M>>>,
    scratch: GainScratch<M>,
    lazy: bool,
}

impl<'a, M: Mass> PolicyRunner<'a, M> {
    pub fn new(prepared: &'a PreparedPolicy) -> Result<Self> {
        let instance = prepared.original.as_ref();
        let priors = embedded_priors::<M>(instance)?;
        let full = BitSet::full(instance.num_hypotheses());
        let orig_masses = masses_from_priors(&prepared.original_index, &full, &priors);
        let orig_w_total = hyperedge_weight(&prepared.original_index, &orig_masses)?;
        let scratch_index: &SubregionIndex = prepared
            .selection_index
            .as_deref()
            .unwrap_or(&prepared.original_index);
        Ok(PolicyRunner {
            priors,
            orig_w_total,
            cache: HashMap::new(),
            scratch: GainScratch::new(instance, scratch_index),
            prepared,
            lazy: true,
        })
    }

    /// Disable lazy bounds: every selection is a full scan. Selections are
    /// identical; only the work differs.
    pub fn eager(mut self) -> Self {
        self.lazy = false;
        self
    }

    fn terminated(&self, bits: &BitSet) -> bool {
        self.prepared
            .termination_instance
            .solved_region(bits)
            .is_some()
    }

    /// Edge mass cut so far on the original instance.
    fn objective_after(&mut self, bits: &BitSet) -> Result<M> {
        let index = &self.prepared.original_index;
        let masses = masses_from_priors(index, bits, &self.priors);
        let w = hyperedge_weight(index, &masses)?;
        let f = self.orig_w_total.sub(&w);
        Ok(f.clamp_rounding())
    }

    fn select_edge_cutting(
        &mut self,
        bits: &BitSet,
        parent_bounds: Option<&Rc<Vec<M>>>,
    ) -> Result<Rc<CacheNode<M>>> {
        if let Some(node) = self.cache.get(bits) {
            return Ok(node.clone());
        }
        let instance = self.prepared.selection_instance.as_ref();
        let index = self
            .prepared
            .selection_index
            .as_deref()
            .expect("edge-cutting policies carry an index");
        let masses = masses_from_priors(index, bits, &self.priors);
        let w_cur = hyperedge_weight(index, &masses)?;
        let stale = if self.lazy {
            parent_bounds.map(|b| b.as_slice())
        } else {
            None
        };
        let scan = scan_state(
            instance,
            index,
            &self.priors,
            bits,
            &w_cur,
            stale,
            &mut self.scratch,
        )?;
        let floor = M::gain_floor();
        let (choice, gain) = match scan.best {
            Some((t, gain)) if gain > floor => (Some(t as u32), gain),
            Some((_, gain)) => (None, gain),
            None => (None, M::zero()),
        };
        let node = Rc::new(CacheNode {
            choice,
            gain,
            bounds: Rc::new(scan.bounds),
        });
        self.cache.insert(bits.clone(), node.clone());
        Ok(node)
    }

    /// Myopic value of information: expected gain in the best region's
    /// posterior mass. Computed eagerly (utility gains are not adaptive
    /// submodular, so stale bounds would be unsound) and uncached (the score
    /// depends on which tests remain, not just the version space).
    fn select_voi(&mut self, bits: &BitSet, used: &BitSet) -> Result<Option<(u32, M)>> {
        let instance = self.prepared.original.as_ref();
        let num_regions = instance.num_regions();

        let mut current = vec![M::zero(); num_regions];
        for h in bits.iter() {
            for r in instance.regions_of(HypothesisId(h as u32)) {
                current[r.index()].add_assign(&self.priors[h]);
            }
        }
        let best_region_mass = current
            .iter()
            .cloned()
            .max_by(|a, b| a.partial_cmp(b).expect("masses are finite"))
            .unwrap_or_else(M::zero);
        let n_total = {
            let mut n = M::zero();
            for h in bits.iter() {
                n.add_assign(&self.priors[h]);
            }
            n
        };

        let mut best: Option<(usize, M)> = None;
        for t in 0..instance.num_tests() {
            if used.contains(t) {
                continue;
            }
            let arity = instance.arity(TestId(t as u32)) as usize;
            let mut acc = vec![vec![M::zero(); num_regions]; arity];
            for h in bits.iter() {
                let o = instance.outcome_raw(h, t) as usize;
                for r in instance.regions_of(HypothesisId(h as u32)) {
                    acc[o][r.index()].add_assign(&self.priors[h]);
                }
            }
            // Σ_o P(o)·U(after o) − U(now) = (Σ_o max_r acc − max_r current)/N.
            let mut after = M::zero();
            for per_region in &acc {
                if let Some(m) = per_region
                    .iter()
                    .max_by(|a, b| a.partial_cmp(b).expect("masses are finite"))
                {
                    after.add_assign(m);
                }
            }
            let gain = after.sub(&best_region_mass).div(&n_total).clamp_rounding();
            if best
                .as_ref()
                .map_or(true, |(bt, bg)| beats(&gain, t, bg, *bt))
            {
                best = Some((t, gain));
            }
        }
        Ok(best.map(|(t, g)| (t as u32, g)))
    }

    /// Run the policy to termination against one ground truth.
    ///
    /// `Ok` with `terminal_region: None` means the policy stalled (every
    /// remaining gain zero, problem undecided) on a state it cannot win from;
    /// a stall at a winnable state is an internal fault and errors.
    pub fn run(&mut self, truth: HypothesisId) -> Result<PolicyTrace> {
        let instance = self.prepared.original.as_ref();
        if truth.index() >= instance.num_hypotheses() {
            return Err(Error::UnknownHypothesis(truth));
        }
        let num_tests = instance.num_tests();
        let mut bits = BitSet::full(instance.num_hypotheses());
        let mut used = BitSet::empty(num_tests);
        let mut parent_bounds: Option<Rc<Vec<M>>> = None;
        let mut steps = Vec::new();

        loop {
            if self.terminated(&bits) {
                break;
            }
            let choice = match self.prepared.score {
                Score::EdgeMass => {
                    let node = self.select_edge_cutting(&bits, parent_bounds.as_ref())?;
                    parent_bounds = Some(node.bounds.clone());
                    node.choice.map(|t| (t, node.gain.clone()))
                }
                Score::ValueOfInformation => self.select_voi(&bits, &used)?,
            };
            let Some((t, gain)) = choice else {
                let version = VersionSpace::new(bits.clone(), instance.mass_of(&bits));
                if self
                    .prepared
                    .termination_instance
                    .feasible_from(&version)
                {
                    return Err(Error::InconsistentSelection(format!(
                        "policy {} stalled on a winnable state (truth {truth})",
                        self.prepared.policy.kind
                    )));
                }
                return Ok(PolicyTrace {
                    truth,
                    steps,
                    terminal_region: None,
                });
            };

            debug_assert!(!used.contains(t as usize), "a test was selected twice");
            used.insert(t as usize);
            let o = instance.outcome_raw(truth.index(), t as usize);
            instance.filter_in_place(&mut bits, TestId(t), OutcomeId(o));
            debug_assert!(bits.contains(truth.index()));
            let objective_after = self.objective_after(&bits)?.to_f64();
            steps.push(TraceStep {
                test: TestId(t),
                outcome: OutcomeId(o),
                gain: gain.to_f64(),
                objective_after,
            });
            if steps.len() > num_tests {
                return Err(Error::InconsistentSelection(
                    "selection loop exceeded the test count".into(),
                ));
            }
        }

        Ok(PolicyTrace {
            truth,
            steps,
            terminal_region: instance.solved_region(&bits),
        })
    }
}

/// Run a prepared policy against one ground truth.
///
/// Errors with [`Error::Infeasible`] when the policy exhausts its useful
/// tests before its termination condition (possible for GBS when distinct
/// hypotheses answer every test identically).
pub fn run_policy<M: Mass>(prepared: &PreparedPolicy, truth: HypothesisId) -> Result<PolicyTrace> {
    let mut runner = PolicyRunner::<M>::new(prepared)?;
    let trace = runner.run(truth)?;
    if trace.terminal_region.is_none() {
        return Err(Error::Infeasible(format!(
            "policy {} ran out of useful tests with the problem undecided (truth {truth})",
            prepared.policy.kind
        )));
    }
    Ok(trace)
}

/// Exact expected cost: run every hypothesis as ground truth and take the
/// prior-weighted sum of query counts.
pub fn expected_cost<M: Mass>(prepared: &PreparedPolicy) -> Result<PolicyEvaluation> {
    let start = Instant::now();
    let instance = prepared.original.as_ref();
    let mut runner = PolicyRunner::<M>::new(prepared)?;
    let mut per_hypothesis = Vec::with_capacity(instance.num_hypotheses());
    for h in 0..instance.num_hypotheses() {
        let truth = HypothesisId(h as u32);
        let trace = runner.run(truth)?;
        if trace.terminal_region.is_none() {
            return Err(Error::Infeasible(format!(
                "policy {} cannot finish for truth {truth}",
                prepared.policy.kind
            )));
        }
        per_hypothesis.push(trace.cost());
    }
    let expected = per_hypothesis
        .iter()
        .zip(instance.priors())
        .map(|(&c, &p)| p * c as f64)
        .sum();
    Ok(PolicyEvaluation {
        expected_cost: expected,
        max_cost: per_hypothesis.iter().copied().max().unwrap_or(0),
        per_hypothesis,
        wall: start.elapsed(),
    })
}
