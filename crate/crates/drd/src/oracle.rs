//! Independent brute-force oracles and property checkers.
//!
//! Everything here certifies the fast implementation on small instances from
//! the outside: the edge-weight oracle enumerates multisets directly instead
//! of using symmetric polynomials, the decidability checker re-derives
//! subregions and hunts for surviving hyperedges by subset search, and the
//! optimal-cost oracle solves the planning problem exhaustively. No oracle
//! calls the module it certifies; they share only [`ProblemInstance`].
//!
//! Checkers return an [`OracleReport`] rather than erroring so a sweep can
//! collect every counterexample in a seed range.

use std::collections::HashMap;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::arith::Mass;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::hypergraph::SubregionIndex;
use crate::instance::{
    consistent_hypotheses, CoverageMode, Evidence, HypothesisId, InstanceParts, OutcomeId,
    ProblemInstance, RegionId, TestId,
};
use crate::policies::{edge_gain, expected_cost, make_baseline, GainScratch, PolicyKind};
use crate::weights::{embedded_priors, hyperedge_weight, masses_from_priors};

/// Limits for [`brute_force_edge_weight`]: beyond these the enumeration is
/// no longer a quick certificate.
const MAX_ORACLE_SUBREGIONS: usize = 10;
const MAX_ORACLE_CARDINALITY: usize = 5;

/// Limits for [`optimal_policy_cost`] (exponential search).
const MAX_OPTIMAL_HYPOTHESES: usize = 10;
const MAX_OPTIMAL_TESTS: usize = 8;

/// One failed assertion: the instance seed that produced it, the evidence
/// state it occurred at, the test involved (if any), and a description.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub seed: u64,
    pub evidence: Vec<(TestId, OutcomeId)>,
    pub test: Option<TestId>,
    pub detail: String,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "seed {}: {}", self.seed, self.detail)?;
        if let Some(t) = self.test {
            write!(f, " [test {t}]")?;
        }
        if !self.evidence.is_empty() {
            write!(f, " at evidence")?;
            for (t, o) in &self.evidence {
                write!(f, " ({t}:{o})")?;
            }
        }
        Ok(())
    }
}

/// Outcome of one oracle sweep. Passing means no counterexamples; the
/// deviation field tracks whatever magnitude the check watches (absolute
/// error for equivalence checks, violation size for inequalities, the worst
/// cost ratio for the approximation bound).
#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub checks: u64,
    pub max_deviation: f64,
    pub counterexamples: Vec<Counterexample>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn observe(&mut self, deviation: f64) {
        if deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} checks, max deviation {:.3e}, {} counterexample(s)",
            self.checks,
            self.max_deviation,
            self.counterexamples.len()
        )
    }
}

/// Surviving edge mass by definition: enumerate every multiset of `k`
/// subregions, keep those sharing no region, sum the products of their
/// masses (with multiplicity).
///
/// `memberships[g]` lists the regions containing subregion `g`, ascending.
pub fn brute_force_edge_weight<M: Mass>(
    masses: &[M],
    memberships: &[Vec<RegionId>],
    k: usize,
) -> Result<M> {
    if masses.len() != memberships.len() {
        return Err(Error::OracleLimits(format!(
            "{} masses against {} membership lists",
            masses.len(),
            memberships.len()
        )));
    }
    if masses.len() > MAX_ORACLE_SUBREGIONS || k > MAX_ORACLE_CARDINALITY {
        return Err(Error::OracleLimits(format!(
            "brute force handles at most {MAX_ORACLE_SUBREGIONS} subregions at cardinality ≤ {MAX_ORACLE_CARDINALITY}, got {} at {k}",
            masses.len()
        )));
    }

    fn recurse<M: Mass>(
        masses: &[M],
        memberships: &[Vec<RegionId>],
        slots_left: usize,
        start: usize,
        shared: Option<&[RegionId]>,
        product: &M,
        total: &mut M,
    ) {
        if slots_left == 0 {
            if shared.map_or(false, |s| s.is_empty()) {
                total.add_assign(product);
            }
            return;
        }
        for g in start..masses.len() {
            let next_shared: Vec<RegionId> = match shared {
                None => memberships[g].clone(),
                Some(s) => intersect_sorted(s, &memberships[g]),
            };
            let next_product = product.mul(&masses[g]);
            recurse(
                masses,
                memberships,
                slots_left - 1,
                g,
                Some(&next_shared),
                &next_product,
                total,
            );
        }
    }

    let mut total = M::zero();
    recurse(masses, memberships, k, 0, None, &M::one(), &mut total);
    Ok(total)
}

fn intersect_sorted(a: &[RegionId], b: &[RegionId]) -> Vec<RegionId> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Exact optimal expected query cost, by exhaustive adaptive planning.
///
/// Depth-first search over version spaces with memoization: a state's cost is
/// zero when decided, otherwise one plus the outcome-weighted cost of the
/// best informative test. Tests that don't split the current version space
/// are pruned — answering one changes nothing — which also makes the
/// surviving test set a function of the version space, so the bitset alone is
/// a sound memo key.
pub fn optimal_policy_cost(instance: &ProblemInstance) -> Result<f64> {
    if instance.num_hypotheses() > MAX_OPTIMAL_HYPOTHESES
        || instance.num_tests() > MAX_OPTIMAL_TESTS
    {
        return Err(Error::OracleLimits(format!(
            "exhaustive planning handles ≤ {MAX_OPTIMAL_HYPOTHESES} hypotheses and ≤ {MAX_OPTIMAL_TESTS} tests, got {} and {}",
            instance.num_hypotheses(),
            instance.num_tests()
        )));
    }

    fn solve(
        instance: &ProblemInstance,
        bits: &BitSet,
        memo: &mut HashMap<BitSet, f64>,
    ) -> Result<f64> {
        if instance.solved_region(bits).is_some() {
            return Ok(0.0);
        }
        if let Some(&cost) = memo.get(bits) {
            return Ok(cost);
        }
        let total = instance.mass_of(bits);
        let mut best: Option<f64> = None;
        for t in 0..instance.num_tests() {
            let arity = instance.arity(TestId(t as u32)) as usize;
            let mut children = vec![BitSet::empty(instance.num_hypotheses()); arity];
            for h in bits.iter() {
                children[instance.outcome_raw(h, t) as usize].insert(h);
            }
            if children.iter().filter(|c| !c.is_empty()).count() < 2 {
                continue;
            }
            let mut cost = 1.0;
            for child in children.iter().filter(|c| !c.is_empty()) {
                cost += instance.mass_of(child) / total * solve(instance, child, memo)?;
            }
            if best.map_or(true, |b| cost < b) {
                best = Some(cost);
            }
        }
        match best {
            Some(cost) => {
                memo.insert(bits.clone(), cost);
                Ok(cost)
            }
            None => Err(Error::Infeasible(format!(
                "undecided state {bits:?} has no test splitting it"
            ))),
        }
    }

    let mut memo = HashMap::new();
    solve(instance, &BitSet::full(instance.num_hypotheses()), &mut memo)
}

/// Seeded random instance family the checkers draw from: 4–10 hypotheses
/// with integer weights, 3–8 tests of arity 2–3, 2–5 regions, every
/// hypothesis covered (one primary region plus independent 30% extras).
pub fn random_instance(seed: u64) -> ProblemInstance {
    random_sized(seed, 4..=10, 3..=8, 2..=5)
}

/// Smaller family fitting the exhaustive-planning limits: 3–8 hypotheses,
/// 2–6 tests, 2–4 regions.
pub fn random_tiny_instance(seed: u64) -> ProblemInstance {
    random_sized(seed, 3..=8, 2..=6, 2..=4)
}

/// Tiny instances filtered to be decidable from the start, by deterministic
/// resampling on derived seeds.
pub fn random_feasible_tiny_instance(seed: u64) -> ProblemInstance {
    for attempt in 0.. {
        let instance = random_tiny_instance(derived_seed(seed, attempt));
        let version = consistent_hypotheses(&instance, &Evidence::empty())
            .expect("empty evidence never contradicts");
        if instance.feasible_from(&version) {
            return instance;
        }
    }
    unreachable!("the sampler is dense in feasible instances")
}

fn derived_seed(seed: u64, attempt: u64) -> u64 {
    seed.wrapping_mul(0x0000_0100_0000_01b3)
        .wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_sized(
    seed: u64,
    hypotheses: std::ops::RangeInclusive<usize>,
    tests: std::ops::RangeInclusive<usize>,
    regions: std::ops::RangeInclusive<usize>,
) -> ProblemInstance {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let num_h = rng.gen_range(hypotheses);
    let num_t = rng.gen_range(tests);
    let num_r = rng.gen_range(regions);
    let weights: Vec<f64> = (0..num_h).map(|_| rng.gen_range(1..=9) as f64).collect();
    let arities: Vec<u32> = (0..num_t).map(|_| rng.gen_range(2..=3)).collect();
    let outcomes: Vec<Vec<u32>> = (0..num_h)
        .map(|_| arities.iter().map(|&a| rng.gen_range(0..a)).collect())
        .collect();
    let mut regions: Vec<Vec<u32>> = vec![Vec::new(); num_r];
    for h in 0..num_h {
        let primary = rng.gen_range(0..num_r);
        regions[primary].push(h as u32);
        for (r, region) in regions.iter_mut().enumerate() {
            if r != primary && rng.gen_bool(0.3) {
                region.push(h as u32);
            }
        }
    }
    regions.retain(|r| !r.is_empty());
    let parts = InstanceParts {
        weights,
        arities,
        outcomes,
        regions,
    };
    ProblemInstance::from_parts(parts, CoverageMode::Strict)
        .expect("generated instances are valid and covered")
        .0
}

/// The subregion structure re-derived from scratch: surviving hypotheses
/// grouped by identical region membership, plus the cardinality formula.
struct LocalHypergraph {
    /// (signature, members) per subregion, in first-member order.
    groups: Vec<(Vec<RegionId>, Vec<usize>)>,
    k: usize,
}

impl LocalHypergraph {
    fn build(instance: &ProblemInstance) -> Self {
        let mut groups: Vec<(Vec<RegionId>, Vec<usize>)> = Vec::new();
        for h in 0..instance.num_hypotheses() {
            let sig = instance.regions_of(HypothesisId(h as u32)).to_vec();
            match groups.iter_mut().find(|(s, _)| *s == sig) {
                Some((_, members)) => members.push(h),
                None => groups.push((sig, vec![h])),
            }
        }
        let max_degree = groups.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
        let max_per_region = (0..instance.num_regions())
            .map(|r| {
                groups
                    .iter()
                    .filter(|(s, _)| s.contains(&RegionId(r as u32)))
                    .count()
            })
            .max()
            .unwrap_or(0);
        let k = max_degree.min(max_per_region).max(1) + 1;
        LocalHypergraph { groups, k }
    }

    /// Whether any hyperedge survives: some multiset of `k` surviving
    /// subregions shares no region. Repeats never change an intersection, so
    /// this reduces to a subset of **distinct** survivors of size ≤ k with
    /// empty shared-region set, found by depth-first search.
    fn surviving_edge_exists(&self, bits: &BitSet) -> bool {
        let alive: Vec<&[RegionId]> = self
            .groups
            .iter()
            .filter(|(_, members)| members.iter().any(|&h| bits.contains(h)))
            .map(|(sig, _)| sig.as_slice())
            .collect();

        fn dfs(alive: &[&[RegionId]], start: usize, shared: &[RegionId], left: usize) -> bool {
            if shared.is_empty() {
                return true;
            }
            if left == 0 {
                return false;
            }
            for g in start..alive.len() {
                let next = intersect_sorted(shared, alive[g]);
                if dfs(alive, g + 1, &next, left - 1) {
                    return true;
                }
            }
            false
        }

        for g in 0..alive.len() {
            if dfs(&alive, g + 1, alive[g], self.k - 1) {
                return true;
            }
        }
        false
    }
}

fn walk_rng(seed: u64, walk: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derived_seed(seed, walk.wrapping_add(1)))
}

fn theorem1_on_instance(
    instance: &ProblemInstance,
    seed: u64,
    walks: usize,
    report: &mut OracleReport,
) {
    let local = LocalHypergraph::build(instance);
    for walk in 0..walks {
        let mut rng = walk_rng(seed, walk as u64);
        let truth = rng.gen_range(0..instance.num_hypotheses());
        let mut order: Vec<usize> = (0..instance.num_tests()).collect();
        order.shuffle(&mut rng);
        let mut bits = BitSet::full(instance.num_hypotheses());
        let mut evidence: Vec<(TestId, OutcomeId)> = Vec::new();
        let mut next = 0;
        loop {
            let solved = instance.solved_region(&bits).is_some();
            let edge = local.surviving_edge_exists(&bits);
            report.checks += 1;
            if solved == edge {
                report.counterexamples.push(Counterexample {
                    seed,
                    evidence: evidence.clone(),
                    test: None,
                    detail: format!("solved={solved} but surviving hyperedge={edge}"),
                });
                report.observe(1.0);
                break;
            }
            if solved || next == order.len() {
                break;
            }
            let t = order[next];
            next += 1;
            let o = instance.outcome_raw(truth, t);
            instance.filter_in_place(&mut bits, TestId(t as u32), OutcomeId(o));
            evidence.push((TestId(t as u32), OutcomeId(o)));
        }
    }
}

/// Decidability ⟺ no surviving hyperedge, asserted at every state of random
/// truthful walks, with edges detected by independent subset search.
pub fn check_theorem1(instance_seeds: Range<u64>, walks_per_instance: usize) -> OracleReport {
    let mut report = OracleReport::default();
    for seed in instance_seeds {
        let instance = random_instance(seed);
        theorem1_on_instance(&instance, seed, walks_per_instance, &mut report);
    }
    report
}

fn adaptive_properties_on_instance<M: Mass>(
    instance: &ProblemInstance,
    index: &SubregionIndex,
    seed: u64,
    chains: usize,
    report: &mut OracleReport,
) {
    let tol = M::gain_floor();
    // Hoisted across every chain and state: the embedded prior never changes,
    // and neither does the full-prior edge mass. This matters in exact mode,
    // where each rational operation costs an allocation.
    let priors = match embedded_priors::<M>(instance) {
        Ok(p) => p,
        Err(e) => {
            report.counterexamples.push(Counterexample {
                seed,
                evidence: Vec::new(),
                test: None,
                detail: format!("prior embedding failed: {e}"),
            });
            return;
        }
    };
    let full = BitSet::full(instance.num_hypotheses());
    let w_total = match hyperedge_weight(index, &masses_from_priors(index, &full, &priors)) {
        Ok(w) => w,
        Err(e) => {
            report.counterexamples.push(Counterexample {
                seed,
                evidence: Vec::new(),
                test: None,
                detail: format!("total weight failed: {e}"),
            });
            return;
        }
    };
    let mut scratch = GainScratch::new(instance, index);
    for chain in 0..chains {
        let mut rng = walk_rng(seed, chain as u64);
        let truth = HypothesisId(rng.gen_range(0..instance.num_hypotheses()) as u32);
        let mut order: Vec<u32> = (0..instance.num_tests() as u32).collect();
        order.shuffle(&mut rng);

        // Truthful prefix states S_0 ⊆ S_1 ⊆ … along the shuffled order.
        let mut states = vec![Evidence::empty()];
        for &t in &order {
            let t = TestId(t);
            let last = states.last().expect("never empty");
            let version = match consistent_hypotheses(instance, last) {
                Ok(v) => v,
                Err(e) => {
                    report.counterexamples.push(Counterexample {
                        seed,
                        evidence: last.pairs().to_vec(),
                        test: Some(t),
                        detail: format!("state evaluation failed: {e}"),
                    });
                    return;
                }
            };
            if instance.solved_region(version.bits()).is_some() {
                break;
            }
            let o = instance.outcome(truth, t);
            match crate::instance::apply_test(instance, last, t, o) {
                Ok(next) => states.push(next),
                Err(e) => {
                    report.counterexamples.push(Counterexample {
                        seed,
                        evidence: last.pairs().to_vec(),
                        test: Some(t),
                        detail: format!("extension failed: {e}"),
                    });
                    return;
                }
            }
        }

        // One weight evaluation per state, shared by the objective and every
        // per-test gain at that state.
        let mut objectives: Vec<M> = Vec::with_capacity(states.len());
        let mut gains: Vec<Vec<Option<M>>> = Vec::with_capacity(states.len());
        for s in &states {
            let evaluated = (|| -> Result<(M, Vec<Option<M>>)> {
                let version = consistent_hypotheses(instance, s)?;
                let masses = masses_from_priors(index, version.bits(), &priors);
                let w_cur = hyperedge_weight(index, &masses)?;
                let f = w_total.sub(&w_cur);
                if f.is_negative_beyond_tolerance() {
                    return Err(Error::NegativeMass {
                        value: f.to_f64(),
                        context: "objective".into(),
                    });
                }
                let per_test = (0..instance.num_tests())
                    .map(|t| {
                        if s.contains_test(TestId(t as u32)) {
                            return None;
                        }
                        edge_gain(instance, index, &priors, version.bits(), &w_cur, t, &mut scratch)
                            .ok()
                    })
                    .collect();
                Ok((f.clamp_rounding(), per_test))
            })();
            match evaluated {
                Ok((f, per_test)) => {
                    objectives.push(f);
                    gains.push(per_test);
                }
                Err(e) => {
                    report.counterexamples.push(Counterexample {
                        seed,
                        evidence: s.pairs().to_vec(),
                        test: None,
                        detail: format!("state evaluation failed: {e}"),
                    });
                    return;
                }
            }
        }

        // Strong adaptive monotonicity: f never decreases along the chain.
        for (i, pair) in objectives.windows(2).enumerate() {
            report.checks += 1;
            let drop = pair[0].sub(&pair[1]);
            if drop > M::zero() {
                report.observe(drop.to_f64());
            }
            if drop > tol {
                report.counterexamples.push(Counterexample {
                    seed,
                    evidence: states[i + 1].pairs().to_vec(),
                    test: None,
                    detail: format!(
                        "objective decreased by {} along a truthful extension",
                        drop.to_f64()
                    ),
                });
            }
        }

        // Adaptive submodularity: gains never grow as evidence accumulates.
        for j in 1..states.len() {
            for t in 0..instance.num_tests() {
                let Some(later) = &gains[j][t] else { continue };
                for i in 0..j {
                    let Some(earlier) = &gains[i][t] else {
                        continue;
                    };
                    report.checks += 1;
                    let excess = later.sub(earlier);
                    if excess > M::zero() {
                        report.observe(excess.to_f64());
                    }
                    if excess > tol {
                        report.counterexamples.push(Counterexample {
                            seed,
                            evidence: states[j].pairs().to_vec(),
                            test: Some(TestId(t as u32)),
                            detail: format!(
                                "gain grew by {} from state {i} to state {j}",
                                excess.to_f64()
                            ),
                        });
                    }
                }
            }
        }
    }
}

/// Adaptive submodularity and strong adaptive monotonicity of the edge-mass
/// objective, sampled over truthful evidence chains. Float mode tolerates
/// 1e-9; exact mode tolerates nothing.
pub fn check_adaptive_properties<M: Mass>(
    instance_seeds: Range<u64>,
    chains_per_instance: usize,
) -> OracleReport {
    let mut report = OracleReport::default();
    for seed in instance_seeds {
        let instance = random_instance(seed);
        let index = SubregionIndex::build(&instance);
        adaptive_properties_on_instance::<M>(
            &instance,
            &index,
            seed,
            chains_per_instance,
            &mut report,
        );
    }
    report
}

/// The near-optimality guarantee: greedy expected cost within the
/// (k·ln(1/p_min) + 1) factor of the exhaustive optimum, on decidable tiny
/// instances. The report's deviation field carries the worst observed
/// cost ratio.
pub fn check_theorem3(instance_seeds: Range<u64>) -> OracleReport {
    let mut report = OracleReport::default();
    for seed in instance_seeds {
        let instance = std::sync::Arc::new(random_feasible_tiny_instance(seed));
        report.checks += 1;
        let outcome = (|| -> Result<(f64, f64, f64)> {
            let prepared = make_baseline(PolicyKind::Hec, &instance, seed)?;
            let greedy = expected_cost::<f64>(&prepared)?.expected_cost;
            let optimal = optimal_policy_cost(&instance)?;
            let k = prepared.selection_k() as f64;
            let p_min = instance
                .priors()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let bound = k * (1.0 / p_min).ln() + 1.0;
            Ok((greedy, optimal, bound))
        })();
        match outcome {
            Ok((greedy, optimal, bound)) => {
                if optimal > 0.0 {
                    report.observe(greedy / optimal);
                }
                if greedy > bound * optimal + 1e-9 {
                    report.counterexamples.push(Counterexample {
                        seed,
                        evidence: Vec::new(),
                        test: None,
                        detail: format!(
                            "greedy cost {greedy} exceeds {bound:.4} × optimal cost {optimal}"
                        ),
                    });
                }
            }
            Err(e) => report.counterexamples.push(Counterexample {
                seed,
                evidence: Vec::new(),
                test: None,
                detail: format!("evaluation failed: {e}"),
            }),
        }
    }
    report
}

/// Instances small enough for the brute-force weight oracle, by
/// deterministic resampling: at most 8 subregions at cardinality ≤ 4.
fn small_weight_instance(seed: u64) -> (ProblemInstance, SubregionIndex) {
    for attempt in 0.. {
        let instance = random_tiny_instance(derived_seed(seed, attempt));
        let index = SubregionIndex::build(&instance);
        if index.num_subregions() <= 8 && index.k() <= 4 {
            return (instance, index);
        }
    }
    unreachable!("tiny instances almost always fit the oracle limits")
}

/// Fast edge weight against the multisets-by-definition oracle, at the full
/// version space and a few random truthful states per instance.
pub fn check_weight_equivalence<M: Mass>(
    instance_seeds: Range<u64>,
    states_per_instance: usize,
) -> OracleReport {
    let mut report = OracleReport::default();
    let tol = if M::EXACT { 0.0 } else { 1e-9 };
    for seed in instance_seeds {
        let (instance, index) = small_weight_instance(seed);
        let priors = match embedded_priors::<M>(&instance) {
            Ok(p) => p,
            Err(e) => {
                report.counterexamples.push(Counterexample {
                    seed,
                    evidence: Vec::new(),
                    test: None,
                    detail: format!("prior embedding failed: {e}"),
                });
                continue;
            }
        };
        let memberships: Vec<Vec<RegionId>> = index
            .subregions()
            .iter()
            .map(|g| g.signature.clone())
            .collect();

        for state in 0..states_per_instance.max(1) {
            let mut bits = BitSet::full(instance.num_hypotheses());
            let mut evidence: Vec<(TestId, OutcomeId)> = Vec::new();
            if state > 0 {
                let mut rng = walk_rng(seed, state as u64);
                let truth = rng.gen_range(0..instance.num_hypotheses());
                let steps = rng.gen_range(1..=instance.num_tests());
                let mut order: Vec<usize> = (0..instance.num_tests()).collect();
                order.shuffle(&mut rng);
                for &t in order.iter().take(steps) {
                    let o = instance.outcome_raw(truth, t);
                    instance.filter_in_place(&mut bits, TestId(t as u32), OutcomeId(o));
                    evidence.push((TestId(t as u32), OutcomeId(o)));
                }
            }
            let masses = masses_from_priors(&index, &bits, &priors);
            report.checks += 1;
            let comparison = hyperedge_weight(&index, &masses).and_then(|fast| {
                brute_force_edge_weight(&masses, &memberships, index.k()).map(|brute| (fast, brute))
            });
            match comparison {
                Ok((fast, brute)) => {
                    let deviation = (fast.to_f64() - brute.to_f64()).abs();
                    report.observe(deviation);
                    let mismatch = if M::EXACT {
                        fast != brute
                    } else {
                        deviation > tol
                    };
                    if mismatch {
                        report.counterexamples.push(Counterexample {
                            seed,
                            evidence: evidence.clone(),
                            test: None,
                            detail: format!(
                                "edge weight {} differs from oracle {} (|Δ| = {deviation:.3e})",
                                fast.to_f64(),
                                brute.to_f64()
                            ),
                        });
                    }
                }
                Err(e) => report.counterexamples.push(Counterexample {
                    seed,
                    evidence: evidence.clone(),
                    test: None,
                    detail: format!("weight evaluation failed: {e}"),
                }),
            }
        }
    }
    report
}
