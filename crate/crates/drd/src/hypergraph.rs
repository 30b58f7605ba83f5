//! The splitting hypergraph over subregions.
//!
//! Hypotheses sharing the same set of containing regions collapse into one
//! *subregion*. A multiset of subregions of cardinality `k` is a *hyperedge*
//! when no single region contains all its members; the problem is decided
//! exactly when every hyperedge has lost a member (equivalently, when the
//! surviving edge mass is zero — see [`solved_iff_edges_cut`]).
//!
//! `k` comes from the structure: one more than the smaller of the maximum
//! number of regions any hypothesis belongs to and the maximum number of
//! subregions inside any region. *Shared-region sets* (ζ-sets) — subsets of
//! subregions that fit inside one region together — are what the weight
//! computation subtracts; they are enumerated level by level, extending only
//! sets that still share a region, which is exact because "shares a region"
//! is closed under taking subsets.

use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::instance::{Evidence, HypothesisId, ProblemInstance, RegionId};
use crate::weights;

/// Index of a subregion; dense 0..n in order of first member hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubregionId(pub u32);

impl SubregionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SubregionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A maximal group of hypotheses with identical region membership.
#[derive(Debug, Clone)]
pub struct Subregion {
    pub id: SubregionId,
    /// Containing regions, ascending. Distinct across subregions.
    pub signature: Vec<RegionId>,
    /// Member hypotheses, ascending. Subregions partition the hypotheses.
    pub members: Vec<HypothesisId>,
    /// Total prior mass of the members.
    pub mass: f64,
}

/// A set of subregions jointly contained in at least one region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedRegionSet {
    /// Member subregions, ascending, 1..=k of them.
    pub members: Vec<SubregionId>,
    /// Lowest-index region containing all members.
    pub witness: RegionId,
}

/// Group hypotheses into subregions.
///
/// Deterministic: subregions are numbered in order of their lowest member
/// hypothesis, members ascend within each.
pub fn compute_subregions(instance: &ProblemInstance) -> Vec<Subregion> {
    let mut subregions: Vec<Subregion> = Vec::new();
    for h in 0..instance.num_hypotheses() {
        let h = HypothesisId(h as u32);
        let signature = instance.regions_of(h);
        match subregions.iter_mut().find(|s| s.signature == signature) {
            Some(sub) => {
                sub.members.push(h);
                sub.mass += instance.prior(h);
            }
            None => subregions.push(Subregion {
                id: SubregionId(subregions.len() as u32),
                signature: signature.to_vec(),
                members: vec![h],
                mass: instance.prior(h),
            }),
        }
    }
    subregions
}

fn cardinality_from_subregions(instance: &ProblemInstance, subregions: &[Subregion]) -> usize {
    let max_degree = (0..instance.num_hypotheses())
        .map(|h| instance.regions_of(HypothesisId(h as u32)).len())
        .max()
        .unwrap_or(0);
    let mut per_region = vec![0usize; instance.num_regions()];
    for sub in subregions {
        for r in &sub.signature {
            per_region[r.index()] += 1;
        }
    }
    let max_per_region = per_region.iter().copied().max().unwrap_or(0);
    max_degree.min(max_per_region).max(1) + 1
}

/// The hyperedge cardinality the structure requires:
/// `min(max regions per hypothesis, max subregions per region) + 1`,
/// never below 2.
pub fn cardinality_k(instance: &ProblemInstance) -> usize {
    cardinality_from_subregions(instance, &compute_subregions(instance))
}

/// Enumerate every shared-region set of size 1..=k.
///
/// Returned ascending by (size, members). Exposed for inspection and the
/// brute-force oracles; [`SubregionIndex`] keeps its own flat copy.
pub fn enumerate_shared_sets(subregions: &[Subregion], k: usize) -> Vec<SharedRegionSet> {
    let universe = subregions
        .iter()
        .flat_map(|s| s.signature.iter().map(|r| r.index() + 1))
        .max()
        .unwrap_or(0);
    let sig_bits: Vec<BitSet> = subregions
        .iter()
        .map(|s| {
            let mut bits = BitSet::empty(universe);
            for r in &s.signature {
                bits.insert(r.index());
            }
            bits
        })
        .collect();

    let mut out = Vec::new();
    // Working level: (members, common-region bits).
    let mut level: Vec<(Vec<SubregionId>, BitSet)> = subregions
        .iter()
        .filter(|s| !s.signature.is_empty())
        .map(|s| (vec![s.id], sig_bits[s.id.index()].clone()))
        .collect();
    for _ in 0..k {
        for (members, common) in &level {
            out.push(SharedRegionSet {
                members: members.clone(),
                witness: RegionId(common.first().expect("nonempty by construction") as u32),
            });
        }
        let mut next = Vec::new();
        for (members, common) in &level {
            let last = members.last().expect("sets are nonempty").index();
            for g in last + 1..subregions.len() {
                if common.intersects(&sig_bits[g]) {
                    let mut extended = members.clone();
                    extended.push(SubregionId(g as u32));
                    next.push((extended, common.intersection(&sig_bits[g])));
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    out
}

/// Shared-region sets flattened for the weight loops: member indices live in
/// one arena, each set is (offset, length, witness).
#[derive(Debug, Clone)]
pub(crate) struct ZetaList {
    arena: Vec<u32>,
    sets: Vec<(u32, u8, u32)>,
}

impl ZetaList {
    fn from_sets(sets: &[SharedRegionSet]) -> Self {
        let mut arena = Vec::new();
        let mut flat = Vec::with_capacity(sets.len());
        for set in sets {
            let offset = arena.len() as u32;
            arena.extend(set.members.iter().map(|g| g.0));
            flat.push((offset, set.members.len() as u8, set.witness.0));
        }
        ZetaList { arena, sets: flat }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (&[u32], RegionId)> + '_ {
        self.sets.iter().map(|&(offset, len, witness)| {
            (
                &self.arena[offset as usize..offset as usize + len as usize],
                RegionId(witness),
            )
        })
    }
}

/// Subregion structure of one instance, frozen for weight computations.
#[derive(Debug, Clone)]
pub struct SubregionIndex {
    subregions: Vec<Subregion>,
    k: usize,
    shared_sets: Vec<SharedRegionSet>,
    zeta: ZetaList,
    subregion_of: Vec<u32>,
    sig_bits: Vec<BitSet>,
}

impl SubregionIndex {
    /// Build with the cardinality the formula dictates.
    pub fn build(instance: &ProblemInstance) -> Self {
        Self::with_requested_k(instance, None).expect("formula cardinality is always accepted")
    }

    /// Build with an explicit cardinality. Values below the formula's are
    /// rejected (the solved-iff-cut equivalence would break); larger values
    /// are allowed.
    pub fn build_with_k(instance: &ProblemInstance, k: usize) -> Result<Self> {
        Self::with_requested_k(instance, Some(k))
    }

    fn with_requested_k(instance: &ProblemInstance, requested: Option<usize>) -> Result<Self> {
        let subregions = compute_subregions(instance);
        let formula = cardinality_from_subregions(instance, &subregions);
        let k = match requested {
            None => formula,
            Some(k) if k >= formula => k,
            Some(k) => {
                return Err(Error::CardinalityBelowFormula {
                    requested: k,
                    formula,
                })
            }
        };

        let shared_sets = enumerate_shared_sets(&subregions, k);
        let zeta = ZetaList::from_sets(&shared_sets);

        let mut subregion_of = vec![0u32; instance.num_hypotheses()];
        for sub in &subregions {
            for h in &sub.members {
                subregion_of[h.index()] = sub.id.0;
            }
        }
        let sig_bits = subregions
            .iter()
            .map(|s| {
                let mut bits = BitSet::empty(instance.num_regions());
                for r in &s.signature {
                    bits.insert(r.index());
                }
                bits
            })
            .collect();

        Ok(SubregionIndex {
            subregions,
            k,
            shared_sets,
            zeta,
            subregion_of,
            sig_bits,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn subregions(&self) -> &[Subregion] {
        &self.subregions
    }

    pub fn num_subregions(&self) -> usize {
        self.subregions.len()
    }

    /// All shared-region sets, ascending by (size, members).
    pub fn shared_sets(&self) -> &[SharedRegionSet] {
        &self.shared_sets
    }

    pub(crate) fn zeta(&self) -> &ZetaList {
        &self.zeta
    }

    pub fn subregion_of(&self, h: HypothesisId) -> SubregionId {
        SubregionId(self.subregion_of[h.index()])
    }

    pub(crate) fn subregion_of_raw(&self, h: usize) -> usize {
        self.subregion_of[h] as usize
    }
}

/// Is this cardinality-k multiset of subregions a hyperedge — i.e. does no
/// single region contain all its members? Repeats are allowed; only distinct
/// members constrain the answer.
pub fn is_hyperedge(index: &SubregionIndex, multiset: &[SubregionId]) -> Result<bool> {
    if multiset.len() != index.k {
        return Err(Error::WrongCardinality {
            got: multiset.len(),
            expected: index.k,
        });
    }
    let mut distinct: Vec<SubregionId> = multiset.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let first = match distinct.first() {
        Some(g) => g.index(),
        None => return Ok(false),
    };
    let mut common = index.sig_bits[first].clone();
    for g in &distinct[1..] {
        common.intersect_with(&index.sig_bits[g.index()]);
    }
    Ok(common.is_empty())
}

/// Both sides of the solved-iff-edges-cut equivalence at one evidence state.
#[derive(Debug, Clone, Copy)]
pub struct Theorem1Witness {
    /// Version space inside a single region, checked directly.
    pub solved: bool,
    /// Surviving hyperedge mass is zero.
    pub edges_cut: bool,
}

impl Theorem1Witness {
    pub fn holds(&self) -> bool {
        self.solved == self.edges_cut
    }
}

/// Evaluate both the direct containment check and the surviving edge mass at
/// this evidence state. The two must agree at every reachable state; the
/// greedy stopping rule leans on that equivalence.
pub fn solved_iff_edges_cut(
    instance: &ProblemInstance,
    evidence: &Evidence,
    index: &SubregionIndex,
) -> Result<Theorem1Witness> {
    let version = crate::instance::consistent_hypotheses(instance, evidence)?;
    let solved = instance.solved_region(version.bits()).is_some();
    let masses: Vec<f64> = weights::surviving_masses(instance, index, version.bits());
    let w = weights::hyperedge_weight(index, &masses)?;
    Ok(Theorem1Witness {
        solved,
        edges_cut: w <= crate::arith::FLOAT_EPS,
    })
}
