//! Hyperedge masses via complete homogeneous symmetric polynomials.
//!
//! The surviving hyperedge mass at a state is a sum over cardinality-k
//! multisets of subregion-mass products — exponentially many terms read
//! literally. It collapses to
//!
//! ```text
//! W(n) = CHP_k(n) − Σ_ζ  (∏_{g∈ζ} n_g) · CHP_{k−|ζ|}(n restricted to ζ)
//! ```
//!
//! where `CHP_d` is the degree-`d` complete homogeneous symmetric polynomial
//! (every multiset product of its inputs) and ζ ranges over the shared-region
//! sets: each correction removes exactly the multisets whose distinct members
//! are ζ — forcing one link to each member keeps the corrections disjoint.
//! `CHP` itself evaluates in `O(d·|n|)` by the Newton–Girard recurrence
//! `d·CHP_d = Σ_{j=1..d} CHP_{d−j}·PS_j` over power sums.
//!
//! Everything here is generic over [`Mass`], so the same code path runs fast
//! floats and exact rationals.

use crate::arith::{mass_sum, Mass};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::hypergraph::{SharedRegionSet, SubregionIndex};
use crate::instance::{Evidence, ProblemInstance};

/// Power sums `PS_j = Σ_i values[i]^j` for `j = 1..=max_degree`.
pub fn power_sums<M: Mass>(values: &[M], max_degree: usize) -> Vec<M> {
    let mut sums = Vec::with_capacity(max_degree);
    let mut powers: Vec<M> = values.to_vec();
    for j in 0..max_degree {
        if j > 0 {
            for (p, v) in powers.iter_mut().zip(values) {
                *p = p.mul(v);
            }
        }
        sums.push(mass_sum(&powers));
    }
    sums
}

/// `CHP_0..=max_degree` of `values` by Newton–Girard.
pub fn chp_table<M: Mass>(values: &[M], max_degree: usize) -> Vec<M> {
    let ps = power_sums(values, max_degree);
    let mut table = Vec::with_capacity(max_degree + 1);
    table.push(M::one());
    for d in 1..=max_degree {
        let mut acc = M::zero();
        for j in 1..=d {
            acc.add_assign(&table[d - j].mul(&ps[j - 1]));
        }
        table.push(acc.div(&M::from_count(d)));
    }
    table
}

/// Degree-`degree` complete homogeneous symmetric polynomial of `values`.
pub fn chp<M: Mass>(values: &[M], degree: usize) -> M {
    chp_table(values, degree).pop().expect("table is never empty")
}

/// Correction weight of one shared-region set under hyperedge cardinality
/// `k`: the total mass of cardinality-k multisets whose distinct members are
/// exactly ζ — one forced link per member, the remaining `k − |ζ|` links free
/// among the members.
pub fn zeta_weight<M: Mass>(zeta: &SharedRegionSet, masses: &[M], k: usize) -> M {
    let member_masses: Vec<M> = zeta
        .members
        .iter()
        .map(|g| masses[g.index()].clone())
        .collect();
    let mut forced = M::one();
    for m in &member_masses {
        forced = forced.mul(m);
    }
    forced.mul(&chp(&member_masses, k - zeta.members.len()))
}

/// Total mass of surviving hyperedges for one per-subregion mass vector.
///
/// Deterministic: the ζ corrections are summed in the index's stored order
/// (ascending by size, then members). A result negative beyond tolerance is
/// an arithmetic fault and errors; tiny float undershoot clamps to zero.
pub fn hyperedge_weight<M: Mass>(index: &SubregionIndex, masses: &[M]) -> Result<M> {
    debug_assert_eq!(masses.len(), index.num_subregions());
    let k = index.k();
    let all = chp(masses, k);

    let mut corrections = M::zero();
    let mut member_masses: Vec<M> = Vec::with_capacity(k);
    'zeta: for (members, _witness) in index.zeta().iter() {
        member_masses.clear();
        let mut forced = M::one();
        for &g in members {
            let m = &masses[g as usize];
            if m.is_zero() {
                continue 'zeta;
            }
            forced = forced.mul(m);
            member_masses.push(m.clone());
        }
        let tail = chp(&member_masses, k - members.len());
        corrections.add_assign(&forced.mul(&tail));
    }

    let w = all.sub(&corrections);
    if w.is_negative_beyond_tolerance() {
        return Err(Error::NegativeMass {
            value: w.to_f64(),
            context: "hyperedge weight".into(),
        });
    }
    Ok(w.clamp_rounding())
}

/// Instance priors embedded into `M` and renormalized there, so exact modes
/// get a prior that sums to exactly one.
pub fn embedded_priors<M: Mass>(instance: &ProblemInstance) -> Result<Vec<M>> {
    let embedded: Vec<M> = instance
        .priors()
        .iter()
        .map(|&p| M::from_weight(p))
        .collect::<Result<_>>()?;
    let total = mass_sum(&embedded);
    Ok(embedded.iter().map(|p| p.div(&total)).collect())
}

/// Per-subregion mass surviving in `bits`, from caller-embedded priors.
pub(crate) fn masses_from_priors<M: Mass>(
    index: &SubregionIndex,
    bits: &BitSet,
    priors: &[M],
) -> Vec<M> {
    let mut masses = vec![M::zero(); index.num_subregions()];
    for h in bits.iter() {
        masses[index.subregion_of_raw(h)].add_assign(&priors[h]);
    }
    masses
}

/// Per-subregion prior mass surviving in `bits` (float convenience).
pub fn surviving_masses(
    instance: &ProblemInstance,
    index: &SubregionIndex,
    bits: &BitSet,
) -> Vec<f64> {
    let mut masses = vec![0.0; index.num_subregions()];
    for h in bits.iter() {
        masses[index.subregion_of_raw(h)] += instance.priors()[h];
    }
    masses
}

/// Hyperedge mass of the full prior — the ceiling of the objective.
pub fn total_edge_mass<M: Mass>(
    instance: &ProblemInstance,
    index: &SubregionIndex,
) -> Result<M> {
    let priors = embedded_priors::<M>(instance)?;
    let bits = BitSet::full(instance.num_hypotheses());
    let masses = masses_from_priors(index, &bits, &priors);
    hyperedge_weight(index, &masses)
}

/// The greedy objective: hyperedge mass already cut by the evidence,
/// `f(S) = W(prior) − W(surviving)`. Zero on no evidence, equal to the total
/// edge mass exactly when the problem is decided.
pub fn objective_f<M: Mass>(
    instance: &ProblemInstance,
    evidence: &Evidence,
    index: &SubregionIndex,
) -> Result<M> {
    let priors = embedded_priors::<M>(instance)?;
    let full = BitSet::full(instance.num_hypotheses());
    let w_total = hyperedge_weight(index, &masses_from_priors(index, &full, &priors))?;
    let version = crate::instance::consistent_hypotheses(instance, evidence)?;
    let w_now = hyperedge_weight(index, &masses_from_priors(index, version.bits(), &priors))?;
    let f = w_total.sub(&w_now);
    if f.is_negative_beyond_tolerance() {
        return Err(Error::NegativeMass {
            value: f.to_f64(),
            context: "objective".into(),
        });
    }
    Ok(f.clamp_rounding())
}
