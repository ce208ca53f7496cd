//! Instances with a prescribed number of free vertices and prescribed
//! connectivities: checks at the size bound, and a search below it for
//! instances without a doubly-good vertex.

use std::collections::BTreeMap;

use cutlink::{
    find_doubly_good_vertex, find_via_terminal_reduction, kappa, doubly_good_bound, Graph,
    LinkingInstance, OptionSet, ReductionKind, Vertex, VertexSet, ViolationReport,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::item_rng;

/// Rejection-sampling attempts per instance.
pub const SAMPLE_ATTEMPTS: usize = 2000;
/// Largest free-set size the tightness search visits.
pub const MAX_SEARCH_FREE: usize = 24;

const BOUND_STREAM: u64 = 0x424f554e44;
const TIGHT_STREAM: u64 = 0x5449474854;

/// A random instance with `κ(Q,R) = k`, `κ(S,T) = l` and exactly `free`
/// free vertices, or `None` after [`SAMPLE_ATTEMPTS`] rejections.
///
/// `|Q|, |R|` are `k` or `k+1`, `|S|, |T|` are `l` or `l+1`; members of `S` and
/// `T` may be shared with `Q ∪ R`. Labels are shuffled so terminals are not
/// always the low ids.
pub fn sample_bound_instance<R: Rng>(k: usize, l: usize, free: usize, rng: &mut R) -> Option<LinkingInstance> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let qs = k + rng.gen_range(0..=1);
        let rs = k + rng.gen_range(0..=1);
        let ss = l + rng.gen_range(0..=1);
        let ts = l + rng.gen_range(0..=1);
        // Slots 0..qs+rs are Q then R; S and T either reuse one of them or
        // take a fresh slot.
        let mut next = qs + rs;
        let mut pool: Vec<usize> = (0..next).collect();
        pool.shuffle(rng);
        let mut take = |rng: &mut R| {
            if !pool.is_empty() && rng.gen_bool(1.0 / 3.0) {
                pool.pop().expect("nonempty")
            } else {
                next += 1;
                next - 1
            }
        };
        let s_slots: Vec<usize> = (0..ss).map(|_| take(rng)).collect();
        let t_slots: Vec<usize> = (0..ts).map(|_| take(rng)).collect();
        let n = next + free;
        if n > 64 {
            return None;
        }
        let mut labels: Vec<Vertex> = (0..n).collect();
        labels.shuffle(rng);
        let set = |slots: &mut dyn Iterator<Item = usize>| -> VertexSet { slots.map(|i| labels[i]).collect() };
        let q = set(&mut (0..qs));
        let r = set(&mut (qs..qs + rs));
        let s = set(&mut s_slots.into_iter());
        let t = set(&mut t_slots.into_iter());
        let p = rng.gen_range(0.15..=0.6);
        let g = crate::enumerate::random_graph(n, p, rng);
        let inst = LinkingInstance::new(g, q, r, s, t).expect("disjoint pairs");
        if inst.k() == k && inst.l() == l {
            debug_assert_eq!(inst.free().len(), free);
            return Some(inst);
        }
    }
    None
}

/// Options at `v` recomputed from the three reduced graphs.
fn direct_options(inst: &LinkingInstance, v: Vertex) -> OptionSet {
    ReductionKind::ALL
        .into_iter()
        .filter(|&kind| {
            let h = inst.graph().reduce(v, kind).expect("free vertex");
            kappa(&h, inst.q(), inst.r()).map(|x| x.value) == Ok(inst.k())
                && kappa(&h, inst.s(), inst.t()).map(|x| x.value) == Ok(inst.l())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub l: usize,
    /// `(2l+1)·4^k`, the number of free vertices in every instance.
    pub free: usize,
    pub seed: u64,
    pub instances: u64,
    /// Instances the sampler could not produce.
    pub unsampled: u64,
    pub largest_order: usize,
    pub violations: Vec<ViolationReport>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.unsampled == 0
    }
}

fn check_found(inst: &LinkingInstance, op: &str, found: Result<Option<(Vertex, OptionSet)>, cutlink::LinkingError>) -> Option<ViolationReport> {
    let base = || {
        ViolationReport::new(op, inst.graph(), "a doubly-good vertex at the size bound")
            .terminals(inst.q(), inst.r(), inst.s(), inst.t())
            .observe("k", inst.k())
            .observe("l", inst.l())
    };
    match found {
        Ok(Some((v, opts))) => {
            let direct = direct_options(inst, v);
            (opts != direct || direct.len() < 2 || !inst.free().contains(v)).then(|| {
                base()
                    .at_vertex(v)
                    .observe("options", opts)
                    .observe("direct", direct)
            })
        }
        Ok(None) => Some(base().observe("found", "none")),
        Err(e) => Some(match e.violation() {
            Some(rep) => rep.clone(),
            None => base().observe("error", e),
        }),
    }
}

/// `count` random instances with exactly `(2l+1)·4^k` free vertices; both
/// the direct scan and the terminal-reduction route must find a vertex.
pub fn doubly_good_at_bound(k: usize, l: usize, count: u64, seed: u64) -> BoundReport {
    let free = doubly_good_bound(k, l) as usize;
    let purpose = BOUND_STREAM ^ ((k as u64) << 8) ^ l as u64;
    let results: Vec<_> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = item_rng(seed, purpose, i);
            let Some(inst) = sample_bound_instance(k, l, free, &mut rng) else {
                return (false, 0, Vec::new());
            };
            let mut v = Vec::new();
            v.extend(check_found(&inst, "find_doubly_good_vertex", find_doubly_good_vertex(&inst)));
            v.extend(check_found(&inst, "find_via_terminal_reduction", find_via_terminal_reduction(&inst)));
            (true, inst.graph().vertex_count(), v)
        })
        .collect();
    let mut violations: Vec<ViolationReport> = results.iter().flat_map(|r| r.2.clone()).collect();
    violations.sort();
    BoundReport {
        k,
        l,
        free,
        seed,
        instances: results.iter().filter(|r| r.0).count() as u64,
        unsampled: results.iter().filter(|r| !r.0).count() as u64,
        largest_order: results.iter().map(|r| r.1).max().unwrap_or(0),
        violations,
    }
}

/// An instance without a doubly-good vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub free: usize,
    pub graph6: String,
    pub q: VertexSet,
    pub r: VertexSet,
    pub s: VertexSet,
    pub t: VertexSet,
}

impl Witness {
    fn of(inst: &LinkingInstance) -> Self {
        // Sampled graphs live on 0..n, so graph6 ids are vertex ids.
        Witness {
            free: inst.free().len(),
            graph6: inst.graph().to_graph6(),
            q: inst.q(),
            r: inst.r(),
            s: inst.s(),
            t: inst.t(),
        }
    }

    pub fn instance(&self) -> Result<LinkingInstance, String> {
        let g = Graph::from_graph6(&self.graph6).map_err(|e| e.to_string())?;
        LinkingInstance::new(g, self.q, self.r, self.s, self.t).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeStats {
    pub attempts: u64,
    pub unsampled: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub k: usize,
    pub l: usize,
    pub bound: u128,
    pub seed: u64,
    pub budget: u64,
    /// Largest `|F| ≥ 1` with a sampled instance lacking a doubly-good vertex.
    pub largest_failing_free: Option<usize>,
    /// Per searched `|F|`.
    pub sizes: BTreeMap<usize, SizeStats>,
    /// Up to three witnesses for each failing size, largest size first.
    pub witnesses: Vec<Witness>,
    /// Failures at or above the bound; any entry contradicts the theorem.
    pub violations: Vec<ViolationReport>,
}

/// Samples instances with `κ = (k, l)` for every `|F|` from
/// `min(bound−1, MAX_SEARCH_FREE)` down to 1, plus `|F| = bound` when it is
/// within reach, spending `budget` attempts split evenly across sizes.
pub fn tightness_search(k: usize, l: usize, budget: u64, seed: u64) -> TightnessReport {
    let bound = doubly_good_bound(k, l);
    let top = (bound.saturating_sub(1)).min(MAX_SEARCH_FREE as u128) as usize;
    let mut sizes: Vec<usize> = (1..=top).rev().collect();
    let check_bound = bound <= MAX_SEARCH_FREE as u128;
    if check_bound {
        sizes.insert(0, bound as usize);
    }
    let per_size = if sizes.is_empty() { 0 } else { budget / sizes.len() as u64 };

    let mut stats = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut violations = Vec::new();
    for &free in &sizes {
        let purpose = TIGHT_STREAM ^ ((k as u64) << 16) ^ ((l as u64) << 8) ^ ((free as u64) << 24);
        let results: Vec<Option<Option<LinkingInstance>>> = (0..per_size)
            .into_par_iter()
            .map(|i| {
                let mut rng = item_rng(seed, purpose, i);
                let inst = sample_bound_instance(k, l, free, &mut rng)?;
                let found = find_doubly_good_vertex(&inst);
                Some(match found {
                    Ok(Some(_)) => None,
                    _ => Some(inst),
                })
            })
            .collect();
        let failing: Vec<LinkingInstance> = results.iter().flatten().flatten().cloned().collect();
        stats.insert(
            free,
            SizeStats {
                attempts: per_size,
                unsampled: results.iter().filter(|r| r.is_none()).count() as u64,
                failures: failing.len() as u64,
            },
        );
        if free as u128 >= bound {
            for inst in &failing {
                violations.push(
                    ViolationReport::new("tightness_search", inst.graph(), "a doubly-good vertex at the size bound")
                        .terminals(inst.q(), inst.r(), inst.s(), inst.t()),
                );
            }
        } else {
            let mut w: Vec<Witness> = failing.iter().map(Witness::of).collect();
            w.sort();
            w.dedup();
            witnesses.extend(w.into_iter().take(3));
        }
    }
    violations.sort();
    let largest_failing_free = stats
        .iter()
        .filter(|(&f, s)| (f as u128) < bound && s.failures > 0)
        .map(|(&f, _)| f)
        .max();
    TightnessReport {
        k,
        l,
        bound,
        seed,
        budget,
        largest_failing_free,
        sizes: stats,
        witnesses,
        violations,
    }
}
