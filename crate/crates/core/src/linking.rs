//! Linking between two pairs of terminal sets.
//!
//! For a free vertex `v` the three reductions `G\v`, `G*v\v` and `G/v` are
//! compared by which of them keep `κ(Q,R)` (and `κ(S,T)`) unchanged. A single
//! pair always keeps at least two; two pairs keep at least one, and at least
//! two at some vertex once the free set has `(2ℓ+1)·4^k` vertices.
//!
//! Operations whose result is guaranteed by those theorems return
//! [`LinkingError::TheoremViolation`] with a replayable report instead of
//! panicking when the guarantee fails.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Graph, GraphError, ReductionKind};
use crate::rankconn::{cut_rank, kappa, local_conn, shrink_terminals, ConnError, HalfInt};
use crate::report::ViolationReport;
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkingError {
    #[error(transparent)]
    Conn(#[from] ConnError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} is not a free vertex")]
    NotFree(Vertex),
    #[error("vertex {0} is flexible for the given pair")]
    Flexible(Vertex),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(Box<ViolationReport>),
}

impl LinkingError {
    pub fn violation(&self) -> Option<&ViolationReport> {
        match self {
            LinkingError::TheoremViolation(r) => Some(r),
            _ => None,
        }
    }
}

/// A subset of the three reduction kinds.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OptionSet(u8);

impl OptionSet {
    pub const EMPTY: OptionSet = OptionSet(0);
    pub const ALL: OptionSet = OptionSet(0b111);
    /// The reductions that stay within pivot-minors.
    pub const PIVOT_MINOR: OptionSet = OptionSet(0b101);

    pub fn from_bits(bits: u8) -> Self {
        OptionSet(bits & 0b111)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, kind: ReductionKind) -> bool {
        self.0 & (1 << kind.index()) != 0
    }

    pub fn with(self, kind: ReductionKind) -> Self {
        OptionSet(self.0 | (1 << kind.index()))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersect(self, other: OptionSet) -> Self {
        OptionSet(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = ReductionKind> {
        ReductionKind::ALL
            .into_iter()
            .filter(move |&k| self.contains(k))
    }

    pub fn first(self) -> Option<ReductionKind> {
        self.iter().next()
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(ReductionKind::name).collect()
    }
}

impl FromIterator<ReductionKind> for OptionSet {
    fn from_iter<I: IntoIterator<Item = ReductionKind>>(iter: I) -> Self {
        iter.into_iter().fold(OptionSet::EMPTY, OptionSet::with)
    }
}

impl fmt::Debug for OptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.names()).finish()
    }
}

impl fmt::Display for OptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(","))
    }
}

impl Serialize for OptionSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.names())
    }
}

/// `(2ℓ+1)·2^{2k}`, saturating.
pub fn doubly_good_bound(k: usize, l: usize) -> u128 {
    if k >= 63 {
        return u128::MAX;
    }
    (2 * l as u128 + 1).saturating_mul(1u128 << (2 * k))
}

/// Which reductions at `v` keep every `κ(s,t) = target` in `pairs`.
fn preserved(g: &Graph, pairs: &[(VertexSet, VertexSet, usize)], v: Vertex) -> OptionSet {
    let keeps = |h: &Graph| {
        pairs
            .iter()
            .all(|&(s, t, target)| kappa(h, s, t).map(|r| r.value) == Ok(target))
    };
    if g.degree(v) == 0 {
        // All three reductions are plain deletion.
        return if keeps(&g.reduce_unchecked(v, ReductionKind::Delete)) {
            OptionSet::ALL
        } else {
            OptionSet::EMPTY
        };
    }
    ReductionKind::ALL
        .into_iter()
        .filter(|&kind| keeps(&g.reduce_unchecked(v, kind)))
        .collect()
}

fn observe_reductions(
    mut rep: ViolationReport,
    g: &Graph,
    pairs: &[(&str, VertexSet, VertexSet)],
    v: Vertex,
) -> ViolationReport {
    for kind in ReductionKind::ALL {
        let h = g.reduce_unchecked(v, kind);
        for &(name, s, t) in pairs {
            let value = kappa(&h, s, t).map(|r| r.value.to_string());
            rep = rep.observe(
                &format!("kappa_{name}[{kind}]"),
                value.unwrap_or_else(|e| e.to_string()),
            );
        }
    }
    rep
}

fn check_free(g: &Graph, terminals: VertexSet, v: Vertex) -> Result<(), LinkingError> {
    if !g.has_vertex(v) {
        return Err(GraphError::NoSuchVertex { vertex: v }.into());
    }
    if terminals.contains(v) {
        return Err(LinkingError::NotFree(v));
    }
    Ok(())
}

/// Whether every reduction at `v` keeps `κ(S,T)`.
///
/// `G/v` is tested with the lowest-id neighbour only; different neighbours
/// give locally equivalent graphs and local complementation preserves κ.
pub fn is_flexible(g: &Graph, s: VertexSet, t: VertexSet, v: Vertex) -> Result<bool, LinkingError> {
    check_free(g, s | t, v)?;
    let l = kappa(g, s, t)?.value;
    Ok(preserved(g, &[(s, t, l)], v) == OptionSet::ALL)
}

/// The reductions at `v` that keep `κ(Q,R)`. At least two always do.
pub fn single_pair_options(
    g: &Graph,
    q: VertexSet,
    r: VertexSet,
    v: Vertex,
) -> Result<OptionSet, LinkingError> {
    check_free(g, q | r, v)?;
    let k = kappa(g, q, r)?.value;
    let opts = preserved(g, &[(q, r, k)], v);
    if opts.len() < 2 {
        let rep = ViolationReport::new("single_pair_options", g, "at least two reductions keep kappa(Q,R)")
            .terminals(q, r, VertexSet::EMPTY, VertexSet::EMPTY)
            .at_vertex(v)
            .observe("k", k)
            .observe("options", opts);
        let rep = observe_reductions(rep, g, &[("QR", q, r)], v);
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok(opts)
}

/// A graph with two pairs of terminal sets and their cached connectivities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingInstance {
    g: Graph,
    q: VertexSet,
    r: VertexSet,
    s: VertexSet,
    t: VertexSet,
    k: usize,
    l: usize,
}

impl LinkingInstance {
    pub fn new(
        g: Graph,
        q: VertexSet,
        r: VertexSet,
        s: VertexSet,
        t: VertexSet,
    ) -> Result<Self, LinkingError> {
        let k = kappa(&g, q, r)?.value;
        let l = kappa(&g, s, t)?.value;
        Ok(LinkingInstance { g, q, r, s, t, k, l })
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn q(&self) -> VertexSet {
        self.q
    }

    pub fn r(&self) -> VertexSet {
        self.r
    }

    pub fn s(&self) -> VertexSet {
        self.s
    }

    pub fn t(&self) -> VertexSet {
        self.t
    }

    /// `κ(Q,R)`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// `κ(S,T)`.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn terminals(&self) -> VertexSet {
        self.q | self.r | self.s | self.t
    }

    pub fn free(&self) -> VertexSet {
        self.g.vertices() - self.terminals()
    }

    fn report(&self, operation: &str, expected: &str) -> ViolationReport {
        ViolationReport::new(operation, &self.g, expected)
            .terminals(self.q, self.r, self.s, self.t)
            .observe("k", self.k)
            .observe("l", self.l)
    }

    fn pairs(&self) -> [(VertexSet, VertexSet, usize); 2] {
        [(self.q, self.r, self.k), (self.s, self.t, self.l)]
    }
}

/// The reductions at `v` that keep both `κ(Q,R) = k` and `κ(S,T) = ℓ`.
/// Never empty.
pub fn joint_good_options(inst: &LinkingInstance, v: Vertex) -> Result<OptionSet, LinkingError> {
    check_free(&inst.g, inst.terminals(), v)?;
    let opts = preserved(&inst.g, &inst.pairs(), v);
    if opts.is_empty() {
        let rep = inst
            .report("joint_good_options", "some reduction keeps both connectivities")
            .at_vertex(v);
        let rep = observe_reductions(rep, &inst.g, &[("QR", inst.q, inst.r), ("ST", inst.s, inst.t)], v);
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok(opts)
}

/// `joint_good_options` restricted to deletion and `G/v`.
pub fn pivot_only_options(inst: &LinkingInstance, v: Vertex) -> Result<OptionSet, LinkingError> {
    Ok(joint_good_options(inst, v)?.intersect(OptionSet::PIVOT_MINOR))
}

/// A vertex-minor built by [`reduce_preserving`], with the reduction applied
/// at each removed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub graph: Graph,
    pub steps: Vec<(Vertex, ReductionKind)>,
}

/// Removes every vertex of `drop` (ascending id), each time applying the
/// first reduction that keeps both connectivities.
pub fn reduce_preserving(inst: &LinkingInstance, drop: VertexSet) -> Result<Reduction, LinkingError> {
    if !drop.is_subset(inst.free()) {
        return Err(LinkingError::Precondition(format!(
            "drop set {:?} is not contained in the free vertices {:?}",
            drop,
            inst.free()
        )));
    }
    let mut cur = inst.clone();
    let mut steps = Vec::with_capacity(drop.len());
    for v in drop {
        let opts = joint_good_options(&cur, v)?;
        let kind = opts.first().expect("joint options are nonempty");
        cur.g = cur.g.reduce_unchecked(v, kind);
        steps.push((v, kind));
    }
    let k = kappa(&cur.g, cur.q, cur.r)?.value;
    let l = kappa(&cur.g, cur.s, cur.t)?.value;
    if (k, l) != (inst.k, inst.l) {
        let rep = inst
            .report("reduce_preserving", "reduced graph keeps kappa(Q,R) = k and kappa(S,T) = l")
            .observe("k_after", k)
            .observe("l_after", l);
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok(Reduction {
        graph: cur.g,
        steps,
    })
}

/// Scans the free vertices in ascending order for one with at least two
/// joint options. `Ok(None)` is only possible below the size bound.
pub fn find_doubly_good_vertex(
    inst: &LinkingInstance,
) -> Result<Option<(Vertex, OptionSet)>, LinkingError> {
    let free = inst.free();
    for v in free {
        let opts = joint_good_options(inst, v)?;
        if opts.len() >= 2 {
            return Ok(Some((v, opts)));
        }
    }
    let bound = doubly_good_bound(inst.k, inst.l);
    if free.len() as u128 >= bound {
        let rep = inst
            .report(
                "find_doubly_good_vertex",
                "a free vertex with two joint options once |F| >= (2l+1)4^k",
            )
            .observe("free", free.len())
            .observe("bound", bound);
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok(None)
}

/// Finds a doubly-good vertex by first shrinking `(S,T)` to `(S₁,T₁)` with
/// `|S₁| = |T₁| = ℓ`, reducing away the rest of `S∪T` while keeping both
/// connectivities, and searching the smaller instance. The returned options
/// are recomputed on the original instance.
pub fn find_via_terminal_reduction(
    inst: &LinkingInstance,
) -> Result<Option<(Vertex, OptionSet)>, LinkingError> {
    let (s1, t1) = shrink_terminals(&inst.g, inst.s, inst.t)?;
    let small = LinkingInstance::new(inst.g.clone(), inst.q, inst.r, s1, t1)?;
    let drop = (inst.s | inst.t) - (inst.q | inst.r | s1 | t1);
    let reduced = reduce_preserving(&small, drop)?;
    let h = LinkingInstance::new(reduced.graph, inst.q, inst.r, s1, t1)?;
    let Some((v, _)) = find_doubly_good_vertex(&h)? else {
        return Ok(None);
    };
    let opts = joint_good_options(inst, v)?;
    if opts.len() < 2 {
        let rep = inst
            .report(
                "find_via_terminal_reduction",
                "a doubly-good vertex of the reduced instance is doubly good in the original",
            )
            .at_vertex(v)
            .observe("options", opts)
            .observe("s1", s1.to_hex())
            .observe("t1", t1.to_hex());
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok(Some((v, opts)))
}

/// Nested separating sets `A₁ ⊆ … ⊆ A_n` with `A_i ∩ F = {f₁,…,f_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatingChain {
    pub order: Vec<Vertex>,
    pub sets: Vec<VertexSet>,
}

impl SeparatingChain {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Checks the chain invariants for `(s, t)`, order `k` and free set `f`.
    pub fn check(&self, g: &Graph, s: VertexSet, t: VertexSet, f: VertexSet, k: usize) -> Result<(), String> {
        if self.order.len() != self.sets.len() {
            return Err("order and sets differ in length".into());
        }
        if self.order.iter().copied().collect::<VertexSet>() != f || self.order.len() != f.len() {
            return Err(format!("order {:?} is not an ordering of {f:?}", self.order));
        }
        let mut prefix = VertexSet::EMPTY;
        for (i, (&fi, &a)) in self.order.iter().zip(&self.sets).enumerate() {
            prefix = prefix.with(fi);
            if !(s.is_subset(a) && a.is_disjoint(t) && cut_rank(g, a) == k) {
                return Err(format!("A_{} = {a:?} is not separating of order {k}", i + 1));
            }
            if a & f != prefix {
                return Err(format!("A_{} ∩ F = {:?}, expected {prefix:?}", i + 1, a & f));
            }
            if i > 0 && !self.sets[i - 1].is_subset(a) {
                return Err(format!("A_{i} is not contained in A_{}", i + 1));
            }
        }
        Ok(())
    }
}

/// Members of `avail` taken `size` at a time, as masks in increasing order.
fn subsets_of_size(avail: VertexSet, size: usize) -> impl Iterator<Item = VertexSet> {
    let m = avail.len();
    let limit = 1u128 << m;
    let mut next = (size <= m).then(|| (1u128 << size) - 1);
    std::iter::from_fn(move || {
        let c = next?;
        next = if c == 0 {
            None
        } else {
            // Gosper's hack: next integer with the same popcount.
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let n = (((ripple ^ c) >> 2) / low) | ripple;
            (n < limit).then_some(n)
        };
        Some(avail.expand(c as u64))
    })
}

/// Smallest `X ⊇ base`, `X ∩ t = ∅` with `ρ(X) ≤ k`, in (size, mask) order.
fn min_separating_containing(g: &Graph, base: VertexSet, t: VertexSet, k: usize) -> Option<VertexSet> {
    let avail = g.vertices() - t - base;
    (0..=avail.len())
        .flat_map(|size| subsets_of_size(avail, size))
        .map(|w| base | w)
        .find(|&x| cut_rank(g, x) <= k)
}

/// First link of a chain: the vertex `x ∈ f` whose smallest order-`k`
/// separating set `A_x ⊇ s ∪ {x}` is smallest overall (ties by id), and
/// `A_x` itself.
fn first_link(
    g: &Graph,
    s: VertexSet,
    t: VertexSet,
    f: VertexSet,
    k: usize,
) -> Result<(Vertex, VertexSet), LinkingError> {
    let mut best: Option<(Vertex, VertexSet)> = None;
    for u in f {
        let Some(a) = min_separating_containing(g, s.with(u), t, k) else {
            let rep = ViolationReport::new(
                "separating_chain",
                g,
                "every non-flexible free vertex lies in an order-k separating set",
            )
            .terminals(VertexSet::EMPTY, VertexSet::EMPTY, s, t)
            .at_vertex(u)
            .observe("k", k)
            .observe("f", f.to_hex());
            return Err(LinkingError::TheoremViolation(Box::new(rep)));
        };
        if best.map_or(true, |(_, b)| a.len() < b.len()) {
            best = Some((u, a));
        }
    }
    let (x, a) = best.expect("first_link called with empty f");
    if a & f != VertexSet::singleton(x) {
        let rep = ViolationReport::new(
            "separating_chain",
            g,
            "the minimum separating set meets F in exactly its own vertex",
        )
        .terminals(VertexSet::EMPTY, VertexSet::EMPTY, s, t)
        .at_vertex(x)
        .observe("k", k)
        .observe("a", a.to_hex())
        .observe("f", f.to_hex());
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok((x, a))
}

fn build_chain(g: &Graph, s: VertexSet, t: VertexSet, f: VertexSet, k: usize) -> Result<SeparatingChain, LinkingError> {
    let mut chain = SeparatingChain {
        order: Vec::with_capacity(f.len()),
        sets: Vec::with_capacity(f.len()),
    };
    let mut cur = s;
    let mut rest = f;
    while !rest.is_empty() {
        let (x, a) = first_link(g, cur, t, rest, k)?;
        chain.order.push(x);
        chain.sets.push(a);
        cur = a;
        rest = rest.without(x);
    }
    Ok(chain)
}

fn check_pair_sets(g: &Graph, s: VertexSet, t: VertexSet) -> Result<(), LinkingError> {
    let outside = (s | t) - g.vertices();
    if !outside.is_empty() {
        return Err(ConnError::NotVertices(outside).into());
    }
    if !s.is_disjoint(t) {
        return Err(ConnError::Overlap(s & t).into());
    }
    Ok(())
}

/// Orders the non-flexible vertices `f` so that each prefix extends to an
/// order-`κ(S,T)` separating set, the sets nested.
pub fn separating_chain(
    g: &Graph,
    s: VertexSet,
    t: VertexSet,
    f: VertexSet,
) -> Result<SeparatingChain, LinkingError> {
    check_pair_sets(g, s, t)?;
    if !f.is_subset(g.vertices() - s - t) {
        return Err(LinkingError::Precondition(format!(
            "{f:?} is not contained in V - (S ∪ T)"
        )));
    }
    for v in f {
        if is_flexible(g, s, t, v)? {
            return Err(LinkingError::Flexible(v));
        }
    }
    let k = kappa(g, s, t)?.value;
    build_chain(g, s, t, f, k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum NestingOutcome {
    /// A free vertex with at least two joint options.
    DoublyGood { vertex: Vertex, options: OptionSet },
    /// Larger sets `Q' ⊇ Q`, `R' ⊇ R` of the same cut-rank with local
    /// connectivity at least ½ higher and at least half the free vertices left.
    Refined {
        q: VertexSet,
        r: VertexSet,
        /// The free vertex the split was made at.
        split_vertex: Vertex,
        /// Its 1-based position in the `(Q,R)` chain.
        split_index: usize,
    },
}

/// One refinement step for two pairs with `S ∪ T ⊆ Q ∪ R`.
///
/// Requires `F = V − (Q∪R)` nonempty, `ρ(Q) = ρ(R) = κ(Q,R)`, and no vertex of
/// `F` flexible for either pair.
pub fn nesting_step(
    g: &Graph,
    q: VertexSet,
    r: VertexSet,
    s: VertexSet,
    t: VertexSet,
) -> Result<NestingOutcome, LinkingError> {
    check_pair_sets(g, q, r)?;
    check_pair_sets(g, s, t)?;
    if !(s | t).is_subset(q | r) {
        return Err(LinkingError::Precondition("S ∪ T is not contained in Q ∪ R".into()));
    }
    let f = g.vertices() - q - r;
    if f.is_empty() {
        return Err(LinkingError::Precondition("no free vertices".into()));
    }
    let k = kappa(g, q, r)?.value;
    let (rho_q, rho_r) = (cut_rank(g, q), cut_rank(g, r));
    if rho_q != k || rho_r != k {
        return Err(LinkingError::Precondition(format!(
            "need rho(Q) = rho(R) = kappa(Q,R); got {rho_q}, {rho_r}, {k}"
        )));
    }
    let l = kappa(g, s, t)?.value;
    for v in f {
        if preserved(g, &[(q, r, k)], v) == OptionSet::ALL
            || preserved(g, &[(s, t, l)], v) == OptionSet::ALL
        {
            return Err(LinkingError::Flexible(v));
        }
    }

    for v in f {
        let options = preserved(g, &[(q, r, k), (s, t, l)], v);
        if options.len() >= 2 {
            return Ok(NestingOutcome::DoublyGood { vertex: v, options });
        }
    }

    let chain = build_chain(g, q, r, f, k)?;
    let (split_vertex, _) = first_link(g, s, t, f, l)?;
    let n = f.len();
    let i = 1 + chain
        .order
        .iter()
        .position(|&x| x == split_vertex)
        .expect("chain orders all of F");
    let (q2, r2) = if i <= n / 2 {
        (chain.sets[i - 1], r)
    } else {
        let prev = if i >= 2 { chain.sets[i - 2] } else { q };
        (q, g.vertices() - prev)
    };

    let before = local_conn(g, q, r)?;
    let after = local_conn(g, q2, r2)?;
    let free_after = (g.vertices() - q2 - r2).len();
    let ok = q.is_subset(q2)
        && r.is_subset(r2)
        && q2.is_disjoint(r2)
        && cut_rank(g, q2) == k
        && cut_rank(g, r2) == k
        && after >= before + HalfInt::HALF
        && free_after >= n / 2;
    if !ok {
        let rep = ViolationReport::new(
            "nesting_step",
            g,
            "refined pair keeps order k, gains 1/2 local connectivity, keeps half of F",
        )
        .terminals(q, r, s, t)
        .at_vertex(split_vertex)
        .observe("q_refined", q2.to_hex())
        .observe("r_refined", r2.to_hex())
        .observe("local_conn_before", before)
        .observe("local_conn_after", after)
        .observe("free_after", free_after)
        .observe("free_before", n);
        return Err(LinkingError::TheoremViolation(Box::new(rep)));
    }
    Ok(NestingOutcome::Refined {
        q: q2,
        r: r2,
        split_vertex,
        split_index: i,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReductionKind::*;

    fn set(ids: &[usize]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn flexibility_examples() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(is_flexible(&g, set(&[0]), set(&[1]), 2).unwrap());

        let p3 = Graph::path(3);
        assert!(!is_flexible(&p3, set(&[0]), set(&[2]), 1).unwrap());
        assert!(is_flexible(&p3, VertexSet::EMPTY, VertexSet::EMPTY, 1).unwrap());
        assert_eq!(
            is_flexible(&p3, set(&[0]), set(&[2]), 0),
            Err(LinkingError::NotFree(0))
        );
    }

    #[test]
    fn single_pair_options_on_path() {
        let p3 = Graph::path(3);
        let opts = single_pair_options(&p3, set(&[0]), set(&[2]), 1).unwrap();
        assert_eq!(opts, [LcDelete, PivotDelete].into_iter().collect());
    }

    #[test]
    fn isolated_vertex_keeps_everything() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            single_pair_options(&g, set(&[0]), set(&[2]), 3).unwrap(),
            OptionSet::ALL
        );
        let inst = LinkingInstance::new(g, set(&[0]), set(&[2]), set(&[1]), VertexSet::EMPTY).unwrap();
        assert_eq!(joint_good_options(&inst, 3).unwrap(), OptionSet::ALL);
        assert_eq!(pivot_only_options(&inst, 3).unwrap(), [Delete, PivotDelete].into_iter().collect());
    }

    #[test]
    fn joint_options_with_empty_second_pair() {
        let p3 = Graph::path(3);
        let inst = LinkingInstance::new(p3.clone(), set(&[0]), set(&[2]), VertexSet::EMPTY, VertexSet::EMPTY).unwrap();
        assert_eq!(
            joint_good_options(&inst, 1).unwrap(),
            single_pair_options(&p3, set(&[0]), set(&[2]), 1).unwrap()
        );
        assert_eq!(joint_good_options(&inst, 0), Err(LinkingError::NotFree(0)));
    }

    #[test]
    fn reduce_preserving_examples() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let inst = LinkingInstance::new(g.clone(), set(&[0]), set(&[2]), VertexSet::EMPTY, VertexSet::EMPTY).unwrap();
        let none = reduce_preserving(&inst, VertexSet::EMPTY).unwrap();
        assert_eq!(none.graph, g);
        assert!(none.steps.is_empty());
        let one = reduce_preserving(&inst, set(&[3])).unwrap();
        assert_eq!(one.graph, g.delete(3).unwrap());
        assert_eq!(one.steps, vec![(3, Delete)]);
        assert!(matches!(
            reduce_preserving(&inst, set(&[0])),
            Err(LinkingError::Precondition(_))
        ));
    }

    #[test]
    fn doubly_good_examples() {
        // k = l = 0 with one free vertex: bound is 1, so a vertex must exist.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = LinkingInstance::new(g, VertexSet::EMPTY, VertexSet::EMPTY, set(&[0]), VertexSet::EMPTY).unwrap();
        assert_eq!(doubly_good_bound(0, 0), 1);
        let (v, opts) = find_doubly_good_vertex(&inst).unwrap().unwrap();
        assert_eq!(v, 1);
        assert!(opts.len() >= 2);

        let k3 = Graph::complete(3);
        let inst = LinkingInstance::new(k3, set(&[0]), set(&[1, 2]), VertexSet::EMPTY, VertexSet::EMPTY).unwrap();
        assert_eq!(find_doubly_good_vertex(&inst).unwrap(), None);
    }

    #[test]
    fn doubly_good_bound_values() {
        assert_eq!(doubly_good_bound(1, 1), 12);
        assert_eq!(doubly_good_bound(0, 1), 3);
        assert_eq!(doubly_good_bound(1, 0), 4);
        assert_eq!(doubly_good_bound(2, 2), 80);
        assert_eq!(doubly_good_bound(70, 0), u128::MAX);
    }

    #[test]
    fn chain_examples() {
        let p3 = Graph::path(3);
        let empty = separating_chain(&p3, set(&[0]), set(&[2]), VertexSet::EMPTY).unwrap();
        assert!(empty.is_empty());

        let chain = separating_chain(&p3, set(&[0]), set(&[2]), set(&[1])).unwrap();
        assert_eq!(chain.order, vec![1]);
        assert_eq!(chain.sets, vec![set(&[0, 1])]);
        chain.check(&p3, set(&[0]), set(&[2]), set(&[1]), 1).unwrap();
    }

    #[test]
    fn chain_rejects_flexible_vertices() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            separating_chain(&g, set(&[0]), set(&[2]), set(&[3])),
            Err(LinkingError::Flexible(3))
        );
        assert!(matches!(
            separating_chain(&g, set(&[0]), set(&[2]), set(&[2])),
            Err(LinkingError::Precondition(_))
        ));
    }

    #[test]
    fn subsets_in_size_then_mask_order() {
        let avail = set(&[1, 3, 4]);
        let got: Vec<_> = (0..=3).flat_map(|k| subsets_of_size(avail, k)).collect();
        let expected: Vec<_> = [
            &[][..],
            &[1],
            &[3],
            &[4],
            &[1, 3],
            &[1, 4],
            &[3, 4],
            &[1, 3, 4],
        ]
        .iter()
        .map(|ids| set(ids))
        .collect();
        assert_eq!(got, expected);
        assert_eq!(subsets_of_size(avail, 4).count(), 0);
        assert_eq!(subsets_of_size(VertexSet::EMPTY, 0).count(), 1);
    }

    #[test]
    fn nesting_preconditions() {
        let p3 = Graph::path(3);
        // F = {1}, vertex 1 is not flexible, rho(Q) = rho(R) = kappa = 1.
        let out = nesting_step(&p3, set(&[0]), set(&[2]), set(&[0]), set(&[2])).unwrap();
        assert!(matches!(out, NestingOutcome::DoublyGood { vertex: 1, .. }));
        assert!(matches!(
            nesting_step(&p3, set(&[0]), set(&[1, 2]), set(&[0]), set(&[2])),
            Err(LinkingError::Precondition(_))
        ));
        assert!(matches!(
            nesting_step(&p3, set(&[0]), set(&[2]), set(&[1]), VertexSet::EMPTY),
            Err(LinkingError::Precondition(_))
        ));
    }
}
