//! Cut-rank, connectivity between vertex sets, and local connectivity.
//!
//! `ρ_G(X)` is the GF(2) rank of the `X × (V(G)−X)` adjacency submatrix and
//! `κ_G(S,T)` is the minimum of `ρ_G(X)` over `S ⊆ X ⊆ V(G)−T`.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::rank_of_words;
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnError {
    #[error("terminal sets overlap in {0:?}")]
    Overlap(VertexSet),
    #[error("set contains non-vertices {0:?}")]
    NotVertices(VertexSet),
}

/// An exact half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(v: i64) -> Self {
        HalfInt { twice: 2 * v }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: Self) -> Self {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: Self) -> Self {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Minimum connectivity together with the numerically smallest minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaResult {
    pub value: usize,
    pub witness: VertexSet,
}

fn check_pair(g: &Graph, s: VertexSet, t: VertexSet) -> Result<(), ConnError> {
    let outside = (s | t) - g.vertices();
    if !outside.is_empty() {
        return Err(ConnError::NotVertices(outside));
    }
    if !s.is_disjoint(t) {
        return Err(ConnError::Overlap(s & t));
    }
    Ok(())
}

/// Rank of the `rows × cols` block of the adjacency matrix.
#[inline]
fn block_rank(g: &Graph, rows: VertexSet, cols: VertexSet) -> usize {
    let (rows, cols) = if rows.len() <= cols.len() {
        (rows, cols)
    } else {
        (cols, rows)
    };
    let mut buf = [0u64; 64];
    let mut k = 0;
    for u in rows {
        let r = g.row(u) & cols.bits();
        if r != 0 {
            buf[k] = r;
            k += 1;
        }
    }
    rank_of_words(&mut buf[..k])
}

/// `ρ_G(X)`. Members of `x` that are not vertices of `g` are ignored.
#[inline]
pub fn cut_rank(g: &Graph, x: VertexSet) -> usize {
    let v = g.vertices();
    debug_assert!(x.is_subset(v), "cut_rank of a set with non-vertices");
    let x = x & v;
    block_rank(g, x, v - x)
}

/// `κ_G(S,T)` by branch and bound.
///
/// Free vertices are decided from the highest id down, "outside X" before
/// "inside X", so leaves are reached in increasing order of the candidate
/// mask and the first optimum found is the smallest minimizer. A partial
/// assignment with `X_in ⊆ X` and `X_out ⊆ V−X` is bounded below by the rank
/// of the `X_in × X_out` block, which is `ρ` of `X_in` in the graph with the
/// undecided vertices deleted; deleting vertices never raises a cut-rank.
pub fn kappa(g: &Graph, s: VertexSet, t: VertexSet) -> Result<KappaResult, ConnError> {
    check_pair(g, s, t)?;
    let free: Vec<usize> = (g.vertices() - s - t).iter().rev().collect();
    let mut search = Search {
        g,
        free: &free,
        best: usize::MAX,
        witness: s,
    };
    search.descend(0, s, t);
    Ok(KappaResult {
        value: search.best,
        witness: search.witness,
    })
}

struct Search<'a> {
    g: &'a Graph,
    free: &'a [usize],
    best: usize,
    witness: VertexSet,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, inside: VertexSet, outside: VertexSet) {
        let bound = block_rank(self.g, inside, outside);
        if bound >= self.best {
            return;
        }
        if depth == self.free.len() {
            // All vertices decided: the block is the whole cut.
            self.best = bound;
            self.witness = inside;
            return;
        }
        let v = self.free[depth];
        self.descend(depth + 1, inside, outside.with(v));
        self.descend(depth + 1, inside.with(v), outside);
    }
}

/// `κ_G(S,T)` by plain enumeration of every admissible set, with the same
/// tie-breaking as [`kappa`]. Exponential; used as an oracle.
pub fn kappa_bruteforce(g: &Graph, s: VertexSet, t: VertexSet) -> Result<KappaResult, ConnError> {
    check_pair(g, s, t)?;
    let free = (g.vertices() - s - t).bits();
    let mut best = usize::MAX;
    let mut witness = s;
    let mut w = 0u64;
    loop {
        let x = s | VertexSet::from_bits(w);
        let r = cut_rank(g, x);
        if r < best {
            best = r;
            witness = x;
        }
        if w == free {
            break;
        }
        w = w.wrapping_sub(free) & free;
    }
    Ok(KappaResult {
        value: best,
        witness,
    })
}

/// `½(ρ(S) + ρ(T) − ρ(S∪T))`.
pub fn local_conn(g: &Graph, s: VertexSet, t: VertexSet) -> Result<HalfInt, ConnError> {
    check_pair(g, s, t)?;
    let twice = cut_rank(g, s) + cut_rank(g, t);
    Ok(HalfInt::from_twice(twice as i64 - cut_rank(g, s | t) as i64))
}

/// Whether `x` is an `(S,T)`-separating set of order `k`.
pub fn is_separating(g: &Graph, s: VertexSet, t: VertexSet, x: VertexSet, k: usize) -> bool {
    s.is_subset(x)
        && x.is_disjoint(t)
        && x.is_subset(g.vertices())
        && cut_rank(g, x) == k
}

/// Finds `S₁ ⊆ S` and `T₁ ⊆ T` with `|S₁| = |T₁| = κ(S₁,T₁) = κ(S,T)`.
///
/// `X ↦ κ(X,T)` is the rank function of a matroid on `V−T`; `S₁` is the
/// greedy basis of `S` in ascending id order. `T₁` is then the greedy basis
/// of `T` in the matroid `X ↦ κ(S₁,X)`.
pub fn shrink_terminals(
    g: &Graph,
    s: VertexSet,
    t: VertexSet,
) -> Result<(VertexSet, VertexSet), ConnError> {
    let target = kappa(g, s, t)?.value;
    let mut s1 = VertexSet::EMPTY;
    let mut rank = 0;
    for x in s {
        if rank == target {
            break;
        }
        let r = kappa(g, s1.with(x), t)?.value;
        if r > rank {
            s1 = s1.with(x);
            rank = r;
        }
    }
    let mut t1 = VertexSet::EMPTY;
    rank = 0;
    for y in t {
        if rank == target {
            break;
        }
        let r = kappa(g, s1, t1.with(y))?.value;
        if r > rank {
            t1 = t1.with(y);
            rank = r;
        }
    }
    debug_assert_eq!((s1.len(), t1.len()), (target, target));
    Ok((s1, t1))
}
