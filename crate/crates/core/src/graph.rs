//! Simple graphs on at most 64 vertices and the vertex-minor operations.
//!
//! Vertex ids are stable: deleting a vertex removes it from
//! [`Graph::vertices`] but never renumbers the others, so terminal sets keep
//! their meaning across a sequence of reductions.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vertex_set::{Vertex, VertexSet, MAX_VERTICES};

/// Default cap on the number of graphs visited by [`Graph::locally_equivalent`].
pub const DEFAULT_ORBIT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph order {0} exceeds the supported maximum of 64 vertices")]
    TooManyVertices(usize),
    #[error("vertex {vertex} is not a vertex of the graph")]
    NoSuchVertex { vertex: Vertex },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("adjacency is not symmetric at ({0}, {1})")]
    Asymmetric(Vertex, Vertex),
    #[error("{u}{v} is not an edge")]
    NotAnEdge { u: Vertex, v: Vertex },
    #[error("graphs are on different vertex sets ({left} vs {right})")]
    VertexSetMismatch { left: VertexSet, right: VertexSet },
    #[error("local-complementation orbit exceeded the budget of {0} graphs")]
    BudgetExceeded(usize),
}

/// The three one-vertex reductions `G\v`, `G*v\v` and `G/v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReductionKind {
    Delete,
    LcDelete,
    PivotDelete,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 3] = [
        ReductionKind::Delete,
        ReductionKind::LcDelete,
        ReductionKind::PivotDelete,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Delete => "DELETE",
            ReductionKind::LcDelete => "LC_DELETE",
            ReductionKind::PivotDelete => "PIVOT_DELETE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A simple undirected graph as symmetric adjacency bit-rows.
///
/// `adj[v]` is the neighbourhood of `v`; rows of deleted vertices and of ids
/// at or above `order` are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    order: usize,
    vertices: VertexSet,
    adj: [u64; MAX_VERTICES],
}

impl Graph {
    /// Edgeless graph on `0..n`.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph {
            order: n,
            vertices: VertexSet::range(n),
            adj: [0; MAX_VERTICES],
        })
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::NoSuchVertex { vertex: w });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            g.adj[u] |= 1 << v;
            g.adj[v] |= 1 << u;
        }
        Ok(g)
    }

    /// Builds a graph on `0..rows.len()` from neighbourhood masks, checking
    /// symmetry and loop-freeness.
    pub fn from_adjacency(rows: &[u64]) -> Result<Self, GraphError> {
        let mut g = Self::empty(rows.len())?;
        let live = g.vertices.bits();
        for (v, &row) in rows.iter().enumerate() {
            if row & !live != 0 {
                let w = (row & !live).trailing_zeros() as usize;
                return Err(GraphError::NoSuchVertex { vertex: w });
            }
            g.adj[v] = row;
        }
        g.validate()?;
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path order within range")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges).expect("cycle order within range")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n).expect("complete order within range");
        let all = g.vertices.bits();
        for v in 0..n {
            g.adj[v] = all & !(1 << v);
        }
        g
    }

    /// Size of the id space; live ids are a subset of `0..order`.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        self.vertices
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(v)
    }

    /// `N_G(v)`; empty for ids that are not vertices.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> VertexSet {
        if v < MAX_VERTICES {
            VertexSet::from_bits(self.adj[v])
        } else {
            VertexSet::EMPTY
        }
    }

    #[inline]
    pub(crate) fn row(&self, v: Vertex) -> u64 {
        self.adj[v]
    }

    #[inline]
    pub fn is_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < MAX_VERTICES && self.neighbors(v).contains(u)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.iter().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in ascending order of `v`, then `u`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices.iter().flat_map(move |v| {
            (self.neighbors(v) & VertexSet::range(v))
                .iter()
                .map(move |u| (u, v))
        })
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if self.has_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::NoSuchVertex { vertex: v })
        }
    }

    /// Checks symmetry, loop-freeness and that rows stay inside the vertex set.
    pub fn validate(&self) -> Result<(), GraphError> {
        let live = self.vertices.bits();
        for v in 0..MAX_VERTICES {
            let row = self.adj[v];
            if !self.vertices.contains(v) {
                if row != 0 {
                    return Err(GraphError::NoSuchVertex { vertex: v });
                }
                continue;
            }
            if row & !live != 0 {
                let w = (row & !live).trailing_zeros() as usize;
                return Err(GraphError::NoSuchVertex { vertex: w });
            }
            if (row >> v) & 1 == 1 {
                return Err(GraphError::SelfLoop(v));
            }
            for u in VertexSet::from_bits(row) {
                if (self.adj[u] >> v) & 1 == 0 {
                    return Err(GraphError::Asymmetric(v, u));
                }
            }
        }
        Ok(())
    }

    /// `G*v`: complements the subgraph induced on `N_G(v)`.
    pub fn local_complement(&self, v: Vertex) -> Result<Graph, GraphError> {
        self.check_vertex(v)?;
        let mut g = self.clone();
        g.local_complement_in_place(v);
        Ok(g)
    }

    #[inline]
    pub(crate) fn local_complement_in_place(&mut self, v: Vertex) {
        let nv = self.adj[v];
        let mut rest = nv;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.adj[x] ^= nv & !(1u64 << x);
        }
        debug_assert!(self.validate().is_ok());
    }

    /// `G∧uv = G*u*v*u`, defined only for edges.
    pub fn pivot(&self, u: Vertex, v: Vertex) -> Result<Graph, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.is_edge(u, v) {
            return Err(GraphError::NotAnEdge { u, v });
        }
        let mut g = self.clone();
        g.pivot_in_place(u, v);
        Ok(g)
    }

    #[inline]
    pub(crate) fn pivot_in_place(&mut self, u: Vertex, v: Vertex) {
        self.local_complement_in_place(u);
        self.local_complement_in_place(v);
        self.local_complement_in_place(u);
    }

    /// `G\v`. The remaining vertices keep their ids.
    pub fn delete(&self, v: Vertex) -> Result<Graph, GraphError> {
        self.check_vertex(v)?;
        let mut g = self.clone();
        g.delete_in_place(v);
        Ok(g)
    }

    #[inline]
    pub(crate) fn delete_in_place(&mut self, v: Vertex) {
        let mut rest = self.adj[v];
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.adj[x] &= !(1u64 << v);
        }
        self.adj[v] = 0;
        self.vertices = self.vertices.without(v);
    }

    /// Deletes every vertex of `x`.
    pub fn delete_set(&self, x: VertexSet) -> Result<Graph, GraphError> {
        if let Some(v) = (x - self.vertices).min() {
            return Err(GraphError::NoSuchVertex { vertex: v });
        }
        let mut g = self.clone();
        for v in x {
            g.delete_in_place(v);
        }
        Ok(g)
    }

    /// Induced subgraph on `x`.
    pub fn induced(&self, x: VertexSet) -> Result<Graph, GraphError> {
        if let Some(v) = (x - self.vertices).min() {
            return Err(GraphError::NoSuchVertex { vertex: v });
        }
        self.delete_set(self.vertices - x)
    }

    /// The neighbour used for `G/v`: the lowest-id neighbour, if any.
    #[inline]
    pub fn canonical_pivot_neighbor(&self, v: Vertex) -> Option<Vertex> {
        self.neighbors(v).min()
    }

    /// Applies one of the three one-vertex reductions at `v`.
    ///
    /// `PivotDelete` pivots on the lowest-id neighbour of `v`, or deletes `v`
    /// outright when it is isolated.
    pub fn reduce(&self, v: Vertex, kind: ReductionKind) -> Result<Graph, GraphError> {
        self.check_vertex(v)?;
        Ok(self.reduce_unchecked(v, kind))
    }

    pub(crate) fn reduce_unchecked(&self, v: Vertex, kind: ReductionKind) -> Graph {
        let mut g = self.clone();
        match kind {
            ReductionKind::Delete => {}
            ReductionKind::LcDelete => g.local_complement_in_place(v),
            ReductionKind::PivotDelete => {
                if let Some(u) = self.canonical_pivot_neighbor(v) {
                    g.pivot_in_place(u, v);
                }
            }
        }
        g.delete_in_place(v);
        g
    }

    /// `G/v` pivoting on a specific neighbour `u`.
    pub fn pivot_delete_via(&self, v: Vertex, u: Vertex) -> Result<Graph, GraphError> {
        let mut g = self.pivot(u, v)?;
        g.delete_in_place(v);
        Ok(g)
    }

    fn orbit_key(&self) -> Box<[u64]> {
        self.adj[..self.order].into()
    }

    /// Whether `other` is reachable from `self` by local complementations.
    ///
    /// Breadth-first search over the orbit of `self`; fails with
    /// [`GraphError::BudgetExceeded`] once more than `node_budget` distinct
    /// graphs have been visited without reaching `other` or closing the orbit.
    pub fn locally_equivalent(&self, other: &Graph, node_budget: usize) -> Result<bool, GraphError> {
        if self.vertices != other.vertices {
            return Err(GraphError::VertexSetMismatch {
                left: self.vertices,
                right: other.vertices,
            });
        }
        if self == other {
            return Ok(true);
        }
        // Cheap necessary condition: local complementation preserves every
        // cut-rank, in particular the rank of each single vertex (its degree
        // being zero or not).
        for v in self.vertices {
            if (self.adj[v] == 0) != (other.adj[v] == 0) {
                return Ok(false);
            }
        }
        let target = other.orbit_key();
        let mut seen: HashSet<Box<[u64]>> = HashSet::new();
        seen.insert(self.orbit_key());
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(g) = queue.pop_front() {
            for v in g.vertices {
                if g.adj[v] == 0 {
                    continue;
                }
                let mut h = g.clone();
                h.local_complement_in_place(v);
                let key = h.orbit_key();
                if key == target {
                    return Ok(true);
                }
                if seen.insert(key) {
                    if seen.len() > node_budget {
                        return Err(GraphError::BudgetExceeded(node_budget));
                    }
                    queue.push_back(h);
                }
            }
        }
        Ok(false)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(order={}, vertices={:?}, edges=", self.order, self.vertices)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}
