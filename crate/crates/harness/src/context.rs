//! Per-graph evaluation context: cut-rank and connectivity lookups with
//! lazily built tables, and lazily built one-vertex reductions.

use std::cell::OnceCell;

use cutlink::{cut_rank, kappa, local_conn, Graph, HalfInt, OptionSet, ReductionKind, Vertex, VertexSet};

use crate::tables::{KappaTable, RhoTable, MAX_KAPPA_TABLE, MAX_RHO_TABLE};

/// A graph under test plus memoized views of it.
///
/// Tables are only built when the caller expects enough queries to pay for
/// them; otherwise every lookup goes straight to `cutlink`.
pub struct Ctx {
    g: Graph,
    rho_tabled: bool,
    kappa_tabled: bool,
    rho: OnceCell<RhoTable>,
    kappa: OnceCell<KappaTable>,
    minors: Vec<OnceCell<Box<Ctx>>>,
}

impl Ctx {
    /// Context for roughly `planned` configurations on `g`.
    pub fn new(g: Graph, planned: u128) -> Self {
        let m = g.vertex_count();
        let rho_tabled = m <= MAX_RHO_TABLE && planned.saturating_mul(8) >= 1u128 << m;
        let kappa_tabled = m <= MAX_KAPPA_TABLE && planned.saturating_mul(8) >= 3u128.pow(m as u32);
        Self::with_flags(g, rho_tabled, kappa_tabled)
    }

    fn with_flags(g: Graph, rho_tabled: bool, kappa_tabled: bool) -> Self {
        let slots = 3 * g.order();
        Ctx {
            g,
            rho_tabled,
            kappa_tabled,
            rho: OnceCell::new(),
            kappa: OnceCell::new(),
            minors: (0..slots).map(|_| OnceCell::new()).collect(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn live(&self) -> VertexSet {
        self.g.vertices()
    }

    pub fn m(&self) -> usize {
        self.g.vertex_count()
    }

    fn rho_table(&self) -> &RhoTable {
        self.rho.get_or_init(|| RhoTable::new(&self.g))
    }

    pub fn rho(&self, x: VertexSet) -> usize {
        if self.rho_tabled {
            self.rho_table().rho(x)
        } else {
            cut_rank(&self.g, x)
        }
    }

    pub fn kappa(&self, s: VertexSet, t: VertexSet) -> usize {
        if self.kappa_tabled {
            self.kappa
                .get_or_init(|| KappaTable::new(self.rho_table()))
                .kappa(s, t)
        } else {
            kappa(&self.g, s, t).expect("disjoint vertex sets").value
        }
    }

    /// Local connectivity `½(ρ(S) + ρ(T) − ρ(S∪T))`.
    pub fn local_conn(&self, s: VertexSet, t: VertexSet) -> HalfInt {
        if self.rho_tabled {
            let twice = self.rho(s) + self.rho(t);
            HalfInt::from_twice(twice as i64 - self.rho(s | t) as i64)
        } else {
            local_conn(&self.g, s, t).expect("disjoint vertex sets")
        }
    }

    /// The graph obtained by reducing `v` with `kind`. An isolated vertex
    /// shares one context for all three kinds.
    pub fn minor(&self, v: Vertex, kind: ReductionKind) -> &Ctx {
        let kind = if self.g.degree(v) == 0 {
            ReductionKind::Delete
        } else {
            kind
        };
        self.minors[3 * v + kind.index()].get_or_init(|| {
            let h = self.g.reduce(v, kind).expect("v is a vertex");
            Box::new(Ctx::with_flags(h, self.rho_tabled, self.kappa_tabled))
        })
    }

    /// Reductions at `v` keeping every `κ(s,t) = target`, computed from the
    /// reduced graphs directly.
    pub fn options(&self, pairs: &[(VertexSet, VertexSet, usize)], v: Vertex) -> OptionSet {
        ReductionKind::ALL
            .into_iter()
            .filter(|&kind| {
                let h = self.minor(v, kind);
                pairs.iter().all(|&(s, t, target)| h.kappa(s, t) == target)
            })
            .collect()
    }

    pub fn is_flexible(&self, s: VertexSet, t: VertexSet, v: Vertex) -> bool {
        let l = self.kappa(s, t);
        self.options(&[(s, t, l)], v) == OptionSet::ALL
    }
}
