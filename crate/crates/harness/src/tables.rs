//! Per-graph lookup tables used by the exhaustive sweeps.
//!
//! [`RhoTable`] stores `ρ` of every vertex subset, [`KappaTable`] derives `κ`
//! for every disjoint pair from it by dynamic programming over the free
//! vertices (a route independent of the branch-and-bound in `cutlink`), and
//! [`OrbitTable`] labels every graph on a small labeled vertex set with its
//! local-complementation orbit.

use std::sync::OnceLock;

use cutlink::{cut_rank, Graph, VertexSet};

use crate::enumerate::{edge_mask, graph_from_edge_mask, pair_count};

/// Largest vertex count for which [`RhoTable`] is built.
pub const MAX_RHO_TABLE: usize = 16;
/// Largest vertex count for which [`KappaTable`] is built.
pub const MAX_KAPPA_TABLE: usize = 10;
/// Largest labeled vertex count covered by [`OrbitTable`].
pub const MAX_ORBIT_TABLE: usize = 7;

/// `ρ_G(X)` for every `X ⊆ V(G)`, indexed by compressed masks.
#[derive(Debug, Clone)]
pub struct RhoTable {
    live: VertexSet,
    rho: Vec<u8>,
}

impl RhoTable {
    pub fn new(g: &Graph) -> Self {
        let live = g.vertices();
        let m = live.len();
        assert!(m <= MAX_RHO_TABLE, "rho table limited to {MAX_RHO_TABLE} vertices");
        let rho = (0..1u64 << m)
            .map(|c| cut_rank(g, live.expand(c)) as u8)
            .collect();
        RhoTable { live, rho }
    }

    pub fn vertices(&self) -> VertexSet {
        self.live
    }

    #[inline]
    pub fn rho(&self, x: VertexSet) -> usize {
        debug_assert!(x.is_subset(self.live));
        self.rho[self.live.compress(x) as usize] as usize
    }

    #[inline]
    pub(crate) fn rho_compact(&self, c: u64) -> usize {
        self.rho[c as usize] as usize
    }
}

/// `κ_G(S,T)` for every disjoint pair, indexed by a base-3 code per vertex
/// (0 free, 1 in `S`, 2 in `T`).
#[derive(Debug, Clone)]
pub struct KappaTable {
    live: VertexSet,
    /// `ternary[c]` is the base-3 number with digit 1 at each bit of `c`.
    ternary: Vec<u32>,
    kappa: Vec<u8>,
}

impl KappaTable {
    pub fn new(rho: &RhoTable) -> Self {
        let live = rho.vertices();
        let m = live.len();
        assert!(m <= MAX_KAPPA_TABLE, "kappa table limited to {MAX_KAPPA_TABLE} vertices");
        let pow3: Vec<u32> = (0..m).map(|i| 3u32.pow(i as u32)).collect();
        let ternary: Vec<u32> = (0..1u64 << m)
            .map(|c| (0..m).filter(|&i| c >> i & 1 == 1).map(|i| pow3[i]).sum())
            .collect();
        let total = 3usize.pow(m as u32);
        let mut kappa = vec![0u8; total];
        // Codes with a free vertex depend only on larger codes.
        for code in (0..total).rev() {
            let mut rest = code;
            let mut s_bits = 0u64;
            let mut free = None;
            for i in 0..m {
                match rest % 3 {
                    0 if free.is_none() => free = Some(i),
                    1 => s_bits |= 1 << i,
                    _ => {}
                }
                rest /= 3;
            }
            kappa[code] = match free {
                None => rho.rho_compact(s_bits) as u8,
                Some(i) => {
                    let p = pow3[i] as usize;
                    kappa[code + p].min(kappa[code + 2 * p])
                }
            };
        }
        KappaTable {
            live,
            ternary,
            kappa,
        }
    }

    #[inline]
    pub fn kappa(&self, s: VertexSet, t: VertexSet) -> usize {
        debug_assert!(s.is_disjoint(t) && (s | t).is_subset(self.live));
        let cs = self.live.compress(s) as usize;
        let ct = self.live.compress(t) as usize;
        self.kappa[(self.ternary[cs] + 2 * self.ternary[ct]) as usize] as usize
    }
}

/// Orbit labels for all graphs on `m` labeled vertices.
#[derive(Debug)]
pub struct OrbitTable {
    m: usize,
    orbit: Vec<u32>,
    orbits: u32,
}

impl OrbitTable {
    pub fn new(m: usize) -> Self {
        assert!(m <= MAX_ORBIT_TABLE, "orbit table limited to {MAX_ORBIT_TABLE} vertices");
        let total = 1usize << pair_count(m);
        let mut orbit = vec![u32::MAX; total];
        let mut next_id = 0;
        let mut stack = Vec::new();
        for start in 0..total {
            if orbit[start] != u32::MAX {
                continue;
            }
            orbit[start] = next_id;
            stack.push(start as u64);
            while let Some(mask) = stack.pop() {
                let g = graph_from_edge_mask(m, mask);
                for v in 0..m {
                    let h = g.local_complement(v).expect("v is a vertex");
                    let hm = edge_mask(&h) as usize;
                    if orbit[hm] == u32::MAX {
                        orbit[hm] = next_id;
                        stack.push(hm as u64);
                    }
                }
            }
            next_id += 1;
        }
        OrbitTable {
            m,
            orbit,
            orbits: next_id,
        }
    }

    /// Shared table for `m` vertices, built on first use.
    pub fn shared(m: usize) -> &'static OrbitTable {
        #[allow(clippy::declare_interior_mutable_const)]
        const UNSET: OnceLock<OrbitTable> = OnceLock::new();
        static TABLES: [OnceLock<OrbitTable>; MAX_ORBIT_TABLE + 1] = [UNSET; MAX_ORBIT_TABLE + 1];
        TABLES[m].get_or_init(|| OrbitTable::new(m))
    }

    pub fn orbit_count(&self) -> u32 {
        self.orbits
    }

    /// Orbit label of `g`, whose vertices are relabeled `0..m` in ascending
    /// id order.
    pub fn orbit_of(&self, g: &Graph) -> u32 {
        assert_eq!(g.vertex_count(), self.m);
        let live = g.vertices();
        let mut rows = vec![0u64; self.m];
        for (i, v) in live.iter().enumerate() {
            rows[i] = live.compress(g.neighbors(v));
        }
        let compact = Graph::from_adjacency(&rows).expect("compressed rows stay symmetric");
        self.orbit[edge_mask(&compact) as usize]
    }
}

/// Local equivalence of two graphs on the same vertex set: by orbit table
/// when small enough, else by orbit search with `budget`. `None` when the
/// search budget runs out.
pub fn locally_equivalent(g: &Graph, h: &Graph, budget: usize) -> Option<bool> {
    assert_eq!(g.vertices(), h.vertices(), "graphs on different vertex sets");
    let m = g.vertex_count();
    if m <= MAX_ORBIT_TABLE {
        let table = OrbitTable::shared(m);
        return Some(table.orbit_of(g) == table.orbit_of(h));
    }
    g.locally_equivalent(h, budget).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_graphs;
    use cutlink::kappa_bruteforce;

    #[test]
    fn rho_table_matches_cut_rank() {
        let g = Graph::cycle(6).delete(3).unwrap();
        let t = RhoTable::new(&g);
        for c in 0..32u64 {
            let x = g.vertices().expand(c);
            assert_eq!(t.rho(x), cut_rank(&g, x));
        }
    }

    #[test]
    fn kappa_table_matches_bruteforce() {
        for g in enumerate_graphs(5).step_by(7) {
            let kt = KappaTable::new(&RhoTable::new(&g));
            for code in 0..243u32 {
                let (mut s, mut t, mut rest) = (VertexSet::EMPTY, VertexSet::EMPTY, code);
                for v in 0..5 {
                    match rest % 3 {
                        1 => s = s.with(v),
                        2 => t = t.with(v),
                        _ => {}
                    }
                    rest /= 3;
                }
                assert_eq!(kt.kappa(s, t), kappa_bruteforce(&g, s, t).unwrap().value);
            }
        }
    }

    #[test]
    fn orbit_counts_small() {
        // Orbits of labeled graphs under local complementation:
        // m=1: 1; m=2: edge and non-edge; m=3: empty, each single edge,
        // each of the three "P3 or triangle" classes centred at a vertex
        // collapse to one connected class.
        assert_eq!(OrbitTable::new(1).orbit_count(), 1);
        assert_eq!(OrbitTable::new(2).orbit_count(), 2);
        assert_eq!(OrbitTable::new(3).orbit_count(), 5);
    }

    #[test]
    fn orbit_table_agrees_with_search() {
        let table = OrbitTable::shared(4);
        let graphs: Vec<_> = enumerate_graphs(4).collect();
        for g in graphs.iter().step_by(3) {
            for h in graphs.iter().step_by(5) {
                let same = table.orbit_of(g) == table.orbit_of(h);
                assert_eq!(g.locally_equivalent(h, 10_000), Ok(same), "{g:?} vs {h:?}");
            }
        }
    }

    #[test]
    fn locally_equivalent_respects_ids() {
        let g = Graph::path(5).delete(0).unwrap();
        let h = g.local_complement(2).unwrap();
        assert_eq!(locally_equivalent(&g, &h, 100), Some(true));
        let e = Graph::empty(5).unwrap().delete(0).unwrap();
        assert_eq!(locally_equivalent(&g, &e, 100), Some(false));
    }
}
