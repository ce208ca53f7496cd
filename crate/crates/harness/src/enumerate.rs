//! Graph generators: all labeled graphs of a given order, seeded random
//! graphs, and graph6 files.

use cutlink::{Graph, Vertex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest order accepted for exhaustive enumeration.
pub const MAX_EXHAUSTIVE: usize = 9;

/// Number of vertex pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Vertex pairs `(i, j)`, `i < j`, in graph6 order: by `j`, then `i`.
pub fn pairs(n: usize) -> impl Iterator<Item = (Vertex, Vertex)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j)))
}

/// The graph on `0..n` whose edge set is given by `mask` over [`pairs`].
pub fn graph_from_edge_mask(n: usize, mask: u64) -> Graph {
    let mut rows = vec![0u64; n];
    for (k, (i, j)) in pairs(n).enumerate() {
        if mask >> k & 1 == 1 {
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
        }
    }
    Graph::from_adjacency(&rows).expect("edge masks give simple graphs")
}

/// Inverse of [`graph_from_edge_mask`] for graphs on `0..n` with at most 11
/// vertices.
pub fn edge_mask(g: &Graph) -> u64 {
    let n = g.order();
    debug_assert!(pair_count(n) <= 64);
    pairs(n)
        .enumerate()
        .filter(|&(_, (i, j))| g.is_edge(i, j))
        .fold(0, |acc, (k, _)| acc | 1 << k)
}

/// All `2^{n(n-1)/2}` labeled graphs on `0..n`, in increasing edge-mask order.
///
/// Panics if `n > MAX_EXHAUSTIVE`.
pub fn enumerate_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= MAX_EXHAUSTIVE, "exhaustive enumeration is limited to {MAX_EXHAUSTIVE} vertices");
    (0..1u64 << pair_count(n)).map(move |mask| graph_from_edge_mask(n, mask))
}

pub fn random_graph<R: Rng>(n: usize, edge_prob: f64, rng: &mut R) -> Graph {
    let mut rows = vec![0u64; n];
    for (i, j) in pairs(n) {
        if rng.gen_bool(edge_prob) {
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
        }
    }
    Graph::from_adjacency(&rows).expect("random rows are symmetric")
}

/// Independent generator for item `index` of a run seeded with `seed`,
/// separated by `purpose` so different uses of one seed do not correlate.
pub fn item_rng(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ purpose.rotate_left(32));
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(enumerate_graphs(1).count(), 1);
        assert_eq!(enumerate_graphs(3).count(), 8);
        assert_eq!(enumerate_graphs(4).count(), 64);
    }

    #[test]
    fn order_and_mask_round_trip() {
        let graphs: Vec<_> = enumerate_graphs(4).collect();
        for (mask, g) in graphs.iter().enumerate() {
            assert_eq!(edge_mask(g), mask as u64);
        }
        assert_eq!(graphs[1], Graph::from_edges(4, &[(0, 1)]).unwrap());
        assert_eq!(graphs[2], Graph::from_edges(4, &[(0, 2)]).unwrap());
        assert_eq!(graphs[63], Graph::complete(4));
    }

    #[test]
    fn item_rng_is_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| item_rng(7, 1, 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| item_rng(7, 1, 3).gen()).collect();
        assert_eq!(a, b);
        let c: u64 = item_rng(7, 1, 4).gen();
        let d: u64 = item_rng(7, 2, 3).gen();
        let e: u64 = item_rng(7, 1, 3).gen();
        assert_ne!(c, e);
        assert_ne!(d, e);
    }
}
