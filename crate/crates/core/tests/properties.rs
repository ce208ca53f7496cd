use std::collections::HashSet;

use cutlink::{
    cut_rank, is_separating, kappa, kappa_bruteforce, local_conn, separating_chain,
    shrink_terminals, GF2Matrix, Graph, LinkingInstance, ReductionKind, VertexSet,
};
use proptest::prelude::*;

/// Rank as log2 of the size of the row space, by enumerating every
/// combination of rows.
fn span_rank(m: &GF2Matrix) -> usize {
    let rows: Vec<Vec<bool>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect();
    let mut span = HashSet::new();
    for combo in 0u32..(1 << rows.len()) {
        let mut acc = vec![false; m.cols()];
        for (i, row) in rows.iter().enumerate() {
            if combo >> i & 1 == 1 {
                for (a, &b) in acc.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        span.insert(acc);
    }
    span.len().trailing_zeros() as usize
}

fn matrix() -> impl Strategy<Value = GF2Matrix> {
    (0usize..=10, 0usize..=16).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0u8..2, c), r).prop_map(move |rows| {
            if rows.is_empty() {
                GF2Matrix::zeros(0, c)
            } else {
                GF2Matrix::from_rows(&rows).unwrap()
            }
        })
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1usize..=max_n, 0.1f64..0.9).prop_flat_map(|(n, p)| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop::bool::weighted(p), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for v in 1..n {
                for u in 0..v {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// A graph with two disjoint vertex sets given by a per-vertex label
/// (0 free, 1 first set, 2 second set).
fn graph_with_pair(max_n: usize) -> impl Strategy<Value = (Graph, VertexSet, VertexSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.order();
        prop::collection::vec(0u8..3, n).prop_map(move |labels| {
            let pick = |l| labels.iter().enumerate().filter(|&(_, &x)| x == l).map(|(v, _)| v).collect();
            (g.clone(), pick(1), pick(2))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rank_matches_span_oracle(m in matrix()) {
        prop_assert_eq!(m.rank(), span_rank(&m));
    }

    #[test]
    fn rank_of_transpose(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= m.rows().min(m.cols()));
    }

    #[test]
    fn rank_invariant_under_row_operations(m in matrix(), a in 0usize..10, b in 0usize..10) {
        prop_assume!(m.rows() >= 2);
        let (a, b) = (a % m.rows(), b % m.rows());
        prop_assume!(a != b);
        let swapped: Vec<usize> = (0..m.rows()).map(|i| if i == a { b } else if i == b { a } else { i }).collect();
        let all_cols: Vec<usize> = (0..m.cols()).collect();
        prop_assert_eq!(m.submatrix(&swapped, &all_cols).unwrap().rank(), m.rank());
        let mut added = m.clone();
        for j in 0..m.cols() {
            added.set(a, j, m.get(a, j) ^ m.get(b, j));
        }
        prop_assert_eq!(added.rank(), m.rank());
    }

    #[test]
    fn deleting_a_row_or_column(m in matrix(), i in 0usize..16) {
        let r = m.rank();
        let all_rows: Vec<usize> = (0..m.rows()).collect();
        let all_cols: Vec<usize> = (0..m.cols()).collect();
        if m.rows() > 0 {
            let rows: Vec<usize> = all_rows.iter().copied().filter(|&x| x != i % m.rows()).collect();
            let d = m.submatrix(&rows, &all_cols).unwrap().rank();
            prop_assert!(d <= r && r <= d + 1);
        }
        if m.cols() > 0 {
            let cols: Vec<usize> = all_cols.iter().copied().filter(|&x| x != i % m.cols()).collect();
            let d = m.submatrix(&all_rows, &cols).unwrap().rank();
            prop_assert!(d <= r && r <= d + 1);
        }
    }

    #[test]
    fn submatrix_rank_is_bounded(m in matrix(), rows in prop::collection::vec(0usize..10, 0..6), cols in prop::collection::vec(0usize..16, 0..8)) {
        prop_assume!(m.rows() > 0 && m.cols() > 0);
        let rows: Vec<usize> = rows.into_iter().map(|i| i % m.rows()).collect();
        let cols: Vec<usize> = cols.into_iter().map(|j| j % m.cols()).collect();
        let s = m.submatrix(&rows, &cols).unwrap();
        for (i, &ri) in rows.iter().enumerate() {
            for (j, &cj) in cols.iter().enumerate() {
                prop_assert_eq!(s.get(i, j), m.get(ri, cj));
            }
        }
        prop_assert!(s.rank() <= m.rank());
    }

    #[test]
    fn cut_rank_matches_explicit_submatrix((g, x, _) in graph_with_pair(12)) {
        let n = g.order();
        let rows: Vec<Vec<u8>> = (0..n).map(|u| (0..n).map(|v| u8::from(g.is_edge(u, v))).collect()).collect();
        let a = GF2Matrix::from_rows(&rows).unwrap();
        let xs: Vec<usize> = x.iter().collect();
        let ys: Vec<usize> = (g.vertices() - x).iter().collect();
        prop_assert_eq!(cut_rank(&g, x), a.submatrix(&xs, &ys).unwrap().rank());
        prop_assert_eq!(cut_rank(&g, x), cut_rank(&g, g.vertices() - x));
    }

    #[test]
    fn kappa_agrees_with_bruteforce((g, s, t) in graph_with_pair(12)) {
        let fast = kappa(&g, s, t).unwrap();
        let slow = kappa_bruteforce(&g, s, t).unwrap();
        prop_assert_eq!(fast, slow);
        prop_assert!(is_separating(&g, s, t, fast.witness, fast.value));
    }

    #[test]
    fn local_complement_is_an_involution(g in graph(10), v in 0usize..10) {
        let v = v % g.order();
        let h = g.local_complement(v).unwrap();
        prop_assert!(h.validate().is_ok());
        prop_assert_eq!(h.local_complement(v).unwrap(), g);
    }

    #[test]
    fn local_complement_touches_only_neighbour_pairs(g in graph(10), v in 0usize..10) {
        let v = v % g.order();
        let h = g.local_complement(v).unwrap();
        let nv = g.neighbors(v);
        for (a, b) in (0..g.order()).flat_map(|a| (0..a).map(move |b| (a, b))) {
            let toggled = nv.contains(a) && nv.contains(b);
            prop_assert_eq!(h.is_edge(a, b), g.is_edge(a, b) ^ toggled);
        }
    }

    #[test]
    fn pivot_is_symmetric_and_preserves_cut_rank(g in graph(9), e in 0usize..64, x in any::<u64>()) {
        let edges: Vec<_> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v) = edges[e % edges.len()];
        let p = g.pivot(u, v).unwrap();
        prop_assert_eq!(&p, &g.pivot(v, u).unwrap());
        let x = VertexSet::from_bits(x) & g.vertices();
        prop_assert_eq!(cut_rank(&p, x), cut_rank(&g, x));
    }

    #[test]
    fn local_conn_of_complement_is_cut_rank((g, s, _) in graph_with_pair(10)) {
        let t = g.vertices() - s;
        prop_assert_eq!(local_conn(&g, s, t).unwrap().twice(), 2 * cut_rank(&g, s) as i64);
    }

    #[test]
    fn shrink_terminals_postcondition((g, s, t) in graph_with_pair(10)) {
        let (s1, t1) = shrink_terminals(&g, s, t).unwrap();
        let l = kappa_bruteforce(&g, s, t).unwrap().value;
        prop_assert!(s1.is_subset(s) && t1.is_subset(t));
        prop_assert_eq!(s1.len(), l);
        prop_assert_eq!(t1.len(), l);
        prop_assert_eq!(kappa_bruteforce(&g, s1, t1).unwrap().value, l);
    }

    #[test]
    fn reduce_preserving_keeps_both_connectivities(
        (g, q, r) in graph_with_pair(10),
        labels in prop::collection::vec(0u8..3, 10),
        drop_bits in any::<u64>(),
    ) {
        let mut s = VertexSet::EMPTY;
        let mut t = VertexSet::EMPTY;
        for v in g.vertices() {
            match labels[v] { 1 => s = s.with(v), 2 => t = t.with(v), _ => {} }
        }
        let inst = LinkingInstance::new(g.clone(), q, r, s, t).unwrap();
        let drop = VertexSet::from_bits(drop_bits) & inst.free();
        let red = cutlink::reduce_preserving(&inst, drop).unwrap();
        prop_assert_eq!(red.graph.vertices(), g.vertices() - drop);
        prop_assert_eq!(kappa_bruteforce(&red.graph, q, r).unwrap().value, inst.k());
        prop_assert_eq!(kappa_bruteforce(&red.graph, s, t).unwrap().value, inst.l());
    }

    #[test]
    fn separating_chain_invariants((g, s, t) in graph_with_pair(9)) {
        let mut f = VertexSet::EMPTY;
        for v in g.vertices() - s - t {
            if !cutlink::is_flexible(&g, s, t, v).unwrap() {
                f = f.with(v);
            }
        }
        let chain = separating_chain(&g, s, t, f).unwrap();
        let k = kappa_bruteforce(&g, s, t).unwrap().value;
        prop_assert_eq!(chain.len(), f.len());
        let mut prefix = VertexSet::EMPTY;
        for (i, (&fi, &a)) in chain.order.iter().zip(&chain.sets).enumerate() {
            prefix = prefix.with(fi);
            prop_assert!(is_separating(&g, s, t, a, k));
            prop_assert_eq!(a & f, prefix);
            if i > 0 {
                prop_assert!(chain.sets[i - 1].is_subset(a));
            }
        }
    }

    #[test]
    fn deletion_never_raises_kappa((g, s, t) in graph_with_pair(10), v in 0usize..10, kind in 0usize..3) {
        let free: Vec<usize> = (g.vertices() - s - t).iter().collect();
        if free.is_empty() {
            return Ok(());
        }
        let v = free[v % free.len()];
        let kind = ReductionKind::ALL[kind];
        let h = g.reduce(v, kind).unwrap();
        prop_assert!(kappa(&h, s, t).unwrap().value <= kappa(&g, s, t).unwrap().value);
    }
}

#[test]
fn local_complement_involution_exhaustive_small() {
    for n in 1..=5 {
        let pairs = n * (n - 1) / 2;
        for mask in 0u32..(1 << pairs) {
            let mut edges = Vec::new();
            let mut k = 0;
            for v in 1..n {
                for u in 0..v {
                    if mask >> k & 1 == 1 {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            for v in 0..n {
                assert_eq!(g.local_complement(v).unwrap().local_complement(v).unwrap(), g);
            }
        }
    }
}
