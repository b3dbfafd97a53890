#![allow(dead_code)]

use std::collections::BTreeSet;

use graphstar_core::graph::permutations;
use graphstar_core::Graph;

/// Adjacency matrix as a flat row-major vector.
type Matrix = Vec<u8>;

fn relabeled(d: &Matrix, n: usize, perm: &[usize]) -> Matrix {
    let mut out = vec![0; n * n];
    for v in 0..n {
        for w in 0..n {
            out[perm[v] * n + perm[w]] = d[v * n + w];
        }
    }
    out
}

fn canonical(d: &Matrix, n: usize, perms: &[Vec<usize>]) -> Matrix {
    perms.iter().map(|p| relabeled(d, n, p)).min().expect("at least one permutation")
}

fn fill(n: usize, cell: usize, budget: usize, cur: &mut Matrix, out: &mut Vec<Matrix>) {
    if cell == n * n {
        out.push(cur.clone());
        return;
    }
    for k in 0..=budget {
        cur[cell] = k as u8;
        fill(n, cell + 1, budget - k, cur, out);
    }
    cur[cell] = 0;
}

/// Every multigraph on `1..=max_vertices` vertices with at most `max_edges`
/// edges and no sinks, one representative per isomorphism class.
pub fn sinkless_corpus(max_vertices: usize, max_edges: usize) -> Vec<Graph> {
    let mut graphs = Vec::new();
    for n in 1..=max_vertices {
        let perms = permutations(n);
        let mut all = Vec::new();
        fill(n, 0, max_edges, &mut vec![0; n * n], &mut all);
        let mut seen = BTreeSet::new();
        for d in all {
            if (0..n).any(|v| d[v * n..(v + 1) * n].iter().all(|&x| x == 0)) {
                continue;
            }
            let c = canonical(&d, n, &perms);
            if seen.insert(c.clone()) {
                let mut pairs = Vec::new();
                for v in 0..n {
                    for w in 0..n {
                        for _ in 0..c[v * n + w] {
                            pairs.push((v, w));
                        }
                    }
                }
                graphs.push(Graph::from_pairs(n, &pairs).expect("corpus graph"));
            }
        }
    }
    graphs
}

/// Named graphs used across the integration suites.
pub fn named_graphs() -> Vec<(&'static str, Graph)> {
    vec![
        ("bouquet_1", Graph::bouquet(1)),
        ("bouquet_2", Graph::bouquet(2)),
        ("bouquet_3", Graph::bouquet(3)),
        ("cycle_3", Graph::cycle(3)),
        ("cycle_4", Graph::cycle(4)),
        ("cycle_union_2x2", Graph::cycle_union(2, 2)),
        ("cycle_union_3x2", Graph::cycle_union(3, 2)),
        ("bouquet_union_2x2", Graph::bouquet_union(2, 2)),
        ("bouquet_union_1x3", Graph::bouquet_union(1, 3)),
        ("complete_3", Graph::from_pairs(3, &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]).unwrap()),
        ("star_3", Graph::from_pairs(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap()),
        ("tail_into_loop", Graph::from_pairs(2, &[(0, 1), (1, 1)]).unwrap()),
        ("loop_and_cycle", Graph::from_pairs(3, &[(0, 0), (0, 1), (1, 2), (2, 0)]).unwrap()),
        ("double_edge_cycle", Graph::from_pairs(2, &[(0, 1), (0, 1), (1, 0)]).unwrap()),
        ("full_2", Graph::from_pairs(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap()),
    ]
}
