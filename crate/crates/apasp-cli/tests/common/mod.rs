//! Helpers shared by the integration suites.

use apasp_core::{DistanceMatrix, Graph};

/// Independent cubic APSP oracle (Floyd–Warshall), used to cross-check the
/// Dijkstra-based oracle bit-for-bit on integer-weight graphs.
pub fn floyd_warshall(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let mut d = DistanceMatrix::new(n);
    for &(u, v, w) in g.edges() {
        d.set_min(u, v, w);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d.get(i, k);
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                d.set_min(i, j, dik + d.get(k, j));
            }
        }
    }
    d
}
