//! Min-plus matrix products — exact and (1+ε)-approximate via a scaling
//! decomposition — plus the multi-source approximate shortest-path backend
//! the algebraic pipeline stages consume. ∞ arithmetic saturates throughout.

use crate::covering::dijkstra_plain;
use crate::engine::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

const INF: f64 = f64::INFINITY;
/// ∞ stand-in for the integer kernel; small enough that sums cannot wrap.
const INT_INF: i64 = i64::MAX / 4;

/// A rectangular matrix under the min-plus semiring, with vertex labels for
/// rows and columns so that slices like `d_i^j` remember which level sets
/// they were cut from. Entries are nonnegative reals or ∞.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPlusMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    row_labels: Vec<usize>,
    col_labels: Vec<usize>,
}

impl MinPlusMatrix {
    /// `rows x cols` matrix with every entry `value` and identity labels.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        MinPlusMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
            row_labels: (0..rows).collect(),
            col_labels: (0..cols).collect(),
        }
    }

    /// The min-plus identity: zero diagonal, ∞ off it.
    pub fn identity(n: usize) -> Self {
        let mut m = MinPlusMatrix::filled(n, n, INF);
        for i in 0..n {
            m.set(i, i, 0.0);
        }
        m
    }

    /// Matrix from explicit rows (must be rectangular), identity labels.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(MinPlusMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
            row_labels: (0..r).collect(),
            col_labels: (0..c).collect(),
        })
    }

    /// Replaces the vertex labels (lengths must match the dimensions).
    pub fn relabel(mut self, row_labels: Vec<usize>, col_labels: Vec<usize>) -> Result<Self> {
        if row_labels.len() != self.rows || col_labels.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "labels {}x{} for a {}x{} matrix",
                row_labels.len(),
                col_labels.len(),
                self.rows,
                self.cols
            )));
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Vertex labels of the rows.
    pub fn row_labels(&self) -> &[usize] {
        &self.row_labels
    }

    /// Vertex labels of the columns.
    pub fn col_labels(&self) -> &[usize] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }
}

/// Exact min-plus product `C[i][j] = min_k A[i][k] + B[k][j]`.
pub fn mpmm_exact(a: &MinPlusMatrix, b: &MinPlusMatrix) -> Result<MinPlusMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut c = MinPlusMatrix::filled(a.rows, b.cols, INF);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if !aik.is_finite() {
                continue;
            }
            let crow = &mut c.data[i * b.cols..(i + 1) * b.cols];
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (cj, &bkj) in crow.iter_mut().zip(brow) {
                let cand = aik + bkj;
                if cand < *cj {
                    *cj = cand;
                }
            }
        }
    }
    c.relabel(a.row_labels.clone(), b.col_labels.clone())
}

/// `(1+eps)`-approximate min-plus product: returns `C̃` with
/// `C <= C̃ <= (1+eps)·C` entrywise against the exact product `C`.
///
/// Scaling decomposition: for each power-of-two scale `M` spanning the
/// matrices' entry range, entries above `M` are clamped to ∞ and the rest
/// rounded up to integers in `[0, R]` with `R = 2^ceil(log2(4/eps))`; the
/// per-scale exact integer products are rescaled and combined entrywise.
/// Rounding up makes the lower side of the sandwich exact. The weight bound
/// is taken from the entries themselves, so the scale count is
/// `O(log(max entry / min positive entry))`.
pub fn ampmm(a: &MinPlusMatrix, b: &MinPlusMatrix, eps: f64) -> Result<MinPlusMatrix> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ampmm needs eps > 0, got {eps}"
        )));
    }
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let entries = a.data.iter().chain(b.data.iter());
    let mut min_pos = INF;
    let mut max_fin = 0.0f64;
    for &x in entries {
        if x < 0.0 || x.is_nan() {
            return Err(Error::InvalidInput(format!("negative ampmm entry {x}")));
        }
        if x.is_finite() {
            max_fin = max_fin.max(x);
            if x > 0.0 {
                min_pos = min_pos.min(x);
            }
        }
    }
    if !min_pos.is_finite() {
        // No positive finite entries: the exact product is just as cheap.
        return mpmm_exact(a, b);
    }
    let r_exp = (4.0 / eps).log2().ceil().max(0.0) as i32;
    let r_scale = 2f64.powi(r_exp);
    let lo = min_pos.log2().floor() as i32 - 1;
    let hi = max_fin.log2().ceil() as i32 + 1;

    let mut c = MinPlusMatrix::filled(a.rows, b.cols, INF);
    let mut a_int = vec![0i64; a.data.len()];
    let mut b_int = vec![0i64; b.data.len()];
    for m_exp in lo..=hi {
        let m = 2f64.powi(m_exp);
        let quantize = |src: &[f64], dst: &mut [i64]| {
            for (d, &x) in dst.iter_mut().zip(src) {
                *d = if x > m {
                    INT_INF
                } else {
                    // x * r_scale / m only shifts the exponent: exact.
                    (x * r_scale / m).ceil() as i64
                };
            }
        };
        quantize(&a.data, &mut a_int);
        quantize(&b.data, &mut b_int);
        for i in 0..a.rows {
            for k in 0..a.cols {
                let aik = a_int[i * a.cols + k];
                if aik >= INT_INF {
                    continue;
                }
                for j in 0..b.cols {
                    let cand = aik + b_int[k * b.cols + j];
                    if cand < INT_INF {
                        let val = cand as f64 * m / r_scale;
                        if val < c.get(i, j) {
                            c.set(i, j, val);
                        }
                    }
                }
            }
        }
    }
    c.relabel(a.row_labels.clone(), b.col_labels.clone())
}

/// How [`msasp`] computes its rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MsaspBackend {
    /// One Dijkstra per source; valid for every `eps >= 0`.
    #[default]
    Exact,
    /// Repeated [`ampmm`] squaring of the adjacency min-plus matrix with a
    /// per-squaring `ε' = (1+eps)^{1/t} - 1` so the composed error stays
    /// within `(1+eps)`; genuinely approximate.
    Scaled,
}

/// Multi-source approximate shortest paths: an `|S| x n` matrix `M` with
/// `δ(s,v) <= M[s][v] <= (1+eps)·δ(s,v)`. Rows are labeled by the sources in
/// ascending order. `eps = 0` forces the exact backend.
pub fn msasp(g: &Graph, sources: &[usize], eps: f64, backend: MsaspBackend) -> MinPlusMatrix {
    let n = g.n();
    let mut srcs = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    let rows_matrix = |rows: Vec<Vec<f64>>, srcs: Vec<usize>| -> MinPlusMatrix {
        let mut m = MinPlusMatrix::filled(srcs.len(), n, INF);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m.relabel(srcs, (0..n).collect())
            .expect("label lengths match")
    };
    let use_exact = eps == 0.0 || matches!(backend, MsaspBackend::Exact);
    if use_exact {
        let rows: Vec<Vec<f64>> = srcs.iter().map(|&s| dijkstra_plain(g, s)).collect();
        return rows_matrix(rows, srcs);
    }
    // t squarings of the adjacency matrix reach every simple path.
    let t = (n.saturating_sub(1).max(1) as f64).log2().ceil() as u32;
    let mut full = MinPlusMatrix::filled(n, n, INF);
    for i in 0..n {
        full.set(i, i, 0.0);
    }
    for &(u, v, w) in g.edges() {
        if w < full.get(u, v) {
            full.set(u, v, w);
            full.set(v, u, w);
        }
    }
    if t > 0 {
        let eps_step = (1.0 + eps).powf(1.0 / t as f64) - 1.0;
        for _ in 0..t {
            full = ampmm(&full, &full, eps_step).expect("square matrices multiply");
        }
    }
    let rows: Vec<Vec<f64>> = srcs
        .iter()
        .map(|&s| (0..n).map(|v| full.get(s, v)).collect())
        .collect();
    rows_matrix(rows, srcs)
}

/// Merges a labeled min-plus matrix into a distance matrix by pointwise,
/// symmetric minimum; validity (entries >= δ) is preserved whenever the
/// matrix entries are themselves valid upper bounds.
pub fn merge_into(d: &mut DistanceMatrix, m: &MinPlusMatrix) {
    for (i, &u) in m.row_labels().iter().enumerate() {
        for (j, &v) in m.col_labels().iter().enumerate() {
            d.set_min(u, v, m.get(i, j));
        }
    }
}

/// Labeled rectangular slice of a distance matrix.
pub fn submatrix(d: &DistanceMatrix, rows: &[usize], cols: &[usize]) -> MinPlusMatrix {
    let mut m = MinPlusMatrix::filled(rows.len(), cols.len(), INF);
    for (i, &u) in rows.iter().enumerate() {
        for (j, &v) in cols.iter().enumerate() {
            m.set(i, j, d.get(u, v));
        }
    }
    m.relabel(rows.to_vec(), cols.to_vec())
        .expect("label lengths match")
}
