//! Undirected weighted graphs: normalization, file I/O, and random generation.
//!
//! Graphs are simple (no self loops, no parallel edges) with nonnegative
//! finite weights. Each edge is stored once with `u < v`; the adjacency list
//! mirrors every edge in both directions and is sorted by neighbor id.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Classification of a graph's weight function.
///
/// Algorithms that rely on scaling kernels require every weight to be an
/// exact integer in `{0, 1, ..., W}`; the rest accept arbitrary nonnegative
/// reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightClass {
    /// Arbitrary nonnegative real weights.
    Real,
    /// Every weight is an integer in `{0, ..., W}`; carries `W`.
    BoundedInteger(u64),
}

/// An undirected weighted graph with normalized edge storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph from `n` and a raw edge list, applying normalization:
    /// self loops are dropped and parallel edges keep the minimum weight.
    ///
    /// Fails on out-of-range vertex ids and on negative or non-finite
    /// weights.
    pub fn new(n: usize, raw_edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(raw_edges.len());
        for &(u, v, w) in raw_edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) references a vertex id >= n = {n}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
            if u == v {
                continue; // self loop
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            edges.push((a, b, w));
        }
        edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        edges.dedup_by(|next, kept| {
            // After the sort the kept entry carries the minimum weight.
            kept.0 == next.0 && kept.1 == next.1
        });

        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in &edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(x, _)| x);
        }
        Ok(Graph { n, edges, adj })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of (normalized) edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// The normalized edge list; every entry satisfies `u < v`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    /// Weight of the edge `(u, v)` if present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    /// Classifies the weight function: `BoundedInteger(W)` when every weight
    /// is an exact integer (with `W` the maximum), `Real` otherwise.
    pub fn weight_class(&self) -> WeightClass {
        let mut max = 0u64;
        for &(_, _, w) in &self.edges {
            if w.fract() != 0.0 || w > u64::MAX as f64 {
                return WeightClass::Real;
            }
            max = max.max(w as u64);
        }
        WeightClass::BoundedInteger(max)
    }

    /// Loads a graph from the edge-list text format.
    ///
    /// Line 1 is `"n m"`, followed by `m` lines `"u v w"` with 0-based vertex
    /// ids. Lines starting with `#` are comments. Normalization applies.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses the edge-list text format; see [`Graph::load`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut raw = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            if header.is_none() {
                let n = parse_field::<usize>(it.next(), lineno, "vertex count")?;
                let m = parse_field::<usize>(it.next(), lineno, "edge count")?;
                if it.next().is_some() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "trailing tokens after header".into(),
                    });
                }
                header = Some((n, m));
                continue;
            }
            let u = parse_field::<usize>(it.next(), lineno, "endpoint u")?;
            let v = parse_field::<usize>(it.next(), lineno, "endpoint v")?;
            let w = parse_field::<f64>(it.next(), lineno, "weight")?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "trailing tokens after edge".into(),
                });
            }
            if w < 0.0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("negative weight {w}"),
                });
            }
            let (n, _) = header.unwrap();
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("vertex id out of range (n = {n})"),
                });
            }
            raw.push((u, v, w));
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing header line".into(),
        })?;
        if raw.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges but file lists {}", raw.len()),
            });
        }
        Self::new(n, &raw)
    }

    /// Serializes to the edge-list text format (normalized, `u < v`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        out
    }

    /// Saves in the edge-list text format; round-trips with [`Graph::load`].
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Erdős–Rényi G(n, p) with integer weights uniform in `[wmin, wmax]`,
    /// deterministic for a fixed seed.
    pub fn gen_random(n: usize, p: f64, wmin: u64, wmax: u64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "edge probability {p} outside [0, 1]"
            )));
        }
        if wmin > wmax {
            return Err(Error::InvalidParameter(format!(
                "wmin {wmin} exceeds wmax {wmax}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut raw = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    let w = rng.gen_range(wmin..=wmax) as f64;
                    raw.push((u, v, w));
                }
            }
        }
        Self::new(n, &raw)
    }

    /// `rows x cols` grid lattice with integer weights uniform in
    /// `[wmin, wmax]`, deterministic for a fixed seed.
    pub fn gen_grid(rows: usize, cols: usize, wmin: u64, wmax: u64, seed: u64) -> Result<Self> {
        if wmin > wmax {
            return Err(Error::InvalidParameter(format!(
                "wmin {wmin} exceeds wmax {wmax}"
            )));
        }
        let n = rows * cols;
        let id = |r: usize, c: usize| r * cols + c;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut raw = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    raw.push((id(r, c), id(r, c + 1), rng.gen_range(wmin..=wmax) as f64));
                }
                if r + 1 < rows {
                    raw.push((id(r, c), id(r + 1, c), rng.gen_range(wmin..=wmax) as f64));
                }
            }
        }
        Self::new(n, &raw)
    }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from {tok:?}"),
    })
}
