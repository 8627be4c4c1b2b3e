//! Finite directed multigraphs and their semimetric distance structure.
//!
//! A `Digraph` is an oriented multigraph: loops and parallel edges are kept.
//! Distances are lengths of shortest directed walks, with unreachable pairs
//! at infinity. Rows of the distance matrix are computed on first use and
//! memoized; both `Digraph` and `DistanceMatrix` are immutable afterwards, so
//! any number of workers may read them concurrently.

use crate::extnat::{ExtNat, Fin, Inf};
use std::collections::{BTreeMap, VecDeque};
use std::error::Error;
use std::fmt;
use std::sync::OnceLock;

/// Side of a ball: out-balls collect targets of short walks from the center,
/// in-balls collect sources of short walks into it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum Direction {
    Out,
    In,
}

/// How a two-point distance is read off the matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DistanceMode {
    Directed,
    /// `min(d(u, v), d(v, u))`, written d↔ throughout.
    SymmetricMin,
}

const UNREACHED: u32 = u32::MAX;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl Error for ParseError {}

/// Finite directed multigraph with optional vertex labels.
pub struct Digraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    /// Sorted, deduplicated out-neighbours; parallel edges collapse here.
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    multiplicity: BTreeMap<(u32, u32), u32>,
    labels: Vec<Option<String>>,
    dist: OnceLock<DistanceMatrix>,
}

impl Clone for Digraph {
    fn clone(&self) -> Self {
        // The distance cache is rebuilt on demand in the clone.
        Digraph {
            n: self.n,
            edges: self.edges.clone(),
            out: self.out.clone(),
            inn: self.inn.clone(),
            multiplicity: self.multiplicity.clone(),
            labels: self.labels.clone(),
            dist: OnceLock::new(),
        }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, m={})", self.n, self.edges.len())
    }
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| {
                assert!(u < n && v < n, "edge ({u}, {v}) out of range for n={n}");
                (u as u32, v as u32)
            })
            .collect();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut multiplicity = BTreeMap::new();
        for &(u, v) in &edges {
            *multiplicity.entry((u, v)).or_insert(0u32) += 1;
            out[u as usize].push(v);
            inn[v as usize].push(u);
        }
        for adj in out.iter_mut().chain(inn.iter_mut()) {
            adj.sort_unstable();
            adj.dedup();
        }
        Digraph {
            n,
            edges,
            out,
            inn,
            multiplicity,
            labels: vec![None; n],
            dist: OnceLock::new(),
        }
    }

    pub fn with_labels(n: usize, edges: Vec<(usize, usize)>, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), n);
        let mut d = Digraph::new(n, edges);
        d.labels = labels.into_iter().map(Some).collect();
        d
    }

    /// Parses the edge-list format: a `n m` header line, then `m` lines `u v`.
    /// `#` starts a comment; a full-line comment `# label <i> <text>` assigns
    /// a vertex label.
    pub fn parse(text: &str) -> Result<Digraph, ParseError> {
        let mut n: Option<usize> = None;
        let mut m: Option<usize> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut labels: Vec<(usize, String, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(spec) = rest.strip_prefix("label ") {
                    let mut it = spec.splitn(2, char::is_whitespace);
                    let v = it.next().unwrap_or("");
                    let v: usize = v.parse().map_err(|_| ParseError {
                        line: lineno,
                        message: format!("bad vertex index in label comment: {v:?}"),
                    })?;
                    let text = it.next().unwrap_or("").trim().to_string();
                    labels.push((v, text, lineno));
                }
                continue;
            }
            let line = match line.split_once('#') {
                Some((head, _)) => head.trim(),
                None => line,
            };
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if n.is_none() {
                if fields.len() != 2 {
                    return Err(ParseError {
                        line: lineno,
                        message: format!("expected header \"n m\", got {line:?}"),
                    });
                }
                let nv: i64 = fields[0].parse().map_err(|_| ParseError {
                    line: lineno,
                    message: format!("bad vertex count {:?}", fields[0]),
                })?;
                let mv: i64 = fields[1].parse().map_err(|_| ParseError {
                    line: lineno,
                    message: format!("bad edge count {:?}", fields[1]),
                })?;
                if nv < 0 || mv < 0 {
                    return Err(ParseError {
                        line: lineno,
                        message: "negative count in header".to_string(),
                    });
                }
                n = Some(nv as usize);
                m = Some(mv as usize);
                continue;
            }
            if fields.len() != 2 {
                return Err(ParseError {
                    line: lineno,
                    message: format!("expected edge \"u v\", got {line:?}"),
                });
            }
            let parse_vertex = |s: &str| -> Result<usize, ParseError> {
                s.parse().map_err(|_| ParseError {
                    line: lineno,
                    message: format!("bad vertex index {s:?}"),
                })
            };
            let u = parse_vertex(fields[0])?;
            let v = parse_vertex(fields[1])?;
            let bound = n.unwrap();
            if u >= bound || v >= bound {
                return Err(ParseError {
                    line: lineno,
                    message: format!("edge ({u}, {v}) out of range for n={bound}"),
                });
            }
            edges.push((u, v));
        }

        let n = n.ok_or(ParseError {
            line: 1,
            message: "missing header line \"n m\"".to_string(),
        })?;
        let m = m.unwrap();
        if edges.len() != m {
            return Err(ParseError {
                line: text.lines().count(),
                message: format!("header declared {m} edges, found {}", edges.len()),
            });
        }
        let mut d = Digraph::new(n, edges);
        for (v, text, lineno) in labels {
            if v >= n {
                return Err(ParseError {
                    line: lineno,
                    message: format!("label for out-of-range vertex {v}"),
                });
            }
            d.labels[v] = Some(text);
        }
        Ok(d)
    }

    /// Emits the parseable edge-list form, labels as trailing comments.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        for (v, label) in self.labels.iter().enumerate() {
            if let Some(l) = label {
                s.push_str(&format!("# label {v} {l}\n"));
            }
        }
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted, deduplicated out-neighbours.
    pub fn out_neighbors(&self, u: usize) -> &[u32] {
        &self.out[u]
    }

    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.inn[v]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    /// Number of parallel edges from `u` to `v`.
    pub fn edge_multiplicity(&self, u: usize, v: usize) -> u32 {
        self.multiplicity
            .get(&(u as u32, v as u32))
            .copied()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_multiplicity(u, v) > 0
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels[v] = Some(label.into());
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels[v].as_deref()
    }

    /// Label when present, index otherwise. Used in reports and witnesses.
    pub fn vertex_name(&self, v: usize) -> String {
        match &self.labels[v] {
            Some(l) => l.clone(),
            None => v.to_string(),
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    /// All-pairs distances, computed one breadth-first traversal per source
    /// row on first access and cached for the session.
    pub fn distances(&self) -> &DistanceMatrix {
        self.dist
            .get_or_init(|| DistanceMatrix::new(self.out.clone()))
    }

    pub fn dist(&self, u: usize, v: usize) -> ExtNat {
        self.distances().get(u, v)
    }

    pub fn distance(&self, u: usize, v: usize, mode: DistanceMode) -> ExtNat {
        match mode {
            DistanceMode::Directed => self.dist(u, v),
            DistanceMode::SymmetricMin => self.dist(u, v).min(self.dist(v, u)),
        }
    }

    /// d↔(u, v) = min of the two directed distances.
    pub fn dist_sym(&self, u: usize, v: usize) -> ExtNat {
        self.distance(u, v, DistanceMode::SymmetricMin)
    }

    /// Ball of finite radius `r` around `x`, sorted ascending.
    pub fn ball(&self, x: usize, r: u64, direction: Direction, open: bool) -> Vec<usize> {
        let dm = self.distances();
        (0..self.n)
            .filter(|&y| {
                let d = match direction {
                    Direction::Out => dm.get(x, y),
                    Direction::In => dm.get(y, x),
                };
                match d {
                    Fin(v) if open => v < r,
                    Fin(v) => v <= r,
                    Inf => false,
                }
            })
            .collect()
    }

    /// Strongly connected components: classes of mutual finite distance,
    /// ordered by smallest member.
    pub fn scc(&self) -> Vec<Vec<usize>> {
        let dm = self.distances();
        let mut seen = vec![false; self.n];
        let mut classes = Vec::new();
        for x in 0..self.n {
            if seen[x] {
                continue;
            }
            let mut class = vec![x];
            seen[x] = true;
            for y in x + 1..self.n {
                if !seen[y] && dm.get(x, y).is_finite() && dm.get(y, x).is_finite() {
                    seen[y] = true;
                    class.push(y);
                }
            }
            classes.push(class);
        }
        classes
    }

    /// Subdigraph induced by `verts` (kept in the given order; must be
    /// duplicate-free). Labels carry over.
    pub fn induced(&self, verts: &[usize]) -> Digraph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u as usize] != usize::MAX && index[v as usize] != usize::MAX)
            .map(|&(u, v)| (index[u as usize], index[v as usize]))
            .collect();
        let mut d = Digraph::new(verts.len(), edges);
        for (i, &v) in verts.iter().enumerate() {
            d.labels[i] = self.labels[v].clone();
        }
        d
    }

    /// Replaces every edge by a directed path of `k` edges through `k - 1`
    /// fresh vertices. Distances between original vertices scale by `k`.
    pub fn subdivide(&self, k: u64) -> Digraph {
        assert!(k >= 1, "subdivision factor must be at least 1");
        let k = k as usize;
        let mut n = self.n;
        let mut edges = Vec::with_capacity(self.edges.len() * k);
        for &(u, v) in &self.edges {
            let mut prev = u as usize;
            for _ in 0..k - 1 {
                edges.push((prev, n));
                prev = n;
                n += 1;
            }
            edges.push((prev, v as usize));
        }
        let mut d = Digraph::new(n, edges);
        for v in 0..self.n {
            d.labels[v] = self.labels[v].clone();
        }
        d
    }
}

/// Immutable all-pairs directed distance matrix over `[0, ∞]`. Rows are
/// computed lazily and memoized; concurrent readers are fine.
pub struct DistanceMatrix {
    n: usize,
    adj: Vec<Vec<u32>>,
    rows: Vec<OnceLock<Box<[u32]>>>,
}

impl DistanceMatrix {
    fn new(adj: Vec<Vec<u32>>) -> Self {
        let n = adj.len();
        let mut rows = Vec::with_capacity(n);
        rows.resize_with(n, OnceLock::new);
        DistanceMatrix { n, adj, rows }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn row(&self, u: usize) -> &[u32] {
        self.rows[u].get_or_init(|| {
            let mut dist = vec![UNREACHED; self.n];
            let mut queue = VecDeque::new();
            dist[u] = 0;
            queue.push_back(u as u32);
            while let Some(x) = queue.pop_front() {
                let dx = dist[x as usize];
                for &y in &self.adj[x as usize] {
                    if dist[y as usize] == UNREACHED {
                        dist[y as usize] = dx + 1;
                        queue.push_back(y);
                    }
                }
            }
            dist.into_boxed_slice()
        })
    }

    pub fn get(&self, u: usize, v: usize) -> ExtNat {
        match self.row(u)[v] {
            UNREACHED => Inf,
            d => Fin(d as u64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Digraph {
        Digraph::new(3, vec![(0, 1), (1, 2)])
    }

    #[test]
    fn parse_path() {
        let d = Digraph::parse("3 2\n0 1\n1 2").unwrap();
        assert_eq!(d.vertex_count(), 3);
        assert_eq!(d.edge_count(), 2);
        assert_eq!(d.dist(0, 2), Fin(2));
        assert_eq!(d.dist(2, 0), Inf);
    }

    #[test]
    fn parse_loop_and_parallel() {
        let d = Digraph::parse("1 1\n0 0").unwrap();
        assert_eq!(d.vertex_count(), 1);
        assert_eq!(d.edge_multiplicity(0, 0), 1);

        let d = Digraph::parse("2 2\n0 1\n0 1").unwrap();
        assert_eq!(d.edge_count(), 2);
        assert_eq!(d.edge_multiplicity(0, 1), 2);
    }

    #[test]
    fn parse_errors_name_lines() {
        let err = Digraph::parse("3 2\n0 1\n1 5").unwrap_err();
        assert_eq!(err.line, 3);
        let err = Digraph::parse("-1 0").unwrap_err();
        assert_eq!(err.line, 1);
        let err = Digraph::parse("3 2\n0 1\nx y").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn parse_labels_and_roundtrip() {
        let d = Digraph::parse("2 1\n0 1\n# label 0 start\n# label 1 end\n").unwrap();
        assert_eq!(d.label(0), Some("start"));
        assert_eq!(d.vertex_by_label("end"), Some(1));
        let d2 = Digraph::parse(&d.to_edge_list()).unwrap();
        assert_eq!(d2.label(1), Some("end"));
    }

    #[test]
    fn cycle_distances() {
        let c = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        for &(u, v) in c.edges() {
            let (u, v) = (u as usize, v as usize);
            let roundtrip = c.dist(u, v) + c.dist(v, u);
            assert_eq!(roundtrip, Fin(3));
        }
    }

    #[test]
    fn symmetric_min_distance() {
        let d = path3();
        assert_eq!(d.distance(0, 1, DistanceMode::SymmetricMin), Fin(1));
        assert_eq!(d.distance(1, 0, DistanceMode::SymmetricMin), Fin(1));
        assert_eq!(d.distance(1, 1, DistanceMode::SymmetricMin), Fin(0));
        assert_eq!(d.distance(0, 2, DistanceMode::SymmetricMin), Fin(2));
    }

    #[test]
    fn balls() {
        let d = path3();
        assert_eq!(d.ball(0, 1, Direction::Out, false), vec![0, 1]);
        assert_eq!(d.ball(0, 1, Direction::Out, true), vec![0]);
        assert_eq!(d.ball(0, 0, Direction::Out, false), vec![0]);
        assert_eq!(d.ball(2, 2, Direction::In, false), vec![0, 1, 2]);
    }

    #[test]
    fn scc_path_and_cycle() {
        let p = path3();
        assert_eq!(p.scc(), vec![vec![0], vec![1], vec![2]]);
        let c = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(c.scc(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn subdivide_scales_distances() {
        let c = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        let s = c.subdivide(2);
        assert_eq!(s.vertex_count(), 6);
        for u in 0..3 {
            for v in 0..3 {
                let expected = match c.dist(u, v) {
                    Fin(d) => Fin(2 * d),
                    Inf => Inf,
                };
                assert_eq!(s.dist(u, v), expected);
            }
        }
        let single = Digraph::new(2, vec![(0, 1)]);
        let s = single.subdivide(2);
        assert_eq!(s.vertex_count(), 3);
        assert_eq!(s.dist(0, 1), Fin(2));
    }
}
