//! Divergence of geodesics: marked points, escaping-path searches and the
//! exponential lower-bound formula checked in exact integer arithmetic.

use crate::digraph::Digraph;
use crate::extnat::{ExtNat, Fin, Inf};
use crate::walk::{is_geodesic, DirectedWalk};
use num_bigint::BigUint;
use serde::Serialize;
use std::collections::VecDeque;
use std::error::Error;
use std::fmt;

#[derive(Debug)]
pub enum DivergenceError {
    NotGeodesic(&'static str),
    NotAnchored(&'static str),
    MarkTooFar { r: u64, len: u64 },
}

impl fmt::Display for DivergenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceError::NotGeodesic(which) => write!(f, "{which} is not a geodesic"),
            DivergenceError::NotAnchored(which) => {
                write!(f, "{which} neither starts nor ends at the base point")
            }
            DivergenceError::MarkTooFar { r, len } => {
                write!(f, "marked distance {r} exceeds geodesic length {len}")
            }
        }
    }
}

impl Error for DivergenceError {}

/// The point u on a geodesic P anchored at x with d(x, u) = R (when P starts
/// at x), or d(u, x) = R (when P ends at x).
pub fn point_at(d: &Digraph, p: &DirectedWalk, x: usize, r: u64) -> Result<usize, DivergenceError> {
    if !is_geodesic(d, p) {
        return Err(DivergenceError::NotGeodesic("walk"));
    }
    if r > p.len() {
        return Err(DivergenceError::MarkTooFar { r, len: p.len() });
    }
    if p.first() == x {
        Ok(p.vertex(r as usize))
    } else if p.last() == x {
        Ok(p.vertex((p.len() - r) as usize))
    } else {
        Err(DivergenceError::NotAnchored("walk"))
    }
}

/// Two geodesics sharing the base point x, a marked depth R and a ball slack
/// r: the data of one divergence probe.
#[derive(Clone, Debug, Serialize)]
pub struct DivergenceConfig {
    pub base: usize,
    pub p1: DirectedWalk,
    pub p2: DirectedWalk,
    pub mark: u64,
    pub slack: u64,
}

impl DivergenceConfig {
    pub fn new(
        d: &Digraph,
        base: usize,
        p1: DirectedWalk,
        p2: DirectedWalk,
        mark: u64,
        slack: u64,
    ) -> Result<Self, DivergenceError> {
        for (which, p) in [("P1", &p1), ("P2", &p2)] {
            if !is_geodesic(d, p) {
                return Err(DivergenceError::NotGeodesic(which));
            }
            if p.first() != base && p.last() != base {
                return Err(DivergenceError::NotAnchored(which));
            }
        }
        if mark > p1.len() {
            return Err(DivergenceError::MarkTooFar {
                r: mark,
                len: p1.len(),
            });
        }
        Ok(DivergenceConfig {
            base,
            p1,
            p2,
            mark,
            slack,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct DivergenceWitness {
    /// Directed distance from the marked point of P1 to P2.
    pub gap: ExtNat,
    /// The symmetric-min variant of the gap, for exploration.
    pub gap_symmetric: ExtNat,
    /// Shortest directed P1-P2 walk avoiding both forbidden balls, if any.
    pub path: Option<DirectedWalk>,
}

/// Shortest directed P1-P2 path outside B^+_{R+r}(x) ∪ B^-_{R+r}(x),
/// found by multi-source breadth-first search on the ball-deleted digraph.
pub fn divergence_witness(d: &Digraph, cfg: &DivergenceConfig) -> DivergenceWitness {
    let dm = d.distances();
    let marked = point_at(d, &cfg.p1, cfg.base, cfg.mark).expect("config was validated");
    let gap = cfg
        .p2
        .vertices()
        .map(|q| dm.get(marked, q))
        .min()
        .unwrap_or(Inf);
    let gap_symmetric = cfg
        .p2
        .vertices()
        .map(|q| dm.get(marked, q).min(dm.get(q, marked)))
        .min()
        .unwrap_or(Inf);
    let radius = cfg.mark + cfg.slack;
    let allowed = |v: usize| dm.get(cfg.base, v) > Fin(radius) && dm.get(v, cfg.base) > Fin(radius);
    let path = escape_path(d, &cfg.p1, &cfg.p2, &allowed);
    DivergenceWitness {
        gap,
        gap_symmetric,
        path,
    }
}

fn escape_path(
    d: &Digraph,
    p1: &DirectedWalk,
    p2: &DirectedWalk,
    allowed: &dyn Fn(usize) -> bool,
) -> Option<DirectedWalk> {
    let n = d.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut sources: Vec<usize> = p1.vertices().filter(|&v| allowed(v)).collect();
    sources.sort_unstable();
    sources.dedup();
    for v in sources {
        seen[v] = true;
        parent[v] = v;
        queue.push_back(v);
    }
    let mut targets = vec![false; n];
    for v in p2.vertices() {
        if allowed(v) {
            targets[v] = true;
        }
    }
    let mut hit = None;
    'bfs: while let Some(v) = queue.pop_front() {
        if targets[v] {
            hit = Some(v);
            break 'bfs;
        }
        for &w in d.out_neighbors(v) {
            let w = w as usize;
            if !seen[w] && allowed(w) {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut v = hit?;
    let mut rev = vec![v];
    while parent[v] != v {
        v = parent[v];
        rev.push(v);
    }
    rev.reverse();
    Some(DirectedWalk::from_vertices(d, rev).expect("BFS paths are valid walks"))
}

#[derive(Debug, Serialize)]
pub struct DivergenceEnvelope {
    pub threshold: ExtNat,
    /// Per slack r: the minimal escaping-path length over configs whose gap
    /// exceeds the threshold; infinite when none fires or none escapes.
    pub envelope: Vec<(u64, ExtNat)>,
}

/// Empirical divergence: for each r in the grid, the least observed escaping
/// path length among the configs that trigger the gap premise.
pub fn empirical_divergence(
    d: &Digraph,
    configs: &[DivergenceConfig],
    r_grid: &[u64],
    threshold: ExtNat,
) -> DivergenceEnvelope {
    let envelope = r_grid
        .iter()
        .map(|&r| {
            let mut best = Inf;
            for cfg in configs {
                let mut probe = cfg.clone();
                probe.slack = r;
                let w = divergence_witness(d, &probe);
                if w.gap > threshold {
                    if let Some(p) = w.path {
                        best = best.min(Fin(p.len()));
                    }
                }
            }
            (r, best)
        })
        .collect();
    DivergenceEnvelope {
        threshold,
        envelope,
    }
}

/// Exact test of len > e(r) for e(r) = 2^{(r - 2δ - 1)/k} - 1, i.e.
/// (len + 1)^k > 2^{r - 2δ - 1}, in big-integer arithmetic. For r ≤ 2δ + 1
/// the right side is at most 1, so any length wins except length 0 at the
/// boundary with k ≥ 1.
pub fn exceeds_divergence_bound(len: u64, r: u64, delta: u64, k: u64) -> bool {
    if r < 2 * delta + 1 {
        return true;
    }
    let exponent = r - 2 * delta - 1;
    let lhs = BigUint::from(len + 1).pow(k as u32);
    let rhs = BigUint::from(1u32) << exponent;
    lhs > rhs
}

/// Checks one family of configs against the exponential divergence bound:
/// whenever a config's gap exceeds e(0), its escaping path (if any) must be
/// longer than e(r). Returns the first violation.
#[derive(Debug, Serialize)]
pub struct DivergenceBoundReport {
    pub pass: bool,
    pub configs_fired: usize,
    pub paths_checked: usize,
    pub violation: Option<(u64, u64)>,
}

pub fn check_divergence_bound(
    d: &Digraph,
    configs: &[DivergenceConfig],
    r_grid: &[u64],
    e0: ExtNat,
    delta: u64,
    k: u64,
) -> DivergenceBoundReport {
    let mut fired = 0;
    let mut checked = 0;
    for cfg in configs {
        for &r in r_grid {
            let mut probe = cfg.clone();
            probe.slack = r;
            let w = divergence_witness(d, &probe);
            if w.gap > e0 {
                fired += 1;
                if let Some(p) = w.path {
                    checked += 1;
                    if !exceeds_divergence_bound(p.len(), r, delta, k) {
                        return DivergenceBoundReport {
                            pass: false,
                            configs_fired: fired,
                            paths_checked: checked,
                            violation: Some((p.len(), r)),
                        };
                    }
                }
            }
        }
    }
    DivergenceBoundReport {
        pass: true,
        configs_fired: fired,
        paths_checked: checked,
        violation: None,
    }
}

/// Structural validation used by tests: an escape path must start on P1,
/// end on P2 and avoid both forbidden balls.
pub fn witness_path_is_valid(d: &Digraph, cfg: &DivergenceConfig, path: &DirectedWalk) -> bool {
    let dm = d.distances();
    let radius = cfg.mark + cfg.slack;
    let on_p1 = cfg.p1.vertices().any(|v| v == path.first());
    let on_p2 = cfg.p2.vertices().any(|v| v == path.last());
    let avoids = path
        .vertices()
        .all(|v| dm.get(cfg.base, v) > Fin(radius) && dm.get(v, cfg.base) > Fin(radius));
    on_p1 && on_p2 && avoids
}
