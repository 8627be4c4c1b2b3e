//! Geodesic enumeration and counting through the shortest-path DAG.
//!
//! For vertices x, y at finite distance, the edges (u, v) with
//! d(x,u) + 1 + d(v,y) = d(x,y) form a DAG whose source-sink paths are
//! exactly the x-y geodesics. Enumeration walks it depth-first in
//! lexicographic order; the count is exact dynamic programming, so it stays
//! correct even when the sample is truncated.

use crate::digraph::Digraph;
use crate::extnat::{ExtNat, Fin, Inf};
use crate::walk::DirectedWalk;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use std::error::Error;
use std::fmt;

#[derive(Debug, PartialEq, Eq)]
pub struct Unreachable {
    pub from: usize,
    pub to: usize,
}

impl fmt::Display for Unreachable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unreachable: no directed path from {} to {}",
            self.from, self.to
        )
    }
}

impl Error for Unreachable {}

/// Shortest-path DAG between a fixed source and target. Vertices are the
/// ones lying on at least one geodesic.
pub struct GeodesicDag {
    pub source: usize,
    pub target: usize,
    pub dist: u64,
    /// Vertices on some geodesic, ascending.
    verts: Vec<u32>,
    /// DAG arcs (u, v, multiplicity), lexicographically sorted.
    arcs: Vec<(u32, u32, u32)>,
    /// arcs grouped per source vertex: arc index range in `arcs`.
    out_ranges: Vec<(usize, usize)>,
    /// vertex id -> position in `verts`, usize::MAX when absent.
    position: Vec<usize>,
}

impl GeodesicDag {
    pub fn build(d: &Digraph, x: usize, y: usize) -> Result<GeodesicDag, Unreachable> {
        let dm = d.distances();
        let total = match dm.get(x, y) {
            Fin(t) => t,
            Inf => return Err(Unreachable { from: x, to: y }),
        };
        let n = d.vertex_count();
        let mut verts: Vec<u32> = (0..n)
            .filter(|&v| dm.get(x, v) + dm.get(v, y) == Fin(total))
            .map(|v| v as u32)
            .collect();
        verts.sort_unstable();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in verts.iter().enumerate() {
            position[v as usize] = i;
        }
        let mut arcs = Vec::new();
        for &u in &verts {
            let du = dm.get(x, u as usize).expect_finite("on-path distance");
            for &v in d.out_neighbors(u as usize) {
                if position[v as usize] == usize::MAX {
                    continue;
                }
                let dv = dm.get(x, v as usize).expect_finite("on-path distance");
                if dv == du + 1 && dm.get(v as usize, y) + Fin(dv) == Fin(total) {
                    arcs.push((u, v, d.edge_multiplicity(u as usize, v as usize)));
                }
            }
        }
        arcs.sort_unstable();
        let mut out_ranges = vec![(0, 0); verts.len()];
        let mut i = 0;
        while i < arcs.len() {
            let u = arcs[i].0;
            let start = i;
            while i < arcs.len() && arcs[i].0 == u {
                i += 1;
            }
            out_ranges[position[u as usize]] = (start, i);
        }
        Ok(GeodesicDag {
            source: x,
            target: y,
            dist: total,
            verts,
            arcs,
            out_ranges,
            position,
        })
    }

    /// Vertices lying on at least one x-y geodesic, ascending.
    pub fn on_path_vertices(&self) -> &[u32] {
        &self.verts
    }

    pub fn contains(&self, v: usize) -> bool {
        self.position[v] != usize::MAX
    }

    fn out_arcs(&self, v: usize) -> &[(u32, u32, u32)] {
        let (a, b) = self.out_ranges[self.position[v]];
        &self.arcs[a..b]
    }

    /// Exact number of geodesics; parallel edges multiply the count.
    pub fn count(&self) -> BigUint {
        // Process by decreasing distance from the source.
        let dm_order = self.topo_order();
        let mut memo = vec![BigUint::zero(); self.verts.len()];
        memo[self.position[self.target]] = BigUint::one();
        for &v in dm_order.iter().rev() {
            if v as usize == self.target {
                continue;
            }
            let mut total = BigUint::zero();
            for &(_, w, mult) in self.out_arcs(v as usize) {
                total += memo[self.position[w as usize]].clone() * BigUint::from(mult);
            }
            memo[self.position[v as usize]] = total;
        }
        memo[self.position[self.source]].clone()
    }

    /// On-path vertices ordered by distance from the source (a topological
    /// order of the DAG), ties by vertex id.
    pub fn topo_order(&self) -> Vec<u32> {
        let mut order = self.verts.clone();
        let pos_dist: Vec<u64> = {
            // distances are implicit in arc structure; recompute locally
            let mut dist = vec![u64::MAX; self.verts.len()];
            dist[self.position[self.source]] = 0;
            // BFS over DAG arcs in waves
            let mut frontier = vec![self.source as u32];
            let mut level = 0u64;
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &u in &frontier {
                    for &(_, v, _) in self.out_arcs(u as usize) {
                        let p = self.position[v as usize];
                        if dist[p] == u64::MAX {
                            dist[p] = level + 1;
                            next.push(v);
                        }
                    }
                }
                frontier = next;
                level += 1;
            }
            dist
        };
        order.sort_by_key(|&v| (pos_dist[self.position[v as usize]], v));
        order
    }

    /// Depth-first lexicographic enumeration (vertex, then parallel-edge
    /// index), stopping at `cap` walks.
    pub fn enumerate(&self, d: &Digraph, cap: usize) -> (Vec<DirectedWalk>, bool) {
        let mut out = Vec::new();
        let mut truncated = false;
        let mut vertices = vec![self.source];
        let mut choices: Vec<u32> = Vec::new();
        self.enumerate_rec(
            d,
            cap,
            &mut vertices,
            &mut choices,
            &mut out,
            &mut truncated,
        );
        (out, truncated)
    }

    fn enumerate_rec(
        &self,
        d: &Digraph,
        cap: usize,
        vertices: &mut Vec<usize>,
        choices: &mut Vec<u32>,
        out: &mut Vec<DirectedWalk>,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        let here = *vertices.last().unwrap();
        if vertices.len() as u64 == self.dist + 1 {
            debug_assert_eq!(here, self.target);
            if out.len() >= cap {
                *truncated = true;
                return;
            }
            out.push(
                DirectedWalk::new(d, vertices.clone(), choices.clone())
                    .expect("DAG paths are valid walks"),
            );
            return;
        }
        for &(_, v, mult) in self.out_arcs(here) {
            for choice in 0..mult {
                vertices.push(v as usize);
                choices.push(choice);
                self.enumerate_rec(d, cap, vertices, choices, out, truncated);
                vertices.pop();
                choices.pop();
                if *truncated {
                    return;
                }
            }
        }
    }

    /// Max over source-target DAG paths of the minimum vertex weight on the
    /// path. The weight may be infinite. This is how downstream maximization
    /// over all geodesic choices of a side is made exhaustive without
    /// enumeration.
    pub fn max_min_weight(&self, weight: impl Fn(usize) -> ExtNat) -> ExtNat {
        let order = self.topo_order();
        let mut best = vec![Inf; self.verts.len()];
        for &v in order.iter().rev() {
            let w = weight(v as usize);
            let continuation = if v as usize == self.target {
                // min over an empty tail: no constraint beyond the vertex
                Inf
            } else {
                let mut m = ExtNat::Fin(0);
                let mut any = false;
                for &(_, s, _) in self.out_arcs(v as usize) {
                    let c = best[self.position[s as usize]];
                    if !any || c > m {
                        m = c;
                    }
                    any = true;
                }
                debug_assert!(any, "non-target DAG vertex without successors");
                m
            };
            best[self.position[v as usize]] = w.min(continuation);
        }
        best[self.position[self.source]]
    }

    /// A geodesic attaining `max_min_weight`, lexicographically least among
    /// the optima.
    pub fn max_min_witness(&self, d: &Digraph, weight: impl Fn(usize) -> ExtNat) -> DirectedWalk {
        let order = self.topo_order();
        let mut best = vec![Inf; self.verts.len()];
        for &v in order.iter().rev() {
            let w = weight(v as usize);
            let continuation = if v as usize == self.target {
                Inf
            } else {
                self.out_arcs(v as usize)
                    .iter()
                    .map(|&(_, s, _)| best[self.position[s as usize]])
                    .max()
                    .unwrap()
            };
            best[self.position[v as usize]] = w.min(continuation);
        }
        let optimum = best[self.position[self.source]];
        let mut vertices = vec![self.source];
        let mut here = self.source;
        while here != self.target {
            let next = self
                .out_arcs(here)
                .iter()
                .map(|&(_, s, _)| s)
                .find(|&s| best[self.position[s as usize]] >= optimum)
                .expect("some successor attains the DP optimum");
            vertices.push(next as usize);
            here = next as usize;
        }
        DirectedWalk::from_vertices(d, vertices).expect("DAG paths are valid walks")
    }

    /// Lexicographically least geodesic passing through `via`.
    pub fn least_through(&self, d: &Digraph, via: usize) -> DirectedWalk {
        assert!(self.contains(via), "vertex not on any geodesic");
        let dm = d.distances();
        let mut vertices = Vec::new();
        // source -> via, choosing the least on-path predecessor chain going
        // forward from the source.
        let mut here = self.source;
        vertices.push(here);
        while here != via {
            let next = self
                .out_arcs(here)
                .iter()
                .map(|&(_, s, _)| s as usize)
                .find(|&s| {
                    dm.get(s, via) + dm.get(via, self.target) + dm.get(self.source, s)
                        == Fin(self.dist)
                })
                .expect("via is reachable through the DAG");
            vertices.push(next);
            here = next;
        }
        while here != self.target {
            let next = self
                .out_arcs(here)
                .iter()
                .map(|&(_, s, _)| s as usize)
                .next()
                .expect("target is reachable through the DAG");
            vertices.push(next);
            here = next;
        }
        DirectedWalk::from_vertices(d, vertices).expect("DAG paths are valid walks")
    }
}

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

/// Enumeration result: the exact count plus a sample capped at `cap`.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSummary {
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub count: BigUint,
    pub sample: Vec<DirectedWalk>,
    pub truncated: bool,
}

pub fn enumerate_geodesics(
    d: &Digraph,
    x: usize,
    y: usize,
    cap: usize,
) -> Result<GeodesicSummary, Unreachable> {
    let dag = GeodesicDag::build(d, x, y)?;
    let count = dag.count();
    let (sample, truncated) = dag.enumerate(d, cap);
    Ok(GeodesicSummary {
        count,
        sample,
        truncated,
    })
}

pub fn count_geodesics(d: &Digraph, x: usize, y: usize) -> Result<BigUint, Unreachable> {
    Ok(GeodesicDag::build(d, x, y)?.count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::is_geodesic;

    fn diamond() -> Digraph {
        Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn unique_path_counts_one() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]);
        assert_eq!(count_geodesics(&d, 0, 2).unwrap(), BigUint::from(1u32));
        let s = enumerate_geodesics(&d, 0, 2, 10).unwrap();
        assert!(!s.truncated);
        assert_eq!(s.sample.len(), 1);
    }

    #[test]
    fn diamond_counts_two() {
        let d = diamond();
        assert_eq!(count_geodesics(&d, 0, 3).unwrap(), BigUint::from(2u32));
        let s = enumerate_geodesics(&d, 0, 3, 10).unwrap();
        assert_eq!(s.sample.len(), 2);
        for w in &s.sample {
            assert!(is_geodesic(&d, w));
        }
        // lexicographic order: through 1 before through 2
        assert_eq!(s.sample[0].vertex(1), 1);
    }

    #[test]
    fn stacked_diamonds_count_powers_of_two() {
        // k diamonds in series: 2^k geodesics.
        for k in 1..=10usize {
            let mut edges = Vec::new();
            for i in 0..k {
                let base = 3 * i;
                edges.push((base, base + 1));
                edges.push((base, base + 2));
                edges.push((base + 1, base + 3));
                edges.push((base + 2, base + 3));
            }
            let d = Digraph::new(3 * k + 1, edges);
            let count = count_geodesics(&d, 0, 3 * k).unwrap();
            assert_eq!(count, BigUint::from(1u32) << k);
            if k <= 6 {
                let s = enumerate_geodesics(&d, 0, 3 * k, 1 << k).unwrap();
                assert!(!s.truncated);
                assert_eq!(BigUint::from(s.sample.len()), count);
            }
        }
    }

    #[test]
    fn parallel_edges_multiply_counts() {
        let d = Digraph::new(2, vec![(0, 1), (0, 1)]);
        assert_eq!(count_geodesics(&d, 0, 1).unwrap(), BigUint::from(2u32));
        let s = enumerate_geodesics(&d, 0, 1, 10).unwrap();
        assert_eq!(s.sample.len(), 2);
        assert_ne!(s.sample[0].edge_choices(), s.sample[1].edge_choices());
    }

    #[test]
    fn trivial_pair_counts_one() {
        let d = diamond();
        assert_eq!(count_geodesics(&d, 2, 2).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn unreachable_is_an_error() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]);
        assert!(count_geodesics(&d, 2, 0).is_err());
    }

    #[test]
    fn cap_truncates_but_count_stays_exact() {
        let d = diamond();
        let s = enumerate_geodesics(&d, 0, 3, 1).unwrap();
        assert!(s.truncated);
        assert_eq!(s.sample.len(), 1);
        assert_eq!(s.count, BigUint::from(2u32));
    }

    #[test]
    fn max_min_weight_picks_best_route() {
        let d = diamond();
        let dag = GeodesicDag::build(&d, 0, 3).unwrap();
        // Penalize vertex 1: the best route avoids it.
        let w = |v: usize| if v == 1 { Fin(0) } else { Fin(10) };
        assert_eq!(dag.max_min_weight(w), Fin(10));
        let witness = dag.max_min_witness(&d, w);
        assert_eq!(witness.vertex(1), 2);
        // Penalize both middles: optimum is forced low.
        let w = |v: usize| if v == 0 || v == 3 { Fin(10) } else { Fin(1) };
        assert_eq!(dag.max_min_weight(w), Fin(1));
    }
}
