//! Independent reference implementations for the randomized suites. These
//! deliberately avoid the library's BFS matrix, shortest-path DAG and
//! Floyd-Warshall paths: plain depth-first enumeration and edge relaxation
//! only, so they can arbitrate.

use crate::digraph::Digraph;
use crate::extnat::{ExtNat, Fin};
use crate::hyperbolicity::{triangle_defect, GeodesicTriangle, TriangleKind, TriangleMode};
use crate::rewrite::{Presentation, Word};
use crate::rho::RhoMatrix;
use crate::scalar::Scalar;
use crate::walk::DirectedWalk;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeSet;

/// All simple directed paths from x to y as vertex sequences, by exhaustive
/// depth-first search.
fn all_simple_paths(d: &Digraph, x: usize, y: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = vec![x];
    let mut on_path = vec![false; d.vertex_count()];
    on_path[x] = true;
    fn dfs(
        d: &Digraph,
        y: usize,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let here = *path.last().unwrap();
        if here == y {
            out.push(path.clone());
            return;
        }
        for &w in d.out_neighbors(here) {
            let w = w as usize;
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push(w);
            dfs(d, y, path, on_path, out);
            path.pop();
            on_path[w] = false;
        }
    }
    dfs(d, y, &mut path, &mut on_path, &mut out);
    out
}

/// Exhaustively enumerated geodesics: the distance and every shortest vertex
/// sequence. None when y is unreachable from x.
pub fn brute_geodesics(d: &Digraph, x: usize, y: usize) -> Option<(u64, Vec<Vec<usize>>)> {
    let paths = all_simple_paths(d, x, y);
    let best = paths.iter().map(|p| p.len() as u64 - 1).min()?;
    let geodesics = paths
        .into_iter()
        .filter(|p| p.len() as u64 - 1 == best)
        .collect();
    Some((best, geodesics))
}

/// Geodesic count with parallel-edge multiplicities.
pub fn brute_count_geodesics(d: &Digraph, x: usize, y: usize) -> Option<BigUint> {
    let (_, geodesics) = brute_geodesics(d, x, y)?;
    let mut total = BigUint::zero();
    for g in geodesics {
        let mut ways = BigUint::from(1u32);
        for w in g.windows(2) {
            ways *= BigUint::from(d.edge_multiplicity(w[0], w[1]));
        }
        total += ways;
    }
    Some(total)
}

/// Brute-force global defect: enumerates endpoint multisets, orientation
/// patterns and every combination of concrete geodesic sides, evaluating the
/// definitional defect on each triangle. Exponential; small n only.
pub fn brute_delta(d: &Digraph, kind: TriangleKind, mode: TriangleMode) -> ExtNat {
    let n = d.vertex_count();
    let mut worst = Fin(0);
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                let slots = [(x, y), (y, z), (x, z)];
                let mut seen = BTreeSet::new();
                for bits in 0..8u32 {
                    let mut sides = [(0usize, 0usize); 3];
                    for (i, &(a, b)) in slots.iter().enumerate() {
                        sides[i] = if bits & (1 << i) == 0 { (a, b) } else { (b, a) };
                    }
                    sides.sort_unstable();
                    if !seen.insert(sides) {
                        continue;
                    }
                    let lists: Option<Vec<Vec<Vec<usize>>>> = sides
                        .iter()
                        .map(|&(a, b)| brute_geodesics(d, a, b).map(|(_, g)| g))
                        .collect();
                    let Some(lists) = lists else { continue };
                    if mode == TriangleMode::Transitive && !transitive(&sides) {
                        continue;
                    }
                    for ga in &lists[0] {
                        for gb in &lists[1] {
                            for gc in &lists[2] {
                                let tri = GeodesicTriangle::new(
                                    d,
                                    (x, y, z),
                                    [
                                        (sides[0], walk(d, ga)),
                                        (sides[1], walk(d, gb)),
                                        (sides[2], walk(d, gc)),
                                    ],
                                )
                                .expect("brute sides are geodesics");
                                let defect =
                                    triangle_defect(d, &tri, kind).expect("legal patterns");
                                worst = worst.max(defect);
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

fn transitive(sides: &[(usize, usize); 3]) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            if sides[i].1 == sides[j].0 && sides[i].0 == sides[k].0 && sides[j].1 == sides[k].1 {
                return true;
            }
        }
    }
    false
}

fn walk(d: &Digraph, verts: &[usize]) -> DirectedWalk {
    DirectedWalk::from_vertices(d, verts.to_vec()).expect("path is a walk")
}

/// Chain distance by repeated edge relaxation (Bellman-Ford) instead of
/// Floyd-Warshall.
pub fn bellman_ford_chain<S: Scalar>(m: &RhoMatrix<S>) -> Vec<Vec<S>> {
    let n = m.size();
    let mut dist: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        S::zero()
                    } else {
                        m.rho_eps[i][j].clone()
                    }
                })
                .collect()
        })
        .collect();
    for src in 0..n {
        for _ in 0..n {
            let mut changed = false;
            for mid in 0..n {
                for to in 0..n {
                    let candidate = dist[src][mid].clone() + m.rho_eps[mid][to].clone();
                    if candidate < dist[src][to] {
                        dist[src][to] = candidate;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    dist
}

/// Number of distinct elements representable by words of length at most r:
/// exhaustive product enumeration modulo the rewriting relations.
pub fn brute_cayley_count(p: &Presentation, generating_set: &[Word], r: u64) -> usize {
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut frontier: Vec<Word> = vec![Vec::new()];
    if matches!(p.kind, crate::rewrite::PresentationKind::Monoid) {
        seen.insert(Vec::new());
    }
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &frontier {
            for g in generating_set {
                let mut wg = w.clone();
                wg.extend_from_slice(g);
                let nf = p.normal_form(&wg, 100_000).expect("budget generous");
                seen.insert(nf.clone());
                next.push(nf);
            }
        }
        frontier = next;
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_geodesics_on_diamond() {
        let d = Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let (dist, g) = brute_geodesics(&d, 0, 3).unwrap();
        assert_eq!(dist, 2);
        assert_eq!(g.len(), 2);
        assert_eq!(
            brute_count_geodesics(&d, 0, 3).unwrap(),
            BigUint::from(2u32)
        );
    }

    #[test]
    fn brute_delta_matches_on_basics() {
        use crate::hyperbolicity::{delta, TriangleKind, TriangleMode};
        for d in [
            Digraph::new(4, vec![(0, 1), (1, 2), (2, 3)]),
            Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]),
            Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]),
        ] {
            for kind in [TriangleKind::Thin, TriangleKind::Slim] {
                for mode in [TriangleMode::All, TriangleMode::Transitive] {
                    assert_eq!(
                        brute_delta(&d, kind, mode),
                        delta(&d, kind, mode).delta,
                        "{kind:?}/{mode:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn brute_cayley_count_square_monoid() {
        let p = Presentation::square_commuting_monoid();
        // 1 + 2r elements at radius r
        for r in 1..=5u64 {
            assert_eq!(
                brute_cayley_count(&p, &[vec![0], vec![1]], r),
                (1 + 2 * r) as usize
            );
        }
    }
}
