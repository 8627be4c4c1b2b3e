//! Directed walks, geodesic and quasi-geodesic predicates.
//!
//! A walk is a nonempty vertex sequence with consecutive vertices joined by
//! an edge; vertices may repeat. On multigraphs each step also records which
//! parallel edge was taken.

use crate::digraph::Digraph;
use crate::extnat::{Fin, Inf};
use crate::Rational;
use num_traits::Zero;
use serde::Serialize;
use std::error::Error;
use std::fmt;

#[derive(Debug)]
pub struct WalkError(pub String);

impl fmt::Display for WalkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid walk: {}", self.0)
    }
}

impl Error for WalkError {}

/// Nonempty vertex sequence with one parallel-edge choice per step.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct DirectedWalk {
    vertices: Vec<u32>,
    edge_choices: Vec<u32>,
}

impl DirectedWalk {
    pub fn trivial(v: usize) -> Self {
        DirectedWalk {
            vertices: vec![v as u32],
            edge_choices: Vec::new(),
        }
    }

    /// Builds a walk using the first parallel edge at every step.
    pub fn from_vertices(d: &Digraph, vertices: Vec<usize>) -> Result<Self, WalkError> {
        let choices = vec![0; vertices.len().saturating_sub(1)];
        Self::new(d, vertices, choices)
    }

    pub fn new(
        d: &Digraph,
        vertices: Vec<usize>,
        edge_choices: Vec<u32>,
    ) -> Result<Self, WalkError> {
        if vertices.is_empty() {
            return Err(WalkError("empty vertex sequence".to_string()));
        }
        if edge_choices.len() + 1 != vertices.len() {
            return Err(WalkError(format!(
                "{} vertices need {} edge choices, got {}",
                vertices.len(),
                vertices.len() - 1,
                edge_choices.len()
            )));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            let mult = d.edge_multiplicity(w[0], w[1]);
            if mult == 0 {
                return Err(WalkError(format!("no edge from {} to {}", w[0], w[1])));
            }
            if edge_choices[i] >= mult {
                return Err(WalkError(format!(
                    "edge choice {} out of range for {} parallel edges {} -> {}",
                    edge_choices[i], mult, w[0], w[1]
                )));
            }
        }
        Ok(DirectedWalk {
            vertices: vertices.into_iter().map(|v| v as u32).collect(),
            edge_choices,
        })
    }

    /// Number of edges; vertices may repeat, so this can exceed any distance.
    pub fn len(&self) -> u64 {
        self.edge_choices.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(|&v| v as usize)
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.vertices[i] as usize
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn first(&self) -> usize {
        self.vertices[0] as usize
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().unwrap() as usize
    }

    pub fn edge_choices(&self) -> &[u32] {
        &self.edge_choices
    }

    /// Serialized form: whitespace-separated vertex names.
    pub fn display(&self, d: &Digraph) -> String {
        self.vertices()
            .map(|v| d.vertex_name(v))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn walk_length(walk: &DirectedWalk) -> u64 {
    walk.len()
}

/// A walk is geodesic when every subwalk realizes the distance between its
/// endpoints: d(P_i, P_j) = j - i for all i <= j.
pub fn is_geodesic(d: &Digraph, walk: &DirectedWalk) -> bool {
    let dm = d.distances();
    let k = walk.vertex_count();
    for i in 0..k {
        for j in i..k {
            if dm.get(walk.vertex(i), walk.vertex(j)) != Fin((j - i) as u64) {
                return false;
            }
        }
    }
    true
}

/// (γ, c)-quasi-geodesic test: every subwalk satisfies ℓ ≤ γ·d + c. Infinite
/// distances make the bound vacuous.
pub fn is_quasi_geodesic(d: &Digraph, walk: &DirectedWalk, gamma: Rational, c: Rational) -> bool {
    assert!(gamma >= Rational::from_integer(1), "gamma must be >= 1");
    assert!(c >= Rational::zero(), "c must be >= 0");
    let dm = d.distances();
    let k = walk.vertex_count();
    for i in 0..k {
        for j in i..k {
            let length = Rational::from_integer((j - i) as i64);
            match dm.get(walk.vertex(i), walk.vertex(j)) {
                Inf => {}
                Fin(dist) => {
                    if length > gamma * Rational::from_integer(dist as i64) + c {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;

    fn ratio(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn lengths() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]);
        assert_eq!(DirectedWalk::trivial(0).len(), 0);
        let w = DirectedWalk::from_vertices(&d, vec![0, 1, 2]).unwrap();
        assert_eq!(walk_length(&w), 2);

        let looped = Digraph::new(1, vec![(0, 0)]);
        let w = DirectedWalk::from_vertices(&looped, vec![0, 0, 0, 0]).unwrap();
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn rejects_invalid_walks() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]);
        assert!(DirectedWalk::from_vertices(&d, vec![0, 2]).is_err());
        assert!(DirectedWalk::from_vertices(&d, vec![]).is_err());
        assert!(DirectedWalk::new(&d, vec![0, 1], vec![1]).is_err());
    }

    #[test]
    fn geodesic_on_path() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]);
        let w = DirectedWalk::from_vertices(&d, vec![0, 1, 2]).unwrap();
        assert!(is_geodesic(&d, &w));
    }

    #[test]
    fn chord_breaks_geodesy() {
        // Diamond with a chord: 0->3 directly, so 0->1->3 is not geodesic.
        let d = Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]);
        let w = DirectedWalk::from_vertices(&d, vec![0, 1, 3]).unwrap();
        assert!(!is_geodesic(&d, &w));
    }

    #[test]
    fn repeated_vertex_is_never_geodesic() {
        let d = Digraph::new(2, vec![(0, 1), (1, 0)]);
        let w = DirectedWalk::from_vertices(&d, vec![0, 1, 0]).unwrap();
        assert!(!is_geodesic(&d, &w));
    }

    #[test]
    fn geodesics_are_quasi_geodesics() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]);
        let w = DirectedWalk::from_vertices(&d, vec![0, 1, 2]).unwrap();
        assert!(is_quasi_geodesic(&d, &w, ratio(1, 1), ratio(0, 1)));
        assert!(is_quasi_geodesic(&d, &w, ratio(3, 2), ratio(1, 2)));
    }

    #[test]
    fn two_cycle_zigzag_needs_slack_two() {
        let d = Digraph::new(2, vec![(0, 1), (1, 0)]);
        let w = DirectedWalk::from_vertices(&d, vec![0, 1, 0, 1]).unwrap();
        // Subwalk 0..2 has equal endpoints: length 2 needs c >= 2.
        assert!(!is_quasi_geodesic(&d, &w, ratio(1, 1), ratio(1, 1)));
        assert!(is_quasi_geodesic(&d, &w, ratio(1, 1), ratio(2, 1)));
    }
}
