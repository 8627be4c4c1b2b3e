//! The depth matrix ρ, its exponential transform and the chain-infimum
//! pseudo-semimetric d_{S,ε}, generic over the scalar (exact rational or
//! f64).
//!
//! Entries live over a finite point set (vertices and designated boundary
//! classes); chains for the infimum run through that set, so the computed
//! d_{S,ε} is the restriction of the full chain infimum to those points.

use crate::extnat::ExtNat;
use crate::scalar::{Decay, Scalar};
use serde::ser::SerializeStruct;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct RhoMatrix<S: Scalar> {
    pub points: Vec<String>,
    /// Depth-from-base of connecting geodesics; `None` for synthetic
    /// matrices built directly at the transformed level.
    pub rho: Option<Vec<Vec<ExtNat>>>,
    /// The transformed matrix base^{−ρ} in [0, 1].
    pub rho_eps: Vec<Vec<S>>,
    /// ε′ = base^{2(6δ + 2δ f(δ+1))}, the dilation of the depth inequality.
    pub epsilon_prime: S,
    /// Tail window (i_min, i_max) used for the liminf surrogate.
    pub window: (u64, u64),
    /// Per entry: whether the value agreed with the half-window computation.
    pub stable: Vec<Vec<bool>>,
}

impl<S: Scalar> RhoMatrix<S> {
    pub fn from_rho(
        points: Vec<String>,
        rho: Vec<Vec<ExtNat>>,
        decay: &Decay<S>,
        epsilon_prime: S,
        window: (u64, u64),
        stable: Vec<Vec<bool>>,
    ) -> Self {
        let rho_eps = rho
            .iter()
            .map(|row| row.iter().map(|&v| decay.decay(v)).collect())
            .collect();
        RhoMatrix {
            points,
            rho: Some(rho),
            rho_eps,
            epsilon_prime,
            window,
            stable,
        }
    }

    pub fn from_rho_eps(points: Vec<String>, rho_eps: Vec<Vec<S>>, epsilon_prime: S) -> Self {
        let n = points.len();
        RhoMatrix {
            points,
            rho: None,
            rho_eps,
            epsilon_prime,
            window: (0, 0),
            stable: vec![vec![true; n]; n],
        }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// All-pairs chain infimum: shortest paths over the complete digraph
    /// weighted by rho_eps. The empty chain makes the diagonal zero.
    pub fn chain_distance(&self) -> Vec<Vec<S>> {
        let n = self.size();
        let mut d: Vec<Vec<S>> = self.rho_eps.clone();
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = S::zero();
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k].clone() + d[k][j].clone();
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }
}

#[derive(Debug, Serialize)]
pub struct ChainInequalityReport {
    /// ε′ < √2, decided as ε′² < 2.
    pub epsilon_prime_ok: bool,
    /// The depth-dilation inequality holds on every triple.
    pub hypothesis_ok: bool,
    pub hypothesis_violation: Option<(usize, usize, usize)>,
    /// The two-sided bound (3 − 2ε′)·ρ^ε ≤ d ≤ ρ^ε on every pair; only
    /// asserted when the hypothesis holds.
    pub bound_checked: bool,
    pub bound_ok: bool,
    pub bound_violation: Option<(usize, usize)>,
}

impl ChainInequalityReport {
    pub fn pass(&self) -> bool {
        self.epsilon_prime_ok && self.hypothesis_ok && self.bound_ok
    }
}

/// Verifies the visual-bound statement on a matrix: hypothesis first, then
/// the exact two-sided comparison against the chain distance. A matrix whose
/// hypothesis fails is reported as such and the bound is not asserted.
pub fn verify_chain_inequality<S: Scalar>(m: &RhoMatrix<S>) -> ChainInequalityReport {
    let n = m.size();
    let eps = &m.epsilon_prime;
    let slack = S::slack();
    let epsilon_prime_ok = eps.clone() * eps.clone() < S::from_u64(2) + slack.clone();

    let mut hypothesis_violation = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = m.rho_eps[i][j].clone();
                let alt1 = m.rho_eps[i][k].clone();
                let alt2 = m.rho_eps[k][j].clone();
                let rhs = eps.clone() * (if alt1 >= alt2 { alt1 } else { alt2 });
                if lhs > rhs + slack.clone() {
                    hypothesis_violation = Some((i, j, k));
                    break 'outer;
                }
            }
        }
    }
    let hypothesis_ok = hypothesis_violation.is_none();
    if !hypothesis_ok || !epsilon_prime_ok {
        return ChainInequalityReport {
            epsilon_prime_ok,
            hypothesis_ok,
            hypothesis_violation,
            bound_checked: false,
            bound_ok: false,
            bound_violation: None,
        };
    }

    let d = m.chain_distance();
    let low_factor = S::from_u64(3) - S::from_u64(2) * eps.clone();
    let mut bound_violation = None;
    'pairs: for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rho = m.rho_eps[i][j].clone();
            let lower = low_factor.clone() * rho.clone();
            if d[i][j].clone() + slack.clone() < lower || d[i][j].clone() > rho + slack.clone() {
                bound_violation = Some((i, j));
                break 'pairs;
            }
        }
    }
    ChainInequalityReport {
        epsilon_prime_ok,
        hypothesis_ok,
        hypothesis_violation,
        bound_checked: true,
        bound_ok: bound_violation.is_none(),
        bound_violation,
    }
}

/// Exact pseudo-semimetric axioms for a computed chain matrix: zero
/// diagonal and the triangle inequality.
pub fn chain_is_pseudo_semimetric<S: Scalar>(d: &[Vec<S>]) -> bool {
    let n = d.len();
    let slack = S::slack();
    for (i, row) in d.iter().enumerate() {
        if row[i] != S::zero() {
            return false;
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][j].clone() > d[i][k].clone() + d[k][j].clone() + slack.clone() {
                    return false;
                }
            }
        }
    }
    true
}

impl<S: Scalar> Serialize for RhoMatrix<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut st = s.serialize_struct("RhoMatrix", 6)?;
        st.serialize_field("points", &self.points)?;
        st.serialize_field("rho", &self.rho)?;
        let rho_eps: Vec<Vec<String>> = self
            .rho_eps
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        st.serialize_field("rho_eps", &rho_eps)?;
        st.serialize_field("epsilon_prime", &self.epsilon_prime.to_string())?;
        st.serialize_field("window", &self.window)?;
        st.serialize_field("stable", &self.stable)?;
        st.end()
    }
}
