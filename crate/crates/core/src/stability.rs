//! Geodesic stability: worst two-sided separation among quasi-geodesics
//! sharing endpoints, and the quasi-isometry verifier.

use crate::digraph::Digraph;
use crate::extnat::{ExtNat, Fin, Inf};
use crate::geodesic::Unreachable;
use crate::walk::{is_quasi_geodesic, DirectedWalk};
use crate::Rational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct StabilityCaps {
    pub max_candidates: usize,
    /// Also admit walks with repeated vertices (still length-bounded).
    pub include_nonsimple: bool,
}

impl Default for StabilityCaps {
    fn default() -> Self {
        StabilityCaps {
            max_candidates: 10_000,
            include_nonsimple: false,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StabilityReport {
    pub kappa_out: ExtNat,
    pub kappa_in: ExtNat,
    pub candidates: usize,
    pub pairs_examined: u64,
    pub exhaustive: bool,
    /// (walk containing the extremal point, reference walk, vertex).
    pub witness_out: Option<(DirectedWalk, DirectedWalk, usize)>,
    pub witness_in: Option<(DirectedWalk, DirectedWalk, usize)>,
}

/// Every (γ, c)-quasi-geodesic from x to y has length at most γ·d(x, y) + c,
/// so the candidate set below is finite and exhaustively enumerable.
pub fn enumerate_quasi_geodesics(
    d: &Digraph,
    x: usize,
    y: usize,
    gamma: Rational,
    c: Rational,
    caps: &StabilityCaps,
) -> Result<(Vec<DirectedWalk>, bool), Unreachable> {
    let dist = match d.dist(x, y) {
        Fin(v) => v,
        Inf => return Err(Unreachable { from: x, to: y }),
    };
    let bound = (gamma * Rational::from_integer(dist as i64) + c)
        .floor()
        .to_integer()
        .to_u64()
        .expect("length bound fits u64");
    let mut out = Vec::new();
    let mut truncated = false;
    let mut current = vec![x];
    let mut on_stack = vec![false; d.vertex_count()];
    on_stack[x] = true;
    extend(
        d,
        y,
        gamma,
        c,
        bound,
        caps,
        &mut current,
        &mut on_stack,
        &mut out,
        &mut truncated,
    );
    Ok((out, truncated))
}

#[allow(clippy::too_many_arguments)]
fn extend(
    d: &Digraph,
    target: usize,
    gamma: Rational,
    c: Rational,
    bound: u64,
    caps: &StabilityCaps,
    current: &mut Vec<usize>,
    on_stack: &mut Vec<bool>,
    out: &mut Vec<DirectedWalk>,
    truncated: &mut bool,
) {
    if *truncated {
        return;
    }
    let here = *current.last().unwrap();
    if here == target {
        // the full walk must also pass the subwalk inequalities it has not
        // seen yet (prefix pruning already checked pairs ending here)
        if out.len() >= caps.max_candidates {
            *truncated = true;
            return;
        }
        let walk = DirectedWalk::from_vertices(d, current.clone()).expect("walk is edge-valid");
        debug_assert!(is_quasi_geodesic(d, &walk, gamma, c));
        out.push(walk);
        // fall through: longer quasi-geodesics may revisit the target
    }
    if current.len() as u64 > bound {
        return;
    }
    let dm = d.distances();
    for &w in d.out_neighbors(here) {
        let w = w as usize;
        if !caps.include_nonsimple && on_stack[w] {
            continue;
        }
        // prefix pruning: every pair (i, new end) must satisfy the bound
        let pos = current.len();
        let ok = current.iter().enumerate().all(|(i, &u)| {
            let length = Rational::from_integer((pos - i) as i64);
            match dm.get(u, w) {
                Inf => true,
                Fin(dv) => length <= gamma * Rational::from_integer(dv as i64) + c,
            }
        });
        if !ok {
            continue;
        }
        current.push(w);
        let was = on_stack[w];
        on_stack[w] = true;
        extend(
            d, target, gamma, c, bound, caps, current, on_stack, out, truncated,
        );
        on_stack[w] = was;
        current.pop();
        if *truncated {
            return;
        }
    }
}

/// Worst out/in separation over ordered pairs of (γ, c)-quasi-geodesics from
/// x to y (geodesics included: they are (γ, c)-quasi-geodesics themselves).
pub fn stability_defect(
    d: &Digraph,
    x: usize,
    y: usize,
    gamma: Rational,
    c: Rational,
    caps: &StabilityCaps,
) -> Result<StabilityReport, Unreachable> {
    let (candidates, truncated) = enumerate_quasi_geodesics(d, x, y, gamma, c, caps)?;
    let dm = d.distances();
    let mut kappa_out = Fin(0);
    let mut kappa_in = Fin(0);
    let mut witness_out = None;
    let mut witness_in = None;
    let mut pairs = 0u64;
    for a in &candidates {
        for b in &candidates {
            pairs += 1;
            for p in a.vertices() {
                let from_b = b.vertices().map(|q| dm.get(q, p)).min().unwrap();
                if from_b > kappa_out {
                    kappa_out = from_b;
                    witness_out = Some((a.clone(), b.clone(), p));
                }
                let to_b = b.vertices().map(|q| dm.get(p, q)).min().unwrap();
                if to_b > kappa_in {
                    kappa_in = to_b;
                    witness_in = Some((a.clone(), b.clone(), p));
                }
            }
        }
    }
    Ok(StabilityReport {
        kappa_out,
        kappa_in,
        candidates: candidates.len(),
        pairs_examined: pairs,
        exhaustive: !truncated,
        witness_out,
        witness_in,
    })
}

/// The explicit stability radius: λ = max{2κ + 2γκf(δ+1) + γf(δ) + c,
/// (κ+δ)f(δ+1) + 1 + δ + γ(2κ+1) + c}.
pub fn stability_lambda(
    delta: u64,
    f_delta: u64,
    f_delta_plus_1: u64,
    gamma: Rational,
    c: Rational,
    kappa: u64,
) -> Rational {
    let int = |v: u64| Rational::from_integer(v as i64);
    let first = int(2 * kappa) + gamma * int(2 * kappa * f_delta_plus_1) + gamma * int(f_delta) + c;
    let second = int((kappa + delta) * f_delta_plus_1 + 1 + delta) + gamma * int(2 * kappa + 1) + c;
    first.max(second)
}

#[derive(Debug, Clone, Serialize)]
pub enum QiViolation {
    /// d2 exceeds γ·d1 + c (in particular d1 finite but d2 infinite).
    UpperBound { x: usize, x2: usize },
    /// d2 undercuts γ^{-1}·d1 − c (in particular d1 infinite but d2 finite).
    LowerBound { x: usize, x2: usize },
    /// No mapped point at distance ≤ c both ways from this target vertex.
    CoDensity { y: usize },
}

#[derive(Debug, Serialize)]
pub struct QiReport {
    pub ok: bool,
    pub violations: Vec<QiViolation>,
}

/// Quasi-isometry check for a total vertex map: the two embedding
/// inequalities on all pairs plus c-co-density of the image.
pub fn qi_check(
    map: &[usize],
    d1: &Digraph,
    d2: &Digraph,
    gamma: Rational,
    c: Rational,
) -> QiReport {
    assert_eq!(map.len(), d1.vertex_count(), "map must be total on V(D1)");
    assert!(gamma >= Rational::from_integer(1) && c >= Rational::zero());
    let m1 = d1.distances();
    let m2 = d2.distances();
    let mut violations = Vec::new();
    for x in 0..d1.vertex_count() {
        for x2 in 0..d1.vertex_count() {
            let dv1 = m1.get(x, x2);
            let dv2 = m2.get(map[x], map[x2]);
            match (dv1, dv2) {
                (Fin(a), Fin(b)) => {
                    let (a, b) = (
                        Rational::from_integer(a as i64),
                        Rational::from_integer(b as i64),
                    );
                    if b > gamma * a + c {
                        violations.push(QiViolation::UpperBound { x, x2 });
                    }
                    if b < a / gamma - c {
                        violations.push(QiViolation::LowerBound { x, x2 });
                    }
                }
                (Fin(_), Inf) => violations.push(QiViolation::UpperBound { x, x2 }),
                (Inf, Fin(_)) => violations.push(QiViolation::LowerBound { x, x2 }),
                (Inf, Inf) => {}
            }
        }
    }
    for y in 0..d2.vertex_count() {
        let covered = (0..d1.vertex_count()).any(|x| {
            let fwd = m2.get(map[x], y);
            let bwd = m2.get(y, map[x]);
            match (fwd, bwd) {
                (Fin(a), Fin(b)) => {
                    Rational::from_integer(a as i64) <= c && Rational::from_integer(b as i64) <= c
                }
                _ => false,
            }
        });
        if !covered {
            violations.push(QiViolation::CoDensity { y });
        }
    }
    QiReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Scans a small (γ, c) grid and returns the feasible pairs, smallest first.
pub fn qi_feasible_grid(
    map: &[usize],
    d1: &Digraph,
    d2: &Digraph,
    gammas: &[Rational],
    cs: &[Rational],
) -> Vec<(Rational, Rational)> {
    let mut ok = Vec::new();
    for &gamma in gammas {
        for &c in cs {
            if qi_check(map, d1, d2, gamma, c).ok {
                ok.push((gamma, c));
            }
        }
    }
    ok
}
