//! Boundary machinery at truncation scale: the ≤ quasiorder on designated
//! rays and anti-rays, boundary classes, ends via vertex-disjoint paths, the
//! refinement map, C± neighborhood predicates, bases, independence and the
//! ρ-matrix construction.
//!
//! Infinite quantifiers ("for every r and every x") are probed over explicit
//! finite grids; every acceptance carries its witnesses and a status in
//! {certified-at-scale, inconclusive, refuted-at-scale}. These are evidence
//! under stated probes, never proofs about the infinite object.

use crate::digraph::{Digraph, Direction};
use crate::extnat::{ExtNat, Fin, Inf};
use crate::families::{BallRealization, FamilyError, FamilySpec, RayKind, RaySpec};
use crate::geodesic::GeodesicDag;
use crate::rho::RhoMatrix;
use crate::scalar::{Decay, Scalar};
use crate::walk::DirectedWalk;
use serde::Serialize;
use std::collections::VecDeque;
use std::error::Error;
use std::fmt;

#[derive(Debug)]
pub enum BoundaryError {
    Family(FamilyError),
    UnknownRay(String),
    ProbeBeyondTruncation { needed: u64, truncation: u64 },
    WindowBeyondCore { window_end: u64, available: u64 },
    NotABase { uncovered: Vec<String> },
    NoRays,
}

impl fmt::Display for BoundaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryError::Family(e) => write!(f, "{e}"),
            BoundaryError::UnknownRay(name) => write!(f, "unknown ray {name:?}"),
            BoundaryError::ProbeBeyondTruncation { needed, truncation } => write!(
                f,
                "probe realization needs radius {needed}, truncation is {truncation}"
            ),
            BoundaryError::WindowBeyondCore {
                window_end,
                available,
            } => write!(
                f,
                "window end {window_end} exceeds realized ray depth {available}"
            ),
            BoundaryError::NotABase { uncovered } => {
                write!(f, "base check failed; uncovered: {}", uncovered.join(", "))
            }
            BoundaryError::NoRays => write!(f, "family designates no rays"),
        }
    }
}

impl Error for BoundaryError {}

impl From<FamilyError> for BoundaryError {
    fn from(e: FamilyError) -> Self {
        BoundaryError::Family(e)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ClaimStatus {
    CertifiedAtScale,
    Inconclusive,
    RefutedAtScale,
}

/// A realized family: the truncation plus every designated ray materialized
/// as its index-ordered vertex list (index i is R(i), anti-rays via the
/// R(i) = R(−i) convention).
pub struct RayContext {
    pub spec: FamilySpec,
    pub real: BallRealization,
    pub rays: Vec<RaySpec>,
    pub realized: Vec<Vec<usize>>,
}

impl RayContext {
    pub fn new(spec: FamilySpec, n: u64) -> Result<RayContext, BoundaryError> {
        let real = spec.realize(n)?;
        let rays = spec.rays();
        let realized = rays.iter().map(|r| spec.ray_vertices(&real, r)).collect();
        Ok(RayContext {
            spec,
            real,
            rays,
            realized,
        })
    }

    pub fn digraph(&self) -> &Digraph {
        &self.real.digraph
    }

    pub fn ray_index(&self, name: &str) -> Result<usize, BoundaryError> {
        self.rays
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| BoundaryError::UnknownRay(name.to_string()))
    }

    /// The realized segment as a walk in its travel direction: forward for
    /// rays, from the deep end down to R(0) for anti-rays.
    pub fn ray_walk(&self, ray: usize) -> DirectedWalk {
        let verts = &self.realized[ray];
        let ordered: Vec<usize> = match self.rays[ray].kind {
            RayKind::Ray => verts.clone(),
            RayKind::AntiRay => verts.iter().rev().copied().collect(),
        };
        DirectedWalk::from_vertices(self.digraph(), ordered).expect("realized rays are walks")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LeqWitness {
    pub m: u64,
    pub r: u64,
    pub path: DirectedWalk,
    /// Index along R1 of the path's start, index along R2 of its end.
    pub source_index: usize,
    pub target_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeqDecision {
    pub status: ClaimStatus,
    pub witness: Option<LeqWitness>,
}

fn restricted_shortest(
    d: &Digraph,
    sources: &[usize],
    targets: &[usize],
    allowed: impl Fn(usize) -> bool,
) -> Option<DirectedWalk> {
    let n = d.vertex_count();
    let mut is_target = vec![false; n];
    for &t in targets {
        if allowed(t) {
            is_target[t] = true;
        }
    }
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut starts: Vec<usize> = sources.iter().copied().filter(|&v| allowed(v)).collect();
    starts.sort_unstable();
    starts.dedup();
    for v in starts {
        seen[v] = true;
        parent[v] = v;
        queue.push_back(v);
    }
    let mut hit = None;
    while let Some(v) = queue.pop_front() {
        if is_target[v] {
            hit = Some(v);
            break;
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

/// Searches, for every probe base point x (all vertices realized at radius
/// r + 2), for a directed R1-R2 path of length at most M outside
/// B^+_r(x) ∪ B^-_r(x). Returns the hardest probe's witness when every
/// probe has one.
pub fn ray_leq_witness(
    ctx: &RayContext,
    r1: usize,
    r2: usize,
    m_cap: u64,
    r: u64,
) -> Result<LeqDecision, BoundaryError> {
    let profile = leq_min_lengths(ctx, r1, r2, r)?;
    let mut worst: Option<(u64, DirectedWalk)> = None;
    let mut all_core = true;
    for (len, path) in &profile {
        match len {
            Inf => {
                // conclusive only when the search region sits inside the core
                let conclusive = r + 2 + m_cap <= ctx.real.stable_core;
                return Ok(LeqDecision {
                    status: if conclusive {
                        ClaimStatus::RefutedAtScale
                    } else {
                        ClaimStatus::Inconclusive
                    },
                    witness: None,
                });
            }
            Fin(l) => {
                let path = path.as_ref().unwrap();
                if !path.vertices().all(|v| ctx.real.in_core(v)) {
                    all_core = false;
                }
                if worst.as_ref().is_none_or(|(w, _)| l > w) {
                    worst = Some((*l, path.clone()));
                }
            }
        }
    }
    let (m, path) = worst.expect("at least one probe");
    if m > m_cap {
        let conclusive = r + 2 + m_cap <= ctx.real.stable_core;
        return Ok(LeqDecision {
            status: if conclusive {
                ClaimStatus::RefutedAtScale
            } else {
                ClaimStatus::Inconclusive
            },
            witness: None,
        });
    }
    let source_index = ctx.realized[r1]
        .iter()
        .position(|&v| v == path.first())
        .unwrap_or(usize::MAX);
    let target_index = ctx.realized[r2]
        .iter()
        .position(|&v| v == path.last())
        .unwrap_or(usize::MAX);
    Ok(LeqDecision {
        status: if all_core {
            ClaimStatus::CertifiedAtScale
        } else {
            ClaimStatus::Inconclusive
        },
        witness: Some(LeqWitness {
            m,
            r,
            path,
            source_index,
            target_index,
        }),
    })
}

/// Per probe x: the least length of an R1-R2 path avoiding both balls of
/// radius r around x, with the path.
fn leq_min_lengths(
    ctx: &RayContext,
    r1: usize,
    r2: usize,
    r: u64,
) -> Result<Vec<(ExtNat, Option<DirectedWalk>)>, BoundaryError> {
    let probe_radius = r + 2;
    if probe_radius > ctx.real.radius {
        return Err(BoundaryError::ProbeBeyondTruncation {
            needed: probe_radius,
            truncation: ctx.real.radius,
        });
    }
    let probe_real = ctx.spec.realize(probe_radius)?;
    let d = ctx.digraph();
    let dm = d.distances();
    let probes: Vec<usize> = (0..probe_real.digraph.vertex_count())
        .map(|v| {
            ctx.real
                .vertex(&probe_real.digraph.vertex_name(v))
                .expect("probe labels persist in larger truncations")
        })
        .collect();
    let sources = &ctx.realized[r1];
    let targets = &ctx.realized[r2];
    Ok(probes
        .iter()
        .map(|&x| {
            let allowed = |v: usize| dm.get(x, v) > Fin(r) && dm.get(v, x) > Fin(r);
            match restricted_shortest(d, sources, targets, allowed) {
                Some(p) => (Fin(p.len()), Some(p)),
                None => (Inf, None),
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileEntry {
    pub r: u64,
    /// Least M certifying all probes at this r; infinite when some probe
    /// found no path at all.
    pub m: ExtNat,
    pub status: ClaimStatus,
}

/// For each r in the grid, the least witness length over the probe set; a
/// bounded profile is finite-scale evidence for R1 ≤ R2.
pub fn estimate_m_profile(
    ctx: &RayContext,
    r1: usize,
    r2: usize,
    r_grid: &[u64],
) -> Result<Vec<ProfileEntry>, BoundaryError> {
    let mut out = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let lengths = leq_min_lengths(ctx, r1, r2, r)?;
        let mut m = Fin(0);
        let mut any_inf = false;
        let mut all_core = true;
        for (len, path) in &lengths {
            match len {
                Inf => any_inf = true,
                Fin(_) => {
                    m = m.max(*len);
                    if let Some(p) = path {
                        if !p.vertices().all(|v| ctx.real.in_core(v)) {
                            all_core = false;
                        }
                    }
                }
            }
        }
        let (m, status) = if any_inf {
            (
                Inf,
                if r + 2 <= ctx.real.stable_core {
                    ClaimStatus::RefutedAtScale
                } else {
                    ClaimStatus::Inconclusive
                },
            )
        } else if all_core {
            (m, ClaimStatus::CertifiedAtScale)
        } else {
            (m, ClaimStatus::Inconclusive)
        };
        out.push(ProfileEntry { r, m, status });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct BoundaryReport {
    pub ray_names: Vec<String>,
    pub m_cap: u64,
    pub r_grid: Vec<u64>,
    /// leq[i][j]: decision for ray_i ≤ ray_j under the probe grid.
    pub leq: Vec<Vec<LeqDecision>>,
    /// Classes of the symmetrization, each a sorted list of ray indices.
    pub classes: Vec<Vec<usize>>,
    /// class_order[a][b]: class a ≤ class b (via representatives).
    pub class_order: Vec<Vec<bool>>,
    pub provisional: bool,
}

/// Pairwise witness profiles over the designated rays; acceptance of
/// R1 ≤ R2 means a profile bounded by m_cap across the whole r grid.
pub fn boundary_partition(
    ctx: &RayContext,
    m_cap: u64,
    r_grid: &[u64],
) -> Result<BoundaryReport, BoundaryError> {
    let k = ctx.rays.len();
    if k == 0 {
        return Err(BoundaryError::NoRays);
    }
    let mut leq = Vec::with_capacity(k);
    let mut provisional = false;
    for i in 0..k {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            let mut decision = LeqDecision {
                status: ClaimStatus::CertifiedAtScale,
                witness: None,
            };
            for &r in r_grid {
                let step = ray_leq_witness(ctx, i, j, m_cap, r)?;
                match step.status {
                    ClaimStatus::CertifiedAtScale => {
                        decision.witness = step.witness;
                    }
                    ClaimStatus::Inconclusive => {
                        decision.status = ClaimStatus::Inconclusive;
                        decision.witness = None;
                        break;
                    }
                    ClaimStatus::RefutedAtScale => {
                        decision.status = ClaimStatus::RefutedAtScale;
                        decision.witness = None;
                        break;
                    }
                }
            }
            if decision.status == ClaimStatus::Inconclusive {
                provisional = true;
            }
            row.push(decision);
        }
        leq.push(row);
    }
    let accepted = |i: usize, j: usize| leq[i][j].status == ClaimStatus::CertifiedAtScale;
    let classes = symmetrize(k, &accepted);
    let class_order: Vec<Vec<bool>> = classes
        .iter()
        .map(|a| classes.iter().map(|b| accepted(a[0], b[0])).collect())
        .collect();
    Ok(BoundaryReport {
        ray_names: ctx.rays.iter().map(|r| r.name.clone()).collect(),
        m_cap,
        r_grid: r_grid.to_vec(),
        leq,
        classes,
        class_order,
        provisional,
    })
}

fn symmetrize(k: usize, accepted: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut assigned = vec![usize::MAX; k];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        if assigned[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut class = vec![i];
        assigned[i] = id;
        for j in i + 1..k {
            if assigned[j] == usize::MAX && accepted(i, j) && accepted(j, i) {
                assigned[j] = id;
                class.push(j);
            }
        }
        classes.push(class);
    }
    classes
}

/// Maximum number of vertex-disjoint directed paths from the source set to
/// the target set (unit vertex capacities; a shared vertex counts as a
/// trivial path).
pub fn disjoint_paths(d: &Digraph, sources: &[usize], targets: &[usize]) -> usize {
    let n = d.vertex_count();
    // node splitting: in(v) = 2v, out(v) = 2v + 1, source = 2n, sink = 2n + 1
    let mut flow = MaxFlow::new(2 * n + 2);
    for v in 0..n {
        flow.arc(2 * v, 2 * v + 1, 1);
    }
    for &(u, v) in d.edges() {
        flow.arc(2 * u as usize + 1, 2 * v as usize, 1);
    }
    let mut srcs = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    for s in srcs {
        flow.arc(2 * n, 2 * s, 1);
    }
    let mut tgts = targets.to_vec();
    tgts.sort_unstable();
    tgts.dedup();
    for t in tgts {
        flow.arc(2 * t + 1, 2 * n + 1, 1);
    }
    flow.max_flow(2 * n, 2 * n + 1)
}

struct MaxFlow {
    n: usize,
    // per node: (to, residual, reverse edge index)
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl MaxFlow {
    fn new(n: usize) -> Self {
        MaxFlow {
            n,
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn arc(&mut self, u: usize, v: usize, c: i64) {
        let e = self.to.len();
        self.adj[u].push(e);
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(e + 1);
        self.to.push(u);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0usize;
        loop {
            let mut pred_edge = vec![usize::MAX; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                if v == t {
                    break;
                }
                for &e in &self.adj[v] {
                    let w = self.to[e];
                    if !seen[w] && self.cap[e] > 0 {
                        seen[w] = true;
                        pred_edge[w] = e;
                        queue.push_back(w);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut v = t;
            while v != s {
                let e = pred_edge[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            total += 1;
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EndsReport {
    pub ray_names: Vec<String>,
    pub schedule: Vec<u64>,
    /// growth[i][j]: disjoint-path counts along the schedule.
    pub growth: Vec<Vec<Vec<usize>>>,
    /// preceq[i][j]: counts reach 3 and strictly increase along the schedule.
    pub preceq: Vec<Vec<bool>>,
    pub classes: Vec<Vec<usize>>,
    pub class_order: Vec<Vec<bool>>,
    /// The accepted relation is reflexive and transitive as reported.
    pub relation_consistent: bool,
    /// Ball-escape cross-check on accepted pairs; None when skipped.
    pub ball_escape_consistent: Option<bool>,
}

/// Ends at truncation scale: R1 ≼ R2 accepted when the vertex-disjoint path
/// count is at least 3 and strictly increases over a doubling schedule.
pub fn ends_partition(spec: &FamilySpec, n: u64) -> Result<EndsReport, BoundaryError> {
    let rays = spec.rays();
    if rays.is_empty() {
        return Err(BoundaryError::NoRays);
    }
    let mut schedule: Vec<u64> = vec![n.div_ceil(4).max(2).min(n), n.div_ceil(2).max(3).min(n), n];
    schedule.sort_unstable();
    schedule.dedup();
    let contexts: Vec<RayContext> = schedule
        .iter()
        .map(|&m| RayContext::new(spec.clone(), m))
        .collect::<Result<_, _>>()?;
    let k = rays.len();
    let mut growth = vec![vec![Vec::new(); k]; k];
    for ctx in &contexts {
        for i in 0..k {
            for j in 0..k {
                let c = disjoint_paths(ctx.digraph(), &ctx.realized[i], &ctx.realized[j]);
                growth[i][j].push(c);
            }
        }
    }
    let mut preceq = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            let g = &growth[i][j];
            let increasing = g.windows(2).all(|w| w[0] < w[1]);
            preceq[i][j] = (*g.last().unwrap() >= 3) && (g.len() < 2 || increasing);
        }
    }
    let accepted = |i: usize, j: usize| preceq[i][j];
    let classes = symmetrize(k, &accepted);
    let class_order: Vec<Vec<bool>> = classes
        .iter()
        .map(|a| classes.iter().map(|b| accepted(a[0], b[0])).collect())
        .collect();
    let mut relation_consistent = (0..k).all(|i| preceq[i][i]);
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if preceq[i][j] && preceq[j][l] && !preceq[i][l] {
                    relation_consistent = false;
                }
            }
        }
    }

    // ball-escape cross-check: accepted pairs must also have a connecting path
    // escaping small balls around small-truncation probes. Skipped when local
    // finiteness of the infinite object is unknown.
    let ball_escape_consistent = if spec.locally_finite() == Some(true) {
        let ctx = contexts.last().unwrap();
        let d = ctx.digraph();
        let dm = d.distances();
        let probe_real = spec.realize(3.min(n))?;
        let mut consistent = true;
        'pairs: for i in 0..k {
            for j in 0..k {
                if !preceq[i][j] {
                    continue;
                }
                for p in 0..probe_real.digraph.vertex_count() {
                    let x = ctx
                        .real
                        .vertex(&probe_real.digraph.vertex_name(p))
                        .expect("probe labels persist");
                    for r in [1u64, 2] {
                        let allowed = |v: usize| match (rays[i].kind, rays[j].kind) {
                            (RayKind::Ray, RayKind::Ray) => dm.get(x, v) > Fin(r),
                            (RayKind::AntiRay, RayKind::AntiRay) => dm.get(v, x) > Fin(r),
                            _ => dm.get(x, v) > Fin(r) && dm.get(v, x) > Fin(r),
                        };
                        if restricted_shortest(d, &ctx.realized[i], &ctx.realized[j], allowed)
                            .is_none()
                        {
                            consistent = false;
                            break 'pairs;
                        }
                    }
                }
            }
        }
        Some(consistent)
    } else {
        None
    };
    Ok(EndsReport {
        ray_names: rays.iter().map(|r| r.name.clone()).collect(),
        schedule,
        growth,
        preceq,
        classes,
        class_order,
        relation_consistent,
        ball_escape_consistent,
    })
}

#[derive(Debug, Serialize)]
pub struct RefinementReport {
    /// boundary class index -> end class index.
    pub map: Vec<usize>,
    pub total: bool,
    /// Some boundary class whose members straddle two end classes, if any.
    pub straddle: Option<usize>,
    pub boundary: BoundaryReport,
    pub ends: EndsReport,
}

/// Maps each boundary class to the end class containing its rays; the
/// refinement property is that no boundary class straddles two ends.
pub fn refinement_map(
    spec: &FamilySpec,
    n: u64,
    m_cap: u64,
    r_grid: &[u64],
) -> Result<RefinementReport, BoundaryError> {
    let ctx = RayContext::new(spec.clone(), n)?;
    let boundary = boundary_partition(&ctx, m_cap, r_grid)?;
    let ends = ends_partition(spec, n)?;
    let end_of_ray = |ray: usize| -> usize {
        ends.classes
            .iter()
            .position(|c| c.contains(&ray))
            .expect("ends classes cover all rays")
    };
    let mut map = Vec::with_capacity(boundary.classes.len());
    let mut straddle = None;
    for (ci, class) in boundary.classes.iter().enumerate() {
        let targets: Vec<usize> = class.iter().map(|&r| end_of_ray(r)).collect();
        if targets.windows(2).any(|w| w[0] != w[1]) {
            straddle = Some(ci);
        }
        map.push(targets[0]);
    }
    Ok(RefinementReport {
        total: map.len() == boundary.classes.len(),
        map,
        straddle,
        boundary,
        ends,
    })
}

#[derive(Debug, Serialize)]
pub struct ExtractReport {
    /// The extracted geodesic ray, as vertex labels from R(0) outward.
    pub labels: Vec<String>,
    /// Worst distance from the source ray to the extracted one and back.
    pub kappa_out: ExtNat,
    pub kappa_in: ExtNat,
}

#[derive(Debug)]
pub enum ExtractError {
    Boundary(BoundaryError),
    RayTooShort,
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractError::Boundary(e) => write!(f, "{e}"),
            ExtractError::RayTooShort => write!(f, "ray realizes too few points to extract from"),
        }
    }
}

impl Error for ExtractError {}

/// Builds geodesics from Q(0) to Q(i) and takes the lexicographically least
/// prefix sustainable to the deepest target; for anti-rays the mirrored
/// suffix construction applies. Reports the out/in distance bounds between
/// the result and Q.
pub fn extract_geodesic_ray(ctx: &RayContext, ray: usize) -> Result<ExtractReport, ExtractError> {
    let d = ctx.digraph();
    let dm = d.distances();
    let q = &ctx.realized[ray];
    if q.len() < 2 {
        return Err(ExtractError::RayTooShort);
    }
    let root = q[0];
    let forward = ctx.rays[ray].kind == RayKind::Ray;
    let deepest = *q.last().unwrap();
    let total = match if forward {
        dm.get(root, deepest)
    } else {
        dm.get(deepest, root)
    } {
        Fin(t) => t,
        Inf => return Err(ExtractError::RayTooShort),
    };
    let mut chain = vec![root];
    let mut here = root;
    for step in 1..=total {
        let neighbors: Vec<usize> = if forward {
            d.out_neighbors(here).iter().map(|&v| v as usize).collect()
        } else {
            d.in_neighbors(here).iter().map(|&v| v as usize).collect()
        };
        let mut chosen = None;
        for v in neighbors {
            let on_geodesic = if forward {
                dm.get(root, v) == Fin(step) && dm.get(root, v) + dm.get(v, deepest) == Fin(total)
            } else {
                dm.get(v, root) == Fin(step) && dm.get(deepest, v) + dm.get(v, root) == Fin(total)
            };
            if on_geodesic {
                chosen = Some(v);
                break;
            }
        }
        match chosen {
            Some(v) => {
                chain.push(v);
                here = v;
            }
            None => break,
        }
    }
    // two-sided comparison against the source ray
    let mut kappa_out = Fin(0);
    let mut kappa_in = Fin(0);
    for &e in &chain {
        let from_q = q.iter().map(|&v| dm.get(v, e)).min().unwrap();
        let to_q = q.iter().map(|&v| dm.get(e, v)).min().unwrap();
        kappa_out = kappa_out.max(from_q);
        kappa_in = kappa_in.max(to_q);
    }
    Ok(ExtractReport {
        labels: chain.iter().map(|&v| d.vertex_name(v)).collect(),
        kappa_out,
        kappa_in,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum NeighborhoodSide {
    /// C−: y reaches every deep point of the class outside the balls.
    CMinus,
    /// C+: every deep point of the class reaches y outside the balls.
    CPlus,
}

#[derive(Debug, Serialize)]
pub struct NeighborhoodReport {
    pub member: bool,
    pub status: ClaimStatus,
    pub probes: usize,
}

/// Membership of vertex y in the typical C± neighborhood of the class of
/// the given ray, based at x with radius r. The existential over
/// representatives is realized by tails: membership holds when some suffix
/// of the realized ray lies past the balls and every one of its points
/// admits an avoiding geodesic.
pub fn neighborhood_member(
    ctx: &RayContext,
    ray: usize,
    y: usize,
    x: usize,
    r: u64,
    side: NeighborhoodSide,
) -> NeighborhoodReport {
    let d = ctx.digraph();
    let dm = d.distances();
    let in_ball = |v: usize| dm.get(x, v) <= Fin(r) || dm.get(v, x) <= Fin(r);
    let rep = &ctx.realized[ray];
    let trim = rep.iter().rposition(|&v| in_ball(v)).map_or(0, |p| p + 1);
    if trim >= rep.len() {
        return NeighborhoodReport {
            member: false,
            status: ClaimStatus::Inconclusive,
            probes: 0,
        };
    }
    // avoiding distances from / to y over the ball-deleted digraph
    let allowed = |v: usize| !in_ball(v);
    let avoid_from_y = restricted_distances(d, y, &allowed, Direction::Out);
    let avoid_to_y = restricted_distances(d, y, &allowed, Direction::In);
    let pass = |z: usize| match side {
        NeighborhoodSide::CMinus => match dm.get(y, z) {
            Fin(dist) => avoid_from_y[z] == Fin(dist),
            Inf => false,
        },
        NeighborhoodSide::CPlus => match dm.get(z, y) {
            Fin(dist) => avoid_to_y[z] == Fin(dist),
            Inf => false,
        },
    };
    let last_fail = rep[trim..].iter().rposition(|&z| !pass(z));
    let suffix_start = trim + last_fail.map_or(0, |p| p + 1);
    let probes = rep.len() - suffix_start;
    let member = probes > 0;
    let deepest_in_core = rep.last().is_some_and(|&v| ctx.real.in_core(v));
    let status = if !deepest_in_core || (member && probes < 2) {
        // too little tail evidence to certify either way
        ClaimStatus::Inconclusive
    } else {
        ClaimStatus::CertifiedAtScale
    };
    NeighborhoodReport {
        member,
        status,
        probes,
    }
}

fn restricted_distances(
    d: &Digraph,
    from: usize,
    allowed: &dyn Fn(usize) -> bool,
    direction: Direction,
) -> Vec<ExtNat> {
    let n = d.vertex_count();
    let mut dist = vec![Inf; n];
    if !allowed(from) {
        return dist;
    }
    dist[from] = Fin(0);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].expect_finite("bfs");
        let neighbors = match direction {
            Direction::Out => d.out_neighbors(v),
            Direction::In => d.in_neighbors(v),
        };
        for &w in neighbors {
            let w = w as usize;
            if dist[w] == Inf && allowed(w) {
                dist[w] = Fin(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Base predicate: every vertex is at finite symmetric-min distance from
/// some base point.
pub fn base_check(d: &Digraph, base: &[usize]) -> (bool, Vec<usize>) {
    let uncovered: Vec<usize> = (0..d.vertex_count())
        .filter(|&v| !base.iter().any(|&s| d.dist_sym(v, s).is_finite()))
        .collect();
    (uncovered.is_empty(), uncovered)
}

#[derive(Debug, Serialize)]
pub struct IndependenceReport {
    pub size: usize,
    pub subset: Vec<usize>,
    pub exact: bool,
}

/// Largest subset of the radius-r ball around x with infinite distance in
/// both directions between all pairs. Exact search below the size limit,
/// greedy lower bound above it.
pub fn independence(
    d: &Digraph,
    x: usize,
    r: u64,
    direction: Direction,
    exact_limit: usize,
) -> IndependenceReport {
    let members = d.ball(x, r, direction, false);
    let dm = d.distances();
    let k = members.len();
    let conflict = |a: usize, b: usize| {
        dm.get(members[a], members[b]).is_finite() || dm.get(members[b], members[a]).is_finite()
    };
    if k <= exact_limit {
        // branch and bound over sorted candidates
        let mut best: Vec<usize> = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        fn grow(
            k: usize,
            start: usize,
            conflict: &dyn Fn(usize, usize) -> bool,
            current: &mut Vec<usize>,
            best: &mut Vec<usize>,
        ) {
            if current.len() + (k - start) <= best.len() {
                return;
            }
            if start == k {
                if current.len() > best.len() {
                    *best = current.clone();
                }
                return;
            }
            if current.iter().all(|&c| !conflict(c, start)) {
                current.push(start);
                grow(k, start + 1, conflict, current, best);
                current.pop();
            }
            grow(k, start + 1, conflict, current, best);
        }
        grow(k, 0, &conflict, &mut current, &mut best);
        IndependenceReport {
            size: best.len(),
            subset: best.iter().map(|&i| members[i]).collect(),
            exact: true,
        }
    } else {
        let mut chosen: Vec<usize> = Vec::new();
        for i in 0..k {
            if chosen.iter().all(|&c| !conflict(c, i)) {
                chosen.push(i);
            }
        }
        IndependenceReport {
            size: chosen.len(),
            subset: chosen.iter().map(|&i| members[i]).collect(),
            exact: false,
        }
    }
}

/// A matrix point: a realized vertex or a designated boundary class
/// (represented by its ray).
#[derive(Clone, Debug, Serialize)]
pub enum RhoPoint {
    Vertex(String),
    Ray(String),
}

/// Minimum depth-from-base over all vertices lying on any geodesic between
/// the two anchor vertices; infinity when no connection exists.
fn pair_depth(d: &Digraph, depth: &[ExtNat], from: usize, to: usize) -> ExtNat {
    if !d.dist(from, to).is_finite() {
        return Inf;
    }
    let dag = GeodesicDag::build(d, from, to).expect("finite pair");
    dag.on_path_vertices()
        .iter()
        .map(|&v| depth[v as usize])
        .min()
        .unwrap_or(Inf)
}

fn rho_entry(
    ctx: &RayContext,
    depth: &[ExtNat],
    from: &ResolvedPoint,
    to: &ResolvedPoint,
    window: (u64, u64),
) -> ExtNat {
    let d = ctx.digraph();
    let span = |p: &ResolvedPoint| -> Vec<usize> {
        match p {
            ResolvedPoint::Vertex(v) => vec![*v],
            ResolvedPoint::Ray(r) => {
                let verts = &ctx.realized[*r];
                let lo = window.0 as usize;
                let hi = (window.1 as usize).min(verts.len().saturating_sub(1));
                if lo > hi {
                    Vec::new()
                } else {
                    verts[lo..=hi].to_vec()
                }
            }
        }
    };
    let mut best = Inf;
    for &u in &span(from) {
        for &w in &span(to) {
            best = best.min(pair_depth(d, depth, u, w));
        }
    }
    best
}

enum ResolvedPoint {
    Vertex(usize),
    Ray(usize),
}

/// Computes the ρ matrix over the designated points: depth of connecting
/// geodesics from the base, liminf approximated by the minimum over the
/// tail window, sup over representatives by the designated representative.
pub fn rho_matrix<S: Scalar>(
    ctx: &RayContext,
    base_labels: &[String],
    points: &[RhoPoint],
    decay: &Decay<S>,
    epsilon_prime: S,
    window: (u64, u64),
) -> Result<RhoMatrix<S>, BoundaryError> {
    let d = ctx.digraph();
    let base: Vec<usize> = base_labels
        .iter()
        .map(|l| {
            ctx.real
                .vertex(l)
                .ok_or_else(|| BoundaryError::UnknownRay(l.clone()))
        })
        .collect::<Result<_, _>>()?;
    let (ok, uncovered) = base_check(d, &base);
    if !ok {
        return Err(BoundaryError::NotABase {
            uncovered: uncovered.iter().map(|&v| d.vertex_name(v)).collect(),
        });
    }
    let resolved: Vec<(String, ResolvedPoint)> = points
        .iter()
        .map(|p| match p {
            RhoPoint::Vertex(l) => ctx
                .real
                .vertex(l)
                .map(|v| (l.clone(), ResolvedPoint::Vertex(v)))
                .ok_or_else(|| BoundaryError::UnknownRay(l.clone())),
            RhoPoint::Ray(name) => ctx
                .ray_index(name)
                .map(|r| (name.clone(), ResolvedPoint::Ray(r))),
        })
        .collect::<Result<_, _>>()?;
    for (_, p) in &resolved {
        if let ResolvedPoint::Ray(r) = p {
            let available = ctx.realized[*r].len().saturating_sub(1) as u64;
            if window.1 > available {
                return Err(BoundaryError::WindowBeyondCore {
                    window_end: window.1,
                    available,
                });
            }
        }
    }
    let dm = d.distances();
    let depth: Vec<ExtNat> = (0..d.vertex_count())
        .map(|v| {
            base.iter()
                .map(|&s| dm.get(s, v).min(dm.get(v, s)))
                .min()
                .unwrap()
        })
        .collect();
    let k = resolved.len();
    let mut rho = vec![vec![Inf; k]; k];
    let mut stable = vec![vec![true; k]; k];
    let deeper = (
        window.0 + (window.1 - window.0).div_ceil(2).max(1),
        window.1,
    );
    for i in 0..k {
        for j in 0..k {
            rho[i][j] = rho_entry(ctx, &depth, &resolved[i].1, &resolved[j].1, window);
            if deeper.0 <= deeper.1 {
                let probe = rho_entry(ctx, &depth, &resolved[i].1, &resolved[j].1, deeper);
                stable[i][j] = probe == rho[i][j];
            }
        }
    }
    Ok(RhoMatrix::from_rho(
        resolved.into_iter().map(|(l, _)| l).collect(),
        rho,
        decay,
        epsilon_prime,
        window,
        stable,
    ))
}

/// Growth evidence that d_{S,ε} trends to zero for an ordered class pair:
/// both windows finite and the deeper window strictly larger. Pairs with no
/// connecting geodesics at all carry no evidence.
pub fn zero_distance_evidence(shallow: &ExtNat, deep: &ExtNat) -> bool {
    matches!((shallow, deep), (Fin(a), Fin(b)) if b > a)
}
