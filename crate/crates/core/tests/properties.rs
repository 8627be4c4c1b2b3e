//! Property tests for the library invariants: distance axioms, subdivision
//! scaling, component structure, geodesic enumeration soundness, bound
//! profile monotonicity, chain-distance axioms and stability monotonicity.

use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use semihyp::boundary::{base_check, disjoint_paths};
use semihyp::digraph::{Digraph, Direction};
use semihyp::geodesic::enumerate_geodesics;
use semihyp::hyperbolicity::{bound_profile, DeltaScanner, TriangleKind, TriangleMode};
use semihyp::rho::{chain_is_pseudo_semimetric, RhoMatrix};
use semihyp::scalar::Decay;
use semihyp::stability::{qi_check, stability_defect, StabilityCaps};
use semihyp::verification::oracle;
use semihyp::walk::{is_geodesic, is_quasi_geodesic};
use semihyp::{Exact, Fin, Inf, Rational, Scalar};

fn arb_digraph(n_max: usize) -> impl Strategy<Value = Digraph> {
    (2..=n_max).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=(2 * n * n).min(40))
            .prop_map(move |edges| Digraph::new(n, edges))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_matrix_axioms(d in arb_digraph(12)) {
        let n = d.vertex_count();
        let dm = d.distances();
        for x in 0..n {
            prop_assert_eq!(dm.get(x, x), Fin(0));
            for y in 0..n {
                // d(x, y) = 1 exactly when an edge exists and x != y
                let edge = d.has_edge(x, y) && x != y;
                prop_assert_eq!(dm.get(x, y) == Fin(1), edge);
                for z in 0..n {
                    prop_assert!(dm.get(x, y) <= dm.get(x, z) + dm.get(z, y));
                }
            }
        }
    }

    #[test]
    fn subdivision_scales_distances(d in arb_digraph(8), k in 1u64..=3) {
        let s = d.subdivide(k);
        for u in 0..d.vertex_count() {
            for v in 0..d.vertex_count() {
                let expected = match d.dist(u, v) {
                    Fin(x) => Fin(k * x),
                    Inf => Inf,
                };
                prop_assert_eq!(s.dist(u, v), expected);
            }
        }
    }

    #[test]
    fn scc_matches_transitive_closure(d in arb_digraph(8)) {
        // oracle: boolean reachability closure, no BFS involved
        let n = d.vertex_count();
        let mut reach = vec![vec![false; n]; n];
        for v in 0..n {
            reach[v][v] = true;
        }
        for &(u, v) in d.edges() {
            reach[u as usize][v as usize] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let mut expected: Vec<Vec<usize>> = Vec::new();
        let mut assigned = vec![false; n];
        for x in 0..n {
            if assigned[x] {
                continue;
            }
            let class: Vec<usize> =
                (x..n).filter(|&y| reach[x][y] && reach[y][x]).collect();
            for &y in &class {
                assigned[y] = true;
            }
            expected.push(class);
        }
        prop_assert_eq!(d.scc(), expected);
    }

    #[test]
    fn enumerated_geodesics_are_geodesics(d in arb_digraph(7)) {
        let n = d.vertex_count();
        for x in 0..n {
            for y in 0..n {
                if !d.dist(x, y).is_finite() {
                    continue;
                }
                let s = enumerate_geodesics(&d, x, y, 64).unwrap();
                prop_assert!(s.count >= BigUint::one());
                for w in &s.sample {
                    prop_assert!(is_geodesic(&d, w));
                    prop_assert_eq!(w.first(), x);
                    prop_assert_eq!(w.last(), y);
                }
                if !s.truncated {
                    prop_assert_eq!(BigUint::from(s.sample.len()), s.count);
                }
            }
        }
    }

    #[test]
    fn geodesics_are_quasi_geodesics(
        d in arb_digraph(6),
        gnum in 1i64..=4,
        gden in 1i64..=2,
        c in 0i64..=3,
    ) {
        let gamma = Rational::new(gnum, gden).max(Rational::one());
        let c = Rational::from_integer(c);
        let n = d.vertex_count();
        for x in 0..n {
            for y in 0..n {
                if !d.dist(x, y).is_finite() {
                    continue;
                }
                let s = enumerate_geodesics(&d, x, y, 16).unwrap();
                for w in &s.sample {
                    prop_assert!(is_quasi_geodesic(&d, w, gamma, c));
                }
            }
        }
    }

    #[test]
    fn bound_profiles_are_monotone(d in arb_digraph(8), r_max in 1u64..=5) {
        for dir in [Direction::Out, Direction::In] {
            let p = bound_profile(&d, dir, r_max);
            for w in p.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn components_are_no_worse_than_the_whole(d in arb_digraph(6)) {
        // strongly connected pieces inherit the global thinness constant
        let global = DeltaScanner::new(&d)
            .delta(TriangleKind::Thin, TriangleMode::All)
            .delta;
        for class in d.scc() {
            let induced = d.induced(&class);
            let local = DeltaScanner::new(&induced)
                .delta(TriangleKind::Thin, TriangleMode::All)
                .delta;
            prop_assert!(local <= global, "component {:?}: {} > {}", class, local, global);
        }
    }

    #[test]
    fn delta_scan_matches_brute_force(d in arb_digraph(6)) {
        for kind in [TriangleKind::Thin, TriangleKind::Slim] {
            for mode in [TriangleMode::All, TriangleMode::Transitive] {
                let fast = DeltaScanner::new(&d).delta(kind, mode).delta;
                let brute = oracle::brute_delta(&d, kind, mode);
                prop_assert_eq!(fast, brute, "{:?}/{:?} on {:?}", kind, mode, d);
            }
        }
    }

    #[test]
    fn chain_distance_is_a_pseudo_semimetric(
        entries in proptest::collection::vec((0u64..=10, proptest::bool::ANY), 16),
        size in 2usize..=4,
    ) {
        let decay: Decay<Exact> = Decay::new(Exact::from_ratio(5, 4));
        let mut rho = vec![vec![Inf; size]; size];
        let mut it = entries.into_iter().cycle();
        for row in rho.iter_mut() {
            for cell in row.iter_mut() {
                let (v, inf) = it.next().unwrap();
                *cell = if inf { Inf } else { Fin(v) };
            }
        }
        let points = (0..size).map(|i| format!("p{i}")).collect();
        let stable = vec![vec![true; size]; size];
        let m = RhoMatrix::from_rho(points, rho, &decay, decay.pow(2), (0, 0), stable);
        let d = m.chain_distance();
        prop_assert!(chain_is_pseudo_semimetric(&d));
        // one-step chains bound the distance entrywise
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    prop_assert!(d[i][j] <= m.rho_eps[i][j]);
                }
            }
        }
    }

    #[test]
    fn identity_map_is_always_a_quasi_isometry(d in arb_digraph(7)) {
        let map: Vec<usize> = (0..d.vertex_count()).collect();
        prop_assert!(qi_check(&map, &d, &d, Rational::one(), Rational::from_integer(0)).ok);
    }

    #[test]
    fn full_vertex_set_is_a_base(d in arb_digraph(7)) {
        let all: Vec<usize> = (0..d.vertex_count()).collect();
        let (ok, uncovered) = base_check(&d, &all);
        prop_assert!(ok && uncovered.is_empty());
    }
}

#[test]
fn stability_defect_is_monotone_in_gamma_and_c() {
    // fixed instances; the enumeration grows with the class, never shrinks
    let diamond = Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    let square = Digraph::new(5, vec![(0, 1), (1, 2), (0, 3), (3, 4), (4, 2), (0, 2)]);
    let caps = StabilityCaps::default();
    for d in [&diamond, &square] {
        let grid = [
            (Rational::one(), Rational::from_integer(0)),
            (Rational::one(), Rational::from_integer(2)),
            (Rational::from_integer(2), Rational::from_integer(0)),
            (Rational::from_integer(2), Rational::from_integer(2)),
        ];
        let defects: Vec<_> = grid
            .iter()
            .map(|&(g, c)| stability_defect(d, 0, 2, g, c, &caps).unwrap())
            .collect();
        for (i, &(gi, ci)) in grid.iter().enumerate() {
            for (j, &(gj, cj)) in grid.iter().enumerate() {
                if gi <= gj && ci <= cj {
                    assert!(defects[i].kappa_out <= defects[j].kappa_out);
                    assert!(defects[i].kappa_in <= defects[j].kappa_in);
                }
            }
        }
    }
}

#[test]
fn disjoint_paths_grow_with_truncation() {
    use semihyp::boundary::RayContext;
    use semihyp::families::FamilySpec;
    let mut last = 0;
    for n in [5u64, 10, 20] {
        let ctx = RayContext::new(FamilySpec::Ex6_2, n).unwrap();
        let x = ctx.ray_index("x").unwrap();
        let y = ctx.ray_index("y").unwrap();
        let c = disjoint_paths(ctx.digraph(), &ctx.realized[x], &ctx.realized[y]);
        assert!(c > last, "count {c} did not grow past {last} at n={n}");
        last = c;
    }
}
