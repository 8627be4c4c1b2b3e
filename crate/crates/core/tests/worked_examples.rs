//! Integration checks for the worked examples: neighborhood membership,
//! boundary orders, ends, divergence envelopes, ray extraction and the
//! quasiorder transitivity bound.

use semihyp::boundary::{
    boundary_partition, disjoint_paths, ends_partition, extract_geodesic_ray, neighborhood_member,
    refinement_map, rho_matrix, ClaimStatus, NeighborhoodSide, RayContext, RhoPoint,
};
use semihyp::divergence::{empirical_divergence, witness_path_is_valid, DivergenceConfig};
use semihyp::families::FamilySpec;
use semihyp::hyperbolicity::{
    bound_profile, composition_radius, explicit_constants, BoundFn, DeltaScanner, TriangleKind,
    TriangleMode,
};
use semihyp::scalar::Decay;
use semihyp::verification::quasiorder_transitivity_check;
use semihyp::{Direction, Exact, Fin, Inf, Scalar};

#[test]
fn bridge_family_neighborhoods() {
    // The typical backward neighborhood of the forward class consists of the
    // u and v strands; none of the w vertices join it, and none join the
    // forward neighborhood of the backward class.
    let ctx = RayContext::new(FamilySpec::Ex12_2, 20).unwrap();
    let v_ray = ctx.ray_index("v").unwrap();
    let x_anti = ctx.ray_index("x-anti").unwrap();
    let x0 = ctx.real.expect_vertex("x0");
    let r = 2;
    for i in [8u64, 12, 16] {
        let u_i = ctx.real.expect_vertex(&format!("u{i}"));
        let v_i = ctx.real.expect_vertex(&format!("v{i}"));
        let w_i = ctx.real.expect_vertex(&format!("w{i}"));
        let in_u = neighborhood_member(&ctx, v_ray, u_i, x0, r, NeighborhoodSide::CMinus);
        assert!(in_u.member, "u{i} should lie in the C- neighborhood");
        let in_v = neighborhood_member(&ctx, v_ray, v_i, x0, r, NeighborhoodSide::CMinus);
        assert!(in_v.member, "v{i} should lie in the C- neighborhood");
        let w_minus = neighborhood_member(&ctx, v_ray, w_i, x0, r, NeighborhoodSide::CMinus);
        assert!(!w_minus.member, "w{i} must not reach the v-class");
        let w_plus = neighborhood_member(&ctx, x_anti, w_i, x0, r, NeighborhoodSide::CPlus);
        assert!(!w_plus.member, "w{i} must not be reached from the x-class");
    }
    // a point on the representative itself, far from the base
    let deep = ctx.real.expect_vertex("v15");
    let on_ray = neighborhood_member(&ctx, v_ray, deep, x0, 0, NeighborhoodSide::CMinus);
    assert!(on_ray.member);
}

#[test]
fn three_ray_family_boundary_order() {
    // Classes omega (ray), eta and mu (anti-rays) with omega below both and
    // no other relations.
    let ctx = RayContext::new(FamilySpec::Ex14_2, 20).unwrap();
    let report = boundary_partition(&ctx, 2, &[0, 1, 2]).unwrap();
    assert_eq!(report.classes.len(), 3);
    let x = ctx.ray_index("x").unwrap();
    let y = ctx.ray_index("y-anti").unwrap();
    let z = ctx.ray_index("z-anti").unwrap();
    assert_eq!(report.leq[x][y].status, ClaimStatus::CertifiedAtScale);
    assert_eq!(report.leq[x][z].status, ClaimStatus::CertifiedAtScale);
    assert_eq!(report.leq[x][y].witness.as_ref().unwrap().m, 1);
    for (i, j) in [(y, x), (z, x), (y, z), (z, y)] {
        assert_eq!(
            report.leq[i][j].status,
            ClaimStatus::RefutedAtScale,
            "{} <= {} should be refuted",
            report.ray_names[i],
            report.ray_names[j]
        );
    }
    let refinement = refinement_map(&FamilySpec::Ex14_2, 20, 2, &[0, 1, 2]).unwrap();
    assert!(refinement.total);
    assert!(refinement.straddle.is_none());
}

#[test]
fn rung_family_has_two_ordered_ends() {
    // forward x-ray feeds the y-ray through one-way rungs: x below y, no
    // way back, so two distinct f-ends with an order between them
    let report = ends_partition(&FamilySpec::Ex6_2, 20).unwrap();
    assert_eq!(report.classes.len(), 2);
    let x = report.ray_names.iter().position(|n| n == "x").unwrap();
    let y = report.ray_names.iter().position(|n| n == "y").unwrap();
    assert!(report.preceq[x][y], "x-ray should sit below the y-ray");
    assert!(!report.preceq[y][x], "no backward connections exist");
    assert_eq!(report.ball_escape_consistent, Some(true));
    // growth data really grew
    let g = &report.growth[x][y];
    assert!(g.windows(2).all(|w| w[0] < w[1]), "growth {g:?}");
}

#[test]
fn detour_family_envelope_is_constant() {
    // the unit rungs give escaping paths of length 1 at every slack: the
    // envelope witnesses non-proper divergence
    let real = FamilySpec::Ex7_4.realize(6).unwrap();
    let d = &real.digraph;
    let pairs = FamilySpec::Ex7_4.divergence_pairs(&real);
    let (_, base, p1, p2) = &pairs[0];
    let mut configs = Vec::new();
    for mark in 0..=p1.len().min(6) {
        configs.push(DivergenceConfig::new(d, *base, p1.clone(), p2.clone(), mark, 0).unwrap());
    }
    let grid: Vec<u64> = (0..=4).collect();
    let envelope = empirical_divergence(d, &configs, &grid, Fin(2));
    for (r, len) in &envelope.envelope {
        assert_eq!(*len, Fin(1), "envelope at r={r} should be the unit rung");
    }
    // witness structure: escaping paths start on P1, end on P2, avoid balls
    for cfg in &configs {
        let w = semihyp::divergence::divergence_witness(d, cfg);
        if let Some(path) = &w.path {
            assert!(witness_path_is_valid(d, cfg, path));
        }
    }
}

#[test]
fn tree_family_envelope_is_vacuous() {
    // in the oriented tree no side-to-side path escapes the deleted balls,
    // so every envelope entry is infinite, above any exponential bound
    let real = FamilySpec::Ex13_4Tree.realize(6).unwrap();
    let d = &real.digraph;
    let mut configs = Vec::new();
    for (_, base, p1, p2) in FamilySpec::Ex13_4Tree.divergence_pairs(&real) {
        if p1.first() == p2.first() && p1.vertex(1) == p2.vertex(1) {
            // same first edge: the branch pair shares x0 -> x0c
            for mark in 1..=p1.len().min(5) {
                configs
                    .push(DivergenceConfig::new(d, base, p1.clone(), p2.clone(), mark, 0).unwrap());
            }
        }
    }
    assert!(!configs.is_empty());
    let grid: Vec<u64> = (0..=4).collect();
    let envelope = empirical_divergence(d, &configs, &grid, Fin(4));
    for (_, len) in &envelope.envelope {
        assert_eq!(*len, Inf);
    }
}

#[test]
fn extraction_from_the_monoid_zig() {
    // the zig ray a, ab, aab, ... yields the straight power geodesic with
    // small two-sided distance, finite-scale evidence of a shared class
    let ctx = RayContext::new(FamilySpec::cayley_square_ab(), 10).unwrap();
    let zig = ctx.ray_index("ab-zig").unwrap();
    let report = extract_geodesic_ray(&ctx, zig).unwrap();
    assert!(report.labels.len() >= 8, "extracted {:?}", report.labels);
    assert_eq!(report.labels[0], "a");
    assert_eq!(report.labels[1], "aa");
    assert!(report.kappa_out <= Fin(2), "kappa_out {}", report.kappa_out);
    assert!(report.kappa_in <= Fin(2), "kappa_in {}", report.kappa_in);
}

#[test]
fn quasiorder_transitivity_bound_on_builtins() {
    for (spec, n) in [
        (FamilySpec::Ex14_2, 16),
        (FamilySpec::Ex12_2, 16),
        (FamilySpec::NatLine, 12),
    ] {
        let ctx = RayContext::new(spec.clone(), n).unwrap();
        let witnesses = quasiorder_transitivity_check(&ctx, 4, 2)
            .unwrap_or_else(|e| panic!("{}: {e}", spec.name()));
        // reflexive chains alone already exercise the bound
        assert!(!witnesses.is_empty(), "{}", spec.name());
    }
}

#[test]
fn rho_diagnostic_never_identifies_distinct_classes() {
    // two-sided d -> 0 evidence (finite, growing
    // depth entries) must only ever point at one class. In the three-ray
    // family the evidence is strictly one-directional.
    let ctx = RayContext::new(FamilySpec::Ex14_2, 24).unwrap();
    let decay: Decay<Exact> = Decay::new(Exact::from_ratio(101, 100));
    let points = vec![
        RhoPoint::Ray("x".into()),
        RhoPoint::Ray("y-anti".into()),
        RhoPoint::Ray("z-anti".into()),
    ];
    let base = vec!["x0".to_string()];
    let shallow = rho_matrix(&ctx, &base, &points, &decay, decay.pow(2), (5, 10)).unwrap();
    let deep = rho_matrix(&ctx, &base, &points, &decay, decay.pow(2), (10, 20)).unwrap();
    let boundary = boundary_partition(&ctx, 2, &[0, 1, 2]).unwrap();
    let same_class = |i: usize, j: usize| {
        boundary
            .classes
            .iter()
            .any(|c| c.contains(&i) && c.contains(&j))
    };
    let rs = shallow.rho.as_ref().unwrap();
    let rd = deep.rho.as_ref().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let fwd = semihyp::boundary::zero_distance_evidence(&rs[i][j], &rd[i][j]);
            let bwd = semihyp::boundary::zero_distance_evidence(&rs[j][i], &rd[j][i]);
            if fwd && bwd {
                assert!(
                    same_class(i, j),
                    "two-sided evidence for distinct classes {i}, {j}"
                );
            }
        }
    }
}

#[test]
fn constants_on_a_measured_family() {
    // end to end: measure delta and profiles, evaluate every formula
    let real = FamilySpec::cayley_square_ab().realize(5).unwrap();
    let d = &real.digraph;
    let delta = DeltaScanner::new(d)
        .delta(TriangleKind::Thin, TriangleMode::All)
        .delta
        .expect_finite("delta");
    let f = BoundFn::from_profile(&bound_profile(d, Direction::Out, delta + 2));
    let g = BoundFn::from_profile(&bound_profile(d, Direction::In, delta + 2));
    let decay: Decay<Exact> = Decay::new(Exact::from_ratio(101, 100));
    let table = explicit_constants(delta, &f, &g, 2, Exact::from_u64(1), &decay).unwrap();
    let f1 = f.eval(delta + 1).unwrap();
    assert_eq!(
        table.composition_radius,
        Exact::from_u64(composition_radius(delta, f1))
    );
    assert_eq!(table.divergence_k, table.composition_radius);
    assert_eq!(
        table.four_point_radius,
        Exact::from_u64((2 * 2 + 5 * delta) + (2 * 2 + 2 * delta + 1) * f1)
    );
    assert_eq!(
        table.epsilon_prime,
        decay.pow(2 * composition_radius(delta, f1) as i64)
    );
}

#[test]
fn bridge_family_is_acyclic() {
    // every vertex is its own strongly connected component
    let real = FamilySpec::Ex12_2.realize(10).unwrap();
    let classes = real.digraph.scc();
    assert_eq!(classes.len(), real.digraph.vertex_count());
    assert!(classes.iter().all(|c| c.len() == 1));
}

#[test]
fn detour_walk_needs_gamma_plus_c_of_three() {
    // replacing the unit rung x1 -> y1 by the length-3 detour through x0 is
    // a (gamma, c)-quasi-geodesic exactly when 3 <= gamma + c
    use semihyp::walk::is_quasi_geodesic;
    use semihyp::Rational;
    let real = FamilySpec::Ex7_4.realize(3).unwrap();
    let d = &real.digraph;
    let verts: Vec<usize> = ["x1", "x0", "y0", "y1"]
        .iter()
        .map(|l| real.expect_vertex(l))
        .collect();
    let detour = semihyp::DirectedWalk::from_vertices(d, verts).unwrap();
    let r = |v: i64| Rational::from_integer(v);
    assert!(is_quasi_geodesic(d, &detour, r(2), r(1)));
    assert!(is_quasi_geodesic(d, &detour, r(1), r(2)));
    assert!(!is_quasi_geodesic(d, &detour, r(1), r(1)));
    assert!(!is_quasi_geodesic(d, &detour, r(2), r(0)));
}

#[test]
fn witness_profiles_match_the_bridges() {
    use semihyp::boundary::estimate_m_profile;
    let ctx = RayContext::new(FamilySpec::Ex12_2, 20).unwrap();
    let v = ctx.ray_index("v").unwrap();
    let x = ctx.ray_index("x-anti").unwrap();
    for entry in estimate_m_profile(&ctx, v, x, &[0, 1, 2, 3]).unwrap() {
        assert_eq!(entry.m, Fin(2), "r={}", entry.r);
    }
    for entry in estimate_m_profile(&ctx, v, v, &[0, 1, 2, 3]).unwrap() {
        assert_eq!(entry.m, Fin(0), "r={}", entry.r);
    }
}

#[test]
fn one_way_line_has_one_end() {
    let report = ends_partition(&FamilySpec::NatLine, 16).unwrap();
    assert_eq!(report.classes.len(), 1);
}

#[test]
fn extracting_from_a_geodesic_ray_returns_it() {
    let ctx = RayContext::new(FamilySpec::NatLine, 10).unwrap();
    let x = ctx.ray_index("x").unwrap();
    let report = extract_geodesic_ray(&ctx, x).unwrap();
    let expected: Vec<String> = (0..=10).map(|i| format!("x{i}")).collect();
    assert_eq!(report.labels, expected);
    assert_eq!(report.kappa_out, Fin(0));
    assert_eq!(report.kappa_in, Fin(0));
}

#[test]
fn rho_vertex_points_and_ray_diagonal() {
    // a geodesic through the base has depth 0, so rho = 0 and rho_eps = 1;
    // the same-class diagonal grows with the window (the liminf-infinity
    // surrogate at finite scale)
    let ctx = RayContext::new(FamilySpec::NatLine, 12).unwrap();
    let decay: Decay<Exact> = Decay::new(Exact::from_ratio(3, 2));
    let points = vec![
        RhoPoint::Vertex("x0".into()),
        RhoPoint::Vertex("x4".into()),
        RhoPoint::Ray("x".into()),
    ];
    let base = vec!["x2".to_string()];
    let shallow = rho_matrix(&ctx, &base, &points, &decay, decay.pow(2), (3, 6)).unwrap();
    let rho = shallow.rho.as_ref().unwrap();
    assert_eq!(rho[0][1], Fin(0), "the x0-x4 geodesic passes the base");
    assert_eq!(shallow.rho_eps[0][1], Exact::from_u64(1));
    assert_eq!(rho[1][0], Inf, "no backward connection");
    let deep = rho_matrix(&ctx, &base, &points, &decay, decay.pow(2), (6, 12)).unwrap();
    let (s, d) = (
        shallow.rho.as_ref().unwrap()[2][2],
        deep.rho.as_ref().unwrap()[2][2],
    );
    assert!(matches!((s, d), (Fin(a), Fin(b)) if b > a), "{s} -> {d}");
    assert!(
        !shallow.stable[2][2],
        "growing entries must be flagged unstable"
    );
}

#[test]
fn ends_growth_is_monotone_in_truncation() {
    let mut last = 0;
    for n in [6u64, 12, 20] {
        let ctx = RayContext::new(FamilySpec::Ex12_2, n).unwrap();
        let v = ctx.ray_index("v").unwrap();
        let x = ctx.ray_index("x-anti").unwrap();
        let c = disjoint_paths(ctx.digraph(), &ctx.realized[v], &ctx.realized[x]);
        assert!(c >= last);
        last = c;
    }
    assert!(last >= 3);
}

#[test]
fn rho_runs_in_float_mode_too() {
    // the same machinery over f64 with base e^epsilon
    let ctx = RayContext::new(FamilySpec::Ex14_2, 20).unwrap();
    let decay = Decay::from_epsilon(0.05);
    let points = vec![RhoPoint::Ray("x".into()), RhoPoint::Ray("y-anti".into())];
    let base = vec!["x0".to_string()];
    let m = rho_matrix(&ctx, &base, &points, &decay, decay.pow(2), (4, 8)).unwrap();
    let d = m.chain_distance();
    assert!(d[0][1] > 0.0 && d[0][1] < 1.0);
    assert!((d[0][1] - (-0.05f64 * 4.0).exp()).abs() < 1e-9);
    assert!(semihyp::rho::chain_is_pseudo_semimetric(&d));
}

#[test]
fn measured_kappa_stays_under_the_explicit_radius() {
    // the explicit stability radius evaluated at the measured (1, 0) kappa
    // dominates the measured defect of the wider class; reported, and on
    // this instance it holds outright
    use semihyp::stability::{stability_defect, stability_lambda, StabilityCaps};
    use semihyp::Rational;
    let diamond = semihyp::Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    let caps = StabilityCaps::default();
    let one = Rational::from_integer(1);
    let base = stability_defect(&diamond, 0, 3, one, Rational::from_integer(0), &caps).unwrap();
    let kappa = base.kappa_out.max(base.kappa_in).expect_finite("kappa");
    let delta = DeltaScanner::new(&diamond)
        .delta(TriangleKind::Thin, TriangleMode::All)
        .delta
        .expect_finite("delta");
    let f = bound_profile(&diamond, Direction::Out, delta + 1);
    let gamma = Rational::from_integer(2);
    let c = Rational::from_integer(1);
    let lambda = stability_lambda(
        delta,
        f.value(delta).unwrap(),
        f.value(delta + 1).unwrap(),
        gamma,
        c,
        kappa,
    );
    let wide = stability_defect(&diamond, 0, 3, gamma, c, &caps).unwrap();
    let measured = wide.kappa_out.max(wide.kappa_in).expect_finite("kappa");
    assert!(
        Rational::from_integer(measured as i64) <= lambda,
        "measured {measured} vs lambda {lambda}"
    );
}
