//! Command-line front end: digraph analyses, boundary reports, divergence
//! and stability measurements, quasi-isometry checks, family export and the
//! verification suite. JSON is the canonical output; TSV is a projection.
//! Same config and seed give byte-identical reports.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use semihyp::boundary::{refinement_map, rho_matrix, RayContext, RhoPoint};
use semihyp::digraph::{Digraph, Direction};
use semihyp::divergence::{check_divergence_bound, empirical_divergence, DivergenceConfig};
use semihyp::families::{FamilySpec, MulTable, DEFAULT_REWRITE_BUDGET};
use semihyp::hyperbolicity::{
    bound_profile, composition_radius, explicit_constants, is_zero_hyperbolic, BoundFn,
    DeltaReport, DeltaScanner, TriangleKind, TriangleMode,
};
use semihyp::rewrite::{Presentation, PresentationKind};
use semihyp::rho::verify_chain_inequality;
use semihyp::scalar::Decay;
use semihyp::stability::{qi_check, stability_defect, StabilityCaps};
use semihyp::verification::{run_all, run_criterion};
use semihyp::walk::DirectedWalk;
use semihyp::{ExtNat, Fin, Rational, Scalar};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "semihyp",
    about = "Hyperbolicity geometry of finite digraphs and growing truncations",
    version
)]
struct Cli {
    /// Output format; JSON is canonical, TSV a projection.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized suite.
    #[arg(long, global = true, default_value_t = 0x5EED_2026)]
    seed: u64,
    /// Worker threads (default: SEMIHYP_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Tsv,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Edge-list file ("n m" header, then "u v" lines).
    #[arg(long, conflicts_with = "family")]
    input: Option<String>,
    /// Builtin family name (see `semihyp family --list`).
    #[arg(long)]
    family: Option<String>,
    /// Truncation radius for families.
    #[arg(long, default_value_t = 6)]
    n: u64,
    /// Family parameters as k=v (e.g. --param k=3 for free_monoid).
    #[arg(long = "param")]
    params: Vec<String>,
    /// Presentation for --family cayley: builtin name (ex16_5) or a file.
    #[arg(long)]
    presentation: Option<String>,
    /// Generating set for cayley families, comma separated words (e.g. a,b,ab).
    #[arg(long)]
    gens: Option<String>,
    /// Multiplication table file for --family cayley_table.
    #[arg(long)]
    table: Option<String>,
    /// Presentation kind for files.
    #[arg(long, value_enum, default_value_t = KindArg::Monoid)]
    kind: KindArg,
    /// Rewrite step budget per word.
    #[arg(long, default_value_t = DEFAULT_REWRITE_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Monoid,
    Semigroup,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distances, thin/slim delta, walk uniqueness, ball profiles, constants.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Ball profile radius.
        #[arg(long, default_value_t = 6)]
        r_max: u64,
        /// Parameter M for the four-point control radius.
        #[arg(long, default_value_t = 2)]
        m_param: u64,
        /// Exact decay base p/q (> 1) standing in for e^epsilon.
        #[arg(long, default_value = "101/100")]
        decay_base: String,
    },
    /// Boundary classes, ends, refinement and the rho / chain-distance matrix.
    Boundary {
        #[command(flatten)]
        input: InputArgs,
        /// Witness length cap for the quasiorder.
        #[arg(long, default_value_t = 4)]
        m_cap: u64,
        /// Largest ball radius probed (grid 0..=r_probe).
        #[arg(long, default_value_t = 3)]
        r_probe: u64,
        /// Base vertex labels for the rho matrix (repeatable).
        #[arg(long = "base")]
        base: Vec<String>,
        /// Tail window lo,hi for the liminf surrogate; auto = (n/4, n/2).
        #[arg(long, default_value = "auto")]
        window: String,
        /// Exact decay base p/q.
        #[arg(long, default_value = "101/100")]
        decay_base: String,
    },
    /// Divergence gaps, escaping paths and the exponential bound check.
    Diverge {
        #[command(flatten)]
        input: InputArgs,
        /// Ball slack grid 0..=r_grid.
        #[arg(long, default_value_t = 6)]
        r_grid: u64,
        /// Gap threshold; defaults to the measured e(0).
        #[arg(long)]
        threshold: Option<u64>,
        /// Explicit probe for --input mode: base label plus P1/P2 walks.
        #[arg(long)]
        base_point: Option<String>,
        /// Space-separated vertex labels of the first geodesic.
        #[arg(long)]
        p1: Option<String>,
        /// Space-separated vertex labels of the second geodesic.
        #[arg(long)]
        p2: Option<String>,
    },
    /// Worst quasi-geodesic separation between two vertices.
    Stability {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Check every reachable pair instead of one.
        #[arg(long, default_value_t = false)]
        all_pairs: bool,
        #[arg(long, default_value = "2")]
        gamma: String,
        #[arg(long, default_value = "1")]
        c: String,
        /// Candidate cap; reports exhaustive=false when hit.
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        /// Also admit non-simple walks.
        #[arg(long, default_value_t = false)]
        nonsimple: bool,
    },
    /// Quasi-isometry check for a vertex map between two digraphs.
    Qi {
        /// First digraph (edge-list file).
        #[arg(long)]
        input1: String,
        /// Second digraph (edge-list file).
        #[arg(long)]
        input2: String,
        /// Two-column "u v" map file; defaults to the identity.
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value = "2")]
        gamma: String,
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// List the family catalog or export a truncation as an edge list.
    Family {
        #[command(flatten)]
        input: InputArgs,
        /// Print the catalog instead of exporting.
        #[arg(long, default_value_t = false)]
        list: bool,
    },
    /// Run the acceptance criteria; exit 1 if any fails.
    Verify {
        /// Run a single criterion (e.g. AC3).
        #[arg(long)]
        criterion: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("SEMIHYP_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[derive(Serialize)]
struct RunConfig {
    command: String,
    format: Format,
    seed: u64,
    args: BTreeMap<String, String>,
}

fn config(command: &str, cli_format: Format, seed: u64, args: &[(&str, String)]) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        format: cli_format,
        seed,
        args: args
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse()?, d.trim().parse()?),
        None => (s.trim().parse()?, 1i64),
    };
    if den == 0 {
        bail!("zero denominator in {s:?}");
    }
    Ok(Rational::new(num, den))
}

fn parse_exact(s: &str) -> Result<BigRational> {
    let r = parse_rational(s)?;
    Ok(BigRational::from_ratio(*r.numer(), *r.denom()))
}

fn load_spec(input: &InputArgs) -> Result<FamilySpec> {
    let name = input
        .family
        .as_deref()
        .ok_or_else(|| anyhow!("this command needs --family"))?;
    let mut params = BTreeMap::new();
    for p in &input.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| anyhow!("--param expects k=v, got {p:?}"))?;
        params.insert(k.to_string(), v.parse::<i64>()?);
    }
    let kind = match input.kind {
        KindArg::Monoid => PresentationKind::Monoid,
        KindArg::Semigroup => PresentationKind::Semigroup,
    };
    if name == "cayley" {
        let presentation = match input.presentation.as_deref() {
            None | Some("ex16_5") => Presentation::square_commuting_monoid(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading presentation {path}"))?;
                Presentation::parse(&text, kind)?
            }
        };
        let generating_set = match input.gens.as_deref() {
            None => (0..presentation.generators.len() as u16)
                .map(|g| vec![g])
                .collect(),
            Some(list) => list
                .split(',')
                .map(|word| {
                    word.trim()
                        .chars()
                        .map(|ch| {
                            presentation
                                .generators
                                .iter()
                                .position(|g| g == &ch.to_string())
                                .map(|i| i as u16)
                                .ok_or_else(|| anyhow!("unknown generator {ch:?}"))
                        })
                        .collect::<Result<Vec<u16>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        };
        return Ok(FamilySpec::Cayley {
            presentation,
            generating_set,
            rewrite_budget: input.budget,
        });
    }
    if name == "cayley_table" {
        let table = match input.table.as_deref() {
            None => MulTable::z3(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading table {path}"))?;
                MulTable::parse(&text, kind)?
            }
        };
        return Ok(FamilySpec::CayleyTable { table });
    }
    Ok(FamilySpec::by_name(name, &params)?)
}

/// Digraph from --input or a realized family; labels travel along.
fn load_digraph(input: &InputArgs) -> Result<(Digraph, String)> {
    if let Some(path) = &input.input {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let d = Digraph::parse(&text)?;
        return Ok((d, format!("file:{path}")));
    }
    let spec = load_spec(input)?;
    let real = spec.realize(input.n)?;
    Ok((real.digraph, format!("{}@{}", spec.name(), input.n)))
}

fn resolve_vertex(d: &Digraph, token: &str) -> Result<usize> {
    if let Some(v) = d.vertex_by_label(token) {
        return Ok(v);
    }
    let v: usize = token
        .parse()
        .map_err(|_| anyhow!("unknown vertex {token:?}"))?;
    if v >= d.vertex_count() {
        bail!("vertex index {v} out of range");
    }
    Ok(v)
}

fn emit<T: Serialize>(format: Format, report: &T, tsv: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
        Format::Tsv => print!("{}", tsv()),
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeReport {
    config: RunConfig,
    source: String,
    vertices: usize,
    edges: usize,
    scc_count: usize,
    zero_hyperbolic: bool,
    zero_hyperbolic_witness: Option<(String, String)>,
    delta_thin_all: DeltaLine,
    delta_thin_transitive: DeltaLine,
    delta_slim_all: DeltaLine,
    profile_out: Vec<ExtNat>,
    profile_in: Vec<ExtNat>,
    /// In-profile consistency with the relation f(r + delta) + r + delta + 1
    /// derived from the out-profile; reported per radius, never asserted.
    slim_profile_relation_flags: Vec<bool>,
    constants: Option<semihyp::ConstantTableExact>,
    constants_error: Option<String>,
}

#[derive(Serialize)]
struct DeltaLine {
    delta: ExtNat,
    exhaustive: bool,
    witness_triple: Option<(String, String, String)>,
    witness_pattern: Option<Vec<(String, String)>>,
    witness_sides: Option<Vec<String>>,
}

fn delta_line(d: &Digraph, report: &DeltaReport) -> DeltaLine {
    let name = |v: usize| d.vertex_name(v);
    match &report.witness {
        None => DeltaLine {
            delta: report.delta,
            exhaustive: report.exhaustive,
            witness_triple: None,
            witness_pattern: None,
            witness_sides: None,
        },
        Some(w) => DeltaLine {
            delta: report.delta,
            exhaustive: report.exhaustive,
            witness_triple: Some((
                name(w.endpoints.0),
                name(w.endpoints.1),
                name(w.endpoints.2),
            )),
            witness_pattern: Some(w.pattern.iter().map(|&(a, b)| (name(a), name(b))).collect()),
            witness_sides: Some(w.sides.iter().map(|s| s.display(d)).collect()),
        },
    }
}

fn cmd_analyze(
    cli_format: Format,
    seed: u64,
    input: InputArgs,
    r_max: u64,
    m_param: u64,
    decay_base: String,
) -> Result<ExitCode> {
    let (d, source) = load_digraph(&input)?;
    let scanner = DeltaScanner::new(&d);
    let thin_all = scanner.delta(TriangleKind::Thin, TriangleMode::All);
    let thin_trans = scanner.delta(TriangleKind::Thin, TriangleMode::Transitive);
    let slim_all = scanner.delta(TriangleKind::Slim, TriangleMode::All);
    let zero = is_zero_hyperbolic(&d);
    let profile_r = r_max.max(match thin_all.delta {
        Fin(v) => v + 2,
        _ => r_max,
    });
    let out = bound_profile(&d, Direction::Out, profile_r);
    let inn = bound_profile(&d, Direction::In, profile_r);
    let (constants, constants_error) = match thin_all.delta {
        Fin(delta) => {
            let f = BoundFn::from_profile(&out);
            let g = BoundFn::from_profile(&inn);
            let decay: Decay<BigRational> = Decay::new(parse_exact(&decay_base)?);
            match explicit_constants(delta, &f, &g, m_param, BigRational::from_u64(1), &decay) {
                Ok(t) => (Some(t), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        _ => (None, Some("delta is infinite".to_string())),
    };
    let slim_flags: Vec<bool> = match thin_all.delta {
        Fin(delta) => (0..=r_max.min(out.r_max().saturating_sub(delta)))
            .map(|r| {
                let bound = out.value(r + delta).unwrap_or(u64::MAX) + r + delta + 1;
                inn.value(r).map(|v| v <= bound).unwrap_or(false)
            })
            .collect(),
        _ => Vec::new(),
    };
    let report = AnalyzeReport {
        config: config(
            "analyze",
            cli_format,
            seed,
            &[
                ("source", source.clone()),
                ("r_max", r_max.to_string()),
                ("m_param", m_param.to_string()),
                ("decay_base", decay_base),
            ],
        ),
        source,
        vertices: d.vertex_count(),
        edges: d.edge_count(),
        scc_count: d.scc().len(),
        zero_hyperbolic: zero.zero_hyperbolic,
        zero_hyperbolic_witness: zero.witness.map(|(a, b)| (a.display(&d), b.display(&d))),
        delta_thin_all: delta_line(&d, &thin_all),
        delta_thin_transitive: delta_line(&d, &thin_trans),
        delta_slim_all: delta_line(&d, &slim_all),
        profile_out: out.values.clone(),
        profile_in: inn.values.clone(),
        slim_profile_relation_flags: slim_flags,
        constants,
        constants_error,
    };
    emit(cli_format, &report, || {
        let mut s = String::new();
        let _ = writeln!(s, "vertices\t{}", report.vertices);
        let _ = writeln!(s, "edges\t{}", report.edges);
        let _ = writeln!(s, "scc_count\t{}", report.scc_count);
        let _ = writeln!(s, "zero_hyperbolic\t{}", report.zero_hyperbolic);
        let _ = writeln!(s, "delta_thin_all\t{}", report.delta_thin_all.delta);
        let _ = writeln!(
            s,
            "delta_thin_transitive\t{}",
            report.delta_thin_transitive.delta
        );
        let _ = writeln!(s, "delta_slim_all\t{}", report.delta_slim_all.delta);
        for (r, v) in report.profile_out.iter().enumerate() {
            let _ = writeln!(s, "profile_out_{r}\t{v}");
        }
        for (r, v) in report.profile_in.iter().enumerate() {
            let _ = writeln!(s, "profile_in_{r}\t{v}");
        }
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BoundaryCmdReport {
    config: RunConfig,
    refinement: semihyp::boundary::RefinementReport,
    rho: Option<semihyp::RhoMatrixExact>,
    chain_distance: Option<Vec<Vec<String>>>,
    chain_check: Option<semihyp::rho::ChainInequalityReport>,
    rho_error: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_boundary(
    cli_format: Format,
    seed: u64,
    input: InputArgs,
    m_cap: u64,
    r_probe: u64,
    base: Vec<String>,
    window: String,
    decay_base: String,
) -> Result<ExitCode> {
    let spec = load_spec(&input)?;
    let grid: Vec<u64> = (0..=r_probe).collect();
    let refinement = refinement_map(&spec, input.n, m_cap, &grid)?;
    let ctx = RayContext::new(spec.clone(), input.n)?;
    let window_pair: (u64, u64) = if window == "auto" {
        ((input.n / 4).max(1), (input.n / 2).max(2))
    } else {
        let (lo, hi) = window
            .split_once(',')
            .ok_or_else(|| anyhow!("--window expects lo,hi"))?;
        (lo.trim().parse()?, hi.trim().parse()?)
    };
    let base_labels = if base.is_empty() {
        let guess = ["x0", "1", "e", "v0"]
            .iter()
            .find(|l| ctx.real.vertex(l).is_some())
            .ok_or_else(|| anyhow!("no default base vertex; pass --base"))?;
        vec![guess.to_string()]
    } else {
        base
    };
    let points: Vec<RhoPoint> = ctx
        .rays
        .iter()
        .map(|r| RhoPoint::Ray(r.name.clone()))
        .collect();
    let decay: Decay<BigRational> = Decay::new(parse_exact(&decay_base)?);
    let scanner = DeltaScanner::new(ctx.digraph());
    let delta = scanner.delta(TriangleKind::Thin, TriangleMode::All).delta;
    let eps_prime = match delta {
        Fin(dv) => {
            let f = bound_profile(ctx.digraph(), Direction::Out, dv + 2);
            decay.epsilon_prime(composition_radius(dv, f.value(dv + 1).unwrap()))
        }
        _ => decay.pow(2),
    };
    let (rho, chain_distance, chain_check, rho_error) =
        match rho_matrix(&ctx, &base_labels, &points, &decay, eps_prime, window_pair) {
            Ok(m) => {
                let chain = m.chain_distance();
                let chain_str = chain
                    .iter()
                    .map(|row| row.iter().map(|v| v.to_string()).collect())
                    .collect();
                let check = verify_chain_inequality(&m);
                (Some(m), Some(chain_str), Some(check), None)
            }
            // a family without the requested base is a hard error; window
            // truncation issues degrade gracefully into the report
            Err(e @ semihyp::boundary::BoundaryError::NotABase { .. }) => {
                bail!("rho computation failed: {e}")
            }
            Err(e) => (None, None, None, Some(e.to_string())),
        };
    let report = BoundaryCmdReport {
        config: config(
            "boundary",
            cli_format,
            seed,
            &[
                ("family", spec.name().to_string()),
                ("n", input.n.to_string()),
                ("m_cap", m_cap.to_string()),
                ("r_probe", r_probe.to_string()),
                ("base", base_labels.join(",")),
                ("window", window),
                ("decay_base", decay_base),
            ],
        ),
        refinement,
        rho,
        chain_distance,
        chain_check,
        rho_error,
    };
    emit(cli_format, &report, || {
        let mut s = String::new();
        let b = &report.refinement.boundary;
        for (i, class) in b.classes.iter().enumerate() {
            let names: Vec<&str> = class.iter().map(|&r| b.ray_names[r].as_str()).collect();
            let _ = writeln!(s, "boundary_class_{i}\t{}", names.join(","));
        }
        for (i, class) in report.refinement.ends.classes.iter().enumerate() {
            let names: Vec<&str> = class
                .iter()
                .map(|&r| report.refinement.ends.ray_names[r].as_str())
                .collect();
            let _ = writeln!(s, "end_class_{i}\t{}", names.join(","));
        }
        let _ = writeln!(s, "refinement_total\t{}", report.refinement.total);
        let _ = writeln!(
            s,
            "refinement_straddle\t{}",
            report
                .refinement
                .straddle
                .map_or("none".to_string(), |c| c.to_string())
        );
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct DivergeReport {
    config: RunConfig,
    delta: ExtNat,
    k: u64,
    e0: u64,
    threshold: u64,
    pairs: Vec<String>,
    envelope: Vec<(u64, ExtNat)>,
    bound: semihyp::divergence::DivergenceBoundReport,
}

#[allow(clippy::too_many_arguments)]
fn cmd_diverge(
    cli_format: Format,
    seed: u64,
    input: InputArgs,
    r_grid: u64,
    threshold: Option<u64>,
    base_point: Option<String>,
    p1: Option<String>,
    p2: Option<String>,
) -> Result<ExitCode> {
    let (d, source, pairs) = if input.input.is_some() {
        let (d, source) = load_digraph(&input)?;
        let base =
            base_point.ok_or_else(|| anyhow!("--input mode needs --base-point/--p1/--p2"))?;
        let parse_walk = |s: &str| -> Result<DirectedWalk> {
            let verts = s
                .split_whitespace()
                .map(|t| resolve_vertex(&d, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(DirectedWalk::from_vertices(&d, verts)?)
        };
        let p1 = parse_walk(&p1.ok_or_else(|| anyhow!("missing --p1"))?)?;
        let p2 = parse_walk(&p2.ok_or_else(|| anyhow!("missing --p2"))?)?;
        let base = resolve_vertex(&d, &base)?;
        (d, source, vec![("cli".to_string(), base, p1, p2)])
    } else {
        let spec = load_spec(&input)?;
        let real = spec.realize(input.n)?;
        let pairs = spec.divergence_pairs(&real);
        if pairs.is_empty() {
            bail!("family {} designates no divergence pairs", spec.name());
        }
        let source = format!("{}@{}", spec.name(), input.n);
        (real.digraph, source, pairs)
    };
    let scanner = DeltaScanner::new(&d);
    let delta_ext = scanner.delta(TriangleKind::Thin, TriangleMode::All).delta;
    let delta = match delta_ext {
        Fin(v) => v,
        _ => bail!("delta is infinite; divergence constants undefined"),
    };
    let out = bound_profile(&d, Direction::Out, delta + 2);
    let inn = bound_profile(&d, Direction::In, delta + 2);
    let f_at = |r: u64| out.value(r).unwrap().max(inn.value(r).unwrap());
    let k = composition_radius(delta, f_at(delta + 1));
    let e0 = (2 * delta + 2) * f_at(delta + 1) + f_at(delta) + delta;
    let threshold = threshold.unwrap_or(e0);
    let mut configs = Vec::new();
    let mut names = Vec::new();
    for (name, base, w1, w2) in &pairs {
        names.push(name.clone());
        for mark in 0..=w1.len() {
            configs.push(DivergenceConfig::new(
                &d,
                *base,
                w1.clone(),
                w2.clone(),
                mark,
                0,
            )?);
        }
    }
    let grid: Vec<u64> = (0..=r_grid).collect();
    let envelope = empirical_divergence(&d, &configs, &grid, Fin(threshold));
    let bound = check_divergence_bound(&d, &configs, &grid, Fin(e0), delta, k);
    let report = DivergeReport {
        config: config(
            "diverge",
            cli_format,
            seed,
            &[
                ("source", source),
                ("r_grid", r_grid.to_string()),
                ("threshold", threshold.to_string()),
            ],
        ),
        delta: delta_ext,
        k,
        e0,
        threshold,
        pairs: names,
        envelope: envelope.envelope,
        bound,
    };
    emit(cli_format, &report, || {
        let mut s = String::new();
        let _ = writeln!(s, "delta\t{}", report.delta);
        let _ = writeln!(s, "k\t{}", report.k);
        let _ = writeln!(s, "e0\t{}", report.e0);
        for (r, v) in &report.envelope {
            let _ = writeln!(s, "envelope_{r}\t{v}");
        }
        let _ = writeln!(s, "bound_pass\t{}", report.bound.pass);
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct StabilityLine {
    from: String,
    to: String,
    kappa_out: ExtNat,
    kappa_in: ExtNat,
    candidates: usize,
    exhaustive: bool,
}

#[derive(Serialize)]
struct StabilityCmdReport {
    config: RunConfig,
    gamma: String,
    c: String,
    lines: Vec<StabilityLine>,
    worst_kappa: ExtNat,
}

#[allow(clippy::too_many_arguments)]
fn cmd_stability(
    cli_format: Format,
    seed: u64,
    input: InputArgs,
    from: Option<String>,
    to: Option<String>,
    all_pairs: bool,
    gamma: String,
    c: String,
    cap: usize,
    nonsimple: bool,
) -> Result<ExitCode> {
    let (d, source) = load_digraph(&input)?;
    let g = parse_rational(&gamma)?;
    let cc = parse_rational(&c)?;
    let caps = StabilityCaps {
        max_candidates: cap,
        include_nonsimple: nonsimple,
    };
    let mut pairs = Vec::new();
    if all_pairs {
        for x in 0..d.vertex_count() {
            for y in 0..d.vertex_count() {
                if x != y && d.dist(x, y).is_finite() {
                    pairs.push((x, y));
                }
            }
        }
    } else {
        let from = resolve_vertex(&d, &from.ok_or_else(|| anyhow!("missing --from"))?)?;
        let to = resolve_vertex(&d, &to.ok_or_else(|| anyhow!("missing --to"))?)?;
        pairs.push((from, to));
    }
    let mut lines = Vec::new();
    let mut worst = Fin(0);
    for (x, y) in pairs {
        let r = stability_defect(&d, x, y, g, cc, &caps)?;
        worst = worst.max(r.kappa_out).max(r.kappa_in);
        lines.push(StabilityLine {
            from: d.vertex_name(x),
            to: d.vertex_name(y),
            kappa_out: r.kappa_out,
            kappa_in: r.kappa_in,
            candidates: r.candidates,
            exhaustive: r.exhaustive,
        });
    }
    let report = StabilityCmdReport {
        config: config(
            "stability",
            cli_format,
            seed,
            &[
                ("source", source),
                ("gamma", gamma.clone()),
                ("c", c.clone()),
                ("cap", cap.to_string()),
                ("nonsimple", nonsimple.to_string()),
            ],
        ),
        gamma,
        c,
        lines,
        worst_kappa: worst,
    };
    emit(cli_format, &report, || {
        let mut s = String::from("from\tto\tkappa_out\tkappa_in\tcandidates\texhaustive\n");
        for l in &report.lines {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}",
                l.from, l.to, l.kappa_out, l.kappa_in, l.candidates, l.exhaustive
            );
        }
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct QiCmdReport {
    config: RunConfig,
    ok: bool,
    violations: Vec<String>,
}

fn cmd_qi(
    cli_format: Format,
    seed: u64,
    input1: String,
    input2: String,
    map: Option<String>,
    gamma: String,
    c: String,
) -> Result<ExitCode> {
    let d1 = Digraph::parse(&std::fs::read_to_string(&input1)?)?;
    let d2 = Digraph::parse(&std::fs::read_to_string(&input2)?)?;
    let mapping: Vec<usize> = match &map {
        None => {
            if d1.vertex_count() > d2.vertex_count() {
                bail!("identity map needs |V1| <= |V2|");
            }
            (0..d1.vertex_count()).collect()
        }
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let mut m = vec![usize::MAX; d1.vertex_count()];
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (u, v) = line
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| anyhow!("map line {} needs \"u v\"", i + 1))?;
                m[resolve_vertex(&d1, u.trim())?] = resolve_vertex(&d2, v.trim())?;
            }
            if m.contains(&usize::MAX) {
                bail!("map is not total on the first digraph");
            }
            m
        }
    };
    let r = qi_check(
        &mapping,
        &d1,
        &d2,
        parse_rational(&gamma)?,
        parse_rational(&c)?,
    );
    let report = QiCmdReport {
        config: config(
            "qi",
            cli_format,
            seed,
            &[
                ("input1", input1),
                ("input2", input2),
                ("map", map.unwrap_or_else(|| "identity".into())),
                ("gamma", gamma),
                ("c", c),
            ],
        ),
        ok: r.ok,
        violations: r.violations.iter().map(|v| format!("{v:?}")).collect(),
    };
    emit(cli_format, &report, || {
        let mut s = String::new();
        let _ = writeln!(s, "ok\t{}", report.ok);
        for v in &report.violations {
            let _ = writeln!(s, "violation\t{v}");
        }
        s
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_family(cli_format: Format, seed: u64, input: InputArgs, list: bool) -> Result<ExitCode> {
    if list {
        let catalog = semihyp::families::list_families();
        #[derive(Serialize)]
        struct CatalogReport {
            config: RunConfig,
            families: Vec<semihyp::families::FamilyInfo>,
        }
        let report = CatalogReport {
            config: config("family", cli_format, seed, &[("list", "true".into())]),
            families: catalog,
        };
        emit(cli_format, &report, || {
            let mut s = String::from("name\tparams\tlocally_finite\tfinitely_based\trays\tdoc\n");
            for f in &report.families {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    f.name,
                    f.params,
                    f.locally_finite,
                    f.finitely_based,
                    f.rays.join(","),
                    f.doc
                );
            }
            s
        })?;
        return Ok(ExitCode::SUCCESS);
    }
    let spec = load_spec(&input)?;
    let real = spec.realize(input.n)?;
    print!("{}", real.digraph.to_edge_list());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli_format: Format, seed: u64, criterion: Option<String>) -> Result<ExitCode> {
    let results = match &criterion {
        Some(id) => {
            vec![run_criterion(id, seed).ok_or_else(|| anyhow!("unknown criterion {id:?}"))?]
        }
        None => run_all(seed),
    };
    #[derive(Serialize)]
    struct VerifyReport {
        config: RunConfig,
        results: Vec<semihyp::verification::CriterionResult>,
        all_passed: bool,
    }
    let all_passed = results.iter().all(|r| r.passed);
    let report = VerifyReport {
        config: config(
            "verify",
            cli_format,
            seed,
            &[("criterion", criterion.unwrap_or_else(|| "all".to_string()))],
        ),
        results,
        all_passed,
    };
    match cli_format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Tsv => {
            for r in &report.results {
                println!(
                    "{}\t{}\t{}\t{}",
                    r.id,
                    if r.passed { "pass" } else { "FAIL" },
                    r.title,
                    r.details
                );
            }
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    let seed = cli.seed;
    match cli.command {
        Command::Analyze {
            input,
            r_max,
            m_param,
            decay_base,
        } => cmd_analyze(format, seed, input, r_max, m_param, decay_base),
        Command::Boundary {
            input,
            m_cap,
            r_probe,
            base,
            window,
            decay_base,
        } => cmd_boundary(
            format, seed, input, m_cap, r_probe, base, window, decay_base,
        ),
        Command::Diverge {
            input,
            r_grid,
            threshold,
            base_point,
            p1,
            p2,
        } => cmd_diverge(format, seed, input, r_grid, threshold, base_point, p1, p2),
        Command::Stability {
            input,
            from,
            to,
            all_pairs,
            gamma,
            c,
            cap,
            nonsimple,
        } => cmd_stability(
            format, seed, input, from, to, all_pairs, gamma, c, cap, nonsimple,
        ),
        Command::Qi {
            input1,
            input2,
            map,
            gamma,
            c,
        } => cmd_qi(format, seed, input1, input2, map, gamma, c),
        Command::Family { input, list } => cmd_family(format, seed, input, list),
        Command::Verify { criterion } => cmd_verify(format, seed, criterion),
    }
}
