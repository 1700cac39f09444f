//! Command-line front end: chromatic invariants, tilings, clique covers,
//! the bounds table, decomposition certificates, sink sets, and the
//! experiment harness.
//!
//! Exit codes: 0 success, 2 precondition violated, 3 budget exhausted,
//! 4 lemma-assertion failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use tilelab_core::bounds;
use tilelab_core::chromatic::{self, BottleSpec};
use tilelab_core::cover::{self, CoverMode};
use tilelab_core::decomp;
use tilelab_core::error::Error;
use tilelab_core::graph::Graph;
use tilelab_core::io as gio;
use tilelab_core::pipeline;
use tilelab_core::ratio::{format_rational, parse_rational, rat_usize, to_f64, Rational};
use tilelab_core::tiling;
use tilelab_core::transfer;

#[derive(Parser)]
#[command(name = "tilelab", version, about = "graph tiling laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Chromatic number, smallest color class, and critical chromatic number.
    Chromatic { graph: String },
    /// Maximum or greedy H-tiling.
    Tile(TileArgs),
    /// Maximal k-clique-cover (exact on n <= 12, else heuristic).
    Cover(CoverArgs),
    /// Parameter table for a bottle graph (exact rationals).
    Bounds(BoundsArgs),
    /// Run the decomposition algorithm on a cluster-system JSON file.
    Decompose { system: PathBuf },
    /// Greedy sink set of a digraph with the per-round ledger.
    Sinkset { digraph: PathBuf },
    /// Theorem experiments or pipeline runs from a key=value config file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct TileArgs {
    graph: String,
    #[arg(long)]
    pattern: String,
    #[arg(long, conflicts_with = "greedy")]
    exact: bool,
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 1 << 22)]
    budget: u64,
}

#[derive(Args)]
struct CoverArgs {
    graph: String,
    #[arg(short = 'k')]
    k: usize,
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 1 << 22)]
    budget: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(short = 'k')]
    k: usize,
    #[arg(long)]
    sigma: usize,
    #[arg(long)]
    omega: usize,
    #[arg(long, default_value = "1/10")]
    mu: String,
    #[arg(long, default_value = "1/1000")]
    d: String,
    #[arg(long, default_value = "1/10000")]
    eps: String,
}

#[derive(Args)]
struct ExperimentArgs {
    config: PathBuf,
    /// Exercise the extremal-case components (cascade, star rebalancing,
    /// copy matching) instead of the general toolpath.
    #[arg(long)]
    extremal: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, output) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            } else {
                println!("{output}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Loads a graph argument: a file path if one exists, else a builtin name
/// like `k3`, `c5`, `bottle3_1_2`, `petersen`.
fn load_graph(arg: &str) -> Result<Graph, Error> {
    let path = Path::new(arg);
    if path.exists() {
        return gio::read_graph(&fs::read_to_string(path)?);
    }
    gio::parse_graph_spec(arg)
}

fn run(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Command::Chromatic { graph } => cmd_chromatic(graph, cli.format),
        Command::Tile(args) => cmd_tile(args, cli.format, cli.seed),
        Command::Cover(args) => cmd_cover(args, cli.format),
        Command::Bounds(args) => cmd_bounds(args, cli.format),
        Command::Decompose { system } => cmd_decompose(system, cli.format),
        Command::Sinkset { digraph } => cmd_sinkset(digraph, cli.format),
        Command::Experiment(args) => cmd_experiment(args, cli.format, cli.seed),
    }
}

fn cmd_chromatic(spec: &str, format: Format) -> Result<String, Error> {
    let g = load_graph(spec)?;
    let profile = chromatic::smallest_color_class(&g)?;
    let chi_cr = chromatic::chi_critical(&g)?;
    match format {
        Format::Json => Ok(serde_json::json!({
            "n": g.n(),
            "m": g.edge_count(),
            "chi": profile.chi,
            "sigma": profile.sigma,
            "chi_critical": format_rational(&chi_cr),
            "optimal_class_size_multisets": profile.optimal_class_size_multisets,
        })
        .to_string()),
        Format::Csv => {
            let mut out = String::from("n,m,chi,sigma,chi_critical\n");
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                g.n(),
                g.edge_count(),
                profile.chi,
                profile.sigma,
                format_rational(&chi_cr)
            ));
            Ok(out)
        }
        Format::Text => Ok(format!(
            "n = {}  m = {}\nchi = {}\nsigma = {}\nchi_cr = {} (~{:.4})\noptimal class sizes: {:?}",
            g.n(),
            g.edge_count(),
            profile.chi,
            profile.sigma,
            format_rational(&chi_cr),
            to_f64(&chi_cr),
            profile.optimal_class_size_multisets,
        )),
    }
}

fn cmd_tile(args: &TileArgs, format: Format, seed: u64) -> Result<String, Error> {
    let g = load_graph(&args.graph)?;
    let h = load_graph(&args.pattern)?;
    let result = if args.greedy {
        tiling::greedy_tiling(&g, &h, seed)?
    } else {
        tiling::max_tiling(&g, &h, args.budget)?
    };
    match format {
        Format::Json => Ok(serde_json::json!({
            "copies": result.copies,
            "leftover": result.leftover,
            "optimal": result.optimal,
            "nodes_explored": result.nodes_explored,
        })
        .to_string()),
        Format::Csv => {
            let mut out = String::from("copy_index,vertices\n");
            for (i, c) in result.copies.iter().enumerate() {
                let verts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("{i},{}\n", verts.join(" ")));
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = format!(
                "{} copies, {} leftover, optimal: {}, nodes: {}\n",
                result.copies.len(),
                result.leftover.len(),
                result.optimal,
                result.nodes_explored
            );
            for c in &result.copies {
                out.push_str(&format!("  {c:?}\n"));
            }
            out.push_str(&format!("leftover: {:?}", result.leftover));
            Ok(out)
        }
    }
}

fn cmd_cover(args: &CoverArgs, format: Format) -> Result<String, Error> {
    let g = load_graph(&args.graph)?;
    let mode = if args.exact { CoverMode::Exact } else { CoverMode::Heuristic };
    let cover = cover::maximal_clique_cover(&g, args.k, mode, args.budget)?;
    match format {
        Format::Json => Ok(serde_json::json!({
            "k": cover.k,
            "signature": cover.signature(),
            "certified": cover.certified,
            "cliques": cover.all_cliques(),
        })
        .to_string()),
        _ => {
            let mut out = format!(
                "signature {:?} certified {}\n",
                cover.signature(),
                cover.certified
            );
            out.push_str(&cover.to_text());
            Ok(out)
        }
    }
}

fn cmd_bounds(args: &BoundsArgs, format: Format) -> Result<String, Error> {
    let spec = BottleSpec::new(args.k, args.sigma, args.omega)?;
    let mu = parse_rational(&args.mu)?;
    let d = parse_rational(&args.d)?;
    let eps = parse_rational(&args.eps)?;
    let gamma = spec.gamma();
    let mut rows: Vec<(String, String)> = vec![
        ("k".into(), args.k.to_string()),
        ("sigma".into(), args.sigma.to_string()),
        ("omega".into(), args.omega.to_string()),
        ("h".into(), spec.order().to_string()),
        ("alpha".into(), format_rational(&spec.alpha)),
        ("chi_cr".into(), format_rational(&spec.chi_cr)),
        ("gamma".into(), format_rational(&gamma)),
        ("mu".into(), format_rational(&mu)),
        ("d".into(), format_rational(&d)),
        ("eps".into(), format_rational(&eps)),
    ];
    if spec.is_balanced() {
        rows.push((
            "leftover_balanced".into(),
            bounds::leftover_constant(&spec, bounds::LeftoverCase::Balanced)?.to_string(),
        ));
    } else {
        let (ap, p, q) = bounds::alpha_prime(&spec.alpha, args.k, &mu)?;
        rows.push(("alpha_prime".into(), format_rational(&ap)));
        rows.push(("p".into(), p.to_string()));
        rows.push(("q".into(), q.to_string()));
        rows.push(("c_t".into(), bounds::typicality_threshold(&ap, args.k)?.to_string()));
        rows.push((
            "leftover_general".into(),
            bounds::leftover_constant(&spec, bounds::LeftoverCase::General)?.to_string(),
        ));
        let orders: Vec<usize> = (1..args.k).collect();
        match decomp::minimal_valid_l(args.k, &spec.alpha, &mu, &orders) {
            Ok(l) => rows.push(("minimal_valid_L".into(), l.to_string())),
            Err(e) => rows.push(("minimal_valid_L".into(), format!("unavailable: {e}"))),
        }
    }
    rows.push((
        "ore_threshold_coeff".into(),
        format_rational(&chromatic::ore_threshold_from(&spec.chi_cr, 1)),
    ));
    match format {
        Format::Json => {
            let map: BTreeMap<String, String> = rows.into_iter().collect();
            Ok(serde_json::to_string_pretty(&map).expect("string map serializes"))
        }
        Format::Csv => {
            let mut out = String::from("parameter,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{k},{v}\n"));
            }
            Ok(out)
        }
        Format::Text => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            Ok(rows
                .into_iter()
                .map(|(k, v)| format!("{k:width$}  {v}"))
                .collect::<Vec<_>>()
                .join("\n"))
        }
    }
}

fn cmd_decompose(path: &Path, format: Format) -> Result<String, Error> {
    let text = fs::read_to_string(path)?;
    let input: DecomposeInput =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("system json: {e}")))?;
    let alpha = parse_rational(&input.alpha)?;
    let mu = parse_rational(&input.mu)?;
    let cert = decomp::run_decomposition(&input.system, &alpha, &mu)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&cert).expect("certificate serializes")),
        _ => {
            let mut out = format!(
                "L = {}  L' = {}  L1 = {}  alpha' = {}  tiles = {}  residue = {}\n",
                cert.l,
                cert.l_prime,
                cert.l1,
                format_rational(&cert.alpha_prime),
                cert.final_tile_count,
                cert.residue
            );
            for e in &cert.ledger {
                out.push_str(&format!(
                    "  step {}: {} (consumed {}, produced {})\n",
                    e.step, e.what, e.consumed, e.produced
                ));
            }
            Ok(out)
        }
    }
}

#[derive(serde::Deserialize)]
struct DecomposeInput {
    alpha: String,
    mu: String,
    #[serde(flatten)]
    system: decomp::ClusterSystem,
}

fn cmd_sinkset(path: &Path, format: Format) -> Result<String, Error> {
    let d = gio::read_digraph(&fs::read_to_string(path)?)?;
    let ss = transfer::sink_set_greedy(&d)?;
    match format {
        Format::Json => Ok(serde_json::json!({
            "n": d.n(),
            "min_out_degree": d.min_out_degree(),
            "sinks": ss.sinks,
            "rounds": ss.rounds.iter().map(|r| {
                serde_json::json!({"chosen": r.chosen, "removed": r.removed})
            }).collect::<Vec<_>>(),
        })
        .to_string()),
        _ => {
            let mut out = format!(
                "n = {}, min out-degree = {}, sink set size = {}\n",
                d.n(),
                d.min_out_degree(),
                ss.sinks.len()
            );
            for r in &ss.rounds {
                out.push_str(&format!("  chose {} removing {}\n", r.chosen, r.removed));
            }
            Ok(out)
        }
    }
}

/// key = value lines, # comments.
fn parse_config(text: &str) -> Result<BTreeMap<String, String>, Error> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key = value, got {line:?}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn cfg_get<'a>(cfg: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str, Error> {
    cfg.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Parse(format!("config key {key:?} missing")))
}

fn parse_num(cfg: &BTreeMap<String, String>, key: &str) -> Result<usize, Error> {
    cfg_get(cfg, key)?
        .parse()
        .map_err(|_| Error::Parse(format!("config key {key:?} is not an integer")))
}

fn cmd_experiment(args: &ExperimentArgs, format: Format, seed: u64) -> Result<String, Error> {
    let cfg = parse_config(&fs::read_to_string(&args.config)?)?;
    if args.extremal {
        return cmd_extremal(&cfg, seed);
    }
    let mode = cfg.get("mode").map(String::as_str).unwrap_or("experiment");
    match mode {
        "pipeline" => {
            let k: usize = parse_num(&cfg, "k")?;
            let sigma: usize = parse_num(&cfg, "sigma")?;
            let omega: usize = parse_num(&cfg, "omega")?;
            let elements: usize = parse_num(&cfg, "elements")?;
            let l: usize = parse_num(&cfg, "cluster_size")?;
            let runs: usize = cfg
                .get("runs")
                .map_or(Ok(1), |s| s.parse().map_err(|_| Error::Parse("bad runs".into())))?;
            let spec = BottleSpec::new(k, sigma, omega)?;
            let config = pipeline::PipelineConfig::defaults_for(&spec);
            let mut reports = Vec::new();
            for r in 0..runs {
                reports.push(pipeline::run_pipeline(
                    &spec,
                    elements,
                    l,
                    &config,
                    seed.wrapping_add(r as u64),
                )?);
            }
            match format {
                Format::Csv => {
                    let mut out = String::from(
                        "seed,n,v0,copies,total_leftover,leftover_bound,min_availability\n",
                    );
                    for r in &reports {
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            r.seed,
                            r.n,
                            r.v0,
                            r.copies,
                            r.total_leftover,
                            r.leftover_bound,
                            r.phase1_min_availability
                        ));
                    }
                    Ok(out)
                }
                _ => Ok(serde_json::to_string_pretty(&reports).expect("reports serialize")),
            }
        }
        _ => {
            let pattern = load_graph(cfg_get(&cfg, "pattern")?)?;
            let n_grid: Vec<usize> = cfg_get(&cfg, "n_grid")?
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Parse("bad n_grid".into())))
                .collect::<Result<_, _>>()?;
            let trials: u32 = parse_num(&cfg, "trials")? as u32;
            let budget: u64 = cfg
                .get("budget")
                .map_or(Ok(1 << 22), |s| s.parse().map_err(|_| Error::Parse("bad budget".into())))?;
            let report = pipeline::run_theorem_experiment(&pattern, &n_grid, trials, seed, budget)?;
            match format {
                Format::Csv => {
                    let mut out = String::from(
                        "kind,n,trial,seed,ore_margin,leftover,leftover_bound,pass,optimal\n",
                    );
                    for r in &report.rows {
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{}\n",
                            r.kind,
                            r.n,
                            r.trial,
                            r.seed,
                            r.ore_margin,
                            r.leftover,
                            r.leftover_bound,
                            r.pass,
                            r.optimal
                        ));
                    }
                    Ok(out)
                }
                _ => Ok(serde_json::to_string_pretty(&report).expect("report serializes")),
            }
        }
    }
}

/// Extremal components demo: the cascade on an extremal-regime phi-vector,
/// the star rebalancing move, and copy matching under a predicate.
fn cmd_extremal(cfg: &BTreeMap<String, String>, seed: u64) -> Result<String, Error> {
    let k: usize = parse_num(cfg, "k").unwrap_or(3);
    let sigma: usize = parse_num(cfg, "sigma").unwrap_or(1);
    let omega: usize = parse_num(cfg, "omega").unwrap_or(2);
    let spec = BottleSpec::new(k, sigma, omega)?;
    let mut out = String::new();

    // cascade on an extremal-regime phi (s = 0)
    let gamma = spec.gamma();
    let phi_k = rat_usize(k - 1) * &gamma;
    let phi_k1 = (Rational::from_integer(1.into()) - rat_usize(k) * &phi_k) / rat_usize(k - 1);
    let mut vals = vec![Rational::from_integer(0.into()); k];
    vals[k - 1] = phi_k;
    vals[k - 2] = phi_k1;
    let phi = bounds::Phi::from_ascending(vals)?;
    let mu = parse_rational(cfg.get("mu").map(String::as_str).unwrap_or("1/100"))?;
    let eps = parse_rational(cfg.get("eps").map(String::as_str).unwrap_or("1/1000000"))?;
    let cascade = bounds::extremal_cascade(&phi, &spec.alpha, &mu, &eps)?;
    out.push_str(&format!(
        "cascade: t = {}, j0 = {}, alpha0 = {}, mu' = {}, eps' = {}\n",
        cascade.t,
        cascade.j0,
        format_rational(&cascade.alpha0),
        cascade.mu_prime,
        cascade.eps_prime
    ));

    // star rebalancing on a constructed oversized part
    let mut sizes = vec![12 * omega; k - 1];
    sizes.push(4 * omega);
    let mut g = Graph::complete_multipartite(&sizes)?;
    let parts = Graph::multipartite_parts(&sizes);
    let need = 2;
    for s in 0..need {
        let base = s * (omega + 1);
        for leaf in 1..=omega {
            g.add_edge(parts[0][base], parts[0][base + leaf]);
        }
    }
    let copies = pipeline::star_rebalance(&g, &spec, &parts[0], &parts[1..], need, seed)?;
    out.push_str(&format!("star rebalance: extracted {} copies\n", copies.len()));

    // copy matching demo under a simple predicate
    let left: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
    let right: Vec<Vec<usize>> = (0..4).map(|i| vec![i + 100]).collect();
    let m = tilelab_core::matching::match_copies(&left, &right, |l, r| r[0] - 100 >= l[0]);
    out.push_str(&format!(
        "copy matching: {} pairs, {} unmatched left\n",
        m.pairs.len(),
        m.unmatched_left.len()
    ));
    Ok(out)
}
