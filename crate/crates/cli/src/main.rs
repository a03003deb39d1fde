//! `qss`: graph generation, configuration scans, single searches and attacks, and the three
//! experiment drivers.
//!
//! Exit status is 0 on success, 2 on usage errors (bad flags, config file or values) and 1 on
//! runtime failures.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rand::Rng;
use serde::Serialize;

use qss_core::attack::{expected_runtime, optimize_measurement_time, run_attack};
use qss_core::ec::{find_ec_within_distance, EcKind, EcOrder};
use qss_core::experiment::{
    self, metadata_text, run_fig1, run_fig2, run_fig3, to_csv_bytes, ExperimentConfig,
    ExperimentKind, Fig2Row, DEFAULT_SEED,
};
use qss_core::generators::rng_from_seed;
use qss_core::sampling::sample_connected;
use qss_core::walk::probability_trace;
use qss_core::{Graph, StochasticMatrix};

#[derive(Debug, Parser)]
#[command(
    name = "qss",
    version,
    about = "Szegedy spatial search attack experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Graph model(s): er, ws, ba (comma separated for experiments).
    #[arg(long, global = true)]
    model: Option<String>,
    /// Single graph order.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Orders as start:stop:step (stop inclusive).
    #[arg(long, global = true)]
    n_grid: Option<String>,
    /// Graphs per grid point.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Measurement penalty: an integer or `log` for ceil(ln n).
    #[arg(long, global = true)]
    t_pen: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default from QSS_WORKERS, else all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// key=value file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Marked-vertex construction: phase-flip or absorbing.
    #[arg(long, global = true)]
    reflection: Option<String>,
    #[arg(long, global = true)]
    er_p: Option<f64>,
    #[arg(long, global = true)]
    ws_k: Option<usize>,
    #[arg(long, global = true)]
    ws_beta: Option<f64>,
    #[arg(long, global = true)]
    ba_m0: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one connected graph and write it as an edge list.
    Generate,
    /// List exceptional configurations containing a vertex.
    ScanEc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        vertex: usize,
        /// Orders to look for, e.g. 2, 3 or 23.
        #[arg(long, default_value = "23")]
        orders: String,
        /// Maximum distance of added vertices from `vertex`.
        #[arg(long, default_value_t = 2)]
        distance: usize,
    },
    /// Run a search: the probability trace up to `--t`, or the optimal measurement time.
    Search {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated marked vertices.
        #[arg(long)]
        marked: String,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Attack the single-vertex search on `--marked` with a random configuration containing it.
    Attack {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        marked: usize,
        #[arg(long, default_value = "23")]
        orders: String,
    },
    /// Configuration formation probabilities.
    Fig1 {
        /// Comma-separated `<orders>:<distance>` panels, e.g. 2:2,23:2,23:1.
        #[arg(long)]
        panels: Option<String>,
    },
    /// Attack and strong attack efficiency on random 2-vertex configurations.
    Fig2,
    /// Log-log runtime regressions of the reference, attacked and defended searches.
    Fig3 {
        /// Existing fig2 CSV to regress instead of running the attacks.
        #[arg(long)]
        from: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let kind = match cli.command {
        Command::Fig1 { .. } => ExperimentKind::Fig1,
        Command::Fig3 { .. } => ExperimentKind::Fig3,
        _ => ExperimentKind::Fig2,
    };
    let cfg = build_config(cli, kind)?;
    match &cli.command {
        Command::Generate => generate(&cfg),
        Command::ScanEc {
            input,
            vertex,
            orders,
            distance,
        } => scan_ec(&cfg, input, *vertex, orders, *distance),
        Command::Search { input, marked, t } => search(&cfg, input, marked, *t),
        Command::Attack {
            input,
            marked,
            orders,
        } => attack(&cfg, input, *marked, orders),
        Command::Fig1 { .. } => fig1(&cfg),
        Command::Fig2 => fig2(&cfg),
        Command::Fig3 { from } => fig3(&cfg, from.as_deref()),
    }
}

/// Defaults, then the config file, then flags.
fn build_config(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::defaults(kind);
    let mut seed_given = cli.seed.is_some();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let pairs = experiment::parse_key_values(&text).map_err(usage)?;
        seed_given |= pairs.iter().any(|(k, _)| k == "seed");
        for (k, v) in pairs {
            cfg.set(&k, &v).map_err(usage)?;
        }
    }
    let flags: [(&str, Option<String>); 13] = [
        ("models", cli.model.clone()),
        ("n", cli.n.map(|v| v.to_string())),
        ("n-grid", cli.n_grid.clone()),
        ("samples", cli.samples.map(|v| v.to_string())),
        ("seed", cli.seed.map(|v| v.to_string())),
        ("t-pen", cli.t_pen.clone()),
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("workers", cli.workers.map(|v| v.to_string())),
        ("reflection", cli.reflection.clone()),
        ("er-p", cli.er_p.map(|v| v.to_string())),
        ("ws-k", cli.ws_k.map(|v| v.to_string())),
        ("ws-beta", cli.ws_beta.map(|v| v.to_string())),
        ("ba-m0", cli.ba_m0.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            cfg.set(key, &value).map_err(usage)?;
        }
    }
    if let Command::Fig1 {
        panels: Some(panels),
    } = &cli.command
    {
        cfg.set("panels", panels).map_err(usage)?;
    }
    if !seed_given && uses_seed(&cli.command) {
        eprintln!("seed: {DEFAULT_SEED} (default)");
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn uses_seed(command: &Command) -> bool {
    !matches!(command, Command::ScanEc { .. } | Command::Search { .. })
        && !matches!(command, Command::Fig3 { from: Some(_) })
}

fn emit(cfg: &ExperimentConfig, bytes: &[u8]) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Runtime),
        None => io::stdout()
            .write_all(bytes)
            .context("writing stdout")
            .map_err(Failure::Runtime),
    }
}

fn emit_meta(cfg: &ExperimentConfig, counts: &[(&str, usize)]) -> Result<(), Failure> {
    let text = metadata_text(cfg, counts);
    match &cfg.output {
        Some(path) => {
            let meta = sibling(path, "meta");
            fs::write(&meta, text).with_context(|| format!("writing {}", meta.display()))?;
        }
        None => eprint!("{text}"),
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn single_n(cfg: &ExperimentConfig) -> Result<usize, Failure> {
    let ns = cfg.n_grid.values();
    match ns[..] {
        [n] => Ok(n),
        _ => Err(usage("this command needs a single --n")),
    }
}

fn read_graph(path: &Path) -> Result<Arc<Graph>, Failure> {
    Graph::read_edge_list(path)
        .map(Arc::new)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Runtime)
}

fn parse_orders(text: &str) -> Result<Vec<EcOrder>, Failure> {
    let mut orders = Vec::new();
    for c in text.chars() {
        let order = match c {
            '2' => EcOrder::Two,
            '3' => EcOrder::Three,
            _ => return Err(usage(format!("bad orders {text:?}, expected 2, 3 or 23"))),
        };
        if !orders.contains(&order) {
            orders.push(order);
        }
    }
    if orders.is_empty() {
        return Err(usage("no orders given"));
    }
    Ok(orders)
}

fn check_vertex(graph: &Graph, v: usize) -> Result<(), Failure> {
    if v >= graph.vertex_count() {
        return Err(usage(format!(
            "vertex {v} out of range for a graph on {} vertices",
            graph.vertex_count()
        )));
    }
    Ok(())
}

fn generate(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let [model] = cfg.models[..] else {
        return Err(usage("generate needs exactly one --model"));
    };
    let n = single_n(cfg)?;
    let sample = sample_connected(&cfg.model_params(model), n, cfg.root_seed)
        .map_err(|e| Failure::Runtime(e.into()))?;
    eprintln!(
        "{model} graph on {n} vertices, {} edges, {} disconnected draws replaced",
        sample.graph.edge_count(),
        sample.regenerations
    );
    emit(cfg, sample.graph.to_edge_list_string().as_bytes())
}

#[derive(Serialize)]
struct EcRow {
    anchor: usize,
    kind: EcKind,
    vertices: String,
}

fn join(vertices: impl IntoIterator<Item = usize>) -> String {
    vertices
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn scan_ec(
    cfg: &ExperimentConfig,
    input: &Path,
    vertex: usize,
    orders: &str,
    distance: usize,
) -> Result<(), Failure> {
    let orders = parse_orders(orders)?;
    let graph = read_graph(input)?;
    check_vertex(&graph, vertex)?;
    let rows: Vec<_> = find_ec_within_distance(&graph, vertex, distance, &orders)
        .into_iter()
        .map(|ec| EcRow {
            anchor: ec.anchor,
            kind: ec.kind,
            vertices: join(ec.vertices.iter().copied()),
        })
        .collect();
    emit(
        cfg,
        &to_csv_bytes(&rows).map_err(|e| Failure::Runtime(e.into()))?,
    )
}

#[derive(Serialize)]
struct SearchRow {
    t: usize,
    probability: f64,
    #[serde(rename = "T")]
    runtime: f64,
}

fn search(
    cfg: &ExperimentConfig,
    input: &Path,
    marked: &str,
    t: Option<usize>,
) -> Result<(), Failure> {
    let graph = read_graph(input)?;
    let marked: Vec<usize> = marked
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad marked set {marked:?}")))?;
    for &v in &marked {
        check_vertex(&graph, v)?;
    }
    let t_pen = cfg.t_pen.for_n(graph.vertex_count());
    let p = StochasticMatrix::uniform(&graph).map_err(|e| Failure::Runtime(e.into()))?;
    let rows: Vec<SearchRow> = match t {
        Some(t) => probability_trace(&graph, &marked, &p, t, cfg.reflection)
            .map_err(|e| Failure::Runtime(e.into()))?
            .into_iter()
            .enumerate()
            .map(|(t, probability)| SearchRow {
                t,
                probability,
                runtime: expected_runtime(t, probability, t_pen),
            })
            .collect(),
        None => {
            let best = optimize_measurement_time(&graph, &marked, &p, t_pen, cfg.reflection)
                .map_err(|e| Failure::Runtime(e.into()))?;
            vec![SearchRow {
                t: best.t,
                probability: best.probability,
                runtime: best.runtime,
            }]
        }
    };
    emit(
        cfg,
        &to_csv_bytes(&rows).map_err(|e| Failure::Runtime(e.into()))?,
    )
}

/// The fig2 row without the model column.
#[derive(Serialize)]
struct AttackRow {
    n: usize,
    seed: u64,
    anchor: usize,
    added_vertices: String,
    kind: EcKind,
    t_base: usize,
    p_base: f64,
    #[serde(rename = "T_base")]
    runtime_base: f64,
    p_attacked: f64,
    #[serde(rename = "T_attacked")]
    runtime_attacked: f64,
    eff: f64,
    t_opt: usize,
    #[serde(rename = "T_opt")]
    runtime_opt: f64,
    strong_eff: f64,
    t_pen: usize,
}

fn attack(
    cfg: &ExperimentConfig,
    input: &Path,
    anchor: usize,
    orders: &str,
) -> Result<(), Failure> {
    let orders = parse_orders(orders)?;
    let graph = read_graph(input)?;
    check_vertex(&graph, anchor)?;
    let n = graph.vertex_count();
    let ecs = find_ec_within_distance(&graph, anchor, 2, &orders);
    if ecs.is_empty() {
        return Err(Failure::Runtime(anyhow!(
            "no exceptional configuration contains vertex {anchor}"
        )));
    }
    let ec = &ecs[rng_from_seed(cfg.root_seed).gen_range(0..ecs.len())];
    let p = StochasticMatrix::uniform(&graph).map_err(|e| Failure::Runtime(e.into()))?;
    let t_pen = cfg.t_pen.for_n(n);
    let report = run_attack(&graph, &p, ec, t_pen, cfg.reflection)
        .map_err(|e| Failure::Runtime(e.into()))?;
    let row = AttackRow {
        n,
        seed: cfg.root_seed,
        anchor: report.anchor,
        added_vertices: join(report.added.iter().copied()),
        kind: report.kind,
        t_base: report.t_base,
        p_base: report.p_base,
        runtime_base: report.runtime_base,
        p_attacked: report.p_attacked,
        runtime_attacked: report.runtime_attacked,
        eff: report.efficiency,
        t_opt: report.t_opt,
        runtime_opt: report.runtime_opt,
        strong_eff: report.strong_efficiency,
        t_pen: report.t_pen,
    };
    emit(
        cfg,
        &to_csv_bytes(&[row]).map_err(|e| Failure::Runtime(e.into()))?,
    )
}

fn fig1(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let out = run_fig1(cfg).map_err(|e| Failure::Runtime(e.into()))?;
    emit(
        cfg,
        &to_csv_bytes(&out.rows).map_err(|e| Failure::Runtime(e.into()))?,
    )?;
    emit_meta(
        cfg,
        &[
            ("rows", out.rows.len()),
            ("regenerations", out.regenerations),
        ],
    )
}

fn fig2(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let out = run_fig2(cfg).map_err(|e| Failure::Runtime(e.into()))?;
    emit(
        cfg,
        &to_csv_bytes(&out.rows).map_err(|e| Failure::Runtime(e.into()))?,
    )?;
    emit_meta(
        cfg,
        &[
            ("rows", out.rows.len()),
            ("regenerations", out.regenerations),
            ("anchor-redraws", out.anchor_redraws),
            ("graph-redraws", out.graph_redraws),
        ],
    )
}

fn fig3(cfg: &ExperimentConfig, from: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = from {
        let rows: Vec<Fig2Row> =
            experiment::read_csv(path).with_context(|| format!("reading {}", path.display()))?;
        let fits = experiment::fig3_from_rows(&rows).map_err(|e| Failure::Runtime(e.into()))?;
        return emit(
            cfg,
            &to_csv_bytes(&fits).map_err(|e| Failure::Runtime(e.into()))?,
        );
    }
    let out = run_fig3(cfg).map_err(|e| Failure::Runtime(e.into()))?;
    emit(
        cfg,
        &to_csv_bytes(&out.rows).map_err(|e| Failure::Runtime(e.into()))?,
    )?;
    if let Some(path) = &cfg.output {
        let attacks = sibling(path, "attacks.csv");
        fs::write(
            &attacks,
            to_csv_bytes(&out.attacks.rows).map_err(|e| Failure::Runtime(e.into()))?,
        )
        .with_context(|| format!("writing {}", attacks.display()))?;
    }
    let a = &out.attacks;
    emit_meta(
        cfg,
        &[
            ("rows", out.rows.len()),
            ("attack-rows", a.rows.len()),
            ("regenerations", a.regenerations),
            ("anchor-redraws", a.anchor_redraws),
            ("graph-redraws", a.graph_redraws),
        ],
    )
}
