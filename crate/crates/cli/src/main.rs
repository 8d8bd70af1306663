use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use subconn::gen::{self, GraphKind};
use subconn::graph::{parse_edge_list, write_edge_list};
use subconn::hierarchy::dump;
use subconn::preprocess::DEFAULT_MEMORY_CAP;
use subconn::scaling::{loglog_slope, measure, CSV_HEADER};
use subconn::shadow::ShadowConfig;
use subconn::verify::{check_products, run_workload, VerifyConfig, VerifyReport};
use subconn::workload::{Trial, Workload};
use subconn::{Execution, Graph, Oracle, OracleOptions};

#[derive(Parser)]
#[command(
    name = "subconn",
    version,
    about = "Connectivity oracle for vertex-induced subgraphs under on/off switches"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph in the edge-list format.
    Gen(GenArgs),
    /// Preprocess a graph and print the preprocessing metrics.
    Preprocess(OracleArgs),
    /// Apply one update and print what it produced.
    Update(UpdateArgs),
    /// Answer queries after one update, or for every trial of a workload.
    Query(QueryArgs),
    /// Check the oracle against a brute-force reference.
    Verify(VerifyArgs),
    /// Time updates and queries for several update sizes.
    Bench(BenchArgs),
    /// Print the component hierarchy.
    Inspect(OracleArgs),
}

#[derive(Args)]
struct GenArgs {
    /// gnm, path, star, grid or cliques-bridge.
    kind: String,
    #[arg(long)]
    n: usize,
    /// Edge count for gnm.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    n_off: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OracleArgs {
    /// Edge-list file.
    graph: PathBuf,
    #[arg(long, default_value_t = 4)]
    d_star: usize,
    /// Keep only a sparse certificate of the on-subgraph.
    #[arg(long)]
    sparsify: bool,
    /// Cap on the number of artificial edges.
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
    memory_cap: u64,
    /// Run every stage on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct UpdateArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    /// Vertices to switch, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Vec<String>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, value_delimiter = ',')]
    d: Vec<String>,
    /// Query pair `U V`; repeatable.
    #[arg(long = "pair", num_args = 2, value_names = ["U", "V"])]
    pairs: Vec<String>,
    /// JSON workload; replaces --d and --pair.
    #[arg(long)]
    workload: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run a stored workload instead of random trials.
    #[arg(long)]
    workload: Option<PathBuf>,
    /// Also materialize the affected graph and cross-check the counts.
    #[arg(long)]
    shadow: bool,
    /// Corrupt answers on purpose to exercise the mismatch path.
    #[arg(long)]
    fault_inject: bool,
    /// Write a random workload with expected answers here and exit.
    #[arg(long)]
    emit_workload: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    d_values: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Optional `labels:` header mapping names to dense ids.
#[derive(Default)]
struct Labels {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Labels {
    fn resolve(&self, token: &str) -> Result<usize> {
        if self.names.is_empty() {
            token
                .trim()
                .parse()
                .with_context(|| format!("not a vertex id: {token:?}"))
        } else {
            self.ids
                .get(token.trim())
                .copied()
                .ok_or_else(|| anyhow!("unknown vertex label {token:?}"))
        }
    }

    fn name(&self, v: usize) -> String {
        self.names.get(v).cloned().unwrap_or_else(|| v.to_string())
    }
}

/// Reads an edge list, translating labels when a `labels:` line comes first.
fn read_graph(path: &Path) -> Result<(Graph, Labels)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    let Some(header) = first.and_then(|l| l.strip_prefix("labels:")) else {
        return Ok((parse_edge_list(&text)?, Labels::default()));
    };
    let names: Vec<String> = header.split_whitespace().map(String::from).collect();
    let ids: HashMap<String, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let labels = Labels { names, ids };
    let mut out = String::new();
    let mut seen_labels = false;
    let mut seen_header = false;
    for line in text.lines() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if !seen_labels {
            seen_labels = true;
            continue;
        }
        if !seen_header {
            seen_header = true;
            out.push_str(l);
        } else if let Some(rest) = l.strip_prefix("on:") {
            out.push_str("on:");
            for t in rest.split_whitespace() {
                out.push_str(&format!(" {}", labels.resolve(t)?));
            }
        } else {
            let ids: Vec<String> = l
                .split_whitespace()
                .map(|t| labels.resolve(t).map(|v| v.to_string()))
                .collect::<Result<_>>()?;
            out.push_str(&ids.join(" "));
        }
        out.push('\n');
    }
    Ok((parse_edge_list(&out)?, labels))
}

fn build(args: &OracleArgs) -> Result<(Graph, Labels, Oracle)> {
    let (g, labels) = read_graph(&args.graph)?;
    let options = OracleOptions {
        sparsify: args.sparsify,
        memory_cap: args.memory_cap,
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let o = Oracle::preprocess(&g, args.d_star, options)?;
    Ok((g, labels, o))
}

fn resolve_all(labels: &Labels, tokens: &[String]) -> Result<Vec<usize>> {
    tokens
        .iter()
        .filter(|t| !t.trim().is_empty())
        .map(|t| labels.resolve(t))
        .collect()
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    let kind: GraphKind = a.kind.parse()?;
    let g = gen::random_off(gen::generate(kind, a.n, a.m, a.seed)?, a.n_off, a.seed)?;
    let text = write_edge_list(&g);
    match a.out {
        Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_preprocess(a: OracleArgs) -> Result<ExitCode> {
    let (_, _, o) = build(&a)?;
    println!("{}", serde_json::to_string_pretty(o.metrics())?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_update(a: UpdateArgs) -> Result<ExitCode> {
    let (_, labels, o) = build(&a.oracle)?;
    let d = resolve_all(&labels, &a.d)?;
    let st = o.apply_update(&d)?;
    let report = serde_json::json!({
        "d_on": st.d_on.iter().map(|&v| labels.name(v)).collect::<Vec<_>>(),
        "d_off": st.d_off.iter().map(|&v| labels.name(v)).collect::<Vec<_>>(),
        "affected_components": st.affected_components.len(),
        "affected_trees": st.affected_trees.len(),
        "intervals": st.stats.intervals,
        "interval_bound": st.stats.interval_bound,
        "groups": st.groups,
        "phases": st.stats.phases,
        "phase_sizes": st.stats.phase_sizes,
        "batched_queries": st.stats.batched_queries,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_query(a: QueryArgs) -> Result<ExitCode> {
    let (g, labels, o) = build(&a.oracle)?;
    let workload = match &a.workload {
        Some(p) => load_workload(p, &g, a.oracle.d_star)?,
        None => {
            let ids = resolve_all(&labels, &a.pairs)?;
            Workload {
                trials: vec![Trial {
                    d: resolve_all(&labels, &a.d)?,
                    queries: ids.chunks(2).map(|p| (p[0], p[1])).collect(),
                    expected: None,
                }],
            }
        }
    };
    for t in &workload.trials {
        let st = o.apply_update(&t.d)?;
        for &(u, v) in &t.queries {
            let r = o.query_with(&st, u, v)?;
            println!("{} {} {}", labels.name(u), labels.name(v), r.connected);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_workload(p: &Path, g: &Graph, d_star: usize) -> Result<Workload> {
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let w: Workload =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
    w.validate(g, d_star)?;
    Ok(w)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let (g, _, o) = build(&a.oracle)?;
    let mut rng = gen::rng(a.seed);
    let mut workload = match &a.workload {
        Some(p) => load_workload(p, &g, a.oracle.d_star)?,
        None => Workload::random(&g, a.oracle.d_star, a.trials, a.queries, &mut rng),
    };
    if let Some(p) = &a.emit_workload {
        workload.fill_expected(&g);
        fs::write(p, serde_json::to_string_pretty(&workload)?)
            .with_context(|| format!("writing {}", p.display()))?;
        return Ok(ExitCode::SUCCESS);
    }
    let cfg = VerifyConfig {
        d_star: a.oracle.d_star,
        options: o.options(),
        shadow: a.shadow.then(ShadowConfig::default),
        fault_inject: a.fault_inject,
        ..Default::default()
    };
    let before = o.fingerprint();
    let mut rep = VerifyReport::default();
    check_products(&o, &g, &mut rep);
    rep.absorb(run_workload(&o, &g, &workload, &cfg, &mut rng)?);
    if o.fingerprint() != before {
        bail!("preprocessing products changed during verification");
    }
    println!("{}", serde_json::to_string_pretty(&rep)?);
    if rep.failures() > 0 {
        eprintln!(
            "{} failed checks ({} query mismatches)",
            rep.failures(),
            rep.mismatches
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(mut a: BenchArgs) -> Result<ExitCode> {
    let max_d = a.d_values.iter().copied().max().unwrap_or(0);
    a.oracle.d_star = a.oracle.d_star.max(max_d);
    let (g, _, o) = build(&a.oracle)?;
    let rows = measure(
        &o,
        &g,
        &a.d_values,
        a.reps,
        a.queries,
        &mut gen::rng(a.seed),
    )?;
    println!("{CSV_HEADER}");
    for r in &rows {
        println!("{}", r.csv());
    }
    let upd: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.d as f64, r.mean_update_us))
        .collect();
    match loglog_slope(&upd) {
        Some(s) => println!("# update-time log-log slope: {s:.3}"),
        None => println!("# update-time log-log slope: n/a"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_inspect(a: OracleArgs) -> Result<ExitCode> {
    let (_, _, o) = build(&a)?;
    print!("{}", dump(o.hierarchy()));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Update(a) => cmd_update(a),
        Command::Query(a) => cmd_query(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Inspect(a) => cmd_inspect(a),
    };
    res.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
