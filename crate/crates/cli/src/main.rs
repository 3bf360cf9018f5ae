mod input;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nashlab::families;
use nashlab::iterate::{self, certificate_json, semigroup_json, vector_json, vectors_json, CycleScope, RunConfig, Summary, Verdict};
use nashlab::nash::Characteristic;
use nashlab::polyhedral::hilbert_basis;
use nashlab::AffineSemigroup;
use rayon::prelude::*;
use serde_json::{json, Value};

const SCHEMA: &str = "nashlab/1";

#[derive(Parser)]
#[command(name = "nashlab", version, about = "Nash blowups of affine toric varieties")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "NASHLAB_JOBS")]
    jobs: Option<usize>,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the Nash blowup and report the verdict.
    Nash {
        /// JSON file, `-` for stdin, or `example:<preset>`.
        input: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long, value_enum, default_value = "all")]
        cycle_scope: Scope,
        /// Write the tree as Graphviz to this path.
        #[arg(long)]
        dot: Option<String>,
        /// Embed every node in the report.
        #[arg(long)]
        full_tree: bool,
    },
    /// Structural summary of a semigroup.
    Describe {
        input: String,
        /// Include the Hilbert basis of the saturation.
        #[arg(long)]
        saturate: bool,
    },
    /// Run a family over a parameter range.
    Sweep {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        min: i64,
        #[arg(long)]
        max: i64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Print a preset as input JSON.
    Example { preset: String },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Characteristic of the base field, 0 or a prime.
    #[arg(long = "char", default_value_t = 0)]
    characteristic: u64,
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    Ancestors,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    CyclicQuotient,
    Rebassoo,
    Reeve,
    Numerical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    let pretty = cli.pretty;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting worker pool")?;
    pool.install(|| match cli.command {
        Command::Nash { input, run, max_nodes, cycle_scope, dot, full_tree } => {
            let root = input::load(&input)?;
            let mut cfg = run_config(&run, root.rank())?;
            cfg.max_nodes = max_nodes.unwrap_or(cfg.max_nodes);
            cfg.cycle_scope = match cycle_scope {
                Scope::Ancestors => CycleScope::Ancestors,
                Scope::All => CycleScope::AllVisited,
            };
            let (report, code) = cmd_nash(&input, root, &cfg, dot.as_deref(), full_tree)?;
            emit(&report, pretty);
            Ok(code)
        }
        Command::Describe { input, saturate } => {
            let s = input::load(&input)?;
            emit(&describe(&s, saturate)?, pretty);
            Ok(0)
        }
        Command::Sweep { family, min, max, run, format } => {
            let out = sweep(family, min, max, &run, format)?;
            match out {
                SweepOutput::Csv(text) => print!("{text}"),
                SweepOutput::Json(v) => emit(&v, pretty),
            }
            Ok(0)
        }
        Command::Example { preset } => {
            emit(&semigroup_json(&input::preset(&preset)?), pretty);
            Ok(0)
        }
    })
}

fn emit(v: &Value, pretty: bool) {
    let text = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    println!("{}", text.expect("JSON values serialize"));
}

fn run_config(run: &RunArgs, rank: usize) -> Result<RunConfig> {
    let ch = Characteristic::new(run.characteristic)?;
    let mut cfg = RunConfig::new(ch, run.normalized, rank);
    cfg.max_depth = run.max_depth.unwrap_or(cfg.max_depth);
    Ok(cfg)
}

fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "characteristic": cfg.characteristic.value(),
        "normalized": cfg.normalized,
        "max_depth": cfg.max_depth,
        "max_nodes": cfg.max_nodes,
        "cycle_scope": match cfg.cycle_scope {
            CycleScope::Ancestors => "ancestors",
            CycleScope::AllVisited => "all",
        },
    })
}

fn exit_code(s: Summary) -> u8 {
    match s {
        Summary::Resolved => 0,
        Summary::CounterexampleCycle => 2,
        Summary::Inconclusive => 3,
    }
}

fn cmd_nash(source: &str, root: AffineSemigroup, cfg: &RunConfig, dot: Option<&str>, full_tree: bool) -> Result<(Value, u8)> {
    let input = semigroup_json(&root);
    let start = Instant::now();
    let tree = iterate::run(root, cfg);
    let timing_ms = start.elapsed().as_millis() as u64;
    let summary = tree.summary();

    let cycles: Vec<Value> = tree
        .cycles()
        .map(|n| {
            let Verdict::Cycle { target, certificate } = &n.verdict else { unreachable!() };
            json!({
                "node": n.id,
                "depth": n.depth,
                "target": target,
                "target_depth": tree.nodes[*target].depth,
                "base_exponent": n.base_exponent.as_deref().map(vector_json),
                "semigroup": semigroup_json(&n.semigroup),
                "certificate": certificate_json(certificate),
            })
        })
        .collect();
    let mut verdicts = serde_json::Map::new();
    for n in &tree.nodes {
        let e = verdicts.entry(n.verdict.name()).or_insert(json!(0));
        *e = json!(e.as_u64().unwrap_or(0) + 1);
    }
    let mut report = json!({
        "schema": SCHEMA,
        "command": "nash",
        "source": source,
        "input": input,
        "config": config_json(cfg),
        "verdict": summary.name(),
        "stats": {
            "nodes": tree.nodes.len(),
            "max_depth_reached": tree.max_depth_reached(),
            "level_counts": tree.level_counts(),
            "node_verdicts": verdicts,
        },
        "cycles": cycles,
        "certificates_verified": tree.certificates_verified,
        "timing_ms": timing_ms,
    });
    if full_tree {
        report["tree"] = tree.to_json();
    }
    if let Some(path) = dot {
        std::fs::write(path, tree.to_dot()).with_context(|| format!("writing {path}"))?;
    }
    Ok((report, exit_code(summary)))
}

fn describe(s: &AffineSemigroup, saturate: bool) -> Result<Value> {
    let pointed = s.is_pointed()?;
    let q = s.unit_quotient()?;
    let mut out = json!({
        "schema": SCHEMA,
        "command": "describe",
        "rank": s.rank(),
        "generators": vectors_json(s.generators()),
        "pointed": pointed,
        "unit_rank": q.unit_rank,
        "smooth": s.is_smooth()?,
    });
    if pointed {
        out["minimal_generators"] = vectors_json(s.minimal_generators()?);
        out["invariant_key"] = json!(String::from_utf8_lossy(&s.invariant_key()?));
    }
    if saturate {
        out["hilbert_basis"] = vectors_json(&hilbert_basis(s.cone())?);
    }
    Ok(out)
}

enum SweepOutput {
    Csv(String),
    Json(Value),
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::CyclicQuotient => "cyclic_quotient",
        Family::Rebassoo => "rebassoo",
        Family::Reeve => "reeve",
        Family::Numerical => "numerical",
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Parameter tuples in a fixed order. For the two-parameter families the range bounds
/// the larger parameter; numerical semigroups are taken with two coprime generators.
fn instances(family: Family, min: i64, max: i64) -> Vec<Vec<i64>> {
    let r = min..=max;
    match family {
        Family::CyclicQuotient => r.flat_map(|b| (1..b).filter(move |&a| gcd(a, b) == 1).map(move |a| vec![a, b])).collect(),
        Family::Numerical => r
            .clone()
            .flat_map(|b| (min..b).filter(move |&a| gcd(a, b) == 1).map(move |a| vec![a, b]))
            .collect(),
        Family::Reeve => r.map(|q| vec![q]).collect(),
        Family::Rebassoo => {
            let mut out = Vec::new();
            for p in r.clone() {
                for q in r.clone() {
                    for s in r.clone() {
                        if gcd(gcd(p, q), s) == 1 {
                            out.push(vec![p, q, s]);
                        }
                    }
                }
            }
            out
        }
    }
}

fn build(family: Family, p: &[i64]) -> Result<AffineSemigroup> {
    Ok(match family {
        Family::CyclicQuotient => families::cyclic_quotient(p[0], p[1])?,
        Family::Rebassoo => families::rebassoo(p[0], p[1], p[2])?,
        Family::Reeve => families::reeve(p[0])?,
        Family::Numerical => families::numerical(&[p[0] as u64, p[1] as u64])?,
    })
}

fn sweep(family: Family, min: i64, max: i64, run: &RunArgs, format: Format) -> Result<SweepOutput> {
    if min < 1 || max < min {
        bail!("invalid range {min}..={max}: need 1 <= min <= max");
    }
    let params = instances(family, min, max);
    if params.is_empty() {
        bail!("range {min}..={max} contains no valid {} instance", family_name(family));
    }
    let rows: Vec<(Vec<i64>, RunConfig, Summary, usize, usize)> = params
        .into_par_iter()
        .map(|p| {
            let s = build(family, &p)?;
            let cfg = run_config(run, s.rank())?;
            let t = iterate::run(s, &cfg);
            Ok((p, cfg.clone(), t.summary(), t.max_depth_reached(), t.nodes.len()))
        })
        .collect::<Result<_>>()?;

    Ok(match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["schema", "family", "params", "characteristic", "normalized", "verdict", "depth", "nodes"])?;
            for (p, cfg, v, d, n) in &rows {
                let params = p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
                w.write_record([
                    SCHEMA.to_string(),
                    family_name(family).to_string(),
                    params,
                    cfg.characteristic.value().to_string(),
                    cfg.normalized.to_string(),
                    v.name().to_string(),
                    d.to_string(),
                    n.to_string(),
                ])?;
            }
            SweepOutput::Csv(String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => SweepOutput::Json(json!({
            "schema": SCHEMA,
            "command": "sweep",
            "family": family_name(family),
            "range": [min, max],
            "rows": rows.iter().map(|(p, cfg, v, d, n)| json!({
                "params": p,
                "config": config_json(cfg),
                "verdict": v.name(),
                "depth": d,
                "nodes": n,
            })).collect::<Vec<_>>(),
        })),
    })
}
