use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use trop_aspt::cluster::{discover_relations, sample_sign_patterns, SamplerConfig};
use trop_aspt::fan::build_fan;
use trop_aspt::linalg::{format_q, parse_q, Q};
use trop_aspt::polygon::{enumerate_orderings, DihedralOrdering, OrderingClass};
use trop_aspt::trees::{enumerate_aspts, enumerate_cspts};

mod verify;

#[derive(Parser, Debug)]
#[command(name = "trop-aspt", version, about = "Axially symmetric phylogenetic trees and the type C tropical cluster fan")]
struct Cli {
    /// Polygon half-size: trees have 2n leaves.
    #[arg(short = 'n', long = "n", global = true, default_value_t = 3)]
    n: usize,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count ASPTs by dimension and the symmetric dihedral orderings.
    Enumerate,
    /// Run the fan and cluster check suites.
    Verify,
    /// Export the fan (or one ordering's subfan) as JSON, DOT or text.
    Export {
        /// Comma-separated ordering such as "1,2,3,1~,2~,3~".
        #[arg(long)]
        subfan: Option<String>,
    },
    /// Sample occurring sign patterns and classify their signed subfans.
    Signs,
    /// Locate a point of Q^D in the fan and recover its weighted tree.
    Member {
        /// JSON array of rationals; "-" or absent reads stdin.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

/// A run that completed but whose checks did not all hold.
#[derive(Debug)]
struct VerificationFailed;

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use trop_aspt::Error as E;
    for cause in err.chain() {
        if cause.is::<VerificationFailed>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Integrity(_) | E::Sampling(_) => 1,
                E::Input(_) | E::Capacity(_) | E::Contract(_) | E::UnsupportedClass(_) => 2,
            };
        }
        if cause.is::<io::Error>() {
            return 3;
        }
        if cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    2
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("TROP_ASPT_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(t) if t > 0 => t,
        _ => {
            return Err(trop_aspt::Error::Input(format!(
                "TROP_ASPT_THREADS must be a positive integer, got {value:?}"
            ))
            .into())
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn unsupported(format: Format, command: &str) -> anyhow::Error {
    trop_aspt::Error::Input(format!("--format {format:?} is not available for {command}").to_lowercase()).into()
}

#[derive(Serialize)]
struct Counts {
    n: usize,
    aspts: usize,
    by_dim: BTreeMap<usize, usize>,
    shape_classes: usize,
    cspts: usize,
    asdo: usize,
    csdo: usize,
}

fn cmd_enumerate(cli: &Cli) -> Result<()> {
    let catalog = enumerate_aspts(cli.n)?;
    let mut by_dim: BTreeMap<usize, usize> = (cli.n..2 * cli.n).map(|k| (k, 0)).collect();
    for r in catalog.records() {
        *by_dim.entry(r.k()).or_default() += 1;
    }
    let counts = Counts {
        n: cli.n,
        aspts: catalog.records().len(),
        by_dim,
        shape_classes: catalog.shape_classes().len(),
        cspts: enumerate_cspts(cli.n)?.len(),
        asdo: enumerate_orderings(cli.n, OrderingClass::Asdo)?.len(),
        csdo: enumerate_orderings(cli.n, OrderingClass::Csdo)?.len(),
    };
    let text = match cli.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&counts)?,
        Format::Text => {
            let dims: Vec<String> = counts.by_dim.iter().map(|(k, c)| format!("dim{k}:{c}")).collect();
            format!(
                "ASPTs: {} ({}); ASDO:{} CSDO:{}\n",
                counts.aspts,
                dims.join(", "),
                counts.asdo,
                counts.csdo
            )
        }
        f => return Err(unsupported(f, "enumerate")),
    };
    emit(cli, &text)
}

fn cmd_verify(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    let report = verify::run(cli.n, cli.seed, |name, t| eprintln!("[{name}: {t:.2?}]"))?;
    eprintln!("[total: {:.2?}]", start.elapsed());
    let text = match cli.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&report)?,
        Format::Text => {
            let mut out = String::new();
            for c in &report.checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                out.push_str(&format!("certificate for {}:\n", c.name));
                out.push_str(&serde_json::to_string_pretty(&c.certificate)?);
                out.push('\n');
            }
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            out.push_str(&format!(
                "verify n={} seed={}: {} passed, {failed} failed\n",
                report.n,
                report.seed,
                report.checks.len() - failed
            ));
            out
        }
        f => return Err(unsupported(f, "verify")),
    };
    emit(cli, &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(VerificationFailed.into())
    }
}

fn cmd_export(cli: &Cli, subfan: Option<&str>) -> Result<()> {
    let fan = build_fan(cli.n)?;
    let within = match subfan {
        Some(s) => {
            let lambda: DihedralOrdering = s.parse()?;
            Some(fan.subfan_for_ordering(&lambda)?)
        }
        None => None,
    };
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&fan.to_json(within.as_deref()))?,
        Format::Dot => fan.to_dot(&fan.ray_graph(within.as_deref())),
        Format::Text => {
            let ids: Vec<usize> = within.unwrap_or_else(|| (0..fan.cones().len()).collect());
            let mut out = String::new();
            for i in ids {
                let c = fan.cone(i);
                out.push_str(&format!("cone {i} dim {} tree {} rays {}\n", c.dim, c.code.to_hex(), fan.ray_label(i)));
            }
            out
        }
    };
    emit(cli, &text)
}

fn cmd_signs(cli: &Cli) -> Result<()> {
    let relations = discover_relations(cli.n, cli.seed)?;
    let fan = build_fan(cli.n)?;
    let census = sample_sign_patterns(cli.n, cli.seed, SamplerConfig::default());
    if !census.saturated {
        return Err(trop_aspt::Error::Sampling(format!(
            "{} patterns without saturating after {} trials",
            census.patterns.len(),
            census.trials
        ))
        .into());
    }
    let fibers = verify::fibers(&fan, &census, &relations);
    let table = verify::ordering_table(&fan)?;
    let subfan_of: BTreeMap<String, usize> = fibers
        .iter()
        .enumerate()
        .flat_map(|(k, (_, ps))| ps.iter().map(move |p| (p.to_string(), k)))
        .collect();
    let patterns: Vec<Value> = census
        .patterns
        .iter()
        .map(|(p, w)| {
            json!({
                "pattern": p.to_string(),
                "witness": {
                    "z": w.z.rows().iter().map(|r| r.iter().map(format_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "epsilon": w.epsilon,
                },
                "subfan": subfan_of[&p.to_string()],
            })
        })
        .collect();
    let subfans: Vec<Value> = fibers
        .iter()
        .map(|(cones, ps)| {
            json!({
                "ordering": table.get(cones).map(ToString::to_string),
                "cones": cones,
                "fiber": ps.len(),
            })
        })
        .collect();
    let text = match cli.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&json!({
            "n": cli.n,
            "seed": cli.seed,
            "trials": census.trials,
            "patterns": patterns,
            "subfans": subfans,
        }))?,
        Format::Text => {
            let mut out = format!(
                "patterns: {} after {} trials; distinct signed subfans: {}\n",
                census.patterns.len(),
                census.trials,
                fibers.len()
            );
            for (k, (cones, ps)) in fibers.iter().enumerate() {
                let name = table.get(cones).map_or("no ordering".to_string(), ToString::to_string);
                out.push_str(&format!("subfan {k}: {name}, {} cones, {} patterns\n", cones.len(), ps.len()));
            }
            for (p, w) in &census.patterns {
                let rows: Vec<String> = w
                    .z
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(format_q).collect::<Vec<_>>().join(" "))
                    .collect();
                out.push_str(&format!(
                    "{p} subfan {} witness [{}] epsilon {}\n",
                    subfan_of[&p.to_string()],
                    rows.join(" ; "),
                    w.epsilon
                ));
            }
            out
        }
        f => return Err(unsupported(f, "signs")),
    };
    emit(cli, &text)
}

fn read_point(input: Option<&PathBuf>) -> Result<Vec<Q>> {
    let raw = match input {
        Some(path) if path.as_os_str() != "-" => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    let values: Vec<Value> = serde_json::from_str(&raw)?;
    values
        .iter()
        .map(|v| {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(x) if x.is_i64() || x.is_u64() => x.to_string(),
                other => bail!(trop_aspt::Error::Input(format!("expected an integer or a rational string, got {other}"))),
            };
            parse_q(&text).ok_or_else(|| trop_aspt::Error::Input(format!("not a rational: {text:?}")).into())
        })
        .collect()
}

fn cmd_member(cli: &Cli, input: Option<&PathBuf>) -> Result<()> {
    let point = read_point(input)?;
    let fan = build_fan(cli.n)?;
    let found = fan.member_reconstruct(&point)?;
    let format = cli.format.unwrap_or(Format::Text);
    let text = match (format, found) {
        (Format::Json, found) => to_json(&found.map(|r| {
            let c = fan.cone(r.cone);
            json!({
                "cone": r.cone,
                "dim": c.dim,
                "tree": c.code.to_hex(),
                "tree_json": fan.catalog().get(r.cone).tree.to_json(),
                "weights": r.weighting.weights().iter().map(format_q).collect::<Vec<_>>(),
                "boundary_of": r.boundary_of,
            })
        }))?,
        (Format::Text, None) => "outside the fan\n".to_string(),
        (Format::Text, Some(r)) => {
            let c = fan.cone(r.cone);
            let weights: Vec<String> = r
                .weighting
                .weights()
                .iter()
                .enumerate()
                .map(|(o, w)| {
                    let name = if o < cli.n { format!("L{}", o + 1) } else { format!("e{}", o - cli.n + 1) };
                    format!("{name}={}", format_q(w))
                })
                .collect();
            format!(
                "cone {} dim {}\ntree {}\ntree_json {}\nweights {}\nboundary_of {:?}\n",
                r.cone,
                c.dim,
                c.code.to_hex(),
                serde_json::to_string(&fan.catalog().get(r.cone).tree.to_json())?,
                weights.join(" "),
                r.boundary_of
            )
        }
        (f, _) => return Err(unsupported(f, "member")),
    };
    emit(cli, &text)
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Enumerate => cmd_enumerate(cli),
        Command::Verify => cmd_verify(cli),
        Command::Export { subfan } => cmd_export(cli, subfan.as_deref()),
        Command::Signs => cmd_signs(cli),
        Command::Member { input } => cmd_member(cli, input.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.is::<VerificationFailed>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
