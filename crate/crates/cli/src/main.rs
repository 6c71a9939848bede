//! `koszul`: command-line front end for the homology, realization and Torelli
//! computations, with a content-addressed result cache.

mod cache;
mod jobs;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use koszul_core::graphcx::GraphFamily;
use koszul_core::verify::Profile;
use serde::Serialize;
use serde_json::{json, Value};

use cache::{audited, sha256_hex, Cache, Lookup};
use jobs::{JobError, Output};

/// Bumped whenever a payload layout changes; part of every cache key.
const SCHEMA_VERSION: u32 = 1;
const TOOL: &str = "koszul";
const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_INVARIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "koszul",
    version,
    about = "Exact homology of graph complexes, species and Torelli Lie algebras"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the JSON report to PATH and print a summary instead.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    /// Print tables as tab-separated values.
    #[arg(long, global = true)]
    tsv: bool,
    /// Recompute differential ranks modulo these primes.
    #[arg(long, global = true, value_delimiter = ',', value_name = "P1,P2,...")]
    primes: Vec<u64>,
    /// Lift the resource guards.
    #[arg(long, global = true)]
    force: bool,
    /// Recompute a deterministic tenth of cache hits and compare.
    #[arg(long, global = true)]
    audit: bool,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Homology of a graph complex, with q = n·w up to --max-q.
    GraphHomology {
        #[arg(long, default_value = "g")]
        family: String,
        #[arg(long)]
        variant: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        legs: usize,
        #[arg(long)]
        max_q: u32,
    },
    /// Homology of red-and-black graphs; for n = 1 it is compared with the species.
    RbHomology {
        #[arg(long)]
        variant: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        legs: usize,
        #[arg(long)]
        max_w: u32,
        /// Restrict to graphs whose black part is connected.
        #[arg(long)]
        connected: bool,
    },
    /// Bigraded Harrison homology of a species on one set.
    Harrison {
        #[arg(long)]
        species: String,
        #[arg(long, default_value_t = 0)]
        legs: usize,
        #[arg(long)]
        max_w: u32,
        /// Homology of the projection E_n → Z_n instead.
        #[arg(long)]
        relative: bool,
    },
    /// Diagonal criterion for Koszulness; exits 1 on an off-diagonal cell.
    KoszulCheck {
        #[arg(long, value_delimiter = ',', default_value = "z1")]
        species: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_legs: usize,
        #[arg(long, default_value_t = 3)]
        max_w: u32,
    },
    /// Decompose a plethysm expression into irreducibles.
    Decompose {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        g: usize,
        #[arg(long = "type", default_value = "sp")]
        group: String,
    },
    /// Dimensions and characters of the realization of a species at genus g.
    Realize {
        #[arg(long)]
        species: String,
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 2)]
        max_w: u32,
    },
    /// Kernel of the Johnson map on the quadratic Torelli Lie algebra.
    Torelli {
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 2)]
        max_w: usize,
    },
    /// Transfer maps between black graphs with zero and one leg.
    TransferCheck {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        max_q: u32,
    },
    /// Run every acceptance criterion.
    VerifyAll {
        #[arg(long, default_value = "quick")]
        profile: String,
    },
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    job: &'a Value,
    timing_ms: u128,
    cache: String,
    verification: &'a jobs::Verification,
    payload: &'a Value,
}

enum Failure {
    Job(JobError),
    Io(io::Error),
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        Self::Job(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

fn compute(command: &Command, global: &Global) -> Result<Output, JobError> {
    let force = global.force;
    match command {
        Command::GraphHomology {
            family,
            variant,
            n,
            legs,
            max_q,
        } => {
            let job = jobs::GraphJob {
                family: jobs::parse_family(family)?,
                variant: jobs::parse_variant(variant)?,
                n: *n,
                legs: *legs,
                min_w: 1,
                max_w: max_q / (*n).max(1),
            };
            jobs::graph_homology(&job, &global.primes, force)
        }
        Command::RbHomology {
            variant,
            n,
            legs,
            max_w,
            connected,
        } => {
            let job = jobs::GraphJob {
                family: if *connected {
                    GraphFamily::RbConn
                } else {
                    GraphFamily::Rb
                },
                variant: jobs::parse_variant(variant)?,
                n: *n,
                legs: *legs,
                min_w: 0,
                max_w: *max_w,
            };
            jobs::graph_homology(&job, &global.primes, force)
        }
        Command::Harrison {
            species,
            legs,
            max_w,
            relative,
        } => jobs::harrison(species, *legs, *max_w, *relative, force),
        Command::KoszulCheck {
            species,
            max_legs,
            max_w,
        } => jobs::koszul_check(species, *max_legs, *max_w, force),
        Command::Decompose { expr, g, group } => jobs::decompose_expr(expr, *g, jobs::parse_group(group)?, force),
        Command::Realize { species, g, max_w } => jobs::realize(species, *g, *max_w, force),
        Command::Torelli { g, max_w } => jobs::torelli(*g, *max_w, force),
        Command::TransferCheck { n, max_q } => jobs::transfer(*n, *max_q, force),
        Command::VerifyAll { profile } => jobs::verify(
            profile
                .parse::<Profile>()
                .map_err(|e| JobError::Invalid(e.to_string()))?,
        ),
    }
}

/// The job echo: subcommand parameters plus the flags that change results.
fn job_spec(command: &Command, global: &Global) -> Value {
    let mut job = serde_json::to_value(command).expect("subcommands serialize");
    job["primes"] = json!(global.primes);
    job
}

fn cache_key(job: &Value) -> String {
    // `Value` maps are ordered, so this serialization is canonical.
    let canonical = json!({"schema_version": SCHEMA_VERSION, "tool_version": TOOL_VERSION, "job": job});
    sha256_hex(canonical.to_string().as_bytes())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let start = Instant::now();
    let job = job_spec(&cli.command, &cli.global);
    let cacheable = !cli.global.no_cache && !matches!(cli.command, Command::VerifyAll { .. });
    let cache = Cache::from_env();
    let key = cache_key(&job);

    let mut status = "disabled".to_string();
    let mut output = None;
    if cacheable {
        match cache.get(&key)? {
            Lookup::Hit { payload, meta } => {
                let mut hit: Output = serde_json::from_value(json!({
                    "payload": payload,
                    "verification": meta["verification"],
                    "tsv": meta["tsv"],
                    "text": meta["text"],
                }))
                .map_err(io::Error::from)?;
                status = "hit".into();
                if cli.global.audit && audited(&key) {
                    let fresh = compute(&cli.command, &cli.global)?;
                    if fresh.payload != hit.payload || fresh.verification != hit.verification {
                        eprintln!("warning: audited cache entry {key} differs from a fresh run; evicting it");
                        cache.evict(&key)?;
                        return Err(Failure::Job(JobError::Invariant(
                            "cached result differs from recomputation".into(),
                        )));
                    }
                    status = "hit-audited".into();
                    hit = fresh;
                }
                output = Some(hit);
            }
            Lookup::Evicted(reason) => {
                eprintln!("warning: evicted corrupt cache entry {key}: {reason}");
                status = "evicted".into();
            }
            Lookup::Miss => status = "miss".into(),
        }
    }
    let output = match output {
        Some(o) => o,
        None => {
            let o = compute(&cli.command, &cli.global)?;
            if cacheable {
                let meta = json!({"verification": o.verification, "tsv": o.tsv, "text": o.text});
                cache.put(&key, &o.payload, &meta)?;
            }
            o
        }
    };

    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: TOOL,
        tool_version: TOOL_VERSION,
        job: &job,
        timing_ms: start.elapsed().as_millis(),
        cache: status,
        verification: &output.verification,
        payload: &output.payload,
    };
    let pretty = serde_json::to_string_pretty(&envelope).map_err(io::Error::from)?;
    let mut stdout = io::stdout().lock();
    if let Some(path) = &cli.global.json_out {
        std::fs::write(path, format!("{pretty}\n"))?;
        if cli.global.tsv {
            write!(stdout, "{}", output.tsv)?;
        } else {
            writeln!(stdout, "{}", output.text)?;
            writeln!(stdout, "report written to {}", path.display())?;
        }
    } else if cli.global.tsv {
        write!(stdout, "{}", output.tsv)?;
    } else {
        writeln!(stdout, "{pretty}")?;
    }
    Ok(if output.verification.passed() {
        0
    } else {
        EXIT_INVARIANT
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => {
            if code != 0 {
                eprintln!("error: a verification check failed");
            }
            ExitCode::from(code)
        }
        Err(Failure::Job(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_INVARIANT })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
