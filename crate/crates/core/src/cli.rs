//! Command-line front end. The count is the only thing written to standard
//! output by the counting commands; diagnostics and the JSON report go to
//! standard error.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::analyze;
use crate::bench::{gen_choice_chain, gen_hamiltonian, gen_reachability, parse_graph};
use crate::encode::{build_pair, emit_dimacs};
use crate::engine::{
    self, with_large_stack, EngineConfig, Enumeration, ResourceLimit, RunStats,
    DEFAULT_HYBRID_THRESHOLD,
};
use crate::ingest::{parse_program, render_program};
use crate::oracle::{brute_force_count_capped, DEFAULT_ATOM_CAP};
use crate::program::Program;
use crate::report::{InstanceShape, Mode, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatsFormat {
    Json,
    None,
}

#[derive(Debug, Parser)]
#[command(
    name = "aspcount",
    version,
    about = "Exact answer-set counting for ground normal programs"
)]
pub struct Cli {
    /// Emit a JSON run report on standard error.
    #[arg(long, global = true, value_enum, default_value = "none")]
    pub stats: StatsFormat,
    /// Disable the component cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Component cache size limit in MiB.
    #[arg(long, global = true, value_name = "M", default_value_t = 1024)]
    pub cache_limit_mb: usize,
    /// Seed for randomized tie-breaking between equally scored decisions.
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count answer sets.
    Count { file: PathBuf },
    /// Count by enumerating answer sets one at a time.
    Enumerate {
        file: PathBuf,
        /// Give up after this many answer sets.
        #[arg(long, value_name = "N")]
        limit: Option<u64>,
    },
    /// Enumerate up to a threshold, then fall back to counting.
    Hybrid {
        file: PathBuf,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_HYBRID_THRESHOLD)]
        threshold: u64,
        /// Wall-clock budget in seconds for both phases together.
        #[arg(long, value_name = "SECONDS")]
        budget: Option<f64>,
    },
    /// Write F ∧ G as annotated DIMACS.
    Translate {
        file: PathBuf,
        #[arg(short, long, value_name = "OUT")]
        output: Option<PathBuf>,
    },
    /// Count by exhaustive answer-set checking (small programs only).
    Oracle {
        file: PathBuf,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_ATOM_CAP)]
        cap: usize,
    },
    /// Generate a benchmark program.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true, value_name = "OUT")]
        output: Option<PathBuf>,
    },
    /// Report tightness and loop atoms.
    Analyze {
        file: PathBuf,
        /// Also print the positive dependency graph as an edge list.
        #[arg(long)]
        graph: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// N independent choice pairs.
    Chain { n: usize },
    /// Hamiltonian cycles of an edge-list graph.
    Hamiltonian { graph: PathBuf },
    /// Source-target reachability over an edge-list graph.
    Reach {
        graph: PathBuf,
        src: usize,
        dst: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Limit(#[from] ResourceLimit),
    #[error("{0}")]
    OracleCap(String),
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(&cli, &mut io) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_LIMIT
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    String::from_utf8(bytes)
        .map_err(|_| CliError::Usage(format!("{}: not valid UTF-8", path.display())))
}

fn load_program(path: &Path) -> Result<Program, CliError> {
    let text = read_input(path)?;
    parse_program(&text).map_err(|d| CliError::Usage(format!("{}:{d}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str, io: &mut Io<'_>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
        }
        None => io
            .out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("writing output: {e}"))),
    }
}

fn engine_config(cli: &Cli) -> EngineConfig {
    EngineConfig {
        use_cache: !cli.no_cache,
        cache_limit_bytes: cli.cache_limit_mb.saturating_mul(1 << 20),
        seed: cli.seed,
        ..EngineConfig::default()
    }
}

fn emit_report(cli: &Cli, io: &mut Io<'_>, report: &RunReport) {
    if cli.stats == StatsFormat::Json {
        let _ = writeln!(io.err, "{}", report.to_json());
    }
}

fn execute(cli: &Cli, io: &mut Io<'_>) -> Result<(), CliError> {
    match &cli.command {
        Command::Count { file } => {
            let program = load_program(file)?;
            let start = Instant::now();
            let pair = build_pair(&program);
            let shape = InstanceShape::of(&program, &pair);
            let cfg = engine_config(cli);
            let result = with_large_stack(|| engine::count_with(&pair, cfg));
            finish_count(
                cli,
                io,
                Mode::Count,
                result.map(|(n, s)| (n.to_string(), s, None)),
                start,
                &shape,
            )
        }
        Command::Enumerate { file, limit } => {
            let program = load_program(file)?;
            let start = Instant::now();
            let pair = build_pair(&program);
            let shape = InstanceShape::of(&program, &pair);
            let cfg = engine_config(cli);
            let result = with_large_stack(|| engine::enumerate_up_to(&pair, *limit, cfg));
            let result = result.map(|(e, s)| {
                let text = match e {
                    Enumeration::ExactCount(n) => n.to_string(),
                    Enumeration::Exceeded(_) => "exceeded".to_owned(),
                };
                (text, s, None)
            });
            finish_count(cli, io, Mode::Enumerate, result, start, &shape)
        }
        Command::Hybrid {
            file,
            threshold,
            budget,
        } => {
            if *threshold == 0 {
                return Err(CliError::Usage("--threshold must be at least 1".into()));
            }
            let budget = match budget {
                Some(b) if !b.is_finite() || *b < 0.0 => {
                    return Err(CliError::Usage(
                        "--budget must be a nonnegative number of seconds".into(),
                    ))
                }
                Some(b) => Some(Duration::from_secs_f64(*b)),
                None => None,
            };
            let program = load_program(file)?;
            let start = Instant::now();
            let pair = build_pair(&program);
            let shape = InstanceShape::of(&program, &pair);
            let cfg = engine_config(cli);
            let result = with_large_stack(|| engine::hybrid_count(&pair, *threshold, budget, cfg));
            let result = result.map(|h| (h.count.to_string(), h.stats, Some(h.path)));
            finish_count(cli, io, Mode::Hybrid, result, start, &shape)
        }
        Command::Translate { file, output } => {
            let program = load_program(file)?;
            let pair = build_pair(&program);
            write_output(output.as_deref(), &emit_dimacs(&pair), io)
        }
        Command::Oracle { file, cap } => {
            let program = load_program(file)?;
            let start = Instant::now();
            let pair = build_pair(&program);
            let shape = InstanceShape::of(&program, &pair);
            let n = brute_force_count_capped(&program, *cap)
                .map_err(|e| CliError::OracleCap(e.to_string()))?;
            finish_count(
                cli,
                io,
                Mode::Oracle,
                Ok((n.to_string(), RunStats::default(), None)),
                start,
                &shape,
            )
        }
        Command::Gen { family, output } => {
            let program = match family {
                Family::Chain { n } => gen_choice_chain(*n),
                Family::Hamiltonian { graph } => {
                    let g = load_graph(graph)?;
                    if g.n_nodes() < 2 {
                        return Err(CliError::Usage(
                            "hamiltonian graphs need at least two nodes".into(),
                        ));
                    }
                    gen_hamiltonian(&g)
                }
                Family::Reach { graph, src, dst } => {
                    let g = load_graph(graph)?;
                    if *src >= g.n_nodes() || *dst >= g.n_nodes() || src == dst {
                        return Err(CliError::Usage(
                            "source and target must be distinct nodes of the graph".into(),
                        ));
                    }
                    gen_reachability(&g, *src, *dst)
                }
            };
            write_output(output.as_deref(), &render_program(&program), io)
        }
        Command::Analyze { file, graph } => {
            let program = load_program(file)?;
            for d in program.validate() {
                let _ = writeln!(io.err, "warning: {}", d.describe(&program));
            }
            let (g, info) = analyze(&program);
            let loops: Vec<&str> = info.loop_atoms.iter().map(|&a| program.name(a)).collect();
            let mut text = format!(
                "tight: {}\natoms: {}\nrules: {}\nconstraints: {}\nloop_atoms: {}\nloop_atom_list: {}\nsccs: {}\n",
                info.is_tight(),
                program.num_atoms(),
                program.rules().len(),
                program.constraints().len(),
                loops.len(),
                loops.join(" "),
                info.num_sccs,
            );
            if *graph {
                text.push_str(&format!("edges: {}\n", g.num_edges()));
                text.push_str(&g.render_edges(&program));
            }
            write_output(None, &text, io)
        }
    }
}

fn load_graph(path: &Path) -> Result<crate::bench::Graph, CliError> {
    let text = read_input(path)?;
    parse_graph(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn finish_count(
    cli: &Cli,
    io: &mut Io<'_>,
    mode: Mode,
    result: Result<(String, RunStats, Option<engine::HybridPath>), ResourceLimit>,
    start: Instant,
    shape: &InstanceShape,
) -> Result<(), CliError> {
    match result {
        Ok((count, stats, path)) => {
            let mut report = RunReport::new(mode, count.clone(), &stats, start.elapsed(), shape);
            if let Some(p) = path {
                report = report.with_path(p);
            }
            writeln!(io.out, "{count}")
                .map_err(|e| CliError::Usage(format!("writing output: {e}")))?;
            emit_report(cli, io, &report);
            Ok(())
        }
        Err(limit) => {
            let report =
                RunReport::new(mode, "aborted".into(), &limit.stats, start.elapsed(), shape);
            emit_report(cli, io, &report);
            Err(limit.into())
        }
    }
}
