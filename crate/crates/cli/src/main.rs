use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use neighborhood_bound::gradings::DEFAULT_ENUMERATION_BUDGET;
use neighborhood_bound::{build_certificate, exhaustive_verify, DatumJson, Digraph, Matrix};
use neighborhood_bound_cli::fuzz::{run_fuzz, FuzzConfig};
use neighborhood_bound_cli::reports::{self, CheckInput, UndirectedReport};
use neighborhood_bound_cli::sweep::{grading_sweep, undirected_exhaustive};
use neighborhood_bound_cli::{split_names, to_json, Verdict};

const GROUP_HELP: &str = "Group spec: C<n> (cyclic), D<n> (dihedral of order 2n), S<n> (n <= 5), Q8, \
or products joined by 'x' such as C2xC4";

#[derive(Parser)]
#[command(
    version,
    about = "Check |T(Γ)| >= |E| for digraphs, its corollaries, and grading dimension bounds"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat closed-form cross-check mismatches as failures (exit 1).
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Oracle count plus certificate for one graph file (JSON or text; "-" reads stdin).
    Check { file: PathBuf },
    /// Emit the full induction certificate for a digraph.
    Certify { file: PathBuf },
    /// Replay a certificate against its digraph.
    Verify { graph: PathBuf, certificate: PathBuf },
    /// Check seeded random digraphs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long)]
        no_loops: bool,
    },
    /// Check every digraph (or simple undirected graph) on 1..=N_MAX vertices.
    Exhaustive {
        n_max: usize,
        #[arg(long)]
        no_loops: bool,
        #[arg(long)]
        undirected: bool,
        /// Lift the default size guard.
        #[arg(long)]
        force: bool,
    },
    /// Support corollary for a nonnegative square matrix (CSV or JSON rows).
    Matrix { file: PathBuf },
    /// Dimension table, component digraphs and verdicts for one grading datum.
    Grading {
        #[arg(help = GROUP_HELP, required_unless_present = "datum")]
        group: Option<String>,
        /// Comma-separated generators of H; empty means the trivial subgroup.
        #[arg(long = "h", default_value = "")]
        h: String,
        /// Comma-separated tuple (g_1, ..., g_n).
        #[arg(long, required_unless_present = "datum")]
        tuple: Option<String>,
        /// Read the datum from a JSON file instead.
        #[arg(long, conflicts_with_all = ["group", "tuple"])]
        datum: Option<PathBuf>,
    },
    /// Check every (H, tuple) over a group with tuple length up to N_MAX.
    GradingSweep {
        #[arg(help = GROUP_HELP)]
        group: String,
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
    },
}

struct Rendered {
    body: String,
    verdict: Verdict,
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("NEIGHBORHOOD_BOUND_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .with_context(|| format!("NEIGHBORHOOD_BOUND_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn no_dot(format: Format, what: &str) -> Result<()> {
    if format == Format::Dot {
        bail!("--format dot is not available for {what}");
    }
    Ok(())
}

fn warn_mismatches(graphs: u64, unexplained: u64) {
    if graphs > 0 {
        eprintln!(
            "warning: {graphs} graph(s) with closed-form cross-check mismatches ({unexplained} not explained by extra internal edges)"
        );
    }
}

fn run(cli: &Cli) -> Result<Rendered> {
    let format = cli.format;
    let started = Instant::now();
    let rendered = match &cli.command {
        Command::Check { file } => match CheckInput::parse(&read_input(file)?)? {
            CheckInput::Directed(g) => {
                let report = reports::check_digraph(&g);
                warn_mismatches(
                    u64::from(!report.mismatches.is_empty()),
                    u64::from(!report.unexplained.is_empty()),
                );
                let body = match format {
                    Format::Json => to_json(&report),
                    Format::Text => report.to_text(),
                    Format::Dot => g.to_dot("G", Some(&g.mutual_pairs())),
                };
                Rendered {
                    body,
                    verdict: report.verdict(cli.strict),
                }
            }
            CheckInput::Undirected(g) => {
                let report = UndirectedReport::new(g);
                let body = match format {
                    Format::Json => to_json(&report),
                    Format::Text => report.to_text(),
                    Format::Dot => report.graph.symmetrize().to_dot("G", None),
                };
                Rendered {
                    body,
                    verdict: Verdict::from_holds(report.check.holds),
                }
            }
        },
        Command::Certify { file } => {
            no_dot(format, "certify")?;
            let g = Digraph::parse(&read_input(file)?)?;
            let cert = build_certificate(&g)?;
            Rendered {
                body: to_json(&cert),
                verdict: Verdict::Holds,
            }
        }
        Command::Verify { graph, certificate } => {
            no_dot(format, "verify")?;
            let g = Digraph::parse(&read_input(graph)?)?;
            let cert = reports::parse_certificate(&read_input(certificate)?)?;
            let outcome = reports::verify(&g, &cert);
            let body = match format {
                Format::Text => match &outcome.error {
                    None => "certificate verified\n".to_string(),
                    Some(e) => format!("certificate REJECTED: {e}\n"),
                },
                _ => to_json(&outcome),
            };
            let strict_fail = cli.strict && !cert.cross_check_mismatches().is_empty();
            Rendered {
                body,
                verdict: Verdict::from_holds(outcome.verified && !strict_fail),
            }
        }
        Command::Fuzz {
            seed,
            count,
            nodes,
            edge_prob,
            no_loops,
        } => {
            no_dot(format, "fuzz")?;
            let summary = run_fuzz(&FuzzConfig {
                seed: *seed,
                count: *count,
                nodes: *nodes,
                edge_prob: *edge_prob,
                loops: !no_loops,
            })?;
            warn_mismatches(summary.graphs_with_mismatches, summary.graphs_with_unexplained);
            let body = match format {
                Format::Text => format!(
                    "seed {}: {} graphs on {} vertices (p = {}), {} violations, {} with cross-check mismatches\n",
                    summary.seed,
                    summary.count,
                    summary.nodes,
                    summary.edge_prob,
                    summary.violations,
                    summary.graphs_with_mismatches
                ),
                _ => to_json(&summary),
            };
            let strict_fail = cli.strict && summary.graphs_with_mismatches > 0;
            Rendered {
                body,
                verdict: Verdict::from_holds(summary.violations == 0 && !strict_fail),
            }
        }
        Command::Exhaustive {
            n_max,
            no_loops,
            undirected,
            force,
        } => {
            no_dot(format, "exhaustive")?;
            if *undirected {
                let summary = undirected_exhaustive(*n_max, *force)?;
                let body = match format {
                    Format::Text => summary
                        .per_n
                        .iter()
                        .map(|s| format!("n = {}: {} graphs, {} violations\n", s.n, s.graphs, s.violations))
                        .collect(),
                    _ => to_json(&summary),
                };
                Rendered {
                    body,
                    verdict: Verdict::from_holds(summary.holds()),
                }
            } else {
                let summary = exhaustive_verify(*n_max, !no_loops, *force).map_err(|e| {
                    anyhow::anyhow!(
                        "{} (requested {}); --force lifts the guard",
                        "exhaustive enumeration is limited to small n",
                        e.requested
                    )
                })?;
                let mismatched: u64 = summary.per_n.iter().map(|s| s.graphs_with_mismatches).sum();
                let unexplained: u64 = summary.per_n.iter().map(|s| s.graphs_with_unexplained).sum();
                warn_mismatches(mismatched, unexplained);
                let body = match format {
                    Format::Text => summary
                        .per_n
                        .iter()
                        .map(|s| {
                            format!(
                                "n = {}: {} graphs, {} violations, {} with cross-check mismatches\n",
                                s.n, s.graphs, s.violations, s.graphs_with_mismatches
                            )
                        })
                        .collect(),
                    _ => to_json(&summary),
                };
                Rendered {
                    body,
                    verdict: Verdict::from_holds(summary.total_violations == 0 && !(cli.strict && mismatched > 0)),
                }
            }
        }
        Command::Matrix { file } => {
            let a = Matrix::parse(&read_input(file)?)?;
            let report = reports::MatrixReport::new(&a);
            let body = match format {
                Format::Json => to_json(&report),
                Format::Text => report.to_text(),
                Format::Dot => reports::matrix_dot(&a),
            };
            Rendered {
                body,
                verdict: Verdict::from_holds(report.check.holds),
            }
        }
        Command::Grading { group, h, tuple, datum } => {
            let (datum, source) = match datum {
                Some(path) => reports::grading_datum_json(&read_input(path)?)?,
                None => {
                    let spec = group.as_deref().expect("clap requires a group");
                    let tuple = split_names(tuple.as_deref().expect("clap requires a tuple"))?;
                    let datum = reports::grading_datum(spec, &split_names(h)?, &tuple)?;
                    let source: DatumJson = datum.to_json_with_spec(spec);
                    (datum, source)
                }
            };
            let report = reports::grading_report(&datum, &source);
            let body = match format {
                Format::Json => to_json(&report),
                Format::Text => reports::grading_text(&report),
                Format::Dot => reports::grading_dot(&datum),
            };
            Rendered {
                body,
                verdict: Verdict::from_holds(report.holds()),
            }
        }
        Command::GradingSweep { group, n_max, budget } => {
            no_dot(format, "grading-sweep")?;
            let summary = grading_sweep(group, *n_max, *budget)?;
            let body = match format {
                Format::Text => summary
                    .per_n
                    .iter()
                    .map(|r| {
                        format!(
                            "{} n = {}: {} data, {} violations, {} ties with the identity component\n",
                            summary.group, r.n, r.data, r.violations, r.ties_with_identity
                        )
                    })
                    .collect(),
                _ => to_json(&summary),
            };
            Rendered {
                body,
                verdict: Verdict::from_holds(summary.holds()),
            }
        }
    };
    eprintln!("elapsed {:.3}s", started.elapsed().as_secs_f64());
    Ok(rendered)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(&cli)).and_then(|r| {
        match &cli.out {
            Some(path) => std::fs::write(path, &r.body).with_context(|| format!("cannot write {}", path.display()))?,
            None => print!("{}", r.body),
        }
        Ok(r.verdict)
    });
    match result {
        Ok(verdict) => ExitCode::from(verdict.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
