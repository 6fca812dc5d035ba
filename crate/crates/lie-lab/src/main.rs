//! Command-line interface.
//!
//! Exit codes: 0 success, 2 expectation or verdict failure, 3 input error,
//! 4 solver failure budget exceeded.

use clap::{Parser, Subcommand, ValueEnum};
use lie_lab::analyze::{analyze, render_text, AnalyzeOptions, GradingSource};
use lie_lab::converge::{linear_grid, log_grid, to_csv, ConvergeOptions, Mode};
use lie_lab::format::AlgebraFile;
use lie_core::invariants::BetaStrategy;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lie-lab",
    about = "Structural invariants of polarized nilpotent Lie algebras and \
             numerical convergence-rate experiments for their metric limits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GradingArg {
    /// Use the file's grading when present, otherwise build one.
    Auto,
    /// Require the grading lines from the file.
    File,
    /// Report the asymptotic side only.
    Asymptotic,
    /// Report the tangent side only.
    Tangent,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Pansu,
    Mitchell,
    Gronwall,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an algebra file, compute gradings and invariants, check the
    /// file's `expect` lines.
    Analyze {
        /// Path to an algebra file, or `canned:NAME`.
        input: String,
        #[arg(long, value_enum, default_value = "auto")]
        grading: GradingArg,
        /// Candidate ideal for the beta search, e.g. "span(e4,e5)";
        /// repeatable. Switches the search to the supplied list.
        #[arg(long = "beta-ideal")]
        beta_ideals: Vec<String>,
        /// Machine-readable output (schema = 1).
        #[arg(long)]
        json: bool,
    },
    /// Run a convergence experiment over an ε-grid and fit the decay rate.
    Converge {
        /// Path to an algebra file, or `canned:NAME`.
        input: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Grid `lo:hi:n` (linear) or `lo:hi:n:log`.
        #[arg(long = "eps-grid")]
        eps_grid: Option<String>,
        /// Point pairs `x,y,..|x,y,..`, pairs separated by `;`. Defaults to
        /// dilation-spread points.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = 32)]
        segments: usize,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Verdict slack: pass iff slope >= theory - slack.
        #[arg(long, default_value_t = 0.15)]
        slack: f64,
        /// Write the rows as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// List the names of the canned examples.
    ListCanned,
    /// Print (or write) a canned example file.
    DumpCanned {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_input(input: &str) -> Result<AlgebraFile, String> {
    if let Some(name) = input.strip_prefix("canned:") {
        return lie_lab::canned::load(name)
            .ok_or_else(|| format!("unknown canned example `{name}`"));
    }
    let path = std::path::Path::new(input);
    if !path.exists() {
        if let Some(f) = lie_lab::canned::load(input) {
            return Ok(f);
        }
        return Err(format!("no such file: {input}"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{input}: {e}"))?;
    AlgebraFile::parse(&text).map_err(|e| format!("{input}: {e}"))
}

fn parse_points(spec: &str) -> Result<Vec<(Vec<f64>, Vec<f64>)>, String> {
    let mut out = Vec::new();
    for pair in spec.split(';') {
        let (p, q) = pair
            .split_once('|')
            .ok_or_else(|| format!("point pair `{pair}` must be p|q"))?;
        let parse = |s: &str| -> Result<Vec<f64>, String> {
            s.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| e.to_string()))
                .collect()
        };
        out.push((parse(p)?, parse(q)?));
    }
    Ok(out)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] | [lo, hi, n, _] => {
            let lo: f64 = lo.parse().map_err(|_| format!("bad grid lo `{lo}`"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("bad grid hi `{hi}`"))?;
            let n: usize = n.parse().map_err(|_| format!("bad grid count `{n}`"))?;
            if n < 2 || hi <= lo {
                return Err("grid needs n >= 2 and hi > lo".into());
            }
            if parts.len() == 4 {
                if parts[3] != "log" {
                    return Err(format!("unknown grid kind `{}`", parts[3]));
                }
                if lo <= 0.0 {
                    return Err("log grid needs lo > 0".into());
                }
                Ok(log_grid(lo, hi, n))
            } else {
                Ok(linear_grid(lo, hi, n))
            }
        }
        _ => Err("grid must be lo:hi:n or lo:hi:n:log".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            input,
            grading,
            beta_ideals,
            json,
        } => {
            let file = match load_input(&input) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            };
            let mut opts = AnalyzeOptions::default();
            match grading {
                GradingArg::Auto => {}
                GradingArg::File => opts.grading_source = GradingSource::File,
                GradingArg::Asymptotic => {
                    opts.side_filter = Some(lie_core::grading::Side::Asymptotic)
                }
                GradingArg::Tangent => {
                    opts.side_filter = Some(lie_core::grading::Side::Tangent)
                }
            }
            if !beta_ideals.is_empty() {
                let mut list = Vec::new();
                for spec in &beta_ideals {
                    match file.parse_span_expr(spec) {
                        Ok(rows) => match lie_core::subspace::Subspace::span(file.dim, &rows) {
                            Ok(s) => list.push(s),
                            Err(e) => {
                                eprintln!("error: --beta-ideal {spec}: {e}");
                                return ExitCode::from(3);
                            }
                        },
                        Err(e) => {
                            eprintln!("error: --beta-ideal {spec}: {e}");
                            return ExitCode::from(3);
                        }
                    }
                }
                opts.beta_strategy = BetaStrategy::UserSupplied(list);
            }
            match analyze(&file, &opts) {
                Ok(report) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    } else {
                        print!("{}", render_text(&report));
                    }
                    if report.expect_failures.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Command::Converge {
            input,
            mode,
            eps_grid,
            points,
            segments,
            starts,
            seed,
            slack,
            out,
            json,
        } => {
            let file = match load_input(&input) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            };
            let mode = match mode {
                ModeArg::Pansu => Mode::Pansu,
                ModeArg::Mitchell => Mode::Mitchell,
                ModeArg::Gronwall => Mode::Gronwall,
            };
            let mut opts = ConvergeOptions {
                mode,
                segments,
                starts,
                seed,
                slack,
                ..Default::default()
            };
            opts.eps_grid = match (&eps_grid, mode) {
                (Some(spec), _) => match parse_grid(spec) {
                    Ok(g) => g,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(3);
                    }
                },
                (None, Mode::Gronwall) => {
                    (1..=8).map(|k| 0.5f64.powi(k)).collect()
                }
                (None, _) => log_grid(0.05, 1.0, 6),
            };
            if let Some(spec) = &points {
                match parse_points(spec) {
                    Ok(p) => opts.points = p,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(3);
                    }
                }
            }
            match lie_lab::converge::run(&file, &opts) {
                Ok(result) => {
                    if let Some(path) = out {
                        if let Err(e) = std::fs::write(&path, to_csv(&result)) {
                            eprintln!("error: writing {}: {e}", path.display());
                            return ExitCode::from(3);
                        }
                    }
                    if json {
                        println!("{}", serde_json::to_string_pretty(&result).unwrap());
                    } else {
                        println!(
                            "mode {} | theory {} | slope {} | verdict {}",
                            result.mode,
                            result
                                .theory
                                .map(|t| t.to_string())
                                .unwrap_or_else(|| "inf".into()),
                            result
                                .slope
                                .map(|s| format!("{s:.4}"))
                                .unwrap_or_else(|| "-".into()),
                            result.verdict
                        );
                    }
                    if result.unusable_fraction > 0.2 {
                        ExitCode::from(4)
                    } else if result.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Command::ListCanned => {
            for name in lie_lab::canned::names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::DumpCanned { name, out } => match lie_lab::canned::text(&name) {
            Some(text) => {
                if let Some(path) = out {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                } else {
                    print!("{text}");
                }
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown canned example `{name}`");
                ExitCode::from(3)
            }
        },
    }
}
