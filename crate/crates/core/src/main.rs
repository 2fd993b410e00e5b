use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use genrose::oracle::mc::McConfig;
use genrose::params::{alpha_from_hurst, check_alpha};
use genrose::plot::{contour_svg, line_svg, parse_plot_input, PlotInput};
use genrose::tables::{
    grid, render_table_text, table, write_grid_csv, write_table_csv, DEFAULT_GRID_STEP, DEFAULT_POINTS,
};
use genrose::verify::{verify_lemmas, verify_mc, verify_pipeline, VerifyReport};
use genrose::{report, Amplitude, Error, GammaPair, MomentReportF64, Result};

const EXIT_CODES: &str = "Exit codes: 0 success, 1 verification failure, 2 parameter outside the domain, \
3 file I/O error, 4 malformed input file.";

#[derive(Parser, Debug)]
#[command(
    name = "genrose",
    version,
    about = "Exact moments of the generalized Rosenblatt distribution",
    after_help = EXIT_CODES
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Seed for randomized verification.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moments at one parameter point.
    #[command(allow_negative_numbers = true)]
    Moment {
        gamma1: f64,
        gamma2: f64,
        /// Kernel amplitude; defaults to the one giving unit variance.
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// M3(γ1, α−γ1) for γ1 from α/2 to −0.505.
    #[command(allow_negative_numbers = true)]
    Table {
        #[command(flatten)]
        level: TableLevel,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
    },
    /// M3 over a square lattice in (−1, −1/2)², CSV.
    Grid {
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        step: f64,
    },
    /// SVG plot of a table (line) or grid (contour) CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the kind matching the input file.
        #[arg(long, value_enum)]
        kind: Option<PlotKind>,
    },
    /// Run an oracle suite; exits 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Override the suite's main tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Tolerance for the pipeline's quadrature-only moments.
        #[arg(long)]
        quadrature_tolerance: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TableLevel {
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    noise_points: Option<usize>,
    #[arg(long)]
    truncation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    Contour,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Pipeline,
    Mc,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// `GENROSE_THREADS` caps the worker pool; unset or 0 means one per core.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("GENROSE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("GENROSE_THREADS must be a non-negative integer (got {v:?})")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Domain(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Moment {
            gamma1,
            gamma2,
            amplitude,
        } => {
            let p = GammaPair::new(*gamma1, *gamma2)?;
            let a = amplitude.map(Amplitude::new).transpose()?;
            emit(cli.output.as_deref(), &render_moment(&report(&p, a), cli.format)?)?;
            Ok(0)
        }
        Command::Table { level, points } => {
            let alpha = match (level.hurst, level.alpha) {
                (Some(h), None) => alpha_from_hurst(h)?,
                (None, Some(a)) => check_alpha(a)?,
                _ => unreachable!("clap enforces exactly one"),
            };
            let rows = table(alpha, *points)?;
            let text = match cli.format {
                Format::Text => render_table_text(alpha, &rows),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_table_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).expect("ascii")
                }
                Format::Json => json(&rows),
            };
            emit(cli.output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Grid { step } => {
            let cells = grid(*step)?;
            let text = match cli.format {
                Format::Json => json(&cells),
                Format::Text | Format::Csv => {
                    let mut buf = Vec::new();
                    write_grid_csv(&cells, &mut buf)?;
                    String::from_utf8(buf).expect("ascii")
                }
            };
            emit(cli.output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Plot { input, kind } => {
            let text = fs::read_to_string(input)
                .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let svg = match (parse_plot_input(&text)?, kind) {
                (PlotInput::Table(rows), None | Some(PlotKind::Line)) => line_svg(&rows),
                (PlotInput::Grid(cells), None | Some(PlotKind::Contour)) => contour_svg(&cells)?,
                (PlotInput::Table(_), Some(PlotKind::Contour)) => {
                    return Err(Error::Domain("a contour plot needs grid CSV input".into()))
                }
                (PlotInput::Grid(_), Some(PlotKind::Line)) => {
                    return Err(Error::Domain("a line plot needs table CSV input".into()))
                }
            };
            emit(cli.output.as_deref(), &svg)?;
            Ok(0)
        }
        Command::Verify {
            suite,
            tolerance,
            quadrature_tolerance,
            mc,
        } => {
            let report = match suite {
                SuiteArg::Lemmas => verify_lemmas(cli.seed, *tolerance),
                SuiteArg::Pipeline => verify_pipeline(cli.seed, *tolerance, *quadrature_tolerance),
                SuiteArg::Mc => {
                    let d = McConfig::default();
                    let cfg = McConfig {
                        grid_points_n: mc.grid_points.unwrap_or(d.grid_points_n),
                        noise_points: mc.noise_points.unwrap_or(d.noise_points),
                        truncation: mc.truncation.unwrap_or(d.truncation),
                        replications: mc.replications.unwrap_or(d.replications),
                        seed: cli.seed,
                    };
                    verify_mc(&cfg)?
                }
            };
            emit(cli.output.as_deref(), &render_verify(&report, cli.format))?;
            if !report.pass {
                for f in report.failures() {
                    eprintln!(
                        "FAILED {}: error {:e} > tolerance {:e}",
                        f.check, f.achieved_error, f.tolerance
                    );
                }
            }
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// 12 significant digits, scientific only for very large or small values.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn moment_rows(r: &MomentReportF64) -> Vec<(&'static str, f64)> {
    vec![
        ("gamma1", r.pair.gamma1()),
        ("gamma2", r.pair.gamma2()),
        ("alpha", r.pair.alpha()),
        ("hurst", r.pair.hurst()),
        ("amplitude", r.amplitude),
        ("mu1", r.mu1),
        ("mu2", r.mu2),
        ("mu3", r.mu3),
        ("M3", r.m3_standardized),
        ("F1", r.f1),
        ("F2", r.f2),
        ("F3", r.f3),
    ]
}

fn render_moment(r: &MomentReportF64, format: Format) -> Result<String> {
    let rows = moment_rows(r);
    Ok(match format {
        Format::Json => json(r),
        Format::Csv => {
            let mut s = String::from("quantity,value,rounded\n");
            for (k, v) in rows {
                s.push_str(&format!("{k},{},{v:.3}\n", sig12(v)));
            }
            s
        }
        Format::Text => {
            let values: Vec<String> = rows.iter().map(|(_, v)| sig12(*v)).collect();
            let w = values.iter().map(String::len).max().unwrap_or(0).max(5);
            let mut s = format!("{:<10} {:>w$} {:>9}\n", "quantity", "value", "rounded");
            for ((k, v), text) in rows.iter().zip(&values) {
                s.push_str(&format!("{k:<10} {text:>w$} {v:>9.3}\n"));
            }
            s
        }
    })
}

fn render_verify(r: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let mut s = String::from("check,achieved_error,tolerance,pass\n");
            for c in &r.checks {
                s.push_str(&format!(
                    "\"{}\",{:e},{:e},{}\n",
                    c.check.replace('"', "\"\""),
                    c.achieved_error,
                    c.tolerance,
                    c.pass
                ));
            }
            s
        }
        Format::Text => {
            let failed = r.failures().count();
            let worst = r
                .checks
                .iter()
                .filter(|c| c.tolerance > 0.0)
                .map(|c| c.achieved_error / c.tolerance)
                .fold(0.0f64, f64::max);
            let mut s = String::new();
            for c in &r.checks {
                s.push_str(&format!(
                    "{} {} error={:.3e} tolerance={:.3e}\n",
                    if c.pass { "pass" } else { "FAIL" },
                    c.check,
                    c.achieved_error,
                    c.tolerance
                ));
            }
            s.push_str(&format!(
                "{:?} suite, seed {}: {} of {} checks passed, worst error/tolerance {:.3e}\n",
                r.suite,
                r.seed,
                r.checks.len() - failed,
                r.checks.len(),
                worst
            ));
            s
        }
    }
}
