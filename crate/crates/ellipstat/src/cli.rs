//! Argument parsing and command dispatch for the `ellipstat` binary.
//!
//! Exit codes: `0` on success, `1` for usage errors (bad flags, bad flag
//! combinations, IO problems), `2` for numerical failures.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellipstat_core::bem::{self, BemError};
use ellipstat_core::mesh::generate;
use ellipstat_core::geometry::GeometryError;
use ellipstat_core::{analytic, oracle, spectral, Ellipse};

use crate::convergence;
use crate::density::{self, ResolvedDensity};
use crate::meshio;
use crate::report::{EllipseSpec, EnergyReport, Method, Parameters};
use crate::tables;

/// Electrostatics of a uniformly and affinely charged elliptical disc.
#[derive(Debug, Parser)]
#[command(name = "ellipstat", version, about)]
pub struct Cli {
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// The four subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the electrostatic energy by one or more routes.
    Energy(EnergyArgs),
    /// Regenerate the reference tables (exact vs. Galerkin energies).
    Tables(TablesArgs),
    /// Sweep a resolution parameter and report the convergence history.
    Convergence(ConvergenceArgs),
    /// Generate a triangulation of the elliptical disc.
    Mesh(MeshArgs),
}

/// Semi-axes shared by all subcommands.
#[derive(Debug, Args)]
pub struct GeometryFlags {
    /// Semi-major axis (a >= b).
    #[arg(short = 'a', long = "semi-major", default_value_t = 1.0)]
    pub a: f64,
    /// Semi-minor axis.
    #[arg(short = 'b', long = "semi-minor", default_value_t = 1.0)]
    pub b: f64,
}

/// Density selection: at most one of the three sources.
#[derive(Debug, Args)]
pub struct DensityFlags {
    /// Normalized coefficients "α0,α1,α2" of σ = α0 + α1·x1/a + α2·x2/b.
    #[arg(long, value_name = "A0,A1,A2")]
    pub alpha: Option<String>,
    /// Monomial density expression, e.g. "x1 + 2*x2 + 3".
    #[arg(long, value_name = "EXPR")]
    pub sigma: Option<String>,
    /// Basis density shorthand.
    #[arg(long, value_enum)]
    pub density: Option<BasisDensity>,
}

/// The three monomial basis densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisDensity {
    /// σ ≡ 1.
    One,
    /// σ = x1.
    X1,
    /// σ = x2.
    X2,
}

/// Energy route selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodFlag {
    /// Closed form via complete elliptic integrals.
    Analytic,
    /// Spectral series in the normalized Legendre basis.
    Spectral,
    /// P1 Galerkin boundary-element quadrature.
    Bem,
    /// Independent unit-circle quadrature oracle.
    Oracle,
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Comma-separated values with a header row.
    Csv,
    /// One JSON object per line.
    Jsonl,
    /// Aligned human-readable text.
    Text,
}

/// Flags of `ellipstat energy`.
#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Semi-axes.
    #[command(flatten)]
    pub geometry: GeometryFlags,
    /// Density selection.
    #[command(flatten)]
    pub density: DensityFlags,
    /// Route(s) to evaluate, comma-separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "analytic")]
    pub method: Vec<MethodFlag>,
    /// Spectral truncation order (spectral route only).
    #[arg(short = 'N', long = "n-max")]
    pub n_max: Option<u32>,
    /// Mesh refinement level (bem route only).
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=6))]
    pub level: Option<u32>,
    /// Gauss order for regular triangle pairs (bem route only).
    #[arg(long)]
    pub q: Option<u32>,
    /// Gauss order for singular triangle pairs (bem route only).
    #[arg(long = "q-sing")]
    pub q_sing: Option<u32>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print energies with four truncated decimals instead of full precision.
    #[arg(long)]
    pub rounded: bool,
}

/// Flags of `ellipstat tables`.
#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Which tables to regenerate (1, 2 and/or 3).
    #[arg(long = "table", value_delimiter = ',', default_values_t = [1u8, 2u8])]
    pub table: Vec<u8>,
    /// Refinement level of the computed rows (default 3; table 3 default 5).
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=6))]
    pub level: Option<u32>,
    /// Gauss order for regular triangle pairs.
    #[arg(long)]
    pub q: Option<u32>,
    /// Gauss order for singular triangle pairs.
    #[arg(long = "q-sing")]
    pub q_sing: Option<u32>,
    /// Output encoding for stdout mode (csv or text).
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output directory; writes tableN.csv and tableN.txt per table.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Round CSV energies to four truncated decimals.
    #[arg(long)]
    pub rounded: bool,
}

/// Flags of `ellipstat convergence`.
#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Semi-axes.
    #[command(flatten)]
    pub geometry: GeometryFlags,
    /// Density selection.
    #[command(flatten)]
    pub density: DensityFlags,
    /// Route to sweep (spectral or bem).
    #[arg(long, value_enum)]
    pub method: MethodFlag,
    /// First truncation order / refinement level.
    #[arg(long, default_value_t = 0)]
    pub from: u32,
    /// Last truncation order / refinement level (default 30 / 4).
    #[arg(long)]
    pub to: Option<u32>,
    /// Gauss order for regular triangle pairs (bem only).
    #[arg(long)]
    pub q: Option<u32>,
    /// Gauss order for singular triangle pairs (bem only).
    #[arg(long = "q-sing")]
    pub q_sing: Option<u32>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Flags of `ellipstat mesh`.
#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Semi-axes.
    #[command(flatten)]
    pub geometry: GeometryFlags,
    /// Refinement level.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=6))]
    pub level: u32,
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Failures that map to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations — exit code 1.
    Usage(String),
    /// The numerics could not deliver — exit code 2.
    Numerical(String),
    /// Filesystem trouble — exit code 1.
    Io(io::Error),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<BemError> for CliError {
    fn from(e: BemError) -> Self {
        match e {
            BemError::ZeroQuadratureOrder => CliError::Usage(e.to_string()),
            BemError::DegenerateTriangle { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

/// Parses the process arguments, runs the command, returns the exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Energy(args) => {
            let rendered = energy_output(&args)?;
            write_output(args.out.as_deref(), &rendered)
        }
        Command::Tables(args) => run_tables(&args),
        Command::Convergence(args) => {
            let rendered = convergence_output(&args)?;
            write_output(args.out.as_deref(), &rendered)
        }
        Command::Mesh(args) => {
            let rendered = mesh_output(&args)?;
            write_output(args.out.as_deref(), &rendered)
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => io::stdout().lock().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn parse_alpha(s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "--alpha wants three comma-separated coefficients, got {}",
            parts.len()
        )));
    }
    let mut alpha = [0.0; 3];
    for (slot, part) in alpha.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| {
            CliError::Usage(format!("--alpha coefficient `{}` is not a number", part.trim()))
        })?;
    }
    Ok(alpha)
}

fn resolve_density(flags: &DensityFlags, e: &Ellipse) -> Result<ResolvedDensity, CliError> {
    let sources = flags.alpha.is_some() as u8
        + flags.sigma.is_some() as u8
        + flags.density.is_some() as u8;
    if sources > 1 {
        return Err(CliError::Usage(
            "give at most one of --alpha, --sigma, --density".to_string(),
        ));
    }
    if let Some(s) = &flags.alpha {
        return density::from_alpha(parse_alpha(s)?).map_err(CliError::Usage);
    }
    if let Some(s) = &flags.sigma {
        let c = density::parse_sigma(s).map_err(CliError::Usage)?;
        return density::from_monomial(c, e, density::describe_monomial(c))
            .map_err(CliError::Usage);
    }
    let (c, name) = match flags.density.unwrap_or(BasisDensity::One) {
        BasisDensity::One => ([1.0, 0.0, 0.0], "1"),
        BasisDensity::X1 => ([0.0, 1.0, 0.0], "x1"),
        BasisDensity::X2 => ([0.0, 0.0, 1.0], "x2"),
    };
    density::from_monomial(c, e, name.to_string()).map_err(CliError::Usage)
}

/// Computes the `energy` reports and renders them in the chosen format.
pub fn energy_output(args: &EnergyArgs) -> Result<String, CliError> {
    let e = Ellipse::new(args.geometry.a, args.geometry.b)?;
    let d = resolve_density(&args.density, &e)?;
    let methods = &args.method;
    if args.n_max.is_some() && !methods.contains(&MethodFlag::Spectral) {
        return Err(CliError::Usage(
            "-N sets the spectral truncation order; add --method spectral".to_string(),
        ));
    }
    if (args.level.is_some() || args.q.is_some() || args.q_sing.is_some())
        && !methods.contains(&MethodFlag::Bem)
    {
        return Err(CliError::Usage(
            "--level, --q and --q-sing configure the bem route; add --method bem".to_string(),
        ));
    }
    let exact = analytic::theorem1_energy(&e, &d.normalized).total;
    let ellipse_spec = EllipseSpec { a: e.a(), b: e.b() };
    let mut reports = Vec::new();
    for &m in methods {
        let report = match m {
            MethodFlag::Analytic => EnergyReport::new(
                Method::Analytic,
                ellipse_spec,
                d.spec.clone(),
                Parameters::default(),
                exact,
                None,
            ),
            MethodFlag::Spectral => {
                let n = args.n_max.unwrap_or(30);
                let value = spectral::energy_of_density(
                    &e,
                    |x1, x2| d.normalized.evaluate(&e, x1, x2),
                    n,
                );
                EnergyReport::new(
                    Method::Spectral,
                    ellipse_spec,
                    d.spec.clone(),
                    Parameters { n_max: Some(n), ..Parameters::default() },
                    value,
                    Some(exact),
                )
            }
            MethodFlag::Bem => {
                let level = args.level.unwrap_or(3);
                let q = args.q.unwrap_or(bem::DEFAULT_Q);
                let q_sing = args.q_sing.unwrap_or(bem::DEFAULT_Q_SING);
                let mesh = generate(&e, level);
                let value = bem::bem_energy_with(&mesh, &d.normalized, q, q_sing)?;
                EnergyReport::new(
                    Method::Bem,
                    ellipse_spec,
                    d.spec.clone(),
                    Parameters {
                        level: Some(level),
                        q: Some(q),
                        q_sing: Some(q_sing),
                        ..Parameters::default()
                    },
                    value,
                    Some(exact),
                )
            }
            MethodFlag::Oracle => {
                if !(e.a() == 1.0 && e.b() == 1.0) {
                    return Err(CliError::Usage(
                        "the oracle route is defined on the unit circle only (-a 1 -b 1)"
                            .to_string(),
                    ));
                }
                let c = d.spec.coefficients;
                let result = if c == [1.0, 0.0, 0.0] {
                    oracle::i_sigma0_circle_quadrature()
                } else if c == [0.0, 1.0, 0.0] {
                    oracle::i_c_semianalytic()
                } else {
                    return Err(CliError::Usage(
                        "the oracle route supports only the unit-circle densities `1` and `x1`"
                            .to_string(),
                    ));
                };
                let variant = match result.method {
                    oracle::OracleMethod::SemiAnalytic => "semi_analytic",
                    oracle::OracleMethod::NestedQuadrature => "nested_quadrature",
                };
                EnergyReport::new(
                    Method::Oracle,
                    ellipse_spec,
                    d.spec.clone(),
                    Parameters { variant: Some(variant), ..Parameters::default() },
                    result.value,
                    Some(exact),
                )
            }
        };
        reports.push(report);
    }
    Ok(render_reports(&reports, args.format, args.rounded))
}

fn render_reports(reports: &[EnergyReport], format: Format, rounded: bool) -> String {
    match format {
        Format::Jsonl => {
            let mut out = String::new();
            for r in reports {
                out.push_str(&r.to_json_line());
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(EnergyReport::CSV_HEADER).expect("in-memory csv");
            for r in reports {
                w.write_record(r.csv_record(rounded)).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
        }
        Format::Text => {
            let mut out = String::new();
            for r in reports {
                out.push_str(&r.text_line(rounded));
                out.push('\n');
            }
            out
        }
    }
}

/// One rendered reference table.
pub struct RenderedTable {
    /// Table number (1, 2 or 3).
    pub index: u8,
    /// Long-form CSV.
    pub csv: String,
    /// Aligned text with the traditional four-decimal cells.
    pub text: String,
}

/// Builds every requested table, rendered both ways.
pub fn tables_outputs(args: &TablesArgs) -> Result<Vec<RenderedTable>, CliError> {
    let q = args.q.unwrap_or(bem::DEFAULT_Q);
    let q_sing = args.q_sing.unwrap_or(bem::DEFAULT_Q_SING);
    if args.table.is_empty() {
        return Err(CliError::Usage("no tables selected".to_string()));
    }
    let mut out = Vec::new();
    for &index in &args.table {
        let rendered = match index {
            1 => {
                let t = tables::table1(args.level.unwrap_or(3), q, q_sing)?;
                RenderedTable {
                    index,
                    csv: tables::render_csv(&t, args.rounded),
                    text: tables::render_text(&t),
                }
            }
            2 => {
                let t = tables::table2(args.level.unwrap_or(3), q, q_sing)?;
                RenderedTable {
                    index,
                    csv: tables::render_csv(&t, args.rounded),
                    text: tables::render_text(&t),
                }
            }
            3 => {
                let t = tables::table3(args.level.unwrap_or(5), q, q_sing)?;
                RenderedTable {
                    index,
                    csv: tables::render_error_csv(&t),
                    text: tables::render_error_text(&t),
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown table {other}; the tables are 1, 2 and 3"
                )))
            }
        };
        out.push(rendered);
    }
    Ok(out)
}

fn run_tables(args: &TablesArgs) -> Result<(), CliError> {
    let rendered = tables_outputs(args)?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for t in &rendered {
                std::fs::write(dir.join(format!("table{}.csv", t.index)), &t.csv)?;
                std::fs::write(dir.join(format!("table{}.txt", t.index)), &t.text)?;
            }
            Ok(())
        }
        None => {
            let mut out = String::new();
            for (i, t) in rendered.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                match args.format {
                    Format::Csv => out.push_str(&t.csv),
                    Format::Text => out.push_str(&t.text),
                    Format::Jsonl => {
                        return Err(CliError::Usage(
                            "tables are emitted as csv or text".to_string(),
                        ))
                    }
                }
            }
            write_output(None, &out)
        }
    }
}

/// Computes and renders a convergence sweep.
pub fn convergence_output(args: &ConvergenceArgs) -> Result<String, CliError> {
    let e = Ellipse::new(args.geometry.a, args.geometry.b)?;
    let d = resolve_density(&args.density, &e)?;
    let rows = match args.method {
        MethodFlag::Spectral => {
            if args.q.is_some() || args.q_sing.is_some() {
                return Err(CliError::Usage(
                    "--q and --q-sing configure the bem route".to_string(),
                ));
            }
            let to = args.to.unwrap_or(30);
            check_range(args.from, to)?;
            convergence::spectral_sweep(&e, &d.normalized, args.from, to)
        }
        MethodFlag::Bem => {
            let to = args.to.unwrap_or(4);
            check_range(args.from, to)?;
            if to > 6 {
                return Err(CliError::Usage(
                    "refinement levels above 6 are out of range".to_string(),
                ));
            }
            convergence::bem_sweep(
                &e,
                &d.normalized,
                args.from,
                to,
                args.q.unwrap_or(bem::DEFAULT_Q),
                args.q_sing.unwrap_or(bem::DEFAULT_Q_SING),
            )?
        }
        MethodFlag::Analytic | MethodFlag::Oracle => {
            return Err(CliError::Usage(
                "convergence sweeps exist for the spectral and bem routes".to_string(),
            ))
        }
    };
    Ok(match args.format {
        Format::Csv => convergence::render_csv(&rows),
        Format::Jsonl => convergence::render_jsonl(&rows),
        Format::Text => convergence::render_text(&rows),
    })
}

fn check_range(from: u32, to: u32) -> Result<(), CliError> {
    if to < from {
        Err(CliError::Usage(format!("empty sweep range: --from {from} --to {to}")))
    } else {
        Ok(())
    }
}

/// Generates a mesh and renders it in the interchange text format.
pub fn mesh_output(args: &MeshArgs) -> Result<String, CliError> {
    let e = Ellipse::new(args.geometry.a, args.geometry.b)?;
    let mesh = generate(&e, args.level);
    let mut buf = Vec::new();
    meshio::write_mesh(&mesh, &mut buf)?;
    Ok(String::from_utf8(buf).expect("mesh format is ascii"))
}
