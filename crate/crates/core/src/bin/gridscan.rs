//! `gridscan` command-line entry point.
//!
//! Exit codes: 0 manifold found, 3 no manifold found, 1 usage error,
//! 2 data or I/O error.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gridscan_core::bench::write_bench_csv;
use gridscan_core::io::save_points;
use gridscan_core::{
    build_chain, emit_plot, emit_report, generate, load_points, normalize_to_unit_cube,
    run_bench, scan, BenchOptions, CapPolicy, Dataset, Density, Error, Header, PointFormat,
    RunReport, ScanConfig, ScanOutcome, SyntheticKind, SyntheticSpec, Timings,
    UnitCubeTransform,
};

const EXIT_FOUND: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;

#[derive(Parser)]
#[command(name = "gridscan", version, about = "Find low-dimensional structure in point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid scan and build the manifold if one is found.
    Scan(ScanArgs),
    /// Write a synthetic dataset.
    Gen(GenArgs),
    /// Time the scan against the PCA baseline; prints a CSV table.
    Bench(BenchArgs),
    /// Re-render the figure for a saved report.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for PointFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => PointFormat::Csv,
            FormatArg::Json => PointFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CapArg {
    Full,
    Half,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Diagonal,
    SineCurve,
    Uniform,
    TwoClusters,
}

impl From<KindArg> for SyntheticKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Diagonal => SyntheticKind::Diagonal,
            KindArg::SineCurve => SyntheticKind::SineCurve,
            KindArg::Uniform => SyntheticKind::Uniform,
            KindArg::TwoClusters => SyntheticKind::TwoClusters,
        }
    }
}

/// Where the points come from: a file, or a seeded generator.
#[derive(Args)]
struct SourceArgs {
    /// Point file (CSV or JSON).
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Treat the first CSV row as data even if it is not numeric.
    #[arg(long)]
    no_header: bool,
    /// Generate the points instead of reading them.
    #[arg(long, value_enum)]
    synthetic: Option<KindArg>,
    #[command(flatten)]
    shape: SyntheticShape,
}

#[derive(Args)]
struct SyntheticShape {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0.0)]
    outliers: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SyntheticShape {
    fn spec(&self, kind: SyntheticKind) -> SyntheticSpec {
        SyntheticSpec::new(kind, self.count, self.dim)
            .outliers(self.outliers)
            .seed(self.seed)
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Upper limit V on the kept volume.
    #[arg(long, default_value_t = 0.4)]
    volume_limit: f64,
    /// Fraction of points the kept cells must cover.
    #[arg(long, default_value_t = 0.9)]
    coverage: f64,
    /// Density threshold as a fraction of the point count.
    #[arg(long, default_value_t = 0.005, conflicts_with = "density_abs")]
    density_fraction: f64,
    /// Density threshold as an absolute point count.
    #[arg(long)]
    density_abs: Option<usize>,
    #[arg(long, value_enum, default_value = "full")]
    a_cap: CapArg,
    /// Dimension s of the piecewise-linear manifold.
    #[arg(long, default_value_t = 1)]
    manifold_dim: usize,
    /// Count cells on all cores.
    #[arg(long)]
    parallel: bool,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write an SVG figure here.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Omit wall-clock timings so reports are byte-reproducible.
    #[arg(long)]
    no_timings: bool,
    /// Report only config, outcome and trace.
    #[arg(long)]
    trace_only: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    shape: SyntheticShape,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct BenchArgs {
    /// Point counts, ascending.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long)]
    parallel: bool,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(msg) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

fn load_source(source: &SourceArgs) -> Result<(Dataset, Option<UnitCubeTransform>), Failure> {
    match (&source.input, source.synthetic) {
        (Some(path), _) => {
            let format = source
                .format
                .map_or_else(|| PointFormat::from_path(path), PointFormat::from);
            let header = if source.no_header {
                Header::Absent
            } else {
                Header::Auto
            };
            let raw = load_points(path, format, header)?;
            let (dataset, transform) = normalize_to_unit_cube(&raw)?;
            Ok((dataset, Some(transform)))
        }
        (None, Some(kind)) => Ok((generate(&source.shape.spec(kind.into()))?, None)),
        (None, None) => Err(Failure::Usage(
            "either --input or --synthetic is required".into(),
        )),
    }
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn run_scan(args: &ScanArgs) -> Result<u8, Failure> {
    let t0 = Instant::now();
    let (dataset, transform) = load_source(&args.source)?;
    let load_ms = ms_since(t0);

    let config = ScanConfig {
        volume_limit: args.volume_limit,
        coverage_fraction: args.coverage,
        density: match args.density_abs {
            Some(p) => Density::Absolute(p),
            None => Density::Fraction(args.density_fraction),
        },
        a_cap: match args.a_cap {
            CapArg::Full => CapPolicy::Full,
            CapArg::Half => CapPolicy::Half,
        },
        a_start: 2,
        parallel: args.parallel,
    };
    if args.manifold_dim < 1 {
        return Err(Failure::Usage("--manifold-dim must be at least 1".into()));
    }

    let t1 = Instant::now();
    let outcome = scan(&dataset, &config)?;
    let scan_ms = ms_since(t1);

    let t2 = Instant::now();
    let mut report = RunReport::new(
        &config,
        args.manifold_dim,
        &dataset,
        transform.as_ref(),
        &outcome,
    )?;
    let chain = outcome.kept().map(build_chain).transpose()?;
    let manifold_ms = ms_since(t2);

    if !args.no_timings {
        report = report.with_timings(Timings {
            load: load_ms,
            scan: scan_ms,
            manifold: manifold_ms,
        });
    }
    if args.trace_only {
        report = report.trace_only();
    }

    print_summary(&outcome, &report);
    if let Some(path) = &args.report {
        emit_report(&report, path)?;
    }
    if let Some(path) = &args.plot {
        emit_plot(&dataset, outcome.kept(), chain.as_ref(), path)?;
    }
    Ok(if outcome.is_found() {
        EXIT_FOUND
    } else {
        EXIT_NOT_FOUND
    })
}

fn print_summary(outcome: &ScanOutcome, report: &RunReport) {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let o = &report.outcome;
    let _ = writeln!(
        out,
        "J={} N={} p={} L={} cap={}",
        report.dataset.size, report.dataset.dim, o.effective_p, o.required_coverage, o.resolution_cap
    );
    for t in outcome.trace() {
        let _ = writeln!(
            out,
            "a={:<6} occupied={:<8} kept={:<8} volume={:.4} covered={}",
            t.a, t.occupied, t.kept, t.total_volume, t.covered
        );
    }
    match outcome {
        ScanOutcome::Found { kept, .. } => {
            let _ = writeln!(
                out,
                "found: a={} K={} volume={:.2} covered={}",
                kept.resolution().a(),
                kept.len(),
                kept.total_volume(),
                kept.covered()
            );
        }
        ScanOutcome::NotFound { reason, .. } => {
            let _ = writeln!(out, "not found: {reason:?}");
        }
    }
}

fn run_gen(args: &GenArgs) -> Result<u8, Failure> {
    let dataset = generate(&args.shape.spec(args.kind.into()))?;
    let format = args
        .format
        .map_or_else(|| PointFormat::from_path(&args.output), PointFormat::from);
    save_points(&args.output, format, dataset.points())?;
    Ok(0)
}

fn run_bench_cmd(args: &BenchArgs) -> Result<u8, Failure> {
    if args.sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Failure::Usage("--sizes must be ascending".into()));
    }
    let options = BenchOptions {
        runs: args.runs,
        parallel: args.parallel,
        ..BenchOptions::default()
    };
    let records = run_bench(&args.sizes, args.dim, args.seed, &options)?;
    let write = |w: &mut dyn Write, p: &Path| {
        write_bench_csv(w, &records).map_err(|e| Failure::Data(io_error(p, e)))
    };
    match &args.output {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| Failure::Data(io_error(path, e)))?;
            write(&mut file, path)?;
        }
        None => write(&mut io::stdout().lock(), Path::new("<stdout>"))?,
    }
    Ok(0)
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run_plot(args: &PlotArgs) -> Result<u8, Failure> {
    let report = RunReport::load(&args.report)?;
    let (dataset, _) = load_source(&args.source)?;
    if dataset.dim() != report.dataset.dim {
        return Err(Failure::Data(Error::DimensionMismatch {
            expected: report.dataset.dim,
            found: dataset.dim(),
            line: None,
        }));
    }
    let kept = report.kept()?;
    let chain = kept.as_ref().map(build_chain).transpose()?;
    emit_plot(&dataset, kept.as_ref(), chain.as_ref(), &args.output)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Scan(args) => run_scan(args),
        Command::Gen(args) => run_gen(args),
        Command::Bench(args) => run_bench_cmd(args),
        Command::Plot(args) => run_plot(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
