//! `quakespec` command-line front end.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use quakespec::analysis::{analyze_record, RecordAnalysis, RunConfig, VERSION};
use quakespec::catalog::{self, Component, MapQuery, TableFormat, WaveformFormat};
use quakespec::response::PeriodGrid;
use quakespec::signal::Units;
use quakespec::spectral::Window;
use quakespec::stats::{self, FitModel, GroupBy, Param, ParameterSet, R2Matrix};
use quakespec::synth::{self, SynthKind, SynthSpec};
use quakespec::{Error, Result};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ANALYSIS: u8 = 3;
const EXIT_INSUFFICIENT: u8 = 4;

/// `println!` that exits quietly when stdout is a closed pipe.
macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*)) };
}

fn emit(args: std::fmt::Arguments) {
    use std::io::{ErrorKind, Write};
    if let Err(e) = writeln!(std::io::stdout().lock(), "{args}") {
        if e.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing to stdout: {e}");
        std::process::exit(EXIT_IO.into());
    }
}

#[derive(Parser)]
#[command(name = "quakespec", version, about = "Frequency-content parameters of accelerograms")]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, env = "QS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute all parameters of one record.
    Analyze(AnalyzeArgs),
    /// Analyze every record of a catalog directory.
    Batch(BatchArgs),
    /// Pairwise correlation matrices of a parameter table.
    Correlate(CorrelateArgs),
    /// GeoJSON map of one parameter over the stations.
    Map(MapArgs),
    /// Write a synthetic accelerogram.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Rect,
    Hann,
}

#[derive(Args)]
struct AnalysisFlags {
    #[arg(long, default_value_t = 0.05)]
    damping: f64,
    #[arg(long, default_value_t = 0.02)]
    t_min: f64,
    #[arg(long, default_value_t = 5.0)]
    t_max: f64,
    #[arg(long, default_value_t = 200)]
    n_periods: usize,
    #[arg(long, default_value_t = 0.05)]
    max_df: f64,
    /// Moving-average width (bins) applied before PSD peak picking.
    #[arg(long, default_value_t = 5)]
    smoothing: usize,
    /// Upper integration limit of the spectral moments, Hz.
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, value_enum, default_value = "rect")]
    window: WindowArg,
}

impl AnalysisFlags {
    fn config(&self, output_dir: Option<PathBuf>, parallelism: usize) -> Result<RunConfig> {
        let cfg = RunConfig {
            damping: self.damping,
            period_grid: PeriodGrid {
                min: self.t_min,
                max: self.t_max,
                count: self.n_periods,
            },
            max_df: self.max_df,
            smoothing_bins: self.smoothing,
            moment_cutoff_hz: self.cutoff,
            window: match self.window {
                WindowArg::Rect => Window::Rectangular,
                WindowArg::Hann => Window::Hann,
            },
            output_dir,
            parallelism,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    record: PathBuf,
    #[arg(long, default_value = "two_column_text")]
    format: WaveformFormat,
    #[arg(long, default_value = "m/s2")]
    units: Units,
    #[arg(long, default_value = "H1")]
    component: Component,
    /// Write a one-row table (CSV or JSON by extension) instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Args)]
struct BatchArgs {
    catalog: PathBuf,
    #[arg(long, default_value = "two_column_text")]
    format: WaveformFormat,
    /// Output table (CSV or JSON by extension).
    #[arg(long, default_value = "parameters.csv")]
    out: PathBuf,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Parameter table, or an R² matrix CSV with --from-matrix.
    table: PathBuf,
    #[arg(long, default_value = "affine")]
    model: FitModel,
    #[arg(long, default_value = "all")]
    by: GroupBy,
    /// Comma-separated parameter names.
    #[arg(long)]
    params: Option<String>,
    /// Classify a precomputed R² matrix instead of fitting.
    #[arg(long)]
    from_matrix: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    table: PathBuf,
    catalog: PathBuf,
    #[arg(long)]
    param: String,
    #[arg(long)]
    event: Option<String>,
    /// One point per station and event holding the larger horizontal value.
    #[arg(long)]
    aggregate_horizontal: bool,
    #[arg(long, default_value = "map.geojson")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    Sine,
    Multisine,
    #[value(alias = "band-noise")]
    BandNoise,
    #[value(alias = "filtered-noise")]
    FilteredNoise,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Sine frequency, Hz (repeat for multisine).
    #[arg(long = "f0")]
    f0: Vec<f64>,
    /// Amplitude, m/s² (repeat for multisine); RMS for the noise kinds.
    #[arg(long = "amp")]
    amp: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    #[arg(long, num_args = 2, value_names = ["F_LO", "F_HI"])]
    band: Option<Vec<f64>>,
    #[arg(long = "fn")]
    natural_frequency: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    zeta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 60.0)]
    dur: f64,
    #[arg(long, default_value = "two_column_text")]
    format: WaveformFormat,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::UnknownParameter(_) => EXIT_USAGE,
        Error::Io { .. }
        | Error::EmptyFile { .. }
        | Error::Parse { .. }
        | Error::NonUniformSampling { .. }
        | Error::DanglingReference(_)
        | Error::MissingStations(_)
        | Error::DuplicateId(_)
        | Error::Csv(_)
        | Error::Json(_) => EXIT_IO,
        Error::InsufficientData(_) => EXIT_INSUFFICIENT,
        _ => EXIT_ANALYSIS,
    }
}

fn run(cli: Cli) -> Result<u8> {
    let threads = match cli.threads {
        Some(0) => return Err(Error::InvalidArgument("--threads must be >= 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| match cli.cmd {
        Cmd::Analyze(a) => cmd_analyze(a, threads),
        Cmd::Batch(a) => cmd_batch(a, threads),
        Cmd::Correlate(a) => cmd_correlate(a),
        Cmd::Map(a) => cmd_map(a),
        Cmd::Synth(a) => cmd_synth(a),
    })
}

fn print_failures(label: &str, a: &RecordAnalysis) {
    for f in &a.failures {
        eprintln!("warning: {label}: {}: {}", f.param, f.reason);
    }
}

fn cmd_analyze(args: AnalyzeArgs, threads: usize) -> Result<u8> {
    let cfg = args.flags.config(args.out.as_ref().and_then(|p| p.parent().map(Path::to_path_buf)), threads)?;
    let acc = catalog::load_accelerogram(&args.record, args.format, args.units)?;
    let id = args
        .record
        .file_stem()
        .map_or_else(|| "record".to_string(), |s| s.to_string_lossy().into_owned());
    let a = analyze_record(&acc, &cfg, &id, "", args.component)?;
    print_failures(&id, &a);
    let meta = cfg.metadata("analyze");
    match &args.out {
        Some(path) => {
            let sets = [a.parameters.clone()];
            catalog::write_parameter_table(&sets, path, TableFormat::from_path(path), Some(&meta))?;
        }
        None => {
            let doc = json!({
                "meta": meta,
                "parameters": a.parameters,
                "auxiliary": a.auxiliary,
                "failures": a.failures,
            });
            out!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(if a.computed_count() == 0 { EXIT_ANALYSIS } else { 0 })
}

fn cmd_batch(args: BatchArgs, threads: usize) -> Result<u8> {
    let cfg = args.flags.config(args.out.parent().map(Path::to_path_buf), threads)?;
    let cat = catalog::load_catalog(&args.catalog)?;
    let records: Vec<_> = cat.records.values().collect();
    let results: Vec<Result<RecordAnalysis>> = records
        .par_iter()
        .map(|r| {
            let acc = catalog::load_accelerogram(&cat.waveform_path(r), args.format, r.units)?;
            analyze_record(&acc, &cfg, &r.record_id, &r.event_id, r.component)
        })
        .collect();

    let mut sets: Vec<ParameterSet> = Vec::new();
    let mut skipped = 0usize;
    for (r, res) in records.iter().zip(results) {
        match res {
            Ok(a) if a.computed_count() > 0 => {
                print_failures(&r.record_id, &a);
                sets.push(a.parameters);
            }
            Ok(_) => {
                skipped += 1;
                eprintln!("warning: skipping {}: no parameter could be computed", r.record_id);
            }
            Err(e) => {
                skipped += 1;
                eprintln!("warning: skipping {}: {e}", r.record_id);
            }
        }
    }
    if sets.is_empty() {
        eprintln!("error: all {} records failed", records.len());
        return Ok(EXIT_ANALYSIS);
    }
    let meta = cfg.metadata("batch");
    catalog::write_parameter_table(&sets, &args.out, TableFormat::from_path(&args.out), Some(&meta))?;

    let mut by_event: BTreeMap<&str, BTreeMap<Component, usize>> = BTreeMap::new();
    for s in &sets {
        *by_event.entry(&s.event_id).or_default().entry(s.component).or_default() += 1;
    }
    out!("{} events, {} components", by_event.len(), sets.len());
    for (event, comps) in &by_event {
        let parts: Vec<String> = comps.iter().map(|(c, n)| format!("{c} {n}")).collect();
        out!("  {event}: {}", parts.join(", "));
    }
    if skipped > 0 {
        out!("{skipped} skipped");
    }
    Ok(0)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn cmd_correlate(args: CorrelateArgs) -> Result<u8> {
    let selection = args.params.as_deref().map(stats::parse_param_list).transpose()?;
    if args.from_matrix {
        let text = fs::read_to_string(&args.table).map_err(|e| io_err(&args.table, e))?;
        let m = R2Matrix::parse_csv(&text)?;
        let params = selection.unwrap_or_else(|| m.square_params());
        let counts = m.classify_pairs(&params);
        if counts.total() == 0 {
            return Err(Error::InsufficientData("no classifiable pairs in matrix".into()));
        }
        out!("{counts}");
        return Ok(0);
    }

    let format = TableFormat::from_path(&args.table);
    let sets = catalog::read_parameter_table(&args.table, format)?;
    if sets.len() < stats::MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "{} rows, at least {} required",
            sets.len(),
            stats::MIN_PAIRS
        )));
    }
    let params = selection.unwrap_or_else(|| Param::ALL.to_vec());
    let mut reports = stats::correlation_matrix(&sets, &params, args.model, args.by)?;
    if args.by == GroupBy::Event {
        reports.extend(stats::correlation_matrix(&sets, &params, args.model, GroupBy::All)?);
    }
    let meta = json!({
        "tool": "quakespec",
        "version": VERSION,
        "command": "correlate",
        "model": args.model,
        "group_by": args.by,
        "source": catalog::read_table_meta(&args.table, format)?,
    });
    for r in &reports {
        out!("{}: {}", r.group, r.summary());
        if let Some(dir) = &args.out_dir {
            let stem = format!("correlation_{}", r.group);
            let csv = format!("# {}\n{}", serde_json::to_string(&meta)?, r.to_csv());
            write_text(&dir.join(format!("{stem}.csv")), &csv)?;
            let mut doc = r.to_json();
            doc["meta"] = meta.clone();
            write_text(&dir.join(format!("{stem}.json")), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
    }
    Ok(0)
}

fn cmd_map(args: MapArgs) -> Result<u8> {
    let sets = catalog::read_parameter_table(&args.table, TableFormat::from_path(&args.table))?;
    let cat = catalog::load_catalog(&args.catalog)?;
    let query = MapQuery {
        event_id: args.event.as_deref(),
        aggregate_horizontal: args.aggregate_horizontal,
    };
    let mut fc = catalog::emit_geojson_map(&sets, &cat, &args.param, &query)?;
    let n = fc["features"].as_array().map_or(0, Vec::len);
    fc["metadata"] = json!({
        "tool": "quakespec",
        "version": VERSION,
        "command": "map",
        "param": args.param,
        "event": args.event,
        "source": catalog::read_table_meta(&args.table, TableFormat::from_path(&args.table))?,
    });
    write_text(&args.out, &(serde_json::to_string_pretty(&fc)? + "\n"))?;
    out!("{n} features");
    Ok(0)
}

fn synth_spec(a: &SynthArgs) -> Result<SynthSpec> {
    let need = |what: &str| Error::InvalidArgument(format!("--kind {} requires {what}", kind_label(a.kind)));
    let single_amp = || match a.amp.as_slice() {
        [] => Ok(1.0),
        [x] => Ok(*x),
        _ => Err(Error::InvalidArgument("expected a single --amp".into())),
    };
    let kind = match a.kind {
        KindArg::Sine => match a.f0.as_slice() {
            [f] => SynthKind::Sine {
                frequency: *f,
                amplitude: single_amp()?,
                phase: a.phase,
            },
            _ => return Err(need("exactly one --f0")),
        },
        KindArg::Multisine => {
            if a.f0.is_empty() {
                return Err(need("at least one --f0"));
            }
            let amplitudes = if a.amp.is_empty() { vec![1.0; a.f0.len()] } else { a.amp.clone() };
            SynthKind::Multisine {
                frequencies: a.f0.clone(),
                amplitudes,
            }
        }
        KindArg::BandNoise => {
            let b = a.band.as_deref().ok_or_else(|| need("--band F_LO F_HI"))?;
            SynthKind::BandNoise {
                f_lo: b[0],
                f_hi: b[1],
                rms: single_amp()?,
                seed: a.seed,
            }
        }
        KindArg::FilteredNoise => SynthKind::FilteredNoise {
            natural_frequency: a.natural_frequency.ok_or_else(|| need("--fn"))?,
            damping: a.zeta,
            rms: single_amp()?,
            seed: a.seed,
        },
    };
    let spec = SynthSpec {
        dt: a.dt,
        duration: a.dur,
        kind,
    };
    spec.validate()?;
    Ok(spec)
}

fn kind_label(k: KindArg) -> &'static str {
    match k {
        KindArg::Sine => "sine",
        KindArg::Multisine => "multisine",
        KindArg::BandNoise => "band_noise",
        KindArg::FilteredNoise => "filtered_noise",
    }
}

fn cmd_synth(args: SynthArgs) -> Result<u8> {
    let spec = synth_spec(&args)?;
    let acc = synth::generate(&spec)?;
    let meta: Value = json!({
        "tool": "quakespec",
        "version": VERSION,
        "command": "synth",
        "spec": spec,
    });
    let comments = vec![serde_json::to_string(&meta)?, "units: m/s2".to_string()];
    catalog::write_accelerogram(&acc, &args.out, args.format, &comments)?;
    out!("{} samples, dt {} s -> {}", acc.len(), acc.dt(), args.out.display());
    Ok(0)
}
