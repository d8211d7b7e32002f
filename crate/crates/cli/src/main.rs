//! Command-line front end for the learning-curve library: exact
//! curves, Monte-Carlo ensembles, asymptotic predictions, power-law
//! fits, noisy-label losses, corpus statistics, and figure presets,
//! emitted as CSV, JSON, and self-contained SVG files.

mod plot;

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scaling_lab::asymptotics::prediction_for_family;
use scaling_lab::corpus;
use scaling_lab::csvio::{read_curve_table_file, write_curve_table, write_curve_table_file};
use scaling_lab::curves::{curve_table, inst_mean};
use scaling_lab::noisy::{closed_form_loss, exact_loss, simulate_noisy, NoiseModel};
use scaling_lab::powerfit::fit_power_law;
use scaling_lab::series::CurveTable;
use scaling_lab::sim::run_ensemble;
use scaling_lab::{
    CurveKind, CurveSeries, DistSpec, EnsembleCurves, ExperimentConfig, FeatureDistribution,
    PowerLawFit,
};

use plot::{render_plot, Axes, LineStyle, PlotSeries, PlotSpec, PALETTE};

/// Errors split by exit code: problems with the request exit 2,
/// problems while computing or writing exit 1.
#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Run(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Run(msg) => f.write_str(msg),
        }
    }
}

impl From<scaling_lab::Error> for CliError {
    fn from(e: scaling_lab::Error) -> Self {
        use scaling_lab::Error as E;
        match e {
            // Everything the user stated on the command line.
            E::BadDistSpec { .. }
            | E::BadParameter { .. }
            | E::BadWeight { .. }
            | E::EmptyWeights
            | E::EmptyTruncation
            | E::BadHorizon(_)
            | E::BadRuns(_)
            | E::BadNoiseLevel(_)
            | E::BadLossScale(_)
            | E::EmptyFitWindow { .. }
            | E::UnsupportedFamily { .. } => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Run(format!("json error: {e}"))
    }
}

/// Learning curves of a memorizing classifier: compute, simulate,
/// approximate, and fit them.
#[derive(Parser)]
#[command(name = "scaling-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact curve table (means, variances, cumulative) as CSV.
    Curve(CurveArgs),
    /// Monte-Carlo ensemble curves with standard errors, as CSV.
    Simulate(SimulateArgs),
    /// Closed-form asymptotic predictions, as CSV.
    Predict(PredictArgs),
    /// Least-squares power-law fit of a CSV curve column, as JSON.
    Fit(FitArgs),
    /// Loss curves under label noise (closed form, exact, simulated).
    Noisy(NoisyArgs),
    /// Tokenize a text; emit rank-frequency and novelty-curve CSVs.
    Corpus(CorpusArgs),
    /// Standard figure presets, one directory of CSV/JSON/SVG each.
    Figures(FiguresArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotAxes {
    /// Logarithmic n axis and value axis.
    LogLog,
    /// Logarithmic n axis, linear value axis.
    LogLinear,
}

impl From<PlotAxes> for Axes {
    fn from(a: PlotAxes) -> Axes {
        match a {
            PlotAxes::LogLog => Axes::LogLog,
            PlotAxes::LogLinear => Axes::LogLinear,
        }
    }
}

#[derive(Args)]
struct CurveArgs {
    /// Distribution spec, e.g. uniform:m=10 or zipf:alpha=1,trunc=100000.
    #[arg(long)]
    dist: String,
    /// Largest sample size n in the table.
    #[arg(long, default_value_t = 1000)]
    n_max: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the mean curves to this SVG file.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Axis scales for --plot.
    #[arg(long, value_enum, default_value = "log-log", requires = "plot")]
    axes: PlotAxes,
}

#[derive(Args)]
struct SimulateArgs {
    /// Distribution spec, e.g. zipf:alpha=1,trunc=1000.
    #[arg(long)]
    dist: String,
    /// Independent runs averaged together.
    #[arg(long, default_value_t = 100)]
    runs: u64,
    /// Largest sample size simulated.
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
    /// Seed for every random draw in this command.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiplier applied to every mean and standard error, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    loss_scale: f64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the ensemble curves, with error bands, to this SVG.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Axis scales for --plot.
    #[arg(long, value_enum, default_value = "log-log", requires = "plot")]
    axes: PlotAxes,
}

#[derive(Args)]
struct PredictArgs {
    /// Distribution spec; needs a family with a closed-form prediction
    /// (zipf or exp).
    #[arg(long)]
    dist: String,
    /// Comma-separated sample sizes, e.g. 1,10,100,1000.
    #[arg(long)]
    n: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV, as written by curve, simulate, noisy, or corpus.
    #[arg(long)]
    input: PathBuf,
    /// Curve column to fit, e.g. inst_mean or mc_timeavg_mean.
    #[arg(long, default_value = "inst_mean")]
    column: String,
    /// Smallest n in the fit window (data minimum when omitted).
    #[arg(long)]
    n_min: Option<u64>,
    /// Largest n in the fit window (data maximum when omitted).
    #[arg(long)]
    n_max: Option<u64>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoisyMode {
    /// Two-term surrogate, exact at noise levels 0 and 1 and within a
    /// factor of two everywhere else.
    Closed,
    /// Full expansion; supports horizons up to 200.
    Exact,
    /// Monte-Carlo estimate with empirical standard errors.
    Sim,
}

#[derive(Args)]
struct NoisyArgs {
    /// Distribution spec.
    #[arg(long)]
    dist: String,
    /// Label flip probability, in [0, 1].
    #[arg(long)]
    gamma: f64,
    /// Largest sample size in the curve.
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
    /// How to evaluate the loss curve.
    #[arg(long, value_enum)]
    mode: NoisyMode,
    /// Runs averaged in sim mode.
    #[arg(long, default_value_t = 1000)]
    runs: u64,
    /// Seed for sim mode.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorpusMode {
    /// One pass over the text in its written order.
    Stream,
    /// Ensemble of i.i.d. resamples from the word frequencies.
    Iid,
}

#[derive(Args)]
struct CorpusArgs {
    /// Text file to analyze (a bundled sample text when omitted).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Keep only the first w words.
    #[arg(long)]
    limit_words: Option<usize>,
    /// Novelty-curve construction.
    #[arg(long, value_enum, default_value = "stream")]
    mode: CorpusMode,
    /// Runs averaged in iid mode.
    #[arg(long, default_value_t = 1000)]
    runs: u64,
    /// Seed for iid mode.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest word count kept in the rank-frequency fit.
    #[arg(long, default_value_t = 1)]
    min_count: u64,
    /// Cap the novelty-curve fit window at this n.
    #[arg(long)]
    fit_n_max: Option<u64>,
    /// Directory receiving frequency.csv and curve.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FiguresArgs {
    /// Which preset: 1 (ensemble panels, uniform and Zipf), 2
    /// (power-law fit overlays), 4 (uniform, k sweep), 5 (Zipf, k
    /// sweep).
    #[arg(long)]
    which: u32,
    /// Zipf exponent used by preset 2.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Seed for the simulated overlays.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "figures")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match setup_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// Apply the SCALING_LAB_THREADS cap before any parallel work starts.
/// 0 and unset both mean one worker per core.
fn setup_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SCALING_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "SCALING_LAB_THREADS must be a worker count, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Run(format!("thread pool setup failed: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Curve(args) => cmd_curve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Noisy(args) => cmd_noisy(args),
        Command::Corpus(args) => cmd_corpus(args),
        Command::Figures(args) => cmd_figures(args),
    }
}

/// Parse and build a distribution spec string.
fn build_dist(spec: &str) -> Result<(DistSpec, FeatureDistribution), CliError> {
    let parsed: DistSpec = spec.parse()?;
    let dist = parsed.build()?;
    Ok((parsed, dist))
}

/// Write a curve table to a file, or to stdout when no path is given.
fn emit_table(out: Option<&Path>, table: &CurveTable) -> Result<(), CliError> {
    match out {
        Some(path) => write_curve_table_file(path, table)?,
        None => {
            let mut buf = Vec::new();
            write_curve_table(&mut buf, table)?;
            std::io::stdout().write_all(&buf)?;
        }
    }
    Ok(())
}

/// Write text to a file, or to stdout when no path is given.
fn emit_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_curve(args: CurveArgs) -> Result<(), CliError> {
    let (_, dist) = build_dist(&args.dist)?;
    let table = curve_table(&dist, args.n_max)?;
    emit_table(args.out.as_deref(), &table)?;
    if let Some(path) = args.plot {
        let col = |kind: CurveKind| table.column(kind).expect("curve tables carry all columns");
        let series_list = [
            (CurveKind::InstMean, "instantaneous error"),
            (CurveKind::TimeAvgMean, "time-averaged error"),
            (CurveKind::CumulativeMean, "cumulative errors"),
        ]
        .into_iter()
        .enumerate()
        .map(|(i, (kind, label))| PlotSeries {
            series: col(kind),
            label: label.to_string(),
            color: PALETTE[i],
            style: LineStyle::Solid,
            markers: false,
            band: false,
        })
        .collect();
        render_plot(&PlotSpec {
            title: format!("Exact learning curves, {}", args.dist.trim()),
            y_label: "error".into(),
            axes: args.axes.into(),
            series_list,
            output_path: path,
        })?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let (spec, dist) = build_dist(&args.dist)?;
    let config = ExperimentConfig {
        seed: args.seed,
        runs_k: args.runs,
        horizon_n: args.horizon,
        loss_scale: args.loss_scale,
        dist_spec: spec.to_string(),
    };
    let curves = run_ensemble(&dist, &config)?;
    emit_table(args.out.as_deref(), &curves.table())?;
    if let Some(path) = args.plot {
        render_plot(&PlotSpec {
            title: format!(
                "Simulated learning curves, {} (k={})",
                args.dist.trim(),
                args.runs
            ),
            y_label: "error".into(),
            axes: args.axes.into(),
            series_list: mc_plot_series(&curves, args.runs),
            output_path: path,
        })?;
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let spec: DistSpec = args.dist.parse()?;
    let pred = prediction_for_family(&spec.family)?;
    let ns = parse_n_list(&args.n)?;
    let mut csv = String::from("n,predicted_inst_mean,beta,coefficient\n");
    for n in ns {
        let _ = writeln!(
            csv,
            "{n},{},{},{}",
            pred.evaluate(n),
            pred.beta,
            pred.coefficient
        );
    }
    emit_text(args.out.as_deref(), &csv)
}

/// Comma-separated strictly positive sample sizes.
fn parse_n_list(raw: &str) -> Result<Vec<u64>, CliError> {
    let mut ns = Vec::new();
    for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let n: u64 = item
            .parse()
            .map_err(|_| CliError::Usage(format!("bad sample size '{item}' in --n")))?;
        if n == 0 {
            return Err(CliError::Usage(
                "predictions need sample sizes n >= 1".into(),
            ));
        }
        ns.push(n);
    }
    if ns.is_empty() {
        return Err(CliError::Usage("--n needs at least one sample size".into()));
    }
    Ok(ns)
}

/// The fit JSON shape: exactly the four numbers a regression test pins.
#[derive(Serialize)]
struct FitJson {
    beta_hat: f64,
    c_hat: f64,
    rmse_log: f64,
    points_used: usize,
}

impl From<&PowerLawFit> for FitJson {
    fn from(fit: &PowerLawFit) -> Self {
        FitJson {
            beta_hat: fit.beta_hat,
            c_hat: fit.c_hat,
            rmse_log: fit.rmse_log,
            points_used: fit.points_used,
        }
    }
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let table = read_curve_table_file(&args.input).map_err(|e| match e {
        scaling_lab::Error::Io(io) => {
            CliError::Run(format!("cannot read {}: {io}", args.input.display()))
        }
        other => other.into(),
    })?;
    let series = table.column_by_name(&args.column).ok_or_else(|| {
        CliError::Usage(format!("input has no curve column '{}'", args.column))
    })?;
    let n_min = args
        .n_min
        .unwrap_or_else(|| series.points.first().map_or(1, |p| p.n.max(1)));
    let n_max = args
        .n_max
        .unwrap_or_else(|| series.points.last().map_or(1, |p| p.n));
    let fit = fit_power_law(series, n_min, n_max)?;
    let mut json = serde_json::to_string_pretty(&FitJson::from(&fit))?;
    json.push('\n');
    emit_text(args.out.as_deref(), &json)
}

fn cmd_noisy(args: NoisyArgs) -> Result<(), CliError> {
    let (_, dist) = build_dist(&args.dist)?;
    let noise = NoiseModel::Uniform(args.gamma);
    let series = match args.mode {
        NoisyMode::Closed => {
            let values: Result<Vec<(u64, f64)>, scaling_lab::Error> = (0..=args.horizon)
                .map(|n| closed_form_loss(&dist, args.gamma, n).map(|v| (n, v)))
                .collect();
            CurveSeries::from_values(CurveKind::InstMean, dist.series_meta(), values?)
        }
        NoisyMode::Exact => {
            let values: Result<Vec<(u64, f64)>, scaling_lab::Error> = (0..=args.horizon)
                .map(|n| exact_loss(&dist, &noise, n).map(|v| (n, v)))
                .collect();
            CurveSeries::from_values(CurveKind::InstMean, dist.series_meta(), values?)
        }
        NoisyMode::Sim => simulate_noisy(&dist, &noise, args.horizon, args.runs, args.seed)?,
    };
    let table = CurveTable::new(series.meta.clone(), vec![series]);
    emit_table(args.out.as_deref(), &table)
}

#[derive(Serialize)]
struct RankFitJson {
    beta_hat: f64,
    c_hat: f64,
    rmse_log: f64,
    points_used: usize,
    alpha_hat: f64,
    zipf_like: bool,
}

#[derive(Serialize)]
struct CorpusJson {
    token_count: usize,
    distinct_words: usize,
    rank_fit: RankFitJson,
    curve_fit: FitJson,
}

fn cmd_corpus(args: CorpusArgs) -> Result<(), CliError> {
    let text = match &args.file {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Run(format!("cannot read {}: {e}", path.display())))?,
        None => corpus::bundled_sample_text().to_string(),
    };
    let tokens = corpus::tokenize(&text, args.limit_words);
    let freq = corpus::FrequencyTable::from_tokens(&tokens)?;
    fs::create_dir_all(&args.out_dir)?;

    let mut freq_csv = String::from("rank,word,count,rel_freq\n");
    for (i, (word, count)) in freq.entries.iter().enumerate() {
        let _ = writeln!(freq_csv, "{},{word},{count},{}", i + 1, freq.rel_freq(i));
    }
    fs::write(args.out_dir.join("frequency.csv"), freq_csv)?;

    let (curve, fit_kind) = match args.mode {
        CorpusMode::Stream => (corpus::novelty_table(&tokens)?, CurveKind::TimeAvgMean),
        CorpusMode::Iid => {
            let series = corpus::novelty_curve(
                &tokens,
                &corpus::NoveltyMode::Iid {
                    seed: args.seed,
                    runs: args.runs,
                },
            )?;
            (
                CurveTable::new(series.meta.clone(), vec![series]),
                CurveKind::McInstMean,
            )
        }
    };
    write_curve_table_file(args.out_dir.join("curve.csv"), &curve)?;

    let rank_fit = corpus::zipf_rank_fit(&freq, args.min_count)?;
    let series = curve
        .column(fit_kind)
        .expect("the novelty table carries the fitted column");
    let n_max = args
        .fit_n_max
        .unwrap_or_else(|| series.points.last().map_or(1, |p| p.n));
    let curve_fit = fit_power_law(series, 1, n_max)?;
    let report = CorpusJson {
        token_count: tokens.len(),
        distinct_words: freq.entries.len(),
        rank_fit: RankFitJson {
            beta_hat: rank_fit.fit.beta_hat,
            c_hat: rank_fit.fit.c_hat,
            rmse_log: rank_fit.fit.rmse_log,
            points_used: rank_fit.fit.points_used,
            alpha_hat: rank_fit.alpha_hat,
            zipf_like: rank_fit.zipf_like,
        },
        curve_fit: FitJson::from(&curve_fit),
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit_text(None, &json)
}

/// Sample sizes in the standard ensemble presets, matching the runs
/// the reference experiments average.
const PRESET_RUNS: [u64; 4] = [1, 10, 100, 1000];
const PRESET_HORIZON: u64 = 50;

fn cmd_figures(args: FiguresArgs) -> Result<(), CliError> {
    fs::create_dir_all(&args.out)?;
    match args.which {
        1 => figure_panels(&args.out, args.seed),
        2 => figure_fit_overlays(&args.out, args.alpha),
        4 => figure_k_sweep(&args.out, "uniform:m=10", 4, args.seed),
        5 => figure_k_sweep(&args.out, "zipf:alpha=1", 5, args.seed),
        other => Err(CliError::Usage(format!(
            "no figure preset {other}: available presets are 1, 2, 4, and 5 \
             (corpus figures need an external text; see the corpus subcommand)"
        ))),
    }
}

/// Run one ensemble under the shared preset geometry.
fn preset_ensemble(spec: &str, runs: u64, seed: u64) -> Result<EnsembleCurves, CliError> {
    let (parsed, dist) = build_dist(spec)?;
    let config = ExperimentConfig {
        seed,
        runs_k: runs,
        horizon_n: PRESET_HORIZON,
        loss_scale: 1.0,
        dist_spec: parsed.to_string(),
    };
    Ok(run_ensemble(&dist, &config)?)
}

/// Exact curves and a simulated ensemble on one log-log panel:
/// instantaneous, time-averaged, and cumulative errors, with
/// one-standard-error bands on the simulated series.
fn mc_plot_series(mc: &EnsembleCurves, runs: u64) -> Vec<PlotSeries<'_>> {
    [
        (&mc.inst, "instantaneous", 0),
        (&mc.timeavg, "time-averaged", 1),
        (&mc.cumulative, "cumulative", 2),
    ]
    .into_iter()
    .map(|(series, name, i)| PlotSeries {
        series,
        label: format!("simulated {name} (k={runs})"),
        color: PALETTE[i],
        style: LineStyle::Dashed,
        markers: true,
        band: true,
    })
    .collect()
}

fn panel_series<'a>(exact: &'a CurveTable, mc: &'a EnsembleCurves, runs: u64) -> Vec<PlotSeries<'a>> {
    let col = |kind: CurveKind| exact.column(kind).expect("curve tables carry all columns");
    let mut list = Vec::with_capacity(6);
    for (kind, series, name, i) in [
        (CurveKind::InstMean, &mc.inst, "instantaneous", 0),
        (CurveKind::TimeAvgMean, &mc.timeavg, "time-averaged", 1),
        (CurveKind::CumulativeMean, &mc.cumulative, "cumulative", 2),
    ] {
        list.push(PlotSeries {
            series: col(kind),
            label: format!("exact {name}"),
            color: PALETTE[i],
            style: LineStyle::Solid,
            markers: false,
            band: false,
        });
        list.push(PlotSeries {
            series,
            label: format!("simulated {name} (k={runs})"),
            color: PALETTE[i],
            style: LineStyle::Dashed,
            markers: true,
            band: true,
        });
    }
    list
}

fn write_panel(
    dir: &Path,
    stem: &str,
    title: String,
    spec: &str,
    runs: u64,
    seed: u64,
) -> Result<(), CliError> {
    let (_, dist) = build_dist(spec)?;
    let exact = curve_table(&dist, PRESET_HORIZON)?;
    let mc = preset_ensemble(spec, runs, seed)?;
    write_curve_table_file(dir.join(format!("{stem}_exact.csv")), &exact)?;
    write_curve_table_file(dir.join(format!("{stem}_mc.csv")), &mc.table())?;
    render_plot(&PlotSpec {
        title,
        y_label: "error".into(),
        axes: Axes::LogLog,
        series_list: panel_series(&exact, &mc, runs),
        output_path: dir.join(format!("{stem}.svg")),
    })
}

/// Preset 1: one uniform panel (k=100) and one Zipf panel (k=10).
fn figure_panels(dir: &Path, seed: u64) -> Result<(), CliError> {
    write_panel(
        dir,
        "fig1_uniform",
        "Learning curves, uniform m=10, k=100 runs".into(),
        "uniform:m=10",
        100,
        seed,
    )?;
    write_panel(
        dir,
        "fig1_zipf",
        "Learning curves, Zipf alpha=1, k=10 runs".into(),
        "zipf:alpha=1",
        10,
        seed.wrapping_add(1),
    )
}

#[derive(Serialize)]
struct TheoryJson {
    beta: f64,
    coefficient: f64,
    valid_from_n: u64,
}

#[derive(Serialize)]
struct OverlayFitJson {
    fitted: FitJson,
    theory: TheoryJson,
}

/// Preset 2: the exact Zipf curve with its fitted power law and the
/// predicted c_a n^-b overlay, on a geometric grid up to n = 10^4.
fn figure_fit_overlays(dir: &Path, alpha: f64) -> Result<(), CliError> {
    let spec = format!("zipf:alpha={alpha}");
    let (parsed, dist) = build_dist(&spec)?;
    let pred = prediction_for_family(&parsed.family)?;

    let n_max = 10_000u64;
    let mut grid: Vec<u64> = (0..=96)
        .map(|i| 10f64.powf(f64::from(i) / 24.0).round() as u64)
        .filter(|&n| n >= 1 && n <= n_max)
        .collect();
    grid.dedup();

    let meta = dist.series_meta();
    let exact = CurveSeries::from_values(
        CurveKind::InstMean,
        meta.clone(),
        grid.iter().map(|&n| (n, inst_mean(&dist, n))),
    );
    let fit = fit_power_law(&exact, pred.valid_from_n.max(10), n_max)?;
    let fitted = CurveSeries::from_values(
        CurveKind::InstMean,
        meta.clone(),
        grid.iter().map(|&n| (n, fit.evaluate(n))),
    );
    let theory = CurveSeries::from_values(
        CurveKind::InstMean,
        meta.clone(),
        grid.iter().map(|&n| (n, pred.evaluate(n))),
    );

    write_curve_table_file(
        dir.join("fig2_curve.csv"),
        &CurveTable::new(meta, vec![exact.clone()]),
    )?;
    let report = OverlayFitJson {
        fitted: FitJson::from(&fit),
        theory: TheoryJson {
            beta: pred.beta,
            coefficient: pred.coefficient,
            valid_from_n: pred.valid_from_n,
        },
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(dir.join("fig2_fit.json"), json)?;

    render_plot(&PlotSpec {
        title: format!("Power-law fit, Zipf alpha={alpha}"),
        y_label: "error".into(),
        axes: Axes::LogLog,
        series_list: vec![
            PlotSeries {
                series: &exact,
                label: "exact curve".into(),
                color: PALETTE[0],
                style: LineStyle::Solid,
                markers: true,
                band: false,
            },
            PlotSeries {
                series: &fitted,
                label: format!("fitted {:.4} n^-{:.4}", fit.c_hat, fit.beta_hat),
                color: PALETTE[1],
                style: LineStyle::Dashed,
                markers: false,
                band: false,
            },
            PlotSeries {
                series: &theory,
                label: format!("predicted {:.4} n^-{:.4}", pred.coefficient, pred.beta),
                color: PALETTE[2],
                style: LineStyle::DashDot,
                markers: false,
                band: false,
            },
        ],
        output_path: dir.join("fig2.svg"),
    })
}

/// Presets 4 and 5: one panel per ensemble size k in {1, 10, 100,
/// 1000}, sharing a single exact table.
fn figure_k_sweep(dir: &Path, spec: &str, number: u32, seed: u64) -> Result<(), CliError> {
    let (_, dist) = build_dist(spec)?;
    let exact = curve_table(&dist, PRESET_HORIZON)?;
    write_curve_table_file(dir.join(format!("fig{number}_exact.csv")), &exact)?;
    for (i, &runs) in PRESET_RUNS.iter().enumerate() {
        let mc = preset_ensemble(spec, runs, seed.wrapping_add(i as u64))?;
        write_curve_table_file(dir.join(format!("fig{number}_k{runs}_mc.csv")), &mc.table())?;
        render_plot(&PlotSpec {
            title: format!("Learning curves, {spec}, k={runs} runs"),
            y_label: "error".into(),
            axes: Axes::LogLog,
            series_list: panel_series(&exact, &mc, runs),
            output_path: dir.join(format!("fig{number}_k{runs}.svg")),
        })?;
    }
    Ok(())
}
