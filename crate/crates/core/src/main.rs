use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sensegate::detector::{roc, score, ScoreModel, Threshold};
use sensegate::energy::EnergyParams;
use sensegate::expctl::{
    inject_fp_check, run_sweep, simulate_frames, spearman_matrix, write_sweep_csv,
    write_sweep_json, Positions, SweepGrid,
};
use sensegate::gate::{write_log, GateConfig, PeriodMode};
use sensegate::rng::{derive_seed, rng_from_seed, DETECTOR_TAG};
use sensegate::stream::{generate, load_trace, Frame, StreamSpec, Truth};
use sensegate::{Error, Result};

#[derive(Parser)]
#[command(name = "sensegate", about = "Selective sensor-data transmission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one stream through detector, gate, metrics and energy accounting.
    Simulate(SimulateArgs),
    /// Run a (T, M, f_min, N) parameter sweep.
    Sweep(SweepArgs),
    /// Empirical ROC curve of a detector model.
    Roc(RocArgs),
    /// Worst-case extra transmissions caused by one false positive.
    Fpcheck(FpcheckArgs),
    /// Print the version.
    Version,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorKind {
    Ideal,
    Calibrated,
    Confusion,
    Replay,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Faithful,
    StrictPeriod,
}

impl From<ModeArg> for PeriodMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Faithful => PeriodMode::Faithful,
            ModeArg::StrictPeriod => PeriodMode::StrictPeriod,
        }
    }
}

#[derive(Args)]
struct DetectorArgs {
    #[arg(long, value_enum, default_value = "calibrated")]
    detector: DetectorKind,
    /// Calibrated: build an equal-variance model with this AUC (overrides the means).
    #[arg(long)]
    auc: Option<f64>,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    mu_bg: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_bg: f64,
    #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
    mu_foi: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_foi: f64,
    #[arg(long, default_value_t = 0.9)]
    tpr: f64,
    #[arg(long, default_value_t = 0.05)]
    fpr: f64,
    /// Trace file (`index,label,score`) for the replay detector.
    #[arg(long)]
    trace: Option<PathBuf>,
}

impl DetectorArgs {
    fn model(&self) -> Result<ScoreModel> {
        let model = match self.detector {
            DetectorKind::Ideal => ScoreModel::Ideal,
            DetectorKind::Calibrated => match self.auc {
                Some(auc) => ScoreModel::calibrated_for_auc(auc, self.sigma_bg)?,
                None => ScoreModel::Calibrated {
                    mu_bg: self.mu_bg,
                    sigma_bg: self.sigma_bg,
                    mu_foi: self.mu_foi,
                    sigma_foi: self.sigma_foi,
                },
            },
            DetectorKind::Confusion => ScoreModel::Confusion {
                tpr: self.tpr,
                fpr: self.fpr,
            },
            DetectorKind::Replay => ScoreModel::Replay,
        };
        model.validate()?;
        Ok(model)
    }

    fn trace_frames(&self) -> Result<Option<Vec<Frame>>> {
        match (self.detector, &self.trace) {
            (DetectorKind::Replay, Some(path)) => load_trace(path).map(Some),
            (DetectorKind::Replay, None) => Err(config_err("trace", "replay detector needs --trace")),
            _ => Ok(None),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 100_000)]
    frames: u64,
    #[arg(long, default_value_t = 20.0)]
    ratio_m: f64,
    #[arg(long, default_value_t = 20)]
    segment_len: u32,
    #[command(flatten)]
    detector: DetectorArgs,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 30)]
    fr: u32,
    #[arg(long, default_value_t = 0)]
    fmin: u32,
    #[arg(long, value_enum, default_value = "faithful")]
    period_mode: ModeArg,
    /// Transmit every frame (conventional system).
    #[arg(long)]
    bypass: bool,
    #[arg(long, conflicts_with = "energy_file")]
    energy_preset: Option<String>,
    #[arg(long)]
    energy_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-frame decision log to this CSV file.
    #[arg(long)]
    emit_log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON grid; the built-in default grid is used when omitted.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Also write the Spearman matrix (CSV) here.
    #[arg(long)]
    spearman_out: Option<PathBuf>,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    detector: DetectorArgs,
    /// Number of labeled scores, half FOI and half background.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FpcheckArgs {
    #[arg(long, default_value_t = 16)]
    n_max: u32,
    /// Comma-separated periods k = f_r / f_min; 0 disables the periodic branch.
    #[arg(long, value_delimiter = ',', default_value = "0,2,3,4,5,6,7,8")]
    k_set: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    len: u64,
    #[arg(long, value_enum, default_value = "faithful")]
    period_mode: ModeArg,
}

fn config_err(field: &'static str, reason: &str) -> Error {
    Error::Config {
        field,
        reason: reason.to_string(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Write to `path`, or stdout when `None`.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w).and_then(|_| w.flush()).map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let model = args.detector.model()?;
    let threshold = Threshold::new(args.threshold)?;
    let mut gate = GateConfig::new(args.n, args.fr, args.fmin, args.period_mode.into())?;
    if args.bypass {
        gate = gate.with_bypass(true);
    }
    let energy = match (&args.energy_preset, &args.energy_file) {
        (_, Some(path)) => EnergyParams::from_json_file(path)?,
        (Some(name), None) => EnergyParams::preset(name)?,
        (None, None) => EnergyParams::CALIBRATED,
    };
    let frames = match args.detector.trace_frames()? {
        Some(frames) => frames,
        None => generate(&StreamSpec::new(args.frames, args.ratio_m, args.segment_len, args.seed))?,
    };
    if frames.is_empty() {
        return Err(config_err("trace", "trace contains no frames"));
    }
    let detector_seed = derive_seed(args.seed, &[DETECTOR_TAG]);
    let out = simulate_frames(
        &frames,
        &model,
        threshold,
        &gate,
        &energy,
        detector_seed,
        args.emit_log.is_some(),
    )?;

    if let (Some(path), Some(log)) = (&args.emit_log, &out.log) {
        let mut w = create(path)?;
        write_log(&mut w, log)
            .and_then(|_| w.flush())
            .map_err(io_err(path))?;
    }

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        outcome: &'a sensegate::expctl::SimulationOutcome,
        energy_params: &'a EnergyParams,
        detector: &'a ScoreModel,
    }
    let report = Report {
        outcome: &out,
        energy_params: &energy,
        detector: &model,
    };
    emit(None, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let grid = match &args.grid_file {
        Some(path) => SweepGrid::from_json_file(path)?,
        None => SweepGrid::default(),
    };
    // run_sweep validates the whole grid first; nothing is written on error.
    let rows = run_sweep(&grid)?;
    emit(args.out.as_deref(), |w| match args.format {
        Format::Csv => write_sweep_csv(w, &rows),
        Format::Json => {
            write_sweep_json(&mut *w, &rows)?;
            writeln!(w)
        }
    })?;
    let matrix = spearman_matrix(&rows);
    if let Some(path) = &args.spearman_out {
        emit(Some(path), |w| matrix.write_csv(w))?;
    }
    let mut err = io::stderr().lock();
    let _ = matrix.write_csv(&mut err);
    Ok(())
}

fn cmd_roc(args: RocArgs) -> Result<()> {
    let model = args.detector.model()?;
    let labeled: Vec<(Truth, f64)> = match args.detector.trace_frames()? {
        Some(frames) => frames
            .iter()
            .map(|f| (f.truth, f.score.expect("trace frames carry scores")))
            .collect(),
        None => {
            if args.samples < 2 {
                return Err(config_err("samples", "need at least 2 samples"));
            }
            let mut rng = rng_from_seed(args.seed);
            (0..args.samples)
                .map(|i| {
                    let truth = if i % 2 == 0 { Truth::Foi } else { Truth::Background };
                    score(&Frame::new(i, truth), &model, &mut rng).map(|s| (truth, s))
                })
                .collect::<Result<_>>()?
        }
    };
    let curve = roc(&labeled)?;
    emit(args.out.as_deref(), |w| curve.write_csv(w))?;
    if let Some(closed) = model.binormal_auc() {
        eprintln!("auc={} closed_form={}", curve.auc, closed);
    }
    Ok(())
}

fn cmd_fpcheck(args: FpcheckArgs) -> Result<bool> {
    let ks: Vec<Option<u32>> = args.k_set.iter().map(|&k| (k > 0).then_some(k)).collect();
    let report = inject_fp_check(args.n_max, &ks, args.len, &Positions::All, args.period_mode.into())?;
    emit(None, |w| {
        writeln!(w, "n,k,max_extra,worst_position,bound,ok")?;
        for e in &report.entries {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.n,
                e.k.unwrap_or(0),
                e.max_extra,
                e.worst_position,
                e.bound,
                e.within_bound()
            )?;
        }
        Ok(())
    })?;
    eprintln!(
        "max extra transmissions: {} (all within 2N+1: {})",
        report.max_extra(),
        report.within_bound()
    );
    Ok(report.within_bound())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
        Command::Roc(a) => cmd_roc(a).map(|_| true),
        Command::Fpcheck(a) => cmd_fpcheck(a),
        Command::Version => {
            println!("sensegate {}", env!("CARGO_PKG_VERSION"));
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
