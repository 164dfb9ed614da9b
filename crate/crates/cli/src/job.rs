//! Fully resolved runs. A [`Job`] carries every setting needed to reproduce
//! its outputs and is what the manifest records.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use mfdfa::mfdfa::q_grid;
use mfdfa::rolling::{annotate, event_delta, Metric};
use mfdfa::{
    CsvFormatSpec, EventDelta, EventMarker, GeneratorSpec, MfdfaConfig, ReturnKind, ReturnSeries,
    WindowSpec,
};
use serde::{Deserialize, Serialize};

use crate::args::{EstimatorArgs, GenerateKind, KindArg, ReturnsArgs, RollArgs};
use crate::error::CliError;
use crate::output::OutputDir;

/// Sections of the `--config` file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub mfdfa: Option<MfdfaConfig>,
    pub window: Option<WindowSpec>,
    pub format: Option<CsvFormatSpec>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    Returns {
        input: PathBuf,
        asset: String,
        kind: ReturnKind,
        format: CsvFormatSpec,
    },
    Mfdfa {
        input: PathBuf,
        asset: String,
        config: MfdfaConfig,
    },
    Roll {
        input: PathBuf,
        asset: String,
        kind: ReturnKind,
        config: MfdfaConfig,
        window: WindowSpec,
        events: Vec<EventMarker>,
        default_events: bool,
        horizon: usize,
    },
    Generate {
        spec: GeneratorSpec,
    },
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Returns { .. } => "returns",
            Job::Mfdfa { .. } => "mfdfa",
            Job::Roll { .. } => "roll",
            Job::Generate { .. } => "generate",
        }
    }

    pub fn inputs(&self) -> Vec<&Path> {
        match self {
            Job::Returns { input, .. } | Job::Mfdfa { input, .. } | Job::Roll { input, .. } => {
                vec![input.as_path()]
            }
            Job::Generate { .. } => Vec::new(),
        }
    }
}

fn kind_of(k: KindArg) -> ReturnKind {
    match k {
        KindArg::Log => ReturnKind::LogReturn,
        KindArg::Abs => ReturnKind::AbsReturn,
    }
}

fn absolute(path: &Path) -> Result<PathBuf, CliError> {
    std::fs::canonicalize(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn asset_name(explicit: &Option<String>, input: &Path) -> String {
    explicit.clone().unwrap_or_else(|| {
        input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "series".into())
    })
}

pub fn returns_job(
    args: &ReturnsArgs,
    preset: Option<&str>,
    file: &ConfigFile,
) -> Result<Job, CliError> {
    let mut format = match preset {
        Some(name) => CsvFormatSpec::preset(name)
            .ok_or_else(|| CliError::input(format!("unknown format preset `{name}`")))?,
        None => file.format.clone().unwrap_or_default(),
    };
    if let Some(c) = &args.date_column {
        format.date_column = c.clone();
    }
    if let Some(c) = &args.price_column {
        format.price_column = c.clone();
    }
    if let Some(p) = &args.date_pattern {
        format.date_pattern = p.clone();
    }
    if let Some(c) = args.thousands_separator {
        format.thousands_separator = Some(c);
    }
    if args.no_thousands_separator {
        format.thousands_separator = None;
    }
    if let Some(c) = args.decimal_separator {
        format.decimal_separator = c;
    }
    if args.skip_bad_rows {
        format.skip_bad_rows = true;
    }
    Ok(Job::Returns {
        input: absolute(&args.input)?,
        asset: asset_name(&args.asset, &args.input),
        kind: kind_of(args.kind),
        format,
    })
}

pub fn estimator_config(args: &EstimatorArgs, file: &ConfigFile) -> Result<MfdfaConfig, CliError> {
    let mut config = file.mfdfa.clone().unwrap_or_default();
    if let Some(p) = args.poly_order {
        config.poly_order = p;
    }
    if args.q_max.is_some() || args.q_step.is_some() {
        let q_max = args.q_max.unwrap_or(5.0);
        let step = args.q_step.unwrap_or(0.25);
        if !(q_max > 0.0 && step > 0.0 && step <= q_max) {
            return Err(CliError::input(
                "--q-max and --q-step must be positive, step <= max",
            ));
        }
        config.q_grid = q_grid(q_max, step);
    }
    if let Some(s) = &args.scales {
        config.scale_grid = Some(s.clone());
    }
    if args.fit_min.is_some() || args.fit_max.is_some() {
        let (lo, hi) = config.fit_scale_range.unwrap_or((0, usize::MAX));
        config.fit_scale_range = Some((args.fit_min.unwrap_or(lo), args.fit_max.unwrap_or(hi)));
    }
    config.validate()?;
    Ok(config)
}

pub fn mfdfa_job(
    input: &Path,
    asset: &Option<String>,
    est: &EstimatorArgs,
    file: &ConfigFile,
) -> Result<Job, CliError> {
    Ok(Job::Mfdfa {
        input: absolute(input)?,
        asset: asset_name(asset, input),
        config: estimator_config(est, file)?,
    })
}

fn parse_event(raw: &str) -> Result<EventMarker, CliError> {
    let (date, label) = raw
        .split_once('=')
        .ok_or_else(|| CliError::input(format!("event `{raw}` is not DATE=LABEL")))?;
    let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d")
        .map_err(|_| CliError::input(format!("event `{raw}`: bad date")))?;
    Ok(EventMarker::new(date, label.trim()))
}

pub fn roll_job(args: &RollArgs, file: &ConfigFile) -> Result<Job, CliError> {
    let mut window = file.window.unwrap_or_default();
    if let Some(w) = args.window {
        window.window_len = w;
    }
    if let Some(s) = args.step {
        window.step = s;
    }
    window.validate()?;
    Ok(Job::Roll {
        input: absolute(&args.input)?,
        asset: asset_name(&args.asset, &args.input),
        kind: kind_of(args.kind),
        config: estimator_config(&args.estimator, file)?,
        window,
        events: args
            .events
            .iter()
            .map(|e| parse_event(e))
            .collect::<Result<_, _>>()?,
        default_events: !args.no_default_events,
        horizon: args.horizon,
    })
}

pub fn generate_job(kind: &GenerateKind) -> Job {
    let spec = match *kind {
        GenerateKind::White { n, seed } => GeneratorSpec::WhiteNoise { n, seed },
        GenerateKind::Fgn { hurst, n, seed } => GeneratorSpec::Fgn { n, hurst, seed },
        GenerateKind::Cascade { p, k, seed } => GeneratorSpec::BinomialCascade {
            levels: k,
            p_weight: p,
            seed,
        },
    };
    Job::Generate { spec }
}

fn read_returns(input: &Path, asset: &str, kind: ReturnKind) -> Result<ReturnSeries, CliError> {
    let f = File::open(input).map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
    Ok(ReturnSeries::read_csv(BufReader::new(f), asset, kind)?)
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    asset: &'a str,
    h2: f64,
    dh5: f64,
    zero_segments: usize,
    #[serde(flatten)]
    analysis: &'a mfdfa::Analysis,
}

#[derive(Serialize)]
struct TraceReport<'a> {
    #[serde(flatten)]
    trace: &'a mfdfa::RollingTrace,
    event_deltas: Vec<EventDelta>,
}

/// Runs the job, writing into `out`. Returns summary lines for stdout.
pub fn execute(job: &Job, out: &mut OutputDir) -> Result<Vec<String>, CliError> {
    match job {
        Job::Returns {
            input,
            asset,
            kind,
            format,
        } => {
            let f = File::open(input)
                .map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
            let prices = mfdfa::parse_csv(BufReader::new(f), format, asset.as_str())?;
            let mut returns = mfdfa::to_log_returns(&prices)?;
            if *kind == ReturnKind::AbsReturn {
                returns = mfdfa::to_abs_returns(&returns)?;
            }
            out.write("returns.csv", |w| Ok(returns.write_csv(w)?))?;
            Ok(vec![format!("{} returns written", returns.len())])
        }
        Job::Mfdfa {
            input,
            asset,
            config,
        } => {
            let returns = read_returns(input, asset, ReturnKind::LogReturn)?;
            let analysis = mfdfa::analyze(returns.values(), config)?;
            let dh5 = analysis.dh(5.0)?;
            let report = SpectrumReport {
                asset,
                h2: analysis.h2(),
                dh5,
                zero_segments: analysis.surface.total_zero_segments(),
                analysis: &analysis,
            };
            out.write("spectrum.json", |w| {
                serde_json::to_writer_pretty(&mut *w, &report)?;
                writeln!(w)?;
                Ok(())
            })?;
            out.write("spectrum.csv", |w| Ok(analysis.spectrum.write_csv(w)?))?;
            out.write("fluctuation.csv", |w| Ok(analysis.surface.write_csv(w)?))?;
            Ok(vec![format!("h2 = {}", report.h2), format!("dh5 = {dh5}")])
        }
        Job::Roll {
            input,
            asset,
            kind,
            config,
            window,
            events,
            default_events,
            horizon,
        } => {
            let returns = read_returns(input, asset, *kind)?;
            let trace = mfdfa::roll(&returns, *window, config, mfdfa::Execution::default())?;
            let trace = annotate(trace, events, *default_events);
            let event_deltas = trace
                .events
                .iter()
                .filter(|e| e.in_range)
                .filter_map(|e| event_delta(&trace, &e.marker, *horizon).ok())
                .collect();
            let failed = trace.entries.iter().filter(|e| e.failed).count();
            let report = TraceReport {
                trace: &trace,
                event_deltas,
            };
            out.write("trace.csv", |w| Ok(trace.write_csv(w)?))?;
            out.write("trace.json", |w| {
                serde_json::to_writer_pretty(&mut *w, &report)?;
                writeln!(w)?;
                Ok(())
            })?;
            out.write("plot/h2.dat", |w| {
                Ok(trace.write_plot_series(w, Metric::H2)?)
            })?;
            out.write("plot/dh5.dat", |w| {
                Ok(trace.write_plot_series(w, Metric::Dh5)?)
            })?;
            out.write("plot/events.dat", |w| Ok(trace.write_plot_events(w)?))?;
            Ok(vec![format!(
                "{} windows ({failed} failed), {} events",
                trace.entries.len(),
                trace.events.len()
            )])
        }
        Job::Generate { spec } => {
            let series = spec.generate()?;
            out.write("series.csv", |w| Ok(series.write_csv(w)?))?;
            Ok(vec![format!("{} values written", series.len())])
        }
    }
}
