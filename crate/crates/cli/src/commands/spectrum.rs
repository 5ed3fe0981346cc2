//! `dtqc spectrum`: Fourier spectrum, labeled peaks, and lifetimes, from a
//! preset run or from a time-series CSV produced by `dtqc evolve`.

use std::path::{Path, PathBuf};

use dtqc_core::spectral::{fit_peak_lifetime, LifetimeFit};
use dtqc_core::{
    detect_peaks, fourier_spectrum, label_peaks, run, LabeledPeak, ObservableSet, Spectrum,
    WindowKind, GOLDEN_RATIO,
};

use crate::commands::{job_path, ChainOverrides};
use crate::error::{CliError, Result};
use crate::output;
use crate::presets;
use crate::svg;

#[derive(Debug, clap::Args)]
pub struct SpectrumArgs {
    /// Preset: fig1c, fig2c, fig2d, fig3, fig4
    #[arg(long)]
    pub preset: Option<String>,
    /// Analyze a column of an existing time-series CSV instead
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// Column to transform (with --input): m, fidelity, entropy, n_<i>
    #[arg(long)]
    pub column: Option<String>,
    /// Left drive angular frequency (with --input)
    #[arg(long)]
    pub f_left: Option<f64>,
    /// Right drive angular frequency (default: golden ratio × f_left)
    #[arg(long)]
    pub f_right: Option<f64>,
    #[command(flatten)]
    pub chain: ChainOverrides,
    /// Largest label numerator searched
    #[arg(long, default_value_t = 4)]
    pub k_max: i32,
    /// Labeling tolerance in angular frequency (default: one bin)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Peak floor as a multiple of the median amplitude
    #[arg(long, default_value_t = 5.0)]
    pub floor: f64,
    /// Window: rect (default) or hann
    #[arg(long)]
    pub window: Option<String>,
    /// Also render an SVG plot per spectrum
    #[arg(long)]
    pub svg: bool,
    /// Restrict the SVG frequency axis
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

struct SeriesJob {
    label: Option<String>,
    times: Vec<f64>,
    values: Vec<f64>,
    f_left: f64,
    f_right: f64,
    period_left: f64,
    column: String,
}

fn parse_window(name: Option<&str>) -> Result<WindowKind> {
    match name {
        None | Some("rect") | Some("rectangular") => Ok(WindowKind::Rectangular),
        Some("hann") => Ok(WindowKind::Hann),
        Some(other) => Err(CliError::usage(format!(
            "--window {other}: expected `rect` or `hann`"
        ))),
    }
}

fn read_series_csv(path: &Path, column: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::usage(format!("{}: empty file", path.display())))?;
    let names: Vec<&str> = header.split(',').collect();
    let t_idx = names
        .iter()
        .position(|&n| n == "t")
        .ok_or_else(|| CliError::usage(format!("{}: no `t` column", path.display())))?;
    let v_idx = names.iter().position(|&n| n == column).ok_or_else(|| {
        CliError::usage(format!(
            "{}: no `{column}` column (available: {})",
            path.display(),
            names.join(", ")
        ))
    })?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64> {
            fields
                .get(idx)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::usage(format!(
                        "{} line {}: bad field {idx}",
                        path.display(),
                        lineno + 2
                    ))
                })
        };
        times.push(parse(t_idx)?);
        values.push(parse(v_idx)?);
    }
    Ok((times, values))
}

fn trajectory_column(trajectory: &dtqc_core::Trajectory, column: &str) -> Result<Vec<f64>> {
    match column {
        "m" => trajectory.magnetization.clone(),
        "fidelity" => trajectory.fidelity.clone(),
        "entropy" => trajectory.entropy.clone(),
        _ => None,
    }
    .ok_or_else(|| CliError::usage(format!("column `{column}` not recorded")))
}

fn collect_jobs(args: &SpectrumArgs) -> Result<Vec<SeriesJob>> {
    if let Some(input) = &args.input {
        let column = args
            .column
            .clone()
            .ok_or_else(|| CliError::usage("--input needs --column"))?;
        let f_left = match (args.f_left, args.chain.period_left) {
            (Some(f), _) => f,
            (None, Some(t)) => 2.0 * std::f64::consts::PI / t,
            (None, None) => {
                return Err(CliError::usage(
                    "--input needs --f-left (or --period-left) for peak labeling",
                ))
            }
        };
        let f_right = args.f_right.unwrap_or(f_left * GOLDEN_RATIO);
        let (times, values) = read_series_csv(input, &column)?;
        return Ok(vec![SeriesJob {
            label: None,
            times,
            values,
            f_left,
            f_right,
            period_left: 2.0 * std::f64::consts::PI / f_left,
            column,
        }]);
    }

    let name = args
        .preset
        .as_deref()
        .ok_or_else(|| CliError::usage("spectrum needs --preset or --input"))?;
    let file = args.chain.file_config()?;
    presets::spectrum(name)?
        .into_iter()
        .map(|job| -> Result<SeriesJob> {
            let params = args.chain.apply(job.params, file.as_ref())?;
            let column = args.column.clone().unwrap_or(job.column);
            let set = ObservableSet {
                densities: false,
                ..ObservableSet::default()
            };
            let trajectory = run(&params, job.t_max, job.sample_dt, &set)?;
            let values = trajectory_column(&trajectory, &column)?;
            Ok(SeriesJob {
                label: job.label,
                times: trajectory.times,
                values,
                f_left: params.f_left(),
                f_right: params.f_right(),
                period_left: params.period_left,
                column,
            })
        })
        .collect()
}

type AnalyzedPeaks = Vec<(LabeledPeak, Option<LifetimeFit>)>;

fn analyze(
    job: &SeriesJob,
    window: WindowKind,
    floor: f64,
    k_max: i32,
    tol: Option<f64>,
) -> Result<(Spectrum, AnalyzedPeaks)> {
    let spectrum = fourier_spectrum(&job.times, &job.values, window)?;
    let peaks = detect_peaks(&spectrum, floor);
    let labeled = label_peaks(
        &peaks,
        job.f_left,
        job.f_right,
        k_max,
        tol.unwrap_or(spectrum.resolution),
    );
    let sample_dt = job.times[1] - job.times[0];
    let with_lifetimes = labeled
        .into_iter()
        .map(|peak| {
            let lifetime = fit_peak_lifetime(&job.values, sample_dt, peak.omega, job.period_left);
            (peak, lifetime)
        })
        .collect();
    Ok((spectrum, with_lifetimes))
}

pub fn run_command(args: &SpectrumArgs) -> Result<()> {
    let window = parse_window(args.window.as_deref())?;
    let jobs = collect_jobs(args)?;
    let stem = args
        .preset
        .clone()
        .or_else(|| {
            args.input
                .as_ref()
                .and_then(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        })
        .unwrap_or_else(|| "spectrum".into());

    for job in &jobs {
        let (spectrum, peaks) = analyze(job, window, args.floor, args.k_max, args.tol)?;
        let csv_path = job_path(
            args.out.as_ref(),
            &args.out_dir,
            &stem,
            job.label.as_deref(),
            "_spectrum.csv",
        );
        output::write(&csv_path, &output::spectrum_csv(&spectrum))?;
        let json_path = csv_path.with_file_name(
            csv_path
                .file_name()
                .unwrap()
                .to_string_lossy()
                .replace("_spectrum.csv", "_peaks.json"),
        );
        output::write(&json_path, &output::peaks_json(&peaks))?;
        if args.svg {
            let svg_path = csv_path.with_file_name(
                csv_path
                    .file_name()
                    .unwrap()
                    .to_string_lossy()
                    .replace("_spectrum.csv", ".svg"),
            );
            let title = format!("{} of {}", stem, job.column);
            let labeled: Vec<LabeledPeak> = peaks.iter().map(|(p, _)| *p).collect();
            output::write(
                &svg_path,
                &svg::spectrum_svg(&spectrum, &labeled, &title, args.omega_max, 10),
            )?;
        }
        println!(
            "{} ({} bins, {} peaks)",
            csv_path.display(),
            spectrum.amplitudes.len(),
            peaks.len()
        );
    }
    Ok(())
}
