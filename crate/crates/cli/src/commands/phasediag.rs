//! `dtqc phasediag`: (θ, f_L) sweeps with the long-lifetime classification,
//! written as row-major CSV.

use std::path::PathBuf;

use dtqc_core::{run_phase_diagram, ChainParameters, GridSpec, SweepObservable};

use crate::commands::{job_path, ChainOverrides};
use crate::error::{CliError, Result};
use crate::output;
use crate::presets;

#[derive(Debug, clap::Args)]
pub struct PhasediagArgs {
    /// Preset: fig2, fig2-small, fig6, fig7, fig7-small
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub chain: ChainOverrides,
    /// θ grid as `start:step:end` or a comma list (with --config/flags)
    #[arg(long)]
    pub theta_values: Option<String>,
    /// f_L grid as `start:step:end` or a comma list
    #[arg(long)]
    pub f_left_values: Option<String>,
    /// Observable: m (default) or fidelity
    #[arg(long)]
    pub observable: Option<String>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub sample_dt: Option<f64>,
    /// Worker threads for the sweep (default: available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

fn parse_observable(name: Option<&str>) -> Result<SweepObservable> {
    match name {
        None | Some("m") => Ok(SweepObservable::Magnetization),
        Some("fidelity") | Some("f") => Ok(SweepObservable::Fidelity),
        Some(other) => Err(CliError::usage(format!(
            "--observable {other}: expected `m` or `fidelity`"
        ))),
    }
}

pub fn run_command(args: &PhasediagArgs) -> Result<()> {
    let file = args.chain.file_config()?;
    let mut jobs = match &args.preset {
        Some(name) => presets::phase_diagram(name)?,
        None => {
            // a grid must come from the config file or the value flags
            let base = args
                .chain
                .apply(ChainParameters::golden(10, 4.74), file.as_ref())?;
            let theta_values = match &args.theta_values {
                Some(raw) => crate::config::parse_value_list(raw)?,
                None => file
                    .as_ref()
                    .and_then(|f| f.value_list("run", "theta_values").transpose())
                    .transpose()?
                    .ok_or_else(|| {
                        CliError::usage(
                            "phasediag needs --preset, --theta-values, or a config file",
                        )
                    })?,
            };
            let f_left_values = match &args.f_left_values {
                Some(raw) => crate::config::parse_value_list(raw)?,
                None => file
                    .as_ref()
                    .and_then(|f| f.value_list("run", "f_left_values").transpose())
                    .transpose()?
                    .ok_or_else(|| CliError::usage("phasediag needs f_L values"))?,
            };
            let observable = parse_observable(
                args.observable
                    .as_deref()
                    .or_else(|| file.as_ref().and_then(|f| f.get("run", "observable"))),
            )?;
            vec![presets::PhaseDiagramJob {
                label: None,
                grid: GridSpec {
                    theta_values,
                    f_left_values,
                    base,
                    observable,
                    t_max: 1000.0,
                    sample_dt: 0.05,
                },
            }]
        }
    };

    for job in &mut jobs {
        job.grid.base = args.chain.apply(job.grid.base.clone(), file.as_ref())?;
        if let Some(config) = &file {
            if let Some(t) = config.t_max()? {
                job.grid.t_max = t;
            }
            if let Some(dt) = config.sample_dt()? {
                job.grid.sample_dt = dt;
            }
        }
        if let Some(t) = args.t_max {
            job.grid.t_max = t;
        }
        if let Some(dt) = args.sample_dt {
            job.grid.sample_dt = dt;
        }
        if args.observable.is_some() {
            job.grid.observable = parse_observable(args.observable.as_deref())?;
        }
    }

    let pool = match args.workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::usage(format!("worker pool: {e}")))?,
        ),
        None => None,
    };

    let stem = args.preset.as_deref().unwrap_or("phasediag").to_string();
    for job in &jobs {
        let cells = match &pool {
            Some(pool) => pool.install(|| run_phase_diagram(&job.grid))?,
            None => run_phase_diagram(&job.grid)?,
        };
        let failed = cells.iter().filter(|c| c.error.is_some()).count();
        if failed == cells.len() {
            return Err(CliError::Core(dtqc_core::Error::Numerical(format!(
                "every cell failed; first error: {}",
                cells[0].error.as_deref().unwrap_or("unknown")
            ))));
        }
        let path = job_path(
            args.out.as_ref(),
            &args.out_dir,
            &stem,
            job.label.as_deref(),
            ".csv",
        );
        output::write(&path, &output::phase_csv(&cells))?;
        println!(
            "{} ({} cells, {} dtqc, {} failed)",
            path.display(),
            cells.len(),
            cells.iter().filter(|c| c.is_dtqc).count(),
            failed
        );
    }
    Ok(())
}
