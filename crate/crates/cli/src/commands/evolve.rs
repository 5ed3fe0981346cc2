//! `dtqc evolve`: run one or more time evolutions and write observable
//! time-series CSVs.

use std::path::PathBuf;

use dtqc_core::{ChainParameters, Engine, ObservableSet, Simulator};

use crate::commands::{job_path, parse_convention, parse_engine, ChainOverrides};
use crate::error::Result;
use crate::output;
use crate::presets;

#[derive(Debug, clap::Args)]
pub struct EvolveArgs {
    /// Preset: fig1b, fig3, fig4, fig5, fig5a, fig5b, fig5c, fig5d
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub chain: ChainOverrides,
    /// Evolution horizon
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Observable sampling step
    #[arg(long)]
    pub sample_dt: Option<f64>,
    /// Engine: dense (default) or krylov
    #[arg(long)]
    pub engine: Option<String>,
    /// Append per-site density columns n_0..n_{N-1}
    #[arg(long)]
    pub densities: bool,
    /// Staggered-magnetization convention: spin (default) or density
    #[arg(long)]
    pub m_convention: Option<String>,
    /// Output file (single-run invocations)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output directory for multi-run presets
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub fn run(args: &EvolveArgs) -> Result<()> {
    let mut jobs = match &args.preset {
        Some(name) => presets::evolve(name)?,
        None => vec![presets::EvolveJob {
            label: None,
            params: ChainParameters::golden(10, 4.74),
            t_max: 100.0,
            sample_dt: 0.05,
            observables: ObservableSet::default(),
        }],
    };
    let file = args.chain.file_config()?;
    let engine = parse_engine(args.engine.as_deref())?
        .or(file
            .as_ref()
            .and_then(|f| f.engine().transpose())
            .transpose()?)
        .unwrap_or(Engine::Dense);
    let convention = parse_convention(args.m_convention.as_deref())?;
    let stem = args.preset.as_deref().unwrap_or("evolve").to_string();
    let out_flag = args
        .out
        .clone()
        .or_else(|| file.as_ref().and_then(|f| f.out()).map(PathBuf::from));

    for job in &mut jobs {
        job.params = args.chain.apply(job.params.clone(), file.as_ref())?;
        if let Some(config) = &file {
            if let Some(t) = config.t_max()? {
                job.t_max = t;
            }
            if let Some(dt) = config.sample_dt()? {
                job.sample_dt = dt;
            }
        }
        if let Some(t) = args.t_max {
            job.t_max = t;
        }
        if let Some(dt) = args.sample_dt {
            job.sample_dt = dt;
        }
        job.observables.densities = args.densities;
        job.observables.convention = convention;

        let simulator = Simulator::new(&job.params)?;
        let trajectory = simulator.run(
            &job.params,
            job.t_max,
            job.sample_dt,
            &job.observables,
            engine,
        )?;
        let path = job_path(
            out_flag.as_ref(),
            &args.out_dir,
            &stem,
            job.label.as_deref(),
            ".csv",
        );
        output::write(&path, &output::evolve_csv(&trajectory, job.params.n_sites))?;
        println!("{} ({} rows)", path.display(), trajectory.times.len());
    }
    Ok(())
}
