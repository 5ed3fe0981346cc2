//! `dtqc heatmap`: basis-overlap trajectory matrix, one column per
//! configuration in heatmap row order, plus a JSON column map.

use std::path::PathBuf;

use dtqc_core::{ObservableSet, Simulator};

use crate::commands::ChainOverrides;
use crate::error::Result;
use crate::output;
use crate::presets;

#[derive(Debug, clap::Args)]
pub struct HeatmapArgs {
    /// Preset: fig1d
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub chain: ChainOverrides,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub sample_dt: Option<f64>,
    /// Output CSV path (the column map lands next to it as `<stem>_columns.json`)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub fn run_command(args: &HeatmapArgs) -> Result<()> {
    let mut job = presets::heatmap(args.preset.as_deref().unwrap_or("fig1d"))?;
    let file = args.chain.file_config()?;
    job.params = args.chain.apply(job.params, file.as_ref())?;
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

    let set = ObservableSet {
        magnetization: false,
        fidelity: false,
        entropy: false,
        overlaps: true,
        ..Default::default()
    };
    let simulator = Simulator::new(&job.params)?;
    let trajectory = simulator.run(
        &job.params,
        job.t_max,
        job.sample_dt,
        &set,
        dtqc_core::Engine::Dense,
    )?;

    let stem = args.preset.as_deref().unwrap_or("fig1d");
    let csv_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.out_dir.join(format!("{stem}.csv")));
    let json_path = csv_path.with_extension("").with_extension("");
    let json_path = json_path
        .parent()
        .unwrap_or(std::path::Path::new("."))
        .join(format!(
            "{}_columns.json",
            csv_path.file_stem().unwrap().to_string_lossy()
        ));

    let (csv, json) = output::heatmap_files(simulator.basis(), &trajectory);
    output::write(&csv_path, &csv)?;
    output::write(&json_path, &json)?;
    println!(
        "{} ({} rows × {} states), {}",
        csv_path.display(),
        trajectory.times.len(),
        simulator.basis().dim(),
        json_path.display()
    );
    Ok(())
}
