pub mod evolve;
pub mod heatmap;
pub mod phasediag;
pub mod spectrum;

use std::path::PathBuf;

use dtqc_core::{ChainParameters, Convention, Engine, NamedState, GOLDEN_RATIO};

use crate::config::FileConfig;
use crate::error::{CliError, Result};

/// Chain/drive overrides shared by the run-style commands. Flags beat the
/// config file, which beats the preset.
#[derive(Debug, Clone, clap::Args)]
pub struct ChainOverrides {
    /// Config file (`key = value` with [chain]/[drive]/[run]/[output] sections)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of sites
    #[arg(long)]
    pub n_sites: Option<usize>,
    /// Sites in the left region (default: half the chain)
    #[arg(long)]
    pub n_left: Option<usize>,
    /// Left kick period T_L; T_R follows as T_L divided by the golden ratio
    #[arg(long)]
    pub period_left: Option<f64>,
    /// Right kick period T_R (overrides the golden-ratio default)
    #[arg(long)]
    pub period_right: Option<f64>,
    /// Kick strength θ for both trains
    #[arg(long)]
    pub theta: Option<f64>,
    /// Initial product state: z2, z2prime, z3, ground
    #[arg(long)]
    pub initial_state: Option<String>,
}

impl ChainOverrides {
    pub fn file_config(&self) -> Result<Option<FileConfig>> {
        self.config.as_deref().map(FileConfig::load).transpose()
    }

    pub fn apply(
        &self,
        mut params: ChainParameters,
        file: Option<&FileConfig>,
    ) -> Result<ChainParameters> {
        if let Some(config) = file {
            params = config.apply_chain(params)?;
        }
        if let Some(n) = self.n_sites {
            params.n_sites = n;
            params.n_left = n / 2;
        }
        if let Some(n) = self.n_left {
            params.n_left = n;
        }
        if let Some(t) = self.period_left {
            params.period_left = t;
            params.period_right = t / GOLDEN_RATIO;
        }
        if let Some(t) = self.period_right {
            params.period_right = t;
        }
        if let Some(theta) = self.theta {
            params.theta_left = theta;
            params.theta_right = theta;
        }
        if let Some(name) = &self.initial_state {
            params.initial_state = NamedState::parse(name)?;
        }
        params.validate()?;
        Ok(params)
    }
}

pub fn parse_engine(name: Option<&str>) -> Result<Option<Engine>> {
    match name {
        None => Ok(None),
        Some("dense") => Ok(Some(Engine::Dense)),
        Some("krylov") => Ok(Some(Engine::Krylov { tolerance: 1e-10 })),
        Some(other) => Err(CliError::usage(format!(
            "--engine {other}: expected `dense` or `krylov`"
        ))),
    }
}

pub fn parse_convention(name: Option<&str>) -> Result<Convention> {
    match name {
        None | Some("spin") => Ok(Convention::Spin),
        Some("density") => Ok(Convention::Density),
        Some(other) => Err(CliError::usage(format!(
            "--m-convention {other}: expected `spin` or `density`"
        ))),
    }
}

/// Output path for a (possibly multi-file) job.
pub fn job_path(
    out: Option<&PathBuf>,
    out_dir: &std::path::Path,
    stem: &str,
    label: Option<&str>,
    suffix: &str,
) -> PathBuf {
    if let (Some(path), None) = (out, label) {
        return path.clone();
    }
    let name = match label {
        Some(label) => format!("{stem}_{label}{suffix}"),
        None => format!("{stem}{suffix}"),
    };
    out_dir.join(name)
}
