//! Named parameter presets, one per figure-style workflow.
//!
//! Every preset runs without further flags. Multi-panel presets expand to
//! several jobs whose labels become output-file suffixes.

use std::f64::consts::PI;

use dtqc_core::{ChainParameters, GridSpec, NamedState, ObservableSet, SweepObservable};

use crate::error::{CliError, Result};

pub struct EvolveJob {
    pub label: Option<String>,
    pub params: ChainParameters,
    pub t_max: f64,
    pub sample_dt: f64,
    pub observables: ObservableSet,
}

pub struct SpectrumJob {
    pub label: Option<String>,
    pub params: ChainParameters,
    pub t_max: f64,
    pub sample_dt: f64,
    pub column: String,
}

pub struct PhaseDiagramJob {
    pub label: Option<String>,
    pub grid: GridSpec,
}

pub struct HeatmapJob {
    pub params: ChainParameters,
    pub t_max: f64,
    pub sample_dt: f64,
}

fn evolve_job(label: Option<&str>, params: ChainParameters, t_max: f64) -> EvolveJob {
    EvolveJob {
        label: label.map(str::to_string),
        params,
        t_max,
        sample_dt: 0.05,
        observables: ObservableSet::default(),
    }
}

/// The four quench regimes: uniform/bipartite × undriven/driven.
fn quench_panel(panel: char) -> ChainParameters {
    match panel {
        'a' => ChainParameters::uniform(10, 4.74, 0.0),
        'b' => ChainParameters::uniform(10, 4.74, PI),
        'c' => ChainParameters::golden(10, 4.74).with_theta(0.0),
        _ => ChainParameters::golden(10, 4.74),
    }
}

pub fn evolve(name: &str) -> Result<Vec<EvolveJob>> {
    let jobs = match name {
        "fig1b" => vec![evolve_job(None, ChainParameters::golden(12, 4.74), 1000.0)],
        "fig3" => vec![evolve_job(None, ChainParameters::golden(12, 2.32), 500.0)],
        "fig4" => [1.00, 2.32, 3.34]
            .iter()
            .map(|&f_left| {
                evolve_job(
                    Some(&format!("fl{f_left:.2}")),
                    ChainParameters::golden(10, 2.0 * PI / f_left),
                    500.0,
                )
            })
            .collect(),
        "fig5a" | "fig5b" | "fig5c" | "fig5d" => {
            let panel = name.chars().last().unwrap();
            vec![evolve_job(None, quench_panel(panel), 1000.0)]
        }
        "fig5" => "abcd"
            .chars()
            .map(|panel| evolve_job(Some(&panel.to_string()), quench_panel(panel), 1000.0))
            .collect(),
        other => return Err(unknown(other, "evolve")),
    };
    Ok(jobs)
}

pub fn spectrum(name: &str) -> Result<Vec<SpectrumJob>> {
    let sized = |t_l: f64, t_max: f64, column: &str| -> Vec<SpectrumJob> {
        [8usize, 10, 12, 14]
            .iter()
            .map(|&n| SpectrumJob {
                label: Some(format!("N{n:02}")),
                params: ChainParameters::golden(n, t_l),
                t_max,
                sample_dt: 0.05,
                column: column.to_string(),
            })
            .collect()
    };
    let jobs = match name {
        "fig1c" => vec![SpectrumJob {
            label: None,
            params: ChainParameters::golden(12, 4.74),
            t_max: 1000.0,
            sample_dt: 0.05,
            column: "m".into(),
        }],
        "fig2c" => sized(4.74, 1000.0, "m"),
        "fig2d" => {
            let mut f_left = 0.5;
            let mut jobs = Vec::new();
            while f_left <= 3.5 + 1e-9 {
                jobs.push(SpectrumJob {
                    label: Some(format!("fl{f_left:.2}")),
                    params: ChainParameters::golden(10, 2.0 * PI / f_left),
                    t_max: 1000.0,
                    sample_dt: 0.05,
                    column: "m".into(),
                });
                f_left += 0.1;
            }
            jobs
        }
        "fig3" => sized(2.32, 500.0, "fidelity"),
        "fig4" => [1.00, 2.32, 3.34]
            .iter()
            .map(|&f_left| SpectrumJob {
                label: Some(format!("fl{f_left:.2}")),
                params: ChainParameters::golden(10, 2.0 * PI / f_left),
                t_max: 500.0,
                sample_dt: 0.05,
                column: "entropy".into(),
            })
            .collect(),
        other => return Err(unknown(other, "spectrum")),
    };
    Ok(jobs)
}

pub fn phase_diagram(name: &str) -> Result<Vec<PhaseDiagramJob>> {
    let jobs = match name {
        "fig2" => vec![PhaseDiagramJob {
            label: None,
            grid: GridSpec::phase_diagram_default(SweepObservable::Magnetization),
        }],
        "fig2-small" => vec![PhaseDiagramJob {
            label: None,
            grid: GridSpec::phase_diagram_small(SweepObservable::Magnetization),
        }],
        "fig7" => vec![PhaseDiagramJob {
            label: None,
            grid: GridSpec::phase_diagram_default(SweepObservable::Fidelity),
        }],
        "fig7-small" => vec![PhaseDiagramJob {
            label: None,
            grid: GridSpec::phase_diagram_small(SweepObservable::Fidelity),
        }],
        "fig6" => {
            // θ sweep at fixed drive frequency, per initial state and
            // observable
            let mut jobs = Vec::new();
            for state in [NamedState::Z2, NamedState::Z3, NamedState::Ground] {
                for observable in [SweepObservable::Magnetization, SweepObservable::Fidelity] {
                    let tag = match observable {
                        SweepObservable::Magnetization => "m",
                        SweepObservable::Fidelity => "F",
                    };
                    let base = ChainParameters::golden(12, 4.74).with_initial_state(state);
                    jobs.push(PhaseDiagramJob {
                        label: Some(format!("{}_{}", state.name(), tag)),
                        grid: GridSpec {
                            theta_values: theta_axis(),
                            f_left_values: vec![base.f_left()],
                            base,
                            observable,
                            t_max: 500.0,
                            sample_dt: 0.05,
                        },
                    });
                }
            }
            jobs
        }
        other => return Err(unknown(other, "phasediag")),
    };
    Ok(jobs)
}

fn theta_axis() -> Vec<f64> {
    let mut values = Vec::new();
    let mut theta = 2.0;
    while theta <= 4.5 + 1e-9 {
        values.push(theta);
        theta += 0.05;
    }
    values
}

pub fn heatmap(name: &str) -> Result<HeatmapJob> {
    match name {
        "fig1d" => {
            let mut params = ChainParameters::golden(9, 4.74);
            params.n_left = 5;
            Ok(HeatmapJob {
                params,
                t_max: 20.0 * 4.74,
                sample_dt: 0.05,
            })
        }
        other => Err(unknown(other, "heatmap")),
    }
}

fn unknown(name: &str, command: &str) -> CliError {
    CliError::usage(format!("unknown {command} preset `{name}`"))
}
