//! Parameter-grid driver: phase diagrams over (θ, f_L), size scans, and
//! frequency scans, with the long-lifetime classification of the
//! quasi-crystalline phase.
//!
//! Cells are independent and run on the ambient rayon pool; output order is
//! row-major over the grid regardless of worker count. The spectral
//! decomposition depends only on the chain and Rabi frequencies, not on the
//! drive, so one decomposition is shared by every cell of a grid and is
//! computed before parallel dispatch.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ChainParameters;
use crate::propagator::{Engine, ObservableSet, Simulator};
use crate::spectral::{
    detect_peaks, fit_peak_lifetime, fourier_spectrum, label_peaks, LabeledPeak, LifetimeFit,
    Spectrum, WindowKind,
};

/// Lifetime threshold, in units of the left drive period, above which a
/// spectral component counts as stable.
pub const DTQC_LIFETIME_PERIODS: f64 = 30.0;

/// Peak floor used throughout the sweeps.
pub const PEAK_FLOOR_FACTOR: f64 = 5.0;

/// Largest label numerator searched when matching peaks.
pub const LABEL_K_MAX: i32 = 4;

/// Which observable series a sweep analyzes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepObservable {
    Magnetization,
    Fidelity,
}

/// Rectangular (θ, f_L) grid over a fixed chain.
///
/// Per-cell parameters keep the period ratio `T_L/T_R` and the Rabi
/// frequencies of `base`; θ applies to both kick trains.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub theta_values: Vec<f64>,
    pub f_left_values: Vec<f64>,
    pub base: ChainParameters,
    pub observable: SweepObservable,
    pub t_max: f64,
    pub sample_dt: f64,
}

impl GridSpec {
    /// Grid of the main phase diagram: θ ∈ [2.0, 4.5] and f_L ∈ [0.5, 3.5],
    /// both in steps of 0.05, N = 10, evolution to t = 1000.
    pub fn phase_diagram_default(observable: SweepObservable) -> Self {
        Self {
            theta_values: steps(2.0, 4.5, 0.05),
            f_left_values: steps(0.5, 3.5, 0.05),
            base: ChainParameters::golden(10, 4.74),
            observable,
            t_max: 1000.0,
            sample_dt: 0.05,
        }
    }

    /// Desk-scale grid: the same ranges thinned to a handful of points each.
    pub fn phase_diagram_small(observable: SweepObservable) -> Self {
        Self {
            theta_values: vec![2.4, 2.8, PI, 3.4, 3.8],
            f_left_values: vec![0.6, 1.0, 1.33, 1.8, 2.6, 3.3],
            ..Self::phase_diagram_default(observable)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_values.is_empty() || self.f_left_values.is_empty() {
            return Err(Error::Validation("empty sweep grid".into()));
        }
        if self
            .f_left_values
            .iter()
            .any(|&f| !f.is_finite() || f <= 0.0)
        {
            return Err(Error::Validation(
                "drive frequencies must be positive".into(),
            ));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0)
            || !(self.sample_dt.is_finite() && self.sample_dt > 0.0)
        {
            return Err(Error::Validation(
                "sweep needs positive t_max and sample_dt".into(),
            ));
        }
        self.base.validate()
    }

    /// Cell parameters for one grid point.
    pub fn cell_parameters(&self, theta: f64, f_left: f64) -> ChainParameters {
        let ratio = self.base.period_left / self.base.period_right;
        let period_left = 2.0 * PI / f_left;
        ChainParameters {
            period_left,
            period_right: period_left / ratio,
            theta_left: theta,
            theta_right: theta,
            ..self.base.clone()
        }
    }
}

pub(crate) fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| from + k as f64 * step).collect()
}

/// Amplitude and envelope lifetime of one labeled peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakMeasure {
    pub omega: f64,
    pub amplitude: f64,
    pub lifetime: Option<LifetimeFit>,
}

/// One cell of a phase diagram: the two mixed half-integer components and
/// the classification verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub theta: f64,
    pub f_left: f64,
    /// The (-1, 1) component at `(f_R - f_L)/2`.
    pub mm: Option<PeakMeasure>,
    /// The (1, 1) component at `(f_L + f_R)/2`.
    pub pp: Option<PeakMeasure>,
    pub is_dtqc: bool,
    pub error: Option<String>,
}

/// True when both mixed components are present and each outlives
/// `30 T_L` (a non-decaying envelope counts as passing).
pub fn classify_dtqc(cell: &PhaseCell, period_left: f64) -> bool {
    let threshold = DTQC_LIFETIME_PERIODS * period_left;
    let ok = |m: &Option<PeakMeasure>| {
        m.as_ref()
            .and_then(|p| p.lifetime.as_ref())
            .is_some_and(|l| l.outlives(threshold))
    };
    ok(&cell.mm) && ok(&cell.pp)
}

/// Spectrum, labeled peaks, and the two mixed components of one series.
pub(crate) struct SeriesAnalysis {
    pub spectrum: Spectrum,
    pub peaks: Vec<LabeledPeak>,
    pub mm: Option<PeakMeasure>,
    pub pp: Option<PeakMeasure>,
}

pub(crate) fn analyze_series(
    times: &[f64],
    values: &[f64],
    sample_dt: f64,
    params: &ChainParameters,
) -> Result<SeriesAnalysis> {
    let spectrum = fourier_spectrum(times, values, WindowKind::Rectangular)?;
    let detected = detect_peaks(&spectrum, PEAK_FLOOR_FACTOR);
    let peaks = label_peaks(
        &detected,
        params.f_left(),
        params.f_right(),
        LABEL_K_MAX,
        spectrum.resolution,
    );
    let measure = |k1: i32, k2: i32| -> Option<PeakMeasure> {
        let peak = peaks.iter().find(|p| p.has_label(k1, k2))?;
        Some(PeakMeasure {
            omega: peak.omega,
            amplitude: peak.amplitude,
            lifetime: fit_peak_lifetime(values, sample_dt, peak.omega, params.period_left),
        })
    };
    Ok(SeriesAnalysis {
        mm: measure(-1, 1),
        pp: measure(1, 1),
        spectrum,
        peaks,
    })
}

fn observable_series(
    simulator: &Simulator,
    params: &ChainParameters,
    observable: SweepObservable,
    t_max: f64,
    sample_dt: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let set = match observable {
        SweepObservable::Magnetization => {
            ObservableSet::magnetization_only(crate::observables::Convention::Spin)
        }
        SweepObservable::Fidelity => ObservableSet::fidelity_only(),
    };
    let trajectory = simulator.run(params, t_max, sample_dt, &set, Engine::Dense)?;
    let values = match observable {
        SweepObservable::Magnetization => trajectory.magnetization.unwrap(),
        SweepObservable::Fidelity => trajectory.fidelity.unwrap(),
    };
    Ok((trajectory.times, values))
}

/// Runs every (θ, f_L) cell of the grid. Cells execute in parallel; the
/// result is row-major over `theta_values × f_left_values` and per-cell
/// failures land in the cell's `error` field without aborting the sweep.
pub fn run_phase_diagram(grid: &GridSpec) -> Result<Vec<PhaseCell>> {
    grid.validate()?;
    let simulator = Simulator::new(&grid.base)?;
    // Warm the shared decomposition before fanning out.
    simulator.decomposition()?;

    let cells: Vec<(f64, f64)> = grid
        .theta_values
        .iter()
        .flat_map(|&theta| grid.f_left_values.iter().map(move |&f| (theta, f)))
        .collect();

    Ok(cells
        .par_iter()
        .map(|&(theta, f_left)| {
            let params = grid.cell_parameters(theta, f_left);
            let run = observable_series(
                &simulator,
                &params,
                grid.observable,
                grid.t_max,
                grid.sample_dt,
            )
            .and_then(|(times, values)| analyze_series(&times, &values, grid.sample_dt, &params));
            match run {
                Ok(analysis) => {
                    let mut cell = PhaseCell {
                        theta,
                        f_left,
                        mm: analysis.mm,
                        pp: analysis.pp,
                        is_dtqc: false,
                        error: None,
                    };
                    cell.is_dtqc = classify_dtqc(&cell, params.period_left);
                    cell
                }
                Err(e) => PhaseCell {
                    theta,
                    f_left,
                    mm: None,
                    pp: None,
                    is_dtqc: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Mixed-peak amplitudes at one chain length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeScanPoint {
    pub n_sites: usize,
    pub amp_mm: f64,
    pub amp_pp: f64,
}

/// `ln A` vs `N` regression of a size scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeScan {
    pub points: Vec<SizeScanPoint>,
    /// Exponential fit of the (-1, 1) amplitude; fidelity scans only.
    pub fit_mm: Option<ScalingFit>,
    /// Exponential fit of the (1, 1) amplitude; fidelity scans only.
    pub fit_pp: Option<ScalingFit>,
}

/// Runs the drive of `base` at each chain length and reads off the two mixed
/// peak amplitudes; absent peaks record amplitude 0.
pub fn size_scan(
    sizes: &[usize],
    base: &ChainParameters,
    observable: SweepObservable,
    t_max: f64,
    sample_dt: f64,
) -> Result<SizeScan> {
    if sizes.is_empty() {
        return Err(Error::Validation("empty size list".into()));
    }
    let points: Vec<SizeScanPoint> = sizes
        .par_iter()
        .map(|&n| -> Result<SizeScanPoint> {
            let params = ChainParameters {
                n_sites: n,
                n_left: n / 2,
                ..base.clone()
            };
            let simulator = Simulator::new(&params)?;
            let (times, values) =
                observable_series(&simulator, &params, observable, t_max, sample_dt)?;
            let analysis = analyze_series(&times, &values, sample_dt, &params)?;
            Ok(SizeScanPoint {
                n_sites: n,
                amp_mm: analysis.mm.map_or(0.0, |p| p.amplitude),
                amp_pp: analysis.pp.map_or(0.0, |p| p.amplitude),
            })
        })
        .collect::<Result<_>>()?;

    let fit = |select: fn(&SizeScanPoint) -> f64| -> Option<ScalingFit> {
        if observable != SweepObservable::Fidelity || points.iter().any(|p| select(p) <= 0.0) {
            return None;
        }
        let x: Vec<f64> = points.iter().map(|p| p.n_sites as f64).collect();
        let y: Vec<f64> = points.iter().map(|p| select(p).ln()).collect();
        let f = crate::spectral::linear_fit(&x, &y);
        Some(ScalingFit {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
        })
    };
    Ok(SizeScan {
        fit_mm: fit(|p| p.amp_mm),
        fit_pp: fit(|p| p.amp_pp),
        points,
    })
}

/// Spectrum and labeled peaks per drive frequency at fixed θ.
#[derive(Debug, Clone)]
pub struct FrequencyScanRow {
    pub f_left: f64,
    pub spectrum: Spectrum,
    pub peaks: Vec<LabeledPeak>,
}

/// Scans the drive frequency at the θ of `base`, reporting the full labeled
/// spectrum per point: the low-frequency end is chaotic (many peaks,
/// including the inherent (2, 0) = f_L line), the middle is dominated by the
/// mixed (±1, 1) components, and the high end decouples into the two
/// independent subharmonics.
pub fn frequency_scan(
    f_left_values: &[f64],
    base: &ChainParameters,
    observable: SweepObservable,
    t_max: f64,
    sample_dt: f64,
) -> Result<Vec<FrequencyScanRow>> {
    if f_left_values.is_empty() {
        return Err(Error::Validation("empty frequency list".into()));
    }
    let simulator = Simulator::new(base)?;
    simulator.decomposition()?;
    let ratio = base.period_left / base.period_right;
    f_left_values
        .par_iter()
        .map(|&f_left| -> Result<FrequencyScanRow> {
            let period_left = 2.0 * PI / f_left;
            let params = ChainParameters {
                period_left,
                period_right: period_left / ratio,
                ..base.clone()
            };
            let (times, values) =
                observable_series(&simulator, &params, observable, t_max, sample_dt)?;
            let analysis = analyze_series(&times, &values, sample_dt, &params)?;
            Ok(FrequencyScanRow {
                f_left,
                spectrum: analysis.spectrum,
                peaks: analysis.peaks,
            })
        })
        .collect()
}
