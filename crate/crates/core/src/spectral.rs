//! Fourier analysis of observable series: amplitude spectra, peak detection,
//! labeling against the two drive frequencies, and lifetime extraction.
//!
//! Spectra are reported in angular frequency so that peak positions compare
//! directly against the drive frequencies `f = 2π/T`. A peak at
//! `(k₁/2) f_L + (k₂/2) f_R` carries the integer label `(k₁, k₂)`; the
//! half-integer positions `(±1, 1)` are the signature of the
//! quasi-crystalline response.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Minimum number of samples for a meaningful transform.
pub const MIN_SAMPLES: usize = 64;

/// Relative tolerance when checking that a time grid is uniform.
pub const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    #[default]
    Rectangular,
    Hann,
}

/// One-sided amplitude spectrum on a uniform angular-frequency grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Grid from 0 to π/sample_dt, spacing `resolution`.
    pub angular_frequencies: Vec<f64>,
    /// `(2/L)·|DFT|` of the mean-subtracted, windowed series (normalized by
    /// the window's coherent gain, so a unit tone reads close to 1 either
    /// way).
    pub amplitudes: Vec<f64>,
    /// Grid spacing `Δω = 2π / (L · sample_dt)`.
    pub resolution: f64,
    /// Window the series was transformed with; peak refinement uses the
    /// matching main-lobe shape.
    pub window: WindowKind,
}

impl Spectrum {
    /// Amplitude at the grid point nearest `omega`.
    pub fn amplitude_near(&self, omega: f64) -> f64 {
        let j = (omega / self.resolution).round() as usize;
        self.amplitudes[j.min(self.amplitudes.len() - 1)]
    }

    pub fn median_amplitude(&self) -> f64 {
        let mut sorted = self.amplitudes.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    }
}

fn check_uniform_grid(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Sampling("fewer than two samples".into()));
    }
    let dt = times[1] - times[0];
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Sampling(format!("non-increasing grid (dt = {dt})")));
    }
    for (i, pair) in times.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if (step - dt).abs() > GRID_TOLERANCE * dt.max(1.0) {
            return Err(Error::Sampling(format!(
                "step {step} at index {i} differs from leading step {dt}"
            )));
        }
    }
    Ok(dt)
}

/// Amplitude spectrum of a uniformly sampled real series.
///
/// The series is mean-subtracted, optionally Hann-windowed, and transformed;
/// amplitudes are `(2/L)|X_j|` on `ω_j = 2π j / (L · dt)` up to the Nyquist
/// frequency.
pub fn fourier_spectrum(times: &[f64], values: &[f64], window: WindowKind) -> Result<Spectrum> {
    if times.len() != values.len() {
        return Err(Error::Consistency(format!(
            "{} times vs {} values",
            times.len(),
            values.len()
        )));
    }
    if values.len() < MIN_SAMPLES {
        return Err(Error::Windowing(format!(
            "{} samples, need at least {MIN_SAMPLES}",
            values.len()
        )));
    }
    let dt = check_uniform_grid(times)?;
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut window_sum = 0.0f64;
    let mut buffer: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = match window {
                WindowKind::Rectangular => 1.0,
                WindowKind::Hann => {
                    let x = i as f64 / (n - 1) as f64;
                    0.5 * (1.0 - (2.0 * std::f64::consts::PI * x).cos())
                }
            };
            window_sum += w;
            Complex64::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    let resolution = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let half = n / 2;
    let scale = 2.0 / window_sum;
    let angular_frequencies = (0..=half).map(|j| j as f64 * resolution).collect();
    let amplitudes = buffer[..=half].iter().map(|x| scale * x.norm()).collect();
    Ok(Spectrum {
        angular_frequencies,
        amplitudes,
        resolution,
        window,
    })
}

/// A local maximum of the spectrum after sub-bin refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub omega: f64,
    pub amplitude: f64,
}

/// Local maxima above `floor_factor × median(A)`, strongest first.
///
/// Peak positions are refined by quadratic interpolation over the three bins
/// around the maximum; amplitudes are corrected for the main-lobe scalloping
/// of the window, so an off-grid tone of unit amplitude reads close to 1.
pub fn detect_peaks(spectrum: &Spectrum, floor_factor: f64) -> Vec<Peak> {
    assert!(floor_factor > 1.0, "floor factor must exceed 1");
    let a = &spectrum.amplitudes;
    let floor = floor_factor * spectrum.median_amplitude();
    let mut peaks = Vec::new();
    for j in 1..a.len().saturating_sub(1) {
        if a[j] <= floor || a[j] < a[j - 1] || a[j] <= a[j + 1] {
            continue;
        }
        let denom = a[j - 1] - 2.0 * a[j] + a[j + 1];
        let offset = if denom.abs() > 1e-300 {
            0.5 * (a[j - 1] - a[j + 1]) / denom
        } else {
            0.0
        };
        // Scalloping correction from the larger neighbour: the two-bin
        // amplitude ratio pins the fractional tone position exactly for a
        // noiseless kernel, and the main-lobe value there rescales the bin.
        let neighbour = a[j - 1].max(a[j + 1]);
        let ratio = if a[j] > 0.0 { neighbour / a[j] } else { 0.0 };
        let delta = match spectrum.window {
            WindowKind::Rectangular => ratio / (1.0 + ratio),
            WindowKind::Hann => (2.0 * ratio - 1.0).max(0.0) / (1.0 + ratio),
        };
        let amplitude = a[j] / main_lobe(spectrum.window, delta);
        peaks.push(Peak {
            omega: spectrum.angular_frequencies[j] + offset * spectrum.resolution,
            amplitude,
        });
    }
    peaks.sort_by(|p, q| q.amplitude.total_cmp(&p.amplitude));
    peaks
}

/// Normalized main-lobe value of the window kernel at a fractional bin
/// offset `delta` in [0, 1/2].
fn main_lobe(window: WindowKind, delta: f64) -> f64 {
    if delta.abs() < 1e-9 {
        return 1.0;
    }
    let x = std::f64::consts::PI * delta;
    let sinc = x.sin() / x;
    match window {
        WindowKind::Rectangular => sinc,
        WindowKind::Hann => sinc / (1.0 - delta * delta),
    }
}

/// Assignment of a peak to the drive-frequency lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakLabel {
    /// Numerator of the `f_L` coefficient: the peak sits at
    /// `(k1/2) f_L + (k2/2) f_R`.
    pub k1: i32,
    pub k2: i32,
    /// `|ω - predicted|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledPeak {
    pub omega: f64,
    pub amplitude: f64,
    pub label: Option<PeakLabel>,
}

impl LabeledPeak {
    pub fn has_label(&self, k1: i32, k2: i32) -> bool {
        matches!(self.label, Some(l) if l.k1 == k1 && l.k2 == k2)
    }
}

/// Labels each peak with the integers `(k₁, k₂)` minimizing
/// `|ω − ((k₁/2) f_L + (k₂/2) f_R)|` over positive predicted frequencies,
/// ties broken by smaller `|k₁|+|k₂|`, then smaller `|k₂|`. Peaks farther
/// than `tolerance` from every lattice point stay unlabeled.
pub fn label_peaks(
    peaks: &[Peak],
    f_left: f64,
    f_right: f64,
    k_max: i32,
    tolerance: f64,
) -> Vec<LabeledPeak> {
    assert!(k_max >= 1);
    peaks
        .iter()
        .map(|p| {
            let mut best: Option<(f64, i32, i32)> = None;
            for k1 in -k_max..=k_max {
                for k2 in -k_max..=k_max {
                    let predicted = 0.5 * (k1 as f64 * f_left + k2 as f64 * f_right);
                    if predicted <= 0.0 {
                        continue;
                    }
                    let residual = (p.omega - predicted).abs();
                    let better = match best {
                        None => true,
                        Some((r, b1, b2)) => {
                            residual < r - 1e-15
                                || ((residual - r).abs() <= 1e-15
                                    && (k1.abs() + k2.abs() < b1.abs() + b2.abs()
                                        || (k1.abs() + k2.abs() == b1.abs() + b2.abs()
                                            && k2.abs() < b2.abs())))
                        }
                    };
                    if better {
                        best = Some((residual, k1, k2));
                    }
                }
            }
            let label = best.and_then(|(residual, k1, k2)| {
                (residual <= tolerance).then_some(PeakLabel { k1, k2, residual })
            });
            LabeledPeak {
                omega: p.omega,
                amplitude: p.amplitude,
                label,
            }
        })
        .collect()
}

/// Outcome class of an envelope fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    /// Clean exponential decay; `tau` is set.
    Decaying,
    /// Slope CI reaches zero from below or the slope is non-negative:
    /// effectively infinite lifetime.
    NonDecaying,
    /// Decaying but too ragged to trust (R² < 0.5).
    Unresolvable,
}

/// Exponential lifetime of one spectral component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeFit {
    pub omega: f64,
    /// `None` for non-decaying or unresolvable envelopes.
    pub tau: Option<f64>,
    /// Fitted amplitude at t = 0.
    pub amplitude: f64,
    pub r_squared: f64,
    pub class: DecayClass,
}

impl LifetimeFit {
    /// True when the component outlives `min_tau` (non-decaying counts).
    pub fn outlives(&self, min_tau: f64) -> bool {
        match self.class {
            DecayClass::NonDecaying => true,
            DecayClass::Decaying => self.tau.is_some_and(|t| t > min_tau),
            DecayClass::Unresolvable => false,
        }
    }
}

/// Sliding-window amplitude of the component at `omega`, fitted to
/// `A e^{-t/τ}` by linear regression of the log-amplitude.
pub fn component_lifetime(
    values: &[f64],
    sample_dt: f64,
    omega: f64,
    window_length: f64,
    hop: f64,
) -> Result<LifetimeFit> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::Validation(format!(
            "omega = {omega} must be positive"
        )));
    }
    let period = 2.0 * std::f64::consts::PI / omega;
    if window_length < 4.0 * period {
        return Err(Error::Windowing(format!(
            "window {window_length} shorter than four periods of ω = {omega}"
        )));
    }
    let duration = (values.len() - 1) as f64 * sample_dt;
    if duration < 3.0 * window_length {
        return Err(Error::Windowing(format!(
            "series of length {duration} shorter than three windows of {window_length}"
        )));
    }
    let window_samples = (window_length / sample_dt).floor() as usize;
    let hop_samples = ((hop / sample_dt).round() as usize).max(1);
    let mean = values.iter().sum::<f64>() / values.len() as f64;

    let mut centers = Vec::new();
    let mut logs = Vec::new();
    let mut start = 0usize;
    while start + window_samples <= values.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &v) in values[start..start + window_samples].iter().enumerate() {
            let t = (start + i) as f64 * sample_dt;
            acc += (v - mean) * Complex64::from_polar(1.0, -omega * t);
        }
        let amplitude = 2.0 * acc.norm() / window_samples as f64;
        if amplitude > 1e-300 {
            centers.push((start as f64 + 0.5 * window_samples as f64) * sample_dt);
            logs.push(amplitude.ln());
        }
        start += hop_samples;
    }
    if centers.len() < 3 {
        return Err(Error::Windowing(format!(
            "only {} usable windows for the envelope fit",
            centers.len()
        )));
    }

    let fit = linear_fit(&centers, &logs);
    let amplitude = fit.intercept.exp();
    let class = if fit.slope + 2.0 * fit.slope_stderr >= 0.0 {
        DecayClass::NonDecaying
    } else if fit.r_squared < 0.5 {
        DecayClass::Unresolvable
    } else {
        DecayClass::Decaying
    };
    Ok(LifetimeFit {
        omega,
        tau: (class == DecayClass::Decaying).then(|| -1.0 / fit.slope),
        amplitude,
        r_squared: fit.r_squared,
        class,
    })
}

/// Lifetime fit with the sweep defaults: window `50 T_L` (shrunk to a third
/// of the series when it does not fit), hop a fifth of the window. `None`
/// when no valid window exists for this frequency.
pub fn fit_peak_lifetime(
    values: &[f64],
    sample_dt: f64,
    omega: f64,
    period_left: f64,
) -> Option<LifetimeFit> {
    if !omega.is_finite() || omega <= 0.0 {
        return None;
    }
    let duration = (values.len() as f64 - 1.0) * sample_dt;
    let mut window = (50.0 * period_left).min(duration / 3.0);
    let min_window = 4.0 * (2.0 * std::f64::consts::PI / omega);
    if window < min_window {
        window = min_window;
        if window > duration / 3.0 {
            return None;
        }
    }
    component_lifetime(values, sample_dt, omega, window, window / 5.0).ok()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
}

pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let slope_stderr = (ss_res / dof / sxx).sqrt();
    LinearFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
    }
}
