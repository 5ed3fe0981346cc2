//! CSV and JSON emission. All numbers are serialized in scientific notation
//! with 17 significant digits, so files round-trip to the exact f64.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dtqc_core::spectral::{DecayClass, LifetimeFit};
use dtqc_core::{ConstrainedBasis, LabeledPeak, PhaseCell, Spectrum, Trajectory};

use crate::error::Result;

pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Time-series CSV: `t,m,fidelity,entropy[,n_0..n_{N-1}]`.
pub fn evolve_csv(trajectory: &Trajectory, n_sites: usize) -> String {
    let mut header = String::from("t");
    if trajectory.magnetization.is_some() {
        header.push_str(",m");
    }
    if trajectory.fidelity.is_some() {
        header.push_str(",fidelity");
    }
    if trajectory.entropy.is_some() {
        header.push_str(",entropy");
    }
    if trajectory.densities.is_some() {
        for i in 0..n_sites {
            let _ = write!(header, ",n_{i}");
        }
    }
    let mut out = header;
    out.push('\n');
    for (j, &t) in trajectory.times.iter().enumerate() {
        let mut row = fmt_full(t);
        if let Some(m) = &trajectory.magnetization {
            let _ = write!(row, ",{}", fmt_full(m[j]));
        }
        if let Some(f) = &trajectory.fidelity {
            let _ = write!(row, ",{}", fmt_full(f[j]));
        }
        if let Some(s) = &trajectory.entropy {
            let _ = write!(row, ",{}", fmt_full(s[j]));
        }
        if let Some(d) = &trajectory.densities {
            for v in &d[j] {
                let _ = write!(row, ",{}", fmt_full(*v));
            }
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Spectrum CSV: `omega,amplitude`.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("omega,amplitude\n");
    for (w, a) in spectrum
        .angular_frequencies
        .iter()
        .zip(&spectrum.amplitudes)
    {
        let _ = writeln!(out, "{},{}", fmt_full(*w), fmt_full(*a));
    }
    out
}

fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_full(x)
    } else {
        "null".into()
    }
}

/// Peaks JSON: an array of objects with omega, amplitude, label numerators,
/// residual, and lifetime fit.
pub fn peaks_json(peaks: &[(LabeledPeak, Option<LifetimeFit>)]) -> String {
    let mut out = String::from("[\n");
    for (i, (peak, lifetime)) in peaks.iter().enumerate() {
        let (k1, k2, residual) = match peak.label {
            Some(l) => (l.k1.to_string(), l.k2.to_string(), json_f64(l.residual)),
            None => ("null".into(), "null".into(), "null".into()),
        };
        let (tau, r2, decay) = match lifetime {
            Some(fit) => (
                fit.tau.map_or("null".into(), json_f64),
                json_f64(fit.r_squared),
                match fit.class {
                    DecayClass::Decaying => "\"decaying\"",
                    DecayClass::NonDecaying => "\"non_decaying\"",
                    DecayClass::Unresolvable => "\"unresolvable\"",
                }
                .to_string(),
            ),
            None => ("null".into(), "null".into(), "null".into()),
        };
        let _ = write!(
            out,
            "  {{\"omega\": {}, \"amplitude\": {}, \"k1\": {k1}, \"k2\": {k2}, \"residual\": {residual}, \
             \"tau\": {tau}, \"r2\": {r2}, \"decay\": {decay}}}",
            json_f64(peak.omega),
            json_f64(peak.amplitude),
        );
        out.push_str(if i + 1 < peaks.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

/// Phase-diagram CSV: `theta,f_L,A_mm,tau_mm,A_pp,tau_pp,is_dtqc,error`,
/// row-major over the grid. `tau` is `inf` for non-decaying envelopes and
/// empty when the peak is absent or its fit unresolvable.
pub fn phase_csv(cells: &[PhaseCell]) -> String {
    let mut out = String::from("theta,f_L,A_mm,tau_mm,A_pp,tau_pp,is_dtqc,error\n");
    for cell in cells {
        let peak_fields = |m: &Option<dtqc_core::PeakMeasure>| -> (String, String) {
            match m {
                None => (fmt_full(0.0), String::new()),
                Some(p) => {
                    let tau = match &p.lifetime {
                        Some(fit) => match fit.class {
                            DecayClass::NonDecaying => "inf".to_string(),
                            DecayClass::Decaying => fmt_full(fit.tau.unwrap()),
                            DecayClass::Unresolvable => String::new(),
                        },
                        None => String::new(),
                    };
                    (fmt_full(p.amplitude), tau)
                }
            }
        };
        let (a_mm, tau_mm) = peak_fields(&cell.mm);
        let (a_pp, tau_pp) = peak_fields(&cell.pp);
        let _ = writeln!(
            out,
            "{},{},{a_mm},{tau_mm},{a_pp},{tau_pp},{},{}",
            fmt_full(cell.theta),
            fmt_full(cell.f_left),
            cell.is_dtqc,
            csv_field(cell.error.as_deref().unwrap_or("")),
        );
    }
    out
}

/// Heatmap CSV (column per basis configuration, heatmap row order) plus the
/// companion JSON mapping columns to occupation patterns.
pub fn heatmap_files(basis: &ConstrainedBasis, trajectory: &Trajectory) -> (String, String) {
    let order = basis.heatmap_order();
    let z2 = dtqc_core::NamedState::Z2.pattern(basis.n_sites());

    let mut csv = String::from("t");
    for &k in &order {
        let _ = write!(csv, ",{}", basis.state(k).pattern_string());
    }
    csv.push('\n');
    let overlaps = trajectory.overlaps.as_ref().expect("overlaps recorded");
    for (j, &t) in trajectory.times.iter().enumerate() {
        let _ = write!(csv, "{}", fmt_full(t));
        for v in &overlaps[j] {
            let _ = write!(csv, ",{}", fmt_full(*v));
        }
        csv.push('\n');
    }

    let mut json = String::from("{\n");
    let _ = writeln!(json, "  \"n_sites\": {},", basis.n_sites());
    let _ = writeln!(json, "  \"n_left\": {},", basis.n_left());
    let _ = writeln!(json, "  \"n_states\": {},", basis.dim());
    let _ = writeln!(
        json,
        "  \"note\": \"all {} blockade-legal configurations of the open {}-site chain are exported, \
         ordered by Hamming distance from the alternating pattern\",",
        basis.dim(),
        basis.n_sites()
    );
    json.push_str("  \"columns\": [\n");
    for (col, &k) in order.iter().enumerate() {
        let state = basis.state(k);
        let _ = write!(
            json,
            "    {{\"column\": {col}, \"pattern\": \"{}\", \"hamming_to_z2\": {}}}",
            state.pattern_string(),
            state.hamming_distance(z2)
        );
        json.push_str(if col + 1 < order.len() { ",\n" } else { "\n" });
    }
    json.push_str("  ]\n}\n");
    (csv, json)
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.626e-34, -0.0, 1e308] {
            let text = fmt_full(x);
            assert_eq!(text.parse::<f64>().unwrap(), x, "{text}");
        }
    }

    #[test]
    fn csv_fields_are_escaped() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
