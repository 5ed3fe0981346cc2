//! Minimal built-in SVG line plot for spectra: axes, the amplitude curve,
//! and markers with `(k1/2, k2/2)` labels on identified peaks.

use std::fmt::Write as _;

use dtqc_core::spectral::LabeledPeak;
use dtqc_core::Spectrum;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn half_label(k: i32) -> String {
    if k % 2 == 0 {
        (k / 2).to_string()
    } else {
        format!("{k}/2")
    }
}

/// Renders the spectrum with up to `max_marks` labeled peak markers,
/// restricted to `omega <= omega_max` when given.
pub fn spectrum_svg(
    spectrum: &Spectrum,
    peaks: &[LabeledPeak],
    title: &str,
    omega_max: Option<f64>,
    max_marks: usize,
) -> String {
    let x_max = omega_max
        .unwrap_or_else(|| *spectrum.angular_frequencies.last().unwrap())
        .max(spectrum.resolution * 8.0);
    let visible: Vec<(f64, f64)> = spectrum
        .angular_frequencies
        .iter()
        .zip(&spectrum.amplitudes)
        .filter(|(&w, _)| w <= x_max)
        .map(|(&w, &a)| (w, a))
        .collect();
    let y_max = visible
        .iter()
        .map(|&(_, a)| a)
        .fold(f64::MIN_POSITIVE, f64::max)
        * 1.15;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |w: f64| MARGIN_LEFT + w / x_max * plot_w;
    let y_of = |a: f64| MARGIN_TOP + (1.0 - (a / y_max).min(1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        xml_escape(title)
    );

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>",
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{x0}\" y1=\"{MARGIN_TOP}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    for i in 0..=6 {
        let w = x_max * i as f64 / 6.0;
        let x = x_of(w);
        let _ = writeln!(
            svg,
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>",
            y0 + 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{w:.2}</text>",
            y0 + 18.0
        );
    }
    for i in 0..=5 {
        let a = y_max * i as f64 / 5.0;
        let y = y_of(a);
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{x0}\" y2=\"{y}\" stroke=\"black\"/>",
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{a:.3}</text>",
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">angular frequency</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">amplitude</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // spectrum polyline
    let mut points = String::new();
    for &(w, a) in &visible {
        let _ = write!(points, "{:.2},{:.2} ", x_of(w), y_of(a));
    }
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\"/>",
        points.trim_end()
    );

    // labeled peak markers
    for peak in peaks
        .iter()
        .filter(|p| p.label.is_some() && p.omega <= x_max)
        .take(max_marks)
    {
        let label = peak.label.unwrap();
        let x = x_of(peak.omega);
        let y = y_of(peak.amplitude);
        let _ = writeln!(
            svg,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#d62728\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#d62728\">({}, {})</text>",
            (y - 8.0).max(MARGIN_TOP + 10.0),
            half_label(label.k1),
            half_label(label.k2)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
