//! Static SVG figures: overlap-plane scatters and polar wedge histograms.
//!
//! The files are self-contained, carry no timestamps and draw nothing from
//! the environment, so a rerun reproduces them byte for byte. Coordinates
//! are emitted at fixed three-decimal precision; that is plotting precision,
//! the CSV files remain the quantitative record.

use std::fmt::Write as _;

use crate::boundary::BoundaryCurve;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 60.0;
/// Data range shown on both axes of the overlap plane.
const SPAN: f64 = 1.15;

fn map_x(x: f64) -> f64 {
    MARGIN + (x + SPAN) / (2.0 * SPAN) * (SIZE - 2.0 * MARGIN)
}

fn map_y(y: f64) -> f64 {
    // SVG y grows downward
    MARGIN + (SPAN - y) / (2.0 * SPAN) * (SIZE - 2.0 * MARGIN)
}

fn header(title: &str) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .expect("string write");
    writeln!(
        out,
        "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>"
    )
    .expect("string write");
    writeln!(
        out,
        "<text x=\"{:.3}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"18\">{title}</text>",
        SIZE / 2.0
    )
    .expect("string write");
    out
}

fn axes_and_unit_circle(out: &mut String) {
    let c = map_x(0.0);
    let r = map_x(1.0) - map_x(0.0);
    writeln!(
        out,
        "<line x1=\"{:.3}\" y1=\"{c:.3}\" x2=\"{:.3}\" y2=\"{c:.3}\" stroke=\"#ddd\"/>",
        map_x(-SPAN),
        map_x(SPAN)
    )
    .expect("string write");
    writeln!(
        out,
        "<line x1=\"{c:.3}\" y1=\"{:.3}\" x2=\"{c:.3}\" y2=\"{:.3}\" stroke=\"#ddd\"/>",
        map_y(SPAN),
        map_y(-SPAN)
    )
    .expect("string write");
    // unit circle for reference
    writeln!(
        out,
        "<circle cx=\"{c:.3}\" cy=\"{c:.3}\" r=\"{r:.3}\" fill=\"none\" stroke=\"#999\" \
         stroke-dasharray=\"6 4\"/>"
    )
    .expect("string write");
}

fn curve_polyline(out: &mut String, curve: &BoundaryCurve, stroke: &str) {
    let mut points = String::new();
    for p in curve.points() {
        let x = p.r_max * p.overlap_phase.cos();
        let y = p.r_max * p.overlap_phase.sin();
        write!(points, "{:.3},{:.3} ", map_x(x), map_y(y)).expect("string write");
    }
    if let Some(first) = curve.points().first() {
        let x = first.r_max * first.overlap_phase.cos();
        let y = first.r_max * first.overlap_phase.sin();
        write!(points, "{:.3},{:.3}", map_x(x), map_y(y)).expect("string write");
    }
    writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\"/>",
        points.trim_end()
    )
    .expect("string write");
}

/// Scatter of complex overlap samples with the analytic boundary overlaid.
pub fn scatter(curve: &BoundaryCurve, samples: &[(f64, f64)], title: &str) -> String {
    let mut out = header(title);
    axes_and_unit_circle(&mut out);
    for (re, im) in samples {
        writeln!(
            out,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"#2b6cb0\" fill-opacity=\"0.45\"/>",
            map_x(*re),
            map_y(*im)
        )
        .expect("string write");
    }
    curve_polyline(&mut out, curve, "#c0392b");
    out.push_str("</svg>\n");
    out
}

/// Analytic curve with empirical per-bin maxima as markers.
pub fn overlay(curve: &BoundaryCurve, empirical: &[(f64, f64)], title: &str) -> String {
    let mut out = header(title);
    axes_and_unit_circle(&mut out);
    curve_polyline(&mut out, curve, "#c0392b");
    for (phase, r) in empirical {
        writeln!(
            out,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"none\" stroke=\"#2b6cb0\" \
             stroke-width=\"1.5\"/>",
            map_x(r * phase.cos()),
            map_y(r * phase.sin())
        )
        .expect("string write");
    }
    out.push_str("</svg>\n");
    out
}

/// Polar wedge-fan histogram of phase counts.
///
/// Wedge radius scales with the bin count relative to the fullest bin;
/// `degrees` only switches the ring labels.
pub fn histogram_wedges(histogram: &[(f64, usize)], degrees: bool, title: &str) -> String {
    let mut out = header(title);
    let center = map_x(0.0);
    let full = map_x(1.0) - map_x(0.0);
    writeln!(
        out,
        "<circle cx=\"{center:.3}\" cy=\"{center:.3}\" r=\"{full:.3}\" fill=\"none\" \
         stroke=\"#999\" stroke-dasharray=\"6 4\"/>"
    )
    .expect("string write");
    let peak = histogram.iter().map(|(_, c)| *c).max().unwrap_or(0);
    if peak > 0 {
        let width = std::f64::consts::TAU / histogram.len() as f64;
        for (angle, count) in histogram {
            if *count == 0 {
                continue;
            }
            let r = *count as f64 / peak as f64;
            let a0 = angle - width / 2.0;
            let a1 = angle + width / 2.0;
            let (x0, y0) = (r * a0.cos(), r * a0.sin());
            let (x1, y1) = (r * a1.cos(), r * a1.sin());
            writeln!(
                out,
                "<path d=\"M {center:.3} {center:.3} L {:.3} {:.3} A {:.3} {:.3} 0 0 0 {:.3} {:.3} Z\" \
                 fill=\"#2b6cb0\" fill-opacity=\"0.6\" stroke=\"#1a4a80\" stroke-width=\"0.5\"/>",
                map_x(x0),
                map_y(y0),
                r * full,
                r * full,
                map_x(x1),
                map_y(y1)
            )
            .expect("string write");
        }
    }
    for quarter in 0..4 {
        let angle = std::f64::consts::FRAC_PI_2 * quarter as f64;
        let label = if degrees {
            format!("{}\u{b0}", quarter * 90)
        } else {
            ["0", "\u{3c0}/2", "\u{3c0}", "3\u{3c0}/2"][quarter].to_string()
        };
        writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"13\" fill=\"#555\">{label}</text>",
            map_x(1.08 * angle.cos()),
            map_y(1.08 * angle.sin())
        )
        .expect("string write");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary;

    #[test]
    fn scatter_structure() {
        let curve = boundary::curve(3, 360, None).unwrap();
        let samples = vec![(0.1, 0.2), (-0.3, 0.05), (0.6, -0.1)];
        let svg = scatter(&curve, &samples, "d = 3 sweep");
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<polyline"), "boundary curve present");
        assert_eq!(svg.matches("fill=\"#2b6cb0\"").count(), 3, "one dot per sample");
        assert!(svg.contains("stroke-dasharray"), "unit circle reference");
        assert!(svg.contains("d = 3 sweep"));
        assert_eq!(svg, scatter(&curve, &samples, "d = 3 sweep"), "deterministic");
    }

    #[test]
    fn wedge_fan_structure() {
        let histogram = vec![
            (-2.0, 0usize),
            (-1.0, 5),
            (0.0, 10),
            (1.0, 2),
            (2.0, 0),
            (3.0, 1),
        ];
        let svg = histogram_wedges(&histogram, false, "phases");
        assert_eq!(svg.matches("<path").count(), 4, "only nonzero bins draw");
        assert!(svg.contains("\u{3c0}/2"));
        let degree_svg = histogram_wedges(&histogram, true, "phases");
        assert!(degree_svg.contains("90\u{b0}"));
    }

    #[test]
    fn overlay_structure() {
        let curve = boundary::curve(2, 128, None).unwrap();
        let svg = overlay(&curve, &[(0.0, 1.0), (std::f64::consts::PI, 1.0)], "oracle");
        assert!(svg.contains("<polyline"));
        assert_eq!(svg.matches("<circle").count(), 3, "unit circle plus two markers");
    }
}
