//! Deterministic CSV and JSON renderings of run artifacts.
//!
//! Every writer returns a `String` assembled with the default float
//! formatter, which emits the shortest digit string that round-trips the
//! exact double. That makes outputs byte-stable across runs and thread
//! counts, and lets audits re-parse a CSV back to identical bits. CSV files
//! open with a version comment line so a stray file can be traced to the
//! tool build that wrote it.
//!
//! Quantities that do not exist for a given curve (the multiplier angle of a
//! concurrence ellipse, say) are carried as NaN; CSV prints them literally as
//! `NaN` and JSON maps them to `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::BoundaryCurve;
use crate::linalg::C64;
use crate::oracle::{EmpiricalBoundary, GapReport};
use crate::sweep::{ConfinementReport, OverlapSample};

/// Leading comment line carried by every CSV file.
pub fn version_line() -> String {
    format!("# qudit-bound-lab v{}", crate::VERSION)
}

fn radians_or_degrees(angle: f64, degrees: bool) -> f64 {
    if degrees {
        angle.to_degrees()
    } else {
        angle
    }
}

/// Boundary curve as CSV with columns phi, r_max, Phi, theta, Lambda, branch.
pub fn boundary_csv(curve: &BoundaryCurve) -> String {
    let mut out = version_line();
    out.push_str("\nphi,r_max,Phi,theta,Lambda,branch\n");
    for (i, p) in curve.points().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.phi,
            p.r_max,
            p.overlap_phase,
            p.theta,
            p.lambda,
            curve.branch(i)
        )
        .expect("string write");
    }
    out
}

/// Boundary curve as a JSON document mirroring the CSV columns.
pub fn boundary_json(curve: &BoundaryCurve) -> Value {
    let points: Vec<Value> = curve
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            json!({
                "phi": p.phi,
                "r_max": p.r_max,
                "Phi": p.overlap_phase,
                "theta": p.theta,
                "Lambda": p.lambda,
                "branch": curve.branch(i),
            })
        })
        .collect();
    json!({
        "version": crate::VERSION,
        "d": curve.d(),
        "concurrence": curve.concurrence(),
        "points": points,
    })
}

/// Overlap samples as CSV with columns index, re, im, r, phi.
pub fn samples_csv(samples: &[OverlapSample]) -> String {
    let mut out = version_line();
    out.push_str("\nindex,re,im,r,phi\n");
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.index,
            s.value.re,
            s.value.im,
            s.modulus(),
            s.phase()
        )
        .expect("string write");
    }
    out
}

pub fn samples_json(samples: &[OverlapSample]) -> Value {
    let rows: Vec<Value> = samples
        .iter()
        .map(|s| {
            json!({
                "index": s.index,
                "re": s.value.re,
                "im": s.value.im,
                "r": s.modulus(),
                "phi": s.phase(),
            })
        })
        .collect();
    json!({ "version": crate::VERSION, "samples": rows })
}

/// Phase histogram as CSV with columns bin_center, count.
///
/// `degrees` switches the bin label column to degrees; stored data elsewhere
/// stays in radians.
pub fn histogram_csv(histogram: &[(f64, usize)], degrees: bool) -> String {
    let mut out = version_line();
    out.push_str("\nbin_center,count\n");
    for (center, count) in histogram {
        writeln!(out, "{},{}", radians_or_degrees(*center, degrees), count)
            .expect("string write");
    }
    out
}

pub fn histogram_json(histogram: &[(f64, usize)], degrees: bool) -> Value {
    let rows: Vec<Value> = histogram
        .iter()
        .map(|(center, count)| {
            json!({"bin_center": radians_or_degrees(*center, degrees), "count": count})
        })
        .collect();
    json!({ "version": crate::VERSION, "bins": rows })
}

/// Empirical boundary as CSV: Phi, max_R, then the d argmax eigenphases.
///
/// Only populated bins produce rows; an empty bin has nothing honest to
/// report.
pub fn empirical_csv(empirical: &EmpiricalBoundary) -> String {
    let mut out = version_line();
    out.push_str("\nPhi,max_R");
    for j in 1..=empirical.d() {
        write!(out, ",phi_{j}").expect("string write");
    }
    out.push('\n');
    for bin in empirical.bins().iter().flatten() {
        write!(out, "{},{}", bin.phase_center, bin.max_modulus).expect("string write");
        for phase in bin.phases.phases() {
            write!(out, ",{phase}").expect("string write");
        }
        out.push('\n');
    }
    out
}

pub fn empirical_json(empirical: &EmpiricalBoundary) -> Value {
    let rows: Vec<Value> = empirical
        .bins()
        .iter()
        .flatten()
        .map(|bin| {
            json!({
                "Phi": bin.phase_center,
                "max_R": bin.max_modulus,
                "phases": bin.phases.phases(),
            })
        })
        .collect();
    json!({
        "version": crate::VERSION,
        "d": empirical.d(),
        "steps_per_axis": empirical.steps_per_axis(),
        "n_bins": empirical.n_bins(),
        "bins": rows,
    })
}

/// Confinement report as JSON with the tool version attached.
pub fn confinement_json(report: &ConfinementReport, tol: f64) -> Value {
    json!({
        "version": crate::VERSION,
        "tol": tol,
        "total": report.total,
        "violation_count": report.violations.len(),
        "max_excess": report.max_excess,
        "violations": serde_json::to_value(&report.violations).expect("serializable"),
    })
}

/// Gap report as JSON; `completeness_bound` is None when the sampled d = 4
/// mode offers no resolution guarantee.
pub fn gap_json(
    report: &GapReport,
    soundness_tol: f64,
    completeness_bound: Option<f64>,
) -> Value {
    json!({
        "version": crate::VERSION,
        "max_gap": report.max_gap,
        "min_gap": report.min_gap(),
        "evaluated_bins": report.evaluated(),
        "empty_bins": report.gaps.len() - report.evaluated(),
        "soundness_tol": soundness_tol,
        "soundness_violations": report.soundness_violations(soundness_tol),
        "completeness_bound": completeness_bound,
    })
}

/// One interferometer readout row: the normalized signal plus the deviation
/// from the direct overlap.
#[derive(Debug, Clone, Copy)]
pub struct ReadoutRow {
    pub index: usize,
    pub value: C64,
    pub residual: f64,
}

/// Readout rows as CSV: the sample schema plus a residual column.
pub fn readout_csv(rows: &[ReadoutRow]) -> String {
    let mut out = version_line();
    out.push_str("\nindex,re,im,r,phi,residual\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.index,
            row.value.re,
            row.value.im,
            row.value.norm(),
            row.value.arg(),
            row.residual
        )
        .expect("string write");
    }
    out
}

pub fn readout_json(rows: &[ReadoutRow]) -> Value {
    let entries: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                "index": row.index,
                "re": row.value.re,
                "im": row.value.im,
                "r": row.value.norm(),
                "phi": row.value.arg(),
                "residual": row.residual,
            })
        })
        .collect();
    json!({ "version": crate::VERSION, "readouts": entries })
}

/// Reproducibility record written alongside every command's outputs.
///
/// `parameters` holds the effective flag values as strings keyed by flag
/// name, so a rerun can be assembled mechanically; `--threads` is excluded
/// because it cannot change any output byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
