//! Acceptance gate: every primary claim of the laboratory, checked at its
//! stated tolerance and runtime budget. One [PASS]/[FAIL] line per
//! criterion; run with `cargo test --test acceptance -- --nocapture` to see
//! them all.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

use qudit_bound_lab::boundary;
use qudit_bound_lab::interferometer;
use qudit_bound_lab::linalg::{self, C64, CMatrix};
use qudit_bound_lab::oracle;
use qudit_bound_lab::state::{self, SchmidtSpec, TwoQuditState};
use qudit_bound_lab::sweep::{self, SweepConfig, SweepStrategy};

fn report(label: &str, pass: bool, detail: &str) {
    let tag = if pass { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {label}: {detail}");
    assert!(pass, "{label}: {detail}");
}

fn random_state(d: usize, rng: &mut ChaCha8Rng) -> TwoQuditState {
    let raw = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let norm = raw.norm();
    TwoQuditState::from_matrix(raw.map(|z| z / C64::new(norm, 0.0))).unwrap()
}

fn haar_su(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    linalg::project_su(&linalg::haar_unitary(d, rng).unwrap()).unwrap()
}

/// Row-major flattening matching the evolution convention psi_(i d + j) = M_ij.
fn flatten(state: &TwoQuditState) -> DVector<C64> {
    let d = state.d();
    let m = state.matrix();
    DVector::from_iterator(d * d, (0..d).flat_map(|i| (0..d).map(move |j| m[(i, j)])))
}

fn qbl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qbl"))
        .args(args)
        .env_remove("QBL_SEED")
        .output()
        .expect("binary runs")
}

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("file exists")).expect("valid JSON")
}

#[test]
fn criterion_1_boundary_extrema() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for d in 2..=5usize {
        let df = d as f64;
        for k in 0..d {
            let touch = boundary::boundary_point(d, TAU * k as f64 / df).unwrap().r_max;
            worst = worst.max((touch - 1.0).abs());
            let dip = boundary::boundary_point(d, (2 * k + 1) as f64 * PI / df)
                .unwrap()
                .r_max;
            worst = worst.max((dip - (1.0 - 2.0 / df)).abs());
        }
    }
    let elapsed = started.elapsed();
    report(
        "criterion 1 (boundary extrema, d = 2..5)",
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        &format!("worst deviation {worst:.3e} (tolerance 1e-12), {elapsed:.2?} of 1 s"),
    );
}

#[test]
fn criterion_2_haar_sweeps_confined() {
    let started = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for d in 2..=4usize {
        let dir = tempfile::tempdir().unwrap();
        let d_arg = d.to_string();
        let out = qbl(&[
            "sweep",
            "--d",
            &d_arg,
            "--strategy",
            "haar-two-sided",
            "--n",
            "10000",
            "--seed",
            "2",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        let confinement = read_json(&dir.path().join("confinement.json"));
        let violations = confinement["violation_count"].as_u64().unwrap();
        let svg = fs::read_to_string(dir.path().join("scatter.svg")).unwrap();
        let dots = svg.matches("fill=\"#2b6cb0\"").count();
        pass &= out.status.success()
            && violations == 0
            && dots == 10_000
            && svg.contains("<polyline");
        details.push(format!("d={d}: {violations} violations, {dots} plotted"));
    }
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    report(
        "criterion 2 (3 x 10^4 Haar samples confined at 1e-9)",
        pass,
        &format!("{}; {elapsed:.2?} of 30 s", details.join("; ")),
    );
}

#[test]
fn criterion_3_oracle_matches_closed_form() {
    let started = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for (d, steps) in [(2usize, 4096usize), (3, 1024)] {
        let empirical = oracle::grid_max_overlap(d, steps, 360).unwrap();
        let analytic = boundary::curve(d, 3600, None).unwrap();
        let gaps = oracle::compare_boundaries(&empirical, &analytic).unwrap();
        pass &= gaps.max_gap <= 3e-3 && gaps.min_gap() >= -1e-9;
        details.push(format!(
            "d={d} ({steps} steps): max gap {:.3e}, min gap {:.3e}",
            gaps.max_gap,
            gaps.min_gap()
        ));
    }
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    report(
        "criterion 3 (grid oracle vs closed form)",
        pass,
        &format!("{}; {elapsed:.2?} of 120 s", details.join("; ")),
    );
}

#[test]
fn criterion_4_stationarity_certificates() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0usize;
    let mut pass = true;
    for d in 2..=4usize {
        for _ in 0..1000 {
            let phi: f64 = rng.random::<f64>() * TAU;
            pass &= oracle::verify_stationarity(d, phi, 1e-9).unwrap();
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    report(
        "criterion 4 (stationarity residuals at 1e-9)",
        pass,
        &format!("{checked} random eigenphase parameters; {elapsed:.2?} of 1 s"),
    );
}

#[test]
fn criterion_5_experimental_strategy_families() {
    let started = Instant::now();

    // C = 0: product states carry a pure phase
    let spec = SchmidtSpec::qubit_with_concurrence(0.0).unwrap();
    let config = SweepConfig::new(spec, SweepStrategy::RxRz, 800, 50, 1e-9).unwrap();
    let samples = sweep::run_sweep(&config).unwrap();
    let worst_modulus = samples
        .iter()
        .map(|s| (s.modulus() - 1.0).abs())
        .fold(0.0_f64, f64::max);
    let pass_a = worst_modulus <= 1e-9;

    // C = 0.94: confined to the partial-entanglement ellipse
    let spec = SchmidtSpec::qubit_with_concurrence(0.94).unwrap();
    let config = SweepConfig::new(spec, SweepStrategy::RxRz, 800, 51, 1e-9).unwrap();
    let samples = sweep::run_sweep(&config).unwrap();
    let confinement = sweep::check_confinement(&samples, 2, Some(0.94), 1e-9).unwrap();
    let pass_b = confinement.violations.is_empty();

    // C = 1: real overlaps, histogram mass only at 0 and +-pi
    let spec = SchmidtSpec::maximally_entangled(2).unwrap();
    let config = SweepConfig::new(spec, SweepStrategy::RxRz, 800, 52, 1e-9).unwrap();
    let samples = sweep::run_sweep(&config).unwrap();
    let worst_im = samples
        .iter()
        .map(|s| s.value.im.abs())
        .fold(0.0_f64, f64::max);
    let histogram = sweep::phase_histogram(&samples, 36).unwrap();
    let allowed = [0usize, 17, 18, 35];
    let stray: usize = histogram
        .iter()
        .enumerate()
        .filter(|(bin, (_, count))| *count > 0 && !allowed.contains(bin))
        .map(|(_, (_, count))| count)
        .sum();
    let pass_c = worst_im <= 1e-9 && stray == 0;

    let elapsed = started.elapsed();
    let pass = pass_a && pass_b && pass_c && elapsed < Duration::from_secs(10);
    report(
        "criterion 5 (rxrz families at C = 0, 0.94, 1)",
        pass,
        &format!(
            "C=0 modulus defect {worst_modulus:.3e}; C=0.94 violations {}; \
             C=1 max imaginary {worst_im:.3e}, stray bin mass {stray}; {elapsed:.2?} of 10 s",
            confinement.violations.len()
        ),
    );
}

#[test]
fn criterion_6_interferometric_readout() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_direct = 0.0_f64;
    let mut worst_linear = 0.0_f64;
    let mut checked = 0usize;
    for i in 0..1000usize {
        // alternate between a fully general joint unitary (d = 2) and a
        // local product (d = 3)
        let (psi, u) = if i % 2 == 0 {
            let psi = random_state(2, &mut rng);
            (psi, haar_su(4, &mut rng))
        } else {
            let psi = random_state(3, &mut rng);
            let ua = haar_su(3, &mut rng);
            let ub = haar_su(3, &mut rng);
            (psi, ua.kronecker(&ub))
        };
        let v = flatten(&psi);
        let direct = (v.adjoint() * &u * &v)[(0, 0)];
        let full = interferometer::run_interferometry(&psi, &u, 1.0).unwrap();
        worst_direct = worst_direct.max((full.signal - direct).norm());
        if i % 10 == 0 {
            for epsilon in [1e-2, 1e-5] {
                let scaled = interferometer::run_interferometry(&psi, &u, epsilon).unwrap();
                worst_linear =
                    worst_linear.max((scaled.signal - full.signal.scale(epsilon)).norm());
            }
        }
        checked += 1;
    }
    let elapsed = started.elapsed();
    let pass = worst_direct <= 1e-12 && worst_linear <= 1e-12 && elapsed < Duration::from_secs(30);
    report(
        "criterion 6 (readout equals direct overlap; polarization linearity)",
        pass,
        &format!(
            "{checked} pairs: worst direct deviation {worst_direct:.3e}, \
             worst linearity deviation {worst_linear:.3e} (tolerance 1e-12); {elapsed:.2?} of 30 s"
        ),
    );
}

#[test]
fn criterion_7_sector_invariants() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_theta = 0.0_f64;
    let mut worst_spectrum = 0.0_f64;
    for i in 0..1000usize {
        let d = 2 + i % 3;
        let psi = random_state(d, &mut rng);
        let before = state::decompose_sectors(&psi).unwrap();
        let ua = haar_su(d, &mut rng);
        let ub = haar_su(d, &mut rng);
        let evolved = state::evolve_local(&psi, &ua, &ub).unwrap();
        let after = state::decompose_sectors(&evolved).unwrap();
        worst_theta = worst_theta.max((after.theta - before.theta).abs());
        let mut spec_before: Vec<f64> = before.q.symmetric_eigenvalues().iter().copied().collect();
        let mut spec_after: Vec<f64> = after.q.symmetric_eigenvalues().iter().copied().collect();
        spec_before.sort_by(f64::total_cmp);
        spec_after.sort_by(f64::total_cmp);
        for (b, a) in spec_before.iter().zip(&spec_after) {
            worst_spectrum = worst_spectrum.max((a - b).abs());
        }
    }
    let elapsed = started.elapsed();
    let pass = worst_theta <= 1e-9 && worst_spectrum <= 1e-9 && elapsed < Duration::from_secs(10);
    report(
        "criterion 7 (sector angle and Q spectrum invariant)",
        pass,
        &format!(
            "1000 local evolutions: max theta drift {worst_theta:.3e}, \
             max spectral drift {worst_spectrum:.3e} (tolerance 1e-9); {elapsed:.2?} of 10 s"
        ),
    );
}

#[test]
fn criterion_8_manifest_reruns_byte_identical() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["boundary", "--d", "3", "--n", "360"],
        vec!["sweep", "--d", "3", "--n", "400", "--seed", "11", "--bins", "24"],
        vec!["oracle", "--d", "2", "--steps", "256", "--bins", "90"],
        vec!["interfere", "--d", "2", "--n", "60", "--epsilon", "0.37", "--seed", "5"],
    ];
    let mut pass = true;
    let mut compared_files = 0usize;
    for base in &runs {
        let original = tempfile::tempdir().unwrap();
        let mut args = base.clone();
        args.push("--out");
        args.push(original.path().to_str().unwrap());
        let out = qbl(&args);
        pass &= out.status.success();

        let manifest = read_json(&original.path().join("manifest.json"));
        let subcommand = manifest["subcommand"].as_str().unwrap().to_string();
        let mut rebuilt: Vec<String> = vec![subcommand];
        for (key, value) in manifest["parameters"].as_object().unwrap() {
            match value.as_str().unwrap() {
                "true" => rebuilt.push(format!("--{key}")),
                "false" => {}
                text => {
                    rebuilt.push(format!("--{key}"));
                    rebuilt.push(text.to_string());
                }
            }
        }
        let outputs: Vec<String> = manifest["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();

        for threads in ["1", "4"] {
            let redo = tempfile::tempdir().unwrap();
            let mut redo_args = rebuilt.clone();
            redo_args.extend([
                "--out".to_string(),
                redo.path().to_str().unwrap().to_string(),
                "--threads".to_string(),
                threads.to_string(),
            ]);
            let redo_refs: Vec<&str> = redo_args.iter().map(String::as_str).collect();
            let out = qbl(&redo_refs);
            pass &= out.status.success();
            for name in &outputs {
                let a = fs::read(original.path().join(name)).unwrap();
                let b = fs::read(redo.path().join(name)).unwrap();
                pass &= a == b;
                compared_files += 1;
            }
        }
    }
    report(
        "criterion 8 (manifest reruns byte-identical across thread counts)",
        pass,
        &format!(
            "4 subcommands x 2 thread counts, {compared_files} files compared byte for byte"
        ),
    );
}
