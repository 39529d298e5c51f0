//! Monte Carlo confinement experiments.
//!
//! A sweep draws random local operations under a selectable strategy, evolves
//! a fixed initial state, and records the complex overlap with time zero. The
//! resulting clouds are checked against the analytic boundary and binned into
//! polar phase histograms.
//!
//! Reproducibility is a hard contract here: sample k always draws from the
//! RNG substream (seed, k), so the sample list is bit-identical no matter how
//! many worker threads participate or how the scheduler interleaves them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary;
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix};
use crate::state::{self, SchmidtSpec, TwoQuditState, SINGULAR_TOL};

/// How the random local operation pair is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepStrategy {
    /// Independent Haar SU(d) factors on both sides.
    #[serde(rename = "haar-two-sided")]
    HaarTwoSided,
    /// Haar SU(d) on the first qudit, identity on the second.
    #[serde(rename = "haar-one-sided")]
    HaarOneSided,
    /// R_x(theta) R_z(beta) on the first qubit with angles uniform on
    /// [0, 4 pi), identity on the second; mirrors the interferometric
    /// experiment and requires d = 2.
    #[serde(rename = "rxrz")]
    RxRz,
}

impl SweepStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SweepStrategy::HaarTwoSided => "haar-two-sided",
            SweepStrategy::HaarOneSided => "haar-one-sided",
            SweepStrategy::RxRz => "rxrz",
        }
    }
}

impl fmt::Display for SweepStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar-two-sided" => Ok(SweepStrategy::HaarTwoSided),
            "haar-one-sided" => Ok(SweepStrategy::HaarOneSided),
            "rxrz" => Ok(SweepStrategy::RxRz),
            other => Err(Error::Contract(format!(
                "unknown strategy {other:?}; expected haar-two-sided, haar-one-sided or rxrz"
            ))),
        }
    }
}

/// Full description of one Monte Carlo run.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    schmidt: SchmidtSpec,
    strategy: SweepStrategy,
    n_samples: usize,
    seed: u64,
    tol: f64,
}

impl SweepConfig {
    pub fn new(
        schmidt: SchmidtSpec,
        strategy: SweepStrategy,
        n_samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Contract("a sweep needs at least one sample".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Contract(format!(
                "membership tolerance {tol} must be positive and finite"
            )));
        }
        if strategy == SweepStrategy::RxRz && schmidt.d() != 2 {
            return Err(Error::UnsupportedStrategy {
                strategy: strategy.name().to_string(),
                d: schmidt.d(),
            });
        }
        Ok(Self {
            schmidt,
            strategy,
            n_samples,
            seed,
            tol,
        })
    }

    pub fn d(&self) -> usize {
        self.schmidt.d()
    }

    pub fn schmidt(&self) -> &SchmidtSpec {
        &self.schmidt
    }

    pub fn strategy(&self) -> SweepStrategy {
        self.strategy
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// One recorded overlap with its generator metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSample {
    pub index: usize,
    pub value: C64,
    pub strategy: SweepStrategy,
    pub seed: u64,
}

impl OverlapSample {
    /// Overlap modulus R.
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// Overlap phase in (-pi, pi].
    pub fn phase(&self) -> f64 {
        self.value.arg()
    }
}

/// Outcome of checking a sample list against the boundary.
#[derive(Debug, Clone, Serialize)]
pub struct ConfinementReport {
    pub total: usize,
    pub violations: Vec<Violation>,
    pub max_excess: f64,
}

/// A sample that escaped the boundary, with its escape distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Violation {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub excess: f64,
}

/// Qubit rotation about x, half-angle convention: R_x(t) = exp(-i t sigma_x / 2).
pub fn rotation_x(theta: f64) -> CMatrix {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    CMatrix::from_row_slice(2, 2, &[c, s, s, c])
}

/// Qubit rotation about z: R_z(t) = diag(exp(-i t/2), exp(i t/2)).
pub fn rotation_z(beta: f64) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::from_polar(1.0, -beta / 2.0),
        C64::from_polar(1.0, beta / 2.0),
    ]))
}

/// Draws the local operation pair for sample k.
///
/// Deterministic in (config.seed, k): each index gets its own counter-mode
/// RNG stream, so the draw is independent of evaluation order.
pub fn sample_unitaries(config: &SweepConfig, k: usize) -> Result<(CMatrix, CMatrix)> {
    if k >= config.n_samples() {
        return Err(Error::Contract(format!(
            "sample index {k} outside configured count {}",
            config.n_samples()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    rng.set_stream(k as u64);
    let d = config.d();
    match config.strategy() {
        SweepStrategy::HaarTwoSided => {
            let ua = linalg::project_su(&linalg::haar_unitary(d, &mut rng)?)?;
            let ub = linalg::project_su(&linalg::haar_unitary(d, &mut rng)?)?;
            Ok((ua, ub))
        }
        SweepStrategy::HaarOneSided => {
            let ua = linalg::project_su(&linalg::haar_unitary(d, &mut rng)?)?;
            Ok((ua, CMatrix::identity(d, d)))
        }
        SweepStrategy::RxRz => {
            let theta = rng.random::<f64>() * 4.0 * PI;
            let beta = rng.random::<f64>() * 4.0 * PI;
            Ok((rotation_x(theta) * rotation_z(beta), CMatrix::identity(2, 2)))
        }
    }
}

/// Runs the full sweep and returns samples in index order.
///
/// Samples evaluate in parallel; the output order is the index order by
/// construction. For a singular initial state (deficient Schmidt rank) the
/// sector decomposition does not exist and only the phase of the overlap is
/// meaningful, so those samples are recorded normalized to unit modulus; an
/// overlap indistinguishable from zero is kept as is.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<OverlapSample>> {
    let initial = TwoQuditState::from_schmidt(config.schmidt());
    let singular = initial.abs_det() <= SINGULAR_TOL;
    (0..config.n_samples())
        .into_par_iter()
        .map(|k| {
            let (ua, ub) = sample_unitaries(config, k)?;
            let evolved = state::evolve_local(&initial, &ua, &ub)?;
            let mut value = state::overlap(&initial, &evolved)?;
            if singular {
                let r = value.norm();
                if r > 1e-15 {
                    value /= C64::new(r, 0.0);
                }
            }
            Ok(OverlapSample {
                index: k,
                value,
                strategy: config.strategy(),
                seed: config.seed(),
            })
        })
        .collect()
}

/// Checks every sample against the boundary for (d, concurrence).
pub fn check_confinement(
    samples: &[OverlapSample],
    d: usize,
    concurrence: Option<f64>,
    tol: f64,
) -> Result<ConfinementReport> {
    if samples.is_empty() {
        return Err(Error::Contract(
            "confinement check needs at least one sample".into(),
        ));
    }
    let mut violations = Vec::new();
    let mut max_excess = 0.0_f64;
    for sample in samples {
        let excess = boundary::excess_distance(d, concurrence, sample.value)?;
        if excess > tol {
            violations.push(Violation {
                index: sample.index,
                re: sample.value.re,
                im: sample.value.im,
                excess,
            });
            max_excess = max_excess.max(excess);
        }
    }
    Ok(ConfinementReport {
        total: samples.len(),
        violations,
        max_excess,
    })
}

/// Bin index of a phase under the shared histogram convention.
///
/// n_bins equal bins partition (-pi, pi], half-open on the right except the
/// last bin, which closes at pi.
pub fn phase_bin(phase: f64, n_bins: usize) -> usize {
    let width = 2.0 * PI / n_bins as f64;
    let raw = ((phase + PI) / width).floor();
    (raw.max(0.0) as usize).min(n_bins - 1)
}

/// Center angle of a histogram bin.
pub fn bin_center(bin: usize, n_bins: usize) -> f64 {
    let width = 2.0 * PI / n_bins as f64;
    -PI + (bin as f64 + 0.5) * width
}

/// Polar histogram of sample phases, as (bin center, count) pairs.
pub fn phase_histogram(samples: &[OverlapSample], n_bins: usize) -> Result<Vec<(f64, usize)>> {
    if n_bins < 2 {
        return Err(Error::Contract(format!(
            "histogram needs at least 2 bins, got {n_bins}"
        )));
    }
    let mut counts = vec![0usize; n_bins];
    for sample in samples {
        counts[phase_bin(sample.phase(), n_bins)] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (bin_center(i, n_bins), c))
        .collect())
}
