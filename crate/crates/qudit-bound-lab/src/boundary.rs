//! Closed-form boundary of the reachable overlap region.
//!
//! For a maximally entangled two-qudit state evolving under local special
//! unitaries the overlap O = Tr S / d is confined to a closed curve with d
//! branches, parametrized by an eigenphase angle phi:
//!
//! ```text
//! R_max(phi)   = sqrt(1 - 4 (d-1)/d^2 sin^2(d phi / 2))
//! Phi(phi)     = phi + arg(d - 1 + exp(-i d phi))
//! theta(phi)   = pi/2 - Phi(phi) - (d-2) phi / 2
//! Lambda(phi)  = cos(d phi / 2) / d
//! ```
//!
//! Branch n covers phi in [2 n pi / d, 2 (n+1) pi / d]. The curve touches the
//! unit circle exactly at the topological phases Phi = 2 n pi / d and dips to
//! its minimum 1 - 2/d at the branch midpoints. Phi(phi) is non-decreasing
//! along a branch (slope 2 (d-1)(d-2) sin^2(d phi/2) / (d R)^2 after
//! simplification), which is what lets membership queries invert it by
//! bisection; that monotonicity is validated numerically per dimension and a
//! violation would be reported, not silently patched.
//!
//! For qubit pairs (d = 2) the curve degenerates to the segment [-1, 1] on
//! the real axis. Partially entangled qubit pairs with concurrence C obey the
//! ellipse
//!
//! ```text
//! R_max(phi) = sqrt(1 - C^2 sin^2 phi),  tan Phi = sqrt(1 - C^2) tan phi
//! ```
//!
//! which interpolates between the unit circle (C = 0) and the segment (C = 1).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{self, canonical_phase, C64};

/// One sampled point of the d-branch boundary.
///
/// `r_max` and `overlap_phase` locate the point in the overlap plane; `theta`
/// and `lambda` are the angle and scalar multiplier of the constrained
/// extremum realized there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    /// Curve parameter, the eigenphase of the (d-1)-fold group.
    pub phi: f64,
    /// Largest attainable overlap modulus.
    pub r_max: f64,
    /// Overlap phase at the maximum.
    pub overlap_phase: f64,
    /// Multiplier angle of the extremal configuration.
    pub theta: f64,
    /// Scalar multiplier of the extremal configuration.
    pub lambda: f64,
}

/// Sampled boundary curve, optionally the concurrence-dependent qubit one.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    d: usize,
    concurrence: Option<f64>,
    points: Vec<BoundaryPoint>,
    branches: Vec<usize>,
}

impl BoundaryCurve {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn concurrence(&self) -> Option<f64> {
        self.concurrence
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Branch index of the i-th sample.
    pub fn branch(&self, i: usize) -> usize {
        self.branches[i]
    }
}

/// Evaluates the d-branch boundary at a parameter angle.
pub fn boundary_point(d: usize, phi: f64) -> Result<BoundaryPoint> {
    linalg::check_dim(d)?;
    let df = d as f64;
    let half_angle = df * phi / 2.0;
    let sin_sq = half_angle.sin().powi(2);
    let r_max = (1.0 - 4.0 * (df - 1.0) / (df * df) * sin_sq).max(0.0).sqrt();
    let tail = C64::new(df - 1.0, 0.0) + C64::from_polar(1.0, -df * phi);
    let overlap_phase = phi + tail.arg();
    let theta = PI / 2.0 - overlap_phase - (df - 2.0) * phi / 2.0;
    let lambda = half_angle.cos() / df;
    Ok(BoundaryPoint {
        phi,
        r_max,
        overlap_phase,
        theta,
        lambda,
    })
}

/// Evaluates the concurrence-dependent qubit boundary.
///
/// Returns (r_max, Phi) with Phi unwrapped continuously in phi, matching
/// Phi(0) = 0, so sweeping phi over a full turn advances Phi by a full turn
/// (for C < 1).
pub fn qubit_boundary_point(c: f64, phi: f64) -> Result<(f64, f64)> {
    check_concurrence(c)?;
    let r_max = (1.0 - c * c * phi.sin().powi(2)).max(0.0).sqrt();
    let stretch = (1.0 - c * c).sqrt();
    let principal = (stretch * phi.sin()).atan2(phi.cos());
    // snap to the unwrap branch nearest phi; the continuous solution never
    // strays more than a quarter turn from the parameter
    let turns = ((phi - principal) / (2.0 * PI)).round();
    Ok((r_max, principal + 2.0 * PI * turns))
}

/// The phases where the boundary reaches the unit circle: 2 pi n / d.
pub fn topological_phases(d: usize) -> Result<Vec<f64>> {
    linalg::check_dim(d)?;
    Ok((0..d)
        .map(|n| 2.0 * PI * n as f64 / d as f64)
        .collect())
}

/// Membership predicate: does the complex overlap O lie inside (or on) the
/// boundary within tol?
pub fn contains(d: usize, o: C64, tol: f64) -> Result<bool> {
    let modulus = o.norm();
    if modulus > 1.0 + tol {
        return Err(Error::OverlapOutOfRange { modulus });
    }
    Ok(excess_distance(d, None, o)? <= tol)
}

/// Distance by which a sample escapes the boundary; zero for interior points.
///
/// With a concurrence the qubit ellipse is used (d must be 2). For the
/// degenerate cases (d = 2 without concurrence, or C = 1) the boundary
/// collapses to the segment [-1, 1] and the excess is the Euclidean distance
/// to the segment; a radial rule would blow up tiny imaginary rounding noise
/// at phases near 0 and pi into spurious violations.
pub fn excess_distance(d: usize, concurrence: Option<f64>, o: C64) -> Result<f64> {
    match concurrence {
        Some(c) => {
            check_concurrence(c)?;
            if d != 2 {
                return Err(Error::Contract(format!(
                    "concurrence boundaries are defined for d = 2 only (got d = {d})"
                )));
            }
            if c >= 1.0 - 1e-12 {
                Ok(segment_excess(o))
            } else {
                let r_bound = qubit_r_max_at_phase(c, o.arg())?;
                Ok((o.norm() - r_bound).max(0.0))
            }
        }
        None => {
            linalg::check_dim(d)?;
            if d == 2 {
                Ok(segment_excess(o))
            } else {
                let r_bound = r_max_at_phase(d, o.arg())?;
                Ok((o.norm() - r_bound).max(0.0))
            }
        }
    }
}

/// Euclidean distance from a point to the segment [-1, 1] on the real axis.
fn segment_excess(o: C64) -> f64 {
    let overhang = (o.re.abs() - 1.0).max(0.0);
    (overhang * overhang + o.im * o.im).sqrt()
}

/// Radius of the concurrence ellipse at a given overlap phase (C < 1).
pub fn qubit_r_max_at_phase(c: f64, phase: f64) -> Result<f64> {
    check_concurrence(c)?;
    if c >= 1.0 - 1e-12 {
        // degenerate segment: full modulus only on the real axis
        let t = canonical_phase(phase);
        return Ok(if t.abs() <= PHASE_SNAP_TOL || (t.abs() - PI).abs() <= PHASE_SNAP_TOL {
            1.0
        } else {
            0.0
        });
    }
    let c_sq = c * c;
    let cos_sq = phase.cos().powi(2);
    Ok(((1.0 - c_sq) / (1.0 - c_sq * cos_sq)).sqrt())
}

/// Largest modulus the d-branch boundary allows at a given overlap phase.
///
/// Locates the branch containing the phase and inverts the monotone phase
/// profile by bisection. A phase landing exactly on a branch endpoint is a
/// topological phase, where both adjoining branches reach the unit circle.
pub fn r_max_at_phase(d: usize, phase: f64) -> Result<f64> {
    linalg::check_dim(d)?;
    if d == 2 {
        let t = canonical_phase(phase);
        return Ok(if t.abs() <= PHASE_SNAP_TOL || (t.abs() - PI).abs() <= PHASE_SNAP_TOL {
            1.0
        } else {
            0.0
        });
    }
    let target = canonical_phase(phase).rem_euclid(2.0 * PI);
    let width = 2.0 * PI / d as f64;
    let branch = ((target / width).floor() as usize).min(d - 1);
    let lo = width * branch as f64;
    let hi = width * (branch + 1) as f64;
    if (target - lo).abs() <= PHASE_SNAP_TOL || (hi - target).abs() <= PHASE_SNAP_TOL {
        return Ok(1.0);
    }
    match inversion_mode(d) {
        PhaseInversion::Bisect => {
            let mut a = lo;
            let mut b = hi;
            for _ in 0..BISECT_ITERS {
                let mid = 0.5 * (a + b);
                if phase_profile(d, mid) >= target {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Ok(boundary_point(d, 0.5 * (a + b))?.r_max)
        }
        PhaseInversion::DenseLookup => {
            let mut best_r = 0.0;
            let mut best_dist = f64::INFINITY;
            for i in 0..=DENSE_LOOKUP_STEPS {
                let phi = lo + (hi - lo) * i as f64 / DENSE_LOOKUP_STEPS as f64;
                let dist = (phase_profile(d, phi) - target).abs();
                if dist < best_dist {
                    best_dist = dist;
                    best_r = boundary_point(d, phi)?.r_max;
                }
            }
            Ok(best_r)
        }
    }
}

/// Samples the boundary at n uniformly spaced parameter angles over [0, 2 pi).
///
/// With a concurrence (d = 2 only) the ellipse is sampled instead; its points
/// carry NaN in the multiplier slots, which have no meaning there.
pub fn curve(d: usize, n: usize, concurrence: Option<f64>) -> Result<BoundaryCurve> {
    linalg::check_dim(d)?;
    if n < 8 * d {
        return Err(Error::Contract(format!(
            "curve needs at least {} samples for d = {d}",
            8 * d
        )));
    }
    if concurrence.is_some() && d != 2 {
        return Err(Error::Contract(
            "concurrence curves are defined for d = 2 only".into(),
        ));
    }
    let width = 2.0 * PI / d as f64;
    let mut points = Vec::with_capacity(n);
    let mut branches = Vec::with_capacity(n);
    for i in 0..n {
        let phi = 2.0 * PI * i as f64 / n as f64;
        let point = match concurrence {
            Some(c) => {
                let (r_max, overlap_phase) = qubit_boundary_point(c, phi)?;
                BoundaryPoint {
                    phi,
                    r_max,
                    overlap_phase,
                    theta: f64::NAN,
                    lambda: f64::NAN,
                }
            }
            None => boundary_point(d, phi)?,
        };
        points.push(point);
        branches.push(((phi / width).floor() as usize).min(d - 1));
    }
    Ok(BoundaryCurve {
        d,
        concurrence,
        points,
        branches,
    })
}

/// Reports whether the phase profile passed its per-dimension monotonicity
/// validation (true selects bisection, false the dense-lookup fallback).
pub fn phase_profile_is_monotone(d: usize) -> Result<bool> {
    linalg::check_dim(d)?;
    Ok(inversion_mode(d) == PhaseInversion::Bisect)
}

const BISECT_ITERS: usize = 80;
const MONO_SAMPLES: usize = 4096;
const DENSE_LOOKUP_STEPS: usize = 1 << 16;
/// Phases this close to a branch endpoint count as topological.
const PHASE_SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseInversion {
    Bisect,
    DenseLookup,
}

/// Phi(phi) without assembling a full boundary point.
fn phase_profile(d: usize, phi: f64) -> f64 {
    let df = d as f64;
    let tail = C64::new(df - 1.0, 0.0) + C64::from_polar(1.0, -df * phi);
    phi + tail.arg()
}

/// Validates, once per dimension, that Phi is non-decreasing along a branch.
fn inversion_mode(d: usize) -> PhaseInversion {
    static MODES: OnceLock<Mutex<HashMap<usize, PhaseInversion>>> = OnceLock::new();
    let lock = MODES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut modes = lock.lock().expect("monotonicity cache poisoned");
    *modes.entry(d).or_insert_with(|| {
        let width = 2.0 * PI / d as f64;
        let mut highest = f64::NEG_INFINITY;
        for i in 0..=MONO_SAMPLES {
            let phi = width * i as f64 / MONO_SAMPLES as f64;
            let value = phase_profile(d, phi);
            if value < highest - 1e-12 {
                eprintln!(
                    "warning: overlap phase profile is not monotone along a branch at d = {d}; \
                     membership queries fall back to a dense lookup"
                );
                return PhaseInversion::DenseLookup;
            }
            highest = highest.max(value);
        }
        PhaseInversion::Bisect
    })
}

fn check_concurrence(c: f64) -> Result<()> {
    if (0.0..=1.0).contains(&c) && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("concurrence {c} outside [0, 1]")))
    }
}
