//! Dense complex linear algebra at small fixed dimension.
//!
//! Everything operates on dynamically sized matrices but is tuned for local
//! dimensions 2 <= d <= 8: decompositions go through dense QR, SVD and Schur
//! factorizations, and the random constructors draw from caller-provided
//! seedable streams so any run can be reproduced bit for bit.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;

/// Dense complex matrix in double precision.
pub type CMatrix = DMatrix<C64>;

/// Largest supported local dimension.
pub const MAX_DIM: usize = 8;

/// Rejects dimensions outside 2..=[`MAX_DIM`].
pub fn check_dim(d: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange { d, max: MAX_DIM })
    }
}

/// Wraps an angle to the principal interval (-pi, pi]; -pi maps to +pi.
pub fn canonical_phase(angle: f64) -> f64 {
    let mut wrapped = angle.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped -= 2.0 * PI;
    }
    wrapped
}

/// Max-modulus deviation of U from unitarity, the largest entry of |U'U - 1|.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let mut gram = u.adjoint() * u;
    for i in 0..gram.nrows() {
        gram[(i, i)] -= C64::new(1.0, 0.0);
    }
    gram.camax()
}

/// Determinant through an LU factorization.
pub fn determinant(m: &CMatrix) -> C64 {
    m.clone().lu().determinant()
}

/// Draws a Haar-distributed d x d unitary from the given stream.
///
/// Uses the QR factorization of a complex Ginibre sample followed by the
/// R-diagonal phase correction. The correction matters: the phases of a raw
/// QR output are biased and would distort the sampled overlap clouds.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> Result<CMatrix> {
    check_dim(d)?;
    let ginibre = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let modulus = rjj.norm();
        let phase = if modulus == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            rjj / C64::new(modulus, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    Ok(u)
}

/// Scales a unitary onto SU(d) by removing the principal d-th root of its
/// determinant phase: S = exp(-i arg(det U) / d) U. Idempotent up to
/// floating-point error; the residual center ambiguity (a common phase
/// 2 pi / d) is deliberately left in place since every quantity derived
/// downstream is symmetric under it.
pub fn project_su(u: &CMatrix) -> Result<CMatrix> {
    let deviation = unitarity_deviation(u);
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    let det = determinant(u);
    let correction = C64::from_polar(1.0, -det.arg() / u.nrows() as f64);
    Ok(u * correction)
}

/// Polar factorization M = Q U with Q = (M M')^(1/2) Hermitian positive
/// semidefinite and U unitary, both read off the SVD of M.
pub fn polar_decompose(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let abs_det = determinant(m).norm();
    if abs_det <= 1e-12 {
        return Err(Error::SingularCoefficientMatrix { abs_det });
    }
    let svd = m.clone().svd(true, true);
    let w = svd
        .u
        .ok_or_else(|| Error::Decomposition("SVD returned no left factor".into()))?;
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Decomposition("SVD returned no right factor".into()))?;
    let sigma = CMatrix::from_diagonal(&svd.singular_values.map(|s| C64::new(s, 0.0)));
    let q = &w * sigma * w.adjoint();
    // symmetrize away rounding asymmetry so Q = Q' holds to machine precision
    let q = (&q + q.adjoint()) * C64::new(0.5, 0.0);
    let unitary = w * vt;
    Ok((q, unitary))
}

/// Eigenphases of an SU(d) element.
///
/// The eigenvalues of a special unitary are phase factors exp(i phi_j); this
/// returns the phi_j wrapped to (-pi, pi] and sorted ascending. Their sum
/// vanishes only mod 2 pi (wrapping can absorb whole turns), which is what
/// [`EigenphaseConfig`] checks.
pub fn eigenphases(s: &CMatrix) -> Result<EigenphaseConfig> {
    let deviation = unitarity_deviation(s);
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    let det_error = (determinant(s) - C64::new(1.0, 0.0)).norm();
    if det_error > 1e-9 {
        return Err(Error::NotSpecialUnitary {
            deviation: det_error,
        });
    }
    let schur = s.clone().schur();
    let eigenvalues = schur
        .eigenvalues()
        .ok_or_else(|| Error::Decomposition("Schur failed to triangularize".into()))?;
    let phases = eigenvalues.iter().map(|z| z.arg()).collect();
    EigenphaseConfig::new(s.nrows(), phases)
}

/// Sorted eigenphase list of an SU(d) element.
///
/// Invariants: each phase lies in (-pi, pi], the list is ascending, and the
/// sum is congruent to zero mod 2 pi within [`EigenphaseConfig::SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseConfig {
    d: usize,
    phases: Vec<f64>,
}

impl EigenphaseConfig {
    /// Tolerance on the mod-2pi phase sum.
    pub const SUM_TOL: f64 = 1e-9;

    pub fn new(d: usize, mut phases: Vec<f64>) -> Result<Self> {
        if phases.len() != d {
            return Err(Error::Contract(format!(
                "expected {d} eigenphases, got {}",
                phases.len()
            )));
        }
        for p in phases.iter_mut() {
            *p = canonical_phase(*p);
        }
        phases.sort_by(f64::total_cmp);
        let config = Self { d, phases };
        let defect = config.sum_defect();
        if defect.abs() > Self::SUM_TOL {
            return Err(Error::Contract(format!(
                "eigenphase sum defect {defect:.3e} exceeds {:.1e}",
                Self::SUM_TOL
            )));
        }
        Ok(config)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Distance of the phase sum from the nearest multiple of 2 pi.
    pub fn sum_defect(&self) -> f64 {
        canonical_phase(self.phases.iter().sum())
    }
}
