//! Two-qudit pure states as coefficient matrices.
//!
//! A pure state of two d-level systems expands as sum_ij M_ij |i>|j> with a
//! d x d coefficient matrix M of unit Frobenius norm. Everything observable
//! here factors through M: local evolutions act as M -> U_A M U_B^T, the
//! overlap with the initial state is Tr[M(0)' M(t)], and M itself splits into
//! three independently evolving sectors M = exp(i theta) Q S with Q Hermitian
//! positive and S special unitary.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, canonical_phase, C64, CMatrix};

/// Tolerance on the state normalization Tr(M'M) = 1.
pub const NORM_TOL: f64 = 1e-10;

/// Below this |det M| the coefficient matrix counts as singular and the
/// sector decomposition is refused.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Pure two-qudit state held as its normalized coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQuditState {
    d: usize,
    m: CMatrix,
}

impl TwoQuditState {
    /// Wraps a coefficient matrix, checking shape and normalization.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        linalg::check_dim(m.nrows())?;
        let norm = m.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!(
                "coefficient matrix norm {norm} differs from 1 beyond {NORM_TOL:.1e}"
            )));
        }
        Ok(Self { d: m.nrows(), m })
    }

    /// Diagonal coefficient matrix built from Schmidt weights.
    pub fn from_schmidt(spec: &SchmidtSpec) -> Self {
        let weights = DVector::from_iterator(
            spec.d(),
            spec.weights().iter().map(|&w| C64::new(w, 0.0)),
        );
        Self {
            d: spec.d(),
            m: CMatrix::from_diagonal(&weights),
        }
    }

    /// State with all Schmidt weights equal, M = 1/sqrt(d).
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        linalg::check_dim(d)?;
        let w = 1.0 / (d as f64).sqrt();
        Ok(Self {
            d,
            m: CMatrix::from_diagonal_element(d, d, C64::new(w, 0.0)),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// |det M|; vanishes exactly when the Schmidt rank is deficient.
    pub fn abs_det(&self) -> f64 {
        linalg::determinant(&self.m).norm()
    }
}

/// Schmidt weights in descending order with unit sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpec {
    d: usize,
    weights: Vec<f64>,
}

impl SchmidtSpec {
    /// Validates and canonicalizes (sorts descending) a weight list.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        linalg::check_dim(weights.len())?;
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Contract(
                "Schmidt weights must be finite and nonnegative".into(),
            ));
        }
        let norm_sq: f64 = weights.iter().map(|w| w * w).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!(
                "Schmidt weights have squared sum {norm_sq}, expected 1"
            )));
        }
        weights.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            d: weights.len(),
            weights,
        })
    }

    /// Equal weights 1/sqrt(d).
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        linalg::check_dim(d)?;
        Self::new(vec![1.0 / (d as f64).sqrt(); d])
    }

    /// Qubit weights (cos a, sin a) with a chosen so that the concurrence of
    /// the resulting state equals c.
    pub fn qubit_with_concurrence(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Contract(format!(
                "concurrence {c} outside [0, 1]"
            )));
        }
        let alpha = c.asin() / 2.0;
        Self::new(vec![alpha.cos(), alpha.sin()])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The triple (theta, Q, S) with M = exp(i theta) Q S.
///
/// theta lives on the principal branch (-pi/d, pi/d]; the decomposition is
/// unique only modulo the center of SU(d), and fixing the branch makes it
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDecomposition {
    /// U(1) sector angle.
    pub theta: f64,
    /// Hermitian positive semidefinite sector.
    pub q: CMatrix,
    /// Special unitary sector.
    pub s: CMatrix,
}

/// Splits a nonsingular state into its three sectors.
pub fn decompose_sectors(state: &TwoQuditState) -> Result<SectorDecomposition> {
    let det = linalg::determinant(state.matrix());
    if det.norm() <= SINGULAR_TOL {
        return Err(Error::SingularCoefficientMatrix {
            abs_det: det.norm(),
        });
    }
    let theta = canonical_phase(det.arg()) / state.d() as f64;
    let dephased = state.matrix() * C64::from_polar(1.0, -theta);
    let (q, u) = linalg::polar_decompose(&dephased)?;
    // the unitary factor already has det = 1 up to rounding; projecting onto
    // SU(d) pins the invariant exactly
    let s = linalg::project_su(&u)?;
    Ok(SectorDecomposition { theta, q, s })
}

/// Applies a local operation pair, M -> U_A M U_B^T.
pub fn evolve_local(
    state: &TwoQuditState,
    u_a: &CMatrix,
    u_b: &CMatrix,
) -> Result<TwoQuditState> {
    for u in [u_a, u_b] {
        if u.nrows() != state.d() || u.ncols() != state.d() {
            return Err(Error::DimensionMismatch {
                left: u.nrows(),
                right: state.d(),
            });
        }
        let deviation = linalg::unitarity_deviation(u);
        if deviation > 1e-9 {
            return Err(Error::NotUnitary { deviation });
        }
    }
    // unitary factors preserve the Frobenius norm, no renormalization needed
    Ok(TwoQuditState {
        d: state.d(),
        m: u_a * state.matrix() * u_b.transpose(),
    })
}

/// Overlap of two states of equal dimension, Tr[M_initial' M_evolved].
pub fn overlap(initial: &TwoQuditState, evolved: &TwoQuditState) -> Result<C64> {
    if initial.d() != evolved.d() {
        return Err(Error::DimensionMismatch {
            left: initial.d(),
            right: evolved.d(),
        });
    }
    Ok(initial.matrix().dotc(evolved.matrix()))
}

/// Concurrence of a pure qubit pair, 2 |det M|.
pub fn concurrence(state: &TwoQuditState) -> Result<f64> {
    if state.d() != 2 {
        return Err(Error::Contract(format!(
            "concurrence is defined for qubit pairs only (d = {})",
            state.d()
        )));
    }
    Ok((2.0 * state.abs_det()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenphases, haar_unitary, project_su, unitarity_deviation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).camax()
    }

    fn haar_su(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        project_su(&haar_unitary(d, rng).unwrap()).unwrap()
    }

    #[test]
    fn schmidt_product_state() {
        let spec = SchmidtSpec::new(vec![1.0, 0.0]).unwrap();
        let state = TwoQuditState::from_schmidt(&spec);
        assert_eq!(state.d(), 2);
        assert_eq!(state.matrix()[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(state.matrix()[(1, 1)], C64::new(0.0, 0.0));
        assert!(state.abs_det() <= SINGULAR_TOL);
        assert_eq!(concurrence(&state).unwrap(), 0.0);
    }

    #[test]
    fn schmidt_partially_entangled_qubits() {
        let alpha = 7.0 * PI / 36.0;
        let spec = SchmidtSpec::new(vec![alpha.cos(), alpha.sin()]).unwrap();
        let state = TwoQuditState::from_schmidt(&spec);
        let c = concurrence(&state).unwrap();
        assert!((c - (7.0 * PI / 18.0).sin()).abs() < 1e-12);
        assert!((c - 0.94).abs() < 0.005);
    }

    #[test]
    fn schmidt_maximally_entangled_sectors() {
        let state = TwoQuditState::from_schmidt(&SchmidtSpec::maximally_entangled(3).unwrap());
        let sectors = decompose_sectors(&state).unwrap();
        assert!(sectors.theta.abs() < 1e-12);
        let expected_q = CMatrix::from_diagonal_element(3, 3, C64::new(1.0 / 3.0_f64.sqrt(), 0.0));
        assert!(max_entry_diff(&sectors.q, &expected_q) < 1e-12);
        assert!(max_entry_diff(&sectors.s, &CMatrix::identity(3, 3)) < 1e-12);
    }

    #[test]
    fn schmidt_spec_validation() {
        assert!(SchmidtSpec::new(vec![0.5, 0.5]).is_err(), "not normalized");
        assert!(SchmidtSpec::new(vec![1.0]).is_err(), "dimension too small");
        assert!(SchmidtSpec::new(vec![-0.6, 0.8]).is_err(), "negative weight");
        let spec = SchmidtSpec::new(vec![0.6, 0.8]).unwrap();
        assert_eq!(spec.weights(), &[0.8, 0.6], "weights are sorted descending");
    }

    #[test]
    fn concurrence_helper_spec() {
        let spec = SchmidtSpec::qubit_with_concurrence(1.0).unwrap();
        for w in spec.weights() {
            assert!((w - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        }
        let state = TwoQuditState::from_schmidt(&SchmidtSpec::qubit_with_concurrence(0.94).unwrap());
        assert!((concurrence(&state).unwrap() - 0.94).abs() < 1e-12);
    }

    #[test]
    fn pure_phase_decomposition() {
        let m = CMatrix::from_diagonal_element(2, 2, C64::from_polar(1.0 / 2.0_f64.sqrt(), PI / 8.0));
        let state = TwoQuditState::from_matrix(m).unwrap();
        let sectors = decompose_sectors(&state).unwrap();
        assert!((sectors.theta - PI / 8.0).abs() < 1e-12);
        let expected_q = CMatrix::from_diagonal_element(2, 2, C64::new(1.0 / 2.0_f64.sqrt(), 0.0));
        assert!(max_entry_diff(&sectors.q, &expected_q) < 1e-12);
        assert!(max_entry_diff(&sectors.s, &CMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn decompose_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5150);
        for d in 2..=4 {
            let initial = TwoQuditState::maximally_entangled(d).unwrap();
            for _ in 0..50 {
                let ua = haar_su(d, &mut rng);
                let ub = haar_su(d, &mut rng);
                let evolved = evolve_local(&initial, &ua, &ub).unwrap();
                let sectors = decompose_sectors(&evolved).unwrap();
                let rebuilt =
                    &sectors.q * &sectors.s * C64::from_polar(1.0, sectors.theta);
                assert!(max_entry_diff(&rebuilt, evolved.matrix()) <= 1e-10);
                assert!(
                    (linalg::determinant(&sectors.s) - C64::new(1.0, 0.0)).norm() <= 1e-12
                );
            }
        }
    }

    #[test]
    fn decompose_rejects_singular() {
        let state = TwoQuditState::from_schmidt(&SchmidtSpec::new(vec![1.0, 0.0]).unwrap());
        assert!(matches!(
            decompose_sectors(&state),
            Err(Error::SingularCoefficientMatrix { .. })
        ));
    }

    #[test]
    fn evolve_identity_is_noop() {
        let state = TwoQuditState::maximally_entangled(3).unwrap();
        let eye = CMatrix::identity(3, 3);
        let evolved = evolve_local(&state, &eye, &eye).unwrap();
        assert_eq!(&state, &evolved);
    }

    #[test]
    fn evolve_bell_by_i_sigma_z() {
        let bell = TwoQuditState::maximally_entangled(2).unwrap();
        let mut u = CMatrix::zeros(2, 2);
        u[(0, 0)] = C64::new(0.0, 1.0);
        u[(1, 1)] = C64::new(0.0, -1.0);
        let eye = CMatrix::identity(2, 2);
        let evolved = evolve_local(&bell, &u, &eye).unwrap();
        let o = overlap(&bell, &evolved).unwrap();
        assert!(o.norm() < 1e-15, "trace of i sigma_z vanishes");
    }

    #[test]
    fn evolved_su_sector_is_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        let initial = TwoQuditState::maximally_entangled(3).unwrap();
        for _ in 0..25 {
            let ua = haar_su(3, &mut rng);
            let ub = haar_su(3, &mut rng);
            let evolved = evolve_local(&initial, &ua, &ub).unwrap();
            let sectors = decompose_sectors(&evolved).unwrap();
            let expected = &ua * ub.transpose();
            assert!(max_entry_diff(&sectors.s, &expected) <= 1e-10);
            // Q spectrum untouched: still 1/sqrt(3) three-fold
            let expected_q =
                CMatrix::from_diagonal_element(3, 3, C64::new(1.0 / 3.0_f64.sqrt(), 0.0));
            assert!(max_entry_diff(&sectors.q, &expected_q) <= 1e-10);
        }
    }

    #[test]
    fn overlap_basics() {
        let state = TwoQuditState::maximally_entangled(4).unwrap();
        let o = overlap(&state, &state).unwrap();
        assert!((o - C64::new(1.0, 0.0)).norm() < 1e-14);

        let other = TwoQuditState::maximally_entangled(3).unwrap();
        assert!(overlap(&state, &other).is_err());
    }

    #[test]
    fn overlap_equals_normalized_su_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(616);
        for d in 2..=4 {
            let initial = TwoQuditState::maximally_entangled(d).unwrap();
            for _ in 0..25 {
                let ua = haar_su(d, &mut rng);
                let ub = haar_su(d, &mut rng);
                let evolved = evolve_local(&initial, &ua, &ub).unwrap();
                let o = overlap(&initial, &evolved).unwrap();
                assert!(o.norm() <= 1.0 + 1e-12);
                let s = decompose_sectors(&evolved).unwrap().s;
                let trace = s.diagonal().sum() / C64::new(d as f64, 0.0);
                assert!((o - trace).norm() <= 1e-10, "overlap is Tr S / d");
            }
        }
    }

    #[test]
    fn sector_independence_under_local_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for d in 2..=4 {
            // a generic nonsingular state with a nonzero U(1) angle
            let weights: Vec<f64> = (1..=d).map(|k| k as f64).collect();
            let norm: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            let spec = SchmidtSpec::new(weights.iter().map(|w| w / norm).collect()).unwrap();
            let twisted = TwoQuditState::from_matrix(
                TwoQuditState::from_schmidt(&spec).matrix() * C64::from_polar(1.0, 0.3),
            )
            .unwrap();
            let before = decompose_sectors(&twisted).unwrap();
            let spectrum_before = before.q.clone().hermitian_part().symmetric_eigen();
            let mut evs_before: Vec<f64> =
                spectrum_before.eigenvalues.iter().copied().collect();
            evs_before.sort_by(f64::total_cmp);

            for _ in 0..100 {
                let ua = haar_su(d, &mut rng);
                let ub = haar_su(d, &mut rng);
                let evolved = evolve_local(&twisted, &ua, &ub).unwrap();
                let after = decompose_sectors(&evolved).unwrap();
                assert!((after.theta - before.theta).abs() <= 1e-9, "theta frozen");
                let spectrum = after.q.clone().hermitian_part().symmetric_eigen();
                let mut evs: Vec<f64> = spectrum.eigenvalues.iter().copied().collect();
                evs.sort_by(f64::total_cmp);
                for (a, b) in evs.iter().zip(&evs_before) {
                    assert!((a - b).abs() <= 1e-9, "Q spectrum frozen");
                }
            }
        }
    }

    #[test]
    fn bell_overlap_stays_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bell = TwoQuditState::maximally_entangled(2).unwrap();
        for _ in 0..200 {
            let ua = haar_su(2, &mut rng);
            let ub = haar_su(2, &mut rng);
            let evolved = evolve_local(&bell, &ua, &ub).unwrap();
            let o = overlap(&bell, &evolved).unwrap();
            assert!(o.im.abs() <= 1e-9, "SU(2) traces are real");
        }
    }

    #[test]
    fn evolved_eigenphase_sum_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let initial = TwoQuditState::maximally_entangled(3).unwrap();
        for _ in 0..20 {
            let ua = haar_su(3, &mut rng);
            let ub = haar_su(3, &mut rng);
            let evolved = evolve_local(&initial, &ua, &ub).unwrap();
            let s = decompose_sectors(&evolved).unwrap().s;
            assert!(unitarity_deviation(&s) <= 1e-12);
            let config = eigenphases(&s).unwrap();
            assert!(config.sum_defect().abs() <= 1e-9);
        }
    }
}
