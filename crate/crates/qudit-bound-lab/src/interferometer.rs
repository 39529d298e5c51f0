//! Density-matrix simulation of the interferometric overlap readout.
//!
//! The measurement protocol attaches an ancilla qubit to the two-qudit
//! register, prepares the pseudo-pure state
//!
//! ```text
//! rho = (1 - epsilon) 1/D + epsilon |0><0| (x) |psi><psi|,   D = 2 d^2,
//! ```
//!
//! applies a Hadamard on the ancilla followed by a controlled-U on the
//! system, and reads the ancilla coherence <sigma_x> + i <sigma_y>. The
//! maximally mixed part is invariant under the whole circuit and leaves no
//! trace in the coherence, so the signal is exactly epsilon <psi|U|psi>,
//! which makes this an independent route to the overlap: nothing here shares
//! code with the trace formula it is checked against.
//!
//! A phenomenological dephasing knob scales the ancilla coherences by
//! (1 - gamma) before readout, standing in for decoherence without modeling
//! any specific noise process.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix};
use crate::state::TwoQuditState;

/// Mixed state of the ancilla plus two-qudit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    d: usize,
    rho: CMatrix,
}

impl DensityState {
    /// Local qudit dimension d.
    pub fn local_dim(&self) -> usize {
        self.d
    }

    /// Total Hilbert dimension D = 2 d^2.
    pub fn dim(&self) -> usize {
        2 * self.d * self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.diagonal().sum()
    }

    /// Tr rho^2; for the pseudo-pure state this is (1 - eps^2)/D + eps^2.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Checks the density-matrix invariants: unit trace, Hermiticity, and
    /// spectrum bounded below by -1e-9.
    pub fn validate(&self) -> Result<()> {
        let trace = self.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::Contract(format!("density trace {trace} is not 1")));
        }
        let asymmetry = (&self.rho - self.rho.adjoint()).camax();
        if asymmetry > 1e-10 {
            return Err(Error::Contract(format!(
                "density matrix asymmetry {asymmetry:.3e}"
            )));
        }
        let spectrum = self.rho.clone().hermitian_part().symmetric_eigen();
        let floor = spectrum
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if floor < -1e-9 {
            return Err(Error::Contract(format!(
                "density matrix has eigenvalue {floor:.3e}"
            )));
        }
        Ok(())
    }
}

/// Ancilla readout: the complex coherence and the polarization it was
/// measured at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutResult {
    /// <sigma_x> + i <sigma_y> of the ancilla.
    pub signal: C64,
    /// Polarization epsilon of the pseudo-pure preparation.
    pub epsilon: f64,
}

impl ReadoutResult {
    /// Signal with the preparation polarization divided out.
    pub fn normalized(&self) -> C64 {
        self.signal / C64::new(self.epsilon, 0.0)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "polarization epsilon {epsilon} outside (0, 1]"
        )))
    }
}

/// Pseudo-pure preparation, rho = (1-eps) 1/D + eps |0><0| (x) |psi><psi|.
pub fn build_pps(system: &TwoQuditState, epsilon: f64) -> Result<DensityState> {
    check_epsilon(epsilon)?;
    let d = system.d();
    let dd = d * d;
    let big = 2 * dd;
    // |psi> is the row-major flattening of M: component (i d + j) = M_ij
    let psi = DVector::from_iterator(
        dd,
        (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| system.matrix()[(i, j)]),
    );
    let mut rho = CMatrix::from_diagonal_element(
        big,
        big,
        C64::new((1.0 - epsilon) / big as f64, 0.0),
    );
    let projector = &psi * psi.adjoint();
    for i in 0..dd {
        for j in 0..dd {
            rho[(i, j)] += C64::new(epsilon, 0.0) * projector[(i, j)];
        }
    }
    Ok(DensityState { d, rho })
}

/// Hadamard on the ancilla, identity on the register.
fn hadamard_extended(dd: usize) -> CMatrix {
    let h = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let mut g = CMatrix::zeros(2 * dd, 2 * dd);
    for s in 0..dd {
        g[(s, s)] = h;
        g[(s, dd + s)] = h;
        g[(dd + s, s)] = h;
        g[(dd + s, dd + s)] = -h;
    }
    g
}

/// Register unitary applied only when the ancilla is |1>.
fn controlled(u: &CMatrix) -> CMatrix {
    let dd = u.nrows();
    let mut g = CMatrix::zeros(2 * dd, 2 * dd);
    for s in 0..dd {
        g[(s, s)] = C64::new(1.0, 0.0);
    }
    g.view_mut((dd, dd), (dd, dd)).copy_from(u);
    g
}

/// Runs the interferometric circuit on a prepared state.
///
/// `u` acts on the d^2-dimensional register; in the measurement protocol it
/// is a local product U_A (x) U_B, but any unitary is accepted since the
/// circuit identity does not depend on the product structure.
pub fn apply_circuit(prepared: &DensityState, u: &CMatrix) -> Result<DensityState> {
    let dd = prepared.local_dim() * prepared.local_dim();
    if u.nrows() != dd || u.ncols() != dd {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: dd,
        });
    }
    let deviation = linalg::unitarity_deviation(u);
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    let hadamard = hadamard_extended(dd);
    let gate = controlled(u) * hadamard;
    Ok(DensityState {
        d: prepared.local_dim(),
        rho: &gate * &prepared.rho * gate.adjoint(),
    })
}

/// Scales the ancilla coherences by (1 - gamma), leaving populations alone.
pub fn apply_dephasing(state: &DensityState, gamma: f64) -> Result<DensityState> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Contract(format!(
            "dephasing strength {gamma} outside [0, 1]"
        )));
    }
    let dd = state.local_dim() * state.local_dim();
    let damp = C64::new(1.0 - gamma, 0.0);
    let mut rho = state.rho.clone();
    for i in 0..2 * dd {
        for j in 0..2 * dd {
            if (i < dd) != (j < dd) {
                rho[(i, j)] *= damp;
            }
        }
    }
    Ok(DensityState { d: state.d, rho })
}

/// Ancilla coherence <sigma_x> + i <sigma_y> = 2 sum_s rho[(d^2 + s, s)].
pub fn read_signal(state: &DensityState, epsilon: f64) -> ReadoutResult {
    let dd = state.local_dim() * state.local_dim();
    let mut signal = C64::new(0.0, 0.0);
    for s in 0..dd {
        signal += state.rho[(dd + s, s)];
    }
    ReadoutResult {
        signal: signal * C64::new(2.0, 0.0),
        epsilon,
    }
}

/// Full protocol: pseudo-pure preparation, Hadamard, controlled-U, readout.
pub fn run_interferometry(
    system: &TwoQuditState,
    u: &CMatrix,
    epsilon: f64,
) -> Result<ReadoutResult> {
    let prepared = build_pps(system, epsilon)?;
    let evolved = apply_circuit(&prepared, u)?;
    Ok(read_signal(&evolved, epsilon))
}
