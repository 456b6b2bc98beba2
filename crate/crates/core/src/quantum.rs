//! State and operator types, Hamiltonians, fidelities and Bloch vectors.
//!
//! Single-qubit basis: `|0⟩ ≡ |↓⟩ = (1, 0)`, `|1⟩ ≡ |↑⟩ = (0, 1)`.
//!
//! Register basis (dimension 4), in this exact order:
//! `{|↓↓⟩, |↑↓⟩, |↓↑⟩, |↑↑⟩}`. Index `k = 2·b₁ + b₂`, where `b₁`, `b₂` are the
//! excitation bits of qubit 1 and qubit 2; the ket labels follow the register
//! literature, which writes qubit 2 first. Drive `ε⁽¹⁾` couples indices
//! 0↔2 and 1↔3, drive `ε⁽²⁾` couples 0↔1 and 2↔3, and the coupler `J`
//! couples 0↔3 and 1↔2.

use crate::error::{finite, Error, Result};
use crate::linalg::{self, inner, norm_sqr, CMatrix, EigenDecomposition};
use num_complex::Complex64 as C64;

const STATE_NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;
const DENSITY_EIG_TOL: f64 = 1e-8;

/// Named register levels in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegisterLevel {
    DownDown = 0,
    UpDown = 1,
    DownUp = 2,
    UpUp = 3,
}

impl RegisterLevel {
    pub const ALL: [RegisterLevel; 4] = [
        RegisterLevel::DownDown,
        RegisterLevel::UpDown,
        RegisterLevel::DownUp,
        RegisterLevel::UpUp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::DownDown => "down-down",
            Self::UpDown => "up-down",
            Self::DownUp => "down-up",
            Self::UpUp => "up-up",
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Normalized pure state of a qubit or a two-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Accepts amplitudes whose squared norm is 1 within 1e-10 and
    /// renormalizes them exactly.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        let n2 = norm_sqr(&amps);
        if (n2 - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {n2} is not 1")));
        }
        Ok(Self::renormalized(amps))
    }

    /// Normalizes any nonzero finite vector of dimension 2 or 4.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let n2 = norm_sqr(&amps);
        if !n2.is_finite() || n2 == 0.0 {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(Self::renormalized(amps))
    }

    fn renormalized(mut amps: Vec<C64>) -> Self {
        let n = norm_sqr(&amps).sqrt();
        if n != 1.0 {
            for a in amps.iter_mut() {
                *a /= n;
            }
        }
        Self { amps }
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        Self::renormalized(amps)
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::InvalidState(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut amps = vec![linalg::ZERO; dim];
        amps[k] = linalg::ONE;
        Ok(Self { amps })
    }

    pub fn ground() -> Self {
        Self::basis(2, 0).unwrap()
    }

    pub fn excited() -> Self {
        Self::basis(2, 1).unwrap()
    }

    pub fn register(level: RegisterLevel) -> Self {
        Self::basis(4, level.index()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn population(&self, k: usize) -> f64 {
        self.amps[k].norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn projector(&self) -> DensityMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix(m)
    }
}

/// Hermitian matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix entries"));
        }
        let d = m.hermiticity_defect();
        if d > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(d));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.hermiticity_defect() <= HERMITIAN_TOL * m.max_abs().max(1.0));
        Self(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn spectral_norm(&self) -> f64 {
        let e = linalg::eigh(&self.0);
        e.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale_re(s))
    }
}

/// Unitary matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator(CMatrix);

impl UnitaryOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix entries"));
        }
        let d = m.unitarity_defect();
        if d > UNITARY_TOL {
            return Err(Error::NotUnitary(d));
        }
        Ok(Self(m))
    }

    /// Wraps a product of unitaries without re-checking.
    pub(crate) fn from_raw(m: CMatrix) -> Self {
        debug_assert!(m.unitarity_defect() < 1e-8, "unitarity defect {}", m.unitarity_defect());
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &UnitaryOperator) -> UnitaryOperator {
        Self(&self.0 * &other.0)
    }

    /// `next · self` (apply `self` first, then `next`).
    pub fn followed_by(&self, next: &UnitaryOperator) -> UnitaryOperator {
        Self(&next.0 * &self.0)
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self(self.0.adjoint())
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        Ok(StateVector::from_raw(self.0.matvec(psi.amplitudes())))
    }

    /// |⟨to|U|from⟩|²
    pub fn transition_probability(&self, from: usize, to: usize) -> f64 {
        self.0[(to, from)].norm_sqr()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.0.unitarity_defect()
    }
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix entries"));
        }
        let h = m.hermiticity_defect();
        if h > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {h:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let rho = Self(m);
        let lo = rho.min_eigenvalue();
        if lo < -DENSITY_EIG_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo:.3e}")));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigh(&self.0).values[0]
    }
}

/// `−½(Δσz + εσx)`; entry `[0][0] = −Δ/2`.
pub fn single_qubit_hamiltonian(delta: f64, epsilon: f64) -> Result<HermitianOperator> {
    finite("delta", delta)?;
    finite("epsilon", epsilon)?;
    Ok(HermitianOperator(single_qubit_matrix(delta, epsilon)))
}

pub(crate) fn single_qubit_matrix(delta: f64, epsilon: f64) -> CMatrix {
    CMatrix::from_real_rows(&[
        [-0.5 * delta, -0.5 * epsilon],
        [-0.5 * epsilon, 0.5 * delta],
    ])
}

/// Register Hamiltonian `H⁽¹⁾⊗I + I⊗H⁽²⁾ − ½Jσx⊗σx`, written directly as the
/// `−½`-prefactored 4×4 matrix in the fixed basis order.
pub fn two_qubit_hamiltonian(d1: f64, d2: f64, e1: f64, e2: f64, j: f64) -> Result<HermitianOperator> {
    finite("delta1", d1)?;
    finite("delta2", d2)?;
    finite("epsilon1", e1)?;
    finite("epsilon2", e2)?;
    finite("j", j)?;
    Ok(HermitianOperator(two_qubit_matrix(d1, d2, e1, e2, j)))
}

pub(crate) fn two_qubit_matrix(d1: f64, d2: f64, e1: f64, e2: f64, j: f64) -> CMatrix {
    CMatrix::from_real_rows(&[
        [d1 + d2, e2, e1, j],
        [e2, d1 - d2, j, e1],
        [e1, j, -d1 + d2, e2],
        [j, e1, e2, -d1 - d2],
    ])
    .scale_re(-0.5)
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// |⟨a|b⟩|²
pub fn state_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    Ok(inner(a.amplitudes(), b.amplitudes()).norm_sqr().min(1.0))
}

/// |Tr(U†V)|² / d², invariant under global phase.
pub fn gate_fidelity(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64> {
    check_same_dim(u.dim(), v.dim())?;
    let d = u.dim() as f64;
    let tr: C64 = (&u.0.adjoint() * &v.0).trace();
    Ok((tr.norm_sqr() / (d * d)).min(1.0))
}

/// (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a qubit state.
pub fn bloch_vector(state: &StateVector) -> Result<[f64; 3]> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.dim(),
        });
    }
    let a = state.amps[0];
    let b = state.amps[1];
    let cross = a.conj() * b;
    Ok([2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()])
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian operator.
pub fn hermitian_eigendecomposition(h: &HermitianOperator) -> EigenDecomposition {
    linalg::eigh(&h.0)
}

/// Same as [`hermitian_eigendecomposition`] but validates a raw matrix first.
pub fn eigendecompose_matrix(m: &CMatrix) -> Result<EigenDecomposition> {
    let h = HermitianOperator::new(m.clone())?;
    Ok(hermitian_eigendecomposition(&h))
}
