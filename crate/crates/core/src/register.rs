//! Two-qubit register: coupler-only dynamics and the kick / drive / kick
//! protocol.
//!
//! Both examples here assume equal qubit splittings, so most functions take a
//! single `delta`. The general Hamiltonian lives in [`RegisterParams`].

use crate::analytic::{unipolar_frequency, RectPulse};
use crate::error::{finite, invalid, non_negative, Result};
use crate::linalg::{eigh, CMatrix, EigenDecomposition, I, ONE, ZERO};
use crate::quantum::{
    eigendecompose_matrix, two_qubit_matrix, HermitianOperator, RegisterLevel, UnitaryOperator,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Largest coupler area `J·τ₁` accepted by the first-order kick.
pub const FIRST_ORDER_KICK_LIMIT: f64 = 0.2;
const FIRST_ORDER_KICK_WARN: f64 = 0.1;

/// Which form of a printed two-qubit formula to evaluate.
///
/// `AsDerived` follows from the Hamiltonian with its −½ prefactor and agrees
/// with direct propagation. `AsPrinted` reproduces the published expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaConvention {
    #[default]
    AsDerived,
    AsPrinted,
}

/// How the coupler kicks are modelled in the three-stage protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KickModel {
    /// Exact exponential of the coupler-only Hamiltonian (Δ included).
    #[default]
    Exact,
    /// `I + i g σx⊗σx`, with `g = Jτ₁/2`. Not unitary.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterParams {
    pub delta1: f64,
    pub delta2: f64,
    pub j: f64,
    pub a1: f64,
    pub a2: f64,
}

impl RegisterParams {
    pub fn new(delta1: f64, delta2: f64, j: f64, a1: f64, a2: f64) -> Result<Self> {
        finite("delta1", delta1)?;
        finite("delta2", delta2)?;
        finite("j", j)?;
        finite("a1", a1)?;
        finite("a2", a2)?;
        Ok(Self { delta1, delta2, j, a1, a2 })
    }

    /// Hamiltonian with both drives and the coupler on.
    pub fn hamiltonian(&self) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(two_qubit_matrix(
            self.delta1, self.delta2, self.a1, self.a2, self.j,
        ))
    }
}

/// Kick, drive, kick. The kicks have coupling `j` for `tau1` with the drives
/// off; the drive lasts `tau2` with the coupler off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeStageSpec {
    pub tau1: f64,
    pub tau2: f64,
    pub j: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ThreeStageSpec {
    pub fn new(tau1: f64, tau2: f64, j: f64, a1: f64, a2: f64) -> Result<Self> {
        non_negative("tau1", tau1)?;
        non_negative("tau2", tau2)?;
        finite("j", j)?;
        finite("a1", a1)?;
        finite("a2", a2)?;
        Ok(Self { tau1, tau2, j, a1, a2 })
    }

    /// Coupler area `J·τ₁`.
    pub fn kick_area(&self) -> f64 {
        self.j * self.tau1
    }
}

/// Spectral gap of the |↓↓⟩,|↑↑⟩ block of the coupler-only Hamiltonian.
pub fn coupler_gap(delta: f64, j: f64) -> f64 {
    (j * j + 4.0 * delta * delta).sqrt()
}

/// Eigenpairs of the coupler-only Hamiltonian (ε⁽¹⁾ = ε⁽²⁾ = 0, equal Δ).
///
/// Closed form for J ≠ 0, dense solver otherwise. The outer-block vectors are
/// `((2Δ ± G)/J, 0, 0, 1)` with `G = √(J²+4Δ²)`, belonging to `∓G/2`.
pub fn coupler_only_eigensystem(delta: f64, j: f64) -> Result<EigenDecomposition> {
    finite("delta", delta)?;
    finite("j", j)?;
    if j == 0.0 {
        return Ok(eigh(&two_qubit_matrix(delta, delta, 0.0, 0.0, 0.0)));
    }
    let g = coupler_gap(delta, j);
    let c = |x: f64| C64::new(x, 0.0);
    let pairs = vec![
        (0.5 * j, vec![ZERO, c(-1.0), ONE, ZERO]),
        (-0.5 * j, vec![ZERO, ONE, ONE, ZERO]),
        (-0.5 * g, vec![c((2.0 * delta + g) / j), ZERO, ZERO, ONE]),
        (0.5 * g, vec![c((2.0 * delta - g) / j), ZERO, ZERO, ONE]),
    ];
    Ok(EigenDecomposition::from_pairs(pairs, 1e-12 * g.max(j.abs())))
}

/// Eigenvalues as they appear in the published listing, which drops the
/// −½ prefactor: `−J, J, G, −G`. Equal to the computed spectrum times −2.
pub fn coupler_only_eigenvalues_printed(delta: f64, j: f64) -> [f64; 4] {
    let g = coupler_gap(delta, j);
    [-j, j, g, -g]
}

/// Probability of |↓↓⟩ → |↑↑⟩ with only the coupler on for `tau`.
pub fn coupler_flip_probability(
    delta: f64,
    j: f64,
    tau: f64,
    convention: FormulaConvention,
) -> Result<f64> {
    finite("delta", delta)?;
    finite("j", j)?;
    non_negative("tau", tau)?;
    if j == 0.0 {
        return Ok(0.0);
    }
    let g = coupler_gap(delta, j);
    let arg = match convention {
        FormulaConvention::AsDerived => 0.5 * tau * g,
        FormulaConvention::AsPrinted => tau * g,
    };
    Ok((j * j / (g * g)) * arg.sin().powi(2))
}

/// `Σ_k |v_k⟩ e^{−iλ_k t} ⟨v_k|`.
pub fn spectral_evolution_unitary(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    finite("t", t)?;
    let eig = eigh(h.matrix());
    Ok(evolve_eigensystem(&eig, t))
}

fn evolve_eigensystem(eig: &EigenDecomposition, t: f64) -> UnitaryOperator {
    UnitaryOperator::from_raw(eig.reconstruct_with(|l| (-I * l * t).exp()))
}

/// First-order coupler kick `I + s·i g σx⊗σx`, `g = Jτ₁/2`.
///
/// As derived `s = +1`; the printed matrix carries `s = −1`. Rejects
/// `|J·τ₁| > 0.2`.
pub fn coupler_kick_first_order(j: f64, tau1: f64, convention: FormulaConvention) -> Result<CMatrix> {
    finite("j", j)?;
    non_negative("tau1", tau1)?;
    let area = (j * tau1).abs();
    if area > FIRST_ORDER_KICK_LIMIT {
        return Err(invalid(
            "tau1",
            format!("first-order kick needs |J*tau1| <= {FIRST_ORDER_KICK_LIMIT}, got {area}"),
        ));
    }
    if area > FIRST_ORDER_KICK_WARN {
        log::warn!("first-order coupler kick with J*tau1 = {area:.3}; error is O((J*tau1)^2)");
    }
    let g = 0.5 * j * tau1;
    let s = match convention {
        FormulaConvention::AsDerived => 1.0,
        FormulaConvention::AsPrinted => -1.0,
    };
    let off = I * (s * g);
    let mut m = CMatrix::identity(4);
    for (r, c) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
        m[(r, c)] = off;
    }
    Ok(m)
}

/// Exact coupler kick: the coupler-only Hamiltonian held for `tau1`.
pub fn coupler_kick_exact(delta: f64, j: f64, tau1: f64) -> Result<UnitaryOperator> {
    non_negative("tau1", tau1)?;
    let eig = coupler_only_eigensystem(delta, j)?;
    Ok(evolve_eigensystem(&eig, tau1))
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Eigenpairs of the drive stage (both qubits driven, coupler off, equal Δ).
///
/// With `E_i = √(A_i²+Δ²)`, `s₋ = sign(E₁−E₂)` and `s₊ = sign(E₁+E₂)`:
///
/// ```text
/// +|E₁−E₂|/2 : ((Δ²−E₁E₂−Δ|E₁−E₂|)/(A₁A₂), (Δ−E₁s₋)/A₁, (Δ+E₂s₋)/A₂, 1)
/// −|E₁−E₂|/2 : ((Δ²−E₁E₂+Δ|E₁−E₂|)/(A₁A₂), (Δ+E₁s₋)/A₁, (Δ−E₂s₋)/A₂, 1)
/// +|E₁+E₂|/2 : ((Δ²+E₁E₂−Δ|E₁+E₂|)/(A₁A₂), (Δ−E₁s₊)/A₁, (Δ−E₂s₊)/A₂, 1)
/// −|E₁+E₂|/2 : ((Δ²+E₁E₂+Δ|E₁+E₂|)/(A₁A₂), (Δ+E₁s₊)/A₁, (Δ+E₂s₊)/A₂, 1)
/// ```
///
/// Degenerate drives (`A_i = 0` or `E₁ = E₂`) use the dense solver.
pub fn drive_stage_eigensystem(delta: f64, a1: f64, a2: f64) -> Result<EigenDecomposition> {
    finite("delta", delta)?;
    finite("a1", a1)?;
    finite("a2", a2)?;
    let e1 = unipolar_frequency(delta, a1);
    let e2 = unipolar_frequency(delta, a2);
    let scale = e1.max(e2);
    if a1 == 0.0 || a2 == 0.0 || (e1 - e2).abs() <= 1e-9 * scale {
        return Ok(eigh(&two_qubit_matrix(delta, delta, a1, a2, 0.0)));
    }
    let d = delta;
    let sm = sign(e1 - e2);
    let sp = sign(e1 + e2);
    let dm = (e1 - e2).abs();
    let dp = (e1 + e2).abs();
    let c = |x: f64| C64::new(x, 0.0);
    let v = |x: f64, y: f64, z: f64| vec![c(x / (a1 * a2)), c(y / a1), c(z / a2), ONE];
    let pairs = vec![
        (0.5 * dm, v(d * d - e1 * e2 - d * dm, d - e1 * sm, d + e2 * sm)),
        (-0.5 * dm, v(d * d - e1 * e2 + d * dm, d + e1 * sm, d - e2 * sm)),
        (0.5 * dp, v(d * d + e1 * e2 - d * dp, d - e1 * sp, d - e2 * sp)),
        (-0.5 * dp, v(d * d + e1 * e2 + d * dp, d + e1 * sp, d + e2 * sp)),
    ];
    Ok(EigenDecomposition::from_pairs(pairs, 1e-12 * scale))
}

/// Drive-stage propagator for `tau2`.
pub fn drive_stage_unitary(delta: f64, a1: f64, a2: f64, tau2: f64) -> Result<UnitaryOperator> {
    non_negative("tau2", tau2)?;
    let eig = drive_stage_eigensystem(delta, a1, a2)?;
    Ok(evolve_eigensystem(&eig, tau2))
}

/// `|⟨↑↑| U₁ U₂ U₁ |↓↓⟩|²`, the kick / drive / kick transfer probability.
///
/// With `KickModel::FirstOrder` the kicks are not unitary, so the result is
/// clamped to `[0, 1]`.
pub fn three_stage_probability(spec: &ThreeStageSpec, delta: f64, kick: KickModel) -> Result<f64> {
    finite("delta", delta)?;
    let u2 = drive_stage_unitary(delta, spec.a1, spec.a2, spec.tau2)?;
    let u1 = match kick {
        KickModel::Exact => coupler_kick_exact(delta, spec.j, spec.tau1)?.into_matrix(),
        KickModel::FirstOrder => coupler_kick_first_order(spec.j, spec.tau1, FormulaConvention::AsDerived)?,
    };
    let total = &(&u1 * u2.matrix()) * &u1;
    let amp = total[(RegisterLevel::UpUp.index(), RegisterLevel::DownDown.index())];
    Ok(amp.norm_sqr().clamp(0.0, 1.0))
}

/// Full kick / drive / kick propagator with exact kicks.
pub fn three_stage_unitary(spec: &ThreeStageSpec, delta: f64) -> Result<UnitaryOperator> {
    let u1 = coupler_kick_exact(delta, spec.j, spec.tau1)?;
    let u2 = drive_stage_unitary(delta, spec.a1, spec.a2, spec.tau2)?;
    Ok(u1.followed_by(&u2).followed_by(&u1))
}

/// The published closed-form scalar, evaluated literally:
/// `(D₁c₁²c₂² + D₂s₁²s₂² − D₃ sin E₁τ₂ sin E₂τ₂)² / (4E₁²E₂²)` with
/// `c_i = cos(E_iτ₂/2)`, `s_i = sin(E_iτ₂/2)`.
///
/// Diagnostic only. It is not bounded to [0, 1].
pub fn three_stage_probability_printed(spec: &ThreeStageSpec, delta: f64) -> Result<f64> {
    finite("delta", delta)?;
    let e1 = unipolar_frequency(delta, spec.a1);
    let e2 = unipolar_frequency(delta, spec.a2);
    if e1 == 0.0 || e2 == 0.0 {
        return Err(invalid("delta", "printed form divides by E1*E2, which is zero"));
    }
    let jt2 = spec.kick_area().powi(2);
    let d2 = delta * delta;
    let d1c = 4.0 * e1 * e1 * e2 * e2 * jt2;
    let d2c = 4.0 * jt2 * d2 * d2 + (-2.0 + jt2) * spec.a1 * spec.a1 * spec.a2 * spec.a2;
    let d3c = 2.0 * e1 * e2 * jt2 * d2;
    let (h1, h2) = (0.5 * e1 * spec.tau2, 0.5 * e2 * spec.tau2);
    let inner = d1c * (h1.cos() * h2.cos()).powi(2) + d2c * (h1.sin() * h2.sin()).powi(2)
        - d3c * (e1 * spec.tau2).sin() * (e2 * spec.tau2).sin();
    Ok(inner * inner / (4.0 * e1 * e1 * e2 * e2))
}

/// Small-Δ form:
/// `J²τ₁² c₁²c₂² + ¼(J²τ₁² − 2)² s₁²s₂²`, `c_i = cos(E_iτ₂/2)`, `s_i = sin(E_iτ₂/2)`.
pub fn three_stage_probability_asymptotic(spec: &ThreeStageSpec, delta: f64) -> Result<f64> {
    finite("delta", delta)?;
    let min_a = spec.a1.abs().min(spec.a2.abs());
    if delta.abs() > 0.1 * min_a {
        log::warn!("small-delta form used with delta = {delta} against min drive {min_a}");
    }
    let e1 = unipolar_frequency(delta, spec.a1);
    let e2 = unipolar_frequency(delta, spec.a2);
    let jt2 = spec.kick_area().powi(2);
    let (h1, h2) = (0.5 * e1 * spec.tau2, 0.5 * e2 * spec.tau2);
    Ok(jt2 * (h1.cos() * h2.cos()).powi(2) + 0.25 * (jt2 - 2.0).powi(2) * (h1.sin() * h2.sin()).powi(2))
}

/// Composition, printed scalar and their difference for one spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeStageReport {
    pub composition: f64,
    pub printed: f64,
    pub asymptotic: f64,
    pub printed_deviation: f64,
}

pub fn three_stage_report(spec: &ThreeStageSpec, delta: f64) -> Result<ThreeStageReport> {
    let composition = three_stage_probability(spec, delta, KickModel::Exact)?;
    let printed = three_stage_probability_printed(spec, delta)?;
    let asymptotic = three_stage_probability_asymptotic(spec, delta)?;
    Ok(ThreeStageReport {
        composition,
        printed,
        asymptotic,
        printed_deviation: (printed - composition).abs(),
    })
}

/// Single-qubit pulse propagators of the drive stage, qubit 1 first.
pub fn drive_stage_factors(delta: f64, a1: f64, a2: f64, tau2: f64) -> Result<(UnitaryOperator, UnitaryOperator)> {
    let u1 = crate::analytic::unipolar_unitary(&RectPulse::new(a1, tau2)?, delta)?;
    let u2 = crate::analytic::unipolar_unitary(&RectPulse::new(a2, tau2)?, delta)?;
    Ok((u1, u2))
}

/// Dense eigensystem of an arbitrary register Hamiltonian.
pub fn register_eigensystem(p: &RegisterParams) -> Result<EigenDecomposition> {
    eigendecompose_matrix(p.hamiltonian().matrix())
}
