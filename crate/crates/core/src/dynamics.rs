//! Numerical propagation over piecewise-constant control schedules.
//!
//! The exact path exponentiates each segment Hamiltonian through its
//! eigendecomposition. An explicit RK4 stepper exists as an independent check,
//! and a Liouvillian exponential handles the single-qubit master equation.

use crate::analytic::SequenceStep;
use crate::error::{finite, invalid, non_negative, Error, Result};
use crate::linalg::{eigh, expm, CMatrix, EigenDecomposition, I, ONE, ZERO};
use crate::quantum::{
    single_qubit_matrix, two_qubit_matrix, DensityMatrix, StateVector, UnitaryOperator,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Which Hilbert space a schedule acts on, with the static splittings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum System {
    Qubit { delta: f64 },
    Register { delta1: f64, delta2: f64 },
}

impl System {
    pub fn dim(&self) -> usize {
        match self {
            System::Qubit { .. } => 2,
            System::Register { .. } => 4,
        }
    }
}

/// One piece of constant control. `e2` and `j` are register-only; absent
/// means zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    #[serde(default)]
    pub e1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
}

impl Segment {
    pub fn qubit(duration: f64, e1: f64) -> Self {
        Self { duration, e1, e2: None, j: None }
    }

    pub fn register(duration: f64, e1: f64, e2: f64, j: f64) -> Self {
        Self { duration, e1, e2: Some(e2), j: Some(j) }
    }

    fn negated(&self) -> Self {
        Self {
            duration: self.duration,
            e1: -self.e1,
            e2: self.e2.map(|v| -v),
            j: self.j.map(|v| -v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub system: System,
    #[serde(default)]
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn qubit(delta: f64) -> Self {
        Self { system: System::Qubit { delta }, segments: Vec::new() }
    }

    pub fn register(delta1: f64, delta2: f64) -> Self {
        Self { system: System::Register { delta1, delta2 }, segments: Vec::new() }
    }

    pub fn push(mut self, seg: Segment) -> Self {
        self.segments.push(seg);
        self
    }

    /// Single-qubit pulse of amplitude `a`. Zero durations are skipped.
    pub fn pulse(self, a: f64, duration: f64) -> Self {
        if duration == 0.0 {
            return self;
        }
        self.push(Segment::qubit(duration, a))
    }

    /// Idle segment on either system. Zero durations are skipped.
    pub fn wait(self, duration: f64) -> Self {
        if duration == 0.0 {
            return self;
        }
        let seg = match self.system {
            System::Qubit { .. } => Segment::qubit(duration, 0.0),
            System::Register { .. } => Segment::register(duration, 0.0, 0.0, 0.0),
        };
        self.push(seg)
    }

    /// Schedule equivalent to a unipolar pulse sequence.
    pub fn from_sequence(delta: f64, steps: &[SequenceStep]) -> Self {
        steps.iter().fold(Self::qubit(delta), |s, step| match step {
            SequenceStep::Pulse(p) => s.pulse(p.amplitude, p.duration),
            SequenceStep::Gap(t) => s.wait(*t),
        })
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment start times followed by the end time.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = vec![0.0];
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.system {
            System::Qubit { delta } => {
                finite("delta", delta)?;
            }
            System::Register { delta1, delta2 } => {
                finite("delta1", delta1)?;
                finite("delta2", delta2)?;
            }
        }
        for (k, s) in self.segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k}: duration must be finite and > 0, got {}",
                    s.duration
                )));
            }
            let vals = [Some(s.e1), s.e2, s.j];
            if vals.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSchedule(format!("segment {k}: non-finite control")));
            }
            if matches!(self.system, System::Qubit { .. }) && (s.e2.is_some() || s.j.is_some()) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k}: e2/j given for a single-qubit schedule"
                )));
            }
        }
        Ok(())
    }

    /// Hamiltonian of segment `k`.
    pub fn segment_hamiltonian(&self, k: usize) -> CMatrix {
        self.hamiltonian_for(&self.segments[k])
    }

    fn hamiltonian_for(&self, s: &Segment) -> CMatrix {
        match self.system {
            System::Qubit { delta } => single_qubit_matrix(delta, s.e1),
            System::Register { delta1, delta2 } => two_qubit_matrix(
                delta1,
                delta2,
                s.e1,
                s.e2.unwrap_or(0.0),
                s.j.unwrap_or(0.0),
            ),
        }
    }

    /// Largest spectral norm over the segments (the idle Hamiltonian if empty).
    pub fn max_hamiltonian_norm(&self) -> f64 {
        let idle = match self.system {
            System::Qubit { .. } => Segment::qubit(1.0, 0.0),
            System::Register { .. } => Segment::register(1.0, 0.0, 0.0, 0.0),
        };
        std::iter::once(&idle)
            .chain(self.segments.iter())
            .map(|s| spectral_norm(&self.hamiltonian_for(s)))
            .fold(0.0, f64::max)
    }

    /// Segments in reverse order with every Hamiltonian negated. Its
    /// propagator is the inverse of this schedule's.
    pub fn time_reversed(&self) -> Self {
        let system = match self.system {
            System::Qubit { delta } => System::Qubit { delta: -delta },
            System::Register { delta1, delta2 } => System::Register {
                delta1: -delta1,
                delta2: -delta2,
            },
        };
        Self {
            system,
            segments: self.segments.iter().rev().map(Segment::negated).collect(),
        }
    }
}

fn spectral_norm(h: &CMatrix) -> f64 {
    eigh(h).values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn propagator(eig: &EigenDecomposition, t: f64) -> CMatrix {
    eig.reconstruct_with(|l| (-I * l * t).exp())
}

/// Sampled states with their times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LindbladParams {
    pub gamma: f64,
    pub gamma_phi: f64,
}

impl LindbladParams {
    pub fn new(gamma: f64, gamma_phi: f64) -> Result<Self> {
        non_negative("gamma", gamma)?;
        non_negative("gamma_phi", gamma_phi)?;
        Ok(Self { gamma, gamma_phi })
    }
}

/// Time-ordered product of exact segment exponentials.
pub fn evolve_unitary(schedule: &Schedule) -> Result<UnitaryOperator> {
    schedule.validate()?;
    let mut u = CMatrix::identity(schedule.dim());
    for s in &schedule.segments {
        let eig = eigh(&schedule.hamiltonian_for(s));
        u = &propagator(&eig, s.duration) * &u;
    }
    Ok(UnitaryOperator::from_raw(u))
}

/// Sample times: a uniform grid plus every segment boundary, deduplicated.
fn sample_grid(boundaries: &[f64], sample_dt: f64) -> Vec<f64> {
    let total = *boundaries.last().unwrap();
    let n = (total / sample_dt).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * sample_dt).filter(|&t| t <= total).collect();
    ts.extend_from_slice(boundaries);
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = 1e-12 * total.max(1.0);
    ts.dedup_by(|a, b| (*a - *b).abs() <= tol);
    ts
}

fn check_state(schedule: &Schedule, psi0: &StateVector) -> Result<()> {
    if psi0.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch { expected: schedule.dim(), got: psi0.dim() });
    }
    Ok(())
}

/// Exact state trajectory, sampled on a uniform grid and at every segment
/// boundary.
pub fn evolve_state(
    schedule: &Schedule,
    psi0: &StateVector,
    sample_dt: f64,
) -> Result<Trajectory<StateVector>> {
    schedule.validate()?;
    check_state(schedule, psi0)?;
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return Err(invalid("sample_dt", "must be finite and > 0"));
    }
    let bounds = schedule.boundaries();
    let grid = sample_grid(&bounds, sample_dt);
    let mut psi = psi0.amplitudes().to_vec();
    let mut traj = Trajectory { times: vec![0.0], states: vec![psi0.clone()] };
    let mut gi = 1;
    for (k, seg) in schedule.segments.iter().enumerate() {
        let (t0, t1) = (bounds[k], bounds[k + 1]);
        let eig = eigh(&schedule.hamiltonian_for(seg));
        let tol = 1e-12 * t1.max(1.0);
        while gi < grid.len() && grid[gi] < t1 - tol {
            traj.times.push(grid[gi]);
            traj.states.push(StateVector::from_raw(propagator(&eig, grid[gi] - t0).matvec(&psi)));
            gi += 1;
        }
        psi = propagator(&eig, seg.duration).matvec(&psi);
        traj.times.push(t1);
        traj.states.push(StateVector::from_raw(psi.clone()));
        gi += 1;
    }
    Ok(traj)
}

fn rk4_step(h: &CMatrix, psi: &[C64], dt: f64) -> Vec<C64> {
    let f = |v: &[C64]| -> Vec<C64> { h.matvec(v).into_iter().map(|x| -I * x).collect() };
    let axpy = |a: &[C64], b: &[C64], s: f64| -> Vec<C64> {
        a.iter().zip(b).map(|(x, y)| x + y * s).collect()
    };
    let k1 = f(psi);
    let k2 = f(&axpy(psi, &k1, 0.5 * dt));
    let k3 = f(&axpy(psi, &k2, 0.5 * dt));
    let k4 = f(&axpy(psi, &k3, dt));
    (0..psi.len())
        .map(|i| psi[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
        .collect()
}

/// Classic RK4 with no renormalization. Each segment is split into equal
/// steps no longer than `dt`; states are recorded after every step.
pub fn evolve_state_stepper(
    schedule: &Schedule,
    psi0: &StateVector,
    dt: f64,
) -> Result<Trajectory<StateVector>> {
    schedule.validate()?;
    check_state(schedule, psi0)?;
    let norm = schedule.max_hamiltonian_norm();
    let limit = if norm > 0.0 { 0.01 / norm } else { f64::INFINITY };
    if !(dt.is_finite() && dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let mut psi = psi0.amplitudes().to_vec();
    let mut t = 0.0;
    let mut traj = Trajectory { times: vec![0.0], states: vec![StateVector::from_raw(psi.clone())] };
    for seg in &schedule.segments {
        let h = schedule.hamiltonian_for(seg);
        let n = (seg.duration / dt).ceil().max(1.0) as usize;
        let step = seg.duration / n as f64;
        for _ in 0..n {
            psi = rk4_step(&h, &psi, step);
            t += step;
            traj.times.push(t);
            traj.states.push(StateVector::from_raw(psi.clone()));
        }
    }
    Ok(traj)
}

/// Minimum samples per carrier period for the cosine drive.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 40.0;

/// Lab-frame evolution under `ε(t) = A cos(ωt)` for `0 ≤ t ≤ tau`, no RWA.
pub fn evolve_driven_cosine(
    amplitude: f64,
    omega: f64,
    delta: f64,
    tau: f64,
    psi0: &StateVector,
    dt: f64,
) -> Result<Trajectory<StateVector>> {
    finite("amplitude", amplitude)?;
    non_negative("omega", omega)?;
    finite("delta", delta)?;
    non_negative("tau", tau)?;
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi0.dim() });
    }
    let mut limit = f64::INFINITY;
    if omega > 0.0 {
        limit = std::f64::consts::TAU / (omega * MIN_SAMPLES_PER_PERIOD);
    }
    let scale = 0.5 * (delta.abs() + amplitude.abs());
    if scale > 0.0 {
        limit = limit.min(0.2 / scale);
    }
    if !(dt.is_finite() && dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let h_at = |t: f64| single_qubit_matrix(delta, amplitude * (omega * t).cos());
    let n = (tau / dt).ceil() as usize;
    let step = if n > 0 { tau / n as f64 } else { 0.0 };
    let mut psi = psi0.amplitudes().to_vec();
    let mut traj = Trajectory { times: vec![0.0], states: vec![psi0.clone()] };
    let f = |t: f64, v: &[C64]| -> Vec<C64> { h_at(t).matvec(v).into_iter().map(|x| -I * x).collect() };
    let axpy = |a: &[C64], b: &[C64], s: f64| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    for k in 0..n {
        let t = k as f64 * step;
        let k1 = f(t, &psi);
        let k2 = f(t + 0.5 * step, &axpy(&psi, &k1, 0.5 * step));
        let k3 = f(t + 0.5 * step, &axpy(&psi, &k2, 0.5 * step));
        let k4 = f(t + step, &axpy(&psi, &k3, step));
        psi = (0..2)
            .map(|i| psi[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (step / 6.0))
            .collect();
        traj.times.push((k + 1) as f64 * step);
        traj.states.push(StateVector::from_raw(psi.clone()));
    }
    Ok(traj)
}

fn sigma_plus() -> CMatrix {
    // |1⟩⟨0|
    CMatrix::from_rows(&[[ZERO, ZERO], [ONE, ZERO]])
}

fn sigma_minus() -> CMatrix {
    CMatrix::from_rows(&[[ZERO, ONE], [ZERO, ZERO]])
}

fn lindblad_rhs(h: &CMatrix, lp: &LindbladParams, rho: &CMatrix) -> CMatrix {
    let sp = sigma_plus();
    let sm = sigma_minus();
    let sz = crate::linalg::pauli_z();
    let comm = &(rho * h) - &(h * rho);
    let n = &sp * &sm;
    let jump = &(&(&sm * rho) * &sp) - &(&(&n * rho) + &(rho * &n)).scale_re(0.5);
    let deph = &(&(&sz * rho) * &sz) - rho;
    &(&comm.scale(I) + &jump.scale_re(lp.gamma)) + &deph.scale_re(lp.gamma_phi)
}

/// Matrix of the master-equation generator acting on row-major `vec(ρ)`.
pub fn liouvillian(h: &CMatrix, lp: &LindbladParams) -> CMatrix {
    let n = h.dim();
    let mut l = CMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = CMatrix::zeros(n);
            e[(i, j)] = ONE;
            let out = lindblad_rhs(h, lp, &e);
            for a in 0..n {
                for b in 0..n {
                    l[(a * n + b, i * n + j)] = out[(a, b)];
                }
            }
        }
    }
    l
}

fn unvec(v: &[C64], n: usize) -> CMatrix {
    let rows: Vec<Vec<C64>> = (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
    CMatrix::from_rows(&rows)
}

/// Single-qubit master equation with the dissipators on at all times,
/// pulses included. Sampled like [`evolve_state`].
pub fn evolve_lindblad(
    schedule: &Schedule,
    rho0: &DensityMatrix,
    lp: &LindbladParams,
    sample_dt: f64,
) -> Result<Trajectory<DensityMatrix>> {
    schedule.validate()?;
    LindbladParams::new(lp.gamma, lp.gamma_phi)?;
    if schedule.dim() != 2 || rho0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho0.dim().max(schedule.dim()) });
    }
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return Err(invalid("sample_dt", "must be finite and > 0"));
    }
    let bounds = schedule.boundaries();
    let grid = sample_grid(&bounds, sample_dt);
    let mut v: Vec<C64> = rho0.matrix().as_slice().to_vec();
    let mut traj = Trajectory { times: vec![0.0], states: vec![rho0.clone()] };
    let mut gi = 1;
    for (k, seg) in schedule.segments.iter().enumerate() {
        let (t0, t1) = (bounds[k], bounds[k + 1]);
        let l = liouvillian(&schedule.hamiltonian_for(seg), lp);
        let start = v.clone();
        let tol = 1e-12 * t1.max(1.0);
        while gi < grid.len() && grid[gi] < t1 - tol {
            let out = expm(&l.scale_re(grid[gi] - t0)).matvec(&start);
            traj.times.push(grid[gi]);
            traj.states.push(DensityMatrix::new(unvec(&out, 2))?);
            gi += 1;
        }
        v = expm(&l.scale_re(seg.duration)).matvec(&start);
        traj.times.push(t1);
        traj.states.push(DensityMatrix::new(unvec(&v, 2))?);
        gi += 1;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{pair_sequence, ramsey_probability_unipolar, unipolar_unitary, PulsePair, RectPulse};
    use crate::linalg::inner;
    use crate::register::{coupler_flip_probability, FormulaConvention};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_schedule(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Schedule {
        let mut s = if dim == 2 {
            Schedule::qubit(rng.random_range(0.1..2.0))
        } else {
            Schedule::register(rng.random_range(0.1..2.0), rng.random_range(0.1..2.0))
        };
        for _ in 0..n {
            let d = rng.random_range(0.05..1.0);
            let seg = if dim == 2 {
                Segment::qubit(d, rng.random_range(-5.0..5.0))
            } else {
                Segment::register(
                    d,
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-2.0..2.0),
                )
            };
            s = s.push(seg);
        }
        s
    }

    #[test]
    fn empty_schedule_is_identity() {
        let u = evolve_unitary(&Schedule::qubit(1.0)).unwrap();
        assert_eq!(u.matrix(), &CMatrix::identity(2));
    }

    #[test]
    fn single_segment_matches_analytic() {
        let u = evolve_unitary(&Schedule::qubit(0.7).pulse(12.0, 0.3)).unwrap();
        let a = unipolar_unitary(&RectPulse::new(12.0, 0.3).unwrap(), 0.7).unwrap();
        assert!(u.matrix().max_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn pulse_pair_matches_closed_form() {
        let pair = PulsePair::symmetric(20.0, 0.08, 0.9).unwrap();
        let u = evolve_unitary(&Schedule::from_sequence(1.3, &pair_sequence(&pair))).unwrap();
        let w = ramsey_probability_unipolar(&pair, 1.3).unwrap();
        assert!((u.transition_probability(0, 1) - w).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_segments() {
        assert!(evolve_unitary(&Schedule::qubit(1.0).push(Segment::qubit(0.0, 1.0))).is_err());
        assert!(evolve_unitary(&Schedule::qubit(1.0).push(Segment::register(1.0, 0.0, 1.0, 0.0))).is_err());
        assert!(evolve_unitary(&Schedule::qubit(f64::NAN)).is_err());
    }

    #[test]
    fn free_state_keeps_populations() {
        let s = Schedule::qubit(2.0).wait(3.0);
        let tr = evolve_state(&s, &StateVector::ground(), 0.1).unwrap();
        for (t, psi) in tr.iter() {
            assert!((psi.population(0) - 1.0).abs() < 1e-14);
            // ground picks up e^{+iΔt/2}
            let ph = psi.amplitudes()[0].arg();
            let want = (t).rem_euclid(2.0 * PI);
            let want = if want > PI { want - 2.0 * PI } else { want };
            assert!((ph - want).abs() < 1e-10, "t={t}: {ph} vs {want}");
        }
    }

    #[test]
    fn state_samples_hit_boundaries() {
        let s = Schedule::qubit(1.0).pulse(5.0, 0.123).wait(0.31).pulse(5.0, 0.077);
        let tr = evolve_state(&s, &StateVector::ground(), 0.1).unwrap();
        for b in s.boundaries() {
            assert!(tr.times.iter().any(|&t| (t - b).abs() < 1e-12), "missing {b}");
        }
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        let u = evolve_unitary(&s).unwrap();
        let end = u.apply(&StateVector::ground()).unwrap();
        assert!((inner(end.amplitudes(), tr.last().unwrap().amplitudes()).norm() - 1.0).abs() < 1e-12);
        for psi in &tr.states {
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn area_pi_pulse_flips() {
        let delta = 1.0;
        let a = 1000.0;
        let s = Schedule::qubit(delta).pulse(a, PI / a);
        let tr = evolve_state(&s, &StateVector::ground(), 1e-4).unwrap();
        assert!(tr.last().unwrap().population(1) >= 0.9999);
    }

    #[test]
    fn register_coupler_oscillation() {
        let (delta, j) = (0.4, 2.0);
        let s = Schedule::register(delta, delta).push(Segment::register(6.0, 0.0, 0.0, j));
        let tr = evolve_state(&s, &StateVector::basis(4, 0).unwrap(), 0.05).unwrap();
        for (t, psi) in tr.iter() {
            let w = coupler_flip_probability(delta, j, t, FormulaConvention::AsDerived).unwrap();
            assert!((psi.population(3) - w).abs() < 1e-11);
        }
    }

    #[test]
    fn stepper_agrees_and_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [2, 4] {
            let s = random_schedule(&mut rng, dim, 4);
            let psi0 = StateVector::basis(dim, 0).unwrap();
            let exact = evolve_unitary(&s).unwrap().apply(&psi0).unwrap();
            let norm = s.max_hamiltonian_norm();
            let err = |dt: f64| {
                let tr = evolve_state_stepper(&s, &psi0, dt).unwrap();
                tr.last()
                    .unwrap()
                    .amplitudes()
                    .iter()
                    .zip(exact.amplitudes())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
            };
            let e1 = err(0.01 / norm);
            let e2 = err(0.005 / norm);
            let ratio = e1 / e2;
            assert!((14.0..=18.0).contains(&ratio), "dim {dim}: ratio {ratio} ({e1:e}, {e2:e})");
            assert!(err(1e-3 / norm) < 1e-8);
        }
    }

    #[test]
    fn stepper_rejects_large_steps_and_idles_exactly() {
        let s = Schedule::qubit(1.0).pulse(10.0, 1.0);
        assert!(matches!(
            evolve_state_stepper(&s, &StateVector::ground(), 0.1),
            Err(Error::StepTooLarge { .. })
        ));
        let z = Schedule::qubit(0.0).wait(2.0);
        let psi0 = StateVector::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let tr = evolve_state_stepper(&z, &psi0, 0.1).unwrap();
        assert_eq!(tr.last().unwrap().amplitudes(), psi0.amplitudes());
    }

    #[test]
    fn time_reversal_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in [2, 4] {
            for _ in 0..20 {
                let s = random_schedule(&mut rng, dim, 5);
                let u = evolve_unitary(&s).unwrap();
                let r = evolve_unitary(&s.time_reversed()).unwrap();
                let p = r.then_after(&u);
                assert!(p.matrix().max_diff(&CMatrix::identity(dim)) < 1e-9);
            }
        }
    }

    #[test]
    fn zero_amplitude_cosine_is_free() {
        let tr = evolve_driven_cosine(0.0, 1.0, 1.0, 5.0, &StateVector::ground(), 0.01).unwrap();
        assert!((tr.last().unwrap().population(0) - 1.0).abs() < 1e-12);
        assert!(evolve_driven_cosine(0.1, 10.0, 1.0, 5.0, &StateVector::ground(), 0.1).is_err());
    }

    #[test]
    fn dephasing_and_relaxation_closed_forms() {
        let plus = StateVector::normalized(vec![ONE, ONE]).unwrap().projector();
        let gp = 0.5;
        let s = Schedule::qubit(0.0).wait(3.0 / (2.0 * gp));
        let tr = evolve_lindblad(&s, &plus, &LindbladParams::new(0.0, gp).unwrap(), 0.05).unwrap();
        for (t, rho) in tr.iter() {
            let want = 0.5 * (-2.0 * gp * t).exp();
            assert!((rho.coherence(0, 1).norm() - want).abs() <= 0.01 * want);
        }
        let g = 0.8;
        let s = Schedule::qubit(0.0).wait(3.0 / g);
        let ex = StateVector::excited().projector();
        let tr = evolve_lindblad(&s, &ex, &LindbladParams::new(g, 0.0).unwrap(), 0.05).unwrap();
        for (t, rho) in tr.iter() {
            let want = (-g * t).exp();
            assert!((rho.population(1) - want).abs() <= 0.01 * want);
            assert!((rho.trace() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn closed_lindblad_matches_pure_state() {
        let s = Schedule::qubit(1.1).pulse(8.0, 0.2).wait(0.7).pulse(8.0, 0.2);
        let rho0 = StateVector::ground().projector();
        let tr = evolve_lindblad(&s, &rho0, &LindbladParams::default(), 0.05).unwrap();
        let pure = evolve_state(&s, &StateVector::ground(), 0.05).unwrap();
        assert_eq!(tr.times.len(), pure.times.len());
        for (rho, psi) in tr.states.iter().zip(&pure.states) {
            assert!(rho.matrix().max_diff(psi.projector().matrix()) < 1e-9);
        }
        assert!(LindbladParams::new(-1.0, 0.0).is_err());
    }
}
