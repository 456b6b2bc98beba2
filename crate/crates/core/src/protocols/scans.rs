//! Delay scans and Bloch trajectories.

use crate::analytic::{ramsey_probability_unipolar, PulsePair};
use crate::dynamics::{evolve_lindblad, evolve_state, evolve_unitary, LindbladParams, Schedule};
use crate::error::{invalid, Result};
use crate::quantum::{bloch_vector, StateVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamseyPoint {
    pub tau_r: f64,
    pub numeric: f64,
    /// Closed-system closed form, when it applies.
    pub analytic: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn pair_schedule(a: f64, delta: f64, tau: f64, tau_r: f64) -> Schedule {
    Schedule::qubit(delta).pulse(a, tau).wait(tau_r).pulse(a, tau)
}

fn check_delays(tau_r: &[f64]) -> Result<()> {
    if tau_r.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(invalid("tau_r", "delays must be finite and >= 0"));
    }
    Ok(())
}

/// Excited population after pulse, delay, pulse, from the exact propagator,
/// with the closed form alongside.
pub fn ramsey_delay_scan(a: f64, delta: f64, tau: f64, tau_r: &[f64]) -> Result<Vec<RamseyPoint>> {
    check_delays(tau_r)?;
    tau_r
        .par_iter()
        .map(|&tr| {
            let u = evolve_unitary(&pair_schedule(a, delta, tau, tr))?;
            let analytic = ramsey_probability_unipolar(&PulsePair::symmetric(a, tau, tr)?, delta)?;
            Ok(RamseyPoint { tau_r: tr, numeric: u.transition_probability(0, 1), analytic: Some(analytic) })
        })
        .collect()
}

/// Same scan under the master equation, starting from |0⟩.
pub fn lindblad_ramsey_scan(
    a: f64,
    delta: f64,
    tau: f64,
    tau_r: &[f64],
    lp: &LindbladParams,
) -> Result<Vec<RamseyPoint>> {
    check_delays(tau_r)?;
    let lp = LindbladParams::new(lp.gamma, lp.gamma_phi)?;
    let closed = lp.gamma == 0.0 && lp.gamma_phi == 0.0;
    let rho0 = StateVector::ground().projector();
    tau_r
        .par_iter()
        .map(|&tr| {
            let s = pair_schedule(a, delta, tau, tr);
            let total = s.total_duration().max(1.0);
            let traj = evolve_lindblad(&s, &rho0, &lp, 2.0 * total)?;
            let numeric = traj.last().map(|r| r.population(1)).unwrap_or(0.0);
            let analytic = if closed {
                Some(ramsey_probability_unipolar(&PulsePair::symmetric(a, tau, tr)?, delta)?)
            } else {
                None
            };
            Ok(RamseyPoint { tau_r: tr, numeric, analytic })
        })
        .collect()
}

/// Bloch vector along an exact single-qubit trajectory.
pub fn bloch_trajectory(schedule: &Schedule, psi0: &StateVector, sample_dt: f64) -> Result<Vec<BlochPoint>> {
    let traj = evolve_state(schedule, psi0, sample_dt)?;
    traj.iter()
        .map(|(t, psi)| {
            let [x, y, z] = bloch_vector(psi)?;
            Ok(BlochPoint { t, x, y, z })
        })
        .collect()
}

/// `(max − min)/(max + min)`; zero for an empty or all-zero scan.
pub fn fringe_contrast(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() || max + min <= 0.0 {
        return 0.0;
    }
    (max - min) / (max + min)
}

/// Interior local maxima, refined by a parabola through the three nearest
/// samples. Assumes a uniform grid.
pub fn fringe_peaks(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut peaks = Vec::new();
    for k in 1..ys.len().saturating_sub(1) {
        if ys[k] > ys[k - 1] && ys[k] >= ys[k + 1] {
            let denom = ys[k - 1] - 2.0 * ys[k] + ys[k + 1];
            let shift = if denom != 0.0 { 0.5 * (ys[k - 1] - ys[k + 1]) / denom } else { 0.0 };
            peaks.push(xs[k] + shift * (xs[k + 1] - xs[k]));
        }
    }
    peaks
}

/// Mean spacing of consecutive fringe maxima.
pub fn fringe_period(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let p = fringe_peaks(xs, ys);
    if p.len() < 2 {
        return None;
    }
    Some((p[p.len() - 1] - p[0]) / (p.len() - 1) as f64)
}
