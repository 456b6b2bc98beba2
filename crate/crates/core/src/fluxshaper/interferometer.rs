//! Twin single-junction interferometers feeding a shared output inductor.
//!
//! Both loops see the same external drive `e(t) = input_coupling · Φ(t)`.
//! Loop k holds junction k (critical current 1 for k = 0, `ic1` for the
//! MJJ) in series with inductance `l`, and the two loops share `l_out`
//! with opposite orientation, so the output current is the difference of
//! the branch currents:
//!
//! ```text
//! i_out = (φ₁ − φ₀) / (l + 2 l_out)
//! i₀ = (e − φ₀ − l_out i_out) / l,   i₁ = (e − φ₁ + l_out i_out) / l
//! α_j φ̇_k + ic_k sin φ_k = i_k
//! ```
//!
//! Swapping the junctions flips the sign of `i_out`; with `ic1 = 1` both
//! phases stay identical and the output is exactly zero.

use super::waveform::{config_hash, Waveform};
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterferometerConfig {
    /// MJJ critical current relative to the conventional junction.
    pub ic1: f64,
    pub alpha_j: f64,
    /// Loop inductance.
    pub l: f64,
    /// Shared output inductance.
    pub l_out: f64,
    /// Fraction of the coupling-loop flux threading each interferometer.
    pub input_coupling: f64,
    /// Qubit drive per unit output current, before the energy scale.
    pub coupling: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self { ic1: 0.5, alpha_j: 3.0, l: 0.1, l_out: 0.05, input_coupling: 0.25, coupling: 1.0 }
    }
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("ic1", self.ic1),
            ("alpha_j", self.alpha_j),
            ("l", self.l),
            ("l_out", self.l_out),
            ("input_coupling", self.input_coupling),
            ("coupling", self.coupling),
        ] {
            if !v.is_finite() {
                return Err(invalid(n, "must be finite"));
            }
        }
        if self.ic1 < 0.0 {
            return Err(invalid("ic1", "must be >= 0"));
        }
        if self.alpha_j <= 0.0 {
            return Err(invalid("alpha_j", "must be > 0"));
        }
        if self.l <= 0.0 {
            return Err(invalid("l", "must be > 0"));
        }
        if self.l_out < 0.0 {
            return Err(invalid("l_out", "must be >= 0"));
        }
        Ok(())
    }

    pub fn output_current(&self, phi: [f64; 2]) -> f64 {
        (phi[1] - phi[0]) / (self.l + 2.0 * self.l_out)
    }

    /// Junction phase velocities for drive `e`.
    fn rates(&self, e: f64, phi: [f64; 2]) -> [f64; 2] {
        let io = self.output_current(phi);
        let i0 = (e - phi[0] - self.l_out * io) / self.l;
        let i1 = (e - phi[1] + self.l_out * io) / self.l;
        [(i0 - phi[0].sin()) / self.alpha_j, (i1 - self.ic1 * phi[1].sin()) / self.alpha_j]
    }

    /// Jacobian of [`Self::rates`] with respect to the phases.
    fn rates_jacobian(&self, phi: [f64; 2]) -> [[f64; 2]; 2] {
        let s = self.l_out / (self.l * (self.l + 2.0 * self.l_out));
        let d = -1.0 / self.l;
        [
            [(d + s - phi[0].cos()) / self.alpha_j, -s / self.alpha_j],
            [-s / self.alpha_j, (d + s - self.ic1 * phi[1].cos()) / self.alpha_j],
        ]
    }
}

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX: usize = 50;

/// Integrates the two junction phases with the trapezoidal rule at the
/// input sample period and returns the output current.
///
/// Each step is solved by Newton iteration; failure to converge is reported
/// as [`Error::NonConvergent`].
pub fn simulate_amplitude_stage(input: &Waveform, cfg: &InterferometerConfig) -> Result<Waveform> {
    cfg.validate()?;
    let dt = input.dt;
    let drive: Vec<f64> = input.samples.iter().map(|v| cfg.input_coupling * v).collect();
    let mut phi = [0.0f64; 2];
    let mut out = Vec::with_capacity(drive.len());
    if let Some(&e0) = drive.first() {
        // start from the static solution for the first sample
        phi = static_phases(cfg, e0, phi, 0.0)?;
        out.push(cfg.output_current(phi));
    }
    for n in 1..drive.len() {
        let f_old = cfg.rates(drive[n - 1], phi);
        let mut x = phi;
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..NEWTON_MAX {
            let f = cfg.rates(drive[n], x);
            let r = [
                x[0] - phi[0] - 0.5 * dt * (f[0] + f_old[0]),
                x[1] - phi[1] - 0.5 * dt * (f[1] + f_old[1]),
            ];
            residual = r[0].abs().max(r[1].abs());
            if residual <= NEWTON_TOL * (1.0 + x[0].abs().max(x[1].abs())) {
                converged = true;
                break;
            }
            let j = cfg.rates_jacobian(x);
            let m = [[1.0 - 0.5 * dt * j[0][0], -0.5 * dt * j[0][1]], [-0.5 * dt * j[1][0], 1.0 - 0.5 * dt * j[1][1]]];
            let (d0, d1) = solve2(m, r).ok_or(Error::NonConvergent { time: n as f64 * dt, residual, iterations: 0 })?;
            x = [x[0] - d0, x[1] - d1];
        }
        if !converged || !x[0].is_finite() || !x[1].is_finite() {
            return Err(Error::NonConvergent { time: n as f64 * dt, residual, iterations: NEWTON_MAX });
        }
        phi = x;
        out.push(cfg.output_current(phi));
    }
    let hash = config_hash(&(cfg, &input.meta.config_hash));
    Waveform::new(dt, out, "amplitude", hash)
}

/// Cramer's rule keeps the two components bitwise symmetric when the
/// system is.
fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> Option<(f64, f64)> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(((r[0] * m[1][1] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - r[0] * m[1][0]) / det))
}

fn static_phases(cfg: &InterferometerConfig, e: f64, mut x: [f64; 2], t: f64) -> Result<[f64; 2]> {
    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_MAX {
        let f = cfg.rates(e, x);
        residual = f[0].abs().max(f[1].abs());
        if residual <= NEWTON_TOL {
            return Ok(x);
        }
        let j = cfg.rates_jacobian(x);
        let (d0, d1) = solve2(j, f).ok_or(Error::NonConvergent { time: t, residual, iterations: 0 })?;
        x = [x[0] - d0, x[1] - d1];
    }
    Err(Error::NonConvergent { time: t, residual, iterations: NEWTON_MAX })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn plateau() -> Waveform {
        let s: Vec<f64> = (0..4000)
            .map(|k| {
                let t = k as f64 * 0.01;
                TAU * (t / 5.0).min(1.0) * ((40.0 - t) / 5.0).clamp(0.0, 1.0)
            })
            .collect();
        Waveform::new(0.01, s, "loop-flux", String::new()).unwrap()
    }

    #[test]
    fn symmetric_point_is_null() {
        let cfg = InterferometerConfig { ic1: 1.0, ..Default::default() };
        let out = simulate_amplitude_stage(&plateau(), &cfg).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn zero_input_gives_zero() {
        let out = simulate_amplitude_stage(&Waveform::zeros(0.01, 500), &InterferometerConfig::default()).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn sign_flips_across_symmetry() {
        let lo = simulate_amplitude_stage(&plateau(), &InterferometerConfig { ic1: 0.8, ..Default::default() }).unwrap();
        let hi = simulate_amplitude_stage(&plateau(), &InterferometerConfig { ic1: 1.2, ..Default::default() }).unwrap();
        assert!(lo.peak() > 0.0 && hi.peak() < 0.0);
    }

    #[test]
    fn plateau_settles_to_static_solution() {
        let cfg = InterferometerConfig::default();
        let out = simulate_amplitude_stage(&plateau(), &cfg).unwrap();
        let phi = static_phases(&cfg, cfg.input_coupling * TAU, [1.0, 1.0], 0.0).unwrap();
        assert!((out.at(30.0) - cfg.output_current(phi)).abs() < 1e-6, "{} {} {phi:?}", out.at(30.0), cfg.output_current(phi));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let cfg = InterferometerConfig { ic1: 0.7, ..Default::default() };
        let x = [0.4, 1.1];
        let j = cfg.rates_jacobian(x);
        let h = 1e-6;
        for c in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let (fp, fm) = (cfg.rates(0.9, xp), cfg.rates(0.9, xm));
            for r in 0..2 {
                assert!((j[r][c] - (fp[r] - fm[r]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }
}
