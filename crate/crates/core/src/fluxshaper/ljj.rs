//! Damped, biased sine-Gordon chain for fluxon transport along the long
//! junction.
//!
//! Normalized units: x in Josephson lengths, t in inverse plasma frequency,
//! currents in units of the junction critical current. The integrated
//! equation is
//!
//! ```text
//! φ_tt = φ_xx − sin φ − α(x) φ_t − i_b
//! ```
//!
//! with free ends. The bias sign makes a +2π kink move towards +x.
//! `α(x)` grows quadratically inside the absorber at the far end.

use super::waveform::{config_hash, Waveform};
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LjjConfig {
    pub length: f64,
    pub alpha: f64,
    pub i_b: f64,
    pub dx: f64,
    pub dt: f64,
    /// Bias is switched on smoothly over this time (0 = step).
    pub bias_ramp: f64,
    /// Initial kink centre.
    pub x0: f64,
    /// Initial kink velocity (0 = at rest).
    pub velocity: f64,
    /// Coupling-loop endpoints `x₁ < x₂`.
    pub taps: [f64; 2],
    /// Start of the absorbing ramp.
    pub absorber_start: f64,
    /// Extra damping reached at the far end.
    pub absorber_alpha: f64,
    /// Run ends once the kink is this far past `x₂`.
    pub exit_margin: f64,
    /// Time budget before a stalled kink is reported.
    pub t_max: f64,
    /// Interval between stored field snapshots (0 = none).
    pub snapshot_every: f64,
}

impl Default for LjjConfig {
    fn default() -> Self {
        Self {
            length: 92.0,
            alpha: 0.05,
            i_b: 0.2,
            dx: 0.05,
            dt: 0.0125,
            bias_ramp: 60.0,
            x0: 8.0,
            velocity: 0.0,
            taps: [40.0, 76.0],
            absorber_start: 86.0,
            absorber_alpha: 1.0,
            exit_margin: 4.0,
            t_max: 4000.0,
            snapshot_every: 1.0,
        }
    }
}

/// Kink width is about 4; the chain must hold several.
pub const MIN_LENGTH: f64 = 16.0;

impl LjjConfig {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("length", self.length),
            ("alpha", self.alpha),
            ("i_b", self.i_b),
            ("dx", self.dx),
            ("dt", self.dt),
            ("bias_ramp", self.bias_ramp),
            ("x0", self.x0),
            ("velocity", self.velocity),
            ("absorber_alpha", self.absorber_alpha),
            ("exit_margin", self.exit_margin),
            ("t_max", self.t_max),
            ("snapshot_every", self.snapshot_every),
        ] {
            if !v.is_finite() {
                return Err(invalid(n, "must be finite"));
            }
        }
        if self.length < MIN_LENGTH {
            return Err(invalid("length", format!("must be >= {MIN_LENGTH}")));
        }
        if !(self.dx > 0.0 && self.dx <= 0.5) {
            return Err(invalid("dx", "must be in (0, 0.5]"));
        }
        if self.dt <= 0.0 {
            return Err(invalid("dt", "must be > 0"));
        }
        if self.dt > 0.5 * self.dx {
            return Err(Error::Cfl { dt: self.dt, limit: 0.5 * self.dx });
        }
        if self.bias_ramp < 0.0 {
            return Err(invalid("bias_ramp", "must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.i_b) {
            return Err(invalid("i_b", "must be in [0, 1)"));
        }
        if self.alpha < 0.0 || self.absorber_alpha < 0.0 {
            return Err(invalid("alpha", "damping must be >= 0"));
        }
        if self.velocity.abs() >= 1.0 {
            return Err(invalid("velocity", "must be below the Swihart velocity 1"));
        }
        let [x1, x2] = self.taps;
        if !(0.0 <= x1 && x1 < x2 && x2 <= self.length) {
            return Err(invalid("taps", "need 0 <= x1 < x2 <= length"));
        }
        if !(0.0..=self.length).contains(&self.x0) {
            return Err(invalid("x0", "kink must start inside the junction"));
        }
        if !(self.absorber_start > 0.0 && self.absorber_start <= self.length) {
            return Err(invalid("absorber_start", "must lie in (0, length]"));
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        (self.length / self.dx).round() as usize + 1
    }

    /// Uniform background phase solving `sin φ = −i_b`.
    pub fn background(&self) -> f64 {
        -self.i_b.asin()
    }

    /// Bias at time `t`, following a C² smoothstep ramp.
    pub fn bias_at(&self, t: f64) -> f64 {
        if t >= self.bias_ramp {
            return self.i_b;
        }
        let s = t / self.bias_ramp;
        self.i_b * s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }

    /// Rate of change of the adiabatic background `−asin(i_b(t))`.
    fn background_rate(&self, t: f64) -> f64 {
        if t >= self.bias_ramp {
            return 0.0;
        }
        let s = t / self.bias_ramp;
        let di = self.i_b * 30.0 * s * s * (1.0 - s) * (1.0 - s) / self.bias_ramp;
        -di / (1.0 - self.bias_at(t).powi(2)).sqrt()
    }
}

/// Steady kink velocity from power balance: `1/√(1 + (4α/(π i_b))²)`.
pub fn power_balance_velocity(alpha: f64, i_b: f64) -> f64 {
    if i_b == 0.0 {
        return 0.0;
    }
    1.0 / (1.0 + (4.0 * alpha / (PI * i_b)).powi(2)).sqrt()
}

/// Stored output of one fluxon run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LjjRun {
    pub times: Vec<f64>,
    /// Kink centre (φ crossing background + π) at each time; NaN if absent.
    pub positions: Vec<f64>,
    /// `(φ(L) − φ(0))/2π` at each time.
    pub charge: Vec<f64>,
    /// φ at the two taps at each time.
    pub tap_phases: Vec<[f64; 2]>,
    /// `(t, φ(x))` every `snapshot_every`.
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub config_hash: String,
}

impl LjjRun {
    /// Least-squares slope of position against time over samples whose
    /// position lies in `[xa, xb]`.
    pub fn velocity_between(&self, xa: f64, xb: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.positions)
            .filter(|(_, &x)| x >= xa && x <= xb)
            .map(|(&t, &x)| (t, x))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        Some(sxy / sxx)
    }

    /// Largest deviation of the topological charge from 1 while the kink
    /// has not yet reached `x_limit`.
    pub fn charge_drift(&self, x_limit: f64) -> f64 {
        self.positions
            .iter()
            .zip(&self.charge)
            .filter(|(x, _)| x.is_finite() && **x <= x_limit)
            .fold(0.0, |m, (_, q)| m.max((q - 1.0).abs()))
    }
}

pub(crate) struct Chain {
    n: usize,
    dx: f64,
    dt: f64,
    cfg: LjjConfig,
    /// Absorber damping, acting on motion relative to the background.
    extra: Vec<f64>,
    damp: Vec<f64>,
    prev: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
    pub t: f64,
}

fn kink(x: f64, x0: f64, v: f64) -> f64 {
    let g = 1.0 / (1.0 - v * v).sqrt();
    4.0 * (g * (x - x0)).exp().atan()
}

impl Chain {
    pub(crate) fn new(cfg: &LjjConfig) -> Self {
        let n = cfg.nodes();
        let ramped = cfg.bias_ramp > 0.0;
        let bg = if ramped { 0.0 } else { cfg.background() };
        let xs = (0..n).map(|k| k as f64 * cfg.dx);
        let extra: Vec<f64> = xs
            .clone()
            .map(|x| {
                let ramp = if x > cfg.absorber_start && cfg.length > cfg.absorber_start {
                    ((x - cfg.absorber_start) / (cfg.length - cfg.absorber_start)).powi(2)
                } else {
                    0.0
                };
                cfg.absorber_alpha * ramp
            })
            .collect();
        let damp = extra.iter().map(|e| cfg.alpha + e).collect();
        let cur: Vec<f64> = xs.clone().map(|x| bg + kink(x, cfg.x0, cfg.velocity)).collect();
        // one step back along the moving profile
        let prev: Vec<f64> = xs.map(|x| bg + kink(x, cfg.x0 - cfg.velocity * cfg.dt, cfg.velocity)).collect();
        Self { n, dx: cfg.dx, dt: cfg.dt, cfg: cfg.clone(), extra, damp, prev, cur, next: vec![0.0; n], t: 0.0 }
    }

    fn laplacian(&self, k: usize) -> f64 {
        let p = &self.cur;
        let h2 = self.dx * self.dx;
        if k == 0 {
            2.0 * (p[1] - p[0]) / h2
        } else if k == self.n - 1 {
            2.0 * (p[k - 1] - p[k]) / h2
        } else {
            (p[k + 1] - 2.0 * p[k] + p[k - 1]) / h2
        }
    }

    pub(crate) fn step(&mut self) {
        let dt2 = self.dt * self.dt;
        let i_b = self.cfg.bias_at(self.t);
        let drift = self.cfg.background_rate(self.t);
        for k in 0..self.n {
            let h = 0.5 * self.damp[k] * self.dt;
            let force = self.laplacian(k) - self.cur[k].sin() - i_b + self.extra[k] * drift;
            self.next[k] = (2.0 * self.cur[k] - (1.0 - h) * self.prev[k] + dt2 * force) / (1.0 + h);
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.t += self.dt;
    }

    pub(crate) fn phases(&self) -> &[f64] {
        &self.cur
    }

    pub(crate) fn sample(&self, x: f64) -> f64 {
        let s = (x / self.dx).clamp(0.0, (self.n - 1) as f64);
        let k = (s.floor() as usize).min(self.n - 2);
        let f = s - k as f64;
        self.cur[k] * (1.0 - f) + self.cur[k + 1] * f
    }

    /// Leftmost upward crossing of background + π.
    pub(crate) fn position(&self) -> f64 {
        let level = PI - self.cfg.bias_at(self.t).asin();
        let p = &self.cur;
        for k in 1..self.n {
            if p[k - 1] < level && p[k] >= level {
                let f = (level - p[k - 1]) / (p[k] - p[k - 1]);
                return (k as f64 - 1.0 + f) * self.dx;
            }
        }
        f64::NAN
    }

    pub(crate) fn charge(&self) -> f64 {
        (self.cur[self.n - 1] - self.cur[0]) / TAU
    }

    /// Chain energy at the half step between the two stored levels.
    pub(crate) fn energy_midpoint(&self) -> f64 {
        let (p, q) = (&self.prev, &self.cur);
        let mut e = 0.0;
        for k in 0..self.n {
            let w = if k == 0 || k == self.n - 1 { 0.5 } else { 1.0 };
            let phi = 0.5 * (p[k] + q[k]);
            let pt = (q[k] - p[k]) / self.dt;
            e += w * (0.5 * pt * pt + 1.0 - phi.cos());
            if k + 1 < self.n {
                let px = 0.5 * ((q[k + 1] - q[k]) + (p[k + 1] - p[k])) / self.dx;
                e += 0.5 * px * px;
            }
        }
        e * self.dx
    }
}

/// Runs the kink from rest (or its initial velocity) until it is
/// `exit_margin` past the second tap.
///
/// Fails with [`Error::Stalled`] if that does not happen within `t_max`.
pub fn simulate_ljj_fluxon(cfg: &LjjConfig) -> Result<LjjRun> {
    cfg.validate()?;
    let mut chain = Chain::new(cfg);
    let exit = (cfg.taps[1] + cfg.exit_margin).min(cfg.length);
    let mut run = LjjRun {
        times: Vec::new(),
        positions: Vec::new(),
        charge: Vec::new(),
        tap_phases: Vec::new(),
        snapshots: Vec::new(),
        config_hash: config_hash(cfg),
    };
    let mut next_snapshot = 0.0;
    let steps_max = (cfg.t_max / cfg.dt).ceil() as usize;
    let mut furthest = f64::NEG_INFINITY;
    for n in 0..=steps_max {
        let t = n as f64 * cfg.dt;
        let x = chain.position();
        run.times.push(t);
        run.positions.push(x);
        run.charge.push(chain.charge());
        run.tap_phases.push([chain.sample(cfg.taps[0]), chain.sample(cfg.taps[1])]);
        if cfg.snapshot_every > 0.0 && t + 1e-9 >= next_snapshot {
            run.snapshots.push((t, chain.phases().to_vec()));
            next_snapshot += cfg.snapshot_every;
        }
        if x.is_finite() {
            furthest = furthest.max(x);
        }
        if x.is_finite() && x >= exit || (x.is_nan() && furthest > cfg.taps[1]) {
            return Ok(run);
        }
        chain.step();
    }
    Err(Error::Stalled { position: furthest.max(0.0), length: cfg.length, time: cfg.t_max })
}

/// Chain energy sampled every `every` time units over `[0, t_end]`.
pub fn ljj_energy_history(cfg: &LjjConfig, t_end: f64, every: f64) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let mut chain = Chain::new(cfg);
    let steps = (t_end / cfg.dt).round() as usize;
    let stride = ((every / cfg.dt).round() as usize).max(1);
    let mut out = Vec::new();
    for n in 0..=steps {
        chain.step();
        if n % stride == 0 {
            out.push((chain.t - 0.5 * cfg.dt, chain.energy_midpoint()));
        }
    }
    Ok(out)
}

/// Flux threading the coupling loop, `φ(x₂, t) − φ(x₁, t)`.
pub fn loop_flux_waveform(run: &LjjRun, cfg: &LjjConfig) -> Result<Waveform> {
    let samples = run.tap_phases.iter().map(|[a, b]| b - a).collect();
    Waveform::new(cfg.dt, samples, "loop-flux", run.config_hash.clone())
}
