//! Fluxon → loop flux → amplitude stage → qubit drive, and the register
//! demo driven by the shaped pulse.

use super::interferometer::{simulate_amplitude_stage, InterferometerConfig};
use super::ljj::{loop_flux_waveform, power_balance_velocity, simulate_ljj_fluxon, LjjConfig};
use super::waveform::Waveform;
use crate::dynamics::{evolve_state, Schedule, Segment};
use crate::error::{invalid, Error, Result};
use crate::protocols::{calibrate_pulse, CalibrationOptions, CalibrationResult, CalibrationTarget, Parameter, Template};
use crate::quantum::StateVector;
use crate::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

/// Conversion from circuit units to qubit units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PulseScale {
    /// Drive (rad/ns) per unit of coupled output current.
    pub energy: f64,
    /// Junction plasma frequency (rad/ns); one normalized time unit is
    /// `1/plasma_frequency` ns.
    pub plasma_frequency: f64,
}

impl Default for PulseScale {
    fn default() -> Self {
        Self { energy: 100.0, plasma_frequency: TAU * 100.0 }
    }
}

impl PulseScale {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy.is_finite()) {
            return Err(invalid("energy", "must be finite"));
        }
        if !(self.plasma_frequency.is_finite() && self.plasma_frequency > 0.0) {
            return Err(invalid("plasma_frequency", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Every intermediate signal of one shaping run. Circuit stages are in
/// normalized time; `drive` is in ns and rad/ns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapedStages {
    pub loop_flux: Waveform,
    pub output_current: Waveform,
    pub drive: Waveform,
}

pub fn shape_stages(ljj: &LjjConfig, amp: &InterferometerConfig, scale: &PulseScale) -> Result<ShapedStages> {
    scale.validate()?;
    let run = simulate_ljj_fluxon(ljj)?;
    let loop_flux = loop_flux_waveform(&run, ljj)?;
    let output_current = simulate_amplitude_stage(&loop_flux, amp)?;
    let mut drive = output_current.scaled(scale.energy * amp.coupling).with_time_scale(1.0 / scale.plasma_frequency);
    drive.meta.stage = "drive".into();
    Ok(ShapedStages { loop_flux, output_current, drive })
}

/// Qubit drive ε(t) produced by the full chain.
pub fn shape_control_pulse(ljj: &LjjConfig, amp: &InterferometerConfig, scale: &PulseScale) -> Result<Waveform> {
    Ok(shape_stages(ljj, amp, scale)?.drive)
}

/// Drops leading and trailing samples below `rel · max|v|`, keeping one
/// sample of margin on each side.
pub fn trim_waveform(w: &Waveform, rel: f64) -> Waveform {
    let level = rel * w.max_abs();
    let first = w.samples.iter().position(|v| v.abs() > level);
    let last = w.samples.iter().rposition(|v| v.abs() > level);
    match (first, last) {
        (Some(a), Some(b)) => {
            let a = a.saturating_sub(1);
            let b = (b + 1).min(w.len() - 1);
            Waveform { dt: w.dt, samples: w.samples[a..=b].to_vec(), meta: w.meta.clone() }
        }
        _ => w.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasPoint {
    pub i_b: f64,
    /// Loop-flux half-maximum width in normalized time.
    pub duration: Option<f64>,
    /// Power-balance estimate `(x₂ − x₁)/u`.
    pub predicted: f64,
    pub error: Option<String>,
}

/// Loop-flux duration for each bias. Failed points (stalled kink, no
/// plateau) carry the error instead of a duration.
pub fn duration_vs_bias(template: &LjjConfig, grid: &[f64]) -> Vec<BiasPoint> {
    let span = template.taps[1] - template.taps[0];
    grid.par_iter()
        .map(|&i_b| {
            let cfg = LjjConfig { i_b, snapshot_every: 0.0, ..template.clone() };
            let predicted = span / power_balance_velocity(cfg.alpha, i_b);
            let measured = simulate_ljj_fluxon(&cfg).and_then(|run| {
                loop_flux_waveform(&run, &cfg)?
                    .metrics()
                    .map(|m| m.duration)
                    .ok_or_else(|| invalid("loop_flux", "no plateau"))
            });
            match measured {
                Ok(d) => BiasPoint { i_b, duration: Some(d), predicted, error: None },
                Err(e) => BiasPoint { i_b, duration: None, predicted, error: Some(e.to_string()) },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudePoint {
    pub ic1: f64,
    /// Signed output sample of largest magnitude.
    pub peak: f64,
}

pub fn amplitude_vs_ic1(template: &InterferometerConfig, grid: &[f64], input: &Waveform) -> Result<Vec<AmplitudePoint>> {
    if grid.len() < 2 {
        return Err(invalid("ic1", "grid needs at least 2 points"));
    }
    grid.par_iter()
        .map(|&ic1| {
            let cfg = InterferometerConfig { ic1, ..template.clone() };
            Ok(AmplitudePoint { ic1, peak: simulate_amplitude_stage(input, &cfg)?.peak() })
        })
        .collect()
}

/// Steady kink velocity measured between the taps.
pub fn measured_velocity(cfg: &LjjConfig) -> Result<f64> {
    let cfg = LjjConfig { snapshot_every: 0.0, ..cfg.clone() };
    let run = simulate_ljj_fluxon(&cfg)?;
    run.velocity_between(cfg.taps[0], cfg.taps[1]).ok_or_else(|| invalid("taps", "kink never crossed the taps"))
}

/// Bias at which the measured velocity equals `target`, by bisection on
/// `[lo, hi]`.
pub fn bias_for_velocity(template: &LjjConfig, target: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(0.0 < target && target < 1.0) {
        return Err(invalid("velocity", "target must lie in (0, 1)"));
    }
    let at = |i_b: f64| measured_velocity(&LjjConfig { i_b, ..template.clone() });
    let (mut a, mut b) = (lo, hi);
    if at(a)? > target || at(b)? < target {
        return Err(invalid("i_b", format!("velocity {target} not bracketed by [{lo}, {hi}]")));
    }
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        if at(m)? < target {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-6 * b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoTarget {
    /// |↓↓⟩ → |↑↑⟩.
    Inversion,
    /// |↓↓⟩ → (|↓↑⟩ + |↑↑⟩)/√2: qubit 1 flipped, qubit 2 in an equal
    /// superposition.
    Entangled,
}

impl DemoTarget {
    pub fn state(self) -> StateVector {
        let mut a = vec![Complex64::new(0.0, 0.0); 4];
        match self {
            DemoTarget::Inversion => a[3] = Complex64::new(1.0, 0.0),
            DemoTarget::Entangled => {
                a[2] = Complex64::new(FRAC_1_SQRT_2, 0.0);
                a[3] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            }
        }
        StateVector::normalized(a).expect("unit target")
    }

    /// Rotation angles on qubits 1 and 2.
    fn areas(self) -> (f64, f64) {
        match self {
            DemoTarget::Inversion => (PI, PI),
            DemoTarget::Entangled => (PI, 0.5 * PI),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoConfig {
    pub ljj: LjjConfig,
    pub amp: InterferometerConfig,
    pub plasma_frequency: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub j: f64,
    /// Piecewise-constant segments used to sample the pulse.
    pub bins: usize,
    pub options: CalibrationOptions,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            ljj: LjjConfig::default(),
            amp: InterferometerConfig::default(),
            plasma_frequency: TAU * 100.0,
            delta1: TAU * 0.25,
            delta2: TAU * 0.25,
            j: 0.0,
            bins: 200,
            options: CalibrationOptions { tol: 1e-2, budget: 600, coarse_points: 21, golden_steps: 30, digits: 10 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub target: DemoTarget,
    pub fidelity: f64,
    pub calibration: CalibrationResult,
    /// Same template with an ideal rectangular pulse of equal width.
    pub baseline_fidelity: f64,
    pub baseline: CalibrationResult,
    /// Unit-peak pulse shape (ns).
    pub shape: Waveform,
    /// `(t, populations)` under the calibrated shaped pulse.
    pub trajectory: Vec<(f64, Vec<f64>)>,
}

fn demo_template<'a>(cfg: &DemoConfig, target: DemoTarget, bins: Vec<(f64, f64)>) -> Template<'a> {
    let area: f64 = bins.iter().map(|(d, v)| d * v).sum();
    let (t1, t2) = target.areas();
    let (d1, d2, j) = (cfg.delta1, cfg.delta2, cfg.j);
    // the phase wait goes first so the coarse scan fixes it before the
    // amplitudes are refined
    let mut params = Vec::new();
    if target == DemoTarget::Entangled {
        let period = TAU / d2.abs().max(1e-12);
        params.push(Parameter::new("wait", 0.0, period, 0.5 * period));
    }
    let k = params.len();
    params.push(Parameter::new("a1", 0.5 * t1 / area, 1.5 * t1 / area, t1 / area));
    params.push(Parameter::new("a2", 0.5 * t2 / area, 1.5 * t2 / area, t2 / area));
    Template::new(params, move |x| {
        let mut s = Schedule::register(d1, d2);
        for &(d, v) in &bins {
            s = s.push(Segment::register(d, x[k] * v, x[k + 1] * v, j));
        }
        if k == 1 && x[0] > 0.0 {
            s = s.push(Segment::register(x[0], 0.0, 0.0, j));
        }
        Ok(s)
    })
}

/// Calibrates the shaped pulse on a two-qubit register for `target` and
/// compares against an ideal rectangular pulse.
pub fn end_to_end_demo(target: DemoTarget, cfg: &DemoConfig) -> Result<DemoReport> {
    if cfg.bins == 0 {
        return Err(invalid("bins", "must be >= 1"));
    }
    let scale = PulseScale { energy: 1.0, plasma_frequency: cfg.plasma_frequency };
    let drive = shape_control_pulse(&cfg.ljj, &cfg.amp, &scale)?;
    let peak = drive.peak();
    if peak == 0.0 {
        return Err(invalid("ic1", "amplitude stage produced no pulse"));
    }
    let shape = trim_waveform(&drive.scaled(1.0 / peak), 1e-4);
    let width = shape.metrics().ok_or_else(|| invalid("drive", "pulse has no defined width"))?.duration;
    let per_bin = shape.len().div_ceil(cfg.bins);
    let bins = shape.piecewise(per_bin);

    let initial = StateVector::basis(4, 0)?;
    let goal = CalibrationTarget::State { initial: initial.clone(), target: target.state() };
    let template = demo_template(cfg, target, bins);
    let calibration = calibrate_pulse(&goal, &template, &cfg.options)?;
    let schedule = template.build(&calibration.values())?;

    let rect = demo_template(cfg, target, vec![(width, 1.0)]);
    let baseline = calibrate_pulse(&goal, &rect, &cfg.options)?;

    let sample_dt = schedule.total_duration() / 400.0;
    let traj = evolve_state(&schedule, &initial, sample_dt)?;
    let trajectory = traj.iter().map(|(t, psi)| (t, psi.populations())).collect();

    if !calibration.fidelity.is_finite() {
        return Err(Error::NonFinite("fidelity"));
    }
    Ok(DemoReport {
        target,
        fidelity: calibration.fidelity,
        baseline_fidelity: baseline.fidelity,
        calibration,
        baseline,
        shape,
        trajectory,
    })
}
