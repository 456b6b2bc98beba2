//! Two-axis parameter sweeps.
//!
//! Each cell is an independent propagation; cells run in parallel and are
//! collected in index order, so grids do not depend on scheduling.

use super::{Observable, SweepGrid, SweepSpec};
use crate::analytic::{compose_pulse_sequence, RectPulse, SequenceStep};
use crate::dynamics::{evolve_unitary, Schedule, Segment};
use crate::error::{invalid, Error, Result};
use crate::quantum::UnitaryOperator;
use crate::register::{coupler_kick_exact, three_stage_unitary, ThreeStageSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Single,
    Pair,
    Coupler,
    ThreeStage,
    RegisterPair,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Single => "single",
            SweepKind::Pair => "pair",
            SweepKind::Coupler => "coupler",
            SweepKind::ThreeStage => "three-stage",
            SweepKind::RegisterPair => "register-pair",
        }
    }
}

/// Dispatches on the sweep kind. Every kind returns one grid except
/// `RegisterPair`, which returns one per basis state.
pub fn run_sweep(kind: SweepKind, spec: &SweepSpec) -> Result<Vec<SweepGrid>> {
    match kind {
        SweepKind::Single => sweep_single_pulse(spec).map(|g| vec![g]),
        SweepKind::Pair => sweep_pulse_pair(spec).map(|g| vec![g]),
        SweepKind::Coupler => sweep_coupler_pulse(spec).map(|g| vec![g]),
        SweepKind::ThreeStage => sweep_three_stage(spec).map(|g| vec![g]),
        SweepKind::RegisterPair => sweep_register_pair(spec).map(|g| g.to_vec()),
    }
}

fn expect_axis(name: &str, allowed: &[&str]) -> Result<()> {
    if allowed.contains(&name) {
        Ok(())
    } else {
        Err(Error::UnknownAxis(format!("{name} (expected one of {})", allowed.join(", "))))
    }
}

fn fill<const K: usize>(
    spec: &SweepSpec,
    cell: impl Fn(f64, f64) -> Result<[f64; K]> + Sync,
) -> Result<[Vec<f64>; K]> {
    let (n1, n2) = (spec.axis1.count, spec.axis2.count);
    let cells: Vec<[f64; K]> = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| cell(spec.axis1.value(idx / n2), spec.axis2.value(idx % n2)))
        .collect::<Result<_>>()?;
    Ok(std::array::from_fn(|k| cells.iter().map(|c| c[k].clamp(0.0, 1.0)).collect()))
}

fn grid(spec: &SweepSpec, observable: String, values: Vec<f64>) -> SweepGrid {
    SweepGrid { axis1: spec.axis1.clone(), axis2: spec.axis2.clone(), observable, values }
}

fn observe(u: &UnitaryOperator, o: Observable) -> Result<f64> {
    let (from, to) = o.indices();
    if from >= u.dim() || to >= u.dim() {
        return Err(invalid("observable", format!("index out of range for dimension {}", u.dim())));
    }
    Ok(u.transition_probability(from, to))
}

/// Steps of `steps` cut off after elapsed time `t`.
fn truncate_steps(steps: &[SequenceStep], t: f64) -> Vec<SequenceStep> {
    let mut left = t;
    let mut out = Vec::new();
    for s in steps {
        if left <= 0.0 {
            break;
        }
        match *s {
            SequenceStep::Pulse(p) => {
                let d = p.duration.min(left);
                out.push(SequenceStep::Pulse(RectPulse { amplitude: p.amplitude, duration: d }));
                left -= d;
            }
            SequenceStep::Gap(g) => {
                let d = g.min(left);
                out.push(SequenceStep::Gap(d));
                left -= d;
            }
        }
    }
    if left > 0.0 {
        out.push(SequenceStep::Gap(left));
    }
    out
}

/// Segments of `s` cut off after elapsed time `t`, idling past the end.
pub(crate) fn truncate_schedule(s: &Schedule, t: f64) -> Schedule {
    let mut left = t;
    let mut out = Schedule { system: s.system, segments: Vec::new() };
    for seg in &s.segments {
        if left <= 0.0 {
            break;
        }
        let d = seg.duration.min(left);
        out.segments.push(Segment { duration: d, ..*seg });
        left -= d;
    }
    if left > 0.0 {
        out = out.wait(left);
    }
    out
}

fn amplitude_from(spec: &SweepSpec, v: f64, duration_key: &str) -> Result<f64> {
    match spec.axis1.name.as_str() {
        "area" => {
            let tau = spec.fixed(duration_key)?;
            if tau <= 0.0 {
                return Err(invalid(duration_key, "must be > 0 for an area axis"));
            }
            Ok(v / tau)
        }
        _ => Ok(v),
    }
}

fn non_negative_axis(spec: &SweepSpec) -> Result<()> {
    if spec.axis2.min < 0.0 {
        return Err(invalid(&spec.axis2.name, "must be >= 0"));
    }
    Ok(())
}

/// Single unipolar pulse. `axis1`: `amplitude` or `area` (= A·tau, needs
/// fixed `tau`); `axis2`: elapsed `time`. Fixed: `delta`, optional `tau`
/// (pulse length; the pulse stays on for the whole window if absent).
/// Default observable: ground population.
pub fn sweep_single_pulse(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    expect_axis(&spec.axis1.name, &["amplitude", "area"])?;
    expect_axis(&spec.axis2.name, &["time"])?;
    non_negative_axis(spec)?;
    let delta = spec.fixed("delta")?;
    let tau = spec.fixed_or("tau", f64::INFINITY)?;
    let obs = spec.observable.unwrap_or(Observable::Population(0));
    let [values] = fill(spec, |v1, t| {
        let a = amplitude_from(spec, v1, "tau")?;
        let steps = truncate_steps(&[SequenceStep::Pulse(RectPulse { amplitude: a, duration: tau })], t);
        Ok([observe(&compose_pulse_sequence(&steps, delta)?, obs)?])
    })?;
    Ok(grid(spec, obs.label(), values))
}

/// Pulse pair of shared amplitude. `axis1`: `amplitude` or `area` (= A·tau1);
/// `axis2`: elapsed `time` (fixed `tau_r`) or `delay` (final value).
/// Fixed: `delta`, `tau1`, optional `tau2` (defaults to `tau1`).
pub fn sweep_pulse_pair(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    expect_axis(&spec.axis1.name, &["amplitude", "area"])?;
    expect_axis(&spec.axis2.name, &["time", "delay"])?;
    non_negative_axis(spec)?;
    let delta = spec.fixed("delta")?;
    let tau1 = spec.fixed("tau1")?;
    let tau2 = spec.fixed_or("tau2", tau1)?;
    let by_time = spec.axis2.name == "time";
    let tau_r_fixed = if by_time { spec.fixed("tau_r")? } else { 0.0 };
    let obs = spec.observable.unwrap_or(Observable::Population(0));
    let [values] = fill(spec, |v1, v2| {
        let a = amplitude_from(spec, v1, "tau1")?;
        let tau_r = if by_time { tau_r_fixed } else { v2 };
        let steps = vec![
            SequenceStep::Pulse(RectPulse { amplitude: a, duration: tau1 }),
            SequenceStep::Gap(tau_r),
            SequenceStep::Pulse(RectPulse { amplitude: a, duration: tau2 }),
        ];
        let steps = if by_time { truncate_steps(&steps, v2) } else { steps };
        Ok([observe(&compose_pulse_sequence(&steps, delta)?, obs)?])
    })?;
    Ok(grid(spec, obs.label(), values))
}

/// One pulse on the coupler. `axis1`: `coupling`; `axis2`: `time`.
/// Fixed: `delta`. Default observable: |↓↓⟩ → |↑↑⟩.
pub fn sweep_coupler_pulse(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    expect_axis(&spec.axis1.name, &["coupling", "j"])?;
    expect_axis(&spec.axis2.name, &["time"])?;
    non_negative_axis(spec)?;
    let delta = spec.fixed("delta")?;
    let obs = spec.observable.unwrap_or(Observable::Transition(0, 3));
    let [values] = fill(spec, |j, t| Ok([observe(&coupler_kick_exact(delta, j, t)?, obs)?]))?;
    Ok(grid(spec, obs.label(), values))
}

/// Kick, drive, kick with exact kicks. `axis1`: `amplitude` (A1 = v,
/// A2 = `a2_ratio`·v) or `a1` (fixed `a2`); `axis2`: `tau2`.
/// Fixed: `delta`, `j`, `tau1`.
pub fn sweep_three_stage(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    expect_axis(&spec.axis1.name, &["amplitude", "a1"])?;
    expect_axis(&spec.axis2.name, &["tau2", "time"])?;
    non_negative_axis(spec)?;
    let delta = spec.fixed("delta")?;
    let j = spec.fixed("j")?;
    let tau1 = spec.fixed("tau1")?;
    let by_ratio = spec.axis1.name == "amplitude";
    let ratio = spec.fixed_or("a2_ratio", 1.0)?;
    let a2_fixed = if by_ratio { 0.0 } else { spec.fixed("a2")? };
    let obs = spec.observable.unwrap_or(Observable::Transition(0, 3));
    let [values] = fill(spec, |a1, tau2| {
        let a2 = if by_ratio { ratio * a1 } else { a2_fixed };
        let s = ThreeStageSpec::new(tau1, tau2, j, a1, a2)?;
        Ok([observe(&three_stage_unitary(&s, delta)?, obs)?])
    })?;
    Ok(grid(spec, obs.label(), values))
}

/// The register-pair schedule: pulse `a` on qubit 1 for `tau1`, idle for
/// `tau_r`, pulse `a` on qubit 2 for `tau2`, coupler held at `j` throughout.
pub fn register_pair_schedule(
    delta1: f64,
    delta2: f64,
    j: f64,
    a: f64,
    tau1: f64,
    tau_r: f64,
    tau2: f64,
) -> Schedule {
    let mut s = Schedule::register(delta1, delta2);
    for (d, e1, e2) in [(tau1, a, 0.0), (tau_r, 0.0, 0.0), (tau2, 0.0, a)] {
        if d > 0.0 {
            s = s.push(Segment::register(d, e1, e2, j));
        }
    }
    s
}

/// Register pulse pair, one grid per final basis state. `axis1`:
/// `amplitude`; `axis2`: elapsed `time` or `tau2`. Fixed: `delta` (or
/// `delta1`/`delta2`), `j`, `tau1`, `tau_r`, and `tau2` for a time axis.
pub fn sweep_register_pair(spec: &SweepSpec) -> Result<[SweepGrid; 4]> {
    spec.validate()?;
    expect_axis(&spec.axis1.name, &["amplitude"])?;
    expect_axis(&spec.axis2.name, &["time", "tau2"])?;
    non_negative_axis(spec)?;
    let (d1, d2) = match spec.fixed("delta") {
        Ok(d) => (d, d),
        Err(_) => (spec.fixed("delta1")?, spec.fixed("delta2")?),
    };
    let j = spec.fixed("j")?;
    let tau1 = spec.fixed("tau1")?;
    let tau_r = spec.fixed("tau_r")?;
    let by_time = spec.axis2.name == "time";
    let tau2_fixed = if by_time { spec.fixed("tau2")? } else { 0.0 };
    for (n, v) in [("tau1", tau1), ("tau_r", tau_r), ("tau2", tau2_fixed)] {
        if v < 0.0 {
            return Err(invalid(n, "must be >= 0"));
        }
    }
    let vals = fill(spec, |a, v2| {
        let tau2 = if by_time { tau2_fixed } else { v2 };
        let full = register_pair_schedule(d1, d2, j, a, tau1, tau_r, tau2);
        let s = if by_time { truncate_schedule(&full, v2) } else { full };
        let u = evolve_unitary(&s)?;
        Ok(std::array::from_fn(|k| u.transition_probability(0, k)))
    })?;
    let [v0, v1, v2, v3] = vals;
    Ok([
        grid(spec, Observable::Population(0).label(), v0),
        grid(spec, Observable::Population(1).label(), v1),
        grid(spec, Observable::Population(2).label(), v2),
        grid(spec, Observable::Population(3).label(), v3),
    ])
}
