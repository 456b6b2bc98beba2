//! Derivative-free pulse calibration.
//!
//! Coordinate search: each round sweeps the coordinates in turn, refining one
//! at a time with a golden-section search over a bracket that halves every
//! round. The first round starts each coordinate with a coarse scan of its
//! full range, so cold starts find the right basin. The reported fidelity
//! always comes from a fresh propagation with rounded parameters.

use super::sweeps::register_pair_schedule;
use crate::dynamics::{evolve_unitary, Schedule, Segment};
use crate::error::{invalid, Result};
use crate::quantum::{gate_fidelity, state_fidelity, StateVector, UnitaryOperator};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Most free parameters a template may have.
pub const MAX_PARAMETERS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationTarget {
    /// Map `initial` onto `target` (overlap fidelity).
    State { initial: StateVector, target: StateVector },
    /// Match a gate up to global phase.
    Unitary(UnitaryOperator),
}

impl CalibrationTarget {
    pub fn fidelity(&self, u: &UnitaryOperator) -> Result<f64> {
        match self {
            CalibrationTarget::State { initial, target } => state_fidelity(&u.apply(initial)?, target),
            CalibrationTarget::Unitary(v) => gate_fidelity(u, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub seed: f64,
}

impl Parameter {
    pub fn new(name: &str, lower: f64, upper: f64, seed: f64) -> Self {
        Self { name: name.to_string(), lower, upper, seed }
    }

    /// Seed at the middle of the range.
    pub fn cold(name: &str, lower: f64, upper: f64) -> Self {
        Self::new(name, lower, upper, 0.5 * (lower + upper))
    }
}

type Builder<'a> = Box<dyn Fn(&[f64]) -> Result<Schedule> + Send + Sync + 'a>;

/// Parameterized schedule.
pub struct Template<'a> {
    pub params: Vec<Parameter>,
    build: Builder<'a>,
}

impl<'a> Template<'a> {
    pub fn new(params: Vec<Parameter>, build: impl Fn(&[f64]) -> Result<Schedule> + Send + Sync + 'a) -> Self {
        Self { params, build: Box::new(build) }
    }

    pub fn build(&self, x: &[f64]) -> Result<Schedule> {
        (self.build)(x)
    }

    pub fn seeds(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.seed).collect()
    }

    /// Same schedule family with every seed moved to the middle of its range.
    pub fn cold_start(mut self) -> Self {
        for p in &mut self.params {
            p.seed = 0.5 * (p.lower + p.upper);
        }
        self
    }

    pub fn with_bounds(mut self, name: &str, lower: f64, upper: f64) -> Self {
        for p in &mut self.params {
            if p.name == name {
                p.lower = lower;
                p.upper = upper;
                p.seed = p.seed.clamp(lower, upper);
            }
        }
        self
    }

    pub fn with_seed(mut self, name: &str, seed: f64) -> Self {
        for p in &mut self.params {
            if p.name == name {
                p.seed = seed;
            }
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if self.params.is_empty() || self.params.len() > MAX_PARAMETERS {
            return Err(invalid(
                "template",
                format!("needs 1..={MAX_PARAMETERS} free parameters, got {}", self.params.len()),
            ));
        }
        for p in &self.params {
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower <= p.upper) {
                return Err(invalid(&p.name, format!("bad bounds [{}, {}]", p.lower, p.upper)));
            }
            if !(p.lower..=p.upper).contains(&p.seed) {
                return Err(invalid(&p.name, format!("seed {} outside bounds", p.seed)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationOptions {
    /// Converged when `1 − fidelity ≤ tol`.
    pub tol: f64,
    /// Maximum objective evaluations.
    pub budget: usize,
    /// Points in the first-round coarse scan of each coordinate (0 = none).
    pub coarse_points: usize,
    /// Golden-section evaluations per coordinate per round.
    pub golden_steps: usize,
    /// Significant digits kept for the verification run.
    pub digits: u32,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { tol: 1e-4, budget: 4000, coarse_points: 81, golden_steps: 40, digits: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub parameters: Vec<(String, f64)>,
    /// From a fresh propagation with the rounded parameters.
    pub fidelity: f64,
    /// Objective evaluations spent.
    pub iterations: usize,
    pub rounds: usize,
    pub converged: bool,
}

impl CalibrationResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn values(&self) -> Vec<f64> {
        self.parameters.iter().map(|(_, v)| *v).collect()
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

fn round_sig(v: f64, digits: u32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1) as usize, v).parse().unwrap_or(v)
}

struct Objective<'t, 'a> {
    target: &'t CalibrationTarget,
    template: &'t Template<'a>,
    evals: usize,
    budget: usize,
}

impl Objective<'_, '_> {
    fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let u = evolve_unitary(&self.template.build(x)?)?;
        self.target.fidelity(&u)
    }
}

/// Maximizes fidelity of the template against the target.
///
/// Running out of budget is not an error: the best point so far is returned
/// with `converged = false`.
pub fn calibrate_pulse(
    target: &CalibrationTarget,
    template: &Template,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    template.validate()?;
    let mut obj = Objective { target, template, evals: 0, budget: opts.budget };
    let mut x = template.seeds();
    let mut best = if opts.budget > 0 { obj.eval(&x)? } else { f64::NEG_INFINITY };
    let mut rounds = 0;
    let mut width = 0.25;
    let n = x.len();
    while !obj.exhausted() && 1.0 - best > opts.tol * 1e-2 && width > 1e-12 {
        let before = best;
        for i in 0..n {
            let p = &template.params[i];
            let span = p.upper - p.lower;
            if span == 0.0 {
                continue;
            }
            if rounds == 0 && opts.coarse_points >= 2 {
                for k in 0..opts.coarse_points {
                    if obj.exhausted() {
                        break;
                    }
                    let mut trial = x.clone();
                    trial[i] = p.lower + span * k as f64 / (opts.coarse_points - 1) as f64;
                    let f = obj.eval(&trial)?;
                    if f > best {
                        best = f;
                        x = trial;
                    }
                }
            }
            let step = if rounds == 0 && opts.coarse_points >= 2 {
                span / (opts.coarse_points - 1) as f64
            } else {
                width * span
            };
            let lo = (x[i] - step).max(p.lower);
            let hi = (x[i] + step).min(p.upper);
            let (xi, f) = golden_max(&mut obj, &x, i, lo, hi, opts.golden_steps)?;
            if f > best {
                best = f;
                x[i] = xi;
            }
        }
        rounds += 1;
        if best - before < 1e-15 {
            width *= 0.25;
        } else {
            width *= 0.5;
        }
    }
    let rounded: Vec<f64> = x.iter().map(|&v| round_sig(v, opts.digits)).collect();
    let verified = target.fidelity(&evolve_unitary(&template.build(&rounded)?)?)?;
    Ok(CalibrationResult {
        parameters: template.params.iter().map(|p| p.name.clone()).zip(rounded).collect(),
        fidelity: verified.clamp(0.0, 1.0),
        iterations: obj.evals,
        rounds,
        converged: opts.budget > 0 && 1.0 - verified <= opts.tol,
    })
}

fn golden_max(obj: &mut Objective, x: &[f64], i: usize, mut a: f64, mut b: f64, steps: usize) -> Result<(f64, f64)> {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut trial = x.to_vec();
    let mut at = |obj: &mut Objective, v: f64| -> Result<f64> {
        trial[i] = v;
        obj.eval(&trial)
    };
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    if obj.exhausted() {
        return Ok((x[i], f64::NEG_INFINITY));
    }
    let mut fc = at(obj, c)?;
    if obj.exhausted() {
        return Ok((c, fc));
    }
    let mut fd = at(obj, d)?;
    for _ in 0..steps {
        if obj.exhausted() {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = at(obj, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = at(obj, d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Single unipolar pulse on a qubit, parameterized by `amplitude` and
/// `area` (duration = area / amplitude). Seeded for a flip.
pub fn single_pulse_template<'a>(delta: f64, amplitude: (f64, f64)) -> Template<'a> {
    Template::new(
        vec![
            Parameter::new("amplitude", amplitude.0, amplitude.1, amplitude.1),
            Parameter::new("area", 0.0, 4.0 * PI, PI),
        ],
        move |x| {
            if x[0] <= 0.0 {
                return Err(invalid("amplitude", "must be > 0"));
            }
            Ok(Schedule::qubit(delta).pulse(x[0], x[1] / x[0]))
        },
    )
}

/// One coupler pulse of fixed strength `j`; the free parameter is the
/// duration, seeded where the gap phase equals π.
pub fn coupler_template<'a>(delta: f64, j: f64) -> Template<'a> {
    let gap = crate::register::coupler_gap(delta, j);
    let seed = PI / gap;
    Template::new(vec![Parameter::new("time", 0.0, 4.0 * seed, seed)], move |x| {
        let s = Schedule::register(delta, delta);
        Ok(if x[0] > 0.0 { s.push(Segment::register(x[0], 0.0, 0.0, j)) } else { s })
    })
}

/// Register pulse pair with the coupler held at `j`: shared `amplitude`,
/// pulse on qubit 1 for fixed `tau1`, delay `tau_r`, pulse on qubit 2 for
/// `tau2` (free).
pub fn register_pair_template<'a>(
    delta1: f64,
    delta2: f64,
    j: f64,
    tau1: f64,
    tau_r: f64,
    amplitude: Parameter,
    tau2: Parameter,
) -> Template<'a> {
    Template::new(vec![amplitude, tau2], move |x| {
        Ok(register_pair_schedule(delta1, delta2, j, x[0], tau1, tau_r, x[1].max(0.0)))
    })
}
