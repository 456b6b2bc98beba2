//! Experiment scripts over the simulator: parameter sweeps, delay scans and
//! pulse calibration.

pub mod calibrate;
pub mod scans;
pub mod sweeps;

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use calibrate::{
    calibrate_pulse, coupler_template, register_pair_template, single_pulse_template,
    CalibrationOptions, CalibrationResult, CalibrationTarget, Parameter, Template,
};
pub use scans::{
    bloch_trajectory, fringe_contrast, fringe_period, lindblad_ramsey_scan, ramsey_delay_scan,
    BlochPoint, RamseyPoint,
};
pub use sweeps::{
    run_sweep, sweep_coupler_pulse, sweep_pulse_pair, sweep_register_pair, sweep_single_pulse,
    sweep_three_stage, SweepKind,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self { name: name.to_string(), min, max, count }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(invalid(&self.name, format!("axis needs count >= 2, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(invalid(
                &self.name,
                format!("axis needs finite min < max, got [{}, {}]", self.min, self.max),
            ));
        }
        Ok(())
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value(k)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

/// What a sweep cell records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Population of basis state `k`, starting from the ground state.
    Population(usize),
    /// `|⟨to|U|from⟩|²`.
    Transition(usize, usize),
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::Population(k) => format!("P{k}"),
            Observable::Transition(a, b) => format!("P{a}->{b}"),
        }
    }

    pub(crate) fn indices(&self) -> (usize, usize) {
        match *self {
            Observable::Population(k) => (0, k),
            Observable::Transition(a, b) => (a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Axis,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
}

impl SweepSpec {
    pub fn new(axis1: Axis, axis2: Axis) -> Self {
        Self { axis1, axis2, fixed: BTreeMap::new(), observable: None }
    }

    pub fn with(mut self, name: &str, v: f64) -> Self {
        self.fixed.insert(name.to_string(), v);
        self
    }

    pub fn observing(mut self, o: Observable) -> Self {
        self.observable = Some(o);
        self
    }

    pub fn fixed(&self, name: &str) -> Result<f64> {
        let v = *self
            .fixed
            .get(name)
            .ok_or_else(|| Error::MissingParameter(name.to_string()))?;
        if !v.is_finite() {
            return Err(invalid(name, "must be finite"));
        }
        Ok(v)
    }

    pub fn fixed_or(&self, name: &str, default: f64) -> Result<f64> {
        match self.fixed.get(name) {
            Some(_) => self.fixed(name),
            None => Ok(default),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()
    }
}

/// Row-major values, one row per `axis1` value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub observable: String,
    pub values: Vec<f64>,
}

impl SweepGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.count + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.axis2.count..(i + 1) * self.axis2.count]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.axis1.count).map(|i| self.get(i, j)).collect()
    }
}
