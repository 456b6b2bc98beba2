//! Unit conventions.
//!
//! Internally every frequency is an angular frequency in rad/ns and every time
//! is in ns, with ħ = 1. User-facing inputs default to cyclic frequencies in
//! GHz (`Δ/h = 0.25 GHz` style) and times in ps; the `Angular` convention
//! passes internal units straight through.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyConvention {
    /// Frequencies in GHz (cyclic, multiplied by 2π on ingestion), times in ps.
    #[default]
    CyclicGhz,
    /// Frequencies in rad/ns, times in ns.
    Angular,
}

/// Physical dimension of a named parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Time,
    Dimensionless,
}

impl FrequencyConvention {
    pub fn frequency_to_internal(self, v: f64) -> f64 {
        match self {
            Self::CyclicGhz => v * TAU,
            Self::Angular => v,
        }
    }

    pub fn frequency_from_internal(self, v: f64) -> f64 {
        match self {
            Self::CyclicGhz => v / TAU,
            Self::Angular => v,
        }
    }

    pub fn time_to_internal(self, v: f64) -> f64 {
        match self {
            Self::CyclicGhz => v * 1e-3,
            Self::Angular => v,
        }
    }

    pub fn time_from_internal(self, v: f64) -> f64 {
        match self {
            Self::CyclicGhz => v * 1e3,
            Self::Angular => v,
        }
    }

    pub fn to_internal(self, dim: Dimension, v: f64) -> f64 {
        match dim {
            Dimension::Frequency => self.frequency_to_internal(v),
            Dimension::Time => self.time_to_internal(v),
            Dimension::Dimensionless => v,
        }
    }

    pub fn from_internal(self, dim: Dimension, v: f64) -> f64 {
        match dim {
            Dimension::Frequency => self.frequency_from_internal(v),
            Dimension::Time => self.time_from_internal(v),
            Dimension::Dimensionless => v,
        }
    }

    pub fn unit_label(self, dim: Dimension) -> &'static str {
        match (self, dim) {
            (Self::CyclicGhz, Dimension::Frequency) => "GHz",
            (Self::CyclicGhz, Dimension::Time) => "ps",
            (Self::Angular, Dimension::Frequency) => "rad/ns",
            (Self::Angular, Dimension::Time) => "ns",
            (_, Dimension::Dimensionless) => "1",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::CyclicGhz => "cyclic-ghz",
            Self::Angular => "angular",
        }
    }
}

impl std::str::FromStr for FrequencyConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cyclic-ghz" => Ok(Self::CyclicGhz),
            "angular" => Ok(Self::Angular),
            other => Err(format!("unknown unit convention `{other}`")),
        }
    }
}

/// Dimension of a parameter by its conventional name.
///
/// Used by sweep specs and config files so that one table decides which
/// numbers are scaled by 2π and which are converted from ps.
pub fn dimension_of(name: &str) -> Dimension {
    match name {
        "delta" | "delta1" | "delta2" | "amplitude" | "a1" | "a2" | "j" | "coupling" | "omega"
        | "gamma" | "gamma_phi" | "detuning" => Dimension::Frequency,
        "tau" | "tau1" | "tau2" | "tau_r" | "time" | "delay" | "duration" | "wait" => {
            Dimension::Time
        }
        _ => Dimension::Dimensionless,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_ghz_scales_by_two_pi_once() {
        let c = FrequencyConvention::CyclicGhz;
        assert_eq!(c.frequency_to_internal(0.25), 0.25 * TAU);
        assert_eq!(c.time_to_internal(10.0), 0.01);
    }

    #[test]
    fn round_trip_is_identity() {
        for c in [FrequencyConvention::CyclicGhz, FrequencyConvention::Angular] {
            for &v in &[0.0, 1e-9, 0.25, 3.7, 1234.5678, -0.6] {
                let f = c.frequency_from_internal(c.frequency_to_internal(v));
                let t = c.time_from_internal(c.time_to_internal(v));
                assert!((f - v).abs() <= 1e-14 * v.abs().max(1e-300));
                assert!((t - v).abs() <= 1e-14 * v.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("angular".parse::<FrequencyConvention>().unwrap(), FrequencyConvention::Angular);
        assert!("hz".parse::<FrequencyConvention>().is_err());
        assert_eq!(dimension_of("area"), Dimension::Dimensionless);
        assert_eq!(dimension_of("tau_r"), Dimension::Time);
    }
}
