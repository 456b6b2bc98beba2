//! Shared fixtures for the benchmarks.

use std::f64::consts::TAU;
use unipulse::dynamics::{Schedule, Segment};
use unipulse::fluxshaper::LjjConfig;
use unipulse::protocols::{Axis, SweepSpec};

/// Qubit Ramsey sequence at Δ = 0.25 GHz with π/2 pulses.
pub fn qubit_ramsey() -> Schedule {
    let (delta, a) = (TAU * 0.25, TAU * 10.0);
    let tau = 0.25 * TAU / a;
    Schedule::qubit(delta).pulse(a, tau).wait(2.0).pulse(a, tau)
}

/// Kick, drive, kick on the register.
pub fn register_three_stage() -> Schedule {
    let kick = Segment::register(0.01, 0.0, 0.0, 1.0);
    Schedule::register(1.0, 1.0).push(kick).push(Segment::register(0.1, 40.0, 30.0, 0.0)).push(kick)
}

pub fn single_sweep(n: usize) -> SweepSpec {
    SweepSpec::new(Axis::new("area", 0.0, 2.0 * TAU, n), Axis::new("time", 0.0, 0.2, n))
        .with("delta", TAU * 0.25)
        .with("tau", 0.05)
}

/// Default line without snapshots.
pub fn ljj() -> LjjConfig {
    LjjConfig { snapshot_every: 0.0, ..Default::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert!(qubit_ramsey().total_duration() > 2.0);
        assert_eq!(register_three_stage().segments.len(), 3);
        assert!(single_sweep(4).validate().is_ok());
        assert!(ljj().validate().is_ok());
    }
}
