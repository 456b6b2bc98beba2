use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformMeta {
    pub stage: String,
    /// sha256 of the JSON form of the producing configuration.
    pub config_hash: String,
}

/// Uniformly sampled real signal starting at t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub meta: WaveformMeta,
}

/// Shape summary of a single-lobed pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseMetrics {
    /// Signed sample of largest magnitude.
    pub peak: f64,
    /// Width at half the peak magnitude.
    pub duration: f64,
    /// 10 % to 90 % of the peak magnitude.
    pub rise_time: f64,
    pub fall_time: f64,
    /// Time integral.
    pub area: f64,
}

pub(crate) fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

impl Waveform {
    pub fn new(dt: f64, samples: Vec<f64>, stage: &str, config_hash: String) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", "sample period must be finite and > 0"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid(stage, "waveform has non-finite samples"));
        }
        Ok(Self { dt, samples, meta: WaveformMeta { stage: stage.to_string(), config_hash } })
    }

    pub fn zeros(dt: f64, n: usize) -> Self {
        Self { dt, samples: vec![0.0; n], meta: WaveformMeta { stage: "zero".into(), config_hash: String::new() } }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.dt * self.samples.len().saturating_sub(1) as f64
    }

    /// Linear interpolation, clamped to the end samples.
    pub fn at(&self, t: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let s = (t / self.dt).max(0.0);
        let k = s.floor() as usize;
        if k + 1 >= self.samples.len() {
            return *self.samples.last().unwrap();
        }
        let f = s - k as f64;
        self.samples[k] * (1.0 - f) + self.samples[k + 1] * f
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().copied().fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m })
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dt: self.dt, samples: self.samples.iter().map(|v| v * s).collect(), meta: self.meta.clone() }
    }

    /// Same samples on a rescaled time axis.
    pub fn with_time_scale(&self, s: f64) -> Self {
        Self { dt: self.dt * s, samples: self.samples.clone(), meta: self.meta.clone() }
    }

    pub fn area(&self) -> f64 {
        let n = self.samples.len();
        if n < 2 {
            return 0.0;
        }
        let inner: f64 = self.samples[1..n - 1].iter().sum();
        self.dt * (inner + 0.5 * (self.samples[0] + self.samples[n - 1]))
    }

    /// First time `|v|` crosses `level` upwards at or after sample `from`,
    /// linearly interpolated.
    fn crossing_up(&self, level: f64, from: usize) -> Option<(f64, usize)> {
        let a: Vec<f64> = self.samples.iter().map(|v| v.abs()).collect();
        (from.max(1)..a.len()).find(|&k| a[k - 1] < level && a[k] >= level).map(|k| {
            let f = (level - a[k - 1]) / (a[k] - a[k - 1]);
            (self.dt * (k as f64 - 1.0 + f), k)
        })
    }

    /// Last time `|v|` crosses `level` downwards.
    fn crossing_down(&self, level: f64) -> Option<f64> {
        let a: Vec<f64> = self.samples.iter().map(|v| v.abs()).collect();
        (1..a.len()).rev().find(|&k| a[k - 1] >= level && a[k] < level).map(|k| {
            let f = (a[k - 1] - level) / (a[k - 1] - a[k]);
            self.dt * (k as f64 - 1.0 + f)
        })
    }

    /// Half-maximum width and edge times. `None` if the signal never returns
    /// below half its peak or never rises.
    pub fn metrics(&self) -> Option<PulseMetrics> {
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        let (t_half_up, _) = self.crossing_up(0.5 * m, 0)?;
        let t_half_down = self.crossing_down(0.5 * m)?;
        let (t10, _) = self.crossing_up(0.1 * m, 0)?;
        let (t90, _) = self.crossing_up(0.9 * m, 0)?;
        let d90 = self.crossing_down(0.9 * m)?;
        let d10 = self.crossing_down(0.1 * m)?;
        Some(PulseMetrics {
            peak: self.peak(),
            duration: t_half_down - t_half_up,
            rise_time: t90 - t10,
            fall_time: d10 - d90,
            area: self.area(),
        })
    }

    /// Piecewise-constant approximation: bins of `bin` samples, each
    /// replaced by its mean. Returns `(duration, value)` pairs.
    pub fn piecewise(&self, bin: usize) -> Vec<(f64, f64)> {
        let bin = bin.max(1);
        self.samples
            .chunks(bin)
            .map(|c| (c.len() as f64 * self.dt, c.iter().sum::<f64>() / c.len() as f64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid() -> Waveform {
        // 0 for 10 samples, ramp over 10, flat 1 for 80, ramp down 10, 0 for 10
        let mut s = vec![0.0; 10];
        s.extend((1..=10).map(|k| k as f64 / 10.0));
        s.extend(vec![1.0; 80]);
        s.extend((0..10).rev().map(|k| k as f64 / 10.0));
        s.extend(vec![0.0; 10]);
        Waveform::new(0.1, s, "test", String::new()).unwrap()
    }

    #[test]
    fn metrics_of_trapezoid() {
        let m = trapezoid().metrics().unwrap();
        assert!((m.duration - 9.0).abs() < 1e-9, "{m:?}");
        assert!((m.rise_time - 0.8).abs() < 1e-9);
        assert!((m.fall_time - 0.8).abs() < 1e-9);
        assert_eq!(m.peak, 1.0);
    }

    #[test]
    fn piecewise_preserves_area() {
        let w = trapezoid();
        let total: f64 = w.piecewise(7).iter().map(|(d, v)| d * v).sum();
        let direct: f64 = w.samples.iter().sum::<f64>() * w.dt;
        assert!((total - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Waveform::new(0.1, vec![f64::NAN], "x", String::new()).is_err());
        assert!(Waveform::new(0.0, vec![], "x", String::new()).is_err());
    }
}
