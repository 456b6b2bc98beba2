//! Subcommand configs and their runs.
//!
//! Qubit-level configs (`sweep`, `ramsey`, `lindblad`, `calibrate`) are read
//! in the selected unit convention. Circuit-level configs (`shape`, `demo`)
//! are always in normalized circuit units and rad/ns; only their outputs are
//! converted.

use crate::error::CliError;
use crate::output::{Csv, OutputDir};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use unipulse::dynamics::LindbladParams;
use unipulse::fluxshaper::*;
use unipulse::protocols::*;
use unipulse::quantum::{RegisterLevel, StateVector};
use unipulse::units::{dimension_of, Dimension, FrequencyConvention};

pub(crate) fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::config(e.inner().to_string())
        } else {
            CliError::config(format!("field `{path}`: {}", e.inner()))
        }
    })
}

pub(crate) struct Ctx<'a> {
    pub convention: FrequencyConvention,
    pub out: &'a mut OutputDir,
    pub preamble: Vec<String>,
}

impl Ctx<'_> {
    fn csv(&self, header: Vec<String>) -> Csv {
        self.preamble.iter().fold(Csv::new(header), |c, l| c.comment(l.clone()))
    }

    fn to_internal(&self, name: &str, v: f64) -> f64 {
        self.convention.to_internal(dimension_of(name), v)
    }

    fn to_user(&self, name: &str, v: f64) -> f64 {
        self.convention.from_internal(dimension_of(name), v)
    }

    fn label(&self, name: &str) -> String {
        format!("{name} [{}]", self.convention.unit_label(dimension_of(name)))
    }

    fn time(&self, t_ns: f64) -> f64 {
        self.convention.time_from_internal(t_ns)
    }

    fn time_label(&self) -> String {
        format!("t [{}]", self.convention.unit_label(Dimension::Time))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    kind: SweepKind,
    axis1: Axis,
    axis2: Axis,
    #[serde(default)]
    fixed: BTreeMap<String, f64>,
    #[serde(default)]
    observable: Option<Observable>,
}

pub(crate) fn sweep(text: &str, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: SweepConfig = parse(text)?;
    let axis = |a: &Axis| Axis::new(&a.name, ctx.to_internal(&a.name, a.min), ctx.to_internal(&a.name, a.max), a.count);
    let mut spec = SweepSpec::new(axis(&cfg.axis1), axis(&cfg.axis2));
    for (k, v) in &cfg.fixed {
        spec = spec.with(k, ctx.to_internal(k, *v));
    }
    spec.observable = cfg.observable;
    let grids = run_sweep(cfg.kind, &spec)?;

    for (n, g) in grids.iter().enumerate() {
        let mut header = vec![format!("{} \\ {}", ctx.label(&g.axis1.name), ctx.label(&g.axis2.name))];
        header.extend(g.axis2.values().iter().map(|&v| crate::output::format_value(ctx.to_user(&g.axis2.name, v))));
        let mut csv = ctx
            .csv(header)
            .comment(format!("sweep: {}", cfg.kind.name()))
            .comment(format!("observable: {}", g.observable))
            .comment(format!("rows: {}; columns: {}", g.axis1.name, g.axis2.name));
        for i in 0..g.axis1.count {
            let mut row = vec![ctx.to_user(&g.axis1.name, g.axis1.value(i))];
            row.extend_from_slice(g.row(i));
            csv.push(row);
        }
        let name = if grids.len() == 1 { "grid.csv".to_string() } else { format!("grid_{n}.csv") };
        ctx.out.csv(&name, &csv)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DelayRange {
    min: f64,
    max: f64,
    count: usize,
}

impl DelayRange {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.count == 0 || !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(CliError::config("field `tau_r`: needs count >= 1 and finite min <= max"));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        Ok(Axis::new("tau_r", self.min, self.max, self.count).values())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RamseyConfig {
    amplitude: f64,
    delta: f64,
    tau: f64,
    tau_r: DelayRange,
    #[serde(default)]
    gamma: f64,
    #[serde(default)]
    gamma_phi: f64,
}

pub(crate) fn ramsey(text: &str, ctx: &mut Ctx, open: bool) -> Result<(), CliError> {
    let cfg: RamseyConfig = parse(text)?;
    if !open && (cfg.gamma != 0.0 || cfg.gamma_phi != 0.0) {
        return Err(CliError::config("`gamma`/`gamma_phi` belong to the lindblad command"));
    }
    let a = ctx.to_internal("amplitude", cfg.amplitude);
    let delta = ctx.to_internal("delta", cfg.delta);
    let tau = ctx.to_internal("tau", cfg.tau);
    let delays: Vec<f64> = cfg.tau_r.values()?.iter().map(|&t| ctx.to_internal("tau_r", t)).collect();
    let points = if open {
        let lp = LindbladParams::new(ctx.to_internal("gamma", cfg.gamma), ctx.to_internal("gamma_phi", cfg.gamma_phi))?;
        lindblad_ramsey_scan(a, delta, tau, &delays, &lp)?
    } else {
        ramsey_delay_scan(a, delta, tau, &delays)?
    };
    let with_analytic = points.iter().all(|p| p.analytic.is_some());
    let mut header = vec![ctx.label("tau_r").replace("tau_r", "tau_R"), "W_numeric".to_string()];
    if with_analytic {
        header.push("W_analytic".to_string());
    }
    let mut csv = ctx.csv(header);
    for p in &points {
        let mut row = vec![ctx.to_user("tau_r", p.tau_r), p.numeric];
        if let (true, Some(w)) = (with_analytic, p.analytic) {
            row.push(w);
        }
        csv.push(row);
    }
    ctx.out.csv("scan.csv", &csv)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Bounds {
    lower: f64,
    upper: f64,
    #[serde(default)]
    seed: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum TemplateConfig {
    SinglePulse {
        delta: f64,
        amplitude: [f64; 2],
    },
    Coupler {
        delta: f64,
        j: f64,
    },
    RegisterPair {
        delta1: f64,
        delta2: f64,
        j: f64,
        tau1: f64,
        tau_r: f64,
        amplitude: Bounds,
        tau2: Bounds,
    },
    /// Circuit-shaped pulses on the two-qubit register; see `demo`.
    Shaped {
        target: DemoTarget,
        #[serde(default)]
        demo: DemoConfig,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisTarget {
    initial: usize,
    #[serde(rename = "final")]
    target: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrateConfig {
    template: TemplateConfig,
    #[serde(default)]
    target: Option<BasisTarget>,
    #[serde(default)]
    cold_start: bool,
    #[serde(default)]
    options: CalibrationOptions,
}

#[derive(Debug, Serialize)]
struct NamedValue {
    name: String,
    value: f64,
    unit: String,
}

#[derive(Debug, Serialize)]
struct CalibrationReport {
    template: String,
    converged: bool,
    fidelity: f64,
    infidelity: f64,
    iterations: usize,
    rounds: usize,
    parameters: Vec<NamedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline_fidelity: Option<f64>,
}

fn named(r: &CalibrationResult, conv: FrequencyConvention) -> Vec<NamedValue> {
    r.parameters
        .iter()
        .map(|(n, v)| {
            let d = dimension_of(n);
            NamedValue { name: n.clone(), value: conv.from_internal(d, *v), unit: conv.unit_label(d).to_string() }
        })
        .collect()
}

fn report(template: &str, r: &CalibrationResult, conv: FrequencyConvention) -> CalibrationReport {
    CalibrationReport {
        template: template.to_string(),
        converged: r.converged,
        fidelity: r.fidelity,
        infidelity: r.infidelity(),
        iterations: r.iterations,
        rounds: r.rounds,
        parameters: named(r, conv),
        baseline_fidelity: None,
    }
}

pub(crate) fn calibrate(text: &str, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: CalibrateConfig = parse(text)?;
    let f = |n: &str, v: f64| ctx.to_internal(n, v);
    let (name, template, dim) = match &cfg.template {
        TemplateConfig::Shaped { target, demo } => {
            let mut demo = demo.clone();
            demo.options = cfg.options;
            let r = end_to_end_demo(*target, &demo)?;
            let mut rep = report("shaped", &r.calibration, ctx.convention);
            rep.baseline_fidelity = Some(r.baseline_fidelity);
            return ctx.out.json("calibration.json", &rep);
        }
        TemplateConfig::SinglePulse { delta, amplitude } => (
            "single-pulse",
            single_pulse_template(f("delta", *delta), (f("amplitude", amplitude[0]), f("amplitude", amplitude[1]))),
            2,
        ),
        TemplateConfig::Coupler { delta, j } => ("coupler", coupler_template(f("delta", *delta), f("j", *j)), 4),
        TemplateConfig::RegisterPair { delta1, delta2, j, tau1, tau_r, amplitude, tau2 } => {
            let p = |n: &str, b: &Bounds| {
                let (lo, hi) = (f(n, b.lower), f(n, b.upper));
                match b.seed {
                    Some(s) => Parameter::new(n, lo, hi, f(n, s)),
                    None => Parameter::cold(n, lo, hi),
                }
            };
            let t = register_pair_template(
                f("delta1", *delta1),
                f("delta2", *delta2),
                f("j", *j),
                f("tau1", *tau1),
                f("tau_r", *tau_r),
                p("amplitude", amplitude),
                p("tau2", tau2),
            );
            ("register-pair", t, 4)
        }
    };
    let template = if cfg.cold_start { template.cold_start() } else { template };
    let basis = cfg.target.ok_or_else(|| CliError::config("missing field `target`"))?;
    let state = |k: usize, field: &str| {
        StateVector::basis(dim, k).map_err(|_| CliError::config(format!("field `target.{field}`: basis index {k} out of range for dimension {dim}")))
    };
    let target = CalibrationTarget::State { initial: state(basis.initial, "initial")?, target: state(basis.target, "final")? };
    let r = calibrate_pulse(&target, &template, &cfg.options)?;
    ctx.out.json("calibration.json", &report(name, &r, ctx.convention))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeConfig {
    #[serde(default)]
    ljj: LjjConfig,
    #[serde(default)]
    amp: InterferometerConfig,
    #[serde(default)]
    scale: PulseScale,
    /// Bias currents for a duration scan.
    #[serde(default)]
    bias_sweep: Vec<f64>,
    /// MJJ critical currents for an amplitude scan.
    #[serde(default)]
    ic1_sweep: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ShapeSummary {
    peak: f64,
    duration: Option<f64>,
    rise_time: Option<f64>,
    fall_time: Option<f64>,
    area: f64,
    frequency_unit: String,
    time_unit: String,
    loop_flux_duration: Option<f64>,
    stalled: Vec<BiasFailure>,
}

#[derive(Debug, Serialize)]
struct BiasFailure {
    i_b: f64,
    error: String,
}

pub(crate) fn shape(text: &str, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: ShapeConfig = parse(text)?;
    let st = shape_stages(&cfg.ljj, &cfg.amp, &cfg.scale)?;
    let conv = ctx.convention;

    let mut csv = ctx.csv(vec![ctx.time_label(), format!("drive [{}]", conv.unit_label(Dimension::Frequency))]);
    for (k, &v) in st.drive.samples.iter().enumerate() {
        csv.push(vec![ctx.time(st.drive.time(k)), conv.frequency_from_internal(v)]);
    }
    ctx.out.csv("waveform.csv", &csv)?;

    let mut csv = ctx
        .csv(vec!["t [1/omega_p]".into(), "loop_flux".into(), "output_current".into()])
        .comment("normalized circuit units");
    for k in 0..st.loop_flux.len() {
        csv.push(vec![st.loop_flux.time(k), st.loop_flux.samples[k], st.output_current.samples[k]]);
    }
    ctx.out.csv("stages.csv", &csv)?;

    let mut stalled = Vec::new();
    if !cfg.bias_sweep.is_empty() {
        let mut csv = ctx
            .csv(vec!["i_b".into(), "duration".into(), "predicted".into()])
            .comment("loop-flux FWHM in normalized time; NaN where the fluxon did not exit");
        for p in duration_vs_bias(&cfg.ljj, &cfg.bias_sweep) {
            csv.push(vec![p.i_b, p.duration.unwrap_or(f64::NAN), p.predicted]);
            if let Some(e) = p.error {
                stalled.push(BiasFailure { i_b: p.i_b, error: e });
            }
        }
        ctx.out.csv("bias.csv", &csv)?;
    }
    if !cfg.ic1_sweep.is_empty() {
        let mut csv = ctx.csv(vec!["ic1".into(), "peak_output_current".into()]);
        for p in amplitude_vs_ic1(&cfg.amp, &cfg.ic1_sweep, &st.loop_flux)? {
            csv.push(vec![p.ic1, p.peak]);
        }
        ctx.out.csv("amplitude.csv", &csv)?;
    }

    let m = st.drive.metrics();
    let summary = ShapeSummary {
        peak: conv.frequency_from_internal(st.drive.peak()),
        duration: m.map(|m| ctx.time(m.duration)),
        rise_time: m.map(|m| ctx.time(m.rise_time)),
        fall_time: m.map(|m| ctx.time(m.fall_time)),
        area: st.drive.area(),
        frequency_unit: conv.unit_label(Dimension::Frequency).into(),
        time_unit: conv.unit_label(Dimension::Time).into(),
        loop_flux_duration: st.loop_flux.metrics().map(|m| m.duration),
        stalled,
    };
    ctx.out.json("summary.json", &summary)
}

#[derive(Debug, Deserialize)]
struct DemoCommandConfig {
    target: DemoTarget,
    #[serde(flatten)]
    demo: DemoConfig,
}

#[derive(Debug, Serialize)]
struct DemoSummary {
    target: DemoTarget,
    fidelity: f64,
    baseline_fidelity: f64,
    calibration: CalibrationReport,
    baseline: CalibrationReport,
}

pub(crate) fn demo(text: &str, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: DemoCommandConfig = parse(text)?;
    let r = end_to_end_demo(cfg.target, &cfg.demo)?;
    let conv = ctx.convention;

    let mut header = vec![ctx.time_label()];
    header.extend(RegisterLevel::ALL.iter().map(|l| format!("P_{}", l.label())));
    let mut csv = ctx.csv(header);
    for (t, p) in &r.trajectory {
        let mut row = vec![ctx.time(*t)];
        row.extend_from_slice(p);
        csv.push(row);
    }
    ctx.out.csv("trajectory.csv", &csv)?;

    let mut csv = ctx.csv(vec![ctx.time_label(), "shape".into()]).comment("unit-peak pulse shape");
    for (k, &v) in r.shape.samples.iter().enumerate() {
        csv.push(vec![ctx.time(r.shape.time(k)), v]);
    }
    ctx.out.csv("shape.csv", &csv)?;

    let summary = DemoSummary {
        target: r.target,
        fidelity: r.fidelity,
        baseline_fidelity: r.baseline_fidelity,
        calibration: report("shaped", &r.calibration, conv),
        baseline: report("rectangular", &r.baseline, conv),
    };
    ctx.out.json("demo.json", &summary)
}
