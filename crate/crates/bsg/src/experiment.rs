//! Experiment configuration and the runner behind the CLI.
//!
//! An experiment is a single JSON document (see the book's CLI chapter for the
//! schema). Runs are deterministic given the config and seed; output files are
//! written atomically (temp file + rename) so interrupted runs never leave
//! half-written reports. Trajectory CSV uses shortest round-trip float
//! formatting, which makes byte-identical regression baselines possible.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cotangent::BergerSasakiConfig;
use crate::error::{Error, Result};
use crate::geodesic::{
    geodesic_residual, integrate_horizontal_lift, integrate_total_space, integrate_unit_bundle,
    invariant_report, BundleMode, GeodesicState, GeodesicTrajectory, InvariantReport, ResidualReport,
};
use crate::ode::StepPolicy;
use crate::oracle::{oracle_comparison, OracleReport};
use crate::registry::{example_curve, lookup, ExampleCurveKind, ExampleCurveParams, ManifoldEntry};

/// Experiment mode; selects which system is integrated or which check runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TotalSpace,
    UnitBundle,
    HorizontalLift,
    ResidualCheck,
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorKind {
    #[default]
    Rk4,
    Rk45,
}

/// Initial data `(x₀, p₀, u₀, v₀)` for the trajectory modes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialData {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub u: Vec<f64>,
    #[serde(default)]
    pub v: Vec<f64>,
}

/// Closed-form curve selection for `residual_check` mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveConfig {
    pub family: ExampleCurveKind,
    #[serde(flatten)]
    pub params: ExampleCurveParams,
}

/// Pass/fail thresholds carried into the reports.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// conserved-quantity drift on trajectory runs
    pub drift: f64,
    /// `| |γ'| − √(1−K) |` on unit-bundle runs
    pub speed_identity: f64,
    /// geodesic residual (relative to the report's scale)
    pub residual: f64,
    /// closed-form vs. oracle relative deviation
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift: 1e-7,
            speed_identity: 1e-6,
            residual: 1e-6,
            oracle: 1e-5,
        }
    }
}

fn default_t_span() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_step() -> f64 {
    1e-3
}

fn default_atol() -> f64 {
    1e-10
}

fn default_rtol() -> f64 {
    1e-10
}

fn default_samples() -> usize {
    101
}

fn default_oracle_configurations() -> usize {
    100
}

/// A reproducible experiment: manifold, deformation constant, mode, numerics.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub manifold: String,
    pub delta: f64,
    pub mode: Mode,
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default)]
    pub curve: Option<CurveConfig>,
    #[serde(default = "default_t_span")]
    pub t_span: [f64; 2],
    #[serde(default)]
    pub integrator: IntegratorKind,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub renormalize: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_oracle_configurations")]
    pub oracle_configurations: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(vec![e.to_string()]))?;
        Ok(config)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }
}

/// Result bundle of one run: written files plus a pass/fail verdict.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub passed: bool,
    pub outputs: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn validation_errors(config: &ExperimentConfig, entry: &ManifoldEntry) -> Vec<String> {
    let mut errors = Vec::new();
    if config.t_span[1] <= config.t_span[0] {
        errors.push(format!("t_span must be increasing, got {:?}", config.t_span));
    }
    if config.step <= 0.0 {
        errors.push(format!("step must be positive, got {}", config.step));
    }
    if config.samples < 2 {
        errors.push(format!("samples must be at least 2, got {}", config.samples));
    }
    let needs_initial = matches!(config.mode, Mode::TotalSpace | Mode::UnitBundle | Mode::HorizontalLift);
    if needs_initial {
        match &config.initial {
            None => errors.push("trajectory modes require the `initial` block".to_string()),
            Some(init) => {
                let n = entry.dim;
                for (name, vec) in [("x", &init.x), ("p", &init.p), ("u", &init.u)] {
                    if vec.len() != n {
                        errors.push(format!("initial.{name} must have {n} components, got {}", vec.len()));
                    }
                }
                if !init.v.is_empty() && init.v.len() != n {
                    errors.push(format!("initial.v must have {n} components, got {}", init.v.len()));
                }
            }
        }
    }
    if config.mode == Mode::ResidualCheck {
        if config.curve.is_none() {
            errors.push("residual_check mode requires the `curve` block".to_string());
        }
        if !entry.closed_form_geodesics {
            errors.push(format!("manifold `{}` has no closed-form geodesics", entry.id));
        }
    }
    errors
}

fn initial_state(config: &ExperimentConfig, entry: &ManifoldEntry) -> GeodesicState {
    let init = config.initial.as_ref().expect("validated");
    let n = entry.dim;
    let v = if init.v.is_empty() {
        DVector::zeros(n)
    } else {
        DVector::from_vec(init.v.clone())
    };
    GeodesicState::new(
        DVector::from_vec(init.x.clone()),
        DVector::from_vec(init.p.clone()),
        DVector::from_vec(init.u.clone()),
        v,
    )
}

fn step_policy(config: &ExperimentConfig) -> StepPolicy {
    match config.integrator {
        IntegratorKind::Rk4 => StepPolicy::FixedRk4 { h: config.step },
        IntegratorKind::Rk45 => StepPolicy::AdaptiveRk45 {
            h0: config.step,
            atol: config.atol,
            rtol: config.rtol,
            min_step: 1e-12,
        },
    }
}

fn output_root(config: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = &config.out_dir {
        return dir.clone();
    }
    if let Ok(dir) = std::env::var("BSG_OUT_DIR") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from(".")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Trajectory CSV: `t, x1..x2m, p1..p2m, u1..u2m, v1..v2m, kappa, mu, K,
/// speed, r2, orth`, one row per sample, shortest round-trip decimals.
fn trajectory_csv(trajectory: &GeodesicTrajectory, invariants: &InvariantReport) -> String {
    let n = trajectory.states[0].dim();
    let mut out = String::from("t");
    for (prefix, _) in [("x", 0), ("p", 0), ("u", 0), ("v", 0)] {
        for i in 1..=n {
            out.push_str(&format!(",{prefix}{i}"));
        }
    }
    out.push_str(",kappa,mu,K,speed,r2,orth\n");
    for (k, state) in trajectory.states.iter().enumerate() {
        out.push_str(&format!("{}", trajectory.times[k]));
        for block in [&state.x, &state.p, &state.u, &state.v] {
            for value in block.iter() {
                out.push_str(&format!(",{value}"));
            }
        }
        out.push_str(&format!(
            ",{},{},{},{},{},{}\n",
            invariants.kappa[k],
            invariants.mu[k],
            invariants.big_k[k],
            invariants.speed[k],
            invariants.r2[k],
            invariants.orth[k],
        ));
    }
    out
}

#[derive(Serialize)]
struct InvariantDocument<'a> {
    manifold: &'a str,
    delta: f64,
    seed: u64,
    tolerances: Tolerances,
    passed: bool,
    #[serde(flatten)]
    report: &'a InvariantReport,
}

#[derive(Serialize)]
struct ResidualDocument<'a> {
    manifold: &'a str,
    delta: f64,
    tolerance: f64,
    passed: bool,
    #[serde(flatten)]
    report: &'a ResidualReport,
}

#[derive(Serialize)]
struct OracleDocument<'a> {
    manifold: &'a str,
    #[serde(flatten)]
    report: &'a OracleReport,
}

/// Runs one experiment, writes its outputs, and reports pass/fail against the
/// configured tolerances.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let entry = lookup(&config.manifold)?;
    let errors = validation_errors(config, entry);
    if !errors.is_empty() {
        return Err(Error::ConfigInvalid(errors));
    }
    let chart = entry.chart();
    let cfg = BergerSasakiConfig::new(&chart, config.delta);
    let tol = config.tolerances();
    let root = output_root(config);
    let policy = step_policy(config);
    let span = (config.t_span[0], config.t_span[1]);

    let mut outputs = Vec::new();
    let mut summary = Vec::new();

    let passed = match config.mode {
        Mode::TotalSpace | Mode::UnitBundle | Mode::HorizontalLift => {
            let state0 = initial_state(config, entry);
            if config.mode == Mode::UnitBundle {
                let mut errors = Vec::new();
                let r2 = cfg.r_squared(&state0.cotangent_point()).map_err(config_err)?;
                if (r2 - 1.0).abs() >= 1e-9 {
                    errors.push(format!("unit_bundle mode needs |g^-1(p,p) - 1| < 1e-9, got {:e}", (r2 - 1.0).abs()));
                }
                let orth = chart
                    .inner_inv(&state0.x, &state0.v, &state0.p)
                    .map_err(config_err)?;
                if orth.abs() >= 1e-9 {
                    errors.push(format!("unit_bundle mode needs |g^-1(v,p)| < 1e-9, got {:e}", orth.abs()));
                }
                if !errors.is_empty() {
                    return Err(Error::ConfigInvalid(errors));
                }
            }
            let trajectory = match config.mode {
                Mode::TotalSpace => integrate_total_space(&cfg, &state0, span, config.samples, &policy)?,
                Mode::UnitBundle => {
                    integrate_unit_bundle(&cfg, &state0, span, config.samples, &policy, config.renormalize)?
                }
                _ => integrate_horizontal_lift(&cfg, &state0, span, config.samples, &policy)?,
            };
            let invariants = invariant_report(&cfg, &trajectory)?;

            let passed = match config.mode {
                Mode::UnitBundle => {
                    let drift_ok = invariants.drift.kappa < tol.drift
                        && invariants.drift.mu < tol.drift
                        && invariants.drift.r2 < tol.drift
                        && invariants.drift.orth < tol.drift;
                    let speed_ok = invariants
                        .speed_identity_max
                        .map(|v| v < tol.speed_identity)
                        .unwrap_or(false);
                    drift_ok && speed_ok
                }
                Mode::TotalSpace => invariants.drift.bs_speed < tol.drift,
                _ => invariants.drift.r2 < tol.drift,
            };

            let csv_path = root.join("trajectory.csv");
            write_atomic(&csv_path, trajectory_csv(&trajectory, &invariants).as_bytes())?;
            outputs.push(csv_path);
            let json_path = root.join("invariants.json");
            write_json(
                &json_path,
                &InvariantDocument {
                    manifold: entry.id,
                    delta: config.delta,
                    seed: config.seed,
                    tolerances: tol,
                    passed,
                    report: &invariants,
                },
            )?;
            outputs.push(json_path);
            summary.push(format!(
                "drift: kappa {:.3e}, mu {:.3e}, r2 {:.3e}, orth {:.3e}, bs_speed {:.3e}",
                invariants.drift.kappa,
                invariants.drift.mu,
                invariants.drift.r2,
                invariants.drift.orth,
                invariants.drift.bs_speed,
            ));
            if let Some(gap) = invariants.speed_identity_max {
                summary.push(format!("max | |γ'| − √(1−K) | = {gap:.3e}"));
            }
            passed
        }
        Mode::ResidualCheck => {
            let curve = config.curve.as_ref().expect("validated");
            let ts: Vec<f64> = (0..config.samples)
                .map(|k| span.0 + (span.1 - span.0) * k as f64 / (config.samples - 1) as f64)
                .collect();
            let mut gammas = Vec::with_capacity(ts.len());
            let mut thetas = Vec::with_capacity(ts.len());
            for &t in &ts {
                let (g, th) = example_curve(curve.family, &curve.params, t);
                gammas.push(g);
                thetas.push(th);
            }
            let report = geodesic_residual(&cfg, &ts, &gammas, &thetas, BundleMode::TotalSpace)?;
            let passed = report.max < tol.residual * report.scale;
            let path = root.join("residuals.json");
            write_json(
                &path,
                &ResidualDocument {
                    manifold: entry.id,
                    delta: config.delta,
                    tolerance: tol.residual,
                    passed,
                    report: &report,
                },
            )?;
            outputs.push(path);
            summary.push(format!(
                "residual max {:.3e} (scale {:.3}, tolerance {:.1e}·scale)",
                report.max, report.scale, tol.residual
            ));
            passed
        }
        Mode::OracleCheck => {
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| entry.sample_point(rng);
            let report = oracle_comparison(&cfg, &sample, config.seed, config.oracle_configurations, tol.oracle)?;
            let passed = report.passed;
            let path = root.join("oracle.json");
            write_json(
                &path,
                &OracleDocument {
                    manifold: entry.id,
                    report: &report,
                },
            )?;
            outputs.push(path);
            summary.push(format!(
                "oracle deviation max: connection {:.3e}, liouville {:.3e}, unit {:.3e}, metric {:.3e}",
                report.connection.max, report.liouville.max, report.unit_connection.max, report.metric_frame.max
            ));
            passed
        }
    };

    Ok(RunReport {
        passed,
        outputs,
        summary,
    })
}

fn config_err(e: Error) -> Error {
    match e {
        Error::OutOfChart { point } => {
            Error::ConfigInvalid(vec![format!("initial point {point} is outside the chart domain")])
        }
        other => other,
    }
}
