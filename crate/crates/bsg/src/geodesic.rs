//! Geodesic flows of the deformed metric, on the full cotangent bundle and on
//! the unit cotangent bundle, plus the diagnostic reports built from them.
//!
//! The first-order state is `(x, p, u, v)` where `u = γ'` is the base velocity
//! and `v = ϑ' = ∇_{γ'}ϑ` is the covariant fiber velocity; the fiber coordinate
//! itself evolves by `dp_h/dt = v_h + Γ^i_{jh} p_i u^j`. With
//! `ℛ(ṽ, p̃) = R(ṽ, p̃) + δ² g⁻¹(v, pJ) R(p̃, Jp̃)`, the total-space geodesic
//! equations are
//!
//! ```text
//! γ'' = ℛ(ṽ, p̃) γ'
//! ϑ'' = 2δ² g⁻¹(v, pJ) [ (δ²/λ) g⁻¹(v, p) pJ − vJ ]
//! ```
//!
//! On the unit bundle the tangential fiber equation is `T(ϑ'' + 2δ²μ vJ) = 0`
//! with `μ = g⁻¹(v, pJ)`; the component of `ϑ''` along `p` is not free but
//! forced by the constraints `g⁻¹(p, p) = 1`, `g⁻¹(v, p) = 0` to
//! `−(κ² + 2δ²μ²)`, so the integrated equation is
//!
//! ```text
//! ϑ'' = −2δ²μ vJ − ((κ² + 2δ²μ²)/r²) p,     κ² = g⁻¹(v, v).
//! ```
//!
//! Along its solutions κ, μ, and `K = κ² + δ²μ²` are conserved and
//! `|γ'| = √(1 − K)` when the curve is parameterized by arc length.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chart::GeometryCache;
use crate::cotangent::{BergerSasakiConfig, CotangentPoint, UNIT_TOLERANCE};
use crate::curve::{covariant_derivative_along, time_derivative, CurveField};
use crate::error::{Error, Result};
use crate::ode::{integrate, StepPolicy};

/// Guard on `|r² − 1|` inside the unit-bundle right-hand side. Much looser
/// than the membership tolerance: Runge–Kutta stage states leave the bundle
/// at O(h²), so the RHS only rejects grossly invalid inputs; membership of the
/// initial data is enforced separately at 1e-9.
const UNIT_DRIFT_GUARD: f64 = 1e-3;

/// First-order geodesic state `(x, p, u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub x: DVector<f64>,
    pub p: DVector<f64>,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
}

impl GeodesicState {
    pub fn new(x: DVector<f64>, p: DVector<f64>, u: DVector<f64>, v: DVector<f64>) -> Self {
        assert!(x.len() == p.len() && x.len() == u.len() && x.len() == v.len());
        GeodesicState { x, p, u, v }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn cotangent_point(&self) -> CotangentPoint {
        CotangentPoint::new(self.x.clone(), self.p.clone())
    }

    pub fn pack(&self) -> DVector<f64> {
        let n = self.dim();
        let mut y = DVector::zeros(4 * n);
        y.rows_mut(0, n).copy_from(&self.x);
        y.rows_mut(n, n).copy_from(&self.p);
        y.rows_mut(2 * n, n).copy_from(&self.u);
        y.rows_mut(3 * n, n).copy_from(&self.v);
        y
    }

    pub fn unpack(n: usize, y: &DVector<f64>) -> Self {
        GeodesicState {
            x: DVector::from(y.rows(0, n)),
            p: DVector::from(y.rows(n, n)),
            u: DVector::from(y.rows(2 * n, n)),
            v: DVector::from(y.rows(3 * n, n)),
        }
    }
}

/// Which geodesic system a trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleMode {
    TotalSpace,
    UnitBundle,
}

/// Squared length of the curve velocity in the deformed metric,
/// `g(u,u) + g⁻¹(v,v) + δ² g⁻¹(v, pJ)²`.
pub fn bs_speed_squared(cfg: &BergerSasakiConfig, state: &GeodesicState) -> Result<f64> {
    let cache = GeometryCache::new(cfg.chart(), &state.x)?;
    let j = cfg.chart().complex_structure_at(&state.x)?;
    let pj = j.transpose() * &state.p;
    let d2 = cfg.delta * cfg.delta;
    Ok(cache.inner(&state.u, &state.u)
        + cache.inner_inv(&state.v, &state.v)
        + d2 * cache.inner_inv(&state.v, &pj).powi(2))
}

/// Right-hand side of the total-space geodesic system.
pub fn total_space_rhs(cfg: &BergerSasakiConfig, state: &GeodesicState) -> Result<GeodesicState> {
    let cache = GeometryCache::with_curvature(cfg.chart(), &state.x)?;
    let j = cfg.chart().complex_structure_at(&state.x)?;
    let pj = j.transpose() * &state.p;
    let vj = j.transpose() * &state.v;
    let d2 = cfg.delta * cfg.delta;

    let mu = cache.inner_inv(&state.v, &pj);
    let orth = cache.inner_inv(&state.v, &state.p);
    let r2 = cache.inner_inv(&state.p, &state.p);
    let lambda = 1.0 + d2 * r2;

    let cal_r = cfg.cal_r_with(&cache, &state.v, &state.p);
    let du = -cache.gamma.quadratic(&state.u, &state.u) + &cal_r * &state.u;
    let dp = &state.v + cache.gamma.covector_term(&state.p, &state.u);
    let theta_dd = (&pj * (d2 / lambda * orth) - vj) * (2.0 * d2 * mu);
    let dv = cache.gamma.covector_term(&state.v, &state.u) + theta_dd;

    Ok(GeodesicState::new(state.u.clone(), dp, du, dv))
}

/// Right-hand side of the unit-bundle geodesic system (see the module docs for
/// the constraint-consistent fiber equation).
pub fn unit_bundle_rhs(cfg: &BergerSasakiConfig, state: &GeodesicState) -> Result<GeodesicState> {
    let cache = GeometryCache::with_curvature(cfg.chart(), &state.x)?;
    let j = cfg.chart().complex_structure_at(&state.x)?;
    let pj = j.transpose() * &state.p;
    let vj = j.transpose() * &state.v;
    let d2 = cfg.delta * cfg.delta;

    let r2 = cache.inner_inv(&state.p, &state.p);
    let deviation = (r2 - 1.0).abs();
    if deviation > UNIT_DRIFT_GUARD {
        return Err(Error::NotOnUnitBundle { deviation });
    }
    let mu = cache.inner_inv(&state.v, &pj);
    let kappa2 = cache.inner_inv(&state.v, &state.v);

    let cal_r = cfg.cal_r_with(&cache, &state.v, &state.p);
    let du = -cache.gamma.quadratic(&state.u, &state.u) + &cal_r * &state.u;
    let dp = &state.v + cache.gamma.covector_term(&state.p, &state.u);
    let theta_dd = vj * (-2.0 * d2 * mu) - &state.p * ((kappa2 + 2.0 * d2 * mu * mu) / r2);
    let dv = cache.gamma.covector_term(&state.v, &state.u) + theta_dd;

    Ok(GeodesicState::new(state.u.clone(), dp, du, dv))
}

/// Parallel-transport equation for the fiber along a base curve:
/// `dp_h/dt = Γ^i_{jh} p_i u^j`.
pub fn horizontal_lift_rhs(cfg: &BergerSasakiConfig, x: &DVector<f64>, u: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
    let gamma = cfg.chart().christoffel_at(x)?;
    Ok(gamma.covector_term(p, u))
}

/// A sampled geodesic run.
#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub mode: BundleMode,
    pub times: Vec<f64>,
    pub states: Vec<GeodesicState>,
    pub renormalized: bool,
}

impl GeodesicTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn xs(&self) -> Vec<DVector<f64>> {
        self.states.iter().map(|s| s.x.clone()).collect()
    }

    pub fn us(&self) -> Vec<DVector<f64>> {
        self.states.iter().map(|s| s.u.clone()).collect()
    }

    pub fn ps(&self) -> Vec<DVector<f64>> {
        self.states.iter().map(|s| s.p.clone()).collect()
    }

    pub fn vs(&self) -> Vec<DVector<f64>> {
        self.states.iter().map(|s| s.v.clone()).collect()
    }
}

/// Integrates the total-space geodesic system.
pub fn integrate_total_space(
    cfg: &BergerSasakiConfig,
    initial: &GeodesicState,
    t_span: (f64, f64),
    samples: usize,
    policy: &StepPolicy,
) -> Result<GeodesicTrajectory> {
    let n = cfg.dim();
    let rhs = |_t: f64, y: &DVector<f64>| -> Result<DVector<f64>> {
        let state = GeodesicState::unpack(n, y);
        Ok(total_space_rhs(cfg, &state)?.pack())
    };
    let raw = integrate(&rhs, &initial.pack(), t_span, samples, policy, None)?;
    Ok(GeodesicTrajectory {
        mode: BundleMode::TotalSpace,
        times: raw.times,
        states: raw.states.iter().map(|y| GeodesicState::unpack(n, y)).collect(),
        renormalized: false,
    })
}

/// Integrates the unit-bundle geodesic system. With `renormalize` set, after
/// every accepted step the fiber is rescaled to `r² = 1` and the fiber
/// velocity re-orthogonalized against `p`; the flag is recorded in the output.
pub fn integrate_unit_bundle(
    cfg: &BergerSasakiConfig,
    initial: &GeodesicState,
    t_span: (f64, f64),
    samples: usize,
    policy: &StepPolicy,
    renormalize: bool,
) -> Result<GeodesicTrajectory> {
    let n = cfg.dim();
    let r2 = cfg.r_squared(&initial.cotangent_point())?;
    if (r2 - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotOnUnitBundle { deviation: (r2 - 1.0).abs() });
    }
    let rhs = |_t: f64, y: &DVector<f64>| -> Result<DVector<f64>> {
        let state = GeodesicState::unpack(n, y);
        Ok(unit_bundle_rhs(cfg, &state)?.pack())
    };
    let hook = |y: &mut DVector<f64>| -> Result<()> {
        let mut state = GeodesicState::unpack(n, y);
        let cache = GeometryCache::new(cfg.chart(), &state.x)?;
        let r = cache.inner_inv(&state.p, &state.p).sqrt();
        state.p /= r;
        let coeff = cache.inner_inv(&state.v, &state.p);
        state.v -= &state.p * coeff;
        *y = state.pack();
        Ok(())
    };
    let post: Option<&dyn Fn(&mut DVector<f64>) -> Result<()>> =
        if renormalize { Some(&hook) } else { None };
    let raw = integrate(&rhs, &initial.pack(), t_span, samples, policy, post)?;
    Ok(GeodesicTrajectory {
        mode: BundleMode::UnitBundle,
        times: raw.times,
        states: raw.states.iter().map(|y| GeodesicState::unpack(n, y)).collect(),
        renormalized: renormalize,
    })
}

/// Integrates the horizontal-lift system: a base geodesic with the fiber
/// parallel-transported along it (`v ≡ 0`).
pub fn integrate_horizontal_lift(
    cfg: &BergerSasakiConfig,
    initial: &GeodesicState,
    t_span: (f64, f64),
    samples: usize,
    policy: &StepPolicy,
) -> Result<GeodesicTrajectory> {
    let n = cfg.dim();
    let rhs = |_t: f64, y: &DVector<f64>| -> Result<DVector<f64>> {
        let state = GeodesicState::unpack(n, y);
        let gamma = cfg.chart().christoffel_at(&state.x)?;
        let du = -gamma.quadratic(&state.u, &state.u);
        let dp = gamma.covector_term(&state.p, &state.u);
        Ok(GeodesicState::new(state.u.clone(), dp, du, DVector::zeros(n)).pack())
    };
    let mut start = initial.clone();
    start.v = DVector::zeros(n);
    let raw = integrate(&rhs, &start.pack(), t_span, samples, policy, None)?;
    Ok(GeodesicTrajectory {
        mode: BundleMode::TotalSpace,
        times: raw.times,
        states: raw.states.iter().map(|y| GeodesicState::unpack(n, y)).collect(),
        renormalized: false,
    })
}

/// Maximum absolute deviation of each monitored quantity from its initial
/// value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftStats {
    pub kappa: f64,
    pub mu: f64,
    pub big_k: f64,
    pub speed: f64,
    pub r2: f64,
    pub orth: f64,
    pub bs_speed: f64,
}

/// Time series of the conserved/diagnostic quantities along a trajectory and
/// their drifts: `κ = |ϑ'|`, `μ = g⁻¹(ϑ', ϑJ)`, `K = κ² + δ²μ²`, the base
/// speed `|γ'|`, the fiber norm `r²`, the orthogonality `g⁻¹(ϑ', ϑ)`, and the
/// full deformed-metric speed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReport {
    pub mode: BundleMode,
    pub renormalized: bool,
    pub times: Vec<f64>,
    pub kappa: Vec<f64>,
    pub mu: Vec<f64>,
    pub big_k: Vec<f64>,
    pub speed: Vec<f64>,
    pub r2: Vec<f64>,
    pub orth: Vec<f64>,
    pub bs_speed: Vec<f64>,
    pub drift: DriftStats,
    /// `max_t | |γ'|(t) − √(1 − K(0)) |`; meaningful for unit-bundle runs with
    /// `K(0) ≤ 1`.
    pub speed_identity_max: Option<f64>,
}

pub fn invariant_report(cfg: &BergerSasakiConfig, trajectory: &GeodesicTrajectory) -> Result<InvariantReport> {
    let n = trajectory.len();
    let d2 = cfg.delta * cfg.delta;
    let mut kappa = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    let mut big_k = Vec::with_capacity(n);
    let mut speed = Vec::with_capacity(n);
    let mut r2 = Vec::with_capacity(n);
    let mut orth = Vec::with_capacity(n);
    let mut bs_speed = Vec::with_capacity(n);

    for state in &trajectory.states {
        let cache = GeometryCache::new(cfg.chart(), &state.x)?;
        let j = cfg.chart().complex_structure_at(&state.x)?;
        let pj = j.transpose() * &state.p;
        let k = cache.norm_inv(&state.v);
        let m = cache.inner_inv(&state.v, &pj);
        kappa.push(k);
        mu.push(m);
        big_k.push(k * k + d2 * m * m);
        speed.push(cache.norm(&state.u));
        r2.push(cache.inner_inv(&state.p, &state.p));
        orth.push(cache.inner_inv(&state.v, &state.p));
        bs_speed.push((k * k + d2 * m * m + cache.inner(&state.u, &state.u)).max(0.0).sqrt());
    }

    let drift = DriftStats {
        kappa: max_drift(&kappa),
        mu: max_drift(&mu),
        big_k: max_drift(&big_k),
        speed: max_drift(&speed),
        r2: max_drift(&r2),
        orth: max_drift(&orth),
        bs_speed: max_drift(&bs_speed),
    };
    let speed_identity_max = if trajectory.mode == BundleMode::UnitBundle && big_k[0] <= 1.0 {
        let target = (1.0 - big_k[0]).sqrt();
        Some(
            speed
                .iter()
                .map(|s| (s - target).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };

    Ok(InvariantReport {
        mode: trajectory.mode,
        renormalized: trajectory.renormalized,
        times: trajectory.times.clone(),
        kappa,
        mu,
        big_k,
        speed,
        r2,
        orth,
        bs_speed,
        drift,
        speed_identity_max,
    })
}

fn max_drift(series: &[f64]) -> f64 {
    let first = series[0];
    series.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
}

/// Per-sample geodesic-equation residuals of a given sampled curve
/// `(γ(t_k), ϑ(t_k))`. All derivatives are taken numerically from the samples,
/// so this checks a curve, not an integrator. For `BundleMode::UnitBundle` the
/// fiber residual is the tangential part of `ϑ'' + 2δ²μ ϑ'J`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub mode: BundleMode,
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
    pub max_horizontal: f64,
    pub max_vertical: f64,
    pub max: f64,
    /// size guard used to express tolerances: `1 + max |γ'|² + max r²`
    pub scale: f64,
}

pub fn geodesic_residual(
    cfg: &BergerSasakiConfig,
    ts: &[f64],
    gammas: &[DVector<f64>],
    thetas: &[DVector<f64>],
    mode: BundleMode,
) -> Result<ResidualReport> {
    let n = ts.len();
    if n < 7 {
        return Err(Error::GridTooCoarse { got: n, need: 7 });
    }
    let chart = cfg.chart();
    let d2 = cfg.delta * cfg.delta;

    let us = time_derivative(ts, gammas)?;
    let gamma_dd = match covariant_derivative_along(chart, ts, gammas, &us, &CurveField::Vectors(us.clone()))? {
        CurveField::Vectors(v) => v,
        _ => unreachable!(),
    };
    let theta_d = match covariant_derivative_along(chart, ts, gammas, &us, &CurveField::Covectors(thetas.to_vec()))? {
        CurveField::Covectors(v) => v,
        _ => unreachable!(),
    };
    let theta_dd = match covariant_derivative_along(chart, ts, gammas, &us, &CurveField::Covectors(theta_d.clone()))? {
        CurveField::Covectors(v) => v,
        _ => unreachable!(),
    };

    let mut horizontal = Vec::with_capacity(n);
    let mut vertical = Vec::with_capacity(n);
    let mut scale: f64 = 1.0;
    for k in 0..n {
        let cache = GeometryCache::with_curvature(chart, &gammas[k])?;
        let j = chart.complex_structure_at(&gammas[k])?;
        let pj = j.transpose() * &thetas[k];
        let vj = j.transpose() * &theta_d[k];
        let mu = cache.inner_inv(&theta_d[k], &pj);
        let orth = cache.inner_inv(&theta_d[k], &thetas[k]);
        let r2 = cache.inner_inv(&thetas[k], &thetas[k]);
        let lambda = 1.0 + d2 * r2;

        let cal_r = cfg.cal_r_with(&cache, &theta_d[k], &thetas[k]);
        let res_h = &gamma_dd[k] - &cal_r * &us[k];
        horizontal.push(cache.norm(&res_h));

        let res_v = match mode {
            BundleMode::TotalSpace => {
                &theta_dd[k] - (&pj * (d2 / lambda * orth) - &vj) * (2.0 * d2 * mu)
            }
            BundleMode::UnitBundle => {
                let w = &theta_dd[k] + &vj * (2.0 * d2 * mu);
                let coeff = cache.inner_inv(&w, &thetas[k]) / r2;
                w - &thetas[k] * coeff
            }
        };
        vertical.push(cache.norm_inv(&res_v));

        scale = scale.max(1.0 + cache.inner(&us[k], &us[k]) + r2);
    }

    let max_horizontal = horizontal.iter().cloned().fold(0.0, f64::max);
    let max_vertical = vertical.iter().cloned().fold(0.0, f64::max);
    Ok(ResidualReport {
        mode,
        max: max_horizontal.max(max_vertical),
        max_horizontal,
        max_vertical,
        horizontal,
        vertical,
        scale,
    })
}

/// Covariant derivative of the deformed curvature operator `ℛ(ϑ̃', ϑ̃)` along
/// the projected curve, reported per sample relative to `‖ℛ‖`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParallelismReport {
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
    pub operator_norm: Vec<f64>,
    pub max_residual: f64,
    pub max_operator_norm: f64,
}

pub fn parallelism_residual(cfg: &BergerSasakiConfig, trajectory: &GeodesicTrajectory) -> Result<ParallelismReport> {
    let n = trajectory.len();
    if n < 5 {
        return Err(Error::GridTooCoarse { got: n, need: 5 });
    }
    let chart = cfg.chart();
    let xs = trajectory.xs();
    let us = trajectory.us();

    let mut operators = Vec::with_capacity(n);
    for state in &trajectory.states {
        let cache = GeometryCache::with_curvature(chart, &state.x)?;
        operators.push(cfg.cal_r_with(&cache, &state.v, &state.p));
    }
    let derivative = match covariant_derivative_along(
        chart,
        &trajectory.times,
        &xs,
        &us,
        &CurveField::Tensors(operators.clone()),
    )? {
        CurveField::Tensors(v) => v,
        _ => unreachable!(),
    };

    let frobenius = |m: &DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let residual: Vec<f64> = derivative.iter().map(&frobenius).collect();
    let operator_norm: Vec<f64> = operators.iter().map(&frobenius).collect();
    Ok(ParallelismReport {
        times: trajectory.times.clone(),
        max_residual: residual.iter().cloned().fold(0.0, f64::max),
        max_operator_norm: operator_norm.iter().cloned().fold(0.0, f64::max),
        residual,
        operator_norm,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureStats {
    pub mean: f64,
    pub std: f64,
    pub std_over_mean: f64,
}

/// Frenet curvatures of the projected base curve of a unit-bundle geodesic,
/// computed at the trajectory samples after reparameterizing to arc length
/// with the constant rate `ds/dt = √(1 − K)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrenetReport {
    pub times: Vec<f64>,
    /// `ds/dt = √(1 − K(0))`
    pub arc_rate: f64,
    /// one series per curvature `k_i`
    pub curvatures: Vec<Vec<f64>>,
    pub constancy: Vec<CurvatureStats>,
    pub frame_size: usize,
    pub rank_truncated: bool,
    pub orthonormality_max: f64,
}

/// Relative rank tolerance for truncating the Frenet frame.
const FRENET_RANK_TOLERANCE: f64 = 1e-8;

pub fn frenet_curvatures(cfg: &BergerSasakiConfig, trajectory: &GeodesicTrajectory) -> Result<FrenetReport> {
    let n = trajectory.len();
    if n < 5 {
        return Err(Error::GridTooCoarse { got: n, need: 5 });
    }
    let chart = cfg.chart();
    let dim = cfg.dim();
    let d2 = cfg.delta * cfg.delta;
    let xs = trajectory.xs();
    let us = trajectory.us();

    // K from the initial state fixes the arc-length rate
    let first = &trajectory.states[0];
    let cache0 = GeometryCache::new(chart, &first.x)?;
    let j0 = chart.complex_structure_at(&first.x)?;
    let kappa2 = cache0.inner_inv(&first.v, &first.v);
    let mu = cache0.inner_inv(&first.v, &(j0.transpose() * &first.p));
    let big_k = kappa2 + d2 * mu * mu;
    if 1.0 - big_k < 1e-10 {
        return Err(Error::DegenerateSpeed { value: 1.0 - big_k });
    }
    let arc_rate = (1.0 - big_k).sqrt();

    let caches: Vec<GeometryCache> = xs
        .iter()
        .map(|x| GeometryCache::new(chart, x))
        .collect::<Result<_>>()?;

    // ν₁ = γ'/|γ'|
    let mut frame: Vec<Vec<DVector<f64>>> = Vec::new();
    frame.push(
        (0..n)
            .map(|k| {
                let norm = caches[k].norm(&us[k]);
                &us[k] / norm
            })
            .collect(),
    );

    let mut curvatures: Vec<Vec<f64>> = Vec::new();
    let mut rank_truncated = false;

    // Frenet recursion: (ν_i)'_s + k_{i−1} ν_{i−1} = k_i ν_{i+1}
    for i in 0..(dim - 1) {
        let derivative = match covariant_derivative_along(
            chart,
            &trajectory.times,
            &xs,
            &us,
            &CurveField::Vectors(frame[i].clone()),
        )? {
            CurveField::Vectors(v) => v,
            _ => unreachable!(),
        };
        let w: Vec<DVector<f64>> = (0..n)
            .map(|k| {
                let mut wk = &derivative[k] / arc_rate;
                if i > 0 {
                    let ki_prev = curvatures[i - 1][k];
                    wk += &frame[i - 1][k] * ki_prev;
                }
                wk
            })
            .collect();
        let k_series: Vec<f64> = (0..n).map(|k| caches[k].norm(&w[k])).collect();
        let mean = k_series.iter().sum::<f64>() / n as f64;
        if mean <= FRENET_RANK_TOLERANCE {
            rank_truncated = true;
            break;
        }
        frame.push((0..n).map(|k| &w[k] / k_series[k]).collect());
        curvatures.push(k_series);
    }

    let constancy = curvatures
        .iter()
        .map(|series| {
            let mean = series.iter().sum::<f64>() / n as f64;
            let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            CurvatureStats {
                mean,
                std,
                std_over_mean: if mean.abs() > 0.0 { std / mean.abs() } else { 0.0 },
            }
        })
        .collect();

    let mut orthonormality_max: f64 = 0.0;
    for k in 0..n {
        for a in 0..frame.len() {
            for b in a..frame.len() {
                let target = if a == b { 1.0 } else { 0.0 };
                let value = caches[k].inner(&frame[a][k], &frame[b][k]);
                orthonormality_max = orthonormality_max.max((value - target).abs());
            }
        }
    }

    Ok(FrenetReport {
        times: trajectory.times.clone(),
        arc_rate,
        curvatures,
        constancy,
        frame_size: frame.len(),
        rank_truncated,
        orthonormality_max,
    })
}

/// Rotates unit-bundle initial data by the complex structure: `p ↦ pJ`,
/// `v ↦ vJ`. Unit-bundle membership is preserved because the covector action
/// preserves `g⁻¹`.
pub fn j_rotate_initial_data(cfg: &BergerSasakiConfig, state: &GeodesicState) -> Result<GeodesicState> {
    let r2 = cfg.r_squared(&state.cotangent_point())?;
    let deviation = (r2 - 1.0).abs();
    if deviation > UNIT_TOLERANCE {
        return Err(Error::NotOnUnitBundle { deviation });
    }
    let j = cfg.chart().complex_structure_at(&state.x)?;
    Ok(GeodesicState::new(
        state.x.clone(),
        j.transpose() * &state.p,
        state.u.clone(),
        j.transpose() * &state.v,
    ))
}
