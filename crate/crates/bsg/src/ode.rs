//! Fixed-step RK4 and adaptive Dormand–Prince 5(4) integration.
//!
//! Both integrators march segment by segment between the requested sample
//! times, so dense output lands exactly on the samples. The fixed-step
//! integrator subdivides each segment into `ceil(len / h)` equal substeps
//! (the effective step never exceeds the requested one); the adaptive
//! integrator clips its step at segment ends and controls the error with the
//! usual mixed absolute/relative norm.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Step-size policy for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepPolicy {
    FixedRk4 { h: f64 },
    AdaptiveRk45 { h0: f64, atol: f64, rtol: f64, min_step: f64 },
}

impl StepPolicy {
    pub fn rk4(h: f64) -> Self {
        StepPolicy::FixedRk4 { h }
    }

    pub fn rk45(atol: f64, rtol: f64) -> Self {
        StepPolicy::AdaptiveRk45 {
            h0: 1e-3,
            atol,
            rtol,
            min_step: 1e-12,
        }
    }
}

/// Dense output of an integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

/// Integrates `y' = rhs(t, y)` over `t_span`, reporting `samples` states at
/// uniformly spaced times (endpoints included). `post_step` runs after every
/// accepted step (used for constraint renormalization).
pub fn integrate(
    rhs: &dyn Fn(f64, &DVector<f64>) -> Result<DVector<f64>>,
    y0: &DVector<f64>,
    t_span: (f64, f64),
    samples: usize,
    policy: &StepPolicy,
    post_step: Option<&dyn Fn(&mut DVector<f64>) -> Result<()>>,
) -> Result<Trajectory> {
    assert!(samples >= 2, "need at least the two endpoint samples");
    let (t0, t1) = t_span;
    assert!(t1 > t0, "t_span must be increasing");

    let sample_times: Vec<f64> = (0..samples)
        .map(|k| t0 + (t1 - t0) * k as f64 / (samples - 1) as f64)
        .collect();

    let mut times = Vec::with_capacity(samples);
    let mut states = Vec::with_capacity(samples);
    let mut y = y0.clone();
    times.push(t0);
    states.push(y.clone());

    let mut h_adaptive = match policy {
        StepPolicy::FixedRk4 { .. } => 0.0,
        StepPolicy::AdaptiveRk45 { h0, .. } => *h0,
    };

    for seg in sample_times.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        match policy {
            StepPolicy::FixedRk4 { h } => {
                let len = b - a;
                let n_sub = ((len / h).ceil() as usize).max(1);
                let h_eff = len / n_sub as f64;
                let mut t = a;
                for _ in 0..n_sub {
                    y = rk4_step(rhs, t, &y, h_eff).map_err(|e| wrap_left_chart(e, t, &y))?;
                    t += h_eff;
                    if let Some(hook) = post_step {
                        hook(&mut y)?;
                    }
                }
            }
            StepPolicy::AdaptiveRk45 { atol, rtol, min_step, .. } => {
                let mut t = a;
                while t < b - 1e-14 * (1.0 + b.abs()) {
                    let h_try = h_adaptive.min(b - t);
                    let (y_new, err) = dp45_step(rhs, t, &y, h_try).map_err(|e| wrap_left_chart(e, t, &y))?;
                    let scale = error_norm(&y, &y_new, &err, *atol, *rtol);
                    if scale <= 1.0 {
                        t += h_try;
                        y = y_new;
                        if let Some(hook) = post_step {
                            hook(&mut y)?;
                        }
                        let factor = (0.9 * scale.powf(-0.2)).clamp(0.2, 5.0);
                        h_adaptive = (h_try * factor).max(*min_step);
                    } else {
                        let factor = (0.9 * scale.powf(-0.2)).clamp(0.2, 1.0);
                        h_adaptive = h_try * factor;
                        if h_adaptive < *min_step {
                            return Err(Error::StepUnderflow {
                                t,
                                step: h_adaptive,
                                min_step: *min_step,
                            });
                        }
                    }
                }
            }
        }
        times.push(b);
        states.push(y.clone());
    }

    Ok(Trajectory { times, states })
}

fn wrap_left_chart(e: Error, t: f64, y: &DVector<f64>) -> Error {
    match e {
        Error::OutOfChart { .. } => Error::LeftChart {
            t,
            state: crate::error::format_point(y),
        },
        other => other,
    }
}

fn rk4_step(
    rhs: &dyn Fn(f64, &DVector<f64>) -> Result<DVector<f64>>,
    t: f64,
    y: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>> {
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &(y + &k1 * (0.5 * h)))?;
    let k3 = rhs(t + 0.5 * h, &(y + &k2 * (0.5 * h)))?;
    let k4 = rhs(t + h, &(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// One Dormand–Prince 5(4) step; returns the fifth-order solution and the
/// embedded error estimate.
fn dp45_step(
    rhs: &dyn Fn(f64, &DVector<f64>) -> Result<DVector<f64>>,
    t: f64,
    y: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [&[f64]; 6] = [
        &[0.2],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    k.push(rhs(t, y)?);
    for stage in 0..6 {
        let mut arg = y.clone();
        for (i, &coeff) in A[stage].iter().enumerate() {
            if coeff != 0.0 {
                arg += &k[i] * (coeff * h);
            }
        }
        k.push(rhs(t + C[stage] * h, &arg)?);
    }
    // the 5th-order weights are the last A row (k7 is evaluated at y5)
    let mut y5 = y.clone();
    for (i, &coeff) in A[5].iter().enumerate() {
        if coeff != 0.0 {
            y5 += &k[i] * (coeff * h);
        }
    }
    let mut y4 = y.clone();
    for (i, &coeff) in B4.iter().enumerate() {
        if coeff != 0.0 {
            y4 += &k[i] * (coeff * h);
        }
    }
    let err = &y5 - &y4;
    Ok((y5, err))
}

fn error_norm(y: &DVector<f64>, y_new: &DVector<f64>, err: &DVector<f64>, atol: f64, rtol: f64) -> f64 {
    let n = y.len();
    let mut sum = 0.0;
    for i in 0..n {
        let scale = atol + rtol * y[i].abs().max(y_new[i].abs());
        let e = err[i] / scale;
        sum += e * e;
    }
    (sum / n as f64).sqrt()
}
