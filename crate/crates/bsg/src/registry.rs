//! Built-in manifold registry.
//!
//! Five charts ship with the crate:
//!
//! | id | description |
//! |----|-------------|
//! | `paper-r2-kahler` | flat Kähler plane with `g = x²dx² + y²dy²`, `J∂x = −(x/y)∂y`; has closed-form geodesics |
//! | `flat-cm` | flat complex plane `ℂ²` (identity metric, block rotation structure) |
//! | `cp1-fubini-study` | Fubini–Study chart `g = 4/(1+|z|²)² I` with constant holomorphic curvature |
//! | `bumpy-surface-control` | conformal surface with non-constant curvature: a Kähler entry that is *not* locally symmetric |
//! | `perturbed-r2-control` | `g = diag(1+x², 1)` with the rotation structure: fails the Kähler condition (negative control) |
//!
//! Every flag an entry claims is re-verified on first lookup by sampling the
//! corresponding check suite; a failure aborts with
//! [`Error::RegistrationFailed`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{GeometryCache, ManifoldChart};
use crate::cotangent::BergerSasakiConfig;
use crate::error::{Error, Result};
use crate::geodesic::GeodesicState;
use crate::kahler::KahlerStructure;

/// One registry entry: chart constructors plus verified geometry flags.
pub struct ManifoldEntry {
    pub id: &'static str,
    pub dim: usize,
    pub kahler: bool,
    pub locally_symmetric: bool,
    pub flat: bool,
    pub chart_domain: &'static str,
    pub description: &'static str,
    /// box from which random test points are drawn
    pub sample_low: &'static [f64],
    pub sample_high: &'static [f64],
    /// whether [`example_curve`] applies to this entry
    pub closed_form_geodesics: bool,
    builder: fn(bool) -> ManifoldChart,
}

impl ManifoldEntry {
    /// Chart with the analytic metric Jacobian attached.
    pub fn chart(&self) -> ManifoldChart {
        (self.builder)(true)
    }

    /// Chart that relies on finite differences for metric derivatives.
    pub fn chart_without_jacobian(&self) -> ManifoldChart {
        (self.builder)(false)
    }

    pub fn sample_point(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(self.dim, |i, _| rng.random_range(self.sample_low[i]..self.sample_high[i]))
    }

    pub fn describe(&self) -> ManifoldDescription {
        ManifoldDescription {
            id: self.id.to_string(),
            dim: self.dim,
            kahler: self.kahler,
            locally_symmetric: self.locally_symmetric,
            flat: self.flat,
            chart_domain: self.chart_domain.to_string(),
            description: self.description.to_string(),
            closed_form_geodesics: self.closed_form_geodesics,
        }
    }
}

/// Machine-readable description of a registry entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldDescription {
    pub id: String,
    pub dim: usize,
    pub kahler: bool,
    pub locally_symmetric: bool,
    pub flat: bool,
    pub chart_domain: String,
    pub description: String,
    pub closed_form_geodesics: bool,
}

fn paper_r2(analytic: bool) -> ManifoldChart {
    let chart = ManifoldChart::new(
        2,
        |x: &DVector<f64>| DMatrix::from_diagonal(&DVector::from_vec(vec![x[0] * x[0], x[1] * x[1]])),
        |x: &DVector<f64>| {
            nalgebra::dmatrix![
                0.0, x[1] / x[0];
                -x[0] / x[1], 0.0
            ]
        },
    )
    .with_domain(|x: &DVector<f64>| x[0] > 0.0 && x[1] > 0.0);
    if analytic {
        chart.with_metric_jacobian(|x: &DVector<f64>| {
            vec![
                DMatrix::from_diagonal(&DVector::from_vec(vec![2.0 * x[0], 0.0])),
                DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 2.0 * x[1]])),
            ]
        })
    } else {
        chart
    }
}

fn block_rotation(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for b in 0..dim / 2 {
        j[(2 * b, 2 * b + 1)] = -1.0;
        j[(2 * b + 1, 2 * b)] = 1.0;
    }
    j
}

fn flat_cm(analytic: bool) -> ManifoldChart {
    let dim = 4;
    let chart = ManifoldChart::new(
        dim,
        move |_x: &DVector<f64>| DMatrix::identity(dim, dim),
        move |_x: &DVector<f64>| block_rotation(dim),
    );
    if analytic {
        chart.with_metric_jacobian(move |_x: &DVector<f64>| vec![DMatrix::zeros(dim, dim); dim])
    } else {
        chart
    }
}

fn cp1(analytic: bool) -> ManifoldChart {
    let conformal = |x: &DVector<f64>| {
        let rho = x[0] * x[0] + x[1] * x[1];
        4.0 / ((1.0 + rho) * (1.0 + rho))
    };
    let chart = ManifoldChart::new(
        2,
        move |x: &DVector<f64>| DMatrix::identity(2, 2) * conformal(x),
        |_x: &DVector<f64>| block_rotation(2),
    );
    if analytic {
        chart.with_metric_jacobian(move |x: &DVector<f64>| {
            let rho = x[0] * x[0] + x[1] * x[1];
            let dc = -16.0 / (1.0 + rho).powi(3);
            (0..2).map(|k| DMatrix::identity(2, 2) * (dc * x[k])).collect()
        })
    } else {
        chart
    }
}

fn bumpy(analytic: bool) -> ManifoldChart {
    let phi = |x: &DVector<f64>| (x[0] * x[0] + 2.0 * x[1] * x[1]) / 4.0;
    let chart = ManifoldChart::new(
        2,
        move |x: &DVector<f64>| DMatrix::identity(2, 2) * (2.0 * phi(x)).exp(),
        |_x: &DVector<f64>| block_rotation(2),
    );
    if analytic {
        chart.with_metric_jacobian(move |x: &DVector<f64>| {
            let factor = (2.0 * phi(x)).exp();
            let dphi = [x[0] / 2.0, 2.0 * x[1] / 2.0];
            (0..2)
                .map(|k| DMatrix::identity(2, 2) * (2.0 * dphi[k] * factor))
                .collect()
        })
    } else {
        chart
    }
}

fn perturbed(analytic: bool) -> ManifoldChart {
    let chart = ManifoldChart::new(
        2,
        |x: &DVector<f64>| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 + x[0] * x[0], 1.0])),
        |_x: &DVector<f64>| block_rotation(2),
    );
    if analytic {
        chart.with_metric_jacobian(|x: &DVector<f64>| {
            vec![
                DMatrix::from_diagonal(&DVector::from_vec(vec![2.0 * x[0], 0.0])),
                DMatrix::zeros(2, 2),
            ]
        })
    } else {
        chart
    }
}

static ENTRIES: &[ManifoldEntry] = &[
    ManifoldEntry {
        id: "paper-r2-kahler",
        dim: 2,
        kahler: true,
        locally_symmetric: true,
        flat: true,
        chart_domain: "x > 0 and y > 0 (the metric degenerates on the coordinate axes)",
        description: "flat Kahler plane g = x^2 dx^2 + y^2 dy^2 with J dx = -(x/y) dy; closed-form geodesics available",
        sample_low: &[0.5, 0.5],
        sample_high: &[5.0, 5.0],
        closed_form_geodesics: true,
        builder: paper_r2,
    },
    ManifoldEntry {
        id: "flat-cm",
        dim: 4,
        kahler: true,
        locally_symmetric: true,
        flat: true,
        chart_domain: "all of R^4",
        description: "flat complex plane C^2: identity metric with the block rotation structure",
        sample_low: &[-2.0, -2.0, -2.0, -2.0],
        sample_high: &[2.0, 2.0, 2.0, 2.0],
        closed_form_geodesics: false,
        builder: flat_cm,
    },
    ManifoldEntry {
        id: "cp1-fubini-study",
        dim: 2,
        kahler: true,
        locally_symmetric: true,
        flat: false,
        chart_domain: "all of R^2 (one stereographic chart of CP^1)",
        description: "Fubini-Study chart g = 4/(1+|z|^2)^2 I: constant sectional curvature 1",
        sample_low: &[-1.5, -1.5],
        sample_high: &[1.5, 1.5],
        closed_form_geodesics: false,
        builder: cp1,
    },
    ManifoldEntry {
        id: "bumpy-surface-control",
        dim: 2,
        kahler: true,
        locally_symmetric: false,
        flat: false,
        chart_domain: "all of R^2 (growth limits useful experiments to |x| < 2 or so)",
        description: "conformal metric e^{(x^2+2y^2)/2} I with non-constant curvature: Kahler but not locally symmetric",
        sample_low: &[-1.0, -1.0],
        sample_high: &[1.0, 1.0],
        closed_form_geodesics: false,
        builder: bumpy,
    },
    ManifoldEntry {
        id: "perturbed-r2-control",
        dim: 2,
        kahler: false,
        locally_symmetric: true,
        flat: true,
        chart_domain: "all of R^2",
        description: "negative control: g = diag(1+x^2, 1) with the rotation structure fails the Kahler condition",
        sample_low: &[-2.0, -2.0],
        sample_high: &[2.0, 2.0],
        closed_form_geodesics: false,
        builder: perturbed,
    },
];

/// Registration-time flag verification, run once per process on first lookup.
fn validate_entry(entry: &ManifoldEntry) -> std::result::Result<(), String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(0xB5_0C0DE);
    let chart = entry.chart();
    let ks = KahlerStructure::new(&chart);
    for _ in 0..50 {
        let x = entry.sample_point(&mut rng);
        chart
            .metric_inverse_at(&x)
            .map_err(|e| format!("metric not positive definite: {e}"))?;
        if entry.kahler {
            let j2 = ks.check_almost_complex(&x).map_err(|e| e.to_string())?;
            if j2 > 1e-8 {
                return Err(format!("J^2 + I residual {j2} at {x}"));
            }
            let herm = ks.check_hermitian(&x).map_err(|e| e.to_string())?;
            if herm > 1e-8 {
                return Err(format!("Hermitian residual {herm} at {x}"));
            }
            let kres = ks.check_kahler(&x).map_err(|e| e.to_string())?;
            if kres > 1e-6 {
                return Err(format!("Kahler residual {kres} at {x}"));
            }
        }
    }
    if entry.flat {
        for _ in 0..10 {
            let x = entry.sample_point(&mut rng);
            let r = chart.riemann_at(&x).map_err(|e| e.to_string())?;
            if r.max_abs() > 1e-6 {
                return Err(format!("curvature {} on a flat-flagged entry at {x}", r.max_abs()));
            }
        }
    }
    Ok(())
}

fn validated() -> &'static BTreeMap<&'static str, std::result::Result<(), String>> {
    static CACHE: OnceLock<BTreeMap<&'static str, std::result::Result<(), String>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        ENTRIES
            .iter()
            .map(|entry| (entry.id, validate_entry(entry)))
            .collect()
    })
}

/// All registry entries, in stable order.
pub fn manifolds() -> &'static [ManifoldEntry] {
    ENTRIES
}

/// Looks up a registry entry and verifies its flags (once per process).
pub fn lookup(id: &str) -> Result<&'static ManifoldEntry> {
    let entry = ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownManifold(id.to_string()))?;
    match validated().get(entry.id) {
        Some(Ok(())) => Ok(entry),
        Some(Err(detail)) => Err(Error::RegistrationFailed {
            id: id.to_string(),
            detail: detail.clone(),
        }),
        None => unreachable!("entry ids are keys of the validation cache"),
    }
}

/// Parameters of the closed-form geodesics of `paper-r2-kahler`:
/// `γ(t) = (√(2aαt+a²), √(2bβt+b²))` with fiber `ϑ(t) = (k₁ x(t), k₂ y(t))`
/// (`k = (aα, bβ)` gives the metric dual of `γ'`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExampleCurveParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Default for ExampleCurveParams {
    fn default() -> Self {
        ExampleCurveParams {
            a: 1.0,
            b: 1.0,
            alpha: 1.0,
            beta: 2.0,
            k1: 1.0,
            k2: 1.0,
        }
    }
}

/// Which closed-form family to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleCurveKind {
    /// horizontal lift with the configured `k₁, k₂`
    HorizontalLift,
    /// `ϑ = flat(γ')`, i.e. `k = (aα, bβ)`
    MetricDual,
}

/// Samples the closed-form curve at time `t`, returning `(γ(t), ϑ(t))`.
pub fn example_curve(kind: ExampleCurveKind, params: &ExampleCurveParams, t: f64) -> (DVector<f64>, DVector<f64>) {
    let (k1, k2) = match kind {
        ExampleCurveKind::HorizontalLift => (params.k1, params.k2),
        ExampleCurveKind::MetricDual => (params.a * params.alpha, params.b * params.beta),
    };
    let x = (2.0 * params.a * params.alpha * t + params.a * params.a).sqrt();
    let y = (2.0 * params.b * params.beta * t + params.b * params.b).sqrt();
    (DVector::from_vec(vec![x, y]), DVector::from_vec(vec![k1 * x, k2 * y]))
}

/// Geodesic state of the closed-form curve at time `t` (the fiber is parallel,
/// so `v = 0`).
pub fn example_curve_state(kind: ExampleCurveKind, params: &ExampleCurveParams, t: f64) -> GeodesicState {
    let (gamma, theta) = example_curve(kind, params, t);
    let u = DVector::from_vec(vec![
        params.a * params.alpha / gamma[0],
        params.b * params.beta / gamma[1],
    ]);
    GeodesicState::new(gamma, theta, u, DVector::zeros(2))
}

/// Draws unit-bundle initial data at `x` with the prescribed conserved value
/// `K = κ² + δ²μ²` and base speed `|γ'| = √(1−K)`.
pub fn unit_initial_data(
    chart: &ManifoldChart,
    x: &DVector<f64>,
    delta: f64,
    big_k: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GeodesicState> {
    assert!((0.0..1.0).contains(&big_k), "K must lie in [0, 1)");
    let n = chart.dim();
    let cache = GeometryCache::new(chart, x)?;
    let j = chart.complex_structure_at(x)?;

    let mut p = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    p /= cache.norm_inv(&p);

    // tangential unit covector w ⟂ p
    let mut w: DVector<f64>;
    loop {
        let raw = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let candidate = &raw - &p * cache.inner_inv(&raw, &p);
        if cache.norm_inv(&candidate) > 1e-3 {
            w = candidate;
            break;
        }
    }
    w /= cache.norm_inv(&w);

    let mu_unit = cache.inner_inv(&w, &(j.transpose() * &p));
    let c = (big_k / (1.0 + delta * delta * mu_unit * mu_unit)).sqrt();
    let v = &w * c;

    // positive base-velocity components: on charts bounded by coordinate axes
    // (the flat worked example) this keeps long runs inside the domain, since
    // inward-pointing base geodesics there reach the axes in finite time
    let mut u = DVector::from_fn(n, |_, _| rng.random_range(0.1..1.0));
    u /= cache.norm(&u);
    u *= (1.0 - big_k).sqrt();

    Ok(GeodesicState::new(x.clone(), p, u, v))
}

/// One named check of the verification suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            tolerance,
            passed: value < tolerance,
        }
    }
}

/// Outcome of `verify <id>`: every invariant suite the manifold's flags claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub manifold: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Residual of `∇R` at `x`, used to verify the locally-symmetric flag.
fn nabla_riemann_max(chart: &ManifoldChart, x: &DVector<f64>) -> Result<f64> {
    let n = chart.dim();
    let gamma = chart.christoffel_at(x)?;
    let r = chart.riemann_at(x)?;
    // ∂_l R by central differences with a coarser step: R itself carries FD
    // noise, so a wider stencil keeps the quotient clean
    let step = 1e-4;
    let mut worst: f64 = 0.0;
    for l in 0..n {
        let h = step * x[l].abs().max(1.0);
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[l] += h;
        minus[l] -= h;
        let rp = chart.riemann_at(&plus)?;
        let rm = chart.riemann_at(&minus)?;
        for a in 0..n {
            for i in 0..n {
                for jj in 0..n {
                    for k in 0..n {
                        let mut value = (rp.get(a, i, jj, k) - rm.get(a, i, jj, k)) / (2.0 * h);
                        for b in 0..n {
                            value += gamma.get(a, l, b) * r.get(b, i, jj, k)
                                - gamma.get(b, l, i) * r.get(a, b, jj, k)
                                - gamma.get(b, l, jj) * r.get(a, i, b, k)
                                - gamma.get(b, l, k) * r.get(a, i, jj, b);
                        }
                        worst = worst.max(value.abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Runs the full invariant suite for one manifold. Sampling is seeded, so
/// reports are reproducible.
pub fn verify_manifold(id: &str, seed: u64) -> Result<VerifyReport> {
    use rand::SeedableRng;
    let entry = lookup(id)?;
    let chart = entry.chart();
    let ks = KahlerStructure::new(&chart);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let deriv_tol = if chart.has_analytic_jacobian() { 1e-10 } else { 1e-6 };
    let points: Vec<DVector<f64>> = (0..50).map(|_| entry.sample_point(&mut rng)).collect();

    let mut compat: f64 = 0.0;
    let mut involution: f64 = 0.0;
    let mut bianchi: f64 = 0.0;
    let mut antisym: f64 = 0.0;
    for x in &points {
        let cache = GeometryCache::with_curvature(&chart, x)?;
        compat = compat.max(cache.compatibility_residual(&chart)?);
        bianchi = bianchi.max(cache.bianchi_residual());
        let r = cache.curvature();
        for a in 0..entry.dim {
            for i in 0..entry.dim {
                for jj in 0..entry.dim {
                    for k in 0..entry.dim {
                        antisym = antisym.max((r.get(a, i, jj, k) + r.get(a, jj, i, k)).abs());
                    }
                }
            }
        }
        let om = DVector::from_fn(entry.dim, |_, _| rng.random_range(-1.0..1.0));
        let back = cache.flat(&cache.sharp(&om));
        involution = involution.max((back - om).amax());
    }
    checks.push(CheckResult::new("metric-compatibility", compat, deriv_tol));
    checks.push(CheckResult::new("tilde-involution", involution, 1e-12));
    checks.push(CheckResult::new("bianchi-identity", bianchi, 1e-5));
    checks.push(CheckResult::new("curvature-antisymmetry", antisym, 1e-12));

    if entry.kahler {
        let mut j2: f64 = 0.0;
        let mut herm: f64 = 0.0;
        let mut herm_dual: f64 = 0.0;
        let mut nij: f64 = 0.0;
        let mut kahler: f64 = 0.0;
        let mut sharp_rule: f64 = 0.0;
        let mut curvature = [0.0f64; 3];
        for x in &points {
            j2 = j2.max(ks.check_almost_complex(x)?);
            herm = herm.max(ks.check_hermitian(x)?);
            herm_dual = herm_dual.max(ks.check_hermitian_dual(x)?);
            kahler = kahler.max(ks.check_kahler(x)?);
            let xv = DVector::from_fn(entry.dim, |_, _| rng.random_range(-1.0..1.0));
            let yv = DVector::from_fn(entry.dim, |_, _| rng.random_range(-1.0..1.0));
            nij = nij.max(ks.nijenhuis_at(x, &xv, &yv)?.amax());
            let ids = ks.check_curvature_identities(x, &xv, &yv)?;
            for (slot, value) in curvature.iter_mut().zip(ids) {
                *slot = slot.max(value);
            }
            let om = DVector::from_fn(entry.dim, |_, _| rng.random_range(-1.0..1.0));
            let lhs = chart.sharp(x, &ks.covector_action(x, &om)?)?;
            let rhs = -(ks.j_at(x)? * chart.sharp(x, &om)?);
            sharp_rule = sharp_rule.max((lhs - rhs).amax());
        }
        checks.push(CheckResult::new("almost-complex", j2, 1e-10));
        checks.push(CheckResult::new("hermitian", herm, 1e-10));
        checks.push(CheckResult::new("hermitian-dual", herm_dual, 1e-10));
        checks.push(CheckResult::new("nijenhuis", nij, 1e-6));
        checks.push(CheckResult::new("kahler-condition", kahler, 1e-6));
        checks.push(CheckResult::new("curvature-commutation", curvature[0], 1e-5));
        checks.push(CheckResult::new("curvature-pair-invariance", curvature[1], 1e-5));
        checks.push(CheckResult::new("curvature-skew-rule", curvature[2], 1e-5));
        checks.push(CheckResult::new("covector-action-sharp-rule", sharp_rule, 1e-10));
    }

    if entry.flat {
        let mut flatness: f64 = 0.0;
        for x in points.iter().take(10) {
            flatness = flatness.max(chart.riemann_at(x)?.max_abs());
        }
        checks.push(CheckResult::new("flatness", flatness, 1e-6));
    }

    {
        let mut nabla_r: f64 = 0.0;
        for x in points.iter().take(5) {
            nabla_r = nabla_r.max(nabla_riemann_max(&chart, x)?);
        }
        // consistency both ways: symmetric entries must pass, the
        // non-symmetric control must fail
        let name = "locally-symmetric-flag";
        let passed = if entry.locally_symmetric {
            nabla_r < 1e-4
        } else {
            nabla_r >= 1e-4
        };
        checks.push(CheckResult {
            name: name.to_string(),
            value: nabla_r,
            tolerance: 1e-4,
            passed,
        });
    }

    if entry.kahler {
        // closed-form connection against the coordinate oracle, a small spot check
        let cfg = BergerSasakiConfig::new(&chart, 0.5);
        let sample = |rng: &mut ChaCha8Rng| entry.sample_point(rng);
        let report = crate::oracle::oracle_comparison(&cfg, &sample, seed.wrapping_add(1), 10, 1e-5)?;
        let worst = report
            .connection
            .max
            .max(report.liouville.max)
            .max(report.unit_connection.max)
            .max(report.metric_frame.max);
        checks.push(CheckResult::new("oracle-connection", worst, 1e-5));

        // short unit-bundle conservation run
        let delta = 0.7;
        let cfg = BergerSasakiConfig::new(&chart, delta);
        let x = entry.sample_point(&mut rng);
        let state = unit_initial_data(&chart, &x, delta, 0.5, &mut rng)?;
        let traj = crate::geodesic::integrate_unit_bundle(
            &cfg,
            &state,
            (0.0, 1.0),
            51,
            &crate::ode::StepPolicy::rk4(1e-3),
            false,
        )?;
        let inv = crate::geodesic::invariant_report(&cfg, &traj)?;
        let drift = inv
            .drift
            .kappa
            .max(inv.drift.mu)
            .max(inv.drift.r2)
            .max(inv.drift.orth);
        checks.push(CheckResult::new("unit-bundle-conservation", drift, 1e-8));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        manifold: id.to_string(),
        seed,
        checks,
        passed,
    })
}
