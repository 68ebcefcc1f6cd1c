//! Independent coordinate-chart verification of the closed-form lift formulas.
//!
//! The deformed metric induces a `4m × 4m` metric `G_AB` on the natural
//! coordinates `(x^i, p_i)` of `T*M` through the frame change
//! `H(∂_i) = ∂_i + p_a Γ^a_{hi} ∂_h̄`, `V(dx^i) = ∂_ī`. Everything here is
//! brute force: the Christoffel symbols of `G` come from central finite
//! differences, coordinate covariant derivatives from the standard formula,
//! and geodesics from the standard coordinate geodesic equation. That makes
//! this module a slow but formula-free second route against which the
//! closed-form connection and geodesic equations are checked.
//!
//! Test-only by policy: production geodesics never call into this module.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{Christoffel, GeometryCache};
use crate::cotangent::{BergerSasakiConfig, CotangentPoint, LiftedGerm, LiftedVector};
use crate::error::{Error, Result};

/// Finite-difference step for the induced-metric derivatives.
const ORACLE_FD_STEP: f64 = 1e-5;

/// The matrix `C_{hj} = p_a Γ^a_{hj}` relating the adapted and natural frames.
fn frame_change(gamma: &Christoffel, p: &DVector<f64>) -> DMatrix<f64> {
    let n = gamma.dim();
    DMatrix::from_fn(n, n, |h, j| {
        let mut sum = 0.0;
        for a in 0..n {
            sum += p[a] * gamma.get(a, h, j);
        }
        sum
    })
}

/// Vertical-vertical block of the deformed metric,
/// `W = g⁻¹ + δ² q qᵀ` with `q = g⁻¹ (pJ)`.
fn vertical_block(cfg: &BergerSasakiConfig, cache: &GeometryCache, p: &DVector<f64>) -> Result<DMatrix<f64>> {
    let j = cfg.chart().complex_structure_at(&cache.point)?;
    let pj = j.transpose() * p;
    let q = cache.sharp(&pj);
    let d2 = cfg.delta * cfg.delta;
    Ok(&cache.g_inv + (&q * q.transpose()) * d2)
}

/// The induced metric `G_AB(x, p)` in natural coordinates.
pub fn induced_metric_at(cfg: &BergerSasakiConfig, x: &DVector<f64>, p: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = cfg.dim();
    let cache = GeometryCache::new(cfg.chart(), x)?;
    let w = vertical_block(cfg, &cache, p)?;
    let c = frame_change(&cache.gamma, p);
    let wc = &w * &c;
    let mut g_ind = DMatrix::zeros(2 * n, 2 * n);
    g_ind.view_mut((0, 0), (n, n)).copy_from(&(&cache.g + c.transpose() * &wc));
    g_ind.view_mut((0, n), (n, n)).copy_from(&(-wc.transpose()));
    g_ind.view_mut((n, 0), (n, n)).copy_from(&(-&wc));
    g_ind.view_mut((n, n), (n, n)).copy_from(&w);
    Ok(g_ind)
}

fn induced_metric_at_coords(cfg: &BergerSasakiConfig, z: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = cfg.dim();
    let x = DVector::from(z.rows(0, n));
    let p = DVector::from(z.rows(n, n));
    induced_metric_at(cfg, &x, &p)
}

/// Christoffel symbols of the induced metric by central finite differences
/// over all `4m` coordinates.
pub fn induced_christoffel_at(cfg: &BergerSasakiConfig, x: &DVector<f64>, p: &DVector<f64>) -> Result<Christoffel> {
    let n = cfg.dim();
    let m = 2 * n;
    let mut z = DVector::zeros(m);
    z.rows_mut(0, n).copy_from(x);
    z.rows_mut(n, n).copy_from(p);

    let g_ind = induced_metric_at_coords(cfg, &z)?;
    let g_inv = Cholesky::new(g_ind)
        .map(|c| c.inverse())
        .ok_or_else(|| Error::singular_metric(x))?;

    // Richardson-extrapolated central differences: the induced metric mixes
    // widely scaled factors (g⁻¹ against δ²-weighted fiber products), and the
    // plain O(h²) truncation error is visible at the 1e-5 comparison level.
    let mut dg = Vec::with_capacity(m);
    for a in 0..m {
        let h = ORACLE_FD_STEP * z[a].abs().max(1.0);
        let central = |step: f64| -> Result<DMatrix<f64>> {
            let mut plus = z.clone();
            let mut minus = z.clone();
            plus[a] += step;
            minus[a] -= step;
            Ok((induced_metric_at_coords(cfg, &plus)? - induced_metric_at_coords(cfg, &minus)?) / (2.0 * step))
        };
        let full = central(h)?;
        let half = central(h / 2.0)?;
        dg.push((half * 4.0 - full) / 3.0);
    }

    let mut gamma = Christoffel::zeros(m);
    for c in 0..m {
        for a in 0..m {
            for b in a..m {
                let mut sum = 0.0;
                for d in 0..m {
                    sum += g_inv[(c, d)] * (dg[a][(b, d)] + dg[b][(a, d)] - dg[d][(a, b)]);
                }
                gamma.set(c, a, b, 0.5 * sum);
                gamma.set(c, b, a, 0.5 * sum);
            }
        }
    }
    Ok(gamma)
}

/// A vector field on `T*M` known to first order at one point of the natural
/// coordinates: value `V^A` and Jacobian `∂_A V^C` (row `C`, column `A`).
#[derive(Debug, Clone)]
pub struct CoordinateGerm {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

impl CoordinateGerm {
    pub fn zero(m: usize) -> Self {
        CoordinateGerm {
            value: DVector::zeros(m),
            jacobian: DMatrix::zeros(m, m),
        }
    }

    pub fn add(&self, other: &CoordinateGerm) -> CoordinateGerm {
        CoordinateGerm {
            value: &self.value + &other.value,
            jacobian: &self.jacobian + &other.jacobian,
        }
    }
}

/// A base vector or covector field known to first order: value and coordinate
/// Jacobian `∂_j (value)_i` stored at `(i, j)`.
#[derive(Debug, Clone)]
pub struct BaseGerm {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

impl BaseGerm {
    pub fn constant(value: DVector<f64>) -> Self {
        let n = value.len();
        BaseGerm {
            value,
            jacobian: DMatrix::zeros(n, n),
        }
    }

    /// `∇_X` of the germ treated as a vector field: `A X + Γ(X, ·)`.
    pub fn vector_derivative(&self, cache: &GeometryCache, x_dir: &DVector<f64>) -> DVector<f64> {
        &self.jacobian * x_dir + cache.gamma.quadratic(x_dir, &self.value)
    }

    /// `∇_X` of the germ treated as a covector field: `B X − Γ-correction`.
    pub fn covector_derivative(&self, cache: &GeometryCache, x_dir: &DVector<f64>) -> DVector<f64> {
        &self.jacobian * x_dir - cache.gamma.covector_term(&self.value, x_dir)
    }
}

/// Natural-frame coordinates of a lifted vector at `(x, p)`.
pub fn adapted_to_coordinates(cfg: &BergerSasakiConfig, cp: &CotangentPoint, v: &LiftedVector) -> Result<DVector<f64>> {
    let n = cfg.dim();
    let gamma = cfg.chart().christoffel_at(&cp.x)?;
    let c = frame_change(&gamma, &cp.p);
    let mut out = DVector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&v.horizontal);
    out.rows_mut(n, n).copy_from(&(&c * &v.horizontal + &v.vertical));
    Ok(out)
}

/// Adapted decomposition of a natural-frame coordinate vector at `(x, p)`.
pub fn coordinates_to_adapted(cfg: &BergerSasakiConfig, cp: &CotangentPoint, w: &DVector<f64>) -> Result<LiftedVector> {
    let n = cfg.dim();
    let gamma = cfg.chart().christoffel_at(&cp.x)?;
    let c = frame_change(&gamma, &cp.p);
    let xi = DVector::from(w.rows(0, n));
    let eta = DVector::from(w.rows(n, n));
    let vertical = eta - &c * &xi;
    Ok(LiftedVector::new(xi, vertical))
}

/// Coordinate germ of the lifted field `HY + Vθ` for base-field germs `Y`, `θ`.
pub fn lifted_germ_coordinates(
    cfg: &BergerSasakiConfig,
    cp: &CotangentPoint,
    y: &BaseGerm,
    theta: &BaseGerm,
) -> Result<CoordinateGerm> {
    let n = cfg.dim();
    let chart = cfg.chart();
    let gamma = chart.christoffel_at(&cp.x)?;
    let dgamma = chart.christoffel_jacobian_at(&cp.x)?;
    let c = frame_change(&gamma, &cp.p);

    let mut value = DVector::zeros(2 * n);
    value.rows_mut(0, n).copy_from(&y.value);
    value.rows_mut(n, n).copy_from(&(&c * &y.value + &theta.value));

    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    // ∂_j V^i = A^i_j
    jac.view_mut((0, 0), (n, n)).copy_from(&y.jacobian);
    for i in 0..n {
        for j in 0..n {
            // ∂_j V^{ī} = p_h ∂_j Γ^h_{ik} Y^k + p_h Γ^h_{ik} A^k_j + B_{ij}
            let mut vv = theta.jacobian[(i, j)];
            for h in 0..n {
                for k in 0..n {
                    vv += cp.p[h] * (dgamma[j].get(h, i, k) * y.value[k] + gamma.get(h, i, k) * y.jacobian[(k, j)]);
                }
            }
            jac[(n + i, j)] = vv;
            // ∂_{j̄} V^{ī} = Γ^j_{ik} Y^k
            let mut vp = 0.0;
            for k in 0..n {
                vp += gamma.get(j, i, k) * y.value[k];
            }
            jac[(n + i, n + j)] = vp;
        }
    }
    Ok(CoordinateGerm { value, jacobian: jac })
}

/// Coordinate germ of the tangential-lift field `Tθ = Vθ − g⁻¹(θ, p) Vp`,
/// which depends on the fiber point.
pub fn tangential_germ_coordinates(cfg: &BergerSasakiConfig, cp: &CotangentPoint, theta: &BaseGerm) -> Result<CoordinateGerm> {
    let n = cfg.dim();
    let chart = cfg.chart();
    let cache = GeometryCache::new(chart, &cp.x)?;
    let dg = chart.metric_jacobian_at(&cp.x)?;
    let f = cache.inner_inv(&theta.value, &cp.p);
    let theta_sharp = cache.sharp(&theta.value);

    let mut value = DVector::zeros(2 * n);
    value.rows_mut(n, n).copy_from(&(&theta.value - &cp.p * f));

    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        // ∂_j f = (∂_j g⁻¹)(θ, p) + g⁻¹(B e_j, p), with ∂_j g⁻¹ = −g⁻¹ ∂_j g g⁻¹
        let dg_inv = -(&cache.g_inv * &dg[j] * &cache.g_inv);
        let b_col = theta.jacobian.column(j);
        let mut df = (&dg_inv * &cp.p).dot(&theta.value);
        df += cache.inner_inv(&DVector::from(b_col), &cp.p);
        for i in 0..n {
            // ∂_j V^{ī} = B_{ij} − (∂_j f) p_i
            jac[(n + i, j)] = theta.jacobian[(i, j)] - df * cp.p[i];
            // ∂_{j̄} V^{ī} = −θ̃^j p_i − f δ_{ij}
            jac[(n + i, n + j)] = -theta_sharp[j] * cp.p[i] - if i == j { f } else { 0.0 };
        }
    }
    Ok(CoordinateGerm { value, jacobian: jac })
}

/// Coordinate germ of the Liouville field `(0, p)`.
pub fn liouville_germ_coordinates(cfg: &BergerSasakiConfig, cp: &CotangentPoint) -> CoordinateGerm {
    let n = cfg.dim();
    let mut value = DVector::zeros(2 * n);
    value.rows_mut(n, n).copy_from(&cp.p);
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        jac[(n + i, n + i)] = 1.0;
    }
    CoordinateGerm { value, jacobian: jac }
}

/// Coordinate covariant derivative `(∇̂_U V)^C = U^A ∂_A V^C + Γ̂^C_{AB} U^A V^B`.
pub fn oracle_connection(
    cfg: &BergerSasakiConfig,
    x: &DVector<f64>,
    p: &DVector<f64>,
    dir: &DVector<f64>,
    germ: &CoordinateGerm,
) -> Result<DVector<f64>> {
    let gamma = induced_christoffel_at(cfg, x, p)?;
    Ok(&germ.jacobian * dir + gamma.quadratic(dir, &germ.value))
}

/// Coordinate geodesic acceleration `−Γ̂^C_{AB} ż^A ż^B` of the induced metric.
pub fn oracle_geodesic_rhs(cfg: &BergerSasakiConfig, position: &DVector<f64>, velocity: &DVector<f64>) -> Result<DVector<f64>> {
    let n = cfg.dim();
    let x = DVector::from(position.rows(0, n));
    let p = DVector::from(position.rows(n, n));
    let gamma = induced_christoffel_at(cfg, &x, &p)?;
    Ok(-gamma.quadratic(velocity, velocity))
}

/// Deviation statistics for one family of comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl DeviationStats {
    fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len();
        let max = samples.iter().cloned().fold(0.0, f64::max);
        let mean = if count == 0 {
            0.0
        } else {
            samples.iter().sum::<f64>() / count as f64
        };
        DeviationStats { max, mean, count }
    }
}

/// Outcome of a closed-form vs. coordinate-oracle comparison run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub delta: f64,
    pub seed: u64,
    pub configurations: usize,
    pub tolerance: f64,
    /// full lifted-field connection against the oracle
    pub connection: DeviationStats,
    /// Liouville-field derivative against the oracle
    pub liouville: DeviationStats,
    /// unit-bundle connection against the Gauss-projected oracle
    pub unit_connection: DeviationStats,
    /// deformed metric against the frame-changed induced metric
    pub metric_frame: DeviationStats,
    pub passed: bool,
}

/// Relative deviation with a bounded denominator.
fn deviation(a: &LiftedVector, b: &LiftedVector) -> f64 {
    (a - b).amax() / (1.0 + a.amax())
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0))
}

/// Runs `count` seeded random configurations comparing the closed-form
/// connection formulas against the coordinate oracle, on points drawn by
/// `sample` (rejection-sampled into the chart domain by the caller).
pub fn oracle_comparison(
    cfg: &BergerSasakiConfig,
    sample: &dyn Fn(&mut ChaCha8Rng) -> DVector<f64>,
    seed: u64,
    count: usize,
    tolerance: f64,
) -> Result<OracleReport> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.dim();
    let chart = cfg.chart();

    let mut connection = Vec::with_capacity(count);
    let mut liouville = Vec::with_capacity(count);
    let mut unit_connection = Vec::with_capacity(count);
    let mut metric_frame = Vec::with_capacity(count);

    for _ in 0..count {
        let x = sample(&mut rng);
        let mut p = random_vec(&mut rng, n);
        // keep the fiber away from zero so relative comparisons stay meaningful
        while chart.inner_inv(&x, &p, &p)? < 0.01 {
            p = random_vec(&mut rng, n);
        }
        let cp = CotangentPoint::new(x.clone(), p.clone());
        let cache = GeometryCache::new(chart, &x)?;

        let dir = LiftedVector::new(random_vec(&mut rng, n), random_vec(&mut rng, n));
        let y_germ = BaseGerm {
            value: random_vec(&mut rng, n),
            jacobian: random_matrix(&mut rng, n),
        };
        let th_germ = BaseGerm {
            value: random_vec(&mut rng, n),
            jacobian: random_matrix(&mut rng, n),
        };

        // full connection: HY + Vθ differentiated along HX + Vω
        let germ = LiftedGerm::with_derivatives(
            LiftedVector::new(y_germ.value.clone(), th_germ.value.clone()),
            y_germ.vector_derivative(&cache, &dir.horizontal),
            th_germ.covector_derivative(&cache, &dir.horizontal),
        );
        let closed = cfg.bs_connection(&cp, &dir, &germ)?;
        let dir_coords = adapted_to_coordinates(cfg, &cp, &dir)?;
        let coord_germ = lifted_germ_coordinates(cfg, &cp, &y_germ, &th_germ)?;
        let raw = oracle_connection(cfg, &x, &p, &dir_coords, &coord_germ)?;
        let from_oracle = coordinates_to_adapted(cfg, &cp, &raw)?;
        connection.push(deviation(&closed, &from_oracle));

        // Liouville field (0, p)
        let closed = cfg.liouville_derivative(&cp, &dir)?;
        let coord_germ = liouville_germ_coordinates(cfg, &cp);
        let raw = oracle_connection(cfg, &x, &p, &dir_coords, &coord_germ)?;
        let from_oracle = coordinates_to_adapted(cfg, &cp, &raw)?;
        liouville.push(deviation(&closed, &from_oracle));

        // metric against the frame change: uᵀ G v = BSg(U, V)
        let u = LiftedVector::new(random_vec(&mut rng, n), random_vec(&mut rng, n));
        let v = LiftedVector::new(random_vec(&mut rng, n), random_vec(&mut rng, n));
        let gm = induced_metric_at(cfg, &x, &p)?;
        let lhs = (&gm * adapted_to_coordinates(cfg, &cp, &v)?).dot(&adapted_to_coordinates(cfg, &cp, &u)?);
        let rhs = cfg.bs_metric(&cp, &u, &v)?;
        metric_frame.push((lhs - rhs).abs() / (1.0 + rhs.abs()));

        // unit-bundle connection against the Gauss-projected oracle
        let r = cache.inner_inv(&p, &p).sqrt();
        let p_unit = &p / r;
        let cp_unit = CotangentPoint::new(x.clone(), p_unit.clone());
        let mut omega = random_vec(&mut rng, n);
        omega -= &p_unit * cache.inner_inv(&omega, &p_unit);
        let dir_unit = LiftedVector::new(dir.horizontal.clone(), omega);
        let germ_unit = LiftedGerm::with_derivatives(
            LiftedVector::new(y_germ.value.clone(), th_germ.value.clone()),
            y_germ.vector_derivative(&cache, &dir_unit.horizontal),
            th_germ.covector_derivative(&cache, &dir_unit.horizontal),
        );
        let closed = cfg.unit_bundle_connection(&cp_unit, &dir_unit, &germ_unit)?;

        let zero_theta = BaseGerm::constant(DVector::zeros(n));
        let horizontal_part = lifted_germ_coordinates(cfg, &cp_unit, &y_germ, &zero_theta)?;
        let tangential_part = tangential_germ_coordinates(cfg, &cp_unit, &th_germ)?;
        let coord_germ = horizontal_part.add(&tangential_part);
        let dir_coords = adapted_to_coordinates(cfg, &cp_unit, &dir_unit)?;
        let raw = oracle_connection(cfg, &x, &p_unit, &dir_coords, &coord_germ)?;
        let ambient = coordinates_to_adapted(cfg, &cp_unit, &raw)?;
        let normal = cfg.unit_normal(&cp_unit);
        let coeff = cfg.bs_metric(&cp_unit, &ambient, &normal)? / cfg.bs_metric(&cp_unit, &normal, &normal)?;
        let projected = &ambient - &(&normal * coeff);
        unit_connection.push(deviation(&closed, &projected));
    }

    let connection = DeviationStats::from_samples(&connection);
    let liouville = DeviationStats::from_samples(&liouville);
    let unit_connection = DeviationStats::from_samples(&unit_connection);
    let metric_frame = DeviationStats::from_samples(&metric_frame);
    let passed = connection.max < tolerance
        && liouville.max < tolerance
        && unit_connection.max < tolerance
        && metric_frame.max < tolerance;

    Ok(OracleReport {
        delta: cfg.delta,
        seed,
        configurations: count,
        tolerance,
        connection,
        liouville,
        unit_connection,
        metric_frame,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_charts::{cp1_chart, euclidean_chart, paper_r2_chart};
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;
    use rand::Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        use rand::SeedableRng;
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn flat_sasaki_induced_metric_is_block_diagonal() {
        let chart = euclidean_chart(2);
        let cfg = BergerSasakiConfig::new(&chart, 0.0);
        let g = induced_metric_at(&cfg, &dvector![0.3, 0.1], &dvector![1.0, 2.0]).unwrap();
        let expected = DMatrix::identity(4, 4);
        assert!((g - expected).amax() < 1e-12);
    }

    #[test]
    fn frame_change_reproduces_bs_metric() {
        let chart = paper_r2_chart();
        let mut rng = rng(101);
        for delta in [0.0, 0.5, 1.0] {
            let cfg = BergerSasakiConfig::new(&chart, delta);
            for _ in 0..20 {
                let x = dvector![rng.random_range(0.5..4.0), rng.random_range(0.5..4.0)];
                let p = random_vec(&mut rng, 2);
                let cp = CotangentPoint::new(x.clone(), p.clone());
                let u = LiftedVector::new(random_vec(&mut rng, 2), random_vec(&mut rng, 2));
                let v = LiftedVector::new(random_vec(&mut rng, 2), random_vec(&mut rng, 2));
                let g = induced_metric_at(&cfg, &x, &p).unwrap();
                let lhs = (&g * adapted_to_coordinates(&cfg, &cp, &v).unwrap())
                    .dot(&adapted_to_coordinates(&cfg, &cp, &u).unwrap());
                let rhs = cfg.bs_metric(&cp, &u, &v).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn delta_sweep_changes_only_the_vertical_block() {
        let chart = paper_r2_chart();
        let mut rng = rng(103);
        let x = dvector![1.3, 2.2];
        let p = random_vec(&mut rng, 2);
        let base = {
            let cfg = BergerSasakiConfig::new(&chart, 0.0);
            induced_metric_at(&cfg, &x, &p).unwrap()
        };
        let cache = GeometryCache::new(&chart, &x).unwrap();
        let j = chart.complex_structure_at(&x).unwrap();
        let q = cache.sharp(&(j.transpose() * &p));
        for delta in [0.5, 1.0] {
            let cfg = BergerSasakiConfig::new(&chart, delta);
            let g = induced_metric_at(&cfg, &x, &p).unwrap();
            let gap = &g - &base;
            // the vertical-vertical gap is exactly δ² q qᵀ
            let vv = gap.view((2, 2), (2, 2)).clone_owned();
            let expected = (&q * q.transpose()) * (delta * delta);
            assert!((vv - expected).amax() < 1e-12);
        }
    }

    #[test]
    fn frame_round_trip_is_identity() {
        let chart = cp1_chart();
        let cfg = BergerSasakiConfig::new(&chart, 0.7);
        let mut rng = rng(107);
        for _ in 0..50 {
            let cp = CotangentPoint::new(random_vec(&mut rng, 2), random_vec(&mut rng, 2));
            let v = LiftedVector::new(random_vec(&mut rng, 2), random_vec(&mut rng, 2));
            let coords = adapted_to_coordinates(&cfg, &cp, &v).unwrap();
            let back = coordinates_to_adapted(&cfg, &cp, &coords).unwrap();
            assert!((&back - &v).amax() < 1e-12);
        }
    }

    #[test]
    fn induced_christoffel_is_symmetric_and_flat_for_trivial_data() {
        let chart = euclidean_chart(2);
        let cfg = BergerSasakiConfig::new(&chart, 0.0);
        let gamma = induced_christoffel_at(&cfg, &dvector![0.0, 0.0], &dvector![1.0, 0.0]).unwrap();
        for c in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert_abs_diff_eq!(gamma.get(c, a, b), gamma.get(c, b, a), epsilon = 1e-15);
                    assert_abs_diff_eq!(gamma.get(c, a, b), 0.0, epsilon = 1e-9);
                }
            }
        }
    }

    // Koszul expansion (coordinate-frame fields, vanishing brackets) against
    // the Christoffel-based values.
    #[test]
    fn koszul_expansion_matches_christoffels() {
        let chart = paper_r2_chart();
        let cfg = BergerSasakiConfig::new(&chart, 0.5);
        let mut rng = rng(109);
        let x = dvector![rng.random_range(0.8..2.0), rng.random_range(0.8..2.0)];
        let p = random_vec(&mut rng, 2);
        let mut z = DVector::zeros(4);
        z.rows_mut(0, 2).copy_from(&x);
        z.rows_mut(2, 2).copy_from(&p);

        let g = induced_metric_at_coords(&cfg, &z).unwrap();
        let gamma = induced_christoffel_at(&cfg, &x, &p).unwrap();
        let mut dg = Vec::new();
        for a in 0..4 {
            let h = 1e-5 * z[a].abs().max(1.0);
            let mut plus = z.clone();
            let mut minus = z.clone();
            plus[a] += h;
            minus[a] -= h;
            dg.push(
                (induced_metric_at_coords(&cfg, &plus).unwrap() - induced_metric_at_coords(&cfg, &minus).unwrap())
                    / (2.0 * h),
            );
        }
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let koszul = 0.5 * (dg[a][(b, c)] + dg[b][(a, c)] - dg[c][(a, b)]);
                    let mut lowered = 0.0;
                    for d in 0..4 {
                        lowered += g[(c, d)] * gamma.get(d, a, b);
                    }
                    assert_abs_diff_eq!(koszul, lowered, epsilon = 1e-6);
                }
            }
        }
    }

    // Metric compatibility of the oracle connection: U·G(V, W) = G(∇̂, W) + G(V, ∇̂).
    #[test]
    fn oracle_connection_is_metric_compatible() {
        let chart = cp1_chart();
        let cfg = BergerSasakiConfig::new(&chart, 0.8);
        let mut rng = rng(113);
        for _ in 0..5 {
            let x = random_vec(&mut rng, 2);
            let p = random_vec(&mut rng, 2);
            let mut z = DVector::zeros(4);
            z.rows_mut(0, 2).copy_from(&x);
            z.rows_mut(2, 2).copy_from(&p);
            let dir = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let v = CoordinateGerm {
                value: DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0)),
                jacobian: DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)),
            };
            let w = CoordinateGerm {
                value: DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0)),
                jacobian: DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)),
            };

            let eps = 1e-5;
            let inner_at = |offset: f64| -> f64 {
                let zz = &z + &dir * offset;
                let gv = induced_metric_at_coords(&cfg, &zz).unwrap();
                let vv = &v.value + &v.jacobian * (&dir * offset);
                let ww = &w.value + &w.jacobian * (&dir * offset);
                (gv * ww).dot(&vv)
            };
            let lhs = (inner_at(eps) - inner_at(-eps)) / (2.0 * eps);

            let g = induced_metric_at_coords(&cfg, &z).unwrap();
            let dv = oracle_connection(&cfg, &x, &p, &dir, &v).unwrap();
            let dw = oracle_connection(&cfg, &x, &p, &dir, &w).unwrap();
            let rhs = (&g * &w.value).dot(&dv) + (&g * &dw).dot(&v.value);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-4);
        }
    }

    #[test]
    fn oracle_geodesic_follows_the_closed_form() {
        use crate::ode::{integrate, StepPolicy};
        use crate::registry::{example_curve_state, ExampleCurveKind, ExampleCurveParams};

        let chart = paper_r2_chart();
        let cfg = BergerSasakiConfig::new(&chart, 0.5);
        let params = ExampleCurveParams::default();
        let s0 = example_curve_state(ExampleCurveKind::HorizontalLift, &params, 0.0);

        // zero velocity: zero acceleration
        let pos = nalgebra::dvector![1.0, 1.0, 0.3, 0.4];
        let acc = oracle_geodesic_rhs(&cfg, &pos, &DVector::zeros(4)).unwrap();
        assert!(acc.amax() < 1e-12);

        // horizontal-lift initial data integrated through the coordinate
        // geodesic equation reproduces the closed-form curve
        let gamma = chart.christoffel_at(&s0.x).unwrap();
        let dp0 = gamma.covector_term(&s0.p, &s0.u);
        let mut z0 = DVector::zeros(8);
        z0.rows_mut(0, 2).copy_from(&s0.x);
        z0.rows_mut(2, 2).copy_from(&s0.p);
        z0.rows_mut(4, 2).copy_from(&s0.u);
        z0.rows_mut(6, 2).copy_from(&dp0);
        let rhs = |_t: f64, y: &DVector<f64>| -> Result<DVector<f64>> {
            let pos = DVector::from(y.rows(0, 4));
            let vel = DVector::from(y.rows(4, 4));
            let acc = oracle_geodesic_rhs(&cfg, &pos, &vel)?;
            let mut dy = DVector::zeros(8);
            dy.rows_mut(0, 4).copy_from(&vel);
            dy.rows_mut(4, 4).copy_from(&acc);
            Ok(dy)
        };
        let traj = integrate(&rhs, &z0, (0.0, 1.0), 11, &StepPolicy::rk4(5e-3), None).unwrap();
        for (k, &t) in traj.times.iter().enumerate() {
            let expected = example_curve_state(ExampleCurveKind::HorizontalLift, &params, t);
            let x = DVector::from(traj.states[k].rows(0, 2));
            let p = DVector::from(traj.states[k].rows(2, 2));
            assert!((x - &expected.x).amax() < 1e-5, "base gap at t={t}");
            assert!((p - &expected.p).amax() < 1e-5, "fiber gap at t={t}");
        }
    }

    #[test]
    fn oracle_agrees_in_dimension_four() {
        let chart = crate::test_charts::flat_cm_chart();
        let cfg = BergerSasakiConfig::new(&chart, 0.8);
        let sample = |rng: &mut ChaCha8Rng| {
            nalgebra::DVector::from_fn(4, |_, _| rng.random_range(-1.5..1.5))
        };
        let report = oracle_comparison(&cfg, &sample, 7, 10, 1e-5).unwrap();
        assert!(report.passed, "dim-4 oracle deviation: {report:?}");
    }

    #[test]
    fn closed_form_connection_matches_oracle() {
        let mut worst: f64 = 0.0;
        for chart in [paper_r2_chart(), cp1_chart()] {
            let is_paper = chart.has_analytic_jacobian();
            for delta in [0.0, 0.5, 1.0] {
                let cfg = BergerSasakiConfig::new(&chart, delta);
                let sample: Box<dyn Fn(&mut ChaCha8Rng) -> DVector<f64>> = if is_paper {
                    Box::new(|rng: &mut ChaCha8Rng| {
                        dvector![rng.random_range(0.5..4.0), rng.random_range(0.5..4.0)]
                    })
                } else {
                    Box::new(|rng: &mut ChaCha8Rng| {
                        dvector![rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)]
                    })
                };
                let report = oracle_comparison(&cfg, sample.as_ref(), 42, 25, 1e-5).unwrap();
                assert!(report.passed, "oracle deviation too large: {report:?}");
                worst = worst
                    .max(report.connection.max)
                    .max(report.liouville.max)
                    .max(report.unit_connection.max)
                    .max(report.metric_frame.max);
            }
        }
        assert!(worst < 1e-5, "worst deviation {worst}");
    }

    fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
        DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
    }
}
