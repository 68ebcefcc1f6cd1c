//! Chart-based Riemannian geometry.
//!
//! A [`ManifoldChart`] describes a single coordinate chart of an even-dimensional
//! Riemannian manifold: the metric field `g_ij(x)`, an optional analytic metric
//! Jacobian `∂_k g_ij(x)`, a complex-structure field `J^i_j(x)`, and a validity
//! predicate for the chart domain. Everything downstream (Christoffel symbols,
//! curvature, musical isomorphisms) is derived from these fields, falling back
//! to central finite differences when analytic derivatives are not supplied.
//!
//! Index conventions used throughout the crate:
//!
//! - `Γ^k_{ij} = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`, symmetric in `i, j`.
//! - `R^a_{ijk}` is fixed by `R(∂_i, ∂_j)∂_k = R^a_{ijk} ∂_a` with
//!   `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`, so the covector
//!   `p R(X,Y)` has components `p_a R^a_{ijk} X^i Y^j`.
//! - The musical maps are `sharp(ω) = g^{ij}ω_i ∂_j` and `flat(X) = g_{ij}X^i dx^j`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Base step for central finite differences; scaled per coordinate as
/// `h = FD_BASE_STEP * max(1, |x_k|)`.
pub const FD_BASE_STEP: f64 = 1e-5;

type MetricFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;
type MetricJacobianFn = dyn Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync;
type StructureFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;
type DomainFn = dyn Fn(&DVector<f64>) -> bool + Send + Sync;

/// A coordinate chart of a `2m`-dimensional Riemannian manifold carrying an
/// almost complex structure.
///
/// The chart is immutable after construction and safe to share across threads;
/// all derived quantities are pure functions of the point.
pub struct ManifoldChart {
    dim: usize,
    metric: Box<MetricFn>,
    metric_jacobian: Option<Box<MetricJacobianFn>>,
    complex_structure: Box<StructureFn>,
    domain: Box<DomainFn>,
    richardson: bool,
}

impl ManifoldChart {
    /// Creates a chart from a metric field and a complex-structure field.
    ///
    /// `dim` must be even and positive. The default domain accepts every point;
    /// restrict it with [`ManifoldChart::with_domain`].
    pub fn new<G, J>(dim: usize, metric: G, complex_structure: J) -> Self
    where
        G: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        J: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        assert!(dim > 0 && dim % 2 == 0, "chart dimension must be even and positive");
        ManifoldChart {
            dim,
            metric: Box::new(metric),
            metric_jacobian: None,
            complex_structure: Box::new(complex_structure),
            domain: Box::new(|_| true),
            richardson: false,
        }
    }

    /// Supplies the analytic metric Jacobian `k ↦ ∂_k g`.
    pub fn with_metric_jacobian<F>(mut self, jacobian: F) -> Self
    where
        F: Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.metric_jacobian = Some(Box::new(jacobian));
        self
    }

    /// Restricts the chart domain to the points accepted by `predicate`.
    pub fn with_domain<F>(mut self, predicate: F) -> Self
    where
        F: Fn(&DVector<f64>) -> bool + Send + Sync + 'static,
    {
        self.domain = Box::new(predicate);
        self
    }

    /// Enables Richardson extrapolation of the finite-difference metric
    /// derivatives (one extra halved-step evaluation per coordinate).
    pub fn with_richardson(mut self, enabled: bool) -> Self {
        self.richardson = enabled;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.metric_jacobian.is_some()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim && (self.domain)(x)
    }

    fn check_domain(&self, x: &DVector<f64>) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::out_of_chart(x))
        }
    }

    /// Metric matrix `g_ij(x)`.
    pub fn metric_at(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        Ok((self.metric)(x))
    }

    /// Inverse metric `g^{ij}(x)` via Cholesky factorization.
    pub fn metric_inverse_at(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let g = self.metric_at(x)?;
        Cholesky::new(g)
            .map(|c| c.inverse())
            .ok_or_else(|| Error::singular_metric(x))
    }

    /// Complex-structure matrix `J^i_j(x)` (row `i`, column `j`).
    pub fn complex_structure_at(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        Ok((self.complex_structure)(x))
    }

    /// Metric derivatives `k ↦ ∂_k g_ij(x)`, analytic when supplied, otherwise
    /// by central differences (the whole stencil must stay in the domain).
    pub fn metric_jacobian_at(&self, x: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
        self.check_domain(x)?;
        if let Some(jacobian) = &self.metric_jacobian {
            return Ok(jacobian(x));
        }
        (0..self.dim).map(|k| self.fd_metric_derivative(x, k)).collect()
    }

    fn fd_metric_derivative(&self, x: &DVector<f64>, k: usize) -> Result<DMatrix<f64>> {
        let h = fd_step(x[k]);
        let full = self.central_metric_diff(x, k, h)?;
        if self.richardson {
            let half = self.central_metric_diff(x, k, h / 2.0)?;
            Ok((half * 4.0 - full) / 3.0)
        } else {
            Ok(full)
        }
    }

    fn central_metric_diff(&self, x: &DVector<f64>, k: usize, h: f64) -> Result<DMatrix<f64>> {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[k] += h;
        minus[k] -= h;
        let gp = self.metric_at(&plus)?;
        let gm = self.metric_at(&minus)?;
        Ok((gp - gm) / (2.0 * h))
    }

    /// Christoffel symbols `Γ^k_{ij}` of the Levi-Civita connection at `x`.
    pub fn christoffel_at(&self, x: &DVector<f64>) -> Result<Christoffel> {
        let g_inv = self.metric_inverse_at(x)?;
        let dg = self.metric_jacobian_at(x)?;
        let n = self.dim;
        let mut gamma = Christoffel::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut sum = 0.0;
                    for l in 0..n {
                        sum += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    gamma.set(k, i, j, 0.5 * sum);
                    gamma.set(k, j, i, 0.5 * sum);
                }
            }
        }
        Ok(gamma)
    }

    /// Coordinate derivatives of the Christoffel symbols, `i ↦ ∂_i Γ`, by
    /// central differences.
    pub fn christoffel_jacobian_at(&self, x: &DVector<f64>) -> Result<Vec<Christoffel>> {
        self.check_domain(x)?;
        (0..self.dim)
            .map(|i| {
                let h = fd_step(x[i]);
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[i] += h;
                minus[i] -= h;
                let gp = self.christoffel_at(&plus)?;
                let gm = self.christoffel_at(&minus)?;
                Ok(gp.scaled_difference(&gm, 1.0 / (2.0 * h)))
            })
            .collect()
    }

    /// Curvature tensor `R^a_{ijk}` at `x` (see the module docs for the index
    /// convention).
    pub fn riemann_at(&self, x: &DVector<f64>) -> Result<Riemann> {
        let gamma = self.christoffel_at(x)?;
        let dgamma = self.christoffel_jacobian_at(x)?;
        let n = self.dim;
        let mut r = Riemann::zeros(n);
        for a in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..n {
                        let mut value = dgamma[i].get(a, j, k) - dgamma[j].get(a, i, k);
                        for l in 0..n {
                            value += gamma.get(l, j, k) * gamma.get(a, i, l)
                                - gamma.get(l, i, k) * gamma.get(a, j, l);
                        }
                        r.set(a, i, j, k, value);
                        r.set(a, j, i, k, -value);
                    }
                }
            }
        }
        Ok(r)
    }

    /// Musical isomorphism raising an index: `sharp(ω) = g^{ij} ω_i ∂_j`.
    pub fn sharp(&self, x: &DVector<f64>, omega: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.metric_inverse_at(x)? * omega)
    }

    /// Musical isomorphism lowering an index: `flat(X) = g_{ij} X^i dx^j`.
    pub fn flat(&self, x: &DVector<f64>, vector: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.metric_at(x)? * vector)
    }

    /// Inner product of two covectors, `g^{-1}(ω, θ) = g^{ij} ω_i θ_j`.
    pub fn inner_inv(&self, x: &DVector<f64>, omega: &DVector<f64>, theta: &DVector<f64>) -> Result<f64> {
        Ok((self.metric_inverse_at(x)? * theta).dot(omega))
    }

    /// Inner product of two vectors, `g(X, Y)`.
    pub fn inner(&self, x: &DVector<f64>, u: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        Ok((self.metric_at(x)? * w).dot(u))
    }
}

fn fd_step(coordinate: f64) -> f64 {
    FD_BASE_STEP * coordinate.abs().max(1.0)
}

/// Christoffel symbols `Γ^k_{ij}` stored as a dense rank-3 array.
#[derive(Debug, Clone)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = value;
    }

    /// `(self - other) * scale`, entrywise; used for finite differences.
    fn scaled_difference(&self, other: &Christoffel, scale: f64) -> Christoffel {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * scale)
            .collect();
        Christoffel { dim: self.dim, data }
    }

    /// Quadratic contraction `k ↦ Γ^k_{ij} u^i w^j` (vector covariant-derivative
    /// correction).
    pub fn quadratic(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut sum = 0.0;
            for i in 0..n {
                for j in 0..n {
                    sum += self.get(k, i, j) * u[i] * w[j];
                }
            }
            sum
        })
    }

    /// Covector contraction `h ↦ Γ^i_{jh} θ_i u^j` (covector covariant-derivative
    /// correction, and the horizontal-lift fiber term).
    pub fn covector_term(&self, theta: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |h, _| {
            let mut sum = 0.0;
            for i in 0..n {
                for j in 0..n {
                    sum += self.get(i, j, h) * theta[i] * u[j];
                }
            }
            sum
        })
    }
}

/// Curvature tensor components `R^a_{ijk}`.
#[derive(Debug, Clone)]
pub struct Riemann {
    dim: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn zeros(dim: usize) -> Self {
        Riemann {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, j: usize, k: usize) -> f64 {
        self.data[((a * self.dim + i) * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, a: usize, i: usize, j: usize, k: usize, value: f64) {
        self.data[((a * self.dim + i) * self.dim + j) * self.dim + k] = value;
    }

    /// The operator `R(X, Y)` as a matrix acting on vectors:
    /// `M^a_k = R^a_{ijk} X^i Y^j`.
    pub fn operator(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |a, k| {
            let mut sum = 0.0;
            for i in 0..n {
                for j in 0..n {
                    sum += self.get(a, i, j, k) * x[i] * y[j];
                }
            }
            sum
        })
    }

    /// The covector `p R(X, Y)` with components `p_a R^a_{ijk} X^i Y^j`.
    pub fn contract_covector(&self, p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut sum = 0.0;
            for a in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        sum += p[a] * self.get(a, i, j, k) * x[i] * y[j];
                    }
                }
            }
            sum
        })
    }

    /// Largest absolute component; handy for flatness checks.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Per-point geometric data, computed once and reused by the operations that
/// need several of these quantities together. Immutable; recomputed rather than
/// interpolated.
pub struct GeometryCache {
    pub point: DVector<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub gamma: Christoffel,
    pub riemann: Option<Riemann>,
}

impl GeometryCache {
    pub fn new(chart: &ManifoldChart, x: &DVector<f64>) -> Result<Self> {
        let g = chart.metric_at(x)?;
        let g_inv = Cholesky::new(g.clone())
            .map(|c| c.inverse())
            .ok_or_else(|| Error::singular_metric(x))?;
        let gamma = chart.christoffel_at(x)?;
        Ok(GeometryCache {
            point: x.clone(),
            g,
            g_inv,
            gamma,
            riemann: None,
        })
    }

    pub fn with_curvature(chart: &ManifoldChart, x: &DVector<f64>) -> Result<Self> {
        let mut cache = GeometryCache::new(chart, x)?;
        cache.riemann = Some(chart.riemann_at(x)?);
        Ok(cache)
    }

    pub fn curvature(&self) -> &Riemann {
        self.riemann
            .as_ref()
            .expect("GeometryCache built without curvature; use with_curvature")
    }

    pub fn sharp(&self, omega: &DVector<f64>) -> DVector<f64> {
        &self.g_inv * omega
    }

    pub fn flat(&self, vector: &DVector<f64>) -> DVector<f64> {
        &self.g * vector
    }

    pub fn inner(&self, u: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (&self.g * w).dot(u)
    }

    pub fn inner_inv(&self, omega: &DVector<f64>, theta: &DVector<f64>) -> f64 {
        (&self.g_inv * theta).dot(omega)
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    pub fn norm_inv(&self, omega: &DVector<f64>) -> f64 {
        self.inner_inv(omega, omega).max(0.0).sqrt()
    }

    /// Residual of the first Bianchi identity, `max |R^a_{ijk} + R^a_{jki} + R^a_{kij}|`.
    pub fn bianchi_residual(&self) -> f64 {
        let r = self.curvature();
        let n = r.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let cyc = r.get(a, i, j, k) + r.get(a, j, k, i) + r.get(a, k, i, j);
                        worst = worst.max(cyc.abs());
                    }
                }
            }
        }
        worst
    }

    /// Residual of metric compatibility, `max |∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il|`.
    pub fn compatibility_residual(&self, chart: &ManifoldChart) -> Result<f64> {
        let dg = chart.metric_jacobian_at(&self.point)?;
        let n = chart.dim();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut value = dg[k][(i, j)];
                    for l in 0..n {
                        value -= self.gamma.get(l, k, i) * self.g[(l, j)]
                            + self.gamma.get(l, k, j) * self.g[(i, l)];
                    }
                    worst = worst.max(value.abs());
                }
            }
        }
        Ok(worst)
    }
}

impl std::fmt::Debug for ManifoldChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManifoldChart")
            .field("dim", &self.dim)
            .field("analytic_jacobian", &self.metric_jacobian.is_some())
            .field("richardson", &self.richardson)
            .finish()
    }
}
