//! Complex-structure validation: almost-complex, Hermitian, Nijenhuis, and
//! Kähler (`∇J = 0`) checks, the fundamental 2-form, and the curvature
//! identities of a Kähler metric.
//!
//! The covector action is `(ωJ)_j = ω_i J^i_j`, i.e. a row covector times the
//! structure matrix. With that convention, `sharp(ωJ) = −J sharp(ω)` holds on
//! Hermitian charts and `g^{-1}(ωJ, θ) = −g^{-1}(ω, θJ)`.

use nalgebra::{DMatrix, DVector};

use crate::chart::{GeometryCache, ManifoldChart, FD_BASE_STEP};
use crate::error::Result;

/// A view over a chart's complex structure exposing the Kähler check suite.
pub struct KahlerStructure<'a> {
    chart: &'a ManifoldChart,
}

impl<'a> KahlerStructure<'a> {
    pub fn new(chart: &'a ManifoldChart) -> Self {
        KahlerStructure { chart }
    }

    pub fn chart(&self) -> &ManifoldChart {
        self.chart
    }

    pub fn j_at(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.chart.complex_structure_at(x)
    }

    /// Covector action `ωJ`, components `(ωJ)_j = ω_i J^i_j`.
    pub fn covector_action(&self, x: &DVector<f64>, omega: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.j_at(x)?.transpose() * omega)
    }

    /// `‖J(x)² + I‖_∞`.
    pub fn check_almost_complex(&self, x: &DVector<f64>) -> Result<f64> {
        let j = self.j_at(x)?;
        let n = self.chart.dim();
        let residual = &j * &j + DMatrix::<f64>::identity(n, n);
        Ok(residual.amax())
    }

    /// `‖Jᵀ g J − g‖_∞` (compatibility of the metric with the structure).
    pub fn check_hermitian(&self, x: &DVector<f64>) -> Result<f64> {
        let j = self.j_at(x)?;
        let g = self.chart.metric_at(x)?;
        let residual = j.transpose() * &g * &j - &g;
        Ok(residual.amax())
    }

    /// Dual identity `‖J g^{-1} Jᵀ − g^{-1}‖_∞`.
    pub fn check_hermitian_dual(&self, x: &DVector<f64>) -> Result<f64> {
        let j = self.j_at(x)?;
        let g_inv = self.chart.metric_inverse_at(x)?;
        let residual = &j * &g_inv * j.transpose() - &g_inv;
        Ok(residual.amax())
    }

    /// Coordinate derivatives of the structure, `l ↦ ∂_l J`, by central
    /// differences.
    fn j_derivatives(&self, x: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
        (0..self.chart.dim())
            .map(|l| {
                let h = FD_BASE_STEP * x[l].abs().max(1.0);
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[l] += h;
                minus[l] -= h;
                Ok((self.j_at(&plus)? - self.j_at(&minus)?) / (2.0 * h))
            })
            .collect()
    }

    /// Nijenhuis tensor `N_J(X, Y)` for constant-coefficient argument vectors,
    /// with the structure derivatives taken by finite differences.
    pub fn nijenhuis_at(&self, x: &DVector<f64>, xv: &DVector<f64>, yv: &DVector<f64>) -> Result<DVector<f64>> {
        let j = self.j_at(x)?;
        let dj = self.j_derivatives(x)?;
        let jx = &j * xv;
        let jy = &j * yv;
        // directional derivative of J applied to a vector: A(V, W) = Σ_l V^l (∂_l J) W
        let apply = |v: &DVector<f64>, w: &DVector<f64>| -> DVector<f64> {
            let mut out = DVector::zeros(self.chart.dim());
            for l in 0..self.chart.dim() {
                out += &dj[l] * w * v[l];
            }
            out
        };
        // [JX, JY] − J[JX, Y] − J[X, JY] − [X, Y] for constant X, Y
        let bracket = apply(&jx, yv) - apply(&jy, xv);
        let correction = &j * (apply(yv, xv) - apply(xv, yv));
        Ok(bracket + correction)
    }

    /// `max_k ‖∇_k J‖_∞`, the Kähler condition residual.
    pub fn check_kahler(&self, x: &DVector<f64>) -> Result<f64> {
        let j = self.j_at(x)?;
        let dj = self.j_derivatives(x)?;
        let gamma = self.chart.christoffel_at(x)?;
        let n = self.chart.dim();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for jj in 0..n {
                    let mut value = dj[k][(i, jj)];
                    for l in 0..n {
                        value += gamma.get(i, k, l) * j[(l, jj)] - gamma.get(l, k, jj) * j[(i, l)];
                    }
                    worst = worst.max(value.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Fundamental 2-form `Ω(X, Y) = g(X, JY)`.
    pub fn fundamental_form_at(&self, x: &DVector<f64>, xv: &DVector<f64>, yv: &DVector<f64>) -> Result<f64> {
        let j = self.j_at(x)?;
        self.chart.inner(x, xv, &(&j * yv))
    }

    /// Residuals of the three curvature identities of a Kähler metric,
    /// evaluated on the pair `(Y, Z)`:
    /// commutation `R(Y,Z)J = J R(Y,Z)`, pair invariance `R(JY,JZ) = R(Y,Z)`,
    /// and the skew rule `R(JY,Z) = −R(Y,JZ)`.
    pub fn check_curvature_identities(
        &self,
        x: &DVector<f64>,
        yv: &DVector<f64>,
        zv: &DVector<f64>,
    ) -> Result<[f64; 3]> {
        let cache = GeometryCache::with_curvature(self.chart, x)?;
        let r = cache.curvature();
        let j = self.j_at(x)?;
        let jy = &j * yv;
        let jz = &j * zv;
        let r_yz = r.operator(yv, zv);
        let commute = (&r_yz * &j - &j * &r_yz).amax();
        let pair = (r.operator(&jy, &jz) - &r_yz).amax();
        let skew = (r.operator(&jy, zv) + r.operator(yv, &jz)).amax();
        Ok([commute, pair, skew])
    }
}
