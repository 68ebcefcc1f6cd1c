//! Lifts to the cotangent bundle and the Berger-type deformed Sasaki metric.
//!
//! A tangent vector to `T*M` at `(x, p)` splits into a horizontal part (a base
//! vector `X`) and a vertical part (a base covector `ω`); see [`LiftedVector`].
//! On that decomposition the deformed metric is
//!
//! ```text
//! BSg(HX, HY) = g(X, Y)
//! BSg(HX, Vθ) = 0
//! BSg(Vω, Vθ) = g⁻¹(ω, θ) + δ² g⁻¹(ω, pJ) g⁻¹(θ, pJ)
//! ```
//!
//! with `δ` a real constant; `δ = 0` recovers the classical Sasaki metric.
//! Writing `r² = g⁻¹(p, p)` and `λ = 1 + δ²r²`, the Levi-Civita connection of
//! `BSg` on a Kähler base is given by closed-form lift formulas implemented in
//! [`BergerSasakiConfig::bs_connection`]; the induced connection of the unit
//! cotangent bundle `r² = 1` is [`BergerSasakiConfig::unit_bundle_connection`].
//! Every formula here is cross-checked against the coordinate-chart oracle in
//! [`crate::oracle`].

use nalgebra::{DMatrix, DVector};

use crate::chart::{GeometryCache, ManifoldChart};
use crate::error::{Error, Result};
use crate::kahler::KahlerStructure;

/// Membership tolerance for the unit cotangent bundle `|r² − 1|`.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Tolerance on `g⁻¹(ω, p)` for a fiber direction to count as tangential.
pub const TANGENTIAL_TOLERANCE: f64 = 1e-8;

/// A point of the cotangent bundle: base coordinates `x` and fiber covector `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentPoint {
    pub x: DVector<f64>,
    pub p: DVector<f64>,
}

impl CotangentPoint {
    pub fn new(x: DVector<f64>, p: DVector<f64>) -> Self {
        assert_eq!(x.len(), p.len(), "base point and fiber must share the dimension");
        CotangentPoint { x, p }
    }
}

/// A tangent vector to `T*M` in the adapted decomposition: `HX + Vω`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector {
    /// Base vector `X` (the horizontal part).
    pub horizontal: DVector<f64>,
    /// Base covector `ω` (the vertical part).
    pub vertical: DVector<f64>,
}

impl LiftedVector {
    pub fn new(horizontal: DVector<f64>, vertical: DVector<f64>) -> Self {
        assert_eq!(horizontal.len(), vertical.len());
        LiftedVector { horizontal, vertical }
    }

    pub fn zero(dim: usize) -> Self {
        LiftedVector {
            horizontal: DVector::zeros(dim),
            vertical: DVector::zeros(dim),
        }
    }

    pub fn horizontal(x: DVector<f64>) -> Self {
        let dim = x.len();
        LiftedVector {
            horizontal: x,
            vertical: DVector::zeros(dim),
        }
    }

    pub fn vertical(omega: DVector<f64>) -> Self {
        let dim = omega.len();
        LiftedVector {
            horizontal: DVector::zeros(dim),
            vertical: omega,
        }
    }

    pub fn dim(&self) -> usize {
        self.horizontal.len()
    }

    pub fn amax(&self) -> f64 {
        self.horizontal.amax().max(self.vertical.amax())
    }
}

impl std::ops::Add for &LiftedVector {
    type Output = LiftedVector;
    fn add(self, other: &LiftedVector) -> LiftedVector {
        LiftedVector {
            horizontal: &self.horizontal + &other.horizontal,
            vertical: &self.vertical + &other.vertical,
        }
    }
}

impl std::ops::Sub for &LiftedVector {
    type Output = LiftedVector;
    fn sub(self, other: &LiftedVector) -> LiftedVector {
        LiftedVector {
            horizontal: &self.horizontal - &other.horizontal,
            vertical: &self.vertical - &other.vertical,
        }
    }
}

impl std::ops::Mul<f64> for &LiftedVector {
    type Output = LiftedVector;
    fn mul(self, scale: f64) -> LiftedVector {
        LiftedVector {
            horizontal: &self.horizontal * scale,
            vertical: &self.vertical * scale,
        }
    }
}

/// First-order data of a lifted field `HY + Vθ` at a point, as consumed by the
/// connection formulas: the value and, when the differentiation direction has
/// a horizontal part `X`, the base covariant derivatives `∇_X Y` and `∇_X θ`.
///
/// The connection is a pointwise formula in everything except those two
/// derivatives, so callers supply them instead of a differentiable field.
#[derive(Debug, Clone)]
pub struct LiftedGerm {
    pub value: LiftedVector,
    /// `∇_X Y` for the horizontal part of the direction.
    pub horizontal_derivative: Option<DVector<f64>>,
    /// `∇_X θ` for the horizontal part of the direction.
    pub vertical_derivative: Option<DVector<f64>>,
}

impl LiftedGerm {
    /// Germ with no derivative data; valid for purely vertical directions.
    pub fn pointwise(value: LiftedVector) -> Self {
        LiftedGerm {
            value,
            horizontal_derivative: None,
            vertical_derivative: None,
        }
    }

    pub fn with_derivatives(value: LiftedVector, nabla_y: DVector<f64>, nabla_theta: DVector<f64>) -> Self {
        LiftedGerm {
            value,
            horizontal_derivative: Some(nabla_y),
            vertical_derivative: Some(nabla_theta),
        }
    }
}

/// The deformed-metric configuration: a chart, its complex structure, and the
/// deformation constant `δ`.
pub struct BergerSasakiConfig<'a> {
    pub delta: f64,
    chart: &'a ManifoldChart,
}

/// Scalars and matrices shared by the pointwise formulas at one `(x, p)`.
struct FiberData {
    j: DMatrix<f64>,
    /// covector `pJ`
    pj: DVector<f64>,
    /// vector `p̃ = sharp(p)`
    p_sharp: DVector<f64>,
    /// vector `J p̃`
    jp_sharp: DVector<f64>,
    r2: f64,
    lambda: f64,
}

impl<'a> BergerSasakiConfig<'a> {
    pub fn new(chart: &'a ManifoldChart, delta: f64) -> Self {
        BergerSasakiConfig { delta, chart }
    }

    pub fn chart(&self) -> &ManifoldChart {
        self.chart
    }

    pub fn kahler(&self) -> KahlerStructure<'_> {
        KahlerStructure::new(self.chart)
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn fiber_data(&self, cache: &GeometryCache, cp: &CotangentPoint) -> Result<FiberData> {
        let j = self.chart.complex_structure_at(&cp.x)?;
        let pj = j.transpose() * &cp.p;
        let p_sharp = cache.sharp(&cp.p);
        let jp_sharp = &j * &p_sharp;
        let r2 = cache.inner_inv(&cp.p, &cp.p);
        Ok(FiberData {
            j,
            pj,
            p_sharp,
            jp_sharp,
            r2,
            lambda: 1.0 + self.delta * self.delta * r2,
        })
    }

    /// Fiber norm `r² = g⁻¹(p, p)`.
    pub fn r_squared(&self, cp: &CotangentPoint) -> Result<f64> {
        self.chart.inner_inv(&cp.x, &cp.p, &cp.p)
    }

    /// `λ = 1 + δ² r²`.
    pub fn lambda(&self, cp: &CotangentPoint) -> Result<f64> {
        Ok(1.0 + self.delta * self.delta * self.r_squared(cp)?)
    }

    /// The Liouville field `Vp`, which is the unit normal of the unit bundle.
    pub fn unit_normal(&self, cp: &CotangentPoint) -> LiftedVector {
        LiftedVector::vertical(cp.p.clone())
    }

    fn check_unit(&self, r2: f64) -> Result<()> {
        let deviation = (r2 - 1.0).abs();
        if deviation < UNIT_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotOnUnitBundle { deviation })
        }
    }

    /// Coordinates of the horizontal lift in the natural frame of `T*M`:
    /// first the `2m` base components `X`, then the fiber components
    /// `p_h Γ^h_{ij} X^j`.
    pub fn horizontal_lift_coords(&self, cp: &CotangentPoint, xv: &DVector<f64>) -> Result<DVector<f64>> {
        let gamma = self.chart.christoffel_at(&cp.x)?;
        let n = self.dim();
        let fiber = gamma.covector_term(&cp.p, xv);
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(xv);
        out.rows_mut(n, n).copy_from(&fiber);
        Ok(out)
    }

    /// The deformed metric evaluated on two lifted vectors.
    pub fn bs_metric(&self, cp: &CotangentPoint, u: &LiftedVector, v: &LiftedVector) -> Result<f64> {
        let cache = GeometryCache::new(self.chart, &cp.x)?;
        let fd = self.fiber_data(&cache, cp)?;
        Ok(self.bs_metric_with(&cache, &fd, u, v))
    }

    fn bs_metric_with(&self, cache: &GeometryCache, fd: &FiberData, u: &LiftedVector, v: &LiftedVector) -> f64 {
        let d2 = self.delta * self.delta;
        cache.inner(&u.horizontal, &v.horizontal)
            + cache.inner_inv(&u.vertical, &v.vertical)
            + d2 * cache.inner_inv(&u.vertical, &fd.pj) * cache.inner_inv(&v.vertical, &fd.pj)
    }

    /// Levi-Civita connection of the deformed metric, `∇_dir field`, assembled
    /// from the four lift cases:
    ///
    /// ```text
    /// ∇_HX HY = H(∇_X Y) + ½ V(pR(X, Y))
    /// ∇_HX Vθ = V(∇_X θ) + ½ [H(R(p̃, θ̃)X) − δ² g⁻¹(θ, pJ) H(R(p̃, Jp̃)X)]
    /// ∇_Vω HY =            ½ [H(R(p̃, ω̃)Y) − δ² g⁻¹(ω, pJ) H(R(p̃, Jp̃)Y)]
    /// ∇_Vω Vθ = δ² [g⁻¹(ω, pJ) V(θJ) + g⁻¹(θ, pJ) V(ωJ)]
    ///           − (δ⁴/λ) [g⁻¹(ω, pJ) g⁻¹(θ, p) + g⁻¹(ω, p) g⁻¹(θ, pJ)] V(pJ)
    /// ```
    pub fn bs_connection(&self, cp: &CotangentPoint, dir: &LiftedVector, germ: &LiftedGerm) -> Result<LiftedVector> {
        let cache = GeometryCache::with_curvature(self.chart, &cp.x)?;
        let fd = self.fiber_data(&cache, cp)?;
        self.bs_connection_with(&cache, &fd, cp, dir, germ)
    }

    fn bs_connection_with(
        &self,
        cache: &GeometryCache,
        fd: &FiberData,
        cp: &CotangentPoint,
        dir: &LiftedVector,
        germ: &LiftedGerm,
    ) -> Result<LiftedVector> {
        let n = self.dim();
        let d2 = self.delta * self.delta;
        let riemann = cache.curvature();
        let x = &dir.horizontal;
        let omega = &dir.vertical;
        let y = &germ.value.horizontal;
        let theta = &germ.value.vertical;

        let has_horizontal_dir = x.amax() > 0.0;
        let (nabla_y, nabla_theta) = if has_horizontal_dir {
            let ny = germ.horizontal_derivative.as_ref().ok_or(Error::MissingDerivative)?;
            let nt = germ.vertical_derivative.as_ref().ok_or(Error::MissingDerivative)?;
            (ny.clone(), nt.clone())
        } else {
            (DVector::zeros(n), DVector::zeros(n))
        };

        let theta_sharp = cache.sharp(theta);
        let omega_sharp = cache.sharp(omega);
        let r_p_theta = riemann.operator(&fd.p_sharp, &theta_sharp);
        let r_p_omega = riemann.operator(&fd.p_sharp, &omega_sharp);
        let r_p_jp = riemann.operator(&fd.p_sharp, &fd.jp_sharp);

        let theta_pj = cache.inner_inv(theta, &fd.pj);
        let omega_pj = cache.inner_inv(omega, &fd.pj);

        let mut horizontal = nabla_y.clone();
        horizontal += (&r_p_theta * x - (&r_p_jp * x) * (d2 * theta_pj)) * 0.5;
        horizontal += (&r_p_omega * y - (&r_p_jp * y) * (d2 * omega_pj)) * 0.5;

        let mut vertical = nabla_theta.clone();
        vertical += riemann.contract_covector(&cp.p, x, y) * 0.5;

        // vertical-vertical case
        let theta_p = cache.inner_inv(theta, &cp.p);
        let omega_p = cache.inner_inv(omega, &cp.p);
        let theta_j = fd.j.transpose() * theta;
        let omega_j = fd.j.transpose() * omega;
        vertical += (theta_j * omega_pj + omega_j * theta_pj) * d2;
        vertical -= &fd.pj * (d2 * d2 / fd.lambda * (omega_pj * theta_p + omega_p * theta_pj));

        Ok(LiftedVector::new(horizontal, vertical))
    }

    /// Covariant derivative of the Liouville field `Vp` in the direction
    /// `HX + Vω`:  `Vω + (δ²/λ) g⁻¹(ω, pJ) V(pJ)`. The horizontal part of the
    /// direction contributes nothing (`∇_HX Vp = 0`).
    pub fn liouville_derivative(&self, cp: &CotangentPoint, dir: &LiftedVector) -> Result<LiftedVector> {
        let cache = GeometryCache::new(self.chart, &cp.x)?;
        let fd = self.fiber_data(&cache, cp)?;
        let d2 = self.delta * self.delta;
        let omega_pj = cache.inner_inv(&dir.vertical, &fd.pj);
        let vertical = &dir.vertical + &fd.pj * (d2 / fd.lambda * omega_pj);
        Ok(LiftedVector::vertical(vertical))
    }

    /// Tangential lift `Tω = Vω − g⁻¹(ω, p) Vp` of a covector to a point of the
    /// unit bundle.
    pub fn tangential_lift(&self, cp: &CotangentPoint, omega: &DVector<f64>) -> Result<LiftedVector> {
        let cache = GeometryCache::new(self.chart, &cp.x)?;
        let r2 = cache.inner_inv(&cp.p, &cp.p);
        self.check_unit(r2)?;
        let coeff = cache.inner_inv(omega, &cp.p);
        Ok(LiftedVector::vertical(omega - &cp.p * coeff))
    }

    /// Levi-Civita connection of the induced metric on the unit bundle, for a
    /// direction `HX + Tω` (the fiber part must already be tangential) and a
    /// lifted field germ `HY + Tθ`:
    ///
    /// ```text
    /// ∇̂_HX HY = H(∇_X Y) + ½ T(pR(X, Y))
    /// ∇̂_HX Tθ = T(∇_X θ) + ½ [H(R(p̃, θ̃)X) − δ² g⁻¹(θ, pJ) H(R(p̃, Jp̃)X)]
    /// ∇̂_Tω HY =            ½ [H(R(p̃, ω̃)Y) − δ² g⁻¹(ω, pJ) H(R(p̃, Jp̃)Y)]
    /// ∇̂_Tω Tθ = −g⁻¹(θ, p) Tω + δ² [g⁻¹(ω, pJ) T(θJ) + g⁻¹(θ, pJ) T(ωJ)]
    ///           − δ² [g⁻¹(ω, pJ) g⁻¹(θ, p) + g⁻¹(ω, p) g⁻¹(θ, pJ)] T(pJ)
    /// ```
    pub fn unit_bundle_connection(
        &self,
        cp: &CotangentPoint,
        dir: &LiftedVector,
        germ: &LiftedGerm,
    ) -> Result<LiftedVector> {
        let cache = GeometryCache::with_curvature(self.chart, &cp.x)?;
        let fd = self.fiber_data(&cache, cp)?;
        self.check_unit(fd.r2)?;
        let omega = &dir.vertical;
        let omega_p = cache.inner_inv(omega, &cp.p);
        if omega_p.abs() > TANGENTIAL_TOLERANCE {
            return Err(Error::NonTangentialArgument { inner: omega_p });
        }

        let n = self.dim();
        let d2 = self.delta * self.delta;
        let riemann = cache.curvature();
        let x = &dir.horizontal;
        let y = &germ.value.horizontal;
        let theta = &germ.value.vertical;

        let has_horizontal_dir = x.amax() > 0.0;
        let (nabla_y, nabla_theta) = if has_horizontal_dir {
            let ny = germ.horizontal_derivative.as_ref().ok_or(Error::MissingDerivative)?;
            let nt = germ.vertical_derivative.as_ref().ok_or(Error::MissingDerivative)?;
            (ny.clone(), nt.clone())
        } else {
            (DVector::zeros(n), DVector::zeros(n))
        };

        let project = |alpha: DVector<f64>| -> DVector<f64> {
            let coeff = cache.inner_inv(&alpha, &cp.p) / fd.r2;
            alpha - &cp.p * coeff
        };

        let theta_sharp = cache.sharp(theta);
        let omega_sharp = cache.sharp(omega);
        let r_p_theta = riemann.operator(&fd.p_sharp, &theta_sharp);
        let r_p_omega = riemann.operator(&fd.p_sharp, &omega_sharp);
        let r_p_jp = riemann.operator(&fd.p_sharp, &fd.jp_sharp);

        let theta_pj = cache.inner_inv(theta, &fd.pj);
        let omega_pj = cache.inner_inv(omega, &fd.pj);
        let theta_p = cache.inner_inv(theta, &cp.p);

        let mut horizontal = nabla_y.clone();
        horizontal += (&r_p_theta * x - (&r_p_jp * x) * (d2 * theta_pj)) * 0.5;
        horizontal += (&r_p_omega * y - (&r_p_jp * y) * (d2 * omega_pj)) * 0.5;

        let mut vertical = project(nabla_theta);
        vertical += project(riemann.contract_covector(&cp.p, x, y)) * 0.5;

        // tangential-tangential case
        let theta_j = fd.j.transpose() * theta;
        let omega_j = fd.j.transpose() * omega;
        vertical -= omega * theta_p;
        vertical += (project(theta_j) * omega_pj + project(omega_j) * theta_pj) * d2;
        vertical -= project(fd.pj.clone()) * (d2 * (omega_pj * theta_p + omega_p * theta_pj));

        Ok(LiftedVector::new(horizontal, vertical))
    }

    /// The deformed curvature operator
    /// `ℛ(ϑ̃′, ϑ̃) = R(ϑ̃′, ϑ̃) + δ² g⁻¹(ϑ′, ϑJ) R(ϑ̃, Jϑ̃)` as a matrix acting
    /// on base tangent vectors.
    pub fn cal_r(&self, cp: &CotangentPoint, theta_prime: &DVector<f64>, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let cache = GeometryCache::with_curvature(self.chart, &cp.x)?;
        Ok(self.cal_r_with(&cache, theta_prime, theta))
    }

    pub(crate) fn cal_r_with(
        &self,
        cache: &GeometryCache,
        theta_prime: &DVector<f64>,
        theta: &DVector<f64>,
    ) -> DMatrix<f64> {
        let riemann = cache.curvature();
        let j = (self.chart.complex_structure_at(&cache.point)).expect("point validated by cache");
        let tp_sharp = cache.sharp(theta_prime);
        let t_sharp = cache.sharp(theta);
        let jt_sharp = &j * &t_sharp;
        let mu = cache.inner_inv(theta_prime, &(j.transpose() * theta));
        riemann.operator(&tp_sharp, &t_sharp) + riemann.operator(&t_sharp, &jt_sharp) * (self.delta * self.delta * mu)
    }
}
