//! Weyl vector, Weyl connection and Weyl scalar curvature.

use std::fmt;
use std::sync::Arc;

use super::chart::MetricChart;
use super::curvature::{christoffel, riemann_scalar, Rank3};
use crate::error::{CqgError, Result};
use crate::numerics::{fd_derivative, fd_gradient, FdValue, FiniteDiff, Order};

/// Smallest density accepted where `ρ` divides (an amplitude of 1e-12).
pub const DENSITY_FLOOR: f64 = 1e-24;

pub type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
pub type CovectorFn = dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync;

/// Conformal weight of a density on an `n`-dimensional chart.
pub fn density_weight(n: usize) -> f64 {
    -(n as f64 - 2.0) / 2.0
}

/// Positive density `ρ` carrying weight `-(n-2)/2`.
#[derive(Clone)]
pub struct DensityField {
    rho: Arc<ScalarFn>,
    weight: f64,
}

impl fmt::Debug for DensityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityField").field("weight", &self.weight).finish()
    }
}

impl DensityField {
    pub fn new<F>(n: usize, rho: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            rho: Arc::new(rho),
            weight: density_weight(n),
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::new(n, move |_| value)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn value_unchecked(&self, q: &[f64]) -> f64 {
        (self.rho)(q)
    }

    /// `ρ(q)`, or a node error when it is not safely positive.
    pub fn value(&self, q: &[f64]) -> Result<f64> {
        let rho = self.value_unchecked(q);
        if !(rho > DENSITY_FLOOR) {
            return Err(CqgError::Node {
                point: q.to_vec(),
                amplitude: rho.max(0.0).sqrt(),
            });
        }
        Ok(rho)
    }

    /// `ρ` multiplied pointwise by `factor(q)`, keeping the weight.
    pub fn scaled<F>(&self, factor: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let rho = self.rho.clone();
        Self {
            rho: Arc::new(move |q: &[f64]| rho(q) * factor(q)),
            weight: self.weight,
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n <= 2 {
        return Err(CqgError::UnsupportedDimension(n));
    }
    Ok(())
}

/// `φ_i = −(1/(n−2)) ∂_i ρ / ρ`.
pub fn weyl_vector(chart: &MetricChart, rho: &DensityField, q: &[f64], fd: &FiniteDiff) -> Result<Vec<f64>> {
    let n = chart.dim();
    check_dimension(n)?;
    let value = rho.value(q)?;
    let grad: Vec<f64> = fd_gradient(|p: &[f64]| Ok(rho.value_unchecked(p)), q, fd, Some(chart.ranges()))?;
    let k = -1.0 / (n as f64 - 2.0);
    Ok(grad.into_iter().map(|d| k * d / value).collect())
}

/// A chart together with a Weyl covector field.
#[derive(Clone)]
pub struct WeylFrame {
    pub chart: MetricChart,
    phi: Arc<CovectorFn>,
}

impl fmt::Debug for WeylFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylFrame").field("chart", &self.chart).finish()
    }
}

impl WeylFrame {
    pub fn new<F>(chart: MetricChart, phi: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        Self {
            chart,
            phi: Arc::new(phi),
        }
    }

    /// Frame whose Weyl vector is the log-gradient of `rho`.
    pub fn from_density(chart: MetricChart, rho: DensityField, fd: FiniteDiff) -> Self {
        let c = chart.clone();
        Self::new(chart, move |q| weyl_vector(&c, &rho, q, &fd))
    }

    pub fn phi_at(&self, q: &[f64]) -> Result<Vec<f64>> {
        (self.phi)(q)
    }

    /// Largest `|∂_i φ_j − ∂_j φ_i|` at `q`.
    pub fn curl(&self, q: &[f64], fd: &FiniteDiff) -> Result<f64> {
        let n = self.chart.dim();
        let d: Vec<Vec<f64>> = fd_gradient(|p: &[f64]| self.phi_at(p), q, fd, Some(self.chart.ranges()))?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((d[i][j] - d[j][i]).abs());
            }
        }
        Ok(worst)
    }
}

/// `Γ^i_jk = −{i over jk} + δ^i_j φ_k + δ^i_k φ_j − g_jk φ^i`.
///
/// The sign of the last term is the one that makes the connection invariant
/// under `g → λg`, `ρ → λ^{-(n-2)/2} ρ` with `φ` the log-gradient of `ρ`.
pub fn weyl_connection(frame: &WeylFrame, q: &[f64], fd: &FiniteDiff) -> Result<Rank3> {
    let chart = &frame.chart;
    let n = chart.dim();
    let symbols = christoffel(chart, q, fd)?;
    let local = chart.local_unchecked(q)?;
    let phi = frame.phi_at(q)?;
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(CqgError::Internal(format!("non-finite Weyl vector at {q:?}")));
    }
    let phi_up = local.raise(&phi);
    let mut out = Rank3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut v = -symbols.get(i, j, k) - local.g[(j, k)] * phi_up[i];
                if i == j {
                    v += phi[k];
                }
                if i == k {
                    v += phi[j];
                }
                out.set(i, j, k, v);
                out.set(i, k, j, v);
            }
        }
    }
    Ok(out)
}

/// `(1/√g) ∂_i(√g g^{ij} ∂_j f)` by nested central differences.
pub(crate) fn laplace_beltrami<V, F>(chart: &MetricChart, f: F, q: &[f64], fd: &FiniteDiff) -> Result<V>
where
    V: FdValue,
    F: Fn(&[f64]) -> Result<V>,
{
    let n = chart.dim();
    let flux = |p: &[f64], i: usize| -> Result<V> {
        let local = chart.local_unchecked(p)?;
        let grad: Vec<V> = fd_gradient(&f, p, fd, Some(chart.ranges()))?;
        let mut acc = grad[0].combine(local.sqrt_det * local.inv[(i, 0)], &grad[0], 0.0);
        for (j, gj) in grad.iter().enumerate().skip(1) {
            acc = acc.combine(1.0, gj, local.sqrt_det * local.inv[(i, j)]);
        }
        Ok(acc)
    };
    let sqrt_det = chart.local_unchecked(q)?.sqrt_det;
    let mut total: Option<V> = None;
    for i in 0..n {
        let d = fd_derivative(|p: &[f64]| flux(p, i), q, i, Order::First, fd, Some(chart.ranges()))?.value;
        total = Some(match total {
            None => d,
            Some(t) => t.combine(1.0, &d, 1.0),
        });
    }
    let total = total.ok_or(CqgError::UnsupportedDimension(0))?;
    Ok(total.combine(1.0 / sqrt_det, &total, 0.0))
}

/// Density part of the Weyl scalar curvature,
/// `((n−1)/(n−2)) [ g^{ij}∂_iρ∂_jρ/ρ² − 2 ∂_i(√g g^{ij}∂_jρ)/(ρ√g) ]`.
pub fn weyl_density_term(chart: &MetricChart, rho: &DensityField, q: &[f64], fd: &FiniteDiff) -> Result<f64> {
    let n = chart.dim();
    check_dimension(n)?;
    chart.check_regular(q)?;
    let value = rho.value(q)?;
    let f = |p: &[f64]| Ok(rho.value_unchecked(p));
    let local = chart.local_unchecked(q)?;
    let grad: Vec<f64> = fd_gradient(f, q, fd, Some(chart.ranges()))?;
    let gradient_sq = local.inner_inverse(&grad, &grad) / (value * value);
    let lap: f64 = laplace_beltrami(chart, f, q, fd)?;
    let coefficient = (n as f64 - 1.0) / (n as f64 - 2.0);
    Ok(coefficient * (gradient_sq - 2.0 * lap / value))
}

/// Weyl scalar curvature `R = R̄ + ((n−1)/(n−2))[…]`.
pub fn weyl_scalar(chart: &MetricChart, rho: &DensityField, q: &[f64], fd: &FiniteDiff) -> Result<f64> {
    let density = weyl_density_term(chart, rho, q, fd)?;
    Ok(riemann_scalar(chart, q, fd)? + density)
}
