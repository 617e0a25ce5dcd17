//! Currents, velocities and the residuals of the field equations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wave::{xi, ActionField, Units, WaveField};
use crate::error::Result;
use crate::geometry::{laplace_beltrami, riemann_scalar, weyl_scalar, DensityField, LocalMetric, MetricChart};
use crate::numerics::{fd_derivative, FiniteDiff, Order};

/// Contravariant current density `j^i` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentSample {
    pub j: Vec<f64>,
}

/// `∂_i σ` with `σ = S/(ξħ)`.
fn sigma_gradient(chart: &MetricChart, action: &ActionField, q: &[f64], fd: &FiniteDiff, units: &Units) -> Result<Vec<f64>> {
    let k = 1.0 / (xi(chart.dim()) * units.hbar);
    Ok(action
        .gradient(q, fd, chart.ranges(), units)?
        .into_iter()
        .map(|d| d * k)
        .collect())
}

fn current_at(
    chart: &MetricChart,
    local: &LocalMetric,
    rho: f64,
    action: &ActionField,
    q: &[f64],
    fd: &FiniteDiff,
    units: &Units,
) -> Result<Vec<f64>> {
    let grad = sigma_gradient(chart, action, q, fd, units)?;
    let scale = local.sqrt_det * rho;
    Ok(local.raise(&grad).into_iter().map(|v| v * scale).collect())
}

/// `j^i = √g ρ g^{ij} ∂_j σ`.
pub fn current_density(
    chart: &MetricChart,
    rho: &DensityField,
    action: &ActionField,
    q: &[f64],
    fd: &FiniteDiff,
    units: &Units,
) -> Result<CurrentSample> {
    let local = chart.local(q)?;
    let j = current_at(chart, &local, rho.value_unchecked(q), action, q, fd, units)?;
    Ok(CurrentSample { j })
}

/// `g^{ij} ∂_i σ ∂_j σ + R` with `R` the Weyl scalar curvature of `ρ`.
pub fn hje_residual(
    chart: &MetricChart,
    rho: &DensityField,
    action: &ActionField,
    q: &[f64],
    fd: &FiniteDiff,
    units: &Units,
) -> Result<f64> {
    let local = chart.local(q)?;
    let grad = sigma_gradient(chart, action, q, fd, units)?;
    Ok(local.inner_inverse(&grad, &grad) + weyl_scalar(chart, rho, q, fd)?)
}

/// `(1/√g) ∂_i(√g ρ g^{ij} ∂_j σ)`.
pub fn continuity_residual(
    chart: &MetricChart,
    rho: &DensityField,
    action: &ActionField,
    q: &[f64],
    fd: &FiniteDiff,
    units: &Units,
) -> Result<f64> {
    let sqrt_det = chart.local(q)?.sqrt_det;
    let mut total = 0.0;
    for i in 0..chart.dim() {
        let component = |p: &[f64]| -> Result<f64> {
            let local = chart.local_unchecked(p)?;
            Ok(current_at(chart, &local, rho.value_unchecked(p), action, p, fd, units)?[i])
        };
        total += fd_derivative(component, q, i, Order::First, fd, Some(chart.ranges()))?.value;
    }
    Ok(total / sqrt_det)
}

/// `g^{ij} ∂_j S`, the trajectory tangent.
pub fn velocity_field(
    chart: &MetricChart,
    action: &ActionField,
    q: &[f64],
    fd: &FiniteDiff,
    units: &Units,
) -> Result<Vec<f64>> {
    let local = chart.local(q)?;
    Ok(local.raise(&action.gradient(q, fd, chart.ranges(), units)?))
}

/// `∇_k∇^k ψ − ξ² R̄ ψ` on the chart of `psi`.
pub fn conformal_wave_residual(psi: &WaveField, q: &[f64], t: f64, fd: &FiniteDiff) -> Result<Complex64> {
    let chart = psi.chart();
    chart.check_regular(q)?;
    let lap: Complex64 = laplace_beltrami(chart, |p: &[f64]| Ok(psi.value(p, t)), q, fd)?;
    let x = xi(chart.dim());
    Ok(lap - psi.value(q, t) * (x * x * riemann_scalar(chart, q, fd)?))
}

/// The value the conformal wave residual takes for `ψ = √ρ e^{iξσ}` given the
/// two real residuals: `ψ (−ξ² hje + iξ continuity/ρ)`.
pub fn ansatz_combination(psi: Complex64, rho: f64, hje: f64, continuity: f64, n: usize) -> Complex64 {
    let x = xi(n);
    psi * Complex64::new(-x * x * hje, x * continuity / rho)
}
