//! Particle flux through a detector surface.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::residuals::current_density;
use super::wave::{xi, ActionField, Units, WaveField};
use crate::error::{CqgError, Result};
use crate::geometry::{DensityField, MetricChart};
use crate::numerics::{fd_gradient, tensor_quadrature_with, Axis, FiniteDiff, QuadratureSpec};

/// A flat disk in the spatial block `(x, y, z)` times the remaining
/// coordinates, which are integrated with `internal`.
#[derive(Debug, Clone)]
pub struct DetectorSurface {
    pub center: [f64; 3],
    /// Covector over the whole chart; only the first three entries may be nonzero.
    pub normal: Vec<f64>,
    pub radius: f64,
    pub radial_nodes: usize,
    pub azimuth_nodes: usize,
    pub internal: QuadratureSpec,
}

impl DetectorSurface {
    fn validate(&self, n: usize) -> Result<([f64; 3], [f64; 3], [f64; 3])> {
        if self.normal.len() != n {
            return Err(CqgError::InvalidSurface(format!(
                "normal has {} components, chart has {n}",
                self.normal.len()
            )));
        }
        if self.normal[3..].iter().any(|v| *v != 0.0) {
            return Err(CqgError::InvalidSurface("normal has non-spatial components".into()));
        }
        if self.internal.dim() + 3 != n {
            return Err(CqgError::InvalidSurface(format!(
                "internal quadrature covers {} coordinates, chart needs {}",
                self.internal.dim(),
                n - 3
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(CqgError::InvalidSurface(format!("radius {}", self.radius)));
        }
        let len = self.normal[..3].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(len > 0.0 && len.is_finite()) {
            return Err(CqgError::InvalidSurface("zero spatial normal".into()));
        }
        let unit = [self.normal[0] / len, self.normal[1] / len, self.normal[2] / len];
        // any vector not parallel to the normal seeds the in-plane frame
        let seed = if unit[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = normalize(cross(unit, seed));
        let e2 = cross(unit, e1);
        Ok((unit, e1, e2))
    }

    fn disk_spec(&self) -> Result<QuadratureSpec> {
        QuadratureSpec::new(vec![
            Axis::gauss_legendre(0.0, self.radius, self.radial_nodes),
            Axis::periodic(0.0, 2.0 * PI, self.azimuth_nodes),
        ])
    }

    fn disk_point(&self, e1: [f64; 3], e2: [f64; 3], r: f64, phi: f64) -> [f64; 3] {
        let (s, c) = phi.sin_cos();
        [0, 1, 2].map(|i| self.center[i] + r * (c * e1[i] + s * e2[i]))
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / len)
}

/// `Φ = ∫_Σ j^i n_i dΣ` with `dΣ = r dr dφ` times the internal coordinate measure.
pub fn detector_flux<J>(chart: &MetricChart, current: J, surface: &DetectorSurface) -> Result<f64>
where
    J: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let n = chart.dim();
    let (_, e1, e2) = surface.validate(n)?;
    let spec = surface.disk_spec()?.product(&surface.internal);
    let normal = &surface.normal;
    tensor_quadrature_with(
        |p| {
            let x = surface.disk_point(e1, e2, p[0], p[1]);
            let mut q = Vec::with_capacity(n);
            q.extend_from_slice(&x);
            q.extend_from_slice(&p[2..]);
            let j = current(&q)?;
            Ok(p[0] * j.iter().zip(normal).map(|(a, b)| a * b).sum::<f64>())
        },
        &spec,
    )
}

/// Current of `(ρ, S)` on `chart` as a closure for [`detector_flux`].
pub fn current_field<'a>(
    chart: &'a MetricChart,
    rho: &'a DensityField,
    action: &'a ActionField,
    fd: &'a FiniteDiff,
    units: &'a Units,
) -> impl Fn(&[f64]) -> Result<Vec<f64>> + Sync + 'a {
    move |q| Ok(current_density(chart, rho, action, q, fd, units)?.j)
}

pub type SpatialFn = dyn Fn(&[f64], f64) -> Complex64 + Send + Sync;
pub type InternalFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// `ψ = ψ₁(x, t) ψ₂(internal)`.
#[derive(Clone)]
pub struct FactorizedState {
    spatial: Arc<SpatialFn>,
    internal: Arc<InternalFn>,
}

impl fmt::Debug for FactorizedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FactorizedState")
    }
}

impl FactorizedState {
    pub fn new<S, I>(spatial: S, internal: I) -> Self
    where
        S: Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
        I: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            spatial: Arc::new(spatial),
            internal: Arc::new(internal),
        }
    }

    /// The product wave on `chart`, spatial coordinates first.
    pub fn wave(&self, chart: MetricChart) -> WaveField {
        let (s, i) = (self.spatial.clone(), self.internal.clone());
        WaveField::new(chart, move |q, t| s(&q[..3], t) * i(&q[3..]))
    }
}

/// Flux of a factorized state as (spatial flux) × (internal density integral).
///
/// The spatial factor is `∫_A |ψ₁|² ∂_i σ₁ n^i dA` and the internal factor is
/// `∫ |ψ₂|² √g dq` over the internal coordinates, which requires the chart's
/// spatial block to be the identity.
pub fn factorized_flux(
    chart: &MetricChart,
    state: &FactorizedState,
    surface: &DetectorSurface,
    t: f64,
    fd: &FiniteDiff,
    units: &Units,
) -> Result<f64> {
    let n = chart.dim();
    let (unit, e1, e2) = surface.validate(n)?;
    let k = 1.0 / (xi(n) * units.hbar);
    let spatial = tensor_quadrature_with(
        |p| {
            let x = surface.disk_point(e1, e2, p[0], p[1]);
            let value = (state.spatial)(&x, t);
            let rho = value.norm_sqr();
            if !(rho.sqrt() > units.node_tolerance) {
                return Err(CqgError::Node {
                    point: x.to_vec(),
                    amplitude: rho.sqrt(),
                });
            }
            let grad: Vec<Complex64> = fd_gradient(|y: &[f64]| Ok((state.spatial)(y, t)), &x, fd, None)?;
            let flux: f64 = grad.iter().zip(unit).map(|(d, u)| (value.conj() * d).im * u).sum();
            Ok(p[0] * units.hbar * k * flux)
        },
        &surface.disk_spec()?,
    )?;
    let internal = tensor_quadrature_with(
        |p| {
            let mut q = surface.center.to_vec();
            q.extend_from_slice(p);
            let sqrt_det = chart.local_unchecked(&q)?.sqrt_det;
            Ok((state.internal)(p).norm_sqr() * sqrt_det)
        },
        &surface.internal,
    )?;
    Ok(spatial * internal)
}
