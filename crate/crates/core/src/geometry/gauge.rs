//! Weyl gauge transformations and the gauge in which the density is constant.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::chart::MetricChart;
use super::weyl::{density_weight, DensityField, ScalarFn, WeylFrame};
use crate::error::{CqgError, Result};
use crate::fields::{wave_weight, WaveField};
use crate::numerics::{fd_gradient, FiniteDiff, RandomStream};

/// Conformal weights of the fields that transform simply, for chart dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub metric: f64,
    pub inverse_metric: f64,
    pub sqrt_det: f64,
    pub density: f64,
    pub wave: f64,
    pub scalar_curvature: f64,
    pub current: f64,
    pub action: f64,
}

impl WeightTable {
    pub fn for_dimension(n: usize) -> Self {
        Self {
            metric: 1.0,
            inverse_metric: -1.0,
            sqrt_det: n as f64 / 2.0,
            density: density_weight(n),
            wave: wave_weight(n),
            scalar_curvature: -1.0,
            current: 0.0,
            action: 0.0,
        }
    }
}

/// Positive gauge function `λ(q)`.
#[derive(Clone)]
pub struct GaugeFunction {
    lambda: Arc<ScalarFn>,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GaugeFunction")
    }
}

impl GaugeFunction {
    pub fn new<F>(lambda: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { lambda: Arc::new(lambda) }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(move |_| value)
    }

    /// `λ = exp(Σ_i c_i sin(m_i q_i + p_i))` with `|c_i| ≤ 0.15`, `m_i ∈ {1, 2}`
    /// and `p_i` drawn from the stream `(seed, index)`; smooth and positive.
    pub fn random_smooth(seed: u64, index: u128, n: usize) -> Self {
        let u = RandomStream::new(seed, index).random_uniform(3 * n);
        let terms: Vec<(f64, f64, f64)> = u
            .chunks(3)
            .map(|c| (0.3 * (c[0] - 0.5), if c[1] < 0.5 { 1.0 } else { 2.0 }, 2.0 * PI * c[2]))
            .collect();
        Self::new(move |q| {
            terms
                .iter()
                .zip(q)
                .map(|(&(c, m, p), x)| c * (m * x + p).sin())
                .sum::<f64>()
                .exp()
        })
    }

    pub fn value_unchecked(&self, q: &[f64]) -> f64 {
        (self.lambda)(q)
    }

    pub fn value(&self, q: &[f64]) -> Result<f64> {
        let v = self.value_unchecked(q);
        if !(v > 0.0 && v.is_finite()) {
            return Err(CqgError::InvalidGauge {
                value: v,
                point: q.to_vec(),
            });
        }
        Ok(v)
    }

    fn power(&self, exponent: f64) -> impl Fn(&[f64]) -> f64 + Send + Sync + 'static {
        let lambda = self.lambda.clone();
        move |q: &[f64]| lambda(q).powf(exponent)
    }
}

/// Fields after a gauge change, with the gauge that produced them.
#[derive(Debug, Clone)]
pub struct GaugedBundle {
    pub chart: MetricChart,
    pub rho: DensityField,
    pub psi: WaveField,
    pub frame: WeylFrame,
    pub lambda: GaugeFunction,
    pub weights: WeightTable,
}

/// `g → λg`, `ρ → λ^{-(n-2)/2}ρ`, `ψ → λ^{-(n-2)/4}ψ`, `φ_i → φ_i + ∂_iλ/(2λ)`.
///
/// `samples` are the points at which `λ > 0` is verified before any field is
/// built. The Weyl-vector shift is the one implied by `φ = −(1/(n−2)) ∂ log ρ`
/// and the density weight.
pub fn gauge_transform(
    rho: &DensityField,
    psi: &WaveField,
    frame: &WeylFrame,
    lambda: &GaugeFunction,
    samples: &[Vec<f64>],
    fd: &FiniteDiff,
) -> Result<GaugedBundle> {
    let chart = psi.chart();
    let n = chart.dim();
    for q in samples {
        lambda.value(q)?;
    }
    let weights = WeightTable::for_dimension(n);
    let new_chart = chart.conformal(format!("gauged({})", chart.name()), lambda.power(1.0));
    let new_rho = rho.scaled(lambda.power(weights.density));
    let new_psi = psi.on_chart(new_chart.clone(), lambda.power(weights.wave));

    let old_frame = frame.clone();
    let gauge = lambda.clone();
    let ranges = chart.ranges().to_vec();
    let fd = *fd;
    let new_frame = WeylFrame::new(new_chart.clone(), move |q| {
        let phi = old_frame.phi_at(q)?;
        let value = gauge.value(q)?;
        let grad: Vec<f64> = fd_gradient(|p: &[f64]| Ok(gauge.value_unchecked(p)), q, &fd, Some(&ranges))?;
        Ok(phi.iter().zip(grad).map(|(p, d)| p + d / (2.0 * value)).collect())
    });

    Ok(GaugedBundle {
        chart: new_chart,
        rho: new_rho,
        psi: new_psi,
        frame: new_frame,
        lambda: lambda.clone(),
        weights,
    })
}

/// The gauge `λ = |ψ|^{4/(n−2)}` in which the transformed density is constant.
pub fn riemann_gauge(psi: &WaveField, t: f64) -> Result<GaugeFunction> {
    let n = psi.chart().dim();
    if n <= 2 {
        return Err(CqgError::UnsupportedDimension(n));
    }
    let psi = psi.clone();
    let exponent = 4.0 / (n as f64 - 2.0);
    Ok(GaugeFunction::new(move |q| psi.value(q, t).norm().powf(exponent)))
}

/// `ḡ_ij = |ψ(q)|^{4/(n−2)} g_ij` at `q`.
pub fn riemann_gauge_metric(psi: &WaveField, q: &[f64], t: f64, node_tolerance: f64) -> Result<DMatrix<f64>> {
    let chart = psi.chart();
    let n = chart.dim();
    if n <= 2 {
        return Err(CqgError::UnsupportedDimension(n));
    }
    let amplitude = psi.value(q, t).norm();
    if !(amplitude > node_tolerance) {
        return Err(CqgError::Node {
            point: q.to_vec(),
            amplitude,
        });
    }
    Ok(chart.metric_at(q)? * amplitude.powf(4.0 / (n as f64 - 2.0)))
}
