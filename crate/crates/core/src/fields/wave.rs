use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CqgError, Result};
use crate::geometry::{DensityField, MetricChart};
use crate::numerics::{fd_gradient, CoordRange, FiniteDiff};

pub type WaveFn = dyn Fn(&[f64], f64) -> Complex64 + Send + Sync;
pub type ActionFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Conformal weight of the wave field on an `n`-dimensional chart.
pub fn wave_weight(n: usize) -> f64 {
    -(n as f64 - 2.0) / 4.0
}

/// `ξ = √((n−2)/(4(n−1)))`.
pub fn xi(n: usize) -> f64 {
    ((n as f64 - 2.0) / (4.0 * (n as f64 - 1.0))).sqrt()
}

/// Unit constant and node tolerance shared by the field kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub node_tolerance: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            node_tolerance: 1e-12,
        }
    }
}

/// Complex scalar field `ψ(q, t)` on a chart, weight `-(n-2)/4`.
#[derive(Clone)]
pub struct WaveField {
    chart: MetricChart,
    psi: Arc<WaveFn>,
    weight: f64,
}

impl fmt::Debug for WaveField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveField")
            .field("chart", &self.chart.name())
            .field("weight", &self.weight)
            .finish()
    }
}

impl WaveField {
    pub fn new<F>(chart: MetricChart, psi: F) -> Self
    where
        F: Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
    {
        let weight = wave_weight(chart.dim());
        Self {
            chart,
            psi: Arc::new(psi),
            weight,
        }
    }

    /// Like [`WaveField::new`] but rejects a declared weight other than `-(n-2)/4`.
    pub fn with_weight<F>(chart: MetricChart, psi: F, weight: f64) -> Result<Self>
    where
        F: Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
    {
        let expected = wave_weight(chart.dim());
        if weight != expected {
            return Err(CqgError::WeightMismatch {
                expected,
                actual: weight,
            });
        }
        Ok(Self::new(chart, psi))
    }

    pub fn chart(&self) -> &MetricChart {
        &self.chart
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn value(&self, q: &[f64], t: f64) -> Complex64 {
        (self.psi)(q, t)
    }

    /// Same amplitude on another chart (used after a gauge change).
    pub fn on_chart<F>(&self, chart: MetricChart, factor: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let psi = self.psi.clone();
        Self::new(chart, move |q, t| psi(q, t) * factor(q))
    }

    /// `ρ = |ψ|²` at time `t`.
    pub fn density(&self, t: f64) -> DensityField {
        let psi = self.psi.clone();
        DensityField::new(self.chart.dim(), move |q| psi(q, t).norm_sqr())
    }

    /// Action `S = ħ arg ψ` at time `t`, differentiated through `ψ`.
    pub fn action(&self, t: f64) -> ActionField {
        ActionField::Wave { psi: self.clone(), t }
    }
}

/// `ρ`, `S` and `σ = S/(ξħ)` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarDecomposition {
    pub rho: f64,
    pub action: f64,
    pub sigma: f64,
}

/// Polar decomposition with the principal phase.
pub fn decompose(psi: &WaveField, q: &[f64], t: f64, units: &Units) -> Result<PolarDecomposition> {
    let value = psi.value(q, t);
    let amplitude = value.norm();
    if !(amplitude > units.node_tolerance) {
        return Err(CqgError::Node {
            point: q.to_vec(),
            amplitude,
        });
    }
    let action = units.hbar * value.arg();
    Ok(PolarDecomposition {
        rho: amplitude * amplitude,
        action,
        sigma: action / (xi(psi.chart().dim()) * units.hbar),
    })
}

/// Polar decomposition whose action is the branch nearest `previous_action`.
pub fn decompose_continued(
    psi: &WaveField,
    q: &[f64],
    t: f64,
    units: &Units,
    previous_action: f64,
) -> Result<PolarDecomposition> {
    let mut d = decompose(psi, q, t, units)?;
    let period = 2.0 * PI * units.hbar;
    let turns = ((previous_action - d.action) / period).round();
    d.action += turns * period;
    d.sigma = d.action / (xi(psi.chart().dim()) * units.hbar);
    Ok(d)
}

/// `√ρ e^{iS/ħ}`.
pub fn compose(d: &PolarDecomposition, units: &Units) -> Complex64 {
    Complex64::from_polar(d.rho.sqrt(), d.action / units.hbar)
}

/// An action field `S(q)` (units of ħ) either given in closed form or read
/// off the phase of a wave field.
#[derive(Clone)]
pub enum ActionField {
    Closed(Arc<ActionFn>),
    Wave { psi: WaveField, t: f64 },
}

impl fmt::Debug for ActionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionField::Closed(_) => f.write_str("ActionField::Closed"),
            ActionField::Wave { psi, t } => f.debug_struct("ActionField::Wave").field("psi", psi).field("t", t).finish(),
        }
    }
}

impl ActionField {
    pub fn closed<F>(s: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ActionField::Closed(Arc::new(s))
    }

    pub fn constant(value: f64) -> Self {
        Self::closed(move |_| value)
    }

    /// `∂_i S` at `q`.
    ///
    /// For wave-backed actions this is `ħ Im(ψ* ∂_iψ)/|ψ|²`, which avoids
    /// differentiating across branch cuts of the phase.
    pub fn gradient(&self, q: &[f64], fd: &FiniteDiff, ranges: &[CoordRange], units: &Units) -> Result<Vec<f64>> {
        match self {
            ActionField::Closed(s) => fd_gradient(|p: &[f64]| Ok(s(p)), q, fd, Some(ranges)),
            ActionField::Wave { psi, t } => {
                let value = psi.value(q, *t);
                let amplitude = value.norm();
                if !(amplitude > units.node_tolerance) {
                    return Err(CqgError::Node {
                        point: q.to_vec(),
                        amplitude,
                    });
                }
                let grad: Vec<Complex64> = fd_gradient(|p: &[f64]| Ok(psi.value(p, *t)), q, fd, Some(ranges))?;
                let norm = amplitude * amplitude;
                Ok(grad
                    .iter()
                    .map(|d| units.hbar * (value.conj() * d).im / norm)
                    .collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomStream;
    use crate::spin_states::{d_up, EulerTriple};

    #[test]
    fn unit_field_decomposes_trivially() {
        let psi = WaveField::new(MetricChart::flat(3), |_, _| Complex64::new(1.0, 0.0));
        let d = decompose(&psi, &[0.0; 3], 0.0, &Units::default()).unwrap();
        assert_eq!((d.rho, d.action, d.sigma), (1.0, 0.0, 0.0));
    }

    #[test]
    fn spin_up_at_right_angles() {
        let chart = MetricChart::flat(3);
        let psi = WaveField::new(chart, |q, _| d_up(&EulerTriple::from_coords(q)));
        let d = decompose(&psi, &[PI / 2.0, PI / 2.0, 0.0], 0.0, &Units::default()).unwrap();
        assert!((d.rho - 0.5).abs() < 1e-15);
        assert!((d.action - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn node_is_rejected() {
        let psi = WaveField::new(MetricChart::flat(3), |q, _| Complex64::new(q[0], 0.0));
        assert!(matches!(
            decompose(&psi, &[0.0, 1.0, 1.0], 0.0, &Units::default()),
            Err(CqgError::Node { .. })
        ));
    }

    #[test]
    fn compose_inverts_decompose() {
        let psi = WaveField::new(MetricChart::flat(4), |q, t| {
            Complex64::new(1.0 + q[0] * q[1], q[2] - t).exp() * (0.5 + q[3].sin().powi(2))
        });
        let units = Units::default();
        for k in 0..1000u128 {
            let u = RandomStream::new(17, k).random_uniform(5);
            let q: Vec<f64> = u[..4].iter().map(|x| 4.0 * x - 2.0).collect();
            let d = decompose(&psi, &q, u[4], &units).unwrap();
            let back = compose(&d, &units);
            assert!((back - psi.value(&q, u[4])).norm() < 1e-12);
        }
    }

    #[test]
    fn continuation_follows_the_nearest_branch() {
        let psi = WaveField::new(MetricChart::flat(3), |q, _| Complex64::from_polar(1.0, q[0]));
        let units = Units::default();
        let mut previous = 0.0;
        for k in 1..=100 {
            let x = 0.1 * k as f64;
            let d = decompose_continued(&psi, &[x, 0.0, 0.0], 0.0, &units, previous).unwrap();
            assert!((d.action - x).abs() < 1e-12);
            previous = d.action;
        }
    }

    #[test]
    fn weight_is_checked() {
        let chart = MetricChart::flat(6);
        assert!(WaveField::with_weight(chart.clone(), |_, _| Complex64::new(1.0, 0.0), -1.0).is_ok());
        assert!(matches!(
            WaveField::with_weight(chart, |_, _| Complex64::new(1.0, 0.0), -2.0),
            Err(CqgError::WeightMismatch { .. })
        ));
    }

    #[test]
    fn xi_values() {
        assert!((xi(6) - (1.0f64 / 5.0).sqrt()).abs() < 1e-15);
        assert!((xi(10) - 2f64.sqrt() / 3.0).abs() < 1e-15);
    }
}
