//! Deterministic tensor-product quadrature.
//!
//! Every axis carries a one-dimensional rule; the tensor rule visits nodes in
//! row-major order (last axis fastest) and reduces the weighted values with a
//! compensated sum in that order, so results do not depend on how many worker
//! threads evaluated the integrand.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::compensated_sum;
use crate::error::{CqgError, Result};

/// One-dimensional rule on a single axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Rule {
    /// Equispaced nodes on the full period `[lo, lo + period)`, equal weights.
    Periodic { lo: f64, period: f64 },
    /// Gauss–Legendre on `[lo, hi]`.
    GaussLegendre { lo: f64, hi: f64 },
    /// Polar angle `β ∈ [0, π]` with weight `sin β`, integrated as
    /// Gauss–Legendre in `u = cos β`.
    CosPolar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub rule: Rule,
    pub nodes: usize,
}

impl Axis {
    pub fn periodic(lo: f64, period: f64, nodes: usize) -> Self {
        Self {
            rule: Rule::Periodic { lo, period },
            nodes,
        }
    }

    pub fn gauss_legendre(lo: f64, hi: f64, nodes: usize) -> Self {
        Self {
            rule: Rule::GaussLegendre { lo, hi },
            nodes,
        }
    }

    pub fn cos_polar(nodes: usize) -> Self {
        Self {
            rule: Rule::CosPolar,
            nodes,
        }
    }

    /// Highest trigonometric degree integrated exactly by a periodic rule, or
    /// highest polynomial degree (in the integration variable) for Gauss rules.
    pub fn exact_degree(&self) -> usize {
        match self.rule {
            Rule::Periodic { .. } => self.nodes - 1,
            Rule::GaussLegendre { .. } | Rule::CosPolar => 2 * self.nodes - 1,
        }
    }

    fn tabulate(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.nodes;
        match self.rule {
            Rule::Periodic { lo, period } => {
                let step = period / n as f64;
                let xs = (0..n).map(|k| lo + step * k as f64).collect();
                Ok((xs, vec![step; n]))
            }
            Rule::GaussLegendre { lo, hi } => {
                let (us, ws) = legendre(n)?;
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                Ok((
                    us.iter().map(|u| mid + half * u).collect(),
                    ws.iter().map(|w| half * w).collect(),
                ))
            }
            Rule::CosPolar => {
                let (us, ws) = legendre(n)?;
                Ok((us.iter().map(|u| u.acos()).collect(), ws))
            }
        }
    }
}

fn legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = GaussLegendre::new(n)
        .map_err(|e| CqgError::InvalidQuadrature(format!("Gauss-Legendre with {n} nodes: {e}")))?;
    let mut pairs: Vec<(f64, f64)> = rule.nodes().copied().zip(rule.weights().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Tensor product of one-dimensional rules with an overall scale factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    axes: Vec<Axis>,
    scale: f64,
}

impl QuadratureSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(CqgError::InvalidQuadrature("no axes".into()));
        }
        for (i, axis) in axes.iter().enumerate() {
            if axis.nodes < 2 {
                return Err(CqgError::InvalidQuadrature(format!(
                    "axis {i} has {} nodes, need at least 2",
                    axis.nodes
                )));
            }
            let ok = match axis.rule {
                Rule::Periodic { lo, period } => lo.is_finite() && period.is_finite() && period > 0.0,
                Rule::GaussLegendre { lo, hi } => lo.is_finite() && hi.is_finite() && hi > lo,
                Rule::CosPolar => true,
            };
            if !ok {
                return Err(CqgError::InvalidQuadrature(format!("axis {i} has an empty interval")));
            }
        }
        Ok(Self { axes, scale: 1.0 })
    }

    /// Normalized Haar measure on Euler angles `(α, β, γ)` with
    /// `α ∈ [0, 2π)`, `β ∈ [0, π]`, `γ ∈ [0, 4π)`; total weight 1.
    pub fn normalized_haar(alpha: usize, beta: usize, gamma: usize) -> Result<Self> {
        Ok(Self::new(vec![
            Axis::periodic(0.0, 2.0 * PI, alpha),
            Axis::cos_polar(beta),
            Axis::periodic(0.0, 4.0 * PI, gamma),
        ])?
        .with_scale(1.0 / (16.0 * PI * PI)))
    }

    /// Product of two normalized Haar rules (six Euler angles).
    pub fn normalized_haar_pair(alpha: usize, beta: usize, gamma: usize) -> Result<Self> {
        let one = Self::normalized_haar(alpha, beta, gamma)?;
        Ok(one.product(&one))
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Tensor product `self × other`; scales multiply.
    pub fn product(&self, other: &QuadratureSpec) -> Self {
        let mut axes = self.axes.clone();
        axes.extend_from_slice(&other.axes);
        Self {
            axes,
            scale: self.scale * other.scale,
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    fn tables(&self) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        self.axes.iter().map(Axis::tabulate).collect()
    }
}

fn decode(mut index: usize, tables: &[(Vec<f64>, Vec<f64>)], point: &mut [f64]) -> f64 {
    let mut weight = 1.0;
    for (slot, (xs, ws)) in point.iter_mut().zip(tables).rev() {
        let k = index % xs.len();
        index /= xs.len();
        *slot = xs[k];
        weight *= ws[k];
    }
    weight
}

/// Integrates a fallible integrand over the tensor rule.
pub fn tensor_quadrature_with<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let tables = spec.tables()?;
    let dim = spec.dim();
    let terms: Vec<f64> = (0..spec.node_count())
        .into_par_iter()
        .map_init(
            || vec![0.0; dim],
            |point, index| {
                let weight = decode(index, &tables, point);
                let value = f(point)?;
                if !value.is_finite() {
                    return Err(CqgError::NonFinite {
                        value,
                        node: point.clone(),
                    });
                }
                Ok(weight * value)
            },
        )
        .collect::<Result<_>>()?;
    Ok(spec.scale * compensated_sum(terms))
}

/// Integrates `f` over the tensor rule.
pub fn tensor_quadrature<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    tensor_quadrature_with(|q| Ok(f(q)), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar() -> QuadratureSpec {
        QuadratureSpec::normalized_haar(8, 8, 8).unwrap()
    }

    #[test]
    fn unit_integrand_on_normalized_haar() {
        let v = tensor_quadrature(|_| 1.0, &haar()).unwrap();
        assert!((v - 1.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn cos_squared_half_beta() {
        let v = tensor_quadrature(|q| (0.5 * q[1]).cos().powi(2), &haar()).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn periodic_rule_kills_cos_alpha() {
        let v = tensor_quadrature(|q| q[0].cos(), &haar()).unwrap();
        assert!(v.abs() < 1e-15, "{v}");
    }

    #[test]
    fn gauss_rule_exact_up_to_degree_2k_minus_1() {
        for k in 2..8 {
            let spec = QuadratureSpec::new(vec![Axis::gauss_legendre(-1.0, 2.0, k)]).unwrap();
            for d in 0..(2 * k) {
                let v = tensor_quadrature(|q| q[0].powi(d as i32), &spec).unwrap();
                let exact = (2f64.powi(d as i32 + 1) - (-1f64).powi(d as i32 + 1)) / (d as f64 + 1.0);
                assert!((v - exact).abs() < 1e-12 * exact.abs().max(1.0), "k={k} d={d}");
            }
            let d = 2 * k;
            let v = tensor_quadrature(|q| q[0].powi(d as i32), &spec).unwrap();
            let exact = (2f64.powi(d as i32 + 1) + 1.0) / (d as f64 + 1.0);
            assert!((v - exact).abs() > 1e-10, "degree {d} should not be exact for k={k}");
        }
    }

    #[test]
    fn periodic_rule_exact_below_node_count() {
        for k in 2..10 {
            let spec = QuadratureSpec::new(vec![Axis::periodic(0.0, 2.0 * PI, k)]).unwrap();
            for d in 1..k {
                let c = tensor_quadrature(|q| (d as f64 * q[0] + 0.3).cos(), &spec).unwrap();
                assert!(c.abs() < 1e-13, "k={k} d={d} c={c}");
            }
            let aliased = tensor_quadrature(|q| (k as f64 * q[0]).cos(), &spec).unwrap();
            assert!((aliased - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_too_few_nodes() {
        assert!(QuadratureSpec::new(vec![Axis::periodic(0.0, 1.0, 1)]).is_err());
        assert!(QuadratureSpec::new(vec![]).is_err());
        assert!(QuadratureSpec::new(vec![Axis::gauss_legendre(1.0, 1.0, 3)]).is_err());
    }

    #[test]
    fn non_finite_values_report_the_node() {
        let spec = QuadratureSpec::new(vec![Axis::gauss_legendre(0.0, 1.0, 3)]).unwrap();
        let err = tensor_quadrature(|q| if q[0] > 0.5 { f64::NAN } else { 1.0 }, &spec).unwrap_err();
        match err {
            CqgError::NonFinite { node, .. } => assert!(node[0] > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let f = |q: &[f64]| (q[0] * 1.3).sin() * q[1].cos() + q[2] * 1e-3;
        let spec = haar();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| tensor_quadrature(f, &spec).unwrap());
        let b = four.install(|| tensor_quadrature(f, &spec).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
