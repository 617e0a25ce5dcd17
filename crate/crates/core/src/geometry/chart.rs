use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{CqgError, Result};
use crate::numerics::{check_point, CoordKind, CoordRange};

pub type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Default distance from a polar end point inside which evaluation is refused.
pub const POLAR_MARGIN: f64 = 1e-3;

/// Relative determinant floor below which a metric counts as degenerate.
const DET_FLOOR: f64 = 1e-12;

/// A coordinate chart with a pointwise metric evaluator.
#[derive(Clone)]
pub struct MetricChart {
    name: String,
    ranges: Vec<CoordRange>,
    metric: Arc<MetricFn>,
    polar_margin: f64,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("ranges", &self.ranges)
            .finish()
    }
}

/// Metric, inverse and volume factor at one point.
#[derive(Debug, Clone)]
pub struct LocalMetric {
    pub g: DMatrix<f64>,
    pub inv: DMatrix<f64>,
    pub sqrt_det: f64,
}

impl LocalMetric {
    /// `g^{ij} v_j`
    pub fn raise(&self, covector: &[f64]) -> Vec<f64> {
        let n = covector.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.inv[(i, j)] * covector[j]).sum())
            .collect()
    }

    /// `g^{ij} u_i v_j`
    pub fn inner_inverse(&self, u: &[f64], v: &[f64]) -> f64 {
        let raised = self.raise(v);
        u.iter().zip(&raised).map(|(a, b)| a * b).sum()
    }
}

impl MetricChart {
    pub fn new<F>(name: impl Into<String>, ranges: Vec<CoordRange>, metric: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            ranges,
            metric: Arc::new(metric),
            polar_margin: POLAR_MARGIN,
        }
    }

    /// Euclidean chart of dimension `n` with unbounded coordinates.
    pub fn flat(n: usize) -> Self {
        Self::new(format!("flat{n}"), vec![CoordRange::unbounded(); n], move |_| {
            DMatrix::identity(n, n)
        })
    }

    /// Block-diagonal product chart; coordinates are concatenated in order.
    pub fn product(name: impl Into<String>, parts: &[MetricChart]) -> Self {
        let dims: Vec<usize> = parts.iter().map(MetricChart::dim).collect();
        let n: usize = dims.iter().sum();
        let ranges = parts.iter().flat_map(|p| p.ranges.iter().copied()).collect();
        let metrics: Vec<Arc<MetricFn>> = parts.iter().map(|p| p.metric.clone()).collect();
        let margin = parts.iter().map(|p| p.polar_margin).fold(0.0, f64::max);
        let mut chart = Self::new(name, ranges, move |q: &[f64]| {
            let mut g = DMatrix::zeros(n, n);
            let mut offset = 0;
            for (metric, &d) in metrics.iter().zip(&dims) {
                let block = metric(&q[offset..offset + d]);
                g.view_mut((offset, offset), (d, d)).copy_from(&block);
                offset += d;
            }
            g
        });
        chart.polar_margin = margin;
        chart
    }

    /// The chart with metric `λ(q) g(q)`.
    pub fn conformal<L>(&self, name: impl Into<String>, lambda: L) -> Self
    where
        L: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let metric = self.metric.clone();
        Self {
            name: name.into(),
            ranges: self.ranges.clone(),
            metric: Arc::new(move |q: &[f64]| metric(q) * lambda(q)),
            polar_margin: self.polar_margin,
        }
    }

    pub fn with_polar_margin(mut self, margin: f64) -> Self {
        self.polar_margin = margin;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[CoordRange] {
        &self.ranges
    }

    pub fn polar_margin(&self) -> f64 {
        self.polar_margin
    }

    fn check_len(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim() {
            return Err(CqgError::Internal(format!(
                "chart `{}` has {} coordinates, point has {}",
                self.name,
                self.dim(),
                q.len()
            )));
        }
        Ok(())
    }

    /// Domain check plus the polar-end guard.
    pub fn check_regular(&self, q: &[f64]) -> Result<()> {
        self.check_len(q)?;
        check_point(q, &self.ranges)?;
        for (coord, (&value, range)) in q.iter().zip(&self.ranges).enumerate() {
            if range.kind == CoordKind::Polar
                && (value - range.lo < self.polar_margin || range.hi - value < self.polar_margin)
            {
                return Err(CqgError::CoordinateSingularity {
                    coord,
                    value,
                    margin: self.polar_margin,
                });
            }
        }
        Ok(())
    }

    /// Metric without any domain checks; used on finite-difference stencils.
    pub fn metric_unchecked(&self, q: &[f64]) -> DMatrix<f64> {
        (self.metric)(q)
    }

    pub fn metric_at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(q)?;
        check_point(q, &self.ranges)?;
        Ok(self.metric_unchecked(q))
    }

    /// Metric, inverse and `√|det g|` without domain checks.
    pub fn local_unchecked(&self, q: &[f64]) -> Result<LocalMetric> {
        let g = self.metric_unchecked(q);
        let det = g.clone().lu().determinant();
        let scale: f64 = g.diagonal().iter().map(|d| d.abs().max(f64::MIN_POSITIVE)).product();
        if !det.is_finite() || det.abs() <= DET_FLOOR * scale {
            return Err(CqgError::DegenerateChart {
                chart: self.name.clone(),
                det,
                point: q.to_vec(),
            });
        }
        let mut inv = g.clone().try_inverse().ok_or_else(|| CqgError::DegenerateChart {
            chart: self.name.clone(),
            det,
            point: q.to_vec(),
        })?;
        inv = (&inv + inv.transpose()) * 0.5;
        Ok(LocalMetric {
            g,
            inv,
            sqrt_det: det.abs().sqrt(),
        })
    }

    /// Metric, inverse and `√|det g|` at a regular interior point.
    pub fn local(&self, q: &[f64]) -> Result<LocalMetric> {
        self.check_regular(q)?;
        self.local_unchecked(q)
    }
}
