//! Christoffel symbols and Riemann scalar curvature by finite differences.

use super::chart::MetricChart;
use crate::error::Result;
use crate::numerics::{fd_derivative, FiniteDiff, Order};

/// Dense `n × n × n` array indexed `[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank3 {
    n: usize,
    data: Vec<f64>,
}

impl Rank3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[(i * self.n + j) * self.n + k] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs_diff(&self, other: &Rank3) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest `|T[i][j][k] - T[i][k][j]|`.
    pub fn torsion(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) - self.get(i, k, j)).abs());
                }
            }
        }
        worst
    }
}

/// Christoffel symbols at `q` without the top-level regularity check.
pub(crate) fn christoffel_unchecked(chart: &MetricChart, q: &[f64], fd: &FiniteDiff) -> Result<Rank3> {
    let n = chart.dim();
    let local = chart.local_unchecked(q)?;
    // dg[l][(j, k)] = ∂_l g_jk
    let mut dg = Vec::with_capacity(n);
    for l in 0..n {
        let est = fd_derivative(
            |p: &[f64]| Ok(chart.metric_unchecked(p).as_slice().to_vec()),
            q,
            l,
            Order::First,
            fd,
            Some(chart.ranges()),
        )?;
        dg.push(est.value);
    }
    let d = |l: usize, j: usize, k: usize| dg[l][j + n * k];

    let mut lowered = Rank3::zeros(n);
    for l in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = 0.5 * (d(j, l, k) + d(k, l, j) - d(l, j, k));
                lowered.set(l, j, k, v);
                lowered.set(l, k, j, v);
            }
        }
    }
    let mut out = Rank3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let v: f64 = (0..n).map(|l| local.inv[(i, l)] * lowered.get(l, j, k)).sum();
                out.set(i, j, k, v);
                out.set(i, k, j, v);
            }
        }
    }
    Ok(out)
}

/// Christoffel symbols of the second kind `{i over jk}`, symmetric in `(j, k)`.
pub fn christoffel(chart: &MetricChart, q: &[f64], fd: &FiniteDiff) -> Result<Rank3> {
    chart.check_regular(q)?;
    christoffel_unchecked(chart, q, fd)
}

/// Scalar curvature of the metric alone.
///
/// Uses `R_jk = ∂_i Γ^i_jk − ∂_k Γ^i_ij + Γ^i_ip Γ^p_jk − Γ^i_kp Γ^p_ij`
/// and contracts with the inverse metric; positive on spheres.
pub fn riemann_scalar(chart: &MetricChart, q: &[f64], fd: &FiniteDiff) -> Result<f64> {
    chart.check_regular(q)?;
    let n = chart.dim();
    let local = chart.local_unchecked(q)?;
    let gamma = christoffel_unchecked(chart, q, fd)?;
    let mut d_gamma = Vec::with_capacity(n);
    for dir in 0..n {
        let est = fd_derivative(
            |p: &[f64]| christoffel_unchecked(chart, p, fd).map(Rank3::into_vec),
            q,
            dir,
            Order::First,
            fd,
            Some(chart.ranges()),
        )?;
        d_gamma.push(Rank3::from_vec(n, est.value));
    }

    let trace: Vec<f64> = (0..n).map(|p| (0..n).map(|i| gamma.get(i, i, p)).sum()).collect();
    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            let ginv = local.inv[(j, k)];
            if ginv == 0.0 {
                continue;
            }
            let mut ricci = 0.0;
            for i in 0..n {
                ricci += d_gamma[i].get(i, j, k) - d_gamma[k].get(i, i, j);
            }
            for p in 0..n {
                ricci += trace[p] * gamma.get(p, j, k);
                for i in 0..n {
                    ricci -= gamma.get(i, k, p) * gamma.get(p, i, j);
                }
            }
            scalar += ginv * ricci;
        }
    }
    Ok(scalar)
}
