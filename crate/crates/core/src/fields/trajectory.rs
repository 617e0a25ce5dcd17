//! Integral curves of the velocity field.

use super::residuals::velocity_field;
use super::wave::{ActionField, Units};
use crate::error::{CqgError, Result};
use crate::geometry::MetricChart;
use crate::numerics::{CoordKind, FiniteDiff};

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStatus {
    Complete,
    /// The velocity could not be evaluated at `step`.
    Singular { step: usize, error: CqgError },
    /// A non-periodic coordinate left its range at `step`.
    LeftChart { step: usize, coord: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `q0` followed by one point per completed step.
    pub points: Vec<Vec<f64>>,
    pub status: TrajectoryStatus,
}

fn axpy(q: &[f64], h: f64, v: &[f64]) -> Vec<f64> {
    q.iter().zip(v).map(|(a, b)| a + h * b).collect()
}

/// Fixed-step classical Runge–Kutta for `q̇ = g^{ij} ∂_j S`.
///
/// Periodic coordinates are wrapped after each step. The path stops early,
/// with the reason in `status`, at a singular point or on leaving the chart.
pub fn integrate_trajectory(
    chart: &MetricChart,
    action: &ActionField,
    q0: &[f64],
    steps: usize,
    dt: f64,
    fd: &FiniteDiff,
    units: &Units,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CqgError::InvalidConfig(format!("time step must be positive, got {dt}")));
    }
    chart.check_regular(q0)?;
    let velocity = |q: &[f64]| velocity_field(chart, action, q, fd, units);
    let mut points = vec![q0.to_vec()];
    let mut q = q0.to_vec();
    for step in 1..=steps {
        let stage = || -> Result<Vec<f64>> {
            let k1 = velocity(&q)?;
            let k2 = velocity(&axpy(&q, 0.5 * dt, &k1))?;
            let k3 = velocity(&axpy(&q, 0.5 * dt, &k2))?;
            let k4 = velocity(&axpy(&q, dt, &k3))?;
            Ok((0..q.len())
                .map(|i| q[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        };
        let mut next = match stage() {
            Ok(p) => p,
            Err(error) => {
                return Ok(Trajectory {
                    points,
                    status: TrajectoryStatus::Singular { step, error },
                })
            }
        };
        for (coord, (x, range)) in next.iter_mut().zip(chart.ranges()).enumerate() {
            match range.kind {
                CoordKind::Periodic => *x = range.lo + (*x - range.lo).rem_euclid(range.hi - range.lo),
                CoordKind::Open | CoordKind::Polar => {
                    if !range.contains(*x) {
                        return Ok(Trajectory {
                            points,
                            status: TrajectoryStatus::LeftChart { step, coord, value: *x },
                        });
                    }
                }
            }
        }
        q = next;
        points.push(q.clone());
    }
    Ok(Trajectory {
        points,
        status: TrajectoryStatus::Complete,
    })
}
