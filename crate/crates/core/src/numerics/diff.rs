//! Central finite differences with Richardson extrapolation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CqgError, Result};

/// How a coordinate behaves at the ends of its range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordKind {
    /// Ordinary interval; stencils must stay inside `[lo, hi]`.
    Open,
    /// Periodic coordinate; stencils wrap freely.
    Periodic,
    /// Polar angle whose end points are coordinate singularities.
    Polar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordRange {
    pub lo: f64,
    pub hi: f64,
    pub kind: CoordKind,
}

impl CoordRange {
    pub fn unbounded() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            kind: CoordKind::Open,
        }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            kind: CoordKind::Periodic,
        }
    }

    pub fn polar(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            kind: CoordKind::Polar,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.kind {
            CoordKind::Periodic => x.is_finite(),
            CoordKind::Open | CoordKind::Polar => x >= self.lo && x <= self.hi,
        }
    }
}

/// Checks that every coordinate of `q` lies in its range.
pub fn check_point(q: &[f64], ranges: &[CoordRange]) -> Result<()> {
    for (coord, (&value, range)) in q.iter().zip(ranges).enumerate() {
        if !range.contains(value) {
            return Err(CqgError::Domain {
                coord,
                value,
                lo: range.lo,
                hi: range.hi,
            });
        }
    }
    Ok(())
}

/// Values that can be differentiated: closed under real linear combination.
pub trait FdValue: Clone {
    /// `a * self + b * other`
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self;
    /// Largest componentwise magnitude.
    fn magnitude(&self) -> f64;
}

impl FdValue for f64 {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl FdValue for Complex64 {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self * a + other * b
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl FdValue for Vec<f64> {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self.iter().zip(other).map(|(x, y)| a * x + b * y).collect()
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl FdValue for Vec<Complex64> {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self.iter().zip(other).map(|(x, y)| x * a + y * b).collect()
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.norm()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    First,
    Second,
}

/// Step and extrapolation depth for central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiff {
    pub step: f64,
    pub levels: usize,
}

impl Default for FiniteDiff {
    fn default() -> Self {
        Self {
            step: 1e-3,
            levels: 1,
        }
    }
}

impl FiniteDiff {
    pub fn new(step: f64, levels: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(CqgError::InvalidConfig(format!("finite-difference step {step} must be positive")));
        }
        if levels > 6 {
            return Err(CqgError::InvalidConfig(format!("{levels} Richardson levels is more than 6")));
        }
        Ok(Self { step, levels })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
}

fn shifted(q: &[f64], dir: usize, delta: f64) -> Vec<f64> {
    let mut p = q.to_vec();
    p[dir] += delta;
    p
}

/// Central-difference derivative of `f` at `q` along coordinate `dir`.
///
/// The step halves at each Richardson level; the returned error combines the
/// spread of the last two extrapolants with a rounding floor.
pub fn fd_derivative<V, F>(
    f: F,
    q: &[f64],
    dir: usize,
    order: Order,
    fd: &FiniteDiff,
    domain: Option<&[CoordRange]>,
) -> Result<Estimate<V>>
where
    V: FdValue,
    F: Fn(&[f64]) -> Result<V>,
{
    if dir >= q.len() {
        return Err(CqgError::Internal(format!("direction {dir} out of {} coordinates", q.len())));
    }
    if let Some(ranges) = domain {
        let range = ranges[dir];
        if range.kind != CoordKind::Periodic {
            for x in [q[dir] - fd.step, q[dir] + fd.step] {
                if !range.contains(x) {
                    return Err(CqgError::Domain {
                        coord: dir,
                        value: x,
                        lo: range.lo,
                        hi: range.hi,
                    });
                }
            }
        }
    }

    let center = match order {
        Order::First => None,
        Order::Second => Some(f(q)?),
    };
    let mut scale = center.as_ref().map_or(0.0, FdValue::magnitude);

    let rows = fd.levels.max(1) + 1;
    let mut central = Vec::with_capacity(rows);
    for k in 0..rows {
        let h = fd.step / f64::powi(2.0, k as i32);
        let plus = f(&shifted(q, dir, h))?;
        let minus = f(&shifted(q, dir, -h))?;
        scale = scale.max(plus.magnitude()).max(minus.magnitude());
        let d = match &center {
            None => plus.combine(0.5 / h, &minus, -0.5 / h),
            Some(c) => {
                let s = plus.combine(1.0, &minus, 1.0);
                s.combine(1.0 / (h * h), c, -2.0 / (h * h))
            }
        };
        central.push(d);
    }

    let rounding = 8.0 * f64::EPSILON * scale
        / match order {
            Order::First => fd.step / f64::powi(2.0, fd.levels as i32),
            Order::Second => (fd.step / f64::powi(2.0, fd.levels as i32)).powi(2),
        };

    if fd.levels == 0 {
        let spread = central[0].combine(1.0, &central[1], -1.0).magnitude();
        return Ok(Estimate {
            value: central.swap_remove(0),
            error: 4.0 / 3.0 * spread + rounding,
        });
    }

    // Neville-style Richardson table on the h^2 error expansion.
    let mut prev: Vec<V> = vec![central[0].clone()];
    for (k, d) in central.iter().enumerate().skip(1) {
        let mut row = vec![d.clone()];
        for m in 1..=k {
            let factor = f64::powi(4.0, m as i32);
            let next = row[m - 1].combine(factor / (factor - 1.0), &prev[m - 1], -1.0 / (factor - 1.0));
            row.push(next);
        }
        prev = row;
    }
    let last = prev.len() - 1;
    let spread = prev[last].combine(1.0, &prev[last - 1], -1.0).magnitude();
    Ok(Estimate {
        value: prev.swap_remove(last),
        error: spread + rounding,
    })
}

/// First derivatives along every coordinate.
pub fn fd_gradient<V, F>(f: F, q: &[f64], fd: &FiniteDiff, domain: Option<&[CoordRange]>) -> Result<Vec<V>>
where
    V: FdValue,
    F: Fn(&[f64]) -> Result<V>,
{
    (0..q.len())
        .map(|dir| fd_derivative(&f, q, dir, Order::First, fd, domain).map(|e| e.value))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<V>(f: impl Fn(&[f64]) -> V) -> impl Fn(&[f64]) -> Result<V> {
        move |q| Ok(f(q))
    }

    #[test]
    fn linear_slope_is_exact() {
        let fd = FiniteDiff::default();
        let e = fd_derivative(ok(|q: &[f64]| 3.5 * q[0] - 2.0), &[0.7], 0, Order::First, &fd, None).unwrap();
        assert!((e.value - 3.5).abs() < 1e-12, "{}", e.value);
    }

    #[test]
    fn second_derivative_of_sin_at_zero() {
        let fd = FiniteDiff::new(1e-3, 1).unwrap();
        let e = fd_derivative(ok(|q: &[f64]| q[0].sin()), &[0.0], 0, Order::Second, &fd, None).unwrap();
        assert!(e.value.abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn richardson_beats_plain_central() {
        let f = ok(|q: &[f64]| q[0].exp());
        let plain = FiniteDiff::new(1e-2, 0).unwrap();
        let rich = FiniteDiff::new(1e-2, 1).unwrap();
        let a = fd_derivative(&f, &[0.3], 0, Order::First, &plain, None).unwrap();
        let b = fd_derivative(&f, &[0.3], 0, Order::First, &rich, None).unwrap();
        let exact = 0.3f64.exp();
        assert!((b.value - exact).abs() < 1e-3 * (a.value - exact).abs());
    }

    #[test]
    fn error_estimate_bounds_polynomial_errors() {
        for levels in 0..3 {
            let fd = FiniteDiff::new(1e-2, levels).unwrap();
            for degree in 0..8 {
                let f = ok(move |q: &[f64]| q[0].powi(degree) + 0.5 * q[0]);
                let x: f64 = 0.8;
                let d1 = degree as f64 * x.powi(degree - 1) + 0.5;
                let d2 = (degree * (degree - 1)) as f64 * x.powi(degree - 2);
                let e1 = fd_derivative(&f, &[x], 0, Order::First, &fd, None).unwrap();
                let e2 = fd_derivative(&f, &[x], 0, Order::Second, &fd, None).unwrap();
                assert!((e1.value - d1).abs() <= e1.error, "first, levels {levels}, degree {degree}");
                assert!((e2.value - d2).abs() <= e2.error, "second, levels {levels}, degree {degree}");
            }
        }
    }

    #[test]
    fn stencil_leaving_domain_is_rejected() {
        let ranges = [CoordRange {
            lo: 0.0,
            hi: 1.0,
            kind: CoordKind::Open,
        }];
        let fd = FiniteDiff::default();
        let err = fd_derivative(ok(|q: &[f64]| q[0]), &[0.0005], 0, Order::First, &fd, Some(&ranges)).unwrap_err();
        assert!(matches!(err, CqgError::Domain { coord: 0, .. }));
        let periodic = [CoordRange::periodic(0.0, 1.0)];
        assert!(fd_derivative(ok(|q: &[f64]| q[0]), &[0.0], 0, Order::First, &fd, Some(&periodic)).is_ok());
    }

    #[test]
    fn complex_and_vector_values() {
        let fd = FiniteDiff::default();
        let e = fd_derivative(
            ok(|q: &[f64]| Complex64::new(0.0, q[0]).exp()),
            &[0.4],
            0,
            Order::First,
            &fd,
            None,
        )
        .unwrap();
        let exact = Complex64::i() * Complex64::new(0.0, 0.4).exp();
        assert!((e.value - exact).norm() < 1e-11);

        let g = fd_gradient(ok(|q: &[f64]| vec![q[0] * q[1], q[1] * q[1]]), &[2.0, 3.0], &fd, None).unwrap();
        assert!((g[0][0] - 3.0).abs() < 1e-11 && g[0][1].abs() < 1e-11);
        assert!((g[1][0] - 2.0).abs() < 1e-11 && (g[1][1] - 6.0).abs() < 1e-10);
    }
}
