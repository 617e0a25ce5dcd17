use serde::{Deserialize, Serialize};

use super::amplitudes::{
    amplitude_coefficients, channel_amplitude, half_difference, marginal_bracket, pair_factor, Channel,
};
use crate::error::{CqgError, Result};
use crate::numerics::{tensor_quadrature, tensor_quadrature_with, QuadratureSpec, Rule};
use crate::spin_states::{EulerTriple, TwoParticleAngles};

/// Fewest equispaced nodes integrating the angular integrands exactly.
pub const MIN_PERIODIC_NODES: usize = 5;
/// Fewest Gauss–Legendre nodes integrating the angular integrands exactly.
pub const MIN_GAUSS_NODES: usize = 3;

/// Coincidence fluxes in the order uu, ud, du, dd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxTable {
    pub phi_uu: f64,
    pub phi_ud: f64,
    pub phi_du: f64,
    pub phi_dd: f64,
}

impl FluxTable {
    pub fn from_array([uu, ud, du, dd]: [f64; 4]) -> Self {
        Self {
            phi_uu: uu,
            phi_ud: ud,
            phi_du: du,
            phi_dd: dd,
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.phi_uu, self.phi_ud, self.phi_du, self.phi_dd]
    }

    pub fn get(&self, i: Channel, j: Channel) -> f64 {
        match (i, j) {
            (Channel::Up, Channel::Up) => self.phi_uu,
            (Channel::Up, Channel::Down) => self.phi_ud,
            (Channel::Down, Channel::Up) => self.phi_du,
            (Channel::Down, Channel::Down) => self.phi_dd,
        }
    }

    pub fn total(&self) -> f64 {
        self.phi_uu + self.phi_ud + self.phi_du + self.phi_dd
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|v| v * k))
    }

    /// `E = Φ_uu + Φ_dd − Φ_ud − Φ_du`.
    pub fn correlation(&self) -> f64 {
        self.phi_uu + self.phi_dd - self.phi_ud - self.phi_du
    }

    pub fn max_abs_diff(&self, other: &FluxTable) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Raw fluxes under the normalized product Haar measure and their
/// renormalization to unit total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    pub theta_a: f64,
    pub theta_b: f64,
    pub raw: FluxTable,
    pub normalized: FluxTable,
}

impl FluxReport {
    fn from_raw(theta_a: f64, theta_b: f64, raw: FluxTable) -> Result<Self> {
        let total = raw.total();
        if !(total > 0.0 && total.is_finite()) {
            return Err(CqgError::Internal(format!("flux total {total}")));
        }
        Ok(Self {
            theta_a,
            theta_b,
            raw,
            normalized: raw.scaled(1.0 / total),
        })
    }

    pub fn raw_total(&self) -> f64 {
        self.raw.total()
    }
}

/// Validates a three-axis Euler-angle rule for the trigonometric integrands.
pub fn check_angle_quadrature(spec: &QuadratureSpec) -> Result<()> {
    if spec.dim() != 3 {
        return Err(CqgError::InvalidQuadrature(format!(
            "Euler-angle rule needs 3 axes, got {}",
            spec.dim()
        )));
    }
    for (i, axis) in spec.axes().iter().enumerate() {
        let (min, kind) = match axis.rule {
            Rule::Periodic { .. } => (MIN_PERIODIC_NODES, "equispaced"),
            Rule::GaussLegendre { .. } | Rule::CosPolar => (MIN_GAUSS_NODES, "Gauss-Legendre"),
        };
        if axis.nodes < min {
            return Err(CqgError::QuadratureOrderTooLow(format!(
                "axis {i}: {kind} rule with {} nodes, need at least {min}",
                axis.nodes
            )));
        }
    }
    Ok(())
}

/// `∫ |channel amplitude|² dμ̂` for one particle.
pub fn channel_integral(theta: f64, channel: Channel, quad: &QuadratureSpec) -> Result<f64> {
    check_angle_quadrature(quad)?;
    tensor_quadrature(|q| channel_amplitude(&EulerTriple::from_coords(q), theta, channel).norm_sqr(), quad)
}

const PAIRS: [(Channel, Channel); 4] = [
    (Channel::Up, Channel::Up),
    (Channel::Up, Channel::Down),
    (Channel::Down, Channel::Up),
    (Channel::Down, Channel::Down),
];

/// Coincidence fluxes through the factorization
/// `|A_ij|² = |a_i(ζ_A)|² |b_j(ζ_B)|² trig²(Δϑ)`, so the six-angle integral is
/// a product of one-particle integrals.
pub fn coincidence_fluxes(theta_a: f64, theta_b: f64, quad: &QuadratureSpec) -> Result<FluxReport> {
    let delta = half_difference(theta_a, theta_b);
    let a = [
        channel_integral(theta_a, Channel::Up, quad)?,
        channel_integral(theta_a, Channel::Down, quad)?,
    ];
    let b = [
        channel_integral(theta_b, Channel::Up, quad)?,
        channel_integral(theta_b, Channel::Down, quad)?,
    ];
    let idx = |c: Channel| (c == Channel::Down) as usize;
    let raw = PAIRS.map(|(i, j)| a[idx(i)] * b[idx(j)] * pair_factor(i, j, delta).powi(2));
    FluxReport::from_raw(theta_a, theta_b, FluxTable::from_array(raw))
}

/// Coincidence fluxes by direct quadrature of `|A_ij|²` over all six angles.
pub fn coincidence_fluxes_full(theta_a: f64, theta_b: f64, quad: &QuadratureSpec) -> Result<FluxReport> {
    check_angle_quadrature(quad)?;
    let pair = quad.product(quad);
    let mut raw = [0.0; 4];
    for (k, slot) in raw.iter_mut().enumerate() {
        *slot = tensor_quadrature(
            |q| {
                let angles = TwoParticleAngles::new(EulerTriple::from_coords(&q[..3]), EulerTriple::from_coords(&q[3..]));
                amplitude_coefficients(&angles, theta_a, theta_b).weights()[k]
            },
            &pair,
        )?;
    }
    FluxReport::from_raw(theta_a, theta_b, FluxTable::from_array(raw))
}

/// `Φ̂_uu + Φ̂_dd − Φ̂_ud − Φ̂_du` from [`coincidence_fluxes`].
pub fn correlation(theta_a: f64, theta_b: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok(coincidence_fluxes(theta_a, theta_b, quad)?.normalized.correlation())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// One side's channel densities at a fixed local Euler triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalTable {
    pub side: Side,
    pub local: EulerTriple,
    pub theta_a: f64,
    pub theta_b: f64,
    /// `Σ_j ∫ |A_ij|² dμ̂(remote)` for the up and down channels.
    pub raw_up: f64,
    pub raw_down: f64,
    /// Raw densities divided by the raw grand total.
    pub up: f64,
    pub down: f64,
    /// `cos β cos θ + cos α sin β sin θ` on the local side.
    pub bracket: f64,
}

impl MarginalTable {
    /// Best constant `c` in `raw = c [1 ± bracket]`.
    pub fn constant(&self) -> f64 {
        0.5 * (self.raw_up + self.raw_down)
    }

    /// Largest deviation from `c [1 ± bracket]`, relative to `c`.
    pub fn proportionality_residual(&self) -> f64 {
        let c = self.constant();
        let up = (self.raw_up - c * (1.0 + self.bracket)).abs();
        let down = (self.raw_down - c * (1.0 - self.bracket)).abs();
        up.max(down) / c
    }
}

fn weight_sum_for_side(side: Side, channel: Channel, w: [f64; 4]) -> f64 {
    let [uu, ud, du, dd] = w;
    match (side, channel) {
        (Side::A, Channel::Up) => uu + ud,
        (Side::A, Channel::Down) => du + dd,
        (Side::B, Channel::Up) => uu + du,
        (Side::B, Channel::Down) => ud + dd,
    }
}

/// Marginal channel densities on `side` at the local triple, integrating the
/// remote particle over its normalized Haar measure.
pub fn marginal_densities(
    side: Side,
    local: &EulerTriple,
    theta_a: f64,
    theta_b: f64,
    quad: &QuadratureSpec,
) -> Result<MarginalTable> {
    check_angle_quadrature(quad)?;
    let angles_for = |remote: EulerTriple| match side {
        Side::A => TwoParticleAngles::new(*local, remote),
        Side::B => TwoParticleAngles::new(remote, *local),
    };
    let raw = |channel: Channel| {
        tensor_quadrature(
            |q| {
                let w = amplitude_coefficients(&angles_for(EulerTriple::from_coords(q)), theta_a, theta_b).weights();
                weight_sum_for_side(side, channel, w)
            },
            quad,
        )
    };
    let (raw_up, raw_down) = (raw(Channel::Up)?, raw(Channel::Down)?);
    let total = coincidence_fluxes(theta_a, theta_b, quad)?.raw_total();
    let theta_local = match side {
        Side::A => theta_a,
        Side::B => theta_b,
    };
    Ok(MarginalTable {
        side,
        local: *local,
        theta_a,
        theta_b,
        raw_up,
        raw_down,
        up: raw_up / total,
        down: raw_down / total,
        bracket: marginal_bracket(local, theta_local),
    })
}

/// Renormalized single-side totals: the marginal densities integrated over
/// the local Haar measure, as `(up, down)`.
pub fn marginal_totals(side: Side, theta_a: f64, theta_b: f64, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let report = coincidence_fluxes(theta_a, theta_b, quad)?;
    let t = report.normalized;
    Ok(match side {
        Side::A => (t.phi_uu + t.phi_ud, t.phi_du + t.phi_dd),
        Side::B => (t.phi_uu + t.phi_du, t.phi_ud + t.phi_dd),
    })
}

/// Local-side totals by integrating [`marginal_densities`] over the local
/// triple, as `(up, down)`.
pub fn marginal_totals_nested(side: Side, theta_a: f64, theta_b: f64, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let density = |q: &[f64]| marginal_densities(side, &EulerTriple::from_coords(q), theta_a, theta_b, quad);
    let up = tensor_quadrature_with(|q| Ok(density(q)?.up), quad)?;
    let down = tensor_quadrature_with(|q| Ok(density(q)?.down), quad)?;
    Ok((up, down))
}

/// Result of the no-signalling check on one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalReport {
    pub side: Side,
    pub local: EulerTriple,
    pub theta_local: f64,
    /// Largest change of either channel density over the remote-setting grid.
    pub max_deviation: f64,
    pub proportionality_residual: f64,
    /// Raw proportionality constant (a quarter under unit Haar measure).
    pub raw_constant: f64,
    pub renormalized_constant: f64,
    pub local_totals: (f64, f64),
}

/// Checks that `side`'s channel densities at `local` do not depend on the
/// remote setting, over `remote_grid`.
pub fn no_signalling(
    side: Side,
    local: &EulerTriple,
    theta_local: f64,
    remote_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<NoSignalReport> {
    if remote_grid.is_empty() {
        return Err(CqgError::InvalidConfig("empty remote-setting grid".into()));
    }
    let settings = |remote: f64| match side {
        Side::A => (theta_local, remote),
        Side::B => (remote, theta_local),
    };
    let mut tables = Vec::with_capacity(remote_grid.len());
    for &remote in remote_grid {
        let (ta, tb) = settings(remote);
        tables.push(marginal_densities(side, local, ta, tb, quad)?);
    }
    let first = tables[0];
    let max_deviation = tables.iter().fold(0.0f64, |m, t| {
        m.max((t.up - first.up).abs()).max((t.down - first.down).abs())
    });
    let proportionality_residual = tables.iter().fold(0.0f64, |m, t| m.max(t.proportionality_residual()));
    let (ta, tb) = settings(remote_grid[0]);
    Ok(NoSignalReport {
        side,
        local: *local,
        theta_local,
        max_deviation,
        proportionality_residual,
        raw_constant: first.constant(),
        renormalized_constant: 0.5 * (first.up + first.down),
        local_totals: marginal_totals(side, ta, tb, quad)?,
    })
}
