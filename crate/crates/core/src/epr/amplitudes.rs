use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CqgError, Result};
use crate::spin_states::{d_down, d_up, EulerTriple, TwoParticleAngles};

/// Analyzer orientation in the x–z plane, measured from z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgaSetting {
    pub theta: f64,
}

impl SgaSetting {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }

    /// `θ` in `[0, 2π)`.
    pub fn reduced(&self) -> f64 {
        self.theta.rem_euclid(TAU)
    }
}

/// Exit channel of an analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Up,
    Down,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Up, Channel::Down];

    pub fn sign(self) -> f64 {
        match self {
            Channel::Up => 1.0,
            Channel::Down => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Channel::Up => "u",
            Channel::Down => "d",
        }
    }
}

/// Output of the analyzer acting on `a D_↑ + b D_↓`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgaOutput {
    /// `a cos θ/2 + b sin θ/2`
    pub up_scalar: Complex64,
    /// `a sin θ/2 − b cos θ/2`
    pub down_scalar: Complex64,
    pub setting: SgaSetting,
}

impl SgaOutput {
    /// `D_↑ cos θ/2 + D_↓ sin θ/2`
    pub fn up_factor(&self, z: &EulerTriple) -> Complex64 {
        let (s, c) = (0.5 * self.setting.theta).sin_cos();
        d_up(z) * c + d_down(z) * s
    }

    /// `D_↑ sin θ/2 − D_↓ cos θ/2`
    pub fn down_factor(&self, z: &EulerTriple) -> Complex64 {
        let (s, c) = (0.5 * self.setting.theta).sin_cos();
        d_up(z) * s - d_down(z) * c
    }
}

pub fn sga_transform(a: Complex64, b: Complex64, setting: SgaSetting) -> Result<SgaOutput> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(CqgError::NotNormalized(norm));
    }
    let (s, c) = (0.5 * setting.theta).sin_cos();
    Ok(SgaOutput {
        up_scalar: a * c + b * s,
        down_scalar: a * s - b * c,
        setting,
    })
}

/// Angular factor of one particle in the coincidence amplitudes:
/// `D_↑ cos θ/2 + D_↓ sin θ/2` (up) or `−D_↑ sin θ/2 + D_↓ cos θ/2` (down).
pub fn channel_amplitude(z: &EulerTriple, theta: f64, channel: Channel) -> Complex64 {
    let (s, c) = (0.5 * theta).sin_cos();
    match channel {
        Channel::Up => d_up(z) * c + d_down(z) * s,
        Channel::Down => d_down(z) * c - d_up(z) * s,
    }
}

/// `cos β cos θ + cos α sin β sin θ`.
pub fn marginal_bracket(z: &EulerTriple, theta: f64) -> f64 {
    z.beta.cos() * theta.cos() + z.alpha.cos() * z.beta.sin() * theta.sin()
}

/// `|channel_amplitude|² = ½[1 ± bracket]`.
pub fn channel_density(z: &EulerTriple, theta: f64, channel: Channel) -> f64 {
    0.5 * (1.0 + channel.sign() * marginal_bracket(z, theta))
}

/// Half the angle between the analyzers, `Δϑ = (θ_B − θ_A)/2`.
pub fn half_difference(theta_a: f64, theta_b: f64) -> f64 {
    0.5 * (theta_b - theta_a)
}

/// The four coincidence amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub uu: Complex64,
    pub ud: Complex64,
    pub du: Complex64,
    pub dd: Complex64,
}

impl Amplitudes {
    pub fn get(&self, i: Channel, j: Channel) -> Complex64 {
        match (i, j) {
            (Channel::Up, Channel::Up) => self.uu,
            (Channel::Up, Channel::Down) => self.ud,
            (Channel::Down, Channel::Up) => self.du,
            (Channel::Down, Channel::Down) => self.dd,
        }
    }

    /// `|A_ij|²` in the order uu, ud, du, dd.
    pub fn weights(&self) -> [f64; 4] {
        [self.uu.norm_sqr(), self.ud.norm_sqr(), self.du.norm_sqr(), self.dd.norm_sqr()]
    }
}

/// Trigonometric factor multiplying channel pair `(i, j)`: `sin Δϑ` when the
/// channels agree, `cos Δϑ` otherwise.
pub fn pair_factor(i: Channel, j: Channel, delta: f64) -> f64 {
    if i == j {
        delta.sin()
    } else {
        delta.cos()
    }
}

pub fn amplitude_coefficients(angles: &TwoParticleAngles, theta_a: f64, theta_b: f64) -> Amplitudes {
    let delta = half_difference(theta_a, theta_b);
    let a = |c| channel_amplitude(&angles.zeta_a, theta_a, c);
    let b = |c| channel_amplitude(&angles.zeta_b, theta_b, c);
    let (au, ad, bu, bd) = (a(Channel::Up), a(Channel::Down), b(Channel::Up), b(Channel::Down));
    let (s, c) = delta.sin_cos();
    Amplitudes {
        uu: au * bu * s,
        ud: au * bd * c,
        du: ad * bu * c,
        dd: ad * bd * s,
    }
}

/// `|A_uu|² − P(A=u) P(B=u)` at one `λ`, with the λ-conditioned marginals
/// normalized by the λ-conditioned total. Nonzero means the conditional joint
/// does not factor.
pub fn factorization_gap(angles: &TwoParticleAngles, theta_a: f64, theta_b: f64) -> f64 {
    let [uu, ud, du, dd] = amplitude_coefficients(angles, theta_a, theta_b).weights();
    let total = uu + ud + du + dd;
    uu / total - ((uu + ud) / total) * ((uu + du) / total)
}
