//! Spin-½ representation functions on Euler angles, the Haar measure, the
//! calibrated angular chart and the one- and two-particle wave functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CqgError, Result};
use crate::fields::WaveField;
use crate::geometry::{DensityField, MetricChart};
use crate::numerics::CoordRange;

/// Volume `2π · 2 · 4π` of the Euler-angle domain under `sin β dα dβ dγ`.
pub const HAAR_VOLUME: f64 = 16.0 * PI * PI;

/// Denominators below this are treated as poles of the closed-form curvatures.
const POLE_FLOOR: f64 = 1e-12;

/// Euler angles `(α, β, γ)` with `α ∈ [0, 2π)`, `β ∈ [0, π]`, `γ ∈ [0, 4π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerTriple {
    /// Wraps `α` and `γ` into their periods; `β` must already lie in `[0, π]`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(CqgError::InvalidAngles(format!("non-finite ({alpha}, {beta}, {gamma})")));
        }
        if !(0.0..=PI).contains(&beta) {
            return Err(CqgError::InvalidAngles(format!("beta = {beta} outside [0, π]")));
        }
        Ok(Self {
            alpha: alpha.rem_euclid(2.0 * PI),
            beta,
            gamma: gamma.rem_euclid(4.0 * PI),
        })
    }

    pub fn identity() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    /// Reads `(α, β, γ)` from the first three entries without validation.
    pub fn from_coords(q: &[f64]) -> Self {
        Self {
            alpha: q[0],
            beta: q[1],
            gamma: q[2],
        }
    }

    pub fn to_coords(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

/// `D_↑ = e^{iγ/2} e^{iα/2} cos(β/2)`.
pub fn d_up(z: &EulerTriple) -> Complex64 {
    Complex64::from_polar((0.5 * z.beta).cos(), 0.5 * (z.gamma + z.alpha))
}

/// `D_↓ = e^{iγ/2} e^{−iα/2} sin(β/2)`.
pub fn d_down(z: &EulerTriple) -> Complex64 {
    Complex64::from_polar((0.5 * z.beta).sin(), 0.5 * (z.gamma - z.alpha))
}

pub fn d_up_coords(q: &[f64]) -> Complex64 {
    d_up(&EulerTriple::from_coords(q))
}

pub fn d_down_coords(q: &[f64]) -> Complex64 {
    d_down(&EulerTriple::from_coords(q))
}

/// Haar weight `sin β`.
pub fn haar_measure(z: &EulerTriple) -> f64 {
    z.beta.sin()
}

pub fn haar_normalization() -> f64 {
    HAAR_VOLUME
}

/// Gyration radius `a > 0` of the angular block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyrationScale(f64);

impl GyrationScale {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(CqgError::InvalidConfig(format!("gyration scale must be positive, got {a}")));
        }
        Ok(Self(a))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for GyrationScale {
    fn default() -> Self {
        Self(1.0)
    }
}

fn so3_ranges() -> Vec<CoordRange> {
    vec![
        CoordRange::periodic(0.0, 2.0 * PI),
        CoordRange::polar(0.0, PI),
        CoordRange::periodic(0.0, 4.0 * PI),
    ]
}

/// `a²(dα² + dβ² + dγ² + 2 cos β dα dγ)` in coordinates `(α, β, γ)`.
pub fn so3_chart(a: GyrationScale) -> MetricChart {
    let a2 = a.value() * a.value();
    MetricChart::new("so3", so3_ranges(), move |q| {
        let c = a2 * q[1].cos();
        DMatrix::from_row_slice(3, 3, &[a2, 0.0, c, 0.0, a2, 0.0, c, 0.0, a2])
    })
}

/// Flat `(x, y, z)` followed by the SO(3) block.
pub fn v6_chart(a: GyrationScale) -> MetricChart {
    MetricChart::product("v6", &[MetricChart::flat(3), so3_chart(a)])
}

/// Particle A's six coordinates followed by particle B's.
pub fn v12_chart(a: GyrationScale) -> MetricChart {
    let one = [MetricChart::flat(3), so3_chart(a)];
    MetricChart::product("v12", &[one[0].clone(), one[1].clone(), one[0].clone(), one[1].clone()])
}

pub type EnvelopeFn = dyn Fn(&[f64], f64) -> Complex64 + Send + Sync;

/// Spatial amplitudes `w_↑(r, t)`, `w_↓(r, t)` multiplying `D_↑`, `D_↓`.
#[derive(Clone)]
pub struct SpinorEnvelope {
    w_up: Arc<EnvelopeFn>,
    w_down: Arc<EnvelopeFn>,
}

impl fmt::Debug for SpinorEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SpinorEnvelope")
    }
}

impl SpinorEnvelope {
    pub fn new<U, D>(w_up: U, w_down: D) -> Self
    where
        U: Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            w_up: Arc::new(w_up),
            w_down: Arc::new(w_down),
        }
    }

    pub fn constant(up: Complex64, down: Complex64) -> Self {
        Self::new(move |_, _| up, move |_, _| down)
    }

    /// `(c_↑, c_↓) e^{ik·r}`.
    pub fn plane_wave(k: [f64; 3], up: Complex64, down: Complex64) -> Self {
        let phase = move |r: &[f64]| Complex64::from_polar(1.0, k[0] * r[0] + k[1] * r[1] + k[2] * r[2]);
        Self::new(move |r, _| up * phase(r), move |r, _| down * phase(r))
    }

    pub fn up(&self, r: &[f64], t: f64) -> Complex64 {
        (self.w_up)(r, t)
    }

    pub fn down(&self, r: &[f64], t: f64) -> Complex64 {
        (self.w_down)(r, t)
    }
}

/// `D_↑(z) w_↑(r, t) + D_↓(z) w_↓(r, t)`.
pub fn psi_single(z: &EulerTriple, env: &SpinorEnvelope, r: &[f64], t: f64) -> Complex64 {
    d_up(z) * env.up(r, t) + d_down(z) * env.down(r, t)
}

/// `S = ħ(γ + α)/2 + arg w_↑` for the pure spin-up state.
pub fn action_spin_up(z: &EulerTriple, w_up_phase: f64, hbar: f64) -> Result<f64> {
    let amplitude = (0.5 * z.beta).cos().abs();
    if !(amplitude > 1e-12) {
        return Err(CqgError::Node {
            point: z.to_coords().to_vec(),
            amplitude,
        });
    }
    Ok(0.5 * hbar * (z.gamma + z.alpha) + w_up_phase)
}

fn pole(denominator: f64) -> Result<f64> {
    if !(denominator.abs() > POLE_FLOOR) {
        return Err(CqgError::Pole { denominator });
    }
    Ok(denominator)
}

/// Angular curvature `−5/(2a²(1 + cos β))` of the spin-up state on V₆.
pub fn curvature_spin_up(z: &EulerTriple, a: GyrationScale) -> Result<f64> {
    let d = pole(1.0 + z.beta.cos())?;
    Ok(-5.0 / (2.0 * a.value().powi(2) * d))
}

/// Angular curvature `−5/(2a²(1 − cos β))` of the spin-down state on V₆.
pub fn curvature_spin_down(z: &EulerTriple, a: GyrationScale) -> Result<f64> {
    let d = pole(1.0 - z.beta.cos())?;
    Ok(-5.0 / (2.0 * a.value().powi(2) * d))
}

/// Euler angles of both particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleAngles {
    pub zeta_a: EulerTriple,
    pub zeta_b: EulerTriple,
}

impl TwoParticleAngles {
    pub fn new(zeta_a: EulerTriple, zeta_b: EulerTriple) -> Self {
        Self { zeta_a, zeta_b }
    }

    /// `Δα = α_B − α_A`.
    pub fn delta_alpha(&self) -> f64 {
        self.zeta_b.alpha - self.zeta_a.alpha
    }

    pub fn swapped(&self) -> Self {
        Self {
            zeta_a: self.zeta_b,
            zeta_b: self.zeta_a,
        }
    }
}

/// Particle with `up` in the spin-up state times particle `down` in the spin-down state.
fn up_down_term(
    up: (&EulerTriple, &SpinorEnvelope, &[f64]),
    down: (&EulerTriple, &SpinorEnvelope, &[f64]),
    t: f64,
) -> Complex64 {
    (d_up(up.0) * up.1.up(up.2, t)) * (d_down(down.0) * down.1.down(down.2, t))
}

/// `D_↑(ζ_A) w_↑(r_A) D_↓(ζ_B) w_↓(r_B)`.
pub fn psi_product(
    angles: &TwoParticleAngles,
    envs: (&SpinorEnvelope, &SpinorEnvelope),
    r_a: &[f64],
    r_b: &[f64],
    t: f64,
) -> Complex64 {
    up_down_term((&angles.zeta_a, envs.0, r_a), (&angles.zeta_b, envs.1, r_b), t)
}

/// `(ψ_↑↓ − ψ_↓↑)/√2`.
pub fn psi_singlet(
    angles: &TwoParticleAngles,
    envs: (&SpinorEnvelope, &SpinorEnvelope),
    r_a: &[f64],
    r_b: &[f64],
    t: f64,
) -> Complex64 {
    let a = (&angles.zeta_a, envs.0, r_a);
    let b = (&angles.zeta_b, envs.1, r_b);
    (up_down_term(a, b, t) - up_down_term(b, a, t)) * FRAC_1_SQRT_2
}

/// `1 − cos β_A cos β_B − cos Δα sin β_A sin β_B`.
pub fn singlet_denominator(angles: &TwoParticleAngles) -> f64 {
    let (ba, bb) = (angles.zeta_a.beta, angles.zeta_b.beta);
    1.0 - ba.cos() * bb.cos() - angles.delta_alpha().cos() * ba.sin() * bb.sin()
}

/// `|ψ_singlet|²` with unit envelopes, equal to a quarter of [`singlet_denominator`].
pub fn singlet_angular_density(angles: &TwoParticleAngles) -> f64 {
    0.25 * singlet_denominator(angles)
}

/// Singlet angular density as a field on the V₁₂ chart.
pub fn singlet_angular_density_field() -> DensityField {
    DensityField::new(12, |q| {
        singlet_angular_density(&TwoParticleAngles::new(
            EulerTriple::from_coords(&q[3..6]),
            EulerTriple::from_coords(&q[9..12]),
        ))
    })
}

/// The closed-form singlet action
/// `ħ[(γ_A+γ_B)/2 + arctan(csc((β_A−β_B)/2) sin((β_A+β_B)/2) tan((α_B−α_A)/2))]`.
///
/// The arctangent fixes the phase only modulo `πħ`.
pub fn singlet_action_formula(angles: &TwoParticleAngles, hbar: f64) -> f64 {
    let (a, b) = (&angles.zeta_a, &angles.zeta_b);
    let ratio = (0.5 * (a.beta + b.beta)).sin() / (0.5 * (a.beta - b.beta)).sin();
    hbar * (0.5 * (a.gamma + b.gamma) + (ratio * (0.5 * angles.delta_alpha()).tan()).atan())
}

/// `22/(5a² D)` with `D` the [`singlet_denominator`].
pub fn curvature_singlet(angles: &TwoParticleAngles, a: GyrationScale) -> Result<f64> {
    let d = pole(singlet_denominator(angles))?;
    Ok(22.0 / (5.0 * a.value().powi(2) * d))
}

/// Angular curvature of the spin-up times spin-down product on V₁₂,
/// `−11/(5a²(1 + cos β_A)) − 11/(5a²(1 − cos β_B))`.
pub fn curvature_product(angles: &TwoParticleAngles, a: GyrationScale) -> Result<f64> {
    let da = pole(1.0 + angles.zeta_a.beta.cos())?;
    let db = pole(1.0 - angles.zeta_b.beta.cos())?;
    let k = 11.0 / (5.0 * a.value().powi(2));
    Ok(-k / da - k / db)
}

fn split12(q: &[f64]) -> (TwoParticleAngles, &[f64], &[f64]) {
    let angles = TwoParticleAngles::new(EulerTriple::from_coords(&q[3..6]), EulerTriple::from_coords(&q[9..12]));
    (angles, &q[0..3], &q[6..9])
}

/// Single-particle wave on V₆.
pub fn single_wave(a: GyrationScale, env: SpinorEnvelope) -> WaveField {
    WaveField::new(v6_chart(a), move |q, t| {
        psi_single(&EulerTriple::from_coords(&q[3..6]), &env, &q[0..3], t)
    })
}

/// Product state on V₁₂.
pub fn product_wave(a: GyrationScale, env_a: SpinorEnvelope, env_b: SpinorEnvelope) -> WaveField {
    WaveField::new(v12_chart(a), move |q, t| {
        let (angles, ra, rb) = split12(q);
        psi_product(&angles, (&env_a, &env_b), ra, rb, t)
    })
}

/// Singlet state on V₁₂.
pub fn singlet_wave(a: GyrationScale, env_a: SpinorEnvelope, env_b: SpinorEnvelope) -> WaveField {
    WaveField::new(v12_chart(a), move |q, t| {
        let (angles, ra, rb) = split12(q);
        psi_singlet(&angles, (&env_a, &env_b), ra, rb, t)
    })
}
