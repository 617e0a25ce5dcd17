//! Numerics for conformal quantum geometrodynamics: Weyl geometry on metric
//! charts, wave fields and their residuals, spin-½ states on Euler angles and
//! EPR coincidence statistics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod epr;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod numerics;
pub mod spin_states;

pub use error::{CqgError, Result};
pub use fields::{Units, WaveField};
pub use geometry::{DensityField, MetricChart};
pub use numerics::{FiniteDiff, QuadratureSpec};
pub use spin_states::{EulerTriple, GyrationScale, TwoParticleAngles};
