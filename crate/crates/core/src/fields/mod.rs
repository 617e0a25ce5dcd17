//! Wave fields, their polar decomposition, the field-equation residuals,
//! trajectories and detector fluxes.

mod flux;
mod residuals;
mod trajectory;
mod wave;

pub use flux::{current_field, detector_flux, factorized_flux, DetectorSurface, FactorizedState};
pub use residuals::{
    ansatz_combination, conformal_wave_residual, continuity_residual, current_density, hje_residual, velocity_field,
    CurrentSample,
};
pub use trajectory::{integrate_trajectory, Trajectory, TrajectoryStatus};
pub use wave::{compose, decompose, decompose_continued, wave_weight, xi, ActionField, PolarDecomposition, Units, WaveField};
