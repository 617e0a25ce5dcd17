//! Stern–Gerlach analyzers acting on the singlet, coincidence fluxes by
//! quadrature and Monte Carlo, marginals and Bell functionals.

mod amplitudes;
mod bell;
mod fluxes;
mod monte_carlo;

pub use amplitudes::{
    amplitude_coefficients, channel_amplitude, channel_density, factorization_gap, half_difference, marginal_bracket,
    pair_factor, sga_transform, Amplitudes, Channel, SgaOutput, SgaSetting,
};
pub use bell::{
    bell_redhead, bell_scan, chsh, chsh_combination, redhead_closed_form, BellReport, BellRow, ChshSettings,
    VIOLATION_MARGIN,
};
pub use fluxes::{
    channel_integral, check_angle_quadrature, coincidence_fluxes, coincidence_fluxes_full, correlation,
    marginal_densities, marginal_totals, marginal_totals_nested, no_signalling, FluxReport, FluxTable, MarginalTable,
    NoSignalReport, Side, MIN_GAUSS_NODES, MIN_PERIODIC_NODES,
};
pub use monte_carlo::{haar_draw, mc_chsh, mc_run, mc_run_many, McConfig, McEstimate, BLOCK};
