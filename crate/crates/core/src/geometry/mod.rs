//! Riemann and Weyl geometry on metric charts: Christoffel symbols, scalar
//! curvatures, the Weyl vector and connection, and gauge transformations.

mod chart;
mod curvature;
mod gauge;
mod weyl;

pub use chart::{LocalMetric, MetricChart, MetricFn, POLAR_MARGIN};
pub use curvature::{christoffel, riemann_scalar, Rank3};
pub use gauge::{gauge_transform, riemann_gauge, riemann_gauge_metric, GaugeFunction, GaugedBundle, WeightTable};
pub use weyl::{
    density_weight, weyl_connection, weyl_density_term, weyl_scalar, weyl_vector, DensityField, WeylFrame,
    DENSITY_FLOOR,
};

pub(crate) use weyl::laplace_beltrami;
