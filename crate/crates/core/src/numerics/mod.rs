//! Shared deterministic kernels: quadrature, finite differences, compensated
//! sums and counter-based random streams.

pub mod diff;
pub mod quadrature;
pub mod random;
pub mod sum;

pub use diff::{check_point, fd_derivative, fd_gradient, CoordKind, CoordRange, Estimate, FdValue, FiniteDiff, Order};
pub use quadrature::{tensor_quadrature, tensor_quadrature_with, Axis, QuadratureSpec, Rule};
pub use random::RandomStream;
pub use sum::{compensated_sum, NeumaierSum};
