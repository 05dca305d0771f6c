//! The curve `γ_R`, the correlation matrix it determines, transport across
//! descents, the derivative basis, and duality.

pub mod alternating;
pub mod curve;
pub mod duality;
pub mod matrix;
pub mod transport;

pub use alternating::{alternating_basis, discrete_derivative};
pub use curve::{gamma, gamma_coord, gamma_derivative, gamma_signed, CurveSample};
pub use duality::{dual_correlation_matrix, dual_gamma, duality_checks, shift_s, DualityReport};
pub use matrix::{
    basis_matrix, correlation_matrix, doubled_matrix, k_matrix, CorrelationMatrix, DoubledMatrix,
};
pub use transport::{descent_transport_check, transfer_matrix, TransferMatrix, TransportChain};
