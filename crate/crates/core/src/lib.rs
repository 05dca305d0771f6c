//! Boundary spin correlations of the Z-invariant Ising model on polygonal
//! regions, computed from the region's combinatorics through products of
//! rescaled Jacobi elliptic functions, together with an exhaustive
//! enumeration oracle on explicit chord arrangements.

pub mod arrangement;
pub mod correlations;
pub mod elliptic;
pub mod error;
pub mod linalg;
pub mod nearcritical;
pub mod oracle;
pub mod region;

pub use arrangement::{build_arrangement, build_black_graph, build_white_graph, IsingGraph};
pub use correlations::{correlation_matrix, gamma, CorrelationMatrix, CurveSample, DoubledMatrix};
pub use elliptic::EllipticParameter;
pub use error::{Error, Result};
pub use oracle::{exact_correlations, OracleResult};
pub use region::{Involution, Region, RegionSpec, Violation};
