//! Integration and sweep machinery shared by the scattering engines.

pub mod qmc;
pub mod quadrature;
pub mod sweep;

pub use qmc::{qmc_integrate, qmc_integrate_vec, QmcEstimate, QmcSpec};
pub use quadrature::{
    gauss_legendre, integrate_1d, integrate_2d, CVec, Estimate, NotConverged, QuadValue, QuadratureSpec,
};
pub use sweep::{sweep, with_workers};
