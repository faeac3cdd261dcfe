//! Stationary fluctuations of a nano waveguide that modulates the external
//! decay rate of a microdisk resonator (reactive coupling), driven by a laser
//! and a finite-bandwidth squeezed vacuum.
//!
//! The pipeline is
//! [`derive_params`] → [`solve_steady_state`] → [`build_drift_matrix`] /
//! [`response_at`] → [`momentum_variance`] / [`position_variance`],
//! with [`sweep`] batching it over one parameter axis.

pub mod constants;
pub mod linalg;
pub mod linear_response;
pub mod noise_spectra;
pub mod output_field;
pub mod params;
pub mod quadrature;
pub mod steady_state;
pub mod sweep;
pub mod variance;

pub use linear_response::{
    build_drift_matrix, is_stable, response_at, response_oracle, DriftMatrix, ResponseError, TransferPoint,
};
pub use noise_spectra::{SqueezedBath, ThermalBath};
pub use output_field::{output_transfer_at, reconstruct_momentum, OutputError, OutputTransfer};
pub use params::{derive_params, DerivedParams, ParamError, PhysicalParams};
pub use quadrature::{integrate_adaptive, Integral, QuadratureError};
pub use steady_state::{solve_steady_state, SteadyState, SteadyStateError};
pub use variance::{momentum_variance, position_variance, QuadratureConfig, VarianceBreakdown, VarianceError};
