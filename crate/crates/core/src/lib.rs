//! Downlink coverage analysis for networks of UAV access points hovering
//! above user hotspots in an urban environment.
//!
//! The crate is `no_std` (it needs `alloc`) and is split into:
//!
//! * [`specfun`]: Gauss hypergeometric function and friends.
//! * [`quadrature`]: adaptive Gauss-Kronrod integration.
//! * [`urban`]: building-grid LOS model, pathloss, antenna cone.
//! * [`analytic`]: association probabilities, interference Laplace
//!   transforms and the coverage / spectral-efficiency integrals.
//! * [`mcsim`]: an independent Monte-Carlo simulator covering hotspot,
//!   PPP, grid and K-means placements.
//!
//! IO, configuration and the command-line front end live in the `uavnet`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analytic;
mod error;
pub mod mcsim;
pub mod quadrature;
pub mod specfun;
pub mod urban;

pub use error::{Error, Result};
pub use urban::{ChannelType, Deployment, Model, RadioConfig, Strategy, UrbanEnvironment};
