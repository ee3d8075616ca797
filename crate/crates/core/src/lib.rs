//! Uniaxial perfectly matched layer for time-domain Maxwell scattering.
//!
//! * [`profiles`]: absorption profiles, real stretching and the diagonal tensors.
//! * [`kernels`]: stretched Laplace-domain kernels and layer potentials.
//! * [`yee`]: staggered leapfrog for the truncated layer system.
//! * [`lab`]: reference runs, error norms, sweeps and decay fits.
//! * [`config`]: configuration, canonical echo and run manifests.

pub mod checks;
pub mod config;
pub mod error;
pub mod grid;
pub mod history;
pub mod kernels;
pub mod lab;
pub mod profiles;
pub mod snapshot;
pub mod yee;

pub use error::{Error, Result};
pub use grid::{Component, GridSpec};
pub use history::{FieldHistory, RegionIndex, Snapshot};
pub use kernels::{LaplaceFrequency, StretchedKernels, SurfacePanels};
pub use profiles::{PmlParams, StretchDiagonal};
pub use yee::{EMState, Medium, ScattererSpec, Simulation, SourceSpec};
