//! Second-moment beamline transport for single-particle quantum wave
//! packets in axially symmetric electric and magnetic elements.
//!
//! The crate evolves the transverse phase space (rms radius, rms velocity,
//! correlation, emittance, Twiss parameters, canonical and kinetic angular
//! momentum) of Gaussian, Hermite-Gaussian, and Laguerre-Gaussian packets
//! through drifts, solenoids, electrostatic and crossed-field lenses, and
//! Penning traps, and computes the orbital angular momentum imparted by
//! magnetized cathodes and stripping foils. Every analytic result has an
//! independent numeric cross-check in [`oracle`].
//!
//! Modules:
//!  * [`constants`] - species data and field/frequency scales
//!  * [`classical`] - closed-form cyclotron benchmark and its invariants
//!  * [`packets`] - the analytic packet catalog and its moments
//!  * [`free_transport`] - drift propagation, Twiss parameters, van
//!    Cittert-Zernike relations
//!  * [`elements`] - hard-edge element transport and lens reports
//!  * [`busch`] - OAM at birth from magnetized sources
//!  * [`oracle`] - grid quadrature, moment-equation integration, orbit
//!    integration, residual checks
//!  * [`lattice`] - beamline file format and the transport pipeline

pub mod busch;
pub mod classical;
pub mod constants;
pub mod elements;
pub mod error;
pub mod free_transport;
pub mod lattice;
pub mod oracle;
pub mod packets;
pub mod units;

pub use constants::{FieldScales, ParticleSpecies};
pub use error::{Error, Result};
pub use packets::{Moments1D, PacketFamily, PacketSpec, TransverseMoments};
