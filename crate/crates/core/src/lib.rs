//! Decoherence of charged-particle superpositions through the emission of
//! bremsstrahlung.
//!
//! The crate computes the bath kernels of the radiation field in dipole
//! approximation, the decoherence function and coherence length of a free
//! or harmonically bound electron, Gaussian wave-packet propagation and
//! two-packet interference, and radiation-damped classical dynamics. Every
//! closed form is paired with a quadrature route in the tests.

pub mod cli;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod numerics;
pub mod scenarios;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use units::{build_config, PhysicalConfig};
