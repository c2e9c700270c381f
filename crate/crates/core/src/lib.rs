//! Photon blockade and photon-induced tunneling in a driven optomechanical
//! cavity.
//!
//! The crate solves the Lindblad master equation of a cavity mode coupled by
//! radiation pressure to a damped, thermally driven mechanical resonator, in
//! a truncated Fock basis, and reports equal-time photon statistics. Closed
//! form weak-drive estimates are provided alongside as independent checks.
//!
//! Units: `ħ = 1`, frequencies are angular in rad/μs (rad·MHz), times in μs,
//! temperatures in kelvin. Configuration files use ordinary frequencies
//! `ν = ω/2π` in MHz and are converted once on load.

pub mod correlations;
pub mod error;
pub mod fock;
pub mod lindblad;
pub mod model;
pub mod sparse;
pub mod sweep;

pub use error::{Error, Result};

/// Double precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;
