//! Few-photon scattering of waveguide photons off a driven Lambda-type
//! three-level or N-type four-level emitter.
//!
//! All results follow from closed-form scattering eigenstates: single-photon
//! transmission, two- and three-photon bound-state amplitudes in momentum
//! space, and the derived transport, spectral and counting statistics.

pub mod coeffs;
pub mod coherent_stats;
pub mod error;
pub mod numerics;
pub mod params;
pub mod single_photon;
pub mod three_photon;
pub mod two_photon;

pub use error::{Error, Result};
pub use params::{make_paper_defaults, AtomKind, SystemParams};
pub use single_photon::Wavepacket;
