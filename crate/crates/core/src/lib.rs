//! Modeling toolkit for cavity electro-optic microwave↔optical transducers
//! and the fiber link between a pair of them.
//!
//! The crate covers the full chain at desk scale:
//!
//! - [`transducer`] — device parameter sets, photonic-molecule
//!   hybridization, pump photon number, cooperativity and on-chip
//!   transduction efficiency;
//! - [`overlap`] — the electro-optic coupling rate g_eo from discretized
//!   transverse field profiles;
//! - [`spectra`] — four-port scattering spectra, the peak/background
//!   efficiency calibration, and conversion bandwidth;
//! - [`noise`] — output noise spectral density and microwave-mode thermal
//!   occupancy;
//! - [`matcher`] — Vernier resonance pairing and DC-voltage solving for
//!   intra-/inter-cavity frequency matching;
//! - [`link`] — fiber response, the cascaded M2O2M transfer, and the
//!   technology link-budget table;
//! - [`comm`] — QPSK constellations and local-oscillator interference
//!   fringes over the link;
//! - [`params`] / [`presets`] — device files on disk and the built-in
//!   measured device pair.
//!
//! Everything is a pure function of its inputs; parameter sweeps are safe to
//! run concurrently.

pub mod comm;
pub mod constants;
pub mod error;
pub mod grid;
pub mod link;
pub mod matcher;
pub mod noise;
pub mod overlap;
pub mod params;
pub mod presets;
pub mod spectra;
pub mod transducer;

mod linalg;

pub use error::{Error, Result};
pub use grid::FrequencyGrid;
