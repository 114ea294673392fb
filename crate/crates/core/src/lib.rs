//! Twisted time-frequency analysis on L²(ℂ).
//!
//! Sampled fields on ℂ and their discrete calculus ([`field`]), Hermite and
//! special Hermite functions ([`hermite`]), twisted translations and the
//! operators Z, Z̄, L ([`twistop`]), the twisted Zak transform ([`zak`]), the
//! Weyl transform as a kernel operator ([`weyl`]) and Balian-Low style
//! demonstrators ([`blt`]). Results are collected in [`report::AnalysisReport`].

pub mod blt;
pub mod error;
pub mod field;
pub mod hermite;
pub mod io;
pub mod report;
pub mod stencil;
pub mod twistop;
pub mod weyl;
pub mod zak;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
