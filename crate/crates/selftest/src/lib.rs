//! File formats, parallel drivers and the command-line front end for
//! `selftest-core`.
//!
//! * [`sdpa`]: sparse SDPA import and export
//! * [`json`]: Bell expressions, synthesis and see-saw results
//! * [`output`]: CSV tables, sidecars and run manifests
//! * [`svg`]: line charts
//! * [`parallel`]: rayon drivers for scans, curves and see-saw seeds
//! * [`cli`]: the `selftest` binary

pub mod cli;
pub mod json;
pub mod output;
pub mod parallel;
pub mod sdpa;
pub mod svg;
pub mod values;

pub use selftest_core as core;
