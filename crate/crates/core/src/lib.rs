//! Device-independent self-testing of multipartite qubit states.
//!
//! This crate is the allocation-only algorithmic core: qubit linear algebra,
//! permutationally invariant Bell expressions and their local bounds, the
//! linear program that synthesizes W-state Bell inequalities, see-saw
//! optimization, NPA-style moment matrices, the SWAP fidelity functional and
//! the LP/SDP solvers behind them. It has no IO and builds under `no_std`.
//!
//! File formats, the command-line front end and parallel drivers live in the
//! companion `selftest` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod bell;
pub mod exact;
pub mod linalg;
pub mod lp;
pub mod moment;
pub mod qubit;
pub mod sdp;
pub mod seesaw;
pub mod swap;
pub mod synth;

pub use error::{Error, Result};
pub use bell::{Coeff, DeterministicStrategy, GeneralBellExpression, PIBellExpression};
pub use exact::Rad2;

pub use moment::{MomentFunctional, MomentMatrixStructure, OperatorWord, SequenceLevel};
pub use qubit::{HermitianOperator, PlanarObservable, StateVector};
pub use sdp::{SdpInstance, SdpSettings, SdpSolution, SdpStatus};
pub use swap::{FidelityCurve, SwapTarget};
pub use synth::{SynthesisOptions, SynthesisResult};
