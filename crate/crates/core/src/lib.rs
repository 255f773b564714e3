#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Quantum-logic recoil spectroscopy of a single molecular ion co-trapped
//! with an atomic logic ion.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical
//! models: truncated Fock-space states and operators, time-dependent
//! propagation of a spin coupled to a motional mode, Schrödinger-cat
//! generation, recoil detection, pump-probe signals and the protocol
//! parameter optimizer. File formats, tables and the command line live in
//! the `qls` companion crate.
//!
//! Units: SI internally (rad/s, s, kg, m⁻¹). Catalog quantities stay in
//! spectroscopy units (cm⁻¹, Dalton, nm) and are converted in [`physics`].
//! Hamiltonians are expressed as `H/ħ` in rad/s.

extern crate alloc;

pub mod catgen;
pub mod dynamics;
mod error;
pub mod fock;
pub mod linalg;
pub mod molecule;
pub mod optimizer;
pub mod physics;
pub mod pumpprobe;
pub mod recoil;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
