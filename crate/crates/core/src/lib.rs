//! Preparation, simulation, tomography and reconstruction of three-qubit
//! pure states on a heteronuclear spin register.
//!
//! Qubits are numbered 1..=3 in public APIs (qubit 1 is the most
//! significant bit of a basis index); partial traces take 0-based
//! positions. Angles are radians internally.

pub mod error;
pub mod gates;
pub mod io;
pub mod pulsesim;
pub mod qcore;
pub mod reconstruct;
pub mod states;
pub mod tomo;

pub use error::{Error, Result};
pub use gates::{Circuit, Gate};
pub use pulsesim::{PulseEvent, PulseProgram, SpinSystem};
pub use qcore::{fidelity, partial_trace, psd_project, CMatrix, Cplx, DensityMatrix, Ket};
pub use reconstruct::{reconstruct_pure, ReconstructConfig, SchmidtData};
pub use states::{GenericParams, GenericParamsDeg};
pub use tomo::{PairLabel, TomoOp, TomoRecord};
