//! Simulation and verification workbench for conditional quantum dynamics:
//! a dense state-vector engine, the controlled-NOT gate family and its
//! composite identities, entanglement/measurement/swap protocols (including
//! a two-party swap over a classical-bit channel with a networked runner),
//! a Ramsey-interferometry cavity model, and a dipole-coupled quantum-dot
//! model with driven π-pulse dynamics and timescale feasibility reports.

pub mod cli;
pub mod distsim;
pub mod dotsim;
pub mod error;
pub mod gatelib;
pub mod protocols;
pub mod qstate;
pub mod ramsey;
pub mod random;

pub use error::{Error, Result};
