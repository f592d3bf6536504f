//! Inversive (Möbius) geometry of plane curves: invariants, Serret–Frenet
//! reconstruction, and the inversive curve-lengthening flow.

pub mod analytic;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod frenet;
pub mod invariants;
pub mod jet;
pub mod mobius;
pub mod spectral;
pub mod spline;

pub use error::{Error, Result};
