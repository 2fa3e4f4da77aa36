//! Exact polar spaces of pseudo-quadratic form type over concrete skew
//! fields, together with the residue reduction maps induced by total
//! subrings, and a verification CLI that exercises the whole construction
//! with seeded property checks.

pub mod actions;
pub mod config;
pub mod epimorphism;
pub mod error;
pub mod geometry;
pub mod involutory;
pub mod pqspace;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod subring;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
