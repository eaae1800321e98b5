//! Geodesic automata, thermodynamic formalism and mean distortion for
//! word-hyperbolic groups.

pub mod automaton;
pub mod battery;
pub mod dimension;
pub mod distortion;
pub mod error;
pub mod group;
pub mod report;
pub mod rng;
pub mod sft;

pub use error::{Error, Result};
