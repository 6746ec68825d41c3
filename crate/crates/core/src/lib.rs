//! Model checking of data flows in safe Petri nets with transits.
//!
//! A Flow-LTL property of a net with transits is reduced to an LTL property of a
//! P/T net with inhibitor arcs, which in turn is encoded as a circuit. Both
//! reduced forms can be checked with the explicit engine in [`mc`].

pub mod bench;
pub mod circuit;
pub mod error;
pub mod ltl;
pub mod mc;
pub mod net;
pub mod sdn;
pub mod testgen;
pub mod trace;
pub mod transform;

pub use error::{Error, Result};
