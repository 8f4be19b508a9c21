//! Explicit, symbolic and linear operational semantics for untimed CIF-style
//! automata compositions, a linearizer producing single-location automata
//! with location pointers, and bounded-domain checkers relating the levels.

pub mod explicit;
pub mod fixtures;
pub mod linear;
pub mod linearize;
pub mod model;
pub mod symbolic;
pub mod ts;
pub mod verify;
