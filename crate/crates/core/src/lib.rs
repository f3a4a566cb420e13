//! Display maps, tangent display maps and tangent structure on finite categories.
//!
//! Every category here is given by explicit tables, so each property is a
//! finite search. Composition is written diagrammatically throughout:
//! `then(f, g)` means "first `f`, then `g`".

#![no_std]

extern crate alloc;

pub mod fincat;
pub mod limits;
pub mod tangent;
pub mod display;
pub mod constructions;
pub mod ringcat;
