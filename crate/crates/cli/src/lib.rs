//! Presentation files, reports and commands for the tangent display engine.

pub mod commands;
pub mod presentation;

pub use commands::{run, Command, Options, Outcome};
