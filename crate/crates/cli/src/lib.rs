//! Script front end for the `chiral` engine: a small language for systems,
//! states and coordinate changes, and a runner that drives the engine's
//! computations and verifications.

pub mod lower;
pub mod run;
pub mod syntax;

pub use run::{run, run_source, Flags, Outcome};
pub use syntax::{parse, Diagnostic, Span};
