//! Prolog Server Pages: HTML documents with embedded Prolog, rendered by a
//! built-in Prolog engine.

pub mod diagnostic;
pub mod prolog;
pub mod template;
pub mod web;

pub use diagnostic::{Diagnostic, Severity};
