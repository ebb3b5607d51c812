//! Term and program generators plus reference implementations used as test
//! oracles for the engine.

pub mod programs;
pub mod terms;
