//! Problem-file runner for the tulczyjew engine.

pub mod problem;
pub mod report;
pub mod run;
