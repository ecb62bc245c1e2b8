//! Batch front end for `torus-dirac`: scenario files, residual checks,
//! CSV tables and text reports.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;
pub mod report;
