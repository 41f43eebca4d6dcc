//! Command-line harness for the minimal cylinder and cone solvers.

pub mod bench;
pub mod io;
pub mod ransac;
pub mod report;
pub mod stats;
