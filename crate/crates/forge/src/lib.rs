//! File formats, brute-force verification oracles, and the `graspforge`
//! command-line tool.
//!
//! The analytic machinery lives in [`graspforge_core`]; this crate adds
//! everything that touches the outside world: OBJ meshes, ASCII point
//! clouds, line-delimited JSON annotation records, plain-text config
//! files, and run manifests. The [`oracles`] module holds slow
//! brute-force reimplementations of the core algorithms used to
//! cross-check them.

pub mod cli;
pub mod cloud;
pub mod config;
pub mod manifest;
pub mod numfmt;
pub mod obj;
pub mod oracles;
pub mod records;

pub use graspforge_core as core;
