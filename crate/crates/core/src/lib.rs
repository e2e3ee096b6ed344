#![cfg_attr(not(test), no_std)]
//! Analytic machinery for parallel-jaw grasping on triangle meshes.
//!
//! The crate covers the geometry-to-metrics path that sits underneath a
//! grasp-learning pipeline: antipodal contact sampling on a mesh surface,
//! wrench-space force-closure testing and quality scoring, grid-anchor grasp
//! proposals with anisotropic point neighborhoods, virtual depth-camera
//! scans, training losses, and rule-based evaluation with non-maximum
//! suppression.
//!
//! Everything here is pure computation over immutable inputs: samplers are
//! deterministic functions of `(input, seed)`, and no module performs IO.
//! File formats and the command-line driver live in the companion
//! `graspforge` crate.

extern crate alloc;

pub mod antipodal;
pub mod camera;
pub mod evaluation;
pub mod grasp;
pub mod hull3;
pub mod mesh;
pub mod objectives;
pub mod pipeline;
pub mod proposal;
pub mod shapes;
pub mod wrench;

mod bvh;
mod frame;
mod simplex;

pub use nalgebra;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    #[allow(unused_imports)] // float math trait for no_std builds
    use num_traits::Float;
    let two_pi = 2.0 * core::f64::consts::PI;
    let w = x - two_pi * ((x - core::f64::consts::PI) / two_pi).ceil();
    // ceil can land exactly on -pi for inputs a hair above an odd multiple of pi
    if w <= -core::f64::consts::PI {
        w + two_pi
    } else {
        w
    }
}
