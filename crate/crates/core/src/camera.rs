//! Virtual depth camera: random view sampling on the upper hemisphere
//! and pinhole ray rendering of partial-surface point clouds.

use alloc::vec::Vec;
use nalgebra::{Point3, Vector3};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mesh::TriMesh;

/// Pinhole image geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub width: u32,
    pub height: u32,
    /// Vertical field of view in radians.
    pub vertical_fov: f64,
}

impl Default for CameraIntrinsics {
    fn default() -> CameraIntrinsics {
        CameraIntrinsics {
            width: 320,
            height: 240,
            vertical_fov: 45.0_f64.to_radians(),
        }
    }
}

/// A posed pinhole camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub position: Point3<f64>,
    pub look_at: Point3<f64>,
    pub up_hint: Vector3<f64>,
    pub intrinsics: CameraIntrinsics,
}

/// Failure modes of rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CameraError {
    /// The camera position lies inside a watertight mesh.
    InsideMesh,
    /// Position and look-at coincide.
    CoincidentLookAt,
    /// Vertical field of view outside (0, π).
    InvalidFov,
    /// View direction parallel to the up hint.
    DegenerateUp,
}

impl core::fmt::Display for CameraError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CameraError::InsideMesh => write!(f, "camera is inside the mesh"),
            CameraError::CoincidentLookAt => write!(f, "camera position equals look-at"),
            CameraError::InvalidFov => write!(f, "vertical fov must be in (0, pi)"),
            CameraError::DegenerateUp => write!(f, "view direction is parallel to up"),
        }
    }
}

impl core::error::Error for CameraError {}

/// Elevation band for sampled views, keeping clear of grazing and
/// exactly-overhead directions.
pub const ELEVATION_RANGE: (f64, f64) = (15.0 * core::f64::consts::PI / 180.0, 85.0 * core::f64::consts::PI / 180.0);

/// Draws a camera pose on the upper hemisphere looking at the origin.
///
/// The position is area-uniform over the elevation band at a uniform
/// radius from `radius_range`; repeated calls with one seed are
/// identical.
pub fn sample_view(radius_range: (f64, f64), seed: u64) -> CameraPose {
    let (r_min, r_max) = radius_range;
    assert!(
        0.0 < r_min && r_min <= r_max,
        "radius range must satisfy 0 < min <= max"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let azimuth = rng.gen::<f64>() * 2.0 * core::f64::consts::PI;
    // area-uniform on the band: the z-coordinate is the uniform variate
    let (lo, hi) = (ELEVATION_RANGE.0.sin(), ELEVATION_RANGE.1.sin());
    let s = lo + (hi - lo) * rng.gen::<f64>();
    let elevation = s.asin();
    let radius = r_min + (r_max - r_min) * rng.gen::<f64>();
    let position = Point3::new(
        radius * elevation.cos() * azimuth.cos(),
        radius * elevation.cos() * azimuth.sin(),
        radius * elevation.sin(),
    );
    CameraPose {
        position,
        look_at: Point3::origin(),
        up_hint: Vector3::z(),
        intrinsics: CameraIntrinsics::default(),
    }
}

/// Camera basis: forward, right, and image-down unit vectors.
fn view_basis(cam: &CameraPose) -> Result<(Vector3<f64>, Vector3<f64>, Vector3<f64>), CameraError> {
    let gaze = cam.look_at - cam.position;
    if gaze.norm() < 1e-12 {
        return Err(CameraError::CoincidentLookAt);
    }
    let forward = gaze.normalize();
    let right = forward.cross(&cam.up_hint);
    if right.norm() < 1e-9 {
        return Err(CameraError::DegenerateUp);
    }
    let right = right.normalize();
    let down = forward.cross(&right);
    Ok((forward, right, down))
}

/// Renders the visible surface as one world-space point per hitting
/// pixel ray, in row-major pixel order.
///
/// An all-miss view yields an empty cloud; callers decide whether that
/// warrants a warning. The inside-mesh check applies only to watertight
/// meshes, where containment is decidable.
pub fn render_cloud(mesh: &TriMesh, cam: &CameraPose) -> Result<Vec<Point3<f64>>, CameraError> {
    let fov = cam.intrinsics.vertical_fov;
    if !(fov > 0.0 && fov < core::f64::consts::PI) {
        return Err(CameraError::InvalidFov);
    }
    let (forward, right, down) = view_basis(cam)?;
    if mesh.is_watertight() && mesh.contains_point(&cam.position).unwrap_or(false) {
        return Err(CameraError::InsideMesh);
    }
    let (w, h) = (cam.intrinsics.width, cam.intrinsics.height);
    let half_tan = (fov / 2.0).tan();
    let aspect = w as f64 / h as f64;
    let mut points = Vec::new();
    for row in 0..h {
        let y = ((row as f64 + 0.5) / h as f64 - 0.5) * 2.0 * half_tan;
        for col in 0..w {
            let x = ((col as f64 + 0.5) / w as f64 - 0.5) * 2.0 * half_tan * aspect;
            let dir = (forward + right * x + down * y).normalize();
            let hits = mesh.ray_intersect(&cam.position, &dir);
            if let Some(first) = hits.first() {
                points.push(first.point);
            }
        }
    }
    Ok(points)
}

/// [`render_cloud`] with zero-mean Gaussian noise of deviation `sigma`
/// added along each ray's depth.
pub fn render_cloud_noisy(
    mesh: &TriMesh,
    cam: &CameraPose,
    sigma: f64,
    seed: u64,
) -> Result<Vec<Point3<f64>>, CameraError> {
    assert!(sigma >= 0.0, "sigma must be nonnegative");
    let fov = cam.intrinsics.vertical_fov;
    if !(fov > 0.0 && fov < core::f64::consts::PI) {
        return Err(CameraError::InvalidFov);
    }
    let (forward, right, down) = view_basis(cam)?;
    if mesh.is_watertight() && mesh.contains_point(&cam.position).unwrap_or(false) {
        return Err(CameraError::InsideMesh);
    }
    let (w, h) = (cam.intrinsics.width, cam.intrinsics.height);
    let half_tan = (fov / 2.0).tan();
    let aspect = w as f64 / h as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    for row in 0..h {
        let y = ((row as f64 + 0.5) / h as f64 - 0.5) * 2.0 * half_tan;
        for col in 0..w {
            let x = ((col as f64 + 0.5) / w as f64 - 0.5) * 2.0 * half_tan * aspect;
            let dir = (forward + right * x + down * y).normalize();
            let hits = mesh.ray_intersect(&cam.position, &dir);
            if let Some(first) = hits.first() {
                // Box-Muller, two fresh uniforms per depth sample
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen::<f64>();
                let gauss =
                    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos();
                let depth = first.distance + sigma * gauss;
                points.push(cam.position + dir * depth);
            }
        }
    }
    Ok(points)
}
