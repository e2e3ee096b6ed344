//! Friction-cone sampling of antipodal contact pairs on a mesh surface,
//! and pitch enumeration over a fixed pair.

use alloc::vec::Vec;
use nalgebra::Vector3;
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::frame::orthonormal_tangents;
use crate::grasp::ContactGrasp;
use crate::mesh::{SurfacePoint, SurfaceSampler, TriMesh};

/// Default friction coefficient.
pub const DEFAULT_GAMMA: f64 = 0.5;
/// Default maximum jaw opening in meters.
pub const DEFAULT_MAX_WIDTH: f64 = 0.085;
/// Attempts allowed per requested pair before sampling gives up.
pub const ATTEMPTS_PER_PAIR: u64 = 100;

/// Slack on the friction-cone boundary test, making exact boundary
/// contacts valid.
const CONE_BOUNDARY_TOL: f64 = 1e-12;

/// Hits closer than this to either contact do not count as blocking
/// material on the closing line.
const BLOCKING_CLEARANCE: f64 = 1e-6;

/// An antipodal contact pair: jaw contacts, the unit closing direction
/// from `c1` toward `c2`, and the friction coefficient it was accepted
/// under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPair {
    pub c1: SurfacePoint,
    pub c2: SurfacePoint,
    pub v: Vector3<f64>,
    pub gamma: f64,
}

impl ContactPair {
    pub fn width(&self) -> f64 {
        (self.c2.position - self.c1.position).norm()
    }
}

/// Failure modes for antipodal queries.
#[derive(Debug, Clone, PartialEq)]
pub enum AntipodalError {
    /// Contacts coincide; the closing direction is undefined.
    DegeneratePair,
    /// The ray from the contact never exits the body.
    NoOppositeSurface,
    /// The exit contact lies beyond the maximum jaw opening.
    WidthExceeded { width: f64 },
}

impl core::fmt::Display for AntipodalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AntipodalError::DegeneratePair => write!(f, "contact pair is degenerate"),
            AntipodalError::NoOppositeSurface => {
                write!(f, "closing ray does not exit the body")
            }
            AntipodalError::WidthExceeded { width } => {
                write!(f, "pair width {width} exceeds the maximum jaw opening")
            }
        }
    }
}

impl core::error::Error for AntipodalError {}

/// Per-category attempt counts from a sampling run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SampleStats {
    pub attempts: u64,
    pub accepted: u64,
    pub rejected_no_exit: u64,
    pub rejected_degenerate: u64,
    pub rejected_width: u64,
    pub rejected_blocked: u64,
    pub rejected_cone: u64,
}

impl SampleStats {
    /// Accepted pairs per attempt.
    pub fn yield_ratio(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }
}

/// Result of a sampling run: the accepted pairs plus attempt statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSampling {
    pub pairs: Vec<ContactPair>,
    pub stats: SampleStats,
}

/// Raised when the attempt cap runs out; carries the partial result.
#[derive(Debug, Clone, PartialEq)]
pub struct AttemptCapExhausted {
    pub partial: PairSampling,
    pub requested: usize,
}

impl core::fmt::Display for AttemptCapExhausted {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "attempt cap exhausted: {} of {} pairs after {} attempts (yield {:.4})",
            self.partial.pairs.len(),
            self.requested,
            self.partial.stats.attempts,
            self.partial.stats.yield_ratio()
        )
    }
}

impl core::error::Error for AttemptCapExhausted {}

/// Tests the antipodal condition for two surface contacts.
///
/// With outward normals `n1`, `n2` and the unit closing direction `v` from
/// `c1` to `c2`, the pair is antipodal when `v` lies within the friction
/// cone of half-angle `arctan gamma` about `-n1` and `-v` within the cone
/// about `-n2`. The boundary is inclusive.
pub fn antipodal_valid(
    c1: &SurfacePoint,
    c2: &SurfacePoint,
    gamma: f64,
) -> Result<bool, AntipodalError> {
    let axis = c2.position - c1.position;
    let width = axis.norm();
    if width < 1e-9 {
        return Err(AntipodalError::DegeneratePair);
    }
    let v = axis / width;
    let cos_alpha = 1.0 / (1.0 + gamma * gamma).sqrt();
    let in_cone_1 = v.dot(&-c1.normal) >= cos_alpha - CONE_BOUNDARY_TOL;
    let in_cone_2 = (-v).dot(&-c2.normal) >= cos_alpha - CONE_BOUNDARY_TOL;
    Ok(in_cone_1 && in_cone_2)
}

/// Finds the opposite contact: the farthest surface exit along `v` from
/// `c1`, which is where the second jaw lands.
pub fn opposite_contact(
    mesh: &TriMesh,
    c1: &SurfacePoint,
    v: &Vector3<f64>,
    max_width: f64,
) -> Result<SurfacePoint, AntipodalError> {
    let hits = mesh.ray_intersect(&c1.position, v);
    let far = hits.last().ok_or(AntipodalError::NoOppositeSurface)?;
    if far.distance > max_width {
        return Err(AntipodalError::WidthExceeded {
            width: far.distance,
        });
    }
    Ok(SurfacePoint {
        position: far.point,
        normal: mesh.face_normals()[far.face],
        face: far.face,
    })
}

/// Samples antipodal contact pairs by rejection.
///
/// Each attempt draws an area-weighted surface point `c1`, then a closing
/// direction uniform over the solid-angle cap of half-angle `arctan gamma`
/// about the inward normal, casts through the body, and takes the farthest
/// exit as `c2`. Attempts are rejected when the ray never exits, the pair
/// is wider than `max_width`, material sits strictly between the contacts
/// on the closing line, or the exit contact fails the antipodal test.
///
/// Deterministic per seed. Fails with the partial result once
/// `ATTEMPTS_PER_PAIR * count` attempts are spent.
pub fn sample_contact_pairs(
    mesh: &TriMesh,
    gamma: f64,
    count: usize,
    max_width: f64,
    seed: u64,
) -> Result<PairSampling, AttemptCapExhausted> {
    let sampler = SurfaceSampler::new(mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SampleStats::default();
    let mut pairs = Vec::with_capacity(count);
    let cap = ATTEMPTS_PER_PAIR * count as u64;
    let cos_alpha = 1.0 / (1.0 + gamma * gamma).sqrt();
    while pairs.len() < count && stats.attempts < cap {
        stats.attempts += 1;
        let c1 = sampler.sample(&mut rng);
        let axis = -c1.normal;
        let (t1, t2) = orthonormal_tangents(&axis);
        // area-uniform on the cap: cos(theta) uniform in [cos(alpha), 1]
        let cos_t = 1.0 - rng.gen::<f64>() * (1.0 - cos_alpha);
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = rng.gen::<f64>() * 2.0 * core::f64::consts::PI;
        let v = axis * cos_t + (t1 * phi.cos() + t2 * phi.sin()) * sin_t;
        let hits = mesh.ray_intersect(&c1.position, &v);
        let far = match hits.last() {
            Some(h) => h,
            None => {
                stats.rejected_no_exit += 1;
                continue;
            }
        };
        if far.distance < BLOCKING_CLEARANCE {
            stats.rejected_degenerate += 1;
            continue;
        }
        if far.distance > max_width {
            stats.rejected_width += 1;
            continue;
        }
        let blocked = hits[..hits.len() - 1].iter().any(|h| {
            h.distance > BLOCKING_CLEARANCE && far.distance - h.distance > BLOCKING_CLEARANCE
        });
        if blocked {
            stats.rejected_blocked += 1;
            continue;
        }
        let c2 = SurfacePoint {
            position: far.point,
            normal: mesh.face_normals()[far.face],
            face: far.face,
        };
        match antipodal_valid(&c1, &c2, gamma) {
            Ok(true) => {
                let v_exact = (c2.position - c1.position).normalize();
                stats.accepted += 1;
                pairs.push(ContactPair {
                    c1,
                    c2,
                    v: v_exact,
                    gamma,
                });
            }
            Ok(false) | Err(_) => {
                stats.rejected_cone += 1;
            }
        }
    }
    let sampling = PairSampling { pairs, stats };
    if sampling.pairs.len() < count {
        Err(AttemptCapExhausted {
            partial: sampling,
            requested: count,
        })
    } else {
        Ok(sampling)
    }
}

/// Expands a pair into grasps at evenly spaced pitches
/// `phi_k = -pi + 2 pi k / count`.
pub fn enumerate_pitch(pair: &ContactPair, count: usize) -> Vec<ContactGrasp> {
    let step = 2.0 * core::f64::consts::PI / count as f64;
    (0..count)
        .map(|k| ContactGrasp {
            c1: pair.c1.position,
            c2: pair.c2.position,
            pitch: -core::f64::consts::PI + step * k as f64,
        })
        .collect()
}
