//! Wrench-space grasp quality: friction-cone facet forces, contact wrench
//! construction, force-closure decision, and the largest-inscribed-ball
//! score.
//!
//! A two-contact soft-finger grasp yields `2(L+1)` wrench points in 6D.
//! The origin-in-hull decision runs a relative-interior linear program
//! (maximize the minimum convex coefficient), which distinguishes strict
//! interiority from boundary contact; the score is then the minimum facet
//! offset of the hull, found by enumerating all 6-point supporting
//! hyperplanes.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{Matrix6, Vector3, Vector6};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;

use crate::frame::orthonormal_tangents;
use crate::antipodal::ContactPair;
use crate::mesh::SurfacePoint;
use crate::simplex::{solve_lp, LpOutcome};

/// Default count of friction-cone facets.
pub const DEFAULT_CONE_FACETS: usize = 8;

/// Minimum distance from the origin to the hull boundary for a grasp to
/// count as force closure; anything closer is flagged degenerate.
pub const CLOSURE_MARGIN: f64 = 1e-9;

/// Failure modes of wrench construction.
#[derive(Debug, Clone, PartialEq)]
pub enum WrenchError {
    /// Contact normal has (near) zero length.
    DegenerateNormal,
    /// Fewer than 3 cone facets cannot span a cone.
    InvalidFacetCount,
    /// Both contacts coincide with the torque origin.
    ContactsAtTorqueOrigin,
}

impl core::fmt::Display for WrenchError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WrenchError::DegenerateNormal => write!(f, "contact normal is degenerate"),
            WrenchError::InvalidFacetCount => write!(f, "cone needs at least 3 facets"),
            WrenchError::ContactsAtTorqueOrigin => {
                write!(f, "both contacts coincide with the torque origin")
            }
        }
    }
}

impl core::error::Error for WrenchError {}

/// The discretized friction cone at one contact: `facet_count` unit force
/// directions at angle `arctan gamma` from the inward contact normal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeFacets {
    pub contact: SurfacePoint,
    pub forces: Vec<Vector3<f64>>,
    pub facet_count: usize,
    pub gamma: f64,
}

/// The wrench points of a two-contact grasp about a torque origin.
#[derive(Debug, Clone, PartialEq)]
pub struct WrenchSet {
    pub wrenches: Vec<Vector6<f64>>,
    pub torque_scale: f64,
    pub mass_center: nalgebra::Point3<f64>,
}

/// Outcome of the quality analysis.
///
/// `score` is `-1` exactly when the grasp is not force closure. The
/// `degenerate` flag marks sets whose hull is not full-dimensional or
/// whose origin sits within `CLOSURE_MARGIN` of the boundary; those are
/// reported as not force closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspQuality {
    pub force_closure: bool,
    pub score: f64,
    pub degenerate: bool,
}

impl GraspQuality {
    fn failed(degenerate: bool) -> GraspQuality {
        GraspQuality {
            force_closure: false,
            score: -1.0,
            degenerate,
        }
    }
}

/// Discretizes the friction cone at a contact.
///
/// `contact.normal` must already be the inward normal (the direction a jaw
/// pushes). Facet `j` is the normalized
/// `n + gamma (cos(2 pi j / L) t1 + sin(2 pi j / L) t2)` over any fixed
/// orthonormal tangent pair, so every facet sits at angle `arctan gamma`
/// from the normal.
pub fn cone_facets(
    contact: &SurfacePoint,
    gamma: f64,
    facet_count: usize,
) -> Result<ConeFacets, WrenchError> {
    if facet_count < 3 {
        return Err(WrenchError::InvalidFacetCount);
    }
    let norm = contact.normal.norm();
    if norm < 1e-9 {
        return Err(WrenchError::DegenerateNormal);
    }
    let n = contact.normal / norm;
    let (t1, t2) = orthonormal_tangents(&n);
    let forces = (1..=facet_count)
        .map(|j| {
            let ang = 2.0 * core::f64::consts::PI * j as f64 / facet_count as f64;
            (n + (t1 * ang.cos() + t2 * ang.sin()) * gamma).normalize()
        })
        .collect();
    Ok(ConeFacets {
        contact: *contact,
        forces,
        facet_count,
        gamma,
    })
}

/// Builds the wrench points of a two-contact grasp.
///
/// Forces push along the inward normals (the pair's outward surface
/// normals are negated here). Per contact this yields `facet_count` cone
/// wrenches `[f; c (rho x f)]` plus one soft-finger wrench `[0; n]` for
/// torsion about the contact normal, with `rho` the lever arm from the
/// torque origin `z` and `c = 1 / max(|rho_1|, |rho_2|)` making torques
/// invariant to object scale.
pub fn wrench_set(
    pair: &ContactPair,
    z: &nalgebra::Point3<f64>,
    gamma: f64,
    facet_count: usize,
) -> Result<WrenchSet, WrenchError> {
    let rho1 = pair.c1.position - z;
    let rho2 = pair.c2.position - z;
    let max_rho = rho1.norm().max(rho2.norm());
    if max_rho < 1e-12 {
        return Err(WrenchError::ContactsAtTorqueOrigin);
    }
    let c = 1.0 / max_rho;
    let mut wrenches = Vec::with_capacity(2 * (facet_count + 1));
    for (contact, rho) in [(&pair.c1, rho1), (&pair.c2, rho2)] {
        let inward = SurfacePoint {
            position: contact.position,
            normal: -contact.normal,
            face: contact.face,
        };
        let facets = cone_facets(&inward, gamma, facet_count)?;
        for f in &facets.forces {
            let tau = rho.cross(f) * c;
            wrenches.push(Vector6::new(f.x, f.y, f.z, tau.x, tau.y, tau.z));
        }
        let n = inward.normal.normalize();
        wrenches.push(Vector6::new(0.0, 0.0, 0.0, n.x, n.y, n.z));
    }
    Ok(WrenchSet {
        wrenches,
        torque_scale: c,
        mass_center: *z,
    })
}

/// Force-closure decision for a wrench set.
pub fn is_force_closure(w: &WrenchSet) -> bool {
    wrench_quality(&w.wrenches).force_closure
}

/// Full quality analysis for a wrench set.
pub fn ferrari_canny(w: &WrenchSet) -> GraspQuality {
    wrench_quality(&w.wrenches)
}

/// Quality analysis over raw 6D wrench points.
///
/// Force closure requires the origin strictly inside the convex hull; the
/// score is then the radius of the largest origin-centered ball inside
/// the hull (the minimum support value over all directions). Sets that are
/// too small, not full-dimensional, or leave the origin within
/// `CLOSURE_MARGIN` of the hull boundary fail with the degenerate flag.
pub fn wrench_quality(wrenches: &[Vector6<f64>]) -> GraspQuality {
    if wrenches.len() < 7 {
        return GraspQuality::failed(true);
    }
    if affine_rank(wrenches) < 6 {
        return GraspQuality::failed(true);
    }
    match interior_coefficient(wrenches) {
        None => GraspQuality::failed(false), // origin outside the hull
        Some(delta) if delta <= 1e-12 => GraspQuality::failed(true), // on the boundary
        Some(_) => match inscribed_radius(wrenches) {
            Some(r) if r >= CLOSURE_MARGIN => GraspQuality {
                force_closure: true,
                score: r,
                degenerate: false,
            },
            _ => GraspQuality::failed(true),
        },
    }
}

/// Rank of the wrench differences: 6 means the hull is full-dimensional.
fn affine_rank(wrenches: &[Vector6<f64>]) -> usize {
    let base = wrenches[0];
    let mut rows: Vec<Vector6<f64>> = wrenches[1..].iter().map(|w| w - base).collect();
    let scale = rows.iter().map(|r| r.amax()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-9 * scale;
    let mut rank = 0;
    for col in 0..6 {
        let pivot = (rank..rows.len()).max_by(|&a, &b| {
            rows[a][col]
                .abs()
                .partial_cmp(&rows[b][col].abs())
                .unwrap()
        });
        let pivot = match pivot {
            Some(p) if rows[p][col].abs() > tol => p,
            _ => continue,
        };
        rows.swap(rank, pivot);
        let lead = rows[rank][col];
        for i in rank + 1..rows.len() {
            let f = rows[i][col] / lead;
            if f != 0.0 {
                let sub = rows[rank] * f;
                rows[i] -= sub;
            }
        }
        rank += 1;
        if rank == 6 {
            break;
        }
    }
    rank
}

/// Maximum `delta` such that the origin is a convex combination with every
/// coefficient at least `delta`; `None` when the origin is outside the
/// hull. Positive iff the origin is strictly interior.
///
/// Substituting `mu_i = lambda_i - delta` turns the program into standard
/// form: maximize `delta` over `mu >= 0, delta >= 0` with
/// `sum mu_i w_i + delta sum w_i = 0` and `sum mu_i + n delta = 1`.
fn interior_coefficient(wrenches: &[Vector6<f64>]) -> Option<f64> {
    let n = wrenches.len();
    let sum: Vector6<f64> = wrenches.iter().sum();
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(7);
    for row in 0..6 {
        let mut r: Vec<f64> = wrenches.iter().map(|w| w[row]).collect();
        r.push(sum[row]);
        a.push(r);
    }
    let mut last = vec![1.0f64; n];
    last.push(n as f64);
    a.push(last);
    let mut b = vec![0.0f64; 6];
    b.push(1.0);
    let mut c = vec![0.0f64; n];
    c.push(1.0);
    match solve_lp(&a, &b, &c) {
        LpOutcome::Optimal { objective, .. } => Some(objective),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => None, // unreachable: the simplex row bounds delta
    }
}

/// Minimum facet offset of the hull: for each 6-subset spanning a
/// supporting hyperplane `{x : y . x = 1}` with all points on the origin
/// side, the offset is `1 / |y|`; the inscribed radius is the minimum.
/// Valid only when the origin is strictly interior. `None` when no
/// supporting hyperplane is found (numerical degeneracy).
fn inscribed_radius(wrenches: &[Vector6<f64>]) -> Option<f64> {
    let n = wrenches.len();
    let scale = wrenches.iter().map(|w| w.norm()).fold(0.0f64, f64::max);
    let ones = Vector6::repeat(1.0);
    let mut best: Option<f64> = None;
    let mut idx = [0usize; 6];
    for (k, v) in idx.iter_mut().enumerate() {
        *v = k;
    }
    loop {
        let m = Matrix6::from_rows(&[
            wrenches[idx[0]].transpose(),
            wrenches[idx[1]].transpose(),
            wrenches[idx[2]].transpose(),
            wrenches[idx[3]].transpose(),
            wrenches[idx[4]].transpose(),
            wrenches[idx[5]].transpose(),
        ]);
        if let Some(y) = m.lu().solve(&ones) {
            let residual = (m * y - ones).amax();
            if residual <= 1e-7 * (1.0 + y.norm() * scale) {
                let feas_tol = 1e-9 * (1.0 + y.norm() * scale);
                let supporting = wrenches.iter().all(|w| w.dot(&y) <= 1.0 + feas_tol);
                if supporting {
                    let r = 1.0 / y.norm();
                    best = Some(best.map_or(r, |b: f64| b.min(r)));
                }
            }
        }
        // advance the 6-subset odometer
        let mut k = 5usize;
        loop {
            idx[k] += 1;
            if idx[k] <= n - 6 + k {
                for j in k + 1..6 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if k == 0 {
                return best;
            }
            k -= 1;
        }
    }
}
