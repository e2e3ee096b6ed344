//! End-to-end analytic annotation: mesh normalization, resting poses,
//! contact sampling, wrench scoring, and record clean-up.
//!
//! The flow normalizes a mesh into gripper scale, rests it on a stable
//! convex-hull facet, samples antipodal contact pairs, expands each into
//! a pitch family, scores every candidate by force closure and the
//! inscribed-ball wrench metric, and emits deduplicated records sorted
//! for reproducible serialization.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{Point3, UnitQuaternion, Vector3};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;

use crate::antipodal::{antipodal_valid, sample_contact_pairs, enumerate_pitch, SampleStats};
use crate::grasp::contacts_to_grasp;
use crate::hull3::{convex_hull_3d, HullError};
use crate::mesh::{MeshError, TriMesh};
use crate::wrench::{ferrari_canny, wrench_set};

/// Longest allowed bounding-box side after normalization.
pub const MAX_EXTENT: f64 = 0.150;

/// Shortest bounding-box side normalization aims for when the aspect
/// ratio permits.
pub const MIN_EXTENT: f64 = 0.060;

/// Knobs of the annotation flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Friction coefficient for sampling and scoring.
    pub gamma: f64,
    /// Friction cone discretization per contact.
    pub cone_facets: usize,
    /// Grasp candidates generated before clean-up.
    pub candidates_per_object: usize,
    /// Pitch angles per contact pair.
    pub pitch_count: usize,
    /// Maximum jaw opening accepted by the sampler.
    pub max_width: f64,
    /// Contacts closer than this to the resting plane are dropped.
    pub ground_clearance: f64,
    /// Center distance under which near-duplicates collapse.
    pub dedup_center: f64,
    /// Orientation gap under which near-duplicates collapse.
    pub dedup_angle: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            gamma: 0.5,
            cone_facets: 8,
            candidates_per_object: 1000,
            pitch_count: 10,
            max_width: 0.085,
            ground_clearance: 0.01,
            dedup_center: 0.005,
            dedup_angle: 10.0_f64.to_radians(),
            seed: 0,
        }
    }
}

/// Success proxy carried by a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraspLabel {
    Positive,
    Negative,
}

/// One annotated grasp candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub object_id: String,
    pub c1: Point3<f64>,
    pub c2: Point3<f64>,
    pub center: Point3<f64>,
    pub quaternion: UnitQuaternion<f64>,
    pub pitch: f64,
    pub width: f64,
    pub antipodal: bool,
    pub force_closure: bool,
    pub score: f64,
    pub label: GraspLabel,
}

impl AnnotationRecord {
    /// Checks the internal consistency every emitted record promises:
    /// the center bisects the contacts, the width is the contact gap,
    /// and the score is the -1 sentinel exactly when closure fails.
    pub fn is_consistent(&self) -> bool {
        let mid = Point3::from((self.c1.coords + self.c2.coords) / 2.0);
        (self.center - mid).norm() <= 1e-9
            && ((self.c2 - self.c1).norm() - self.width).abs() <= 1e-9
            && (self.force_closure != (self.score == -1.0))
            && (!self.force_closure || self.score > 0.0)
            && ((self.label == GraspLabel::Positive) == self.force_closure)
    }
}

/// Yield bookkeeping from one [`annotate_object`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationStats {
    /// Candidate count the configuration asked for.
    pub requested: usize,
    pub pairs_sampled: usize,
    pub sampling: SampleStats,
    /// The sampler hit its attempt cap and returned a partial batch.
    pub attempt_cap_hit: bool,
    /// Candidates scored before clean-up.
    pub scored: usize,
    /// Pairs whose wrench analysis was numerically degenerate.
    pub degenerate_pairs: usize,
    pub dropped_ground: usize,
    pub dropped_dedup: usize,
    pub positive_fraction: f64,
}

/// Records plus statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationOutcome {
    pub records: Vec<AnnotationRecord>,
    pub stats: AnnotationStats,
}

/// A normalized mesh with the scale that produced it.
#[derive(Debug, Clone)]
pub struct NormalizedMesh {
    pub mesh: TriMesh,
    pub scale: f64,
    /// The aspect ratio made the shortest-side target unreachable.
    pub aspect_conflict: bool,
}

/// A resting orientation with the area of its supporting facet.
#[derive(Debug, Clone, PartialEq)]
pub struct RestPose {
    pub rotation: UnitQuaternion<f64>,
    pub support_area: f64,
}

/// Failure modes of the pipeline stages.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    Mesh(MeshError),
    Hull(HullError),
    /// Bounding box has a zero extent.
    DegenerateExtent,
    /// No convex-hull facet supports the centroid.
    NoStablePose,
}

impl From<MeshError> for PipelineError {
    fn from(e: MeshError) -> PipelineError {
        PipelineError::Mesh(e)
    }
}

impl From<HullError> for PipelineError {
    fn from(e: HullError) -> PipelineError {
        PipelineError::Hull(e)
    }
}

impl core::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PipelineError::Mesh(e) => write!(f, "mesh error: {e}"),
            PipelineError::Hull(e) => write!(f, "hull error: {e}"),
            PipelineError::DegenerateExtent => write!(f, "bounding box has zero extent"),
            PipelineError::NoStablePose => write!(f, "no stable resting facet"),
        }
    }
}

impl core::error::Error for PipelineError {}

fn bounding_box(mesh: &TriMesh) -> (Point3<f64>, Point3<f64>) {
    let mut lo = mesh.vertices()[0];
    let mut hi = mesh.vertices()[0];
    for v in mesh.vertices() {
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    (lo, hi)
}

/// Volume centroid for watertight meshes, area-weighted surface
/// centroid otherwise.
fn centroid_of(mesh: &TriMesh) -> Point3<f64> {
    if mesh.is_watertight() {
        if let Ok(mp) = mesh.mass_properties() {
            return mp.centroid;
        }
    }
    let mut acc = Vector3::zeros();
    let mut total = 0.0;
    for (f, &area) in mesh.faces().iter().zip(mesh.face_areas()) {
        let c = (mesh.vertices()[f[0] as usize].coords
            + mesh.vertices()[f[1] as usize].coords
            + mesh.vertices()[f[2] as usize].coords)
            / 3.0;
        acc += c * area;
        total += area;
    }
    Point3::from(acc / total)
}

/// Scales the mesh into gripper range and recenters its centroid at the
/// origin.
///
/// The longest bounding-box side ends at or below [`MAX_EXTENT`]; the
/// shortest is pushed to [`MIN_EXTENT`] when the aspect ratio allows
/// both, and `aspect_conflict` reports when it does not. A mesh already
/// within both bounds keeps its size.
pub fn normalize_mesh(mesh: &TriMesh) -> Result<NormalizedMesh, PipelineError> {
    let (lo, hi) = bounding_box(mesh);
    let ext = hi - lo;
    let longest = ext.max();
    let shortest = ext.min();
    if shortest < 1e-12 {
        return Err(PipelineError::DegenerateExtent);
    }
    let feasible = MIN_EXTENT / shortest <= MAX_EXTENT / longest;
    let (scale, aspect_conflict) = if longest <= MAX_EXTENT && shortest >= MIN_EXTENT {
        (1.0, false)
    } else if feasible {
        if longest > MAX_EXTENT {
            (MAX_EXTENT / longest, false)
        } else {
            (MIN_EXTENT / shortest, false)
        }
    } else {
        (MAX_EXTENT / longest, true)
    };
    let c = centroid_of(mesh);
    let scaled = if scale == 1.0 {
        mesh.clone()
    } else {
        mesh.scaled_about(scale, &c)?
    };
    let mesh = scaled.translated(&(-c.coords));
    Ok(NormalizedMesh {
        mesh,
        scale,
        aspect_conflict,
    })
}

/// Enumerates the resting orientations of a watertight mesh.
///
/// A convex-hull facet is stable when the centroid's orthogonal
/// projection lands strictly inside it; each stable facet yields the
/// rotation that lays it on the z=0 plane, facet normal down. Poses
/// come sorted by support area, largest first.
pub fn stable_poses(mesh: &TriMesh) -> Result<Vec<RestPose>, PipelineError> {
    let centroid = mesh.mass_properties()?.centroid;
    let hull = convex_hull_3d(mesh.vertices())?;
    let scale = {
        let (lo, hi) = bounding_box(mesh);
        (hi - lo).norm()
    };

    // group hull triangles into planar facets by (normal, offset)
    let mut facets: Vec<(Vector3<f64>, f64, Vec<usize>)> = Vec::new();
    for (t, tri) in hull.faces.iter().enumerate() {
        let a = hull.vertices[tri[0] as usize];
        let b = hull.vertices[tri[1] as usize];
        let c = hull.vertices[tri[2] as usize];
        let n = (b - a).cross(&(c - a)).normalize();
        let d = n.dot(&a.coords);
        match facets
            .iter_mut()
            .find(|(fn_, fd, _)| (n - *fn_).norm() < 1e-6 && (d - *fd).abs() < 1e-9 * scale.max(1.0))
        {
            Some((_, _, tris)) => tris.push(t),
            None => facets.push((n, d, alloc::vec![t])),
        }
    }

    let mut poses: Vec<RestPose> = Vec::new();
    for (normal, _, tris) in &facets {
        // in-plane frame for the 2D strict-insideness test
        let t1 = crate::frame::orthonormal_tangents(normal).0;
        let t2 = normal.cross(&t1);
        let mut verts2: Vec<(f64, f64)> = Vec::new();
        let mut area = 0.0;
        for &t in tris {
            let tri = hull.faces[t];
            let pts = [
                hull.vertices[tri[0] as usize],
                hull.vertices[tri[1] as usize],
                hull.vertices[tri[2] as usize],
            ];
            area += (pts[1] - pts[0]).cross(&(pts[2] - pts[0])).norm() / 2.0;
            for p in pts {
                let uv = (p.coords.dot(&t1), p.coords.dot(&t2));
                if !verts2
                    .iter()
                    .any(|q| (q.0 - uv.0).abs() < 1e-12 && (q.1 - uv.1).abs() < 1e-12)
                {
                    verts2.push(uv);
                }
            }
        }
        let proj = (centroid.coords.dot(&t1), centroid.coords.dot(&t2));
        if !strictly_inside_convex(&verts2, proj, 1e-9 * scale.max(1.0)) {
            continue;
        }
        // rotate the outward facet normal onto -z
        let down = Vector3::new(0.0, 0.0, -1.0);
        let rotation = UnitQuaternion::rotation_between(normal, &down).unwrap_or_else(|| {
            UnitQuaternion::from_axis_angle(&Vector3::x_axis(), core::f64::consts::PI)
        });
        poses.push(RestPose {
            rotation,
            support_area: area,
        });
    }
    if poses.is_empty() {
        return Err(PipelineError::NoStablePose);
    }
    poses.sort_by(|a, b| b.support_area.total_cmp(&a.support_area));
    Ok(poses)
}

/// Strict interior test against the convex hull of 2D points.
fn strictly_inside_convex(points: &[(f64, f64)], p: (f64, f64), margin: f64) -> bool {
    if points.len() < 3 {
        return false;
    }
    let mut hull: Vec<(f64, f64)> = points.to_vec();
    hull.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    // Andrew's monotone chain, counterclockwise result
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &q in &hull {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &q in hull.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return false;
    }
    for i in 0..lower.len() {
        let a = lower[i];
        let b = lower[(i + 1) % lower.len()];
        let edge = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        if cross(a, b, p) <= margin * edge {
            return false;
        }
    }
    true
}

/// Applies a resting rotation about the centroid and drops the mesh
/// onto the z=0 plane.
pub fn apply_rest_pose(mesh: &TriMesh, pose: &RestPose) -> Result<TriMesh, PipelineError> {
    let centroid = centroid_of(mesh);
    let rotated = mesh.rotated_about(&pose.rotation, &centroid);
    let min_z = rotated
        .vertices()
        .iter()
        .map(|v| v.z)
        .fold(f64::INFINITY, f64::min);
    Ok(rotated.translated(&Vector3::new(0.0, 0.0, -min_z)))
}

/// Annotates one mesh: sampling, pitch expansion, wrench scoring, and
/// clean-up, deterministic per seed.
///
/// The resting plane is taken at the mesh's lowest vertex. A sampler
/// that exhausts its attempt cap contributes its partial batch and is
/// flagged in the statistics rather than failing the run.
pub fn annotate_object(
    mesh: &TriMesh,
    object_id: &str,
    cfg: &PipelineConfig,
) -> Result<AnnotationOutcome, PipelineError> {
    assert!(cfg.gamma > 0.0 && cfg.pitch_count > 0 && cfg.candidates_per_object > 0);
    let centroid = centroid_of(mesh);
    let ground_z = mesh
        .vertices()
        .iter()
        .map(|v| v.z)
        .fold(f64::INFINITY, f64::min);

    let pairs_needed = cfg.candidates_per_object.div_ceil(cfg.pitch_count);
    let (sampling, attempt_cap_hit) = match sample_contact_pairs(
        mesh,
        cfg.gamma,
        pairs_needed,
        cfg.max_width,
        cfg.seed,
    ) {
        Ok(s) => (s, false),
        Err(e) => (e.partial, true),
    };

    let mut records: Vec<AnnotationRecord> = Vec::new();
    let mut degenerate_pairs = 0usize;
    'pairs: for pair in &sampling.pairs {
        if records.len() >= cfg.candidates_per_object {
            break;
        }
        let quality = match wrench_set(pair, &centroid, cfg.gamma, cfg.cone_facets) {
            Ok(ws) => ferrari_canny(&ws),
            Err(_) => {
                degenerate_pairs += 1;
                continue;
            }
        };
        if quality.degenerate {
            degenerate_pairs += 1;
        }
        let antipodal = antipodal_valid(&pair.c1, &pair.c2, cfg.gamma).unwrap_or(false);
        for cg in enumerate_pitch(pair, cfg.pitch_count) {
            if records.len() >= cfg.candidates_per_object {
                break 'pairs;
            }
            let grasp = match contacts_to_grasp(&cg) {
                Ok(g) => g,
                Err(_) => {
                    degenerate_pairs += 1;
                    continue 'pairs;
                }
            };
            records.push(AnnotationRecord {
                object_id: String::from(object_id),
                c1: cg.c1,
                c2: cg.c2,
                center: Point3::from((cg.c1.coords + cg.c2.coords) / 2.0),
                quaternion: grasp.orientation,
                pitch: cg.pitch,
                width: (cg.c2 - cg.c1).norm(),
                antipodal,
                force_closure: quality.force_closure,
                score: quality.score,
                label: if quality.force_closure {
                    GraspLabel::Positive
                } else {
                    GraspLabel::Negative
                },
            });
        }
    }

    let scored = records.len();
    let grounded = ground_filter(&records, cfg, ground_z);
    let dropped_ground = scored - grounded.len();
    let cleaned = dedup(&grounded, cfg);
    let dropped_dedup = grounded.len() - cleaned.len();
    let positives = cleaned
        .iter()
        .filter(|r| r.label == GraspLabel::Positive)
        .count();
    let positive_fraction = if cleaned.is_empty() {
        0.0
    } else {
        positives as f64 / cleaned.len() as f64
    };
    Ok(AnnotationOutcome {
        stats: AnnotationStats {
            requested: cfg.candidates_per_object,
            pairs_sampled: sampling.pairs.len(),
            sampling: sampling.stats,
            attempt_cap_hit,
            scored,
            degenerate_pairs,
            dropped_ground,
            dropped_dedup,
            positive_fraction,
        },
        records: cleaned,
    })
}

fn ground_filter(
    records: &[AnnotationRecord],
    cfg: &PipelineConfig,
    ground_z: f64,
) -> Vec<AnnotationRecord> {
    records
        .iter()
        .filter(|r| r.c1.z.min(r.c2.z) >= ground_z + cfg.ground_clearance)
        .cloned()
        .collect()
}

/// Deterministic record order: score descending, then center
/// lexicographic, then pitch.
fn record_order(a: &AnnotationRecord, b: &AnnotationRecord) -> core::cmp::Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.center.x.total_cmp(&b.center.x))
        .then(a.center.y.total_cmp(&b.center.y))
        .then(a.center.z.total_cmp(&b.center.z))
        .then(a.pitch.total_cmp(&b.pitch))
}

fn quat_angle(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    let dot = (a.coords.dot(&b.coords)).abs().clamp(0.0, 1.0);
    2.0 * dot.acos()
}

fn dedup(records: &[AnnotationRecord], cfg: &PipelineConfig) -> Vec<AnnotationRecord> {
    let mut sorted: Vec<AnnotationRecord> = records.to_vec();
    sorted.sort_by(record_order);
    let mut kept: Vec<AnnotationRecord> = Vec::new();
    for r in sorted {
        let duplicate = kept.iter().any(|k| {
            (k.center - r.center).norm() <= cfg.dedup_center
                && quat_angle(&k.quaternion, &r.quaternion) <= cfg.dedup_angle
        });
        if !duplicate {
            kept.push(r);
        }
    }
    kept
}

/// Drops records too close to the resting plane, then collapses
/// near-duplicates keeping the higher-scoring one. Idempotent, and the
/// output carries the canonical (score, center, pitch) order.
pub fn cleanup(
    records: &[AnnotationRecord],
    cfg: &PipelineConfig,
    ground_z: f64,
) -> Vec<AnnotationRecord> {
    dedup(&ground_filter(records, cfg, ground_z), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn meter_cube_scales_to_the_extent_cap() {
        let cube = shapes::unit_cube();
        let out = normalize_mesh(&cube).unwrap();
        let (lo, hi) = bounding_box(&out.mesh);
        assert_relative_eq!((hi - lo).max(), 0.150, epsilon = 1e-12);
        assert_relative_eq!(out.scale, 0.150, epsilon = 1e-12);
        assert!(!out.aspect_conflict);
        let c = out.mesh.mass_properties().unwrap().centroid;
        assert_relative_eq!(c.coords.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn compliant_box_is_left_unscaled() {
        let mesh = shapes::box_mesh(Vector3::new(0.10, 0.10, 0.08), Point3::new(0.3, 0.0, 0.0));
        let out = normalize_mesh(&mesh).unwrap();
        assert_eq!(out.scale, 1.0);
        assert!(!out.aspect_conflict);
        let (lo, hi) = bounding_box(&out.mesh);
        assert_relative_eq!((hi - lo).max(), 0.10, epsilon = 1e-12);
        // recentering still happens
        let c = out.mesh.mass_properties().unwrap().centroid;
        assert_relative_eq!(c.coords.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn extreme_aspect_ratio_trips_the_conflict_flag() {
        let mesh = shapes::box_mesh(Vector3::new(1.0, 0.1, 0.1), Point3::origin());
        let out = normalize_mesh(&mesh).unwrap();
        assert!(out.aspect_conflict);
        let (lo, hi) = bounding_box(&out.mesh);
        assert_relative_eq!((hi - lo).max(), 0.150, epsilon = 1e-12);
        assert_relative_eq!((hi - lo).min(), 0.015, epsilon = 1e-12);
    }

    #[test]
    fn small_mesh_upscales_to_the_shortest_side_target() {
        let mesh = shapes::box_mesh(Vector3::new(0.04, 0.03, 0.05), Point3::origin());
        let out = normalize_mesh(&mesh).unwrap();
        let (lo, hi) = bounding_box(&out.mesh);
        assert_relative_eq!((hi - lo).min(), 0.060, epsilon = 1e-12);
        assert!((hi - lo).max() <= 0.150 + 1e-12);
        assert!(!out.aspect_conflict);
    }

    #[test]
    fn cube_rests_on_six_faces() {
        let cube = shapes::box_mesh(Vector3::new(0.1, 0.1, 0.1), Point3::origin());
        let poses = stable_poses(&cube).unwrap();
        assert_eq!(poses.len(), 6);
        for p in &poses {
            assert_relative_eq!(p.support_area, 0.01, epsilon = 1e-12);
        }
    }

    #[test]
    fn tetrahedron_rests_on_four_faces() {
        let tet = shapes::tetrahedron();
        let poses = stable_poses(&tet).unwrap();
        assert_eq!(poses.len(), 4);
    }

    #[test]
    fn rest_pose_grounds_the_support_facet() {
        let mesh = shapes::box_mesh(Vector3::new(0.12, 0.08, 0.05), Point3::new(0.01, 0.02, 0.03));
        let poses = stable_poses(&mesh).unwrap();
        // largest support comes first: the 0.12 x 0.08 faces
        assert_relative_eq!(poses[0].support_area, 0.12 * 0.08, epsilon = 1e-12);
        for pose in &poses {
            let posed = apply_rest_pose(&mesh, pose).unwrap();
            let min_z = posed
                .vertices()
                .iter()
                .map(|v| v.z)
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(min_z, 0.0, epsilon = 1e-9);
            let c = posed.mass_properties().unwrap().centroid;
            assert!(c.z > 0.0);
        }
    }

    #[test]
    fn annotation_records_are_internally_consistent() {
        // a cube is graspable only across opposite faces, so the jaw
        // must open past the 0.1 m side length
        let cube = shapes::box_mesh(Vector3::new(0.1, 0.1, 0.1), Point3::new(0.0, 0.0, 0.05));
        let cfg = PipelineConfig {
            candidates_per_object: 200,
            max_width: 0.12,
            ..PipelineConfig::default()
        };
        let out = annotate_object(&cube, "cube", &cfg).unwrap();
        assert!(!out.records.is_empty());
        for r in &out.records {
            assert!(r.is_consistent(), "inconsistent record {r:?}");
            assert!(r.antipodal);
            assert!(r.width <= cfg.max_width + 1e-12);
            assert!(r.c1.z.min(r.c2.z) >= cfg.ground_clearance - 1e-12);
            assert_eq!(r.object_id, "cube");
        }
        assert_eq!(out.stats.requested, 200);
        assert!(out.stats.scored <= 200);
        let positives = out
            .records
            .iter()
            .filter(|r| r.label == GraspLabel::Positive)
            .count();
        assert_relative_eq!(
            out.stats.positive_fraction,
            positives as f64 / out.records.len() as f64
        );
    }

    #[test]
    fn sphere_yields_positive_grasps() {
        // antipodal chords on a sphere are at least 2r·cos(arctan γ)
        // long, so the radius keeps the diameter under the default jaw
        let sphere = shapes::icosphere(0.035, 3, Point3::new(0.0, 0.0, 0.035));
        let cfg = PipelineConfig {
            candidates_per_object: 100,
            ..PipelineConfig::default()
        };
        let out = annotate_object(&sphere, "sphere", &cfg).unwrap();
        assert!(out.stats.positive_fraction > 0.0);
    }

    #[test]
    fn annotation_is_deterministic_per_seed() {
        let cube = shapes::box_mesh(Vector3::new(0.1, 0.1, 0.1), Point3::new(0.0, 0.0, 0.05));
        let cfg = PipelineConfig {
            candidates_per_object: 100,
            max_width: 0.12,
            ..PipelineConfig::default()
        };
        let a = annotate_object(&cube, "cube", &cfg).unwrap();
        let b = annotate_object(&cube, "cube", &cfg).unwrap();
        assert_eq!(a, b);
        let other = annotate_object(
            &cube,
            "cube",
            &PipelineConfig {
                seed: 1,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_ne!(a.records, other.records);
    }

    #[test]
    fn records_come_out_sorted_by_score_then_center() {
        let cube = shapes::box_mesh(Vector3::new(0.1, 0.1, 0.1), Point3::new(0.0, 0.0, 0.05));
        let cfg = PipelineConfig {
            candidates_per_object: 150,
            max_width: 0.12,
            ..PipelineConfig::default()
        };
        let out = annotate_object(&cube, "cube", &cfg).unwrap();
        for pair in out.records.windows(2) {
            assert_ne!(
                record_order(&pair[0], &pair[1]),
                core::cmp::Ordering::Greater
            );
        }
    }

    #[test]
    fn cleanup_drops_exact_duplicates_and_ground_violations() {
        let cfg = PipelineConfig::default();
        let template = AnnotationRecord {
            object_id: String::from("x"),
            c1: Point3::new(-0.02, 0.0, 0.05),
            c2: Point3::new(0.02, 0.0, 0.05),
            center: Point3::new(0.0, 0.0, 0.05),
            quaternion: UnitQuaternion::identity(),
            pitch: 0.0,
            width: 0.04,
            antipodal: true,
            force_closure: true,
            score: 0.2,
            label: GraspLabel::Positive,
        };
        let mut low = template.clone();
        low.c1.z = 0.005;
        low.c2.z = 0.005;
        low.center.z = 0.005;
        let mut weaker = template.clone();
        weaker.score = 0.1;
        let out = cleanup(&[template.clone(), weaker, low], &cfg, 0.0);
        assert_eq!(out.len(), 1);
        assert_relative_eq!(out[0].score, 0.2);
    }

    #[test]
    fn cleanup_is_idempotent_on_random_record_sets() {
        let cfg = PipelineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let records: Vec<AnnotationRecord> = (0..60)
                .map(|_| {
                    let c1 = Point3::new(
                        rng.gen::<f64>() * 0.1 - 0.05,
                        rng.gen::<f64>() * 0.1 - 0.05,
                        rng.gen::<f64>() * 0.1,
                    );
                    let c2 = Point3::new(
                        rng.gen::<f64>() * 0.1 - 0.05,
                        rng.gen::<f64>() * 0.1 - 0.05,
                        rng.gen::<f64>() * 0.1,
                    );
                    let fc = rng.gen::<bool>();
                    AnnotationRecord {
                        object_id: String::from("r"),
                        c1,
                        c2,
                        center: Point3::from((c1.coords + c2.coords) / 2.0),
                        quaternion: UnitQuaternion::from_axis_angle(
                            &Vector3::z_axis(),
                            rng.gen::<f64>() * 6.0,
                        ),
                        pitch: 0.0,
                        width: (c2 - c1).norm(),
                        antipodal: true,
                        force_closure: fc,
                        score: if fc { rng.gen::<f64>() } else { -1.0 },
                        label: if fc {
                            GraspLabel::Positive
                        } else {
                            GraspLabel::Negative
                        },
                    }
                })
                .collect();
            let once = cleanup(&records, &cfg, 0.0);
            let twice = cleanup(&once, &cfg, 0.0);
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn degenerate_extent_is_rejected() {
        let flat = shapes::unit_quad();
        assert_eq!(
            normalize_mesh(&flat).unwrap_err(),
            PipelineError::DegenerateExtent
        );
    }
}
