//! Indexed triangle meshes with ray casting, containment, surface sampling,
//! and volumetric mass properties.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use nalgebra::{Point3, UnitQuaternion, Vector3};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bvh::Bvh;

/// Minimum ray parameter for a hit to count; filters self-intersections at
/// the ray origin when casting from a surface point.
pub const RAY_EPSILON: f64 = 1e-9;

/// Triangle area below which a face is rejected as degenerate.
const DEGENERATE_AREA: f64 = 1e-14;

/// Failure modes for mesh construction and mesh queries.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshError {
    /// No vertices or no faces.
    Empty,
    /// A face references a vertex index outside the vertex list.
    IndexOutOfBounds { face: usize, index: usize },
    /// A face with (near) zero area.
    DegenerateFace { face: usize },
    /// The query needs a closed surface but the mesh has boundary or
    /// non-manifold edges.
    NotWatertight,
    /// Enclosed volume too close to zero to be meaningful.
    DegenerateVolume,
}

impl core::fmt::Display for MeshError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MeshError::Empty => write!(f, "mesh has no vertices or no faces"),
            MeshError::IndexOutOfBounds { face, index } => {
                write!(f, "face {face} references out-of-bounds vertex {index}")
            }
            MeshError::DegenerateFace { face } => {
                write!(f, "face {face} has near-zero area")
            }
            MeshError::NotWatertight => write!(f, "mesh is not watertight"),
            MeshError::DegenerateVolume => write!(f, "mesh volume is near zero"),
        }
    }
}

impl core::error::Error for MeshError {}

/// A point on the mesh surface with its outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub position: Point3<f64>,
    pub normal: Vector3<f64>,
    pub face: usize,
}

/// A ray-surface intersection, ordered by distance along the ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub point: Point3<f64>,
    pub face: usize,
    pub distance: f64,
}

/// Volume, centroid, and bounding box of a closed mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub volume: f64,
    pub centroid: Point3<f64>,
}

/// An indexed triangle mesh with precomputed per-face normals and areas.
///
/// Construction validates indices and face geometry; watertightness is
/// checked once and exposed as a flag. Faces are assumed counter-clockwise
/// when viewed from outside, so face normals point outward on a
/// consistently wound mesh.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
    face_normals: Vec<Vector3<f64>>,
    face_areas: Vec<f64>,
    watertight: bool,
    bvh: Bvh,
}

impl TriMesh {
    /// Builds a mesh, validating indices and rejecting degenerate faces.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = vertices.len();
        let mut face_normals = Vec::with_capacity(faces.len());
        let mut face_areas = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            for &idx in f {
                if idx as usize >= n {
                    return Err(MeshError::IndexOutOfBounds {
                        face: fi,
                        index: idx as usize,
                    });
                }
            }
            let (a, b, c) = (
                vertices[f[0] as usize],
                vertices[f[1] as usize],
                vertices[f[2] as usize],
            );
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if area < DEGENERATE_AREA {
                return Err(MeshError::DegenerateFace { face: fi });
            }
            face_normals.push(cross / (2.0 * area));
            face_areas.push(area);
        }
        let watertight = check_watertight(&faces);
        let bvh = Bvh::build(&vertices, &faces);
        Ok(TriMesh {
            vertices,
            faces,
            face_normals,
            face_areas,
            watertight,
            bvh,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn face_normals(&self) -> &[Vector3<f64>] {
        &self.face_normals
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    /// Whether every edge is shared by exactly two faces with opposite
    /// orientation.
    pub fn is_watertight(&self) -> bool {
        self.watertight
    }

    pub fn surface_area(&self) -> f64 {
        self.face_areas.iter().sum()
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn aabb(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Returns a copy translated by `t`.
    pub fn translated(&self, t: &Vector3<f64>) -> TriMesh {
        let vertices: Vec<_> = self.vertices.iter().map(|v| v + t).collect();
        TriMesh::new(vertices, self.faces.clone()).expect("translation preserves validity")
    }

    /// Returns a copy uniformly scaled by `s > 0` about `center`.
    pub fn scaled_about(&self, s: f64, center: &Point3<f64>) -> Result<TriMesh, MeshError> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(MeshError::DegenerateVolume);
        }
        let vertices: Vec<_> = self
            .vertices
            .iter()
            .map(|v| center + (v - center) * s)
            .collect();
        TriMesh::new(vertices, self.faces.clone())
    }

    /// Returns a copy rotated by `q` about `center`.
    pub fn rotated_about(&self, q: &UnitQuaternion<f64>, center: &Point3<f64>) -> TriMesh {
        let vertices: Vec<_> = self
            .vertices
            .iter()
            .map(|v| center + q * (v - center))
            .collect();
        TriMesh::new(vertices, self.faces.clone()).expect("rotation preserves validity")
    }

    /// All intersections of the ray `origin + t * direction` with the
    /// surface for `t > RAY_EPSILON`, sorted by distance.
    pub fn ray_intersect(&self, origin: &Point3<f64>, direction: &Vector3<f64>) -> Vec<RayHit> {
        let mut hits: Vec<RayHit> = Vec::new();
        self.bvh.for_each_candidate(origin, direction, |face| {
            let f = &self.faces[face];
            if let Some(h) = ray_triangle(
                origin,
                direction,
                &self.vertices[f[0] as usize],
                &self.vertices[f[1] as usize],
                &self.vertices[f[2] as usize],
            ) {
                if h.t > RAY_EPSILON {
                    hits.push(RayHit {
                        point: origin + direction * h.t,
                        face,
                        distance: h.t,
                    });
                }
            }
        });
        hits.sort_by(|a, b| {
            a.distance
                .partial_cmp(&b.distance)
                .unwrap()
                .then(a.face.cmp(&b.face))
        });
        hits
    }

    /// Point-in-volume test by ray parity with a fixed direction sequence.
    ///
    /// Casts along deterministic directions until one produces a clean
    /// crossing pattern (no grazing, edge, or coincident hits); falls back
    /// to a majority vote over all attempts if none is clean. Requires a
    /// watertight mesh.
    pub fn contains_point(&self, p: &Point3<f64>) -> Result<bool, MeshError> {
        if !self.watertight {
            return Err(MeshError::NotWatertight);
        }
        let mut votes_inside = 0usize;
        let mut votes = 0usize;
        for dir in containment_directions() {
            let (parity, clean) = self.parity_along(p, &dir);
            if clean {
                return Ok(parity);
            }
            votes += 1;
            if parity {
                votes_inside += 1;
            }
        }
        Ok(2 * votes_inside > votes)
    }

    /// Casts one parity ray; the flag reports whether every hit was an
    /// unambiguous interior crossing.
    fn parity_along(&self, p: &Point3<f64>, dir: &Vector3<f64>) -> (bool, bool) {
        let mut ts: Vec<f64> = Vec::new();
        let mut clean = true;
        self.bvh.for_each_candidate(p, dir, |face| {
            let f = &self.faces[face];
            if let Some(h) = ray_triangle(
                p,
                dir,
                &self.vertices[f[0] as usize],
                &self.vertices[f[1] as usize],
                &self.vertices[f[2] as usize],
            ) {
                if h.t > RAY_EPSILON {
                    let bary_min = h.u.min(h.v).min(1.0 - h.u - h.v);
                    if bary_min < 1e-9 || dir.dot(&self.face_normals[face]).abs() < 1e-9 {
                        clean = false;
                    }
                    ts.push(h.t);
                }
            }
        });
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in ts.windows(2) {
            if w[1] - w[0] < 1e-9 {
                clean = false;
            }
        }
        (ts.len() % 2 == 1, clean)
    }

    /// Area-weighted uniform surface samples with outward normals.
    ///
    /// Deterministic for a fixed `(mesh, count, seed)`.
    pub fn surface_sample(&self, count: usize, seed: u64) -> Vec<SurfacePoint> {
        let sampler = SurfaceSampler::new(self);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| sampler.sample(&mut rng)).collect()
    }

    /// Volume and centroid by the divergence theorem over the closed
    /// surface. Requires a watertight mesh with meaningful volume.
    pub fn mass_properties(&self) -> Result<MassProperties, MeshError> {
        if !self.watertight {
            return Err(MeshError::NotWatertight);
        }
        let mut volume = 0.0;
        let mut weighted = Vector3::zeros();
        for f in &self.faces {
            let (a, b, c) = (
                self.vertices[f[0] as usize].coords,
                self.vertices[f[1] as usize].coords,
                self.vertices[f[2] as usize].coords,
            );
            let v = a.dot(&b.cross(&c)) / 6.0;
            volume += v;
            weighted += (a + b + c) * (v / 4.0);
        }
        if volume.abs() < 1e-12 {
            return Err(MeshError::DegenerateVolume);
        }
        Ok(MassProperties {
            volume,
            centroid: Point3::from(weighted / volume),
        })
    }
}

/// Draws individual area-weighted surface points; the cumulative-area
/// table is built once and shared across draws.
pub struct SurfaceSampler<'a> {
    mesh: &'a TriMesh,
    cumulative: Vec<f64>,
    total: f64,
}

impl<'a> SurfaceSampler<'a> {
    pub fn new(mesh: &'a TriMesh) -> SurfaceSampler<'a> {
        let mut cumulative = Vec::with_capacity(mesh.faces.len());
        let mut total = 0.0;
        for &a in &mesh.face_areas {
            total += a;
            cumulative.push(total);
        }
        SurfaceSampler {
            mesh,
            cumulative,
            total,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> SurfacePoint {
        let target = rng.gen::<f64>() * self.total;
        let face = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&target).unwrap())
        {
            Ok(i) => (i + 1).min(self.mesh.faces.len() - 1),
            Err(i) => i.min(self.mesh.faces.len() - 1),
        };
        let f = &self.mesh.faces[face];
        let (a, b, c) = (
            self.mesh.vertices[f[0] as usize],
            self.mesh.vertices[f[1] as usize],
            self.mesh.vertices[f[2] as usize],
        );
        // square-root trick for uniform barycentric coordinates
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let s = r1.sqrt();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r2), s * r2);
        SurfacePoint {
            position: Point3::from(a.coords * wa + b.coords * wb + c.coords * wc),
            normal: self.mesh.face_normals[face],
            face,
        }
    }
}

/// Every undirected edge must appear as exactly one pair of opposing
/// directed edges.
fn check_watertight(faces: &[[u32; 3]]) -> bool {
    let mut edges: BTreeMap<(u32, u32), (u32, u32)> = BTreeMap::new();
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if a == b {
                return false;
            }
            let key = (a.min(b), a.max(b));
            let entry = edges.entry(key).or_insert((0, 0));
            if a < b {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    edges.values().all(|&(fwd, bwd)| fwd == 1 && bwd == 1)
}

/// Barycentric ray-triangle intersection (Moller-Trumbore).
#[derive(Debug, Clone, Copy)]
pub(crate) struct RayTriHit {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

pub(crate) fn ray_triangle(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    v0: &Point3<f64>,
    v1: &Point3<f64>,
    v2: &Point3<f64>,
) -> Option<RayTriHit> {
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = origin - v0;
    let u = tvec.dot(&pvec) * inv_det;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv_det;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = e2.dot(&qvec) * inv_det;
    if t <= 0.0 {
        return None;
    }
    Some(RayTriHit { t, u, v })
}

/// Fixed direction sequence for parity tests: irrational component ratios
/// so axis-aligned geometry is unlikely to graze an edge or face plane.
fn containment_directions() -> impl Iterator<Item = Vector3<f64>> {
    (1..=16).map(|k| {
        let k = k as f64;
        let s = core::f64::consts::SQRT_2;
        Vector3::new(k.cos(), k.sin(), (k * s).sin() + 0.1).normalize()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_relative_eq;

    #[test]
    fn cube_is_watertight_with_unit_volume() {
        let cube = shapes::unit_cube();
        assert!(cube.is_watertight());
        let mp = cube.mass_properties().unwrap();
        assert_relative_eq!(mp.volume, 1.0, epsilon = 1e-12);
        assert_relative_eq!(mp.centroid.coords.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn open_quad_is_not_watertight() {
        let quad = shapes::unit_quad();
        assert!(!quad.is_watertight());
        assert_eq!(
            quad.contains_point(&Point3::origin()),
            Err(MeshError::NotWatertight)
        );
    }

    #[test]
    fn bad_index_rejected() {
        let verts = alloc::vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let err = TriMesh::new(verts, alloc::vec![[0, 1, 3]]).unwrap_err();
        assert_eq!(err, MeshError::IndexOutOfBounds { face: 0, index: 3 });
    }

    #[test]
    fn degenerate_face_rejected() {
        let verts = alloc::vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
        ];
        let err = TriMesh::new(verts, alloc::vec![[0, 1, 2]]).unwrap_err();
        assert_eq!(err, MeshError::DegenerateFace { face: 0 });
    }

    #[test]
    fn axis_ray_exits_unit_cube_at_half() {
        let cube = shapes::unit_cube();
        let hits = cube.ray_intersect(&Point3::origin(), &Vector3::new(1.0, 0.0, 0.0));
        assert!(!hits.is_empty());
        let far = hits.last().unwrap();
        assert_relative_eq!(far.distance, 0.5, epsilon = 1e-12);
        assert_relative_eq!(far.point.x, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn containment_inside_outside() {
        let cube = shapes::unit_cube();
        assert!(cube.contains_point(&Point3::new(0.2, -0.1, 0.3)).unwrap());
        assert!(!cube.contains_point(&Point3::new(0.7, 0.0, 0.0)).unwrap());
        assert!(!cube.contains_point(&Point3::new(10.0, 10.0, 10.0)).unwrap());
    }

    #[test]
    fn surface_sample_deterministic_and_on_surface() {
        let cube = shapes::unit_cube();
        let a = cube.surface_sample(64, 7);
        let b = cube.surface_sample(64, 7);
        assert_eq!(a.len(), 64);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.position, y.position);
            assert_eq!(x.face, y.face);
        }
        for p in &a {
            let linf = p.position.coords.amax();
            assert_relative_eq!(linf, 0.5, epsilon = 1e-12);
            assert_relative_eq!(p.normal.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mass_properties_translation_covariant() {
        let cube = shapes::unit_cube();
        let t = Vector3::new(0.3, -0.2, 0.9);
        let moved = cube.translated(&t);
        let mp = moved.mass_properties().unwrap();
        assert_relative_eq!(mp.volume, 1.0, epsilon = 1e-12);
        assert_relative_eq!((mp.centroid.coords - t).norm(), 0.0, epsilon = 1e-12);
    }
}
