//! Incremental 3D convex hull over point sets.
//!
//! Points coplanar with a face count as visible during insertion, so flat
//! patches (cube faces, coplanar clusters) triangulate instead of losing
//! vertices. The build finishes with watertightness and containment
//! checks and reports numerical failure rather than returning a broken
//! hull.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use nalgebra::{Point3, Vector3};

use crate::mesh::TriMesh;

/// Failure modes of hull construction.
#[derive(Debug, Clone, PartialEq)]
pub enum HullError {
    /// Fewer than four input points.
    TooFewPoints,
    /// All points within tolerance of a common line.
    Collinear,
    /// All points within tolerance of a common plane.
    Coplanar,
    /// The incremental build produced an inconsistent surface.
    NumericalFailure,
}

impl core::fmt::Display for HullError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HullError::TooFewPoints => write!(f, "hull needs at least 4 points"),
            HullError::Collinear => write!(f, "points are collinear"),
            HullError::Coplanar => write!(f, "points are coplanar"),
            HullError::NumericalFailure => write!(f, "hull construction lost consistency"),
        }
    }
}

impl core::error::Error for HullError {}

/// A closed triangulated convex surface with outward winding.
#[derive(Debug, Clone)]
pub struct ConvexHull3 {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[u32; 3]>,
}

impl ConvexHull3 {
    /// The hull as a watertight mesh.
    pub fn to_mesh(&self) -> Result<TriMesh, crate::mesh::MeshError> {
        TriMesh::new(self.vertices.clone(), self.faces.clone())
    }
}

#[derive(Debug, Clone, Copy)]
struct Face {
    v: [u32; 3],
    normal: Vector3<f64>,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(points: &[Point3<f64>], v: [u32; 3]) -> Face {
        let (a, b, c) = (
            points[v[0] as usize],
            points[v[1] as usize],
            points[v[2] as usize],
        );
        let normal = (b - a).cross(&(c - a));
        Face {
            v,
            normal,
            offset: normal.dot(&a.coords),
            alive: true,
        }
    }

    fn signed_dist(&self, p: &Point3<f64>) -> f64 {
        // unnormalized: scaled by twice the face area
        self.normal.dot(&p.coords) - self.offset
    }
}

/// Builds the convex hull of a point set.
pub fn convex_hull_3d(points: &[Point3<f64>]) -> Result<ConvexHull3, HullError> {
    if points.len() < 4 {
        return Err(HullError::TooFewPoints);
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let scale = (hi - lo).norm().max(1e-30);
    let eps = 1e-9 * scale;

    let seed = seed_tetrahedron(points, scale)?;
    let mut faces: Vec<Face> = Vec::new();
    let (a, b, c, d) = (seed[0], seed[1], seed[2], seed[3]);
    for v in [[a, b, c], [a, d, b], [b, d, c], [c, d, a]] {
        faces.push(Face::new(points, v));
    }

    for (i, p) in points.iter().enumerate() {
        if seed.contains(&(i as u32)) {
            continue;
        }
        // coplanar points count as visible so flat patches retriangulate
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.signed_dist(p) >= -eps * f.normal.norm().max(1e-30))
            .map(|(k, _)| k)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
        for &k in &visible {
            let v = faces[k].v;
            for e in 0..3 {
                edges.insert((v[e], v[(e + 1) % 3]));
            }
        }
        let horizon: Vec<(u32, u32)> = edges
            .iter()
            .filter(|&&(x, y)| !edges.contains(&(y, x)))
            .copied()
            .collect();
        if horizon.is_empty() {
            // the point sees everything: numerically inside-out state
            return Err(HullError::NumericalFailure);
        }
        for &k in &visible {
            faces[k].alive = false;
        }
        for (x, y) in horizon {
            let f = Face::new(points, [x, y, i as u32]);
            if f.normal.norm() > 1e-30 {
                faces.push(f);
            }
        }
    }

    let live: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    if !is_closed(&live) {
        return Err(HullError::NumericalFailure);
    }
    let contain_tol = 1e-7 * scale;
    for p in points {
        for f in &live {
            if f.signed_dist(p) > contain_tol * f.normal.norm().max(1e-30) {
                return Err(HullError::NumericalFailure);
            }
        }
    }

    // compact vertices to those referenced by live faces
    let mut remap = alloc::collections::BTreeMap::new();
    let mut vertices = Vec::new();
    let mut out_faces = Vec::with_capacity(live.len());
    for f in &live {
        let mut tri = [0u32; 3];
        for (slot, &vi) in tri.iter_mut().zip(&f.v) {
            *slot = *remap.entry(vi).or_insert_with(|| {
                vertices.push(points[vi as usize]);
                (vertices.len() - 1) as u32
            });
        }
        out_faces.push(tri);
    }
    Ok(ConvexHull3 {
        vertices,
        faces: out_faces,
    })
}

/// Picks four affinely independent seed points: extreme pair, then
/// farthest from their line, then farthest from their plane; orientation
/// fixed so face windings are outward.
fn seed_tetrahedron(points: &[Point3<f64>], scale: f64) -> Result<[u32; 4], HullError> {
    let mut p0 = 0usize;
    let mut p1 = 0usize;
    let mut best = -1.0f64;
    for axis in 0..3 {
        let lo = (0..points.len())
            .min_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap())
            .unwrap();
        let hi = (0..points.len())
            .max_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap())
            .unwrap();
        let d = (points[hi] - points[lo]).norm();
        if d > best {
            best = d;
            p0 = lo;
            p1 = hi;
        }
    }
    if best < 1e-9 * scale {
        return Err(HullError::Collinear);
    }
    let dir = (points[p1] - points[p0]) / best;
    let p2 = (0..points.len())
        .max_by(|&a, &b| {
            let da = ((points[a] - points[p0]) - dir * (points[a] - points[p0]).dot(&dir)).norm();
            let db = ((points[b] - points[p0]) - dir * (points[b] - points[p0]).dot(&dir)).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let off_line =
        ((points[p2] - points[p0]) - dir * (points[p2] - points[p0]).dot(&dir)).norm();
    if off_line < 1e-9 * scale {
        return Err(HullError::Collinear);
    }
    let n = (points[p1] - points[p0]).cross(&(points[p2] - points[p0]));
    let p3 = (0..points.len())
        .max_by(|&a, &b| {
            let da = n.dot(&(points[a] - points[p0])).abs();
            let db = n.dot(&(points[b] - points[p0])).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let vol = n.dot(&(points[p3] - points[p0]));
    if vol.abs() < 1e-9 * scale * n.norm().max(1e-30) {
        return Err(HullError::Coplanar);
    }
    // swap two points when the tetrahedron is negatively oriented
    if vol > 0.0 {
        Ok([p0 as u32, p2 as u32, p1 as u32, p3 as u32])
    } else {
        Ok([p0 as u32, p1 as u32, p2 as u32, p3 as u32])
    }
}

/// Every directed edge must be matched by its reverse exactly once.
fn is_closed(faces: &[&Face]) -> bool {
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for f in faces {
        for e in 0..3 {
            if !edges.insert((f.v[e], f.v[(e + 1) % 3])) {
                return false;
            }
        }
    }
    edges.iter().all(|&(a, b)| edges.contains(&(b, a)))
}
