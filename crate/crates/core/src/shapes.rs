//! Procedural test and fixture meshes: boxes, icospheres, tetrahedra, and
//! open quads.

use alloc::vec::Vec;
use nalgebra::{Point3, Vector3};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;

use crate::mesh::TriMesh;

/// Axis-aligned box with the given full extents, centered at `center`.
pub fn box_mesh(extents: Vector3<f64>, center: Point3<f64>) -> TriMesh {
    let h = extents / 2.0;
    let corner = |sx: f64, sy: f64, sz: f64| {
        Point3::new(center.x + sx * h.x, center.y + sy * h.y, center.z + sz * h.z)
    };
    let vertices = alloc::vec![
        corner(-1.0, -1.0, -1.0),
        corner(1.0, -1.0, -1.0),
        corner(1.0, 1.0, -1.0),
        corner(-1.0, 1.0, -1.0),
        corner(-1.0, -1.0, 1.0),
        corner(1.0, -1.0, 1.0),
        corner(1.0, 1.0, 1.0),
        corner(-1.0, 1.0, 1.0),
    ];
    // two counter-clockwise triangles per face, outward winding
    let faces = alloc::vec![
        [0, 2, 1],
        [0, 3, 2], // bottom (-z)
        [4, 5, 6],
        [4, 6, 7], // top (+z)
        [0, 1, 5],
        [0, 5, 4], // front (-y)
        [2, 3, 7],
        [2, 7, 6], // back (+y)
        [0, 4, 7],
        [0, 7, 3], // left (-x)
        [1, 2, 6],
        [1, 6, 5], // right (+x)
    ];
    TriMesh::new(vertices, faces).expect("box construction is valid")
}

/// Unit cube centered at the origin.
pub fn unit_cube() -> TriMesh {
    box_mesh(Vector3::new(1.0, 1.0, 1.0), Point3::origin())
}

/// Icosphere of the given radius centered at `center`.
///
/// Subdivision 0 is the icosahedron; each level splits every triangle in
/// four and reprojects vertices to the sphere.
pub fn icosphere(radius: f64, subdivisions: u32, center: Point3<f64>) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = alloc::vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ];
    for v in &mut vertices {
        *v = v.normalize();
    }
    let mut faces: Vec<[u32; 3]> = alloc::vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: alloc::collections::BTreeMap<(u32, u32), u32> =
            alloc::collections::BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mids[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = (vertices[a as usize] + vertices[b as usize]).normalize();
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                });
            }
            next.push([f[0], mids[0], mids[2]]);
            next.push([f[1], mids[1], mids[0]]);
            next.push([f[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        faces = next;
    }
    let vertices = vertices
        .into_iter()
        .map(|v| center + v * radius)
        .collect::<Vec<_>>();
    TriMesh::new(vertices, faces).expect("icosphere construction is valid")
}

/// Regular tetrahedron with unit edge length centered at the origin.
pub fn tetrahedron() -> TriMesh {
    let s = 1.0 / (2.0 * 2.0f64.sqrt());
    let vertices = alloc::vec![
        Point3::new(s, s, s),
        Point3::new(s, -s, -s),
        Point3::new(-s, s, -s),
        Point3::new(-s, -s, s),
    ];
    let faces = alloc::vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    TriMesh::new(vertices, faces).expect("tetrahedron construction is valid")
}

/// Open unit square in the xy-plane (two triangles, not watertight),
/// normal along +z.
pub fn unit_quad() -> TriMesh {
    let vertices = alloc::vec![
        Point3::new(-0.5, -0.5, 0.0),
        Point3::new(0.5, -0.5, 0.0),
        Point3::new(0.5, 0.5, 0.0),
        Point3::new(-0.5, 0.5, 0.0),
    ];
    let faces = alloc::vec![[0, 1, 2], [0, 2, 3]];
    TriMesh::new(vertices, faces).expect("quad construction is valid")
}
