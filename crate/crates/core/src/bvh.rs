//! Median-split bounding volume hierarchy used to accelerate ray queries.

use alloc::vec::Vec;
use nalgebra::{Point3, Vector3};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    min: Point3<f64>,
    max: Point3<f64>,
    /// Leaves hold `count > 0` faces at `order[start..start + count]`;
    /// inner nodes hold `count == 0` and two child indices.
    left: u32,
    right: u32,
    start: u32,
    count: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub(crate) fn build(vertices: &[Point3<f64>], faces: &[[u32; 3]]) -> Bvh {
        let centroids: Vec<Point3<f64>> = faces
            .iter()
            .map(|f| {
                Point3::from(
                    (vertices[f[0] as usize].coords
                        + vertices[f[1] as usize].coords
                        + vertices[f[2] as usize].coords)
                        / 3.0,
                )
            })
            .collect();
        let bounds: Vec<(Point3<f64>, Point3<f64>)> = faces
            .iter()
            .map(|f| {
                let mut lo = vertices[f[0] as usize];
                let mut hi = lo;
                for &i in &f[1..] {
                    let v = vertices[i as usize];
                    for k in 0..3 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            })
            .collect();
        let mut order: Vec<u32> = (0..faces.len() as u32).collect();
        let mut nodes = Vec::new();
        let n = order.len();
        build_node(&mut nodes, &mut order, 0, n, &centroids, &bounds);
        Bvh { nodes, order }
    }

    /// Invokes `visit` with the index of every face whose bounding box the
    /// ray passes through.
    pub(crate) fn for_each_candidate<F: FnMut(usize)>(
        &self,
        origin: &Point3<f64>,
        dir: &Vector3<f64>,
        mut visit: F,
    ) {
        let inv = Vector3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            if !slab_hit(origin, &inv, &node.min, &node.max) {
                continue;
            }
            if node.count > 0 {
                for k in node.start..node.start + node.count {
                    visit(self.order[k as usize] as usize);
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    start: usize,
    count: usize,
    centroids: &[Point3<f64>],
    bounds: &[(Point3<f64>, Point3<f64>)],
) -> u32 {
    let slice = &order[start..start + count];
    let mut lo = bounds[slice[0] as usize].0;
    let mut hi = bounds[slice[0] as usize].1;
    for &f in slice {
        let (blo, bhi) = bounds[f as usize];
        for k in 0..3 {
            lo[k] = lo[k].min(blo[k]);
            hi[k] = hi[k].max(bhi[k]);
        }
    }
    let me = nodes.len() as u32;
    nodes.push(Node {
        min: lo,
        max: hi,
        left: 0,
        right: 0,
        start: start as u32,
        count: count as u32,
    });
    if count <= LEAF_SIZE {
        return me;
    }
    let extent = hi - lo;
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };
    order[start..start + count].sort_by(|&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .unwrap()
            .then(a.cmp(&b))
    });
    let half = count / 2;
    let left = build_node(nodes, order, start, half, centroids, bounds);
    let right = build_node(nodes, order, start + half, count - half, centroids, bounds);
    nodes[me as usize].left = left;
    nodes[me as usize].right = right;
    nodes[me as usize].count = 0;
    me
}

/// Slab test clipped to `t >= 0`. Axes the ray is parallel to reduce to a
/// containment check; this also avoids the `0 * inf` NaN when the origin
/// sits exactly on a slab plane.
fn slab_hit(origin: &Point3<f64>, inv: &Vector3<f64>, lo: &Point3<f64>, hi: &Point3<f64>) -> bool {
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for k in 0..3 {
        if inv[k].is_infinite() {
            if origin[k] < lo[k] - 1e-12 || origin[k] > hi[k] + 1e-12 {
                return false;
            }
            continue;
        }
        let t1 = (lo[k] - origin[k]) * inv[k];
        let t2 = (hi[k] - origin[k]) * inv[k];
        tmin = tmin.max(t1.min(t2));
        tmax = tmax.min(t1.max(t2));
    }
    tmin <= tmax + 1e-12
}
