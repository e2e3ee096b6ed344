//! Grid-anchor grasp proposals: lattice construction, containment
//! pruning, ground-truth labeling, and anisotropic point neighborhoods.
//!
//! A proposal pairs an observed cloud point with a lattice anchor near
//! the object's mass center. Labeling marks the pairs that coincide with
//! annotated grasps as positives (carrying an offset and a pitch set)
//! and subsamples the rest into a fixed negative pool, which removes the
//! vast majority of the n·m candidate pairs before any learning stage.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use nalgebra::{Point3, Vector3};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mesh::{MeshError, TriMesh};

/// Fixed neighborhood size after resampling.
pub const PAYLOAD_SIZE: usize = 100;

/// Default admission scale for [`anchor_neighborhood`]: 0.022 · √3.
pub const DEFAULT_NEIGHBORHOOD_EPS: f64 = 0.022 * 1.732_050_807_568_877_2;

/// Cubic lattice of candidate grasp centers.
///
/// `anchors` holds `resolution³` points for a freshly built grid;
/// pruning returns a grid with the surviving subset.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorGrid {
    pub resolution: usize,
    pub extent: f64,
    pub anchors: Vec<Point3<f64>>,
}

impl AnchorGrid {
    /// Lattice spacing along one axis; the full extent when the grid has
    /// a single position per axis.
    pub fn cell_size(&self) -> f64 {
        if self.resolution > 1 {
            self.extent / (self.resolution - 1) as f64
        } else {
            self.extent
        }
    }
}

/// A ground-truth grasp in contact form: one contact point, the gripper
/// center, and the pitch about the contact axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthGrasp {
    pub contact: Point3<f64>,
    pub center: Point3<f64>,
    pub pitch: f64,
}

/// Regression target attached to a positive proposal: the center offset
/// from the anchor and every admissible pitch of the matched grasps.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTarget {
    pub offset: Vector3<f64>,
    pub pitches: Vec<f64>,
}

/// A (cloud point, anchor) pair, optionally labeled.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub point: Point3<f64>,
    pub anchor: Point3<f64>,
    pub antipodal_label: Option<bool>,
    pub regression_target: Option<RegressionTarget>,
}

/// Thresholds and sampling controls for [`label_proposals`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelParams {
    /// Maximum contact-to-point distance for a positive match.
    pub tol_contact: f64,
    /// Maximum center-to-anchor distance for a positive match.
    pub tol_center: f64,
    /// Pitches of matched grasps closer than this collapse to one entry.
    pub tol_pitch: f64,
    /// Negative pool size as a multiple of the positive count.
    pub negative_ratio: f64,
    pub seed: u64,
}

impl LabelParams {
    /// Defaults tied to the grid geometry: contact tolerance at half the
    /// neighborhood scale, center tolerance at half the cell diagonal,
    /// and a negative pool sized for a 3:7 positive:negative feed.
    pub fn for_grid(grid: &AnchorGrid, eps: f64) -> LabelParams {
        LabelParams {
            tol_contact: eps / 2.0,
            tol_center: grid.cell_size() * 3.0f64.sqrt() / 2.0,
            tol_pitch: 1e-3,
            negative_ratio: 7.0 / 3.0,
            seed: 0,
        }
    }
}

/// Labeled proposals plus the bookkeeping needed for pruning-rate
/// reporting. `total` is the full n·m pair count before any pruning;
/// `empty_ground_truth` warns that no annotations were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelOutcome {
    pub proposals: Vec<Proposal>,
    pub total: usize,
    pub positive_count: usize,
    pub negative_count: usize,
    pub empty_ground_truth: bool,
}

/// Fixed-size neighborhood payload handed to downstream consumers.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalPayload {
    pub neighborhood: Vec<Point3<f64>>,
    pub anchor: Point3<f64>,
}

/// Failure modes of payload assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalError {
    /// No cloud point satisfies the admission criterion.
    EmptyNeighborhood,
}

impl core::fmt::Display for ProposalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProposalError::EmptyNeighborhood => write!(f, "neighborhood is empty"),
        }
    }
}

impl core::error::Error for ProposalError {}

/// Builds the r×r×r anchor lattice spanning `[-b/2, b/2]³`.
///
/// Each axis carries `r` positions inclusive of both ends (spacing
/// `b/(r-1)`); `r = 1` degenerates to a single anchor at the origin.
pub fn anchor_grid(r: usize, b: f64) -> AnchorGrid {
    assert!(r >= 1, "grid resolution must be at least 1");
    assert!(b > 0.0, "grid extent must be positive");
    let coord = |k: usize| -> f64 {
        if r == 1 {
            0.0
        } else {
            -b / 2.0 + b * k as f64 / (r - 1) as f64
        }
    };
    let mut anchors = Vec::with_capacity(r * r * r);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                anchors.push(Point3::new(coord(i), coord(j), coord(k)));
            }
        }
    }
    AnchorGrid {
        resolution: r,
        extent: b,
        anchors,
    }
}

/// The focus variant: the same `r³` anchors concentrated near the mass
/// center by shrinking the effective extent to `shrink · b`.
pub fn focused_anchor_grid(r: usize, b: f64, shrink: f64) -> AnchorGrid {
    assert!(
        shrink > 0.0 && shrink <= 1.0,
        "shrink factor must be in (0, 1]"
    );
    anchor_grid(r, b * shrink)
}

/// Keeps exactly the anchors lying inside the mesh.
pub fn prune_outside(grid: &AnchorGrid, mesh: &TriMesh) -> Result<AnchorGrid, MeshError> {
    let mut anchors = Vec::new();
    for a in &grid.anchors {
        if mesh.contains_point(a)? {
            anchors.push(*a);
        }
    }
    Ok(AnchorGrid {
        resolution: grid.resolution,
        extent: grid.extent,
        anchors,
    })
}

/// Labels every (point, anchor) pair against the annotated grasps.
///
/// A pair is positive when some grasp has its contact within
/// `tol_contact` of the point and its center within `tol_center` of the
/// anchor. The positive's offset comes from the nearest-center match and
/// its pitch set collects the pitches of all matches sharing that
/// center. Negatives are a seeded subsample of the remaining pairs,
/// `negative_ratio` times the positive count.
pub fn label_proposals(
    cloud: &[Point3<f64>],
    grid: &AnchorGrid,
    gt: &[GroundTruthGrasp],
    params: &LabelParams,
) -> LabelOutcome {
    let n = cloud.len();
    let m = grid.anchors.len();
    let total = n * m;

    // invert the matching: per grasp, find nearby points via a uniform
    // hash and nearby anchors by scan, so the n·m table never exists
    let hash = PointHash::new(cloud, params.tol_contact.max(1e-12));
    let mut matches: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (t, g) in gt.iter().enumerate() {
        let points = hash.within(&g.contact, params.tol_contact);
        if points.is_empty() {
            continue;
        }
        for (j, anchor) in grid.anchors.iter().enumerate() {
            if (g.center - anchor).norm() <= params.tol_center {
                for &i in &points {
                    matches.entry((i, j as u32)).or_default().push(t);
                }
            }
        }
    }

    let mut proposals = Vec::with_capacity(matches.len());
    for (&(i, j), grasp_ids) in &matches {
        let anchor = grid.anchors[j as usize];
        let nearest = grasp_ids
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = (gt[a].center - anchor).norm();
                let db = (gt[b].center - anchor).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let center = gt[nearest].center;
        let mut pitches: Vec<f64> = Vec::new();
        for &t in grasp_ids {
            if (gt[t].center - center).norm() > 1e-9 {
                continue;
            }
            let p = gt[t].pitch;
            if !pitches
                .iter()
                .any(|&q| crate::wrap_angle(p - q).abs() <= params.tol_pitch)
            {
                pitches.push(p);
            }
        }
        proposals.push(Proposal {
            point: cloud[i as usize],
            anchor,
            antipodal_label: Some(true),
            regression_target: Some(RegressionTarget {
                offset: center - anchor,
                pitches,
            }),
        });
    }
    let positive_count = proposals.len();

    let pool = ((params.negative_ratio * positive_count as f64).ceil() as usize)
        .min(total - positive_count);
    let positive_keys: BTreeSet<u64> = matches
        .keys()
        .map(|&(i, j)| i as u64 * m as u64 + j as u64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut chosen: BTreeSet<u64> = BTreeSet::new();
    let mut attempts = 0usize;
    while chosen.len() < pool && attempts < 100 * pool.max(1) {
        attempts += 1;
        let idx = rng.gen_range(0..total as u64);
        if !positive_keys.contains(&idx) {
            chosen.insert(idx);
        }
    }
    if chosen.len() < pool {
        // rejection stalled on a tiny pair space: walk the complement
        for idx in 0..total as u64 {
            if chosen.len() >= pool {
                break;
            }
            if !positive_keys.contains(&idx) {
                chosen.insert(idx);
            }
        }
    }
    let negative_count = chosen.len();
    for idx in chosen {
        let i = (idx / m as u64) as usize;
        let j = (idx % m as u64) as usize;
        proposals.push(Proposal {
            point: cloud[i],
            anchor: grid.anchors[j],
            antipodal_label: Some(false),
            regression_target: None,
        });
    }

    LabelOutcome {
        proposals,
        total,
        positive_count,
        negative_count,
        empty_ground_truth: gt.is_empty(),
    }
}

/// Selects the cloud points admitted around `p` by the anisotropic
/// criterion `d(p', p) · (|cos ∠(p→p', anchor→p)| + 1) ≤ eps`.
///
/// The admission radius is `eps/2` along the approach axis (anchor
/// toward point) and `eps` perpendicular to it. Points coincident with
/// `p` always pass.
pub fn anchor_neighborhood(
    cloud: &[Point3<f64>],
    p: &Point3<f64>,
    anchor: &Point3<f64>,
    eps: f64,
) -> Vec<Point3<f64>> {
    assert!(eps > 0.0, "eps must be positive");
    let approach = p - anchor;
    let approach_norm = approach.norm();
    assert!(approach_norm > 0.0, "point must differ from anchor");
    let mut out = Vec::new();
    for q in cloud {
        let d = (q - p).norm();
        if d == 0.0 {
            out.push(*q);
            continue;
        }
        let cos = ((q - p).dot(&approach) / (d * approach_norm))
            .abs()
            .clamp(0.0, 1.0);
        if d * (cos + 1.0) <= eps {
            out.push(*q);
        }
    }
    out
}

/// Resamples the admitted neighborhood of `(p, anchor)` to exactly
/// [`PAYLOAD_SIZE`] points and attaches the anchor coordinates.
///
/// Oversized neighborhoods shrink by farthest-point sampling, undersized
/// ones grow by drawing with replacement; the result is ordered
/// lexicographically so equal inputs produce equal payloads.
pub fn proposal_payload(
    cloud: &[Point3<f64>],
    p: &Point3<f64>,
    anchor: &Point3<f64>,
    eps: f64,
    seed: u64,
) -> Result<ProposalPayload, ProposalError> {
    let hood = anchor_neighborhood(cloud, p, anchor, eps);
    if hood.is_empty() {
        return Err(ProposalError::EmptyNeighborhood);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<Point3<f64>> = if hood.len() > PAYLOAD_SIZE {
        farthest_point_sample(&hood, PAYLOAD_SIZE, &mut rng)
            .into_iter()
            .map(|i| hood[i])
            .collect()
    } else {
        let mut v = hood.clone();
        while v.len() < PAYLOAD_SIZE {
            v.push(hood[rng.gen_range(0..hood.len())]);
        }
        v
    };
    picked.sort_by(|a, b| {
        a.coords
            .iter()
            .zip(b.coords.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(ProposalPayload {
        neighborhood: picked,
        anchor: *anchor,
    })
}

/// Greedy farthest-point subset: a random start, then repeatedly the
/// point maximizing the distance to everything already selected.
pub fn farthest_point_sample<R: Rng>(points: &[Point3<f64>], k: usize, rng: &mut R) -> Vec<usize> {
    assert!(k <= points.len());
    let mut selected = Vec::with_capacity(k);
    if k == 0 {
        return selected;
    }
    let start = rng.gen_range(0..points.len());
    selected.push(start);
    let mut dist: Vec<f64> = points.iter().map(|q| (q - points[start]).norm()).collect();
    while selected.len() < k {
        let mut best = 0usize;
        let mut best_d = -1.0;
        for (i, &d) in dist.iter().enumerate() {
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        selected.push(best);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min((points[i] - points[best]).norm());
        }
    }
    selected
}

/// Uniform spatial hash over a point cloud for fixed-radius queries.
struct PointHash {
    cells: BTreeMap<(i64, i64, i64), Vec<u32>>,
    points: Vec<Point3<f64>>,
    h: f64,
}

impl PointHash {
    fn new(points: &[Point3<f64>], h: f64) -> PointHash {
        let mut cells: BTreeMap<(i64, i64, i64), Vec<u32>> = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, h)).or_default().push(i as u32);
        }
        PointHash {
            cells,
            points: points.to_vec(),
            h,
        }
    }

    fn key(p: &Point3<f64>, h: f64) -> (i64, i64, i64) {
        (
            (p.x / h).floor() as i64,
            (p.y / h).floor() as i64,
            (p.z / h).floor() as i64,
        )
    }

    /// Indices of points within `radius` of `center`; requires
    /// `radius <= h` so the 27-cell stencil is sufficient.
    fn within(&self, center: &Point3<f64>, radius: f64) -> Vec<u32> {
        let (cx, cy, cz) = Self::key(center, self.h);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &i in ids {
                            if (self.points[i as usize] - center).norm() <= radius {
                                out.push(i);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_relative_eq;

    #[test]
    fn single_cell_grid_is_the_origin() {
        let g = anchor_grid(1, 0.22);
        assert_eq!(g.anchors, alloc::vec![Point3::origin()]);
        assert_relative_eq!(g.cell_size(), 0.22);
    }

    #[test]
    fn three_per_axis_grid_hits_the_expected_coordinates() {
        let g = anchor_grid(3, 0.22);
        assert_eq!(g.anchors.len(), 27);
        for a in &g.anchors {
            for k in 0..3 {
                let c = a[k];
                assert!(
                    (c + 0.11).abs() < 1e-12 || c.abs() < 1e-12 || (c - 0.11).abs() < 1e-12,
                    "unexpected coordinate {c}"
                );
            }
        }
    }

    #[test]
    fn dense_grid_spacing_matches_the_lattice_rule() {
        let g = anchor_grid(10, 0.22);
        assert_eq!(g.anchors.len(), 1000);
        assert_relative_eq!(g.cell_size(), 0.22 / 9.0, epsilon = 1e-15);
        for a in &g.anchors {
            for k in 0..3 {
                assert!(a[k] >= -0.11 - 1e-12 && a[k] <= 0.11 + 1e-12);
            }
        }
    }

    #[test]
    fn sphere_pruning_matches_analytic_containment() {
        let sphere = shapes::icosphere(0.05, 3, Point3::origin());
        let grid = anchor_grid(10, 0.22);
        let pruned = prune_outside(&grid, &sphere).unwrap();
        let expected: Vec<Point3<f64>> = grid
            .anchors
            .iter()
            .copied()
            .filter(|a| a.coords.norm() <= 0.05)
            .collect();
        assert_eq!(pruned.anchors, expected);
        assert!(!pruned.anchors.is_empty());
    }

    #[test]
    fn pruning_is_idempotent_and_handles_disjoint_meshes() {
        let cube = shapes::box_mesh(Vector3::new(0.04, 0.04, 0.04), Point3::new(0.0, 0.0, 0.0));
        let grid = anchor_grid(7, 0.22);
        let once = prune_outside(&grid, &cube).unwrap();
        let twice = prune_outside(&once, &cube).unwrap();
        assert_eq!(once, twice);

        let far = shapes::box_mesh(Vector3::new(0.04, 0.04, 0.04), Point3::new(1.0, 0.0, 0.0));
        assert!(prune_outside(&grid, &far).unwrap().anchors.is_empty());

        let single = anchor_grid(1, 0.22);
        assert_eq!(prune_outside(&single, &cube).unwrap().anchors.len(), 1);
    }

    #[test]
    fn neighborhood_examples_follow_the_admission_formula() {
        let eps = DEFAULT_NEIGHBORHOOD_EPS;
        let p = Point3::origin();
        let anchor = Point3::new(0.0, 0.0, -1.0);
        let cloud = [
            Point3::new(0.0, 0.0, 0.018),
            Point3::new(0.037, 0.0, 0.0),
            Point3::new(0.0, 0.0, 0.020),
        ];
        let hood = anchor_neighborhood(&cloud, &p, &anchor, eps);
        assert_eq!(hood, alloc::vec![cloud[0], cloud[1]]);
    }

    #[test]
    fn admission_boundary_is_anisotropic_two_to_one() {
        let eps = 0.03;
        let p = Point3::origin();
        let anchor = Point3::new(0.0, 0.0, -1.0);
        let tick = 1e-9;
        let cloud = [
            Point3::new(0.0, 0.0, eps / 2.0 - tick),
            Point3::new(0.0, 0.0, eps / 2.0 + tick),
            Point3::new(0.0, 0.0, -(eps / 2.0) + tick),
            Point3::new(0.0, 0.0, -(eps / 2.0) - tick),
            Point3::new(eps - tick, 0.0, 0.0),
            Point3::new(eps + tick, 0.0, 0.0),
        ];
        let hood = anchor_neighborhood(&cloud, &p, &anchor, eps);
        assert_eq!(hood, alloc::vec![cloud[0], cloud[2], cloud[4]]);
    }

    #[test]
    fn neighborhood_is_monotone_in_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cloud: Vec<Point3<f64>> = (0..300)
            .map(|_| {
                Point3::new(
                    rng.gen::<f64>() * 0.1 - 0.05,
                    rng.gen::<f64>() * 0.1 - 0.05,
                    rng.gen::<f64>() * 0.1 - 0.05,
                )
            })
            .collect();
        let p = Point3::new(0.01, 0.0, 0.0);
        let anchor = Point3::new(0.0, 0.0, -0.05);
        let small = anchor_neighborhood(&cloud, &p, &anchor, 0.02);
        let large = anchor_neighborhood(&cloud, &p, &anchor, 0.05);
        for q in &small {
            assert!(large.contains(q));
        }
        assert!(small.len() <= large.len());
    }

    #[test]
    fn coincident_grasp_gives_zero_offset_positive() {
        let grid = anchor_grid(3, 0.22);
        let p = Point3::new(0.02, 0.0, 0.0);
        let cloud = [p, Point3::new(0.5, 0.5, 0.5)];
        let gt = [GroundTruthGrasp {
            contact: p,
            center: Point3::origin(),
            pitch: 0.7,
        }];
        let params = LabelParams::for_grid(&grid, DEFAULT_NEIGHBORHOOD_EPS);
        let out = label_proposals(&cloud, &grid, &gt, &params);
        assert!(!out.empty_ground_truth);
        let pos: Vec<&Proposal> = out
            .proposals
            .iter()
            .filter(|p| p.antipodal_label == Some(true))
            .collect();
        // the origin anchor is the only one within half a cell diagonal
        assert_eq!(pos.len(), 1);
        let target = pos[0].regression_target.as_ref().unwrap();
        assert_relative_eq!(target.offset.norm(), 0.0, epsilon = 1e-12);
        assert_eq!(target.pitches, alloc::vec![0.7]);
    }

    #[test]
    fn pitch_ambiguity_collapses_to_one_proposal() {
        let grid = anchor_grid(3, 0.22);
        let p = Point3::new(0.02, 0.0, 0.0);
        let cloud = [p];
        let gt = [
            GroundTruthGrasp {
                contact: p,
                center: Point3::origin(),
                pitch: 0.2,
            },
            GroundTruthGrasp {
                contact: p,
                center: Point3::origin(),
                pitch: 1.4,
            },
        ];
        let params = LabelParams::for_grid(&grid, DEFAULT_NEIGHBORHOOD_EPS);
        let out = label_proposals(&cloud, &grid, &gt, &params);
        assert_eq!(out.positive_count, 1);
        let target = out.proposals[0].regression_target.as_ref().unwrap();
        assert_eq!(target.pitches.len(), 2);
    }

    #[test]
    fn negatives_scale_with_positives_and_lack_targets() {
        let grid = anchor_grid(3, 0.22);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut cloud: Vec<Point3<f64>> = (0..50)
            .map(|_| {
                Point3::new(
                    rng.gen::<f64>() * 0.2 - 0.1,
                    rng.gen::<f64>() * 0.2 - 0.1,
                    rng.gen::<f64>() * 0.2 - 0.1,
                )
            })
            .collect();
        let contact = Point3::new(0.03, 0.0, 0.0);
        cloud.push(contact);
        let gt = [GroundTruthGrasp {
            contact,
            center: Point3::new(0.0, 0.01, 0.0),
            pitch: 0.0,
        }];
        let params = LabelParams::for_grid(&grid, DEFAULT_NEIGHBORHOOD_EPS);
        let out = label_proposals(&cloud, &grid, &gt, &params);
        assert!(out.positive_count >= 1);
        let expected_pool = (params.negative_ratio * out.positive_count as f64).ceil() as usize;
        assert_eq!(out.negative_count, expected_pool);
        assert_eq!(
            out.proposals.len(),
            out.positive_count + out.negative_count
        );
        for p in &out.proposals {
            match p.antipodal_label {
                Some(true) => {
                    let t = p.regression_target.as_ref().unwrap();
                    assert!(t.offset.norm() <= params.tol_center + 1e-12);
                    assert!(!t.pitches.is_empty());
                }
                Some(false) => assert!(p.regression_target.is_none()),
                None => panic!("labeling must not leave proposals unlabeled"),
            }
        }
        assert_eq!(out.total, cloud.len() * 27);
    }

    #[test]
    fn empty_ground_truth_is_flagged() {
        let grid = anchor_grid(3, 0.22);
        let cloud = [Point3::new(0.02, 0.0, 0.0)];
        let params = LabelParams::for_grid(&grid, DEFAULT_NEIGHBORHOOD_EPS);
        let out = label_proposals(&cloud, &grid, &[], &params);
        assert!(out.empty_ground_truth);
        assert_eq!(out.positive_count, 0);
        assert!(out.proposals.is_empty());
    }

    #[test]
    fn labeling_is_deterministic_per_seed() {
        let grid = anchor_grid(3, 0.22);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cloud: Vec<Point3<f64>> = (0..80)
            .map(|_| {
                Point3::new(
                    rng.gen::<f64>() * 0.2 - 0.1,
                    rng.gen::<f64>() * 0.2 - 0.1,
                    rng.gen::<f64>() * 0.2 - 0.1,
                )
            })
            .collect();
        let gt = [GroundTruthGrasp {
            contact: cloud[0],
            center: Point3::origin(),
            pitch: 0.1,
        }];
        let params = LabelParams::for_grid(&grid, DEFAULT_NEIGHBORHOOD_EPS);
        let a = label_proposals(&cloud, &grid, &gt, &params);
        let b = label_proposals(&cloud, &grid, &gt, &params);
        assert_eq!(a, b);
    }

    #[test]
    fn payload_of_exactly_one_hundred_is_the_canonicalized_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = Point3::origin();
        let anchor = Point3::new(0.0, 0.0, -0.1);
        // points well inside the perpendicular admission radius
        let cloud: Vec<Point3<f64>> = (0..PAYLOAD_SIZE)
            .map(|_| {
                Point3::new(
                    rng.gen::<f64>() * 0.01,
                    rng.gen::<f64>() * 0.01,
                    rng.gen::<f64>() * 0.002,
                )
            })
            .collect();
        let payload = proposal_payload(&cloud, &p, &anchor, DEFAULT_NEIGHBORHOOD_EPS, 7).unwrap();
        let mut expected = cloud.clone();
        expected.sort_by(|a, b| {
            a.coords
                .iter()
                .zip(b.coords.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        assert_eq!(payload.neighborhood, expected);
        assert_eq!(payload.anchor, anchor);
    }

    #[test]
    fn single_point_upsamples_to_one_hundred_copies() {
        let p = Point3::new(0.01, 0.02, 0.03);
        let cloud = [p];
        let payload =
            proposal_payload(&cloud, &p, &Point3::origin(), DEFAULT_NEIGHBORHOOD_EPS, 0).unwrap();
        assert_eq!(payload.neighborhood.len(), PAYLOAD_SIZE);
        assert!(payload.neighborhood.iter().all(|q| *q == p));
    }

    #[test]
    fn empty_neighborhood_is_an_error() {
        let cloud = [Point3::new(1.0, 1.0, 1.0)];
        let err = proposal_payload(
            &cloud,
            &Point3::origin(),
            &Point3::new(0.0, 0.0, -0.1),
            0.01,
            0,
        )
        .unwrap_err();
        assert_eq!(err, ProposalError::EmptyNeighborhood);
    }

    #[test]
    fn farthest_point_sampling_spreads_better_than_random() {
        fn min_pairwise(points: &[Point3<f64>]) -> f64 {
            let mut best = f64::INFINITY;
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    best = best.min((points[i] - points[j]).norm());
                }
            }
            best
        }
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let cloud: Vec<Point3<f64>> = (0..400)
                .map(|_| {
                    Point3::new(
                        rng.gen::<f64>() * 0.04,
                        rng.gen::<f64>() * 0.04,
                        rng.gen::<f64>() * 0.01,
                    )
                })
                .collect();
            let fps_ids = farthest_point_sample(&cloud, PAYLOAD_SIZE, &mut rng);
            let fps: Vec<Point3<f64>> = fps_ids.iter().map(|&i| cloud[i]).collect();
            let random: Vec<Point3<f64>> = rand::seq::index::sample(&mut rng, 400, PAYLOAD_SIZE)
                .iter()
                .map(|i| cloud[i])
                .collect();
            assert!(min_pairwise(&fps) >= min_pairwise(&random));
        }
    }

    #[test]
    fn payload_is_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cloud: Vec<Point3<f64>> = (0..350)
            .map(|_| {
                Point3::new(
                    rng.gen::<f64>() * 0.03,
                    rng.gen::<f64>() * 0.03,
                    rng.gen::<f64>() * 0.03,
                )
            })
            .collect();
        let p = cloud[0];
        let anchor = Point3::new(0.0, 0.0, -0.08);
        let a = proposal_payload(&cloud, &p, &anchor, DEFAULT_NEIGHBORHOOD_EPS, 5).unwrap();
        let b = proposal_payload(&cloud, &p, &anchor, DEFAULT_NEIGHBORHOOD_EPS, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.neighborhood.len(), PAYLOAD_SIZE);
    }
}
