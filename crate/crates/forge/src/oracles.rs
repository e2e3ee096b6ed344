//! Brute-force reimplementations of the core algorithms, used to
//! cross-check them.
//!
//! Every oracle here reaches its answer by a different route than the
//! code under test: wrench scores by direction sampling instead of
//! facet enumeration, closure decisions by geometric iteration instead
//! of a simplex tableau, ray casts by testing every triangle instead
//! of walking a hierarchy, volumes by Monte-Carlo counting instead of
//! the divergence theorem, and suppression by an explicit pairwise
//! matrix. The suite runners compare both routes and report one
//! verdict per check.

use graspforge_core::evaluation::{nms, EvalThresholds};
use graspforge_core::grasp::Grasp;
use graspforge_core::hull3::{convex_hull_3d, ConvexHull3};
use graspforge_core::mesh::TriMesh;
use graspforge_core::nalgebra::{DMatrix, DVector, Point3, Quaternion, UnitQuaternion, Vector3, Vector6};
use graspforge_core::wrench::wrench_quality;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub pass: bool,
    pub details: String,
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn unit_direction<R: Rng>(rng: &mut R) -> Vector6<f64> {
    loop {
        let v = Vector6::from_fn(|_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// Support function `h(u) = max_i <w_i, u>`.
fn support(wrenches: &[Vector6<f64>], u: &Vector6<f64>) -> f64 {
    wrenches.iter().map(|w| w.dot(u)).fold(f64::NEG_INFINITY, f64::max)
}

fn tangential(at: &Vector6<f64>, v: &Vector6<f64>) -> Vector6<f64> {
    v - at * v.dot(at)
}

/// Minimizes the support function over the unit sphere by random
/// sampling plus steepest-descent refinement from the best starts.
///
/// For a wrench set whose hull contains the origin, the minimum is the
/// radius of the largest origin-centered inscribed ball, so this is an
/// independent route to the hull-based score. The returned value is
/// always an upper bound on that radius.
pub fn support_min_score(wrenches: &[Vector6<f64>], samples: usize, seed: u64) -> f64 {
    const STARTS: usize = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut starts: Vec<(f64, Vector6<f64>)> = Vec::with_capacity(STARTS + 1);
    for _ in 0..samples {
        let u = unit_direction(&mut rng);
        let h = support(wrenches, &u);
        if starts.len() < STARTS || h < starts.last().expect("nonempty").0 {
            let at = starts.partition_point(|(v, _)| *v < h);
            starts.insert(at, (h, u));
            starts.truncate(STARTS);
        }
    }

    let wscale = wrenches.iter().map(|w| w.norm()).fold(1e-12, f64::max);
    starts
        .into_iter()
        .map(|(h0, u0)| support_descend(wrenches, u0, h0, wscale))
        .fold(f64::INFINITY, f64::min)
}

/// Refines one direction by steepest descent for the pointwise-maximum
/// objective: the step follows the negated minimum-norm element of the
/// near-active tangential gradients, which keeps making progress at
/// the conical kinks where single-piece descent stalls.
fn support_descend(wrenches: &[Vector6<f64>], u0: Vector6<f64>, h0: f64, wscale: f64) -> f64 {
    const ITERS: usize = 600;
    let mut u = u0;
    let mut h = h0;
    let mut step = 0.2;
    for _ in 0..ITERS {
        if step < 1e-13 {
            break;
        }
        let active_band = step * wscale;
        let grads: Vec<Vector6<f64>> = wrenches
            .iter()
            .filter(|w| w.dot(&u) >= h - active_band)
            .map(|w| tangential(&u, w))
            .collect();
        let p = minnorm_in_hull(&grads);
        let pn = p.norm();
        if pn <= 1e-13 * wscale {
            // Stationary for this active band; a tighter band may
            // still expose descent.
            step *= 0.5;
            continue;
        }
        let d = -p / pn;
        let mut t = step;
        let mut accepted = false;
        for _ in 0..25 {
            let cand = (u + d * t).normalize();
            let hc = support(wrenches, &cand);
            if hc < h - 0.1 * pn * t {
                u = cand;
                h = hc;
                step = (t * 2.0).min(0.5);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            step *= 0.5;
        }
    }
    h
}

/// Minimum-norm point of the convex hull of `vecs`, witnessed by
/// explicit convex weights from the nonnegative least-squares solve.
fn minnorm_in_hull(vecs: &[Vector6<f64>]) -> Vector6<f64> {
    let scale = vecs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if vecs.is_empty() || scale <= 0.0 {
        return Vector6::zeros();
    }
    let rows = 7;
    let columns: Vec<DVector<f64>> = vecs
        .iter()
        .map(|v| {
            let mut c = DVector::zeros(rows);
            for k in 0..6 {
                c[k] = v[k];
            }
            c[6] = scale;
            c
        })
        .collect();
    let mut b = DVector::zeros(rows);
    b[6] = scale;
    let lambda = nnls(&columns, &b);
    let total: f64 = lambda.sum();
    if total <= 1e-9 {
        return vecs[0];
    }
    let mut combo = Vector6::zeros();
    for (j, v) in vecs.iter().enumerate() {
        combo += v * (lambda[j] / total);
    }
    combo
}

/// Gilbert-style descent toward `target` over the convex hull of
/// `points`; returns the final iterate minus the target.
///
/// The iterate stays a convex combination of the inputs throughout, so
/// the residual norm is a sound upper bound on the distance from the
/// target to the hull, and for targets outside the hull its direction
/// approximates the outward separating normal.
pub fn gilbert_residual(
    points: &[Vector6<f64>],
    target: &Vector6<f64>,
    max_iters: usize,
    stop_below: f64,
) -> Vector6<f64> {
    let shifted: Vec<Vector6<f64>> = points.iter().map(|p| p - target).collect();
    let mut v = shifted
        .iter()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .copied()
        .expect("nonempty point set");
    for _ in 0..max_iters {
        if v.norm() <= stop_below {
            break;
        }
        let s = shifted
            .iter()
            .min_by(|a, b| a.dot(&v).total_cmp(&b.dot(&v)))
            .copied()
            .expect("nonempty point set");
        let d = s - v;
        let dd = d.dot(&d);
        if dd <= 1e-30 {
            break;
        }
        let alpha = (-v.dot(&d) / dd).clamp(0.0, 1.0);
        if alpha <= 0.0 {
            break;
        }
        v += d * alpha;
    }
    v
}

/// Distance from `target` to the convex hull of `points`, bounded from
/// above by [`gilbert_residual`].
pub fn hull_distance_upper(
    points: &[Vector6<f64>],
    target: &Vector6<f64>,
    max_iters: usize,
    stop_below: f64,
) -> f64 {
    gilbert_residual(points, target, max_iters, stop_below).norm()
}

/// Nonnegative least squares by the active-set method: minimizes
/// `|A x - b|` subject to `x >= 0`, where `A` is given column-wise.
fn nnls(columns: &[DVector<f64>], b: &DVector<f64>) -> DVector<f64> {
    let n = columns.len();
    let rows = b.len();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let residual_grad = |x: &DVector<f64>| -> DVector<f64> {
        let mut r = b.clone();
        for (j, c) in columns.iter().enumerate() {
            r -= c * x[j];
        }
        let mut g = DVector::zeros(n);
        for (j, c) in columns.iter().enumerate() {
            g[j] = c.dot(&r);
        }
        g
    };
    for _ in 0..(3 * n + 30) {
        let g = residual_grad(&x);
        let mut enter = None;
        let mut best = 1e-12;
        for j in 0..n {
            if !passive[j] && g[j] > best {
                best = g[j];
                enter = Some(j);
            }
        }
        let Some(enter) = enter else { break };
        passive[enter] = true;
        for _ in 0..(3 * n + 30) {
            let active: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let mut sub = DMatrix::zeros(rows, active.len());
            for (k, &j) in active.iter().enumerate() {
                sub.set_column(k, &columns[j]);
            }
            let z = sub
                .svd(true, true)
                .solve(b, 1e-13)
                .unwrap_or_else(|_| DVector::zeros(active.len()));
            if active.iter().enumerate().all(|(k, _)| z[k] > 0.0) {
                x.fill(0.0);
                for (k, &j) in active.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &j) in active.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[j] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            let mut next = x.clone();
            for (k, &j) in active.iter().enumerate() {
                next[j] = x[j] + alpha * (z[k] - x[j]);
            }
            x = next;
            for &j in &active {
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

/// Certified distance from `target` to the convex hull of `points`:
/// finds nonnegative weights by least squares, renormalizes them into
/// exact convex weights, and measures the combination against the
/// target. The returned distance is witnessed by an explicit hull
/// point, so it is always a sound upper bound.
pub fn convex_witness_distance(points: &[Vector6<f64>], target: &Vector6<f64>) -> f64 {
    let scale = points.iter().map(|p| p.norm()).fold(1e-12, f64::max);
    let rows = 7;
    let columns: Vec<DVector<f64>> = points
        .iter()
        .map(|p| {
            let mut c = DVector::zeros(rows);
            for k in 0..6 {
                c[k] = p[k];
            }
            c[6] = scale;
            c
        })
        .collect();
    let mut b = DVector::zeros(rows);
    for k in 0..6 {
        b[k] = target[k];
    }
    b[6] = scale;
    let lambda = nnls(&columns, &b);
    let total: f64 = lambda.sum();
    if total <= 1e-6 {
        return f64::INFINITY;
    }
    let mut combo = Vector6::zeros();
    for (j, p) in points.iter().enumerate() {
        combo += p * (lambda[j] / total);
    }
    (combo - target).norm()
}

/// Closure decisions the oracle can certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureVerdict {
    /// A scaled cross-polytope around the origin was expressed inside
    /// the hull, proving strict interiority.
    ForceClosure,
    /// A direction with every wrench on one side was found and
    /// verified by direct evaluation, proving the origin is not
    /// interior.
    NotForceClosure,
    /// Neither certificate landed within budget.
    Abstain,
}

fn separator_margin(wrenches: &[Vector6<f64>], u: &Vector6<f64>) -> f64 {
    wrenches.iter().map(|w| w.dot(u)).fold(f64::INFINITY, f64::min)
}

/// Decides force closure by explicit geometric certificates.
pub fn closure_oracle(wrenches: &[Vector6<f64>], seed: u64) -> ClosureVerdict {
    let scale = wrenches.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if wrenches.is_empty() || scale <= 0.0 {
        return ClosureVerdict::NotForceClosure;
    }
    let accept = -1e-12 * scale;

    // Interior certificate: witness every vertex of a scaled
    // cross-polytope as a near-exact hull point. The witnessed points
    // sit within rho/10 of the vertices, so their hull still contains
    // a ball of radius rho (1/sqrt(6) - 1/10) around the origin, which
    // proves strict interiority. The radius backs off when the first
    // try overshoots the true inscribed ball.
    let radius_hint = support_min_score(wrenches, 2000, seed ^ 0x5eed);
    if radius_hint > 1e-9 {
        let mut rho = radius_hint / 3.0;
        for _ in 0..3 {
            let tol = rho / 10.0;
            let all_inside = (0..6).all(|axis| {
                [1.0, -1.0].into_iter().all(|sign| {
                    let mut target = Vector6::zeros();
                    target[axis] = sign * rho;
                    convex_witness_distance(wrenches, &target) <= tol
                })
            });
            if all_inside {
                return ClosureVerdict::ForceClosure;
            }
            rho /= 4.0;
        }
    }

    // Separating certificate: the residual direction of descent toward
    // the origin is the natural candidate; polish it and a spread of
    // random starts by subgradient ascent on the worst dot, then
    // verify by direct evaluation.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xca5e);
    let mut candidates: Vec<Vector6<f64>> = Vec::new();
    let v = gilbert_residual(wrenches, &Vector6::zeros(), 20_000, 1e-14 * scale);
    if v.norm() > 1e-14 * scale {
        candidates.push(v / v.norm());
    }
    for _ in 0..64 {
        candidates.push(unit_direction(&mut rng));
    }
    for start in candidates {
        let mut u = start;
        if separator_margin(wrenches, &u) >= accept {
            return ClosureVerdict::NotForceClosure;
        }
        let mut step = 0.5;
        for _ in 0..400 {
            let margin = separator_margin(wrenches, &u);
            if margin >= accept {
                return ClosureVerdict::NotForceClosure;
            }
            let worst = wrenches
                .iter()
                .min_by(|a, b| a.dot(&u).total_cmp(&b.dot(&u)))
                .expect("nonempty");
            let g = tangential(&u, worst);
            if g.norm() < 1e-15 {
                break;
            }
            let cand = (u + g * (step / g.norm())).normalize();
            if separator_margin(wrenches, &cand) > margin {
                u = cand;
                step *= 1.1;
            } else {
                step *= 0.6;
                if step < 1e-13 {
                    break;
                }
            }
        }
        if separator_margin(wrenches, &u) >= accept {
            return ClosureVerdict::NotForceClosure;
        }
    }
    ClosureVerdict::Abstain
}

/// First ray hit by testing every triangle, mirroring the surface
/// contract of the accelerated caster: hits within `1e-9` of the
/// origin are discarded.
pub fn brute_first_hit(mesh: &TriMesh, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<f64> {
    let mut best: Option<f64> = None;
    for f in mesh.faces() {
        let a = mesh.vertices()[f[0] as usize];
        let b = mesh.vertices()[f[1] as usize];
        let c = mesh.vertices()[f[2] as usize];
        let e1 = b - a;
        let e2 = c - a;
        let p = dir.cross(&e2);
        let det = e1.dot(&p);
        if det.abs() < 1e-14 {
            continue;
        }
        let inv = 1.0 / det;
        let s = origin - a;
        let u = s.dot(&p) * inv;
        if !(0.0..=1.0).contains(&u) {
            continue;
        }
        let q = s.cross(&e1);
        let v = dir.dot(&q) * inv;
        if v < 0.0 || u + v > 1.0 {
            continue;
        }
        let t = e2.dot(&q) * inv;
        if t > 1e-9 && best.map_or(true, |bt| t < bt) {
            best = Some(t);
        }
    }
    best
}

/// Distance from a point to a triangle (closest-feature walk).
pub fn point_triangle_distance(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    if d1 * d4 - d3 * d2 <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (ap - ab * t).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    if d5 * d2 - d1 * d6 <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (ap - ac * t).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * t).norm();
    }
    let denom = (va + (d5 * d2 - d1 * d6) + (d1 * d4 - d3 * d2)).recip();
    let v = (d5 * d2 - d1 * d6) * denom;
    let w = (d1 * d4 - d3 * d2) * denom;
    (ap - ab * v - ac * w).norm()
}

/// Distance from a point to the nearest triangle of a mesh.
pub fn mesh_distance(mesh: &TriMesh, p: &Point3<f64>) -> f64 {
    mesh.faces()
        .iter()
        .map(|f| {
            point_triangle_distance(
                p,
                &mesh.vertices()[f[0] as usize],
                &mesh.vertices()[f[1] as usize],
                &mesh.vertices()[f[2] as usize],
            )
        })
        .fold(f64::INFINITY, f64::min)
}

/// Monte-Carlo hull volume by half-space tests against every facet
/// plane, independent of the divergence-theorem integrator.
pub fn mc_hull_volume(hull: &ConvexHull3, samples: usize, seed: u64) -> f64 {
    let mut planes = Vec::with_capacity(hull.faces.len());
    for f in &hull.faces {
        let a = hull.vertices[f[0] as usize];
        let b = hull.vertices[f[1] as usize];
        let c = hull.vertices[f[2] as usize];
        let n = (b - a).cross(&(c - a));
        planes.push((n, a));
    }
    let mut lo = hull.vertices[0];
    let mut hi = hull.vertices[0];
    for v in &hull.vertices {
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let extent = hi - lo;
    let box_volume = extent.x * extent.y * extent.z;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = 0usize;
    for _ in 0..samples {
        let p = Point3::new(
            lo.x + extent.x * rng.gen::<f64>(),
            lo.y + extent.y * rng.gen::<f64>(),
            lo.z + extent.z * rng.gen::<f64>(),
        );
        if planes.iter().all(|(n, a)| n.dot(&(p - a)) <= 0.0) {
            inside += 1;
        }
    }
    box_volume * inside as f64 / samples as f64
}

fn wrap(x: f64) -> f64 {
    let mut a = x % TAU;
    if a > PI {
        a -= TAU;
    } else if a <= -PI {
        a += TAU;
    }
    a
}

/// Z-Y-X Euler angles read off the rotation matrix, an independent
/// route from the quaternion-component formulas under test.
pub fn matrix_euler_zyx(q: &UnitQuaternion<f64>) -> [f64; 3] {
    let m = q.to_rotation_matrix();
    let r = m.matrix();
    let sp = -r[(2, 0)];
    if sp.abs() >= 1.0 - 1e-12 {
        let yaw = (-r[(0, 1)]).atan2(r[(1, 1)]);
        [0.0, FRAC_PI_2.copysign(sp), wrap(yaw)]
    } else {
        [
            wrap(r[(2, 1)].atan2(r[(2, 2)])),
            sp.asin(),
            wrap(r[(1, 0)].atan2(r[(0, 0)])),
        ]
    }
}

fn oracle_close(a: &Grasp, b: &Grasp, center_tol: f64, angle_tol: f64) -> bool {
    if (a.center - b.center).norm() > center_tol {
        return false;
    }
    let ea = matrix_euler_zyx(&a.orientation);
    let eb = matrix_euler_zyx(&b.orientation);
    (0..3).all(|k| wrap(ea[k] - eb[k]).abs() <= angle_tol)
}

/// Greedy suppression over an explicit pairwise proximity matrix;
/// returns the retained indices in rank order.
pub fn nms_oracle(preds: &[(Grasp, f64)], center_tol: f64, angle_tol: f64) -> Vec<usize> {
    let mut close = vec![false; preds.len() * preds.len()];
    for i in 0..preds.len() {
        for j in 0..preds.len() {
            close[i * preds.len() + j] = oracle_close(&preds[i].0, &preds[j].0, center_tol, angle_tol);
        }
    }
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].1.total_cmp(&preds[a].1).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        if kept.iter().all(|&j| !close[i * preds.len() + j]) {
            kept.push(i);
        }
    }
    kept
}

/// A random wrench set whose hull surrounds the origin: Gaussian
/// points recentered on their mean.
pub fn random_centered_set(count: usize, seed: u64) -> Vec<Vector6<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vector6<f64>> = (0..count)
        .map(|_| Vector6::from_fn(|_, _| gaussian(&mut rng)))
        .collect();
    let mean: Vector6<f64> = points.iter().sum::<Vector6<f64>>() / count as f64;
    for p in &mut points {
        *p -= mean;
    }
    points
}

/// A raw Gaussian point set; the origin lands inside or outside the
/// hull depending on the draw.
pub fn random_raw_set(count: usize, seed: u64) -> Vec<Vector6<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Vector6::from_fn(|_, _| gaussian(&mut rng)))
        .collect()
}

/// A random grasp in a `half_extent` cube with uniform orientation.
pub fn random_grasp<R: Rng>(rng: &mut R, half_extent: f64) -> Grasp {
    let center = Point3::new(
        half_extent * (2.0 * rng.gen::<f64>() - 1.0),
        half_extent * (2.0 * rng.gen::<f64>() - 1.0),
        half_extent * (2.0 * rng.gen::<f64>() - 1.0),
    );
    let q = Quaternion::new(
        gaussian(rng),
        gaussian(rng),
        gaussian(rng),
        gaussian(rng),
    );
    Grasp::new(center, UnitQuaternion::from_quaternion(q))
}

/// Hull-based scores against the sampled-support oracle on random
/// closure sets. Draws are walked deterministically until `sets`
/// force-closure sets have been compared.
pub fn fc_score_suite(sets: usize, samples: usize, rel_tol: f64, seed: u64) -> SuiteReport {
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    let mut compared = 0usize;
    let mut details = String::new();
    let mut draw = 0u64;
    while compared < sets && draw < 4 * sets as u64 {
        let n = 14 + (draw % 5) as usize;
        let wrenches = random_centered_set(n, seed.wrapping_add(draw));
        draw += 1;
        let quality = wrench_quality(&wrenches);
        if !quality.force_closure {
            continue;
        }
        let i = compared;
        compared += 1;
        let oracle = support_min_score(&wrenches, samples, seed.wrapping_add(900 + i as u64));
        let rel = (oracle - quality.score).abs() / quality.score.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > rel_tol {
            failures += 1;
            let _ = writeln!(
                details,
                "set={i} n={n} hull={:.9e} oracle={:.9e} rel={rel:.3e}",
                quality.score, oracle
            );
        }
    }
    let _ = writeln!(details, "sets={compared} worst_rel={worst:.3e} tol={rel_tol:.1e}");
    SuiteReport {
        name: "fc-score",
        pass: failures == 0 && compared == sets,
        details,
    }
}

/// Closure decisions against the certificate oracle on random sets,
/// raw and recentered; degenerate-flagged sets are out of scope.
pub fn fc_decision_suite(sets: usize, seed: u64) -> SuiteReport {
    let mut disagreements = 0usize;
    let mut abstentions = 0usize;
    let mut compared = 0usize;
    let mut closures = 0usize;
    let mut details = String::new();
    for i in 0..sets {
        let n = 7 + (i % 14);
        let set_seed = seed.wrapping_add(7919 * i as u64);
        let wrenches = if i % 2 == 0 {
            random_raw_set(n, set_seed)
        } else {
            random_centered_set(n, set_seed)
        };
        let quality = wrench_quality(&wrenches);
        if quality.degenerate {
            continue;
        }
        compared += 1;
        if quality.force_closure {
            closures += 1;
        }
        match closure_oracle(&wrenches, set_seed ^ 0xabcd) {
            ClosureVerdict::ForceClosure if quality.force_closure => {}
            ClosureVerdict::NotForceClosure if !quality.force_closure => {}
            ClosureVerdict::Abstain => {
                abstentions += 1;
                let _ = writeln!(details, "set={i} n={n} oracle abstained, lp said {}", quality.force_closure);
            }
            _ => {
                disagreements += 1;
                let _ = writeln!(details, "set={i} n={n} oracle disagrees, lp said {}", quality.force_closure);
            }
        }
    }
    let _ = writeln!(
        details,
        "sets={sets} compared={compared} closures={closures} disagreements={disagreements} abstentions={abstentions}"
    );
    SuiteReport {
        name: "fc-decision",
        pass: disagreements == 0 && abstentions == 0 && compared > 0,
        details,
    }
}

/// Accelerated ray casts against the all-triangle oracle.
pub fn ray_suite(mesh: &TriMesh, rays: usize, seed: u64) -> SuiteReport {
    let (lo, hi) = mesh.aabb();
    let center = Point3::from((lo.coords + hi.coords) / 2.0);
    let radius = (hi - lo).norm().max(1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    let mut hits = 0usize;
    let mut details = String::new();
    for i in 0..rays {
        let origin = if i % 4 == 0 {
            // Interior-ish origins exercise exit casts.
            Point3::new(
                lo.x + (hi.x - lo.x) * rng.gen::<f64>(),
                lo.y + (hi.y - lo.y) * rng.gen::<f64>(),
                lo.z + (hi.z - lo.z) * rng.gen::<f64>(),
            )
        } else {
            let mut d = Vector3::new(gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng));
            if d.norm() < 1e-9 {
                d = Vector3::x();
            }
            center + d.normalize() * radius * (1.0 + rng.gen::<f64>())
        };
        let through = Point3::new(
            lo.x + (hi.x - lo.x) * rng.gen::<f64>(),
            lo.y + (hi.y - lo.y) * rng.gen::<f64>(),
            lo.z + (hi.z - lo.z) * rng.gen::<f64>(),
        );
        let mut dir = through - origin;
        if dir.norm() < 1e-9 {
            dir = Vector3::x();
        }
        dir = dir.normalize();

        let fast = mesh
            .ray_intersect(&origin, &dir)
            .first()
            .map(|h| h.distance);
        let brute = brute_first_hit(mesh, &origin, &dir);
        let agree = match (fast, brute) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= 1e-9,
            _ => false,
        };
        if fast.is_some() {
            hits += 1;
        }
        if !agree {
            mismatches += 1;
            let _ = writeln!(details, "ray={i} fast={fast:?} brute={brute:?}");
        }
    }
    let _ = writeln!(details, "rays={rays} hits={hits} mismatches={mismatches}");
    SuiteReport {
        name: "ray",
        pass: mismatches == 0,
        details,
    }
}

/// Divergence-theorem volumes against Monte-Carlo counting on random
/// convex bodies.
pub fn volume_suite(bodies: usize, samples: usize, rel_tol: f64, seed: u64) -> SuiteReport {
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    let mut details = String::new();
    for i in 0..bodies {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(31 * i as u64));
        let points: Vec<Point3<f64>> = (0..40)
            .map(|_| {
                Point3::new(
                    0.05 * gaussian(&mut rng),
                    0.05 * gaussian(&mut rng),
                    0.05 * gaussian(&mut rng),
                )
            })
            .collect();
        let hull = convex_hull_3d(&points).expect("random points span");
        let mesh = hull.to_mesh().expect("hull is a valid mesh");
        let analytic = mesh.mass_properties().expect("hull is closed").volume;
        let sampled = mc_hull_volume(&hull, samples, seed.wrapping_add(77 + i as u64));
        let rel = (analytic - sampled).abs() / sampled.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > rel_tol {
            failures += 1;
            let _ = writeln!(details, "body={i} analytic={analytic:.6e} mc={sampled:.6e} rel={rel:.3e}");
        }
    }
    let _ = writeln!(details, "bodies={bodies} worst_rel={worst:.3e} tol={rel_tol:.1e}");
    SuiteReport {
        name: "volume",
        pass: failures == 0,
        details,
    }
}

/// Library suppression against the pairwise-matrix oracle on random
/// grasp sets.
pub fn nms_suite(seeds: usize, grasps: usize, tol: &EvalThresholds) -> SuiteReport {
    let mut mismatches = 0usize;
    let mut details = String::new();
    for s in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(s as u64);
        let preds: Vec<(Grasp, f64)> = (0..grasps)
            .map(|_| (random_grasp(&mut rng, 0.1), rng.gen::<f64>()))
            .collect();
        let fast = nms(&preds, tol);
        let oracle: Vec<(Grasp, f64)> = nms_oracle(&preds, tol.nms_center, tol.nms_angle)
            .into_iter()
            .map(|i| preds[i])
            .collect();
        let agree = fast.len() == oracle.len()
            && fast.iter().zip(&oracle).all(|(a, b)| {
                a.1 == b.1
                    && a.0.center == b.0.center
                    && a.0.orientation.coords == b.0.orientation.coords
            });
        if !agree {
            mismatches += 1;
            let _ = writeln!(details, "seed={s} fast={} oracle={}", fast.len(), oracle.len());
        }
    }
    let _ = writeln!(details, "seeds={seeds} grasps={grasps} mismatches={mismatches}");
    SuiteReport {
        name: "nms",
        pass: mismatches == 0,
        details,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use graspforge_core::shapes;

    #[test]
    fn support_min_matches_cross_polytope() {
        let mut wrenches = Vec::new();
        for axis in 0..6 {
            for sign in [1.0, -1.0] {
                let mut w = Vector6::zeros();
                w[axis] = sign;
                wrenches.push(w);
            }
        }
        let score = support_min_score(&wrenches, 20_000, 1);
        let expected = 1.0 / 6.0f64.sqrt();
        assert!((score - expected).abs() < 1e-6, "score {score} expected {expected}");
    }

    #[test]
    fn hull_distance_detects_membership_and_absence() {
        let wrenches = random_centered_set(16, 5);
        let origin = Vector6::zeros();
        let d = hull_distance_upper(&wrenches, &origin, 20_000, 1e-12);
        assert!(d <= 1e-12, "origin should be inside, got {d}");

        let mut far = Vector6::zeros();
        far[0] = 100.0;
        let d = hull_distance_upper(&wrenches, &far, 20_000, 1e-12);
        assert!(d > 50.0, "far target should stay far, got {d}");
    }

    #[test]
    fn convex_witness_pins_known_distances() {
        let wrenches = random_centered_set(16, 5);
        let d = convex_witness_distance(&wrenches, &Vector6::zeros());
        assert!(d <= 1e-10, "origin should be witnessed inside, got {d}");

        // A segment from e0 to 3 e0: nearest hull point to the origin
        // is e0 itself.
        let mut a = Vector6::zeros();
        a[0] = 1.0;
        let d = convex_witness_distance(&[a, a * 3.0], &Vector6::zeros());
        assert!((d - 1.0).abs() < 1e-9, "segment distance {d}");
    }

    #[test]
    fn closure_oracle_certifies_both_sides() {
        let inside = random_centered_set(16, 11);
        assert_eq!(closure_oracle(&inside, 3), ClosureVerdict::ForceClosure);

        // All wrenches pushed into one half-space cannot close.
        let mut one_sided = random_raw_set(12, 13);
        for w in &mut one_sided {
            w[0] = w[0].abs() + 0.1;
        }
        assert_eq!(closure_oracle(&one_sided, 3), ClosureVerdict::NotForceClosure);
    }

    #[test]
    fn brute_ray_hits_cube_face() {
        // The cube is origin-centered, so the top face sits at z = 0.5.
        let cube = shapes::unit_cube();
        let t = brute_first_hit(&cube, &Point3::new(0.1, 0.2, 3.0), &Vector3::new(0.0, 0.0, -1.0));
        assert!((t.unwrap() - 2.5).abs() < 1e-12);
        assert!(brute_first_hit(&cube, &Point3::new(3.0, 3.0, 3.0), &Vector3::new(0.0, 0.0, -1.0))
            .is_none());
    }

    #[test]
    fn triangle_distance_regions() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        assert!((point_triangle_distance(&Point3::new(0.25, 0.25, 1.0), &a, &b, &c) - 1.0).abs() < 1e-12);
        assert!((point_triangle_distance(&Point3::new(-1.0, -1.0, 0.0), &a, &b, &c) - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((point_triangle_distance(&Point3::new(0.5, -2.0, 0.0), &a, &b, &c) - 2.0).abs() < 1e-12);
        assert!((point_triangle_distance(&Point3::new(1.0, 1.0, 0.0), &a, &b, &c) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mc_volume_close_on_cube() {
        let cube = shapes::unit_cube();
        let hull = convex_hull_3d(cube.vertices()).unwrap();
        let v = mc_hull_volume(&hull, 200_000, 7);
        assert!((v - 1.0).abs() < 0.01, "cube volume estimate {v}");
    }

    #[test]
    fn matrix_euler_agrees_with_quaternion_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let g = random_grasp(&mut rng, 1.0);
            let m = matrix_euler_zyx(&g.orientation);
            let e = graspforge_core::grasp::quat_to_euler(&g.orientation);
            assert!((m[0] - e.roll).abs() < 1e-9);
            assert!((m[1] - e.pitch).abs() < 1e-9);
            assert!((m[2] - e.yaw).abs() < 1e-9);
        }
    }

    #[test]
    fn suites_pass_at_smoke_scale() {
        let score = fc_score_suite(4, 20_000, 0.02, 42);
        assert!(score.pass, "{}", score.details);
        let decision = fc_decision_suite(20, 42);
        assert!(decision.pass, "{}", decision.details);
        let sphere = shapes::icosphere(0.05, 2, Point3::new(0.0, 0.0, 0.0));
        let ray = ray_suite(&sphere, 100, 42);
        assert!(ray.pass, "{}", ray.details);
        let volume = volume_suite(1, 200_000, 0.01, 42);
        assert!(volume.pass, "{}", volume.details);
        let nms_report = nms_suite(3, 40, &EvalThresholds::default());
        assert!(nms_report.pass, "{}", nms_report.details);
    }
}
