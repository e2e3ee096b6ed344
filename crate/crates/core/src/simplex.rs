//! Small dense linear-program solver: two-phase primal simplex with
//! Bland's rule, for equality-constrained programs in standard form.
//!
//! Sized for the wrench-space programs in this crate (tens of variables,
//! under ten constraints); not a general-purpose LP package.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Maximizes `c . x` subject to `A x = b`, `x >= 0`.
///
/// `a` is row-major with `m` rows of `n` entries each.
pub(crate) fn solve_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // rows scaled so b >= 0, then m artificial columns appended
    let cols = n + m;
    let mut t = vec![0.0f64; m * cols];
    let mut rhs = vec![0.0f64; m];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * cols + j] = s * a[i][j];
        }
        t[i * cols + n + i] = 1.0;
        rhs[i] = s * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // phase 1: maximize -(sum of artificials)
    let mut z = vec![0.0f64; cols];
    let mut zval = 0.0;
    for i in 0..m {
        for j in 0..n {
            z[j] += t[i * cols + j];
        }
        zval -= rhs[i];
    }
    if !pivot_until_optimal(&mut t, &mut rhs, &mut z, &mut zval, &mut basis, cols, m) {
        return LpOutcome::Unbounded; // cannot happen: phase-1 objective is bounded
    }
    if zval < -FEAS_TOL {
        return LpOutcome::Infeasible;
    }
    // drive artificial variables out of the basis where a real pivot exists;
    // rows that offer none are vacuous (0 = 0) and stay inert
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i * cols + j].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut rhs, &mut z, &mut zval, &mut basis, cols, m, i, j);
            }
        }
    }

    // phase 2: real objective, artificial columns frozen at zero
    for v in z.iter_mut() {
        *v = 0.0;
    }
    for j in 0..n {
        z[j] = c[j];
    }
    zval = 0.0;
    for i in 0..m {
        if basis[i] < n {
            let cb = c[basis[i]];
            if cb != 0.0 {
                for j in 0..cols {
                    z[j] -= cb * t[i * cols + j];
                }
                zval += cb * rhs[i];
            }
        }
    }
    for j in n..cols {
        z[j] = f64::NEG_INFINITY; // never re-enter
    }
    if !pivot_until_optimal(&mut t, &mut rhs, &mut z, &mut zval, &mut basis, cols, m) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0f64; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = rhs[i];
        }
    }
    LpOutcome::Optimal { x, objective: zval }
}

/// Runs simplex pivots until no reduced cost is positive. Returns false on
/// an unbounded direction. Bland's rule on both choices prevents cycling.
#[allow(clippy::too_many_arguments)]
fn pivot_until_optimal(
    t: &mut [f64],
    rhs: &mut [f64],
    z: &mut [f64],
    zval: &mut f64,
    basis: &mut [usize],
    cols: usize,
    m: usize,
) -> bool {
    loop {
        let entering = match (0..cols).find(|&j| z[j] > PIVOT_TOL) {
            Some(j) => j,
            None => return true,
        };
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = t[i * cols + entering];
            if aij > PIVOT_TOL {
                let ratio = rhs[i] / aij;
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-12 || (ratio < lr + 1e-12 && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let (row, _) = match leaving {
            Some(l) => l,
            None => return false,
        };
        pivot(t, rhs, z, zval, basis, cols, m, row, entering);
    }
}

#[allow(clippy::too_many_arguments)]
fn pivot(
    t: &mut [f64],
    rhs: &mut [f64],
    z: &mut [f64],
    zval: &mut f64,
    basis: &mut [usize],
    cols: usize,
    m: usize,
    row: usize,
    col: usize,
) {
    let p = t[row * cols + col];
    for j in 0..cols {
        t[row * cols + j] /= p;
    }
    rhs[row] /= p;
    for i in 0..m {
        if i != row {
            let f = t[i * cols + col];
            if f != 0.0 {
                for j in 0..cols {
                    t[i * cols + j] -= f * t[row * cols + j];
                }
                rhs[i] -= f * rhs[row];
            }
        }
    }
    let f = z[col];
    if f != 0.0 && f.is_finite() {
        for j in 0..cols {
            if z[j].is_finite() {
                z[j] -= f * t[row * cols + j];
            }
        }
        *zval += f * rhs[row];
    }
    basis[row] = col;
}
