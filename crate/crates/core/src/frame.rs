//! Deterministic orthonormal frame construction shared by the cone
//! samplers.

use nalgebra::Vector3;

/// Builds a right-handed orthonormal pair `(t1, t2)` perpendicular to the
/// unit vector `n`, so that `(n, t1, t2)` is right-handed.
///
/// The seed axis is the world axis with the smallest `|component|` along
/// `n`, which makes the choice deterministic and continuous away from
/// component ties.
pub(crate) fn orthonormal_tangents(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let abs = n.abs();
    let seed = if abs.x <= abs.y && abs.x <= abs.z {
        Vector3::x()
    } else if abs.y <= abs.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let t1 = (seed - n * seed.dot(n)).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axis_aligned_normal_picks_world_tangents() {
        let (t1, t2) = orthonormal_tangents(&Vector3::z());
        assert_relative_eq!((t1 - Vector3::x()).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((t2 - Vector3::y()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn frame_is_orthonormal_for_generic_normals() {
        let n = Vector3::new(0.3, -0.7, 0.5).normalize();
        let (t1, t2) = orthonormal_tangents(&n);
        assert_relative_eq!(t1.norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(t2.norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(t1.dot(&n), 0.0, epsilon = 1e-12);
        assert_relative_eq!(t2.dot(&n), 0.0, epsilon = 1e-12);
        assert_relative_eq!(t1.dot(&t2), 0.0, epsilon = 1e-12);
        assert_relative_eq!((n.cross(&t1) - t2).norm(), 0.0, epsilon = 1e-12);
    }
}
