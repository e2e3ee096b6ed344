//! Grasp pose parameterization: center plus orientation, with conversions
//! between contact-pair form, intrinsic Z-Y-X Euler angles, and unit
//! quaternions.

use nalgebra::{Matrix3, Point3, Rotation3, Unit, UnitQuaternion, Vector3};
#[allow(unused_imports)] // float math trait for no_std builds
use num_traits::Float;

use crate::wrap_angle;

/// A parallel-jaw grasp pose: jaw midpoint and gripper orientation.
///
/// In the gripper frame, x is the closing axis (jaw to jaw), z is the
/// approach direction, and y completes the right-handed frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grasp {
    pub center: Point3<f64>,
    pub orientation: UnitQuaternion<f64>,
    pub width: Option<f64>,
    pub score: Option<f64>,
}

impl Grasp {
    pub fn new(center: Point3<f64>, orientation: UnitQuaternion<f64>) -> Grasp {
        Grasp {
            center,
            orientation,
            width: None,
            score: None,
        }
    }

    /// The grasp after a rigid motion `p -> q p + t`.
    pub fn transformed(&self, q: &UnitQuaternion<f64>, t: &Vector3<f64>) -> Grasp {
        Grasp {
            center: q * self.center + t,
            orientation: canonical_quat(q * self.orientation),
            width: self.width,
            score: self.score,
        }
    }
}

/// A grasp in contact form: two jaw contacts plus a pitch angle about the
/// closing axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactGrasp {
    pub c1: Point3<f64>,
    pub c2: Point3<f64>,
    pub pitch: f64,
}

/// Intrinsic Z-Y-X Euler angles: yaw about z, then pitch about the new y,
/// then roll about the new x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerAngles {
    /// All three components wrapped into `(-pi, pi]`.
    pub fn wrapped(self) -> EulerAngles {
        EulerAngles {
            roll: wrap_angle(self.roll),
            pitch: wrap_angle(self.pitch),
            yaw: wrap_angle(self.yaw),
        }
    }
}

/// Failure modes of grasp construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraspError {
    /// Contacts too close together to define a closing axis.
    CoincidentContacts,
}

impl core::fmt::Display for GraspError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GraspError::CoincidentContacts => {
                write!(f, "contacts coincide; closing axis undefined")
            }
        }
    }
}

impl core::error::Error for GraspError {}

/// Flips a quaternion into the canonical hemisphere: scalar part positive,
/// or scalar zero with the first nonzero vector component positive.
pub fn canonical_quat(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    let c = q.coords; // (x, y, z, w) storage order
    let flip = if c.w != 0.0 {
        c.w < 0.0
    } else if c.x != 0.0 {
        c.x < 0.0
    } else if c.y != 0.0 {
        c.y < 0.0
    } else {
        c.z < 0.0
    };
    if flip {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    }
}

/// Converts intrinsic Z-Y-X Euler angles to a canonical unit quaternion.
pub fn euler_to_quat(e: &EulerAngles) -> UnitQuaternion<f64> {
    let qz = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), e.yaw);
    let qy = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), e.pitch);
    let qx = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), e.roll);
    canonical_quat(qz * qy * qx)
}

/// Extracts intrinsic Z-Y-X Euler angles from a quaternion.
///
/// Pitch lies in `[-pi/2, pi/2]`; roll and yaw lie in `(-pi, pi]`. At the
/// gimbal singularity (pitch of exactly half pi in magnitude) the roll and
/// yaw axes coincide and the convention roll = 0 is used, with yaw
/// absorbing the full rotation.
pub fn quat_to_euler(q: &UnitQuaternion<f64>) -> EulerAngles {
    let q = canonical_quat(*q);
    let (x, y, z, w) = (q.coords.x, q.coords.y, q.coords.z, q.coords.w);
    let sinp = 2.0 * (w * y - x * z);
    if sinp.abs() >= 1.0 - 1e-12 {
        EulerAngles {
            roll: 0.0,
            pitch: if sinp > 0.0 {
                core::f64::consts::FRAC_PI_2
            } else {
                -core::f64::consts::FRAC_PI_2
            },
            yaw: wrap_angle(2.0 * z.atan2(w)),
        }
    } else {
        EulerAngles {
            roll: wrap_angle((2.0 * (w * x + y * z)).atan2(1.0 - 2.0 * (x * x + y * y))),
            pitch: sinp.asin(),
            yaw: wrap_angle((2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z))),
        }
    }
}

/// Tolerance on the closing axis alignment with gravity below which the
/// approach datum falls back from gravity to the world x-axis.
const DATUM_FALLBACK_TOL: f64 = 1e-6;

/// Builds the grasp pose for a contact pair and pitch angle.
///
/// The closing axis runs from `c1` to `c2`. The approach direction at zero
/// pitch is world down projected onto the plane normal to the closing
/// axis; `pitch` then rotates the approach about the closing axis. When the
/// closing axis is within `1e-6` of vertical the datum degenerates and the
/// world x-axis is projected instead.
pub fn contacts_to_grasp(cg: &ContactGrasp) -> Result<Grasp, GraspError> {
    let axis = cg.c2 - cg.c1;
    let width = axis.norm();
    if width < 1e-6 {
        return Err(GraspError::CoincidentContacts);
    }
    let x = axis / width;
    let down = Vector3::new(0.0, 0.0, -1.0);
    let mut datum = down - x * down.dot(&x);
    if datum.norm() < DATUM_FALLBACK_TOL {
        let fallback = Vector3::new(1.0, 0.0, 0.0);
        datum = fallback - x * fallback.dot(&x);
    }
    let datum = datum.normalize();
    let z = UnitQuaternion::from_axis_angle(&Unit::new_unchecked(x), cg.pitch) * datum;
    let y = z.cross(&x);
    let rot = Rotation3::from_matrix_unchecked(Matrix3::from_columns(&[x, y, z]));
    Ok(Grasp {
        center: Point3::from((cg.c1.coords + cg.c2.coords) / 2.0),
        orientation: canonical_quat(UnitQuaternion::from_rotation_matrix(&rot)),
        width: Some(width),
        score: None,
    })
}
