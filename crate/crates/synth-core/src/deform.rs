//! Cylindrical bending and rigid rotation of the planar photo mesh.
//!
//! Vertical bending wraps the plane onto a cylinder of radius `r = l / theta`
//! whose axis is parallel to y; arc length along the bent direction is
//! preserved. A point at distance `d = x - l/2` from the mesh center moves
//! to arc angle `phi = d / l * theta`, landing at
//!
//! ```text
//! x' = r * sin(phi)
//! z' = r * (cos(phi) - cos(theta / 2))
//! ```
//!
//! so the two edge columns (`phi = +-theta/2`) stay at `z' = 0`.
//! Horizontal bending is the same construction with the roles of x/l and
//! y/h exchanged.

use alloc::vec::Vec;

use crate::math::{Mat3, Vec3};
use crate::mesher::Mesh3D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error("bending angle must satisfy 0 < theta < 2*pi")]
    InvalidTheta,
    #[error("bending requires a planar (z = 0) input mesh")]
    NotPlanar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BendAxis {
    Vertical,
    Horizontal,
}

/// Intrinsic yaw (about y), pitch (about x), roll (about z), radians.
/// Frame: x right, y down, z depth; positive yaw turns +x toward -z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotationSpec {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl RotationSpec {
    pub fn matrix(&self) -> Mat3 {
        Mat3::rot_y(self.yaw) * Mat3::rot_x(self.pitch) * Mat3::rot_z(self.roll)
    }
}

fn check_theta(theta: f64) -> Result<(), DeformError> {
    if theta > 0.0 && theta < 2.0 * core::f64::consts::PI {
        Ok(())
    } else {
        Err(DeformError::InvalidTheta)
    }
}

fn check_planar(mesh: &Mesh3D) -> Result<(), DeformError> {
    let span = libm::fmax(mesh.extent.0, mesh.extent.1);
    if mesh.vertices.iter().any(|v| libm::fabs(v.z) > 1e-9 * span) {
        return Err(DeformError::NotPlanar);
    }
    Ok(())
}

/// Bent coordinate pair for a point at coordinate `c` along a span of
/// length `len`: returns the in-plane coordinate (recentred about the
/// span middle) and the depth offset.
fn bend_point(c: f64, len: f64, theta: f64) -> (f64, f64) {
    let r = len / theta;
    let phi = (c - len / 2.0) / len * theta;
    (r * libm::sin(phi), r * (libm::cos(phi) - libm::cos(theta / 2.0)))
}

/// Bend about a vertical cylinder axis: x and z change, y is untouched.
/// The output x is recentred about the mesh middle (`x - l/2` at
/// `theta -> 0`).
pub fn bend_vertical(mesh: &Mesh3D, theta: f64) -> Result<Mesh3D, DeformError> {
    check_theta(theta)?;
    check_planar(mesh)?;
    let l = mesh.extent.0;
    let vertices: Vec<Vec3> = mesh
        .vertices
        .iter()
        .map(|v| {
            let (x, z) = bend_point(v.x, l, theta);
            Vec3::new(x, v.y, z)
        })
        .collect();
    Ok(Mesh3D {
        vertices,
        ..mesh.clone()
    })
}

/// Bend about a horizontal cylinder axis: y and z change, x is untouched.
pub fn bend_horizontal(mesh: &Mesh3D, theta: f64) -> Result<Mesh3D, DeformError> {
    check_theta(theta)?;
    check_planar(mesh)?;
    let h = mesh.extent.1;
    let vertices: Vec<Vec3> = mesh
        .vertices
        .iter()
        .map(|v| {
            let (y, z) = bend_point(v.y, h, theta);
            Vec3::new(v.x, y, z)
        })
        .collect();
    Ok(Mesh3D {
        vertices,
        ..mesh.clone()
    })
}

/// Rotate the mesh rigidly about its centroid.
pub fn rotate(mesh: &Mesh3D, rot: &RotationSpec) -> Mesh3D {
    let r = rot.matrix();
    let c = mesh.centroid();
    let vertices: Vec<Vec3> = mesh.vertices.iter().map(|&v| r * (v - c) + c).collect();
    Mesh3D {
        vertices,
        ..mesh.clone()
    }
}
