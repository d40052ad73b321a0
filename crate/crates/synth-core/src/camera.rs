//! Pinhole camera calibration and projection.
//!
//! The pixel scale `s = d_p / d_r` converts between image pixels and
//! millimetres using the annotated eye pixel distance `d_p` and the real
//! inter-eye distance `d_r`. Perspective projection divides by each
//! vertex's own depth; weak perspective shares the mean depth across all
//! vertices.

use alloc::vec::Vec;

use crate::math::{Vec2, Vec3};
use crate::mesher::Mesh3D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CameraError {
    #[error("distances and scales must be strictly positive")]
    NonPositiveDistance,
    #[error("all vertices must lie strictly in front of the camera")]
    BehindCamera,
}

/// Calibration bundle: focal length (px), standoff depth (mm), real
/// inter-eye distance (mm) and the derived pixel scale (px/mm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub f: f64,
    pub d_z: f64,
    pub d_r: f64,
    pub s: f64,
}

impl CameraModel {
    /// `f_px = None` selects the synthesis calibration `f = s * d_z`,
    /// under which the unbent, unrotated photo reprojects onto its
    /// original pixel footprint.
    pub fn new(
        eye_px_dist: f64,
        d_r: f64,
        d_z: f64,
        f_px: Option<f64>,
    ) -> Result<CameraModel, CameraError> {
        let s = pixel_scale(eye_px_dist, d_r)?;
        if !(d_z > 0.0) {
            return Err(CameraError::NonPositiveDistance);
        }
        let f = f_px.unwrap_or(s * d_z);
        if !(f > 0.0) {
            return Err(CameraError::NonPositiveDistance);
        }
        Ok(CameraModel { f, d_z, d_r, s })
    }
}

/// Projected mesh: per-vertex 2D position (px, relative to the principal
/// point), retained depth for the Z-buffer, shared uvs and triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedMesh {
    pub points: Vec<Vec2>,
    pub depths: Vec<f64>,
    pub uvs: Vec<Vec2>,
    pub triangles: Vec<[u32; 3]>,
}

/// Scale factor from image space to world space: `s = d_p / d_r`.
pub fn pixel_scale(d_p: f64, d_r: f64) -> Result<f64, CameraError> {
    if d_p > 0.0 && d_r > 0.0 {
        Ok(d_p / d_r)
    } else {
        Err(CameraError::NonPositiveDistance)
    }
}

/// Move a pixel-unit mesh into world coordinates: scale by `1/s` into mm,
/// then translate so the centroid sits on the optical axis at depth `d_z`.
pub fn to_world(mesh: &Mesh3D, s: f64, d_z: f64) -> Result<Mesh3D, CameraError> {
    if !(s > 0.0) || !(d_z > 0.0) {
        return Err(CameraError::NonPositiveDistance);
    }
    let inv = 1.0 / s;
    let c = mesh.centroid() * inv;
    let vertices: Vec<Vec3> = mesh
        .vertices
        .iter()
        .map(|&v| {
            let w = v * inv;
            Vec3::new(w.x - c.x, w.y - c.y, w.z - c.z + d_z)
        })
        .collect();
    Ok(Mesh3D {
        vertices,
        extent: (mesh.extent.0 * inv, mesh.extent.1 * inv),
        ..mesh.clone()
    })
}

/// Perspective projection with per-vertex depth: `b = v_xy * (f / v_z)`.
pub fn project_perspective(mesh: &Mesh3D, f: f64) -> Result<ProjectedMesh, CameraError> {
    if mesh.vertices.iter().any(|v| !(v.z > 0.0)) {
        return Err(CameraError::BehindCamera);
    }
    let points = mesh
        .vertices
        .iter()
        .map(|v| v.xy() * (f / v.z))
        .collect();
    Ok(ProjectedMesh {
        points,
        depths: mesh.vertices.iter().map(|v| v.z).collect(),
        uvs: mesh.uvs.clone(),
        triangles: mesh.triangles.clone(),
    })
}

/// Weak perspective projection: one shared mean depth for every vertex.
pub fn project_weak(mesh: &Mesh3D, f: f64) -> Result<ProjectedMesh, CameraError> {
    let n = mesh.vertices.len() as f64;
    let mean_z: f64 = mesh.vertices.iter().map(|v| v.z).sum::<f64>() / n;
    if !(mean_z > 0.0) {
        return Err(CameraError::BehindCamera);
    }
    let points = mesh
        .vertices
        .iter()
        .map(|v| v.xy() * (f / mean_z))
        .collect();
    Ok(ProjectedMesh {
        points,
        depths: mesh.vertices.iter().map(|v| v.z).collect(),
        uvs: mesh.uvs.clone(),
        triangles: mesh.triangles.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::{rotate, RotationSpec};
    use crate::mesher::build_planar_mesh;

    #[test]
    fn pixel_scale_examples() {
        assert!((pixel_scale(80.0, 63.0).unwrap() - 1.2698412698412698).abs() < 1e-12);
        assert_eq!(pixel_scale(63.0, 63.0).unwrap(), 1.0);
        assert_eq!(pixel_scale(0.0, 63.0), Err(CameraError::NonPositiveDistance));
        assert_eq!(pixel_scale(80.0, -1.0), Err(CameraError::NonPositiveDistance));
    }

    #[test]
    fn to_world_places_planar_mesh_at_depth() {
        let mesh = build_planar_mesh((200.0, 100.0), (4, 4)).unwrap();
        let world = to_world(&mesh, 2.0, 1000.0).unwrap();
        for v in &world.vertices {
            assert_eq!(v.z, 1000.0);
        }
        let c = world.centroid();
        assert!(c.x.abs() < 1e-9 && c.y.abs() < 1e-9);
        assert_eq!(world.extent, (100.0, 50.0));
    }

    #[test]
    fn to_world_unit_scale_keeps_shape() {
        let mesh = build_planar_mesh((10.0, 10.0), (3, 3)).unwrap();
        let world = to_world(&mesh, 1.0, 500.0).unwrap();
        let c = world.centroid();
        assert!((c.x, c.y, c.z) == (0.0, 0.0, 500.0));
    }

    #[test]
    fn perspective_projection_arithmetic() {
        let mut mesh = build_planar_mesh((10.0, 10.0), (2, 2)).unwrap();
        mesh.vertices[0] = crate::math::Vec3::new(10.0, -4.0, 1000.0);
        for v in mesh.vertices.iter_mut().skip(1) {
            v.z = 1000.0;
        }
        let pm = project_perspective(&mesh, 500.0).unwrap();
        assert!((pm.points[0].x - 5.0).abs() < 1e-12);
        assert!((pm.points[0].y + 2.0).abs() < 1e-12);
    }

    #[test]
    fn optical_axis_is_fixed_point() {
        let mut mesh = build_planar_mesh((10.0, 10.0), (2, 2)).unwrap();
        for v in mesh.vertices.iter_mut() {
            *v = crate::math::Vec3::new(0.0, 0.0, 321.0);
        }
        let pm = project_perspective(&mesh, 777.0).unwrap();
        for p in &pm.points {
            assert_eq!((p.x, p.y), (0.0, 0.0));
        }
    }

    #[test]
    fn doubling_f_and_depth_is_invariant() {
        let mesh = to_world(&build_planar_mesh((60.0, 40.0), (4, 3)).unwrap(), 1.0, 400.0).unwrap();
        let rot = rotate(&mesh, &RotationSpec { yaw: 0.4, pitch: -0.1, roll: 0.0 });
        let a = project_perspective(&rot, 500.0).unwrap();
        let doubled = Mesh3D {
            vertices: rot.vertices.iter().map(|v| crate::math::Vec3::new(v.x, v.y, 2.0 * v.z)).collect(),
            ..rot.clone()
        };
        let b = project_perspective(&doubled, 1000.0).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.x - q.x).abs() < 1e-9 && (p.y - q.y).abs() < 1e-9);
        }
    }

    #[test]
    fn weak_equals_perspective_at_constant_depth() {
        let mesh = to_world(&build_planar_mesh((60.0, 40.0), (5, 5)).unwrap(), 1.0, 400.0).unwrap();
        let a = project_perspective(&mesh, 500.0).unwrap();
        let b = project_weak(&mesh, 500.0).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
        }
    }

    #[test]
    fn weak_differs_from_perspective_when_rotated() {
        // direct evaluation of both formulas on a 5x5 mesh
        let mesh = to_world(&build_planar_mesh((60.0, 40.0), (5, 5)).unwrap(), 1.0, 400.0).unwrap();
        let rot = rotate(&mesh, &RotationSpec { yaw: 30.0_f64.to_radians(), ..Default::default() });
        let f = 500.0;
        let a = project_perspective(&rot, f).unwrap();
        let b = project_weak(&rot, f).unwrap();
        let mean_z: f64 = rot.vertices.iter().map(|v| v.z).sum::<f64>() / 25.0;
        let mut max_disc = 0.0_f64;
        for (i, v) in rot.vertices.iter().enumerate() {
            let persp = v.xy() * (f / v.z);
            let weak = v.xy() * (f / mean_z);
            assert!((a.points[i] - persp).norm() < 1e-12);
            assert!((b.points[i] - weak).norm() < 1e-12);
            max_disc = max_disc.max((persp - weak).norm());
        }
        assert!(max_disc > 0.1, "depth spread must separate the projections");
    }

    #[test]
    fn behind_camera_rejected() {
        let mesh = build_planar_mesh((60.0, 40.0), (3, 3)).unwrap(); // z = 0
        assert_eq!(project_perspective(&mesh, 500.0), Err(CameraError::BehindCamera));
        assert_eq!(project_weak(&mesh, 500.0), Err(CameraError::BehindCamera));
    }
}
