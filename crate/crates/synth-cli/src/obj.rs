//! Wavefront OBJ export of deformed meshes, for visual inspection.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use synth_core::mesher::Mesh3D;

pub fn to_obj_string(mesh: &Mesh3D) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        writeln!(s, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for uv in &mesh.uvs {
        writeln!(s, "vt {} {}", uv.x, uv.y).unwrap();
    }
    for t in &mesh.triangles {
        // OBJ indices are 1-based; vertex and texture indices coincide
        writeln!(
            s,
            "f {0}/{0} {1}/{1} {2}/{2}",
            t[0] + 1,
            t[1] + 1,
            t[2] + 1
        )
        .unwrap();
    }
    s
}

pub fn write_obj(path: &Path, mesh: &Mesh3D) -> Result<()> {
    std::fs::write(path, to_obj_string(mesh))
        .with_context(|| format!("cannot write mesh {path:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use synth_core::mesher::build_planar_mesh;

    #[test]
    fn counts_and_one_based_faces() {
        let mesh = build_planar_mesh((10.0, 8.0), (3, 2)).unwrap();
        let s = to_obj_string(&mesh);
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 6);
        assert_eq!(s.lines().filter(|l| l.starts_with("vt ")).count(), 6);
        assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 4);
        assert!(!s.contains(" 0/"));
    }
}
