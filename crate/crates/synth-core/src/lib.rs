//! Core geometry and rendering for printed-photo spoof synthesis.
//!
//! The crate turns an annotated printed-photo region into a textured 3D
//! planar mesh, bends it into a cylinder section, rotates it, projects it
//! through a pinhole camera and rasterizes it back into an image layer
//! with a Z-buffer. It also carries the dataset-side machinery: balanced
//! mini-batch schedules and presentation-attack metrics (APCER, BPCER,
//! ACER, EER, HTER).
//!
//! Everything here is pure and deterministic; IO, file formats and the
//! CLI live in the companion `synth-cli` crate. The crate is `no_std`
//! (with `alloc`), so float math goes through [`libm`].

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod camera;
pub mod composite;
pub mod deform;
pub mod homography;
pub mod image;
pub mod math;
pub mod mesher;
pub mod metrics;
pub mod raster;
pub mod schedule;

pub use camera::{CameraModel, ProjectedMesh};
pub use composite::CompositeConfig;
pub use deform::{BendAxis, RotationSpec};
pub use homography::Homography;
pub use image::RgbImage;
pub use mesher::{Mesh3D, Quad};
pub use raster::RenderLayer;
