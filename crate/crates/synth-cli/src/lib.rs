//! IO, file formats and batch orchestration around `synth-core`.

pub mod annot;
pub mod config;
pub mod imageio;
pub mod manifest;
pub mod obj;
pub mod pipeline;
pub mod scores;
