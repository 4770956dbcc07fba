//! IO, file formats, and command plumbing around `ptd-core`: binary frame
//! matrices (FMAT), PGM frames, CSV/SVG artifacts, flat key-value configs,
//! and run manifests that make every invocation reproducible.

pub mod commands;
pub mod csvio;
pub mod error;
pub mod fmat;
pub mod kv;
pub mod pgm;
pub mod svg;
