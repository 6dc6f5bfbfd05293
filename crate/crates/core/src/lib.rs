//! Error-bounded lossy compression for 2D time-varying vector fields that
//! keeps every critical point trajectory intact.
//!
//! The field is lifted to a space-time tetrahedral mesh; each triangular face
//! is tested exactly (fixed-point integers, Simulation of Simplicity) for a
//! zero of the piecewise-linear field. The encoder stores vertices of faces
//! holding a zero exactly and bounds every other vertex tightly enough that no
//! face test can change, so the decompressed field has the same critical
//! points and the same trajectories.
//!
//! ```no_run
//! use vfcp::{codec, synth, track, field::Dims};
//!
//! let dims = Dims::new(64, 64, 16).unwrap();
//! let f = synth::gen_synthetic(synth::SynthKind::MovingVortex, dims, &Default::default(), 1).unwrap();
//! let eps = codec::ErrorBound::Relative(0.01).resolve(&f).unwrap();
//! let archive = codec::compress(&f, eps, &codec::CodecConfig::default()).unwrap();
//! let g = codec::decompress(archive.as_bytes()).unwrap();
//! let report = track::verify(&f, &g, Some(archive.len()), Some(archive.header().unwrap().scale)).unwrap();
//! assert!(report.passed());
//! ```

pub mod codec;
pub mod eb;
pub mod error;
pub mod field;
pub mod mesh;
pub mod mop;
pub mod predicates;
pub mod predict;
pub mod synth;
pub mod track;

pub use codec::{compress, decompress, Archive, CodecConfig, ErrorBound, Predictor};
pub use error::{Error, Result};
pub use field::{
    load_raw, psnr, to_fixed, write_raw, Dims, FieldSeries, FixedField, QualityReport, Scale,
    Spacing,
};
pub use track::{extract_trajectories, verify, TrajectoryGraph, VerifyReport};
