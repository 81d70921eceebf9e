//! Deterministic spatial-audio scene workbench.
//!
//! The crate synthesizes first-order-ambisonics (FOA) acoustic scenes with
//! exact ground truth and turns that ground truth into an evaluation stack:
//!
//! - [`sampler`] draws physically valid scene configurations from a seed,
//! - [`acoustics`] computes shoebox room impulse responses (image-source
//!   method) plus Sabine/Schroeder reverberation statistics,
//! - [`render`] encodes directions into B-format gains, convolves dry audio
//!   with the RIRs and mixes the 4-channel scene clip,
//! - [`wav`] reads and writes 4-channel 32-bit-float WAV (ACN/SN3D),
//! - [`rtsd`] builds the validated scene graph and renders the hidden
//!   rich-text scene description (JSON + prose),
//! - [`benchgen`] generates the three-level multiple-choice benchmark with
//!   oracle-verified answer keys,
//! - [`scorer`] parses model responses, computes the weighted reward and the
//!   localization metrics,
//! - [`pipeline`] wires everything into reproducible runs on disk.
//!
//! Everything downstream of a seed is deterministic: the same seed and config
//! produce byte-identical WAV, scene-description and benchmark files.

pub mod acoustics;
pub mod benchgen;
pub mod config;
pub mod geometry;
pub mod pipeline;
pub mod render;
pub mod rng;
pub mod rtsd;
pub mod sampler;
pub mod scorer;
pub mod wav;

pub use config::PipelineConfig;
pub use sampler::{ListenerSpec, RoomSpec, SceneSpec, SourceSpec};
