//! Lens distortion encoding on a spherical image model.
//!
//! Two kinds of float STMaps describe a lens:
//!
//! - a *view map* has the dimensions of the output frame and stores, per
//!   pixel, the equidistant-space direction that pixel should display,
//!   normalized by a horizontal field of view `Ω` (`Ω·|RG − ½| = θ`);
//! - a *footage map* is a square raster over the equidistant domain whose
//!   values are direct footage coordinates, with alpha marking coverage.
//!
//! Sampling a footage map through a view map ([`resample::bake`]) yields the
//! final STMap that warps footage shot with one lens into the look of
//! another. The [`projection`] module holds the synthetic lens models used to
//! generate maps ([`mapgen`]), [`transform`] holds the map algebra (FOV
//! normalization, blending, rotation, ray export), [`io`] reads and writes
//! maps as 32-bit float TIFF/OpenEXR, and [`calibrate`] fits model
//! parameters to measured correspondences.

// NaN must fail these checks, so `!(x > 0.0)` is kept over `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod io;
pub mod mapgen;
pub mod projection;
pub mod resample;
pub mod transform;
pub mod types;

pub use types::{
    centered_coords, frame_texcoord, BrownConradyParams, FootageMap, FovAngle, ImageBuffer,
    ImageError, MapError, ParamsDocument, ParamsError, ProjectionParams, TexCoord, ViewMap,
};

pub use nalgebra::{Vector2, Vector3};
