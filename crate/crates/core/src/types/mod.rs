//! Shared domain types and coordinate conventions.
//!
//! Conventions used everywhere in the crate:
//!
//! - rasters are stored row-major with row 0 at the **bottom** of the frame;
//! - texture coordinates have their origin at the bottom-left, `t` pointing up;
//! - pixel `i` of an `n`-wide axis has its center at `(i + ½) / n`;
//! - image-space vectors measure from the frame center with the horizontal
//!   half-width normalized to 1 and the vertical half-extent `1 / aspect`.

mod fov;
mod image;
mod maps;
mod params;

pub use fov::FovAngle;
pub use image::{centered_coords, frame_texcoord, ImageBuffer, ImageError, TexCoord};
pub use maps::{FootageMap, MapError, ViewMap};
pub use params::{BrownConradyParams, ParamsDocument, ParamsError, ProjectionParams};
