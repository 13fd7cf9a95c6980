//! Reading and writing of maps and footage as 32-bit float TIFF or
//! OpenEXR, and the LDES file-name convention.
//!
//! Samples are stored raw, without any color management. On disk rows run
//! top to bottom; in memory they are flipped so row 0 is the bottom.

mod filename;
mod openexr;
mod tif;

use std::path::Path;

use thiserror::Error;

pub use filename::{Extension, FilenameError, LdesFilename, MapType};

use crate::types::{FootageMap, FovAngle, ImageBuffer, ImageError, MapError, ViewMap};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("TIFF: {0}")]
    Tiff(#[from] tiff::TiffError),
    #[error("EXR: {0}")]
    Exr(#[from] exr::error::Error),
    #[error("unsupported bit depth: {0}; only 32-bit float is accepted")]
    UnsupportedDepth(String),
    #[error("unsupported channel layout: {0}")]
    UnsupportedLayout(String),
    #[error("`{0}`: unknown image extension, expected .tif, .tiff or .exr")]
    UnknownExtension(String),
    #[error(transparent)]
    Filename(#[from] FilenameError),
    #[error("file name declares a {declared} but the data is a {actual}")]
    MapTypeMismatch { declared: MapType, actual: MapType },
    #[error("file name declares {n}FOV{declared} but the map is labelled {actual}°{an}",
        n = if *.declared_normalized { "n" } else { "" },
        an = if *.actual_normalized { " (normalized)" } else { "" })]
    LabelMismatch { declared: u32, declared_normalized: bool, actual: f64, actual_normalized: bool },
    #[error("map FOV {0}° is not a whole number of degrees; rescale it to its noted FOV before writing")]
    NonWholeFov(f64),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Samples with the row order reversed.
pub(crate) fn flip_rows(image: &ImageBuffer) -> Vec<f32> {
    let row = image.width() * image.channels();
    image.data().chunks_exact(row).rev().flatten().copied().collect()
}

fn extension(path: &Path) -> Result<Extension, IoError> {
    Extension::of_path(path).ok_or_else(|| IoError::UnknownExtension(path.display().to_string()))
}

/// Reads a 32-bit float image of 1 to 4 channels; the format follows the
/// extension.
pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer, IoError> {
    let path = path.as_ref();
    match extension(path)? {
        Extension::Tif => tif::read(path),
        Extension::Exr => openexr::read(path),
    }
}

/// Writes an image as 32-bit float; the format follows the extension.
pub fn write_image(image: &ImageBuffer, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    match extension(path)? {
        Extension::Tif => tif::write(image, path),
        Extension::Exr => openexr::write(image, path),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LdesMap {
    View(ViewMap),
    Footage(FootageMap),
}

impl LdesMap {
    pub fn map_type(&self) -> MapType {
        match self {
            LdesMap::View(_) => MapType::ViewMap,
            LdesMap::Footage(_) => MapType::FootageMap,
        }
    }

    pub fn fov(&self) -> FovAngle {
        match self {
            LdesMap::View(m) => m.fov(),
            LdesMap::Footage(m) => m.fov(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        matches!(self, LdesMap::View(m) if m.is_normalized())
    }

    pub fn image(&self) -> &ImageBuffer {
        match self {
            LdesMap::View(m) => m.image(),
            LdesMap::Footage(m) => m.image(),
        }
    }
}

/// Reads a map; type, FOV and normalization come from the file name.
pub fn read_map(path: impl AsRef<Path>) -> Result<LdesMap, IoError> {
    let path = path.as_ref();
    let name = LdesFilename::from_path(path)?;
    let image = read_image(path)?;
    Ok(match name.map_type {
        MapType::ViewMap => LdesMap::View(ViewMap::new(image, name.fov(), name.normalized)?),
        MapType::FootageMap => LdesMap::Footage(FootageMap::new(image, name.fov())?),
    })
}

pub fn read_view_map(path: impl AsRef<Path>) -> Result<ViewMap, IoError> {
    match read_map(path)? {
        LdesMap::View(m) => Ok(m),
        LdesMap::Footage(_) => Err(IoError::MapTypeMismatch { declared: MapType::FootageMap, actual: MapType::ViewMap }),
    }
}

pub fn read_footage_map(path: impl AsRef<Path>) -> Result<FootageMap, IoError> {
    match read_map(path)? {
        LdesMap::Footage(m) => Ok(m),
        LdesMap::View(_) => Err(IoError::MapTypeMismatch { declared: MapType::ViewMap, actual: MapType::FootageMap }),
    }
}

/// Writes a map. The file name must follow the LDES convention and agree
/// with the map's type, FOV label and normalization.
pub fn write_map(map: &LdesMap, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let name = LdesFilename::from_path(path)?;
    if name.map_type != map.map_type() {
        return Err(IoError::MapTypeMismatch { declared: name.map_type, actual: map.map_type() });
    }
    let fov = map.fov();
    if !fov.is_whole_degrees() {
        return Err(IoError::NonWholeFov(fov.degrees()));
    }
    if name.fov_degrees != fov.noted_degrees() || name.normalized != map.is_normalized() {
        return Err(IoError::LabelMismatch {
            declared: name.fov_degrees,
            declared_normalized: name.normalized,
            actual: fov.degrees(),
            actual_normalized: map.is_normalized(),
        });
    }
    write_image(map.image(), path)
}

pub fn write_view_map(map: &ViewMap, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_map(&LdesMap::View(map.clone()), path)
}

pub fn write_footage_map(map: &FootageMap, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_map(&LdesMap::Footage(map.clone()), path)
}
