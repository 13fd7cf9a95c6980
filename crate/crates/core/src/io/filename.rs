use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::types::FovAngle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilenameError {
    #[error("`{0}`: extension must be .tif or .exr")]
    Extension(String),
    #[error("`{0}`: map type must be ViewMap or FootageMap")]
    MapType(String),
    #[error("`{0}`: description is empty or starts/ends with an underscore")]
    Description(String),
    #[error("`{0}`: FOV token missing; the FOV label (_FOV<degrees> or _nFOV<degrees>) is mandatory")]
    MissingFov(String),
    #[error("`{0}`: FOV must be a whole number of degrees in 1..=360 without leading zeros")]
    FovValue(String),
    #[error("`{0}`: only view maps may carry a normalized (nFOV) label")]
    NormalizedFootageMap(String),
    #[error("path has no UTF-8 file name")]
    NoFileName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapType {
    ViewMap,
    FootageMap,
}

impl MapType {
    pub fn as_str(self) -> &'static str {
        match self {
            MapType::ViewMap => "ViewMap",
            MapType::FootageMap => "FootageMap",
        }
    }
}

impl fmt::Display for MapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    Tif,
    Exr,
}

impl Extension {
    pub fn as_str(self) -> &'static str {
        match self {
            Extension::Tif => "tif",
            Extension::Exr => "exr",
        }
    }

    /// Extension of `path`, accepting `tif`, `tiff` and `exr` in any case.
    pub fn of_path(path: &Path) -> Option<Extension> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "tif" | "tiff" => Some(Extension::Tif),
            "exr" => Some(Extension::Exr),
            _ => None,
        }
    }
}

/// Parsed LDES file name: `<Type>_<Description>_[n]FOV<degrees>.<ext>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdesFilename {
    pub map_type: MapType,
    pub description: String,
    pub fov_degrees: u32,
    pub normalized: bool,
    pub extension: Extension,
}

impl LdesFilename {
    pub fn new(map_type: MapType, description: impl Into<String>, fov: FovAngle, normalized: bool, extension: Extension) -> Self {
        Self { map_type, description: description.into(), fov_degrees: fov.noted_degrees(), normalized, extension }
    }

    pub fn parse(name: &str) -> Result<Self, FilenameError> {
        let err = || name.to_string();
        let (stem, ext) = name.rsplit_once('.').ok_or_else(|| FilenameError::Extension(err()))?;
        let extension = match ext {
            "tif" => Extension::Tif,
            "exr" => Extension::Exr,
            _ => return Err(FilenameError::Extension(err())),
        };
        let (head, fov_token) = stem.rsplit_once('_').ok_or_else(|| FilenameError::MissingFov(err()))?;
        let (normalized, digits) = if let Some(d) = fov_token.strip_prefix("nFOV") {
            (true, d)
        } else if let Some(d) = fov_token.strip_prefix("FOV") {
            (false, d)
        } else {
            return Err(FilenameError::MissingFov(err()));
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(FilenameError::FovValue(err()));
        }
        let fov_degrees: u32 = digits.parse().map_err(|_| FilenameError::FovValue(err()))?;
        if !(1..=360).contains(&fov_degrees) {
            return Err(FilenameError::FovValue(err()));
        }
        let (kind, description) = head.split_once('_').ok_or_else(|| FilenameError::Description(err()))?;
        let map_type = match kind {
            "ViewMap" => MapType::ViewMap,
            "FootageMap" => MapType::FootageMap,
            _ => return Err(FilenameError::MapType(err())),
        };
        if description.is_empty() || description.starts_with('_') || description.ends_with('_') {
            return Err(FilenameError::Description(err()));
        }
        if normalized && map_type == MapType::FootageMap {
            return Err(FilenameError::NormalizedFootageMap(err()));
        }
        Ok(Self { map_type, description: description.to_string(), fov_degrees, normalized, extension })
    }

    /// Parses the final component of `path`.
    pub fn from_path(path: &Path) -> Result<Self, FilenameError> {
        let name = path.file_name().and_then(|n| n.to_str()).ok_or(FilenameError::NoFileName)?;
        Self::parse(name)
    }

    pub fn fov(&self) -> FovAngle {
        FovAngle::from_noted(self.fov_degrees).expect("range checked on construction")
    }
}

impl fmt::Display for LdesFilename {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = if self.normalized { "n" } else { "" };
        write!(f, "{}_{}_{}FOV{}.{}", self.map_type, self.description, n, self.fov_degrees, self.extension.as_str())
    }
}
