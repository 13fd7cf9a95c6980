use thiserror::Error;

use super::{FovAngle, ImageBuffer, ImageError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("field of view {0} is outside (0, 2π] rad / (0, 360] deg")]
    InvalidFov(f64),
    #[error("view maps carry 2 or 3 channels (RG plus optional vignette), got {0}")]
    ViewMapChannels(usize),
    #[error("footage maps carry 4 channels (R=s, G=t, B=0, A=coverage), got {0}")]
    FootageMapChannels(usize),
    #[error("footage maps are square, got {width}x{height}")]
    NotSquare { width: usize, height: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Output-frame map whose RG channels encode equidistant-space directions
/// normalized by `fov` (`Ω·|RG − ½| = θ`). A third channel, when present,
/// holds linear-light vignette.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewMap {
    image: ImageBuffer,
    fov: FovAngle,
    normalized: bool,
}

impl ViewMap {
    pub fn new(image: ImageBuffer, fov: FovAngle, normalized: bool) -> Result<Self, MapError> {
        if !(2..=3).contains(&image.channels()) {
            return Err(MapError::ViewMapChannels(image.channels()));
        }
        Ok(Self { image, fov, normalized })
    }

    pub fn image(&self) -> &ImageBuffer {
        &self.image
    }

    pub fn into_image(self) -> ImageBuffer {
        self.image
    }

    pub fn fov(&self) -> FovAngle {
        self.fov
    }

    /// Set when the encoded FOV was rescaled to a common value (`nFOV` label).
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn has_vignette(&self) -> bool {
        self.image.channels() == 3
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }
}

/// Square map over the equidistant domain: RG are footage texture
/// coordinates, A is 1 where the direction lands on the footage.
#[derive(Debug, Clone, PartialEq)]
pub struct FootageMap {
    image: ImageBuffer,
    fov: FovAngle,
}

impl FootageMap {
    pub fn new(image: ImageBuffer, fov: FovAngle) -> Result<Self, MapError> {
        if image.channels() != 4 {
            return Err(MapError::FootageMapChannels(image.channels()));
        }
        if image.width() != image.height() {
            return Err(MapError::NotSquare { width: image.width(), height: image.height() });
        }
        Ok(Self { image, fov })
    }

    pub fn image(&self) -> &ImageBuffer {
        &self.image
    }

    pub fn into_image(self) -> ImageBuffer {
        self.image
    }

    pub fn fov(&self) -> FovAngle {
        self.fov
    }

    pub fn size(&self) -> usize {
        self.image.width()
    }

    /// Fraction of the square marked as covered.
    pub fn coverage(&self) -> f64 {
        let n = self.image.data().chunks_exact(4).filter(|p| p[3] > 0.5).count();
        n as f64 / (self.size() * self.size()) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_map_channel_contract() {
        let fov = FovAngle::from_noted(90).unwrap();
        for c in [1, 4] {
            let img = ImageBuffer::filled(4, 2, c, 0.5).unwrap();
            assert_eq!(ViewMap::new(img, fov, false).unwrap_err(), MapError::ViewMapChannels(c));
        }
        let v = ViewMap::new(ImageBuffer::filled(4, 2, 3, 0.5).unwrap(), fov, true).unwrap();
        assert!(v.has_vignette() && v.is_normalized());
    }

    #[test]
    fn footage_map_contract() {
        let fov = FovAngle::from_noted(180).unwrap();
        let rgb = ImageBuffer::filled(4, 4, 3, 0.5).unwrap();
        assert_eq!(FootageMap::new(rgb, fov).unwrap_err(), MapError::FootageMapChannels(3));
        let wide = ImageBuffer::filled(8, 4, 4, 0.5).unwrap();
        assert!(matches!(FootageMap::new(wide, fov), Err(MapError::NotSquare { .. })));
        let ok = FootageMap::new(ImageBuffer::filled(4, 4, 4, 1.0).unwrap(), fov).unwrap();
        assert_eq!(ok.coverage(), 1.0);
    }
}
