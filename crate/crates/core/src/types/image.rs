use nalgebra::Vector2;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroSize { width: usize, height: usize },
    #[error("unsupported channel count {0}, expected 1 to 4")]
    Channels(usize),
    #[error("sample buffer holds {actual} values, expected {expected}")]
    Length { expected: usize, actual: usize },
    #[error("non-finite sample at pixel ({x}, {y}), channel {channel}")]
    NonFinite { x: usize, y: usize, channel: usize },
}

/// A `width × height × channels` raster of 32-bit float samples.
///
/// Rows are stored bottom-to-top: row 0 is the bottom scanline.
#[derive(Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

fn check_shape(width: usize, height: usize, channels: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroSize { width, height });
    }
    if !(1..=4).contains(&channels) {
        return Err(ImageError::Channels(channels));
    }
    Ok(())
}

impl ImageBuffer {
    /// A buffer with every sample set to `value`.
    pub fn filled(
        width: usize,
        height: usize,
        channels: usize,
        value: f32,
    ) -> Result<Self, ImageError> {
        check_shape(width, height, channels)?;
        Ok(Self { width, height, channels, data: vec![value; width * height * channels] })
    }

    /// Wraps existing samples. Rejects wrong lengths and non-finite values.
    pub fn from_vec(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f32>,
    ) -> Result<Self, ImageError> {
        check_shape(width, height, channels)?;
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::Length { expected, actual: data.len() });
        }
        let buf = Self { width, height, channels, data };
        buf.check_finite()?;
        Ok(buf)
    }

    /// Builds a buffer by evaluating `f(x, y, pixel)` for every pixel in parallel.
    ///
    /// `pixel` arrives zeroed. Non-finite results are rejected.
    pub fn from_fn<F>(width: usize, height: usize, channels: usize, f: F) -> Result<Self, ImageError>
    where
        F: Fn(usize, usize, &mut [f32]) + Sync,
    {
        check_shape(width, height, channels)?;
        let mut data = vec![0.0f32; width * height * channels];
        data.par_chunks_mut(width * channels).enumerate().for_each(|(y, row)| {
            for (x, px) in row.chunks_exact_mut(channels).enumerate() {
                f(x, y, px);
            }
        });
        let buf = Self { width, height, channels, data };
        buf.check_finite()?;
        Ok(buf)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    /// Width over height.
    pub fn aspect(&self) -> f64 {
        self.width as f64 / self.height as f64
    }

    /// Samples of pixel `(x, y)`, `y` counted from the bottom row.
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[f32] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    /// Texture coordinate of the center of pixel `(x, y)`.
    #[inline]
    pub fn texcoord(&self, x: usize, y: usize) -> TexCoord {
        TexCoord::pixel_center(x, y, self.width, self.height)
    }

    fn check_finite(&self) -> Result<(), ImageError> {
        match self.data.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => {
                let channel = i % self.channels;
                let p = i / self.channels;
                Err(ImageError::NonFinite { x: p % self.width, y: p / self.width, channel })
            }
        }
    }
}

/// Normalized texture coordinate: `(0, 0)` is the bottom-left corner of the
/// frame and `(1, 1)` the top-right. Values outside `[0, 1]²` are legal and
/// denote off-frame positions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TexCoord {
    pub s: f64,
    pub t: f64,
}

impl TexCoord {
    pub const CENTER: TexCoord = TexCoord { s: 0.5, t: 0.5 };

    pub fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }

    #[inline]
    pub fn pixel_center(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { s: (x as f64 + 0.5) / width as f64, t: (y as f64 + 0.5) / height as f64 }
    }

    pub fn in_frame(&self) -> bool {
        (0.0..=1.0).contains(&self.s) && (0.0..=1.0).contains(&self.t)
    }

    pub fn clamped(&self) -> Self {
        Self { s: self.s.clamp(0.0, 1.0), t: self.t.clamp(0.0, 1.0) }
    }
}

/// Image-space vector of the center of pixel `(x, y)`, measured from the
/// frame center. The horizontal half-width maps to 1 and the vertical
/// half-extent to `1 / aspect`.
#[inline]
pub fn centered_coords(x: usize, y: usize, width: usize, height: usize, aspect: f64) -> Vector2<f64> {
    // (2i + 1 − n) / n is exactly odd under mirroring
    let sx = (2.0 * x as f64 + 1.0 - width as f64) / width as f64;
    let sy = (2.0 * y as f64 + 1.0 - height as f64) / height as f64;
    Vector2::new(sx, sy / aspect)
}

/// Inverse of the centering convention: image-space vector to frame texture
/// coordinate.
#[inline]
pub fn frame_texcoord(v: Vector2<f64>, aspect: f64) -> TexCoord {
    TexCoord { s: 0.5 * (v.x + 1.0), t: 0.5 * (v.y * aspect + 1.0) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_pixel_of_odd_buffer_is_origin() {
        let v = centered_coords(2, 1, 5, 3, 5.0 / 3.0);
        assert_eq!(v, Vector2::new(0.0, 0.0));
    }

    #[test]
    fn four_by_two_corner_pixel() {
        // s = 0.125, t = 0.25, aspect 2: v = (2·0.125 − 1, (2·0.25 − 1)/2)
        let v = centered_coords(0, 0, 4, 2, 2.0);
        assert_eq!(v, Vector2::new(-0.75, -0.25));
    }

    #[test]
    fn rightmost_column_approaches_unit_half_width() {
        let w = 1 << 20;
        let v = centered_coords(w - 1, 0, w, 1, w as f64);
        assert!((v.x - 1.0).abs() < 1e-6);
    }

    #[test]
    fn odd_symmetry_for_even_dimensions() {
        let (w, h) = (8, 6);
        let aspect = w as f64 / h as f64;
        for y in 0..h {
            for x in 0..w {
                let a = centered_coords(x, y, w, h, aspect);
                let b = centered_coords(w - 1 - x, h - 1 - y, w, h, aspect);
                assert_eq!(a, -b);
            }
        }
    }

    #[test]
    fn frame_texcoord_inverts_centering() {
        let v = centered_coords(3, 1, 8, 6, 8.0 / 6.0);
        let tc = frame_texcoord(v, 8.0 / 6.0);
        let expect = TexCoord::pixel_center(3, 1, 8, 6);
        assert!((tc.s - expect.s).abs() < 1e-15 && (tc.t - expect.t).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes_and_non_finite() {
        assert!(matches!(ImageBuffer::filled(0, 2, 1, 0.0), Err(ImageError::ZeroSize { .. })));
        assert!(matches!(ImageBuffer::filled(2, 2, 5, 0.0), Err(ImageError::Channels(5))));
        assert!(matches!(
            ImageBuffer::from_vec(2, 2, 1, vec![0.0; 3]),
            Err(ImageError::Length { expected: 4, actual: 3 })
        ));
        let err = ImageBuffer::from_vec(2, 2, 2, vec![0.0, 0.0, 0.0, 0.0, 0.0, f32::NAN, 0.0, 0.0])
            .unwrap_err();
        assert_eq!(err, ImageError::NonFinite { x: 0, y: 1, channel: 1 });
    }

    #[test]
    fn from_fn_row_zero_is_bottom() {
        let img = ImageBuffer::from_fn(3, 2, 1, |_, y, px| px[0] = y as f32).unwrap();
        assert_eq!(img.pixel(0, 0), &[0.0]);
        assert_eq!(img.pixel(2, 1), &[1.0]);
        assert_eq!(img.data().len(), 6);
    }
}
