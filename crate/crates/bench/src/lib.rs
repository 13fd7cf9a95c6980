//! Shared fixtures for the pipeline benchmarks.

use ldes_core::calibrate::Correspondence;
use ldes_core::projection::forward_model;
use ldes_core::{FovAngle, ImageBuffer, ProjectionParams, TexCoord, Vector2};

fn fov(degrees: f64) -> FovAngle {
    FovAngle::from_degrees(degrees).expect("valid FOV")
}

/// Anamorphic wide-angle lens in a 16:9 frame.
pub fn anamorphic() -> ProjectionParams {
    ProjectionParams::spherical(fov(140.0), 0.25, 16.0 / 9.0).with_squeeze(1.5)
}

/// Equisolid fisheye on a square sensor.
pub fn fisheye() -> ProjectionParams {
    ProjectionParams::spherical(fov(180.0), -0.5, 1.0)
}

/// Three-channel checkerboard with a gradient.
pub fn checkerboard(width: usize, height: usize, cells: usize) -> ImageBuffer {
    ImageBuffer::from_fn(width, height, 3, |x, y, px| {
        let on = (x * cells / width + y * cells / height).is_multiple_of(2);
        let base = if on { 0.9 } else { 0.1 };
        px[0] = base;
        px[1] = base * x as f32 / width as f32;
        px[2] = base * y as f32 / height as f32;
    })
    .expect("non-empty image")
}

/// `n` noise-free correspondences on a regular grid over the frame.
pub fn correspondences(params: &ProjectionParams, n: usize) -> Vec<Correspondence> {
    let side = (n as f64).sqrt().ceil() as usize;
    let mut out = Vec::with_capacity(n);
    for j in 0..side {
        for i in 0..side {
            let tc = TexCoord::new((i as f64 + 0.5) / side as f64, (j as f64 + 0.5) / side as f64);
            let v = Vector2::new(2.0 * tc.s - 1.0, (2.0 * tc.t - 1.0) / params.aspect);
            if let Ok(d) = forward_model(v, params) {
                out.extend(Correspondence::new(tc, d.to_unit_vector(), 1.0));
            }
        }
    }
    out.truncate(n);
    out
}
