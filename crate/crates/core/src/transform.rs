//! Map algebra on view maps: FOV normalization, tile scaling, opacity
//! blending, ray export and camera rotation.
//!
//! Rays use a left-handed frame: x right, y up, z along the optical axis.

use nalgebra::{Rotation3, Vector3};
use thiserror::Error;

use crate::projection::SphericalDirection;
use crate::types::{FovAngle, ImageBuffer, MapError, TexCoord, ViewMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("view maps differ in size: {a:?} vs {b:?}")]
    DimensionMismatch { a: (usize, usize, usize), b: (usize, usize, usize) },
    #[error("view maps carry different FOV labels ({a}° vs {b}°); normalize them to a common FOV first")]
    FovMismatch { a: f64, b: f64 },
    #[error("opacity {0} outside [0, 1]")]
    Opacity(f64),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Scale applied to view-map coordinates when sampling a footage map of a
/// different FOV: `Ω_view / Ω_footage`.
pub fn tile_scale(omega_view: f64, omega_footage: f64) -> f64 {
    omega_view / omega_footage
}

/// `(u − ½)·scale + ½` on both coordinates.
#[inline]
pub fn apply_tile_scale(u: TexCoord, scale: f64) -> TexCoord {
    TexCoord { s: (u.s - 0.5) * scale + 0.5, t: (u.t - 0.5) * scale + 0.5 }
}

fn map_rg(vmap: &ViewMap, f: impl Fn(f64, f64) -> (f64, f64) + Sync) -> Result<ImageBuffer, MapError> {
    let img = vmap.image();
    Ok(ImageBuffer::from_fn(img.width(), img.height(), img.channels(), |x, y, px| {
        let src = img.pixel(x, y);
        let (r, g) = f(src[0] as f64, src[1] as f64);
        px[0] = r as f32;
        px[1] = g as f32;
        px[2..].copy_from_slice(&src[2..]);
    })?)
}

/// Rescales the encoded coordinates to a common FOV:
/// `RG' = (Ω_map/Ω_common)(RG − ½) + ½`. Each pixel keeps its polar angle.
///
/// Values may leave `[0, 1]` when `omega_common` is smaller than the largest
/// encoded angle; see [`exceeds_unit_square`].
pub fn normalize_fov(vmap: &ViewMap, omega_common: FovAngle) -> Result<ViewMap, TransformError> {
    let ratio = vmap.fov().radians() / omega_common.radians();
    if ratio == 1.0 {
        return Ok(ViewMap::new(vmap.image().clone(), omega_common, true)?);
    }
    let image = map_rg(vmap, |r, g| ((r - 0.5) * ratio + 0.5, (g - 0.5) * ratio + 0.5))?;
    Ok(ViewMap::new(image, omega_common, true)?)
}

/// Whether any encoded coordinate lies outside `[0, 1]`.
pub fn exceeds_unit_square(vmap: &ViewMap) -> bool {
    let c = vmap.image().channels();
    vmap.image()
        .data()
        .chunks_exact(c)
        .any(|p| !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1]))
}

/// Per-channel linear interpolation `(1 − opacity)·a + opacity·b`.
///
/// Both maps must share dimensions, channel count and FOV label.
pub fn blend_view_maps(a: &ViewMap, b: &ViewMap, opacity: f64) -> Result<ViewMap, TransformError> {
    let shape = |m: &ViewMap| (m.width(), m.height(), m.image().channels());
    if shape(a) != shape(b) {
        return Err(TransformError::DimensionMismatch { a: shape(a), b: shape(b) });
    }
    if a.fov() != b.fov() {
        return Err(TransformError::FovMismatch { a: a.fov().degrees(), b: b.fov().degrees() });
    }
    if !(0.0..=1.0).contains(&opacity) {
        return Err(TransformError::Opacity(opacity));
    }
    let (ia, ib) = (a.image(), b.image());
    let keep = 1.0 - opacity;
    let image = ImageBuffer::from_fn(ia.width(), ia.height(), ia.channels(), |x, y, px| {
        for ((out, va), vb) in px.iter_mut().zip(ia.pixel(x, y)).zip(ib.pixel(x, y)) {
            *out = (keep * *va as f64 + opacity * *vb as f64) as f32;
        }
    }).map_err(MapError::from)?;
    Ok(ViewMap::new(image, a.fov(), a.is_normalized() || b.is_normalized())?)
}

/// Direction encoded by a view-map value under FOV `omega`.
#[inline]
pub fn decode_direction(r: f64, g: f64, omega: f64) -> SphericalDirection {
    let (dx, dy) = (r - 0.5, g - 0.5);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return SphericalDirection::new(0.0, 0.0);
    }
    SphericalDirection::new(omega * len, dy.atan2(dx))
}

/// Inverse of [`decode_direction`].
#[inline]
pub fn encode_direction(dir: SphericalDirection, omega: f64) -> (f64, f64) {
    let scale = dir.theta / omega;
    let (s, c) = dir.phi.sin_cos();
    (0.5 + scale * c, 0.5 + scale * s)
}

/// Converts a view map to a 3-channel map of unit incidence vectors
/// `(sin θ·û, cos θ)` with `û` the unit direction of `RG − ½`.
pub fn view_map_to_rays(vmap: &ViewMap) -> Result<ImageBuffer, TransformError> {
    let img = vmap.image();
    let omega = vmap.fov().radians();
    Ok(ImageBuffer::from_fn(img.width(), img.height(), 3, |x, y, px| {
        let p = img.pixel(x, y);
        let (dx, dy) = (p[0] as f64 - 0.5, p[1] as f64 - 0.5);
        let len = dx.hypot(dy);
        let ray = if len == 0.0 {
            Vector3::new(0.0, 0.0, 1.0)
        } else {
            let (st, ct) = (omega * len).sin_cos();
            Vector3::new(st * dx / len, st * dy / len, ct)
        };
        px[0] = ray.x as f32;
        px[1] = ray.y as f32;
        px[2] = ray.z as f32;
    })
    .map_err(MapError::from)?)
}

/// Camera rotation: pan about the vertical axis, then tilt about the
/// horizontal axis, then roll about the optical axis (`R = R_roll·R_tilt·R_pan`).
///
/// Positive pan turns the view right (+x), positive tilt turns it up (+y),
/// positive roll turns image content counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CameraRotation {
    pub pan: f64,
    pub tilt: f64,
    pub roll: f64,
}

impl CameraRotation {
    pub fn new(pan: f64, tilt: f64, roll: f64) -> Self {
        Self { pan, tilt, roll }
    }

    pub fn matrix(&self) -> Rotation3<f64> {
        // nalgebra angles are right-handed; the sign flips below give the
        // left-handed turns documented above.
        let pan = Rotation3::from_axis_angle(&Vector3::y_axis(), self.pan);
        let tilt = Rotation3::from_axis_angle(&Vector3::x_axis(), -self.tilt);
        let roll = Rotation3::from_axis_angle(&Vector3::z_axis(), self.roll);
        roll * tilt * pan
    }
}

/// Rotates every encoded direction by `rotation` (see [`CameraRotation`]).
pub fn rotate_view_map(vmap: &ViewMap, pan: f64, tilt: f64, roll: f64) -> Result<ViewMap, TransformError> {
    rotate_view_map_with(vmap, &CameraRotation::new(pan, tilt, roll).matrix())
}

/// Rotates every encoded direction by an arbitrary rotation matrix. Encoded
/// values may leave `[0, 1]`.
pub fn rotate_view_map_with(vmap: &ViewMap, rotation: &Rotation3<f64>) -> Result<ViewMap, TransformError> {
    let omega = vmap.fov().radians();
    let image = map_rg(vmap, |r, g| {
        let ray = rotation * decode_direction(r, g, omega).to_unit_vector();
        encode_direction(SphericalDirection::from_vector(&ray), omega)
    })?;
    Ok(ViewMap::new(image, vmap.fov(), vmap.is_normalized())?)
}
