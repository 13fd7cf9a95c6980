//! Interpolated sampling, baking of view map × footage map into a final
//! STMap, STMap application and vignette arithmetic.

use thiserror::Error;

use crate::transform::{apply_tile_scale, tile_scale};
use crate::types::{FootageMap, ImageBuffer, ImageError, TexCoord, ViewMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResampleError {
    #[error("supersample factor must be at least 1")]
    Supersample,
    #[error("view map carries no vignette channel")]
    NoVignette,
    #[error("vignette value {value} at pixel ({x}, {y}) is not positive; cannot divide")]
    NonPositiveVignette { x: usize, y: usize, value: f32 },
    #[error("STMap needs at least 2 channels, got {0}")]
    StmapChannels(usize),
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterKind {
    #[default]
    Bilinear,
    CatmullRom,
}

/// What happens to coordinates beyond `[0, 1]²`. Both rules sample the
/// clamped edge; `MarkOutside` additionally reports the sample as outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeRule {
    #[default]
    Clamp,
    MarkOutside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SampleFilter {
    pub kind: FilterKind,
    pub edge: EdgeRule,
}

impl SampleFilter {
    pub const BILINEAR: SampleFilter = SampleFilter { kind: FilterKind::Bilinear, edge: EdgeRule::Clamp };
    pub const CATMULL_ROM: SampleFilter = SampleFilter { kind: FilterKind::CatmullRom, edge: EdgeRule::Clamp };

    pub fn new(kind: FilterKind, edge: EdgeRule) -> Self {
        Self { kind, edge }
    }
}

/// Result of [`sample`]: the first `channels` entries of `values` are valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub values: [f64; 4],
    pub channels: usize,
    pub outside: bool,
}

impl Sample {
    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.channels]
    }
}

#[inline]
fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Samples `buffer` at `at` with pixel-center convention: pixel `i` of an
/// `n`-wide row is centered at `(i + ½)/n`. Indices beyond the raster are
/// clamped to the edge.
pub fn sample(buffer: &ImageBuffer, at: TexCoord, filter: SampleFilter) -> Sample {
    let (w, h, c) = (buffer.width(), buffer.height(), buffer.channels());
    let outside = filter.edge == EdgeRule::MarkOutside && !at.in_frame();
    let x = at.s * w as f64 - 0.5;
    let y = at.t * h as f64 - 0.5;
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as isize, y0 as isize);
    let clamp_x = |i: isize| i.clamp(0, w as isize - 1) as usize;
    let clamp_y = |i: isize| i.clamp(0, h as isize - 1) as usize;

    let mut values = [0.0; 4];
    let mut accumulate = |xi: isize, yi: isize, weight: f64| {
        if weight == 0.0 {
            return;
        }
        for (v, p) in values.iter_mut().zip(buffer.pixel(clamp_x(xi), clamp_y(yi))) {
            *v += weight * *p as f64;
        }
    };
    match filter.kind {
        FilterKind::Bilinear => {
            accumulate(x0, y0, (1.0 - fx) * (1.0 - fy));
            accumulate(x0 + 1, y0, fx * (1.0 - fy));
            accumulate(x0, y0 + 1, (1.0 - fx) * fy);
            accumulate(x0 + 1, y0 + 1, fx * fy);
        }
        FilterKind::CatmullRom => {
            let (wx, wy) = (catmull_rom_weights(fx), catmull_rom_weights(fy));
            for (j, wyj) in wy.iter().enumerate() {
                for (i, wxi) in wx.iter().enumerate() {
                    accumulate(x0 + i as isize - 1, y0 + j as isize - 1, wxi * wyj);
                }
            }
        }
    }
    Sample { values, channels: c, outside }
}

/// Bakes the final STMap: for each output pixel the view map's encoded
/// direction is tile-scaled into the footage map's FOV and the footage map
/// is sampled there.
///
/// Output is RGBA at view-map resolution. RG are footage coordinates, B is
/// the view map's vignette (1 without a vignette channel), A is footage
/// coverage (0 where the direction falls outside the footage-map square).
/// With `supersample = n` each pixel averages an `n × n` grid of subsamples.
pub fn bake(
    vmap: &ViewMap,
    fmap: &FootageMap,
    filter: SampleFilter,
    supersample: usize,
) -> Result<ImageBuffer, ResampleError> {
    if supersample == 0 {
        return Err(ResampleError::Supersample);
    }
    let vimg = vmap.image();
    let fimg = fmap.image();
    let (w, h) = (vimg.width(), vimg.height());
    let scale = tile_scale(vmap.fov().radians(), fmap.fov().radians());
    let vfilter = SampleFilter { edge: EdgeRule::Clamp, ..filter };
    let ffilter = SampleFilter { edge: EdgeRule::MarkOutside, ..filter };
    let n = supersample;
    let inv = 1.0 / (n * n) as f64;

    Ok(ImageBuffer::from_fn(w, h, 4, |x, y, px| {
        let mut acc = [0.0f64; 4];
        for j in 0..n {
            for i in 0..n {
                let at = TexCoord::new(
                    (x as f64 + (i as f64 + 0.5) / n as f64) / w as f64,
                    (y as f64 + (j as f64 + 0.5) / n as f64) / h as f64,
                );
                let view = if n == 1 {
                    let p = vimg.pixel(x, y);
                    let mut values = [0.0; 4];
                    for (v, s) in values.iter_mut().zip(p) {
                        *v = *s as f64;
                    }
                    values
                } else {
                    sample(vimg, at, vfilter).values
                };
                let u = apply_tile_scale(TexCoord::new(view[0], view[1]), scale);
                let f = sample(fimg, u, ffilter);
                let alpha = if f.outside { 0.0 } else { f.values[3].clamp(0.0, 1.0) };
                acc[0] += f.values[0];
                acc[1] += f.values[1];
                acc[2] += if vmap.has_vignette() { view[2] } else { 1.0 };
                acc[3] += alpha;
            }
        }
        for (o, a) in px.iter_mut().zip(acc) {
            *o = (a * inv) as f32;
        }
    })?)
}

/// Reflects the `t` coordinate of an STMap (`G → 1 − G`) for hosts that
/// address textures top-down.
pub fn flip_t(stmap: &ImageBuffer) -> Result<ImageBuffer, ResampleError> {
    if stmap.channels() < 2 {
        return Err(ResampleError::StmapChannels(stmap.channels()));
    }
    Ok(ImageBuffer::from_fn(stmap.width(), stmap.height(), stmap.channels(), |x, y, px| {
        px.copy_from_slice(stmap.pixel(x, y));
        px[1] = 1.0 - px[1];
    })?)
}

fn color_channels(channels: usize) -> usize {
    match channels {
        2 => 1,
        4 => 3,
        c => c,
    }
}

/// Samples `footage` through `stmap`. The output holds the footage color
/// channels plus alpha; alpha is the footage alpha (1 if absent) times the
/// STMap alpha (1 if absent), and 0 where the STMap points outside the
/// frame under [`EdgeRule::MarkOutside`].
pub fn apply_stmap(
    footage: &ImageBuffer,
    stmap: &ImageBuffer,
    filter: SampleFilter,
) -> Result<ImageBuffer, ResampleError> {
    if stmap.channels() < 2 {
        return Err(ResampleError::StmapChannels(stmap.channels()));
    }
    let fc = footage.channels();
    let colors = color_channels(fc);
    let has_alpha = colors != fc;
    let stmap_alpha = stmap.channels() == 4;
    Ok(ImageBuffer::from_fn(stmap.width(), stmap.height(), colors + 1, |x, y, px| {
        let st = stmap.pixel(x, y);
        let s = sample(footage, TexCoord::new(st[0] as f64, st[1] as f64), filter);
        for (o, v) in px.iter_mut().zip(&s.values[..colors]) {
            *o = *v as f32;
        }
        let mut alpha = if has_alpha { s.values[colors].clamp(0.0, 1.0) } else { 1.0 };
        if stmap_alpha {
            alpha *= st[3] as f64;
        }
        if s.outside {
            alpha = 0.0;
        }
        px[colors] = alpha as f32;
    })?)
}

fn vignette_plane(footage: &ImageBuffer, vmap: &ViewMap) -> Result<Vec<f32>, ResampleError> {
    if !vmap.has_vignette() {
        return Err(ResampleError::NoVignette);
    }
    let vimg = vmap.image();
    let (w, h) = (footage.width(), footage.height());
    let same = vimg.width() == w && vimg.height() == h;
    let mut plane = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            plane.push(if same {
                vimg.pixel(x, y)[2]
            } else {
                sample(vimg, footage.texcoord(x, y), SampleFilter::BILINEAR).values[2] as f32
            });
        }
    }
    Ok(plane)
}

fn vignette_apply(
    footage: &ImageBuffer,
    plane: &[f32],
    op: impl Fn(f32, f32) -> f32 + Sync,
) -> Result<ImageBuffer, ResampleError> {
    let colors = color_channels(footage.channels());
    let w = footage.width();
    Ok(ImageBuffer::from_fn(w, footage.height(), footage.channels(), |x, y, px| {
        px.copy_from_slice(footage.pixel(x, y));
        let b = plane[y * w + x];
        for v in &mut px[..colors] {
            *v = op(*v, b);
        }
    })?)
}

/// Removes the view map's vignette from linear-light footage (`RGB / B`).
/// Alpha is left untouched. B is bilinearly resampled when the sizes differ.
pub fn vignette_divide(footage: &ImageBuffer, vmap: &ViewMap) -> Result<ImageBuffer, ResampleError> {
    let plane = vignette_plane(footage, vmap)?;
    if let Some(i) = plane.iter().position(|b| *b <= 0.0) {
        let w = footage.width();
        return Err(ResampleError::NonPositiveVignette { x: i % w, y: i / w, value: plane[i] });
    }
    vignette_apply(footage, &plane, |v, b| v / b)
}

/// Adds the view map's vignette to linear-light footage (`RGB · B`).
pub fn vignette_multiply(footage: &ImageBuffer, vmap: &ViewMap) -> Result<ImageBuffer, ResampleError> {
    let plane = vignette_plane(footage, vmap)?;
    vignette_apply(footage, &plane, |v, b| v * b)
}
