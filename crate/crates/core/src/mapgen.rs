//! View-map and footage-map synthesis.

use nalgebra::Vector2;
use rayon::prelude::*;
use thiserror::Error;

use crate::projection::{self, field_limit, inverse_model, trace, vignette_at, ProjectionError, SphericalDirection};
use crate::types::{centered_coords, frame_texcoord, FootageMap, ImageBuffer, MapError, ProjectionParams, TexCoord, ViewMap};

/// Minimum share of the footage-map square a derived map must cover.
pub const MIN_DERIVED_COVERAGE: f64 = 0.01;

// Hole filling searches windows from 3×3 up to 9×9.
const MAX_FILL_RADIUS: isize = 4;
// Row bands accumulated independently before the merge.
const SPLAT_BANDS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapGenError {
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("map dimensions must be at least 2x2, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("lens aspect {aspect} does not match a {width}x{height} frame")]
    AspectMismatch { aspect: f64, width: usize, height: usize },
    #[error("view map covers only {:.3}% of the footage-map domain", coverage * 100.0)]
    EmptyMap { coverage: f64 },
}

/// Default footage-map edge: the next power of two at or above the larger
/// footage dimension.
pub fn default_footage_size(width: usize, height: usize) -> usize {
    width.max(height).max(2).next_power_of_two()
}

fn encode_direction(theta: f64, phi: f64, omega: f64) -> [f32; 2] {
    let scale = theta / omega;
    let (s, c) = phi.sin_cos();
    [(0.5 + scale * c) as f32, (0.5 + scale * s) as f32]
}

/// Direction encoded at `v`, or for off-field pixels the field boundary along
/// the pixel's azimuth.
fn view_direction(v: Vector2<f64>, params: &ProjectionParams) -> SphericalDirection {
    match trace(v, params) {
        Ok(t) => SphericalDirection::new(t.theta, t.phi),
        Err(_) => {
            let bent = projection::brown_conrady(v, &params.bc, None).unwrap_or(v);
            let phi = bent.y.atan2(bent.x);
            let theta = field_limit(phi, params).unwrap_or(0.0);
            SphericalDirection::new(theta, phi)
        }
    }
}

/// Synthesizes the view map of `params` for a `width × height` frame.
///
/// The map is labelled with the rounded-up whole-degree FOV and its
/// coordinates are scaled to that label. Pixels outside the lens field encode
/// the field boundary along their azimuth; their vignette is
/// [`MIN_VIGNETTE`](projection::MIN_VIGNETTE).
pub fn generate_view_map(
    params: &ProjectionParams,
    width: usize,
    height: usize,
    with_vignette: bool,
) -> Result<ViewMap, MapGenError> {
    if width < 2 || height < 2 {
        return Err(MapGenError::TooSmall { width, height });
    }
    if (params.aspect * height as f64 - width as f64).abs() > 1.0 {
        return Err(MapGenError::AspectMismatch { aspect: params.aspect, width, height });
    }
    params.validate()?;
    let label = params.omega.noted();
    let omega = label.radians();
    let channels = if with_vignette { 3 } else { 2 };
    let image = ImageBuffer::from_fn(width, height, channels, |x, y, px| {
        let v = centered_coords(x, y, width, height, params.aspect);
        let dir = view_direction(v, params);
        let [r, g] = encode_direction(dir.theta, dir.phi, omega);
        px[0] = r;
        px[1] = g;
        if with_vignette {
            px[2] = vignette_at(v, params) as f32;
        }
    })
    .map_err(MapError::from)?;
    Ok(ViewMap::new(image, label, false)?)
}

/// Footage texture coordinate seen along `dir`, if it is inside the field.
fn footage_coord(dir: SphericalDirection, params: &ProjectionParams) -> Option<TexCoord> {
    inverse_model(dir, params).ok().map(|v| frame_texcoord(v, params.aspect))
}

/// Synthesizes the `size × size` footage map of `params`.
///
/// Pixel `u` of the square looks along `θ = Ω·|u − ½|` at the azimuth of
/// `u − ½`. Alpha is 1 where that direction is inside the lens field and
/// lands on the frame; elsewhere RG holds the nearest valid coordinate.
pub fn generate_footage_map(params: &ProjectionParams, size: usize) -> Result<FootageMap, MapGenError> {
    if size < 2 {
        return Err(MapGenError::TooSmall { width: size, height: size });
    }
    params.validate()?;
    let label = params.omega.noted();
    let omega = label.radians();
    let image = ImageBuffer::from_fn(size, size, 4, |x, y, px| {
        let u = TexCoord::pixel_center(x, y, size, size);
        let d = Vector2::new(u.s - 0.5, u.t - 0.5);
        let phi = if d.x == 0.0 && d.y == 0.0 { 0.0 } else { d.y.atan2(d.x) };
        let dir = SphericalDirection::new(omega * d.norm(), phi);
        let (st, covered) = match footage_coord(dir, params) {
            Some(st) => (st, st.in_frame()),
            None => {
                let limit = field_limit(phi, params).unwrap_or(0.0);
                let edge = SphericalDirection::new(limit * (1.0 - 1e-9), phi);
                (footage_coord(edge, params).unwrap_or(TexCoord::CENTER), false)
            }
        };
        let st = st.clamped();
        px[0] = st.s as f32;
        px[1] = st.t as f32;
        px[2] = 0.0;
        px[3] = if covered { 1.0 } else { 0.0 };
    })
    .map_err(MapError::from)?;
    Ok(FootageMap::new(image, label)?)
}

#[derive(Clone, Copy, Default)]
struct Cell {
    weight: f64,
    s: f64,
    t: f64,
}

/// Derives a `size × size` footage map from a (possibly measured) view map
/// of the footage lens.
///
/// Each view-map pixel is splatted bilinearly at the grid position of its
/// encoded direction, carrying its own frame coordinate. Empty cells whose
/// 3×3…9×9 neighborhood has samples on all four sides are filled by
/// inverse-distance (power 2) interpolation and marked covered; the rest of
/// the square takes the nearest covered value with alpha 0.
pub fn derive_footage_map(vmap: &ViewMap, size: usize) -> Result<FootageMap, MapGenError> {
    if size < 2 {
        return Err(MapGenError::TooSmall { width: size, height: size });
    }
    let img = vmap.image();
    let (w, h) = (img.width(), img.height());
    let n = size;
    let band_rows = h.div_ceil(SPLAT_BANDS);

    let bands: Vec<Vec<Cell>> = (0..SPLAT_BANDS)
        .into_par_iter()
        .map(|band| {
            let mut grid = vec![Cell::default(); n * n];
            for y in band * band_rows..((band + 1) * band_rows).min(h) {
                for x in 0..w {
                    let px = img.pixel(x, y);
                    let gx = px[0] as f64 * n as f64 - 0.5;
                    let gy = px[1] as f64 * n as f64 - 0.5;
                    let payload = img.texcoord(x, y);
                    let (x0, y0) = (gx.floor(), gy.floor());
                    let (fx, fy) = (gx - x0, gy - y0);
                    for (dx, dy, wt) in [
                        (0, 0, (1.0 - fx) * (1.0 - fy)),
                        (1, 0, fx * (1.0 - fy)),
                        (0, 1, (1.0 - fx) * fy),
                        (1, 1, fx * fy),
                    ] {
                        let cx = x0 as isize + dx;
                        let cy = y0 as isize + dy;
                        if wt <= 0.0 || cx < 0 || cy < 0 || cx >= n as isize || cy >= n as isize {
                            continue;
                        }
                        let cell = &mut grid[cy as usize * n + cx as usize];
                        cell.weight += wt;
                        cell.s += wt * payload.s;
                        cell.t += wt * payload.t;
                    }
                }
            }
            grid
        })
        .collect();

    let mut grid = vec![Cell::default(); n * n];
    for band in &bands {
        for (acc, c) in grid.iter_mut().zip(band) {
            acc.weight += c.weight;
            acc.s += c.s;
            acc.t += c.t;
        }
    }
    drop(bands);

    let splatted = grid.iter().filter(|c| c.weight > 0.0).count();
    let coverage = splatted as f64 / (n * n) as f64;
    if coverage < MIN_DERIVED_COVERAGE {
        return Err(MapGenError::EmptyMap { coverage });
    }

    // (s, t) per covered cell
    let direct: Vec<Option<(f64, f64)>> = grid
        .iter()
        .map(|c| (c.weight > 0.0).then(|| (c.s / c.weight, c.t / c.weight)))
        .collect();

    let filled: Vec<Option<(f64, f64)>> = (0..n * n)
        .into_par_iter()
        .map(|i| direct[i].or_else(|| fill_hole(&direct, n, i % n, i / n)))
        .collect();

    let nearest = nearest_covered(&filled, n);
    let mut data = vec![0.0f32; n * n * 4];
    for (i, px) in data.chunks_exact_mut(4).enumerate() {
        let (value, alpha) = match filled[i] {
            Some(v) => (v, 1.0),
            None => (nearest[i].map(|j| filled[j].unwrap()).unwrap_or((0.5, 0.5)), 0.0),
        };
        px[0] = value.0.clamp(0.0, 1.0) as f32;
        px[1] = value.1.clamp(0.0, 1.0) as f32;
        px[3] = alpha;
    }
    let image = ImageBuffer::from_vec(n, n, 4, data).map_err(MapError::from)?;
    Ok(FootageMap::new(image, vmap.fov())?)
}

fn fill_hole(direct: &[Option<(f64, f64)>], n: usize, x: usize, y: usize) -> Option<(f64, f64)> {
    for radius in 1..=MAX_FILL_RADIUS {
        let mut sides = [false; 4];
        let (mut ws, mut ss, mut ts) = (0.0, 0.0, 0.0);
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let (cx, cy) = (x as isize + dx, y as isize + dy);
                if cx < 0 || cy < 0 || cx >= n as isize || cy >= n as isize {
                    continue;
                }
                let Some((s, t)) = direct[cy as usize * n + cx as usize] else { continue };
                sides[0] |= dx > 0;
                sides[1] |= dx < 0;
                sides[2] |= dy > 0;
                sides[3] |= dy < 0;
                let wt = 1.0 / (dx * dx + dy * dy) as f64;
                ws += wt;
                ss += wt * s;
                ts += wt * t;
            }
        }
        if sides.iter().all(|s| *s) {
            return Some((ss / ws, ts / ws));
        }
    }
    None
}

/// Index of an approximately nearest covered cell for every cell, by a
/// two-pass chamfer propagation.
fn nearest_covered(cells: &[Option<(f64, f64)>], n: usize) -> Vec<Option<usize>> {
    let mut best: Vec<Option<usize>> = (0..n * n).map(|i| cells[i].map(|_| i)).collect();
    let dist = |i: usize, j: usize| {
        let (ax, ay, bx, by) = ((i % n) as f64, (i / n) as f64, (j % n) as f64, (j / n) as f64);
        (ax - bx).powi(2) + (ay - by).powi(2)
    };
    let relax = |best: &mut Vec<Option<usize>>, i: usize, nb: usize| {
        if let Some(src) = best[nb] {
            if best[i].is_none_or(|cur| dist(i, src) < dist(i, cur)) {
                best[i] = Some(src);
            }
        }
    };
    for y in 0..n {
        for x in 0..n {
            let i = y * n + x;
            if x > 0 {
                relax(&mut best, i, i - 1);
            }
            if y > 0 {
                relax(&mut best, i, i - n);
                if x > 0 {
                    relax(&mut best, i, i - n - 1);
                }
                if x + 1 < n {
                    relax(&mut best, i, i - n + 1);
                }
            }
        }
    }
    for y in (0..n).rev() {
        for x in (0..n).rev() {
            let i = y * n + x;
            if x + 1 < n {
                relax(&mut best, i, i + 1);
            }
            if y + 1 < n {
                relax(&mut best, i, i + n);
                if x + 1 < n {
                    relax(&mut best, i, i + n + 1);
                }
                if x > 0 {
                    relax(&mut best, i, i + n - 1);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::forward_model;
    use crate::types::FovAngle;

    fn fov(d: f64) -> FovAngle {
        FovAngle::from_degrees(d).unwrap()
    }

    #[test]
    fn equidistant_view_map_center_and_ramp() {
        let p = ProjectionParams::spherical(fov(120.0), 0.0, 1.0);
        let vm = generate_view_map(&p, 65, 65, false).unwrap();
        assert_eq!(vm.image().pixel(32, 32), &[0.5, 0.5]);
        assert_eq!(vm.fov().noted_degrees(), 120);
        assert!(!vm.has_vignette());
        // equidistant + matching FOV: RG is the identity ramp
        for (x, y) in [(0, 0), (10, 50), (64, 3)] {
            let tc = vm.image().texcoord(x, y);
            let px = vm.image().pixel(x, y);
            assert!((px[0] as f64 - tc.s).abs() < 1e-6 && (px[1] as f64 - tc.t).abs() < 1e-6);
        }
    }

    #[test]
    fn rectilinear_half_frame_edge() {
        // θ(edge) = Ω/2 = 45° ⇒ |RG − ½| = ½
        let n = 1 << 12;
        let aspect = n as f64 / 2.0;
        let p = ProjectionParams::spherical(fov(90.0), 1.0, aspect);
        let vm = generate_view_map(&p, n, 2, false).unwrap();
        let x = vm.image().pixel(n - 1, 0)[0] as f64 - 0.5;
        let v = centered_coords(n - 1, 0, n, 2, aspect);
        let expect = forward_model(Vector2::new(v.x, 0.0), &p).unwrap();
        assert!((x - 0.5).abs() < 1e-3);
        assert!((x - expect.theta / p.omega.radians()).abs() < 1e-6);
        // pixel centered at v = (1, 0)
        let edge = forward_model(Vector2::new(1.0, 0.0), &p).unwrap();
        assert!((edge.theta / p.omega.radians() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthographic_vignette_is_one() {
        let p = ProjectionParams::spherical(fov(150.0), -1.0, 1.0);
        let vm = generate_view_map(&p, 32, 32, true).unwrap();
        assert!(vm.has_vignette());
        for y in 0..32 {
            for x in 0..32 {
                let v = centered_coords(x, y, 32, 32, 1.0);
                if forward_model(v, &p).is_ok() {
                    assert_eq!(vm.image().pixel(x, y)[2], 1.0);
                }
            }
        }
    }

    #[test]
    fn off_field_pixels_encode_boundary() {
        let p = ProjectionParams::spherical(fov(180.0), -1.0, 1.0);
        let vm = generate_view_map(&p, 33, 33, true).unwrap();
        // corner lies beyond the orthographic rim: boundary θ = 90° ⇒ |RG − ½| = ½
        let px = vm.image().pixel(0, 0);
        let r = ((px[0] as f64 - 0.5).powi(2) + (px[1] as f64 - 0.5).powi(2)).sqrt();
        assert!((r - 0.5).abs() < 1e-6, "{r}");
        assert_eq!(px[2] as f64, projection::MIN_VIGNETTE as f32 as f64);
    }

    #[test]
    fn noted_fov_rescales_coordinates() {
        let p = ProjectionParams::spherical(fov(100.4), 0.0, 1.0);
        let vm = generate_view_map(&p, 64, 64, false).unwrap();
        assert_eq!(vm.fov().noted_degrees(), 101);
        let edge = vm.image().pixel(63, 32)[0] as f64 - 0.5;
        let v = centered_coords(63, 32, 64, 64, 1.0);
        let theta = forward_model(v, &p).unwrap().theta;
        let dir = (v.y).atan2(v.x);
        assert!((edge - theta * dir.cos() / 101f64.to_radians()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_geometry() {
        let p = ProjectionParams::spherical(fov(90.0), 0.0, 2.0);
        assert!(matches!(generate_view_map(&p, 100, 100, false), Err(MapGenError::AspectMismatch { .. })));
        assert!(matches!(generate_view_map(&p, 1, 1, false), Err(MapGenError::TooSmall { .. })));
        assert!(matches!(generate_footage_map(&p, 1), Err(MapGenError::TooSmall { .. })));
    }

    #[test]
    fn footage_map_center_and_corners() {
        let p = ProjectionParams::spherical(fov(120.0), -0.5, 2.0);
        let fm = generate_footage_map(&p, 65).unwrap();
        assert_eq!(fm.image().pixel(32, 32), &[0.5, 0.5, 0.0, 1.0]);
        // corner: θ ≈ 83.5° is in field, r̂ ≈ 1.33 on the diagonal is above the 2:1 frame
        assert_eq!(fm.image().pixel(0, 0)[3], 0.0);
        let narrow = ProjectionParams::spherical(fov(90.0), 1.0, 1.0);
        let fm = generate_footage_map(&narrow, 65).unwrap();
        assert_eq!(fm.image().pixel(64, 64)[3], 0.0);
        let fm = generate_footage_map(&ProjectionParams::spherical(fov(180.0), -1.0, 1.0), 65).unwrap();
        // corner beyond the orthographic rim: θ ≈ 125°
        assert_eq!(fm.image().pixel(0, 64)[3], 0.0);
    }

    /// Brute force: scan the footage frame with the forward model and mark
    /// the footage-map cells hit; every hit cell well inside the hit region
    /// must be covered, and covered cells must be near a hit.
    #[test]
    fn equidistant_coverage_matches_forward_scan() {
        let aspect = 16.0 / 9.0;
        let p = ProjectionParams::spherical(fov(160.0), 0.0, aspect);
        let n = 64;
        let fm = generate_footage_map(&p, n).unwrap();
        let omega = fm.fov().radians();
        let (w, h) = (1024, 576);
        let mut hit = vec![false; n * n];
        for y in 0..h {
            for x in 0..w {
                let v = centered_coords(x, y, w, h, aspect);
                let d = forward_model(v, &p).unwrap();
                let u = 0.5 + d.theta / omega * d.phi.cos();
                let t = 0.5 + d.theta / omega * d.phi.sin();
                hit[(t * n as f64) as usize * n + (u * n as f64) as usize] = true;
            }
        }
        let mut mismatches = 0;
        for y in 1..n - 1 {
            for x in 1..n - 1 {
                let covered = fm.image().pixel(x, y)[3] == 1.0;
                let neighborhood: Vec<bool> =
                    (0..9).map(|i| hit[(y + i / 3 - 1) * n + x + i % 3 - 1]).collect();
                let all = neighborhood.iter().all(|b| *b);
                let any = neighborhood.iter().any(|b| *b);
                if (all && !covered) || (!any && covered) {
                    mismatches += 1;
                }
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn derived_matches_generated() {
        let p = ProjectionParams::spherical(fov(150.0), -0.3, 1.5).with_squeeze(1.2);
        let vm = generate_view_map(&p, 384, 256, false).unwrap();
        let n = 128;
        let derived = derive_footage_map(&vm, n).unwrap();
        let direct = generate_footage_map(&p, n).unwrap();
        let (mut sum, mut count) = (0.0, 0);
        for i in 0..n * n {
            let (a, b) = (&derived.image().data()[i * 4..i * 4 + 4], &direct.image().data()[i * 4..i * 4 + 4]);
            if a[3] == 1.0 && b[3] == 1.0 {
                let ds = (a[0] - b[0]) as f64 * 384.0;
                let dt = (a[1] - b[1]) as f64 * 256.0;
                sum += ds * ds + dt * dt;
                count += 1;
            }
        }
        let rms = (sum / count as f64).sqrt();
        assert!(count > n * n / 3);
        assert!(rms < 1.0, "rms {rms} px over {count} cells");
        let (dc, gc) = (derived.coverage(), direct.coverage());
        assert!((dc - gc).abs() < 0.05, "{dc} vs {gc}");
    }

    #[test]
    fn identity_equidistant_view_map_gives_identity_footage_map() {
        let p = ProjectionParams::spherical(fov(120.0), 0.0, 1.0);
        let n = 64;
        let vm = generate_view_map(&p, 256, 256, false).unwrap();
        let fm = derive_footage_map(&vm, n).unwrap();
        for y in 0..n {
            for x in 0..n {
                let px = fm.image().pixel(x, y);
                if px[3] == 1.0 && x > 0 && y > 0 && x < n - 1 && y < n - 1 {
                    let tc = fm.image().texcoord(x, y);
                    assert!((px[0] as f64 - tc.s).abs() < 1e-4 && (px[1] as f64 - tc.t).abs() < 1e-4);
                }
            }
        }
        assert!(fm.coverage() > 0.95);
    }

    #[test]
    fn constant_view_map_is_empty() {
        let img = ImageBuffer::filled(64, 64, 2, 0.5).unwrap();
        let vm = ViewMap::new(img, fov(90.0), false).unwrap();
        assert!(matches!(derive_footage_map(&vm, 64), Err(MapGenError::EmptyMap { .. })));
    }

    #[test]
    fn default_size_is_power_of_two() {
        assert_eq!(default_footage_size(1920, 1080), 2048);
        assert_eq!(default_footage_size(512, 300), 512);
        assert_eq!(default_footage_size(1, 1), 2);
    }
}
