use nalgebra::Vector2;

use super::brown_conrady::{self, invert_brown_conrady};
use super::{anamorphic_radius, aximorphic_theta, select_k_y, ProjectionError, RadialProfile, SphericalDirection};
use crate::types::ProjectionParams;

const MAX_BISECTIONS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 200;

/// Intermediate values of the forward chain for one image-space vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Trace {
    /// Vector after Brown-Conrady.
    pub vb: Vector2<f64>,
    /// Squeeze-weighted radius.
    pub radius: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Horizontal and (side-selected) vertical profiles for a direction whose
/// vertical component has sign `v_y`.
fn axis_profiles(v_y: f64, params: &ProjectionParams) -> Result<(RadialProfile, RadialProfile), ProjectionError> {
    let omega = params.omega.radians();
    let px = RadialProfile::new(params.k_x, omega)?;
    let ky = select_k_y(v_y, params.k_y_top, params.k_y_bottom);
    let py = if ky == params.k_x { px } else { RadialProfile::new(ky, omega)? };
    Ok((px, py))
}

pub(crate) fn trace(v: Vector2<f64>, params: &ProjectionParams) -> Result<Trace, ProjectionError> {
    let vb = brown_conrady::apply(v, &params.bc)?;
    if vb.x == 0.0 && vb.y == 0.0 {
        return Ok(Trace { vb, radius: 0.0, theta: 0.0, phi: 0.0 });
    }
    let (radius, _) = anamorphic_radius(vb, params.squeeze);
    let (px, py) = axis_profiles(vb.y, params)?;
    let theta = if px.k() == py.k() {
        px.theta(radius)?
    } else {
        let theta_x = if vb.x != 0.0 { px.theta(radius)? } else { 0.0 };
        let theta_y = if vb.y != 0.0 { py.theta(radius)? } else { 0.0 };
        aximorphic_theta(vb, theta_x, theta_y)
    };
    Ok(Trace { vb, radius, theta, phi: vb.y.atan2(vb.x) })
}

/// Direction seen by the image-space vector `v` (see
/// [`centered_coords`](crate::centered_coords)).
///
/// Chain: Brown-Conrady, anamorphic radius, per-axis polar angles, aximorphic
/// mix. The azimuth is that of the Brown-Conrady output. Vectors outside the
/// lens field are reported as errors, never extrapolated.
pub fn forward_model(v: Vector2<f64>, params: &ProjectionParams) -> Result<SphericalDirection, ProjectionError> {
    trace(v, params).map(|t| SphericalDirection { theta: t.theta, phi: t.phi })
}

// Mixed polar angle along a fixed azimuth as a function of the squeezed radius.
struct AzimuthProfile {
    px: RadialProfile,
    py: RadialProfile,
    wx: f64,
    wy: f64,
}

impl AzimuthProfile {
    fn new(phi: f64, params: &ProjectionParams) -> Result<Self, ProjectionError> {
        let (s, c) = phi.sin_cos();
        let (px, py) = axis_profiles(s, params)?;
        let (xx, yy) = (c * c, s * s);
        Ok(Self { px, py, wx: xx / (xx + yy), wy: yy / (xx + yy) })
    }

    fn symmetric(&self) -> Option<&RadialProfile> {
        if self.px.k() == self.py.k() || self.wy == 0.0 {
            Some(&self.px)
        } else if self.wx == 0.0 {
            Some(&self.py)
        } else {
            None
        }
    }

    fn theta(&self, radius: f64) -> f64 {
        self.wx * self.px.theta_saturating(radius) + self.wy * self.py.theta_saturating(radius)
    }

    fn rim(&self) -> f64 {
        self.px.rim_radius().min(self.py.rim_radius())
    }

    /// Supremum of the polar angle reachable along this azimuth.
    fn limit(&self) -> f64 {
        if let Some(p) = self.symmetric() {
            return p.theta_saturating(p.rim_radius());
        }
        self.theta(self.rim())
    }

    fn radius(&self, theta: f64) -> Result<f64, ProjectionError> {
        let out_of_field = || ProjectionError::OutOfField { theta, limit: self.limit() };
        if let Some(p) = self.symmetric() {
            return p.radius(theta).map_err(|_| out_of_field());
        }
        solve_radius_numeric(theta, |r| self.theta(r), self.rim()).ok_or_else(out_of_field)
    }
}

/// Bracketed bisection for `g(r) = theta` with `g` continuous and
/// non-decreasing on `[0, rim]`, `g(0) = 0`.
pub(crate) fn solve_radius_numeric(theta: f64, g: impl Fn(f64) -> f64, rim: f64) -> Option<f64> {
    let mut lo = 0.0;
    let mut hi = if rim.is_finite() {
        if g(rim) < theta {
            return None;
        }
        rim
    } else {
        let mut hi = 1.0;
        let mut n = 0;
        while g(hi) < theta {
            lo = hi;
            hi *= 2.0;
            n += 1;
            if n > MAX_BRACKET_DOUBLINGS {
                return None;
            }
        }
        hi
    };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Largest polar angle the lens covers along azimuth `phi`, ignoring
/// Brown-Conrady terms.
pub fn field_limit(phi: f64, params: &ProjectionParams) -> Result<f64, ProjectionError> {
    Ok(AzimuthProfile::new(phi, params)?.limit())
}

/// Image-space vector that sees direction `dir`; inverse of
/// [`forward_model`].
///
/// The radial chain preserves the azimuth, so the squeezed radius is found by
/// a 1-D solve along `dir.phi` (closed form when both axes share a profile)
/// and Brown-Conrady is inverted afterwards.
pub fn inverse_model(dir: SphericalDirection, params: &ProjectionParams) -> Result<Vector2<f64>, ProjectionError> {
    let theta = dir.theta;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(ProjectionError::OutOfField { theta, limit: std::f64::consts::PI });
    }
    let vb = if theta == 0.0 {
        Vector2::zeros()
    } else {
        let profile = AzimuthProfile::new(dir.phi, params)?;
        let radius = profile.radius(theta)?;
        let (s, c) = dir.phi.sin_cos();
        let stretch = (c * c + s * s / params.squeeze).sqrt();
        Vector2::new(c, s) * (radius / stretch)
    };
    invert_brown_conrady(vb, &params.bc)
}
