//! Synthetic lens models.
//!
//! The base model is the one-parameter `k` family of azimuthal projections
//! running from rectilinear (`k = 1`) through stereographic (`½`),
//! equidistant (`0`) and equisolid (`−½`) to orthographic (`−1`). Extensions
//! layered on top of it:
//!
//! - anamorphic squeeze of the radius,
//! - aximorphic mixing of separate horizontal/vertical profiles,
//! - asymmetric top/bottom vertical profiles,
//! - a Brown-Conrady division model (optionally with per-axis radial terms).
//!
//! [`forward_model`] maps an image-space vector to a direction on the visual
//! sphere; [`inverse_model`] goes the other way.

mod brown_conrady;
mod extensions;
mod model;
mod radial;
mod vignette;

use nalgebra::Vector3;
use thiserror::Error;

pub use brown_conrady::{brown_conrady, invert_brown_conrady};
pub use extensions::{anamorphic_radius, aximorphic_theta, aximorphic_weights, select_k_y};
pub use model::{field_limit, forward_model, inverse_model};
pub use radial::{radius_from_theta, theta_from_radius, theta_limit, RadialProfile};
pub use vignette::{natural_vignette, vignette_at, MIN_VIGNETTE};

pub(crate) use model::trace;
pub(crate) use radial::check_normalization;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("polar angle {theta} rad is outside the domain of projection factor k = {k}")]
    Domain { theta: f64, k: f64 },
    #[error("radius {radius} lies beyond the rim of projection factor k = {k}")]
    RadiusDomain { radius: f64, k: f64 },
    #[error("radial division polynomial is non-positive ({value}) at r² = {r2}")]
    SingularDivision { value: f64, r2: f64 },
    #[error("Brown-Conrady inversion did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("direction θ = {theta} rad is outside the lens field (limit {limit} rad at this azimuth)")]
    OutOfField { theta: f64, limit: f64 },
    #[error("invalid lens parameters: {0}")]
    InvalidParams(String),
}

/// Direction on the visual sphere: polar angle from the optical axis and
/// azimuth in the image plane (counter-clockwise from +x, y up).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphericalDirection {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalDirection {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Unit incidence vector, x right, y up, z along the optical axis
    /// (left-handed).
    pub fn to_unit_vector(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// Inverse of [`to_unit_vector`](Self::to_unit_vector). The vector need
    /// not be normalized. On the axis `phi` is 0.
    pub fn from_vector(v: &Vector3<f64>) -> Self {
        let lateral = v.x.hypot(v.y);
        let phi = if lateral == 0.0 { 0.0 } else { v.y.atan2(v.x) };
        Self { theta: lateral.atan2(v.z), phi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn unit_vector_round_trip() {
        for &(t, p) in &[(0.3, 1.0), (FRAC_PI_2, -2.5), (3.0, PI), (1e-9, 0.2)] {
            let d = SphericalDirection::new(t, p);
            let v = d.to_unit_vector();
            assert!((v.norm() - 1.0).abs() < 1e-15);
            let back = SphericalDirection::from_vector(&v);
            assert!((back.theta - t).abs() < 1e-14);
            assert!((back.phi - p).abs() < 1e-12);
        }
        let axis = SphericalDirection::from_vector(&Vector3::new(0.0, 0.0, 2.0));
        assert_eq!(axis, SphericalDirection::new(0.0, 0.0));
    }
}
