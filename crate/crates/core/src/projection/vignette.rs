use nalgebra::Vector2;

use super::radial::{profile, profile_slope};
use super::{anamorphic_radius, aximorphic_weights, select_k_y, trace, RadialProfile};
use crate::types::ProjectionParams;

/// Floor for vignette values so that division stays finite at and beyond
/// the 90° horizon.
pub const MIN_VIGNETTE: f64 = 1e-6;

/// Relative illuminance implied by the projection geometry alone:
///
/// ```text
/// V(θ) = sin θ · cos θ / (r(θ) · r'(θ))
/// ```
///
/// normalized so `V → 1` as `θ → 0`. The result is independent of `omega`
/// (the normalization scale cancels). Rectilinear gives `cos⁴θ`,
/// orthographic gives exactly 1. Values are floored at [`MIN_VIGNETTE`].
pub fn natural_vignette(theta: f64, k: f64, _omega: f64) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    let (s, c) = theta.sin_cos();
    let v = (s * c) / (profile(theta, k) * profile_slope(theta, k));
    if v.is_finite() {
        v.max(MIN_VIGNETTE)
    } else {
        MIN_VIGNETTE
    }
}

/// Natural vignette of the pixel at image-space vector `v`.
///
/// For mixed per-axis profiles the same formula is applied to the effective
/// radial profile `ρ(θ)` along the pixel's azimuth. Off-field pixels get
/// [`MIN_VIGNETTE`].
pub fn vignette_at(v: Vector2<f64>, params: &ProjectionParams) -> f64 {
    let Ok(t) = trace(v, params) else { return MIN_VIGNETTE };
    if t.theta == 0.0 {
        return 1.0;
    }
    let omega = params.omega.radians();
    let k_y = select_k_y(t.vb.y, params.k_y_top, params.k_y_bottom);
    if params.k_x == k_y {
        return natural_vignette(t.theta, params.k_x, omega);
    }
    let (Ok(px), Ok(py)) = (RadialProfile::new(params.k_x, omega), RadialProfile::new(k_y, omega)) else {
        return MIN_VIGNETTE;
    };
    let w = aximorphic_weights(t.vb);
    let theta_x = px.theta_saturating(t.radius);
    let theta_y = py.theta_saturating(t.radius);
    // dθ/dρ along the azimuth; the squeeze stretch cancels in the ratio below
    let slope = w.x * px.dtheta_dradius(theta_x) + w.y * py.dtheta_dradius(theta_y);
    let slope0 = w.x * px.scale() + w.y * py.scale();
    let (rho, _) = anamorphic_radius(t.vb, params.squeeze);
    let (s, c) = t.theta.sin_cos();
    let v = s * c * slope / (rho * slope0 * slope0);
    if v.is_finite() {
        v.max(MIN_VIGNETTE)
    } else {
        MIN_VIGNETTE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::FovAngle;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn orthographic_has_no_vignetting() {
        for i in 0..100 {
            let theta = FRAC_PI_2 * i as f64 / 100.0;
            assert_eq!(natural_vignette(theta, -1.0, PI), 1.0);
        }
    }

    #[test]
    fn rectilinear_is_cos4() {
        for i in 0..100 {
            let theta = 1.5 * i as f64 / 100.0;
            let expect = theta.cos().powi(4);
            assert!((natural_vignette(theta, 1.0, 1.0) - expect).abs() < 1e-9);
        }
        assert!((natural_vignette(60f64.to_radians(), 1.0, 2.0) - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn unit_at_center_and_monotone() {
        for k in [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0] {
            assert_eq!(natural_vignette(0.0, k, 1.0), 1.0);
            assert!((natural_vignette(1e-7, k, 1.0) - 1.0).abs() < 1e-9);
            let end = crate::projection::theta_limit(k).min(FRAC_PI_2) * 0.999;
            let mut prev = 1.0;
            for i in 1..=500 {
                let v = natural_vignette(end * i as f64 / 500.0, k, 1.0);
                assert!(v <= prev + 1e-15, "k={k}");
                prev = v;
            }
        }
    }

    #[test]
    fn per_pixel_matches_scalar_model_and_mixes_continuously() {
        let sym = ProjectionParams::spherical(FovAngle::from_degrees(150.0).unwrap(), 0.0, 1.0).with_squeeze(1.5);
        let v = Vector2::new(0.4, 0.5);
        let t = trace(v, &sym).unwrap();
        assert_eq!(vignette_at(v, &sym), natural_vignette(t.theta, 0.0, 1.0));

        // a mixed model on the horizontal axis behaves like its x profile
        let axi = ProjectionParams::spherical(FovAngle::from_degrees(150.0).unwrap(), 0.5, 1.0).with_k_y(-0.5, -0.5);
        let on_axis = Vector2::new(0.6, 1e-9);
        let t = trace(on_axis, &axi).unwrap();
        assert!((vignette_at(on_axis, &axi) - natural_vignette(t.theta, 0.5, 1.0)).abs() < 1e-9);
        let up = Vector2::new(1e-9, 0.6);
        let t = trace(up, &axi).unwrap();
        assert!((vignette_at(up, &axi) - natural_vignette(t.theta, -0.5, 1.0)).abs() < 1e-9);
    }
}
