use std::f64::consts::{FRAC_PI_2, PI};

use super::ProjectionError;

/// Unnormalized radial profile: `tan(θk)/k`, `θ`, or `sin(θk)/k`.
#[inline]
pub(crate) fn profile(theta: f64, k: f64) -> f64 {
    if k > 0.0 {
        (theta * k).tan() / k
    } else if k < 0.0 {
        (theta * k).sin() / k
    } else {
        theta
    }
}

/// `d profile / dθ`.
#[inline]
pub(crate) fn profile_slope(theta: f64, k: f64) -> f64 {
    if k > 0.0 {
        let c = (theta * k).cos();
        1.0 / (c * c)
    } else if k < 0.0 {
        (theta * k).cos()
    } else {
        1.0
    }
}

/// Largest polar angle on which the profile of `k` is defined and monotone,
/// capped at π. For `k > ½` the bound itself is excluded (the rectilinear-like
/// horizon lies at infinite radius).
pub fn theta_limit(k: f64) -> f64 {
    if k == 0.0 {
        PI
    } else {
        (FRAC_PI_2 / k.abs()).min(PI)
    }
}

fn theta_in_domain(theta: f64, k: f64) -> bool {
    if !(0.0..=PI).contains(&theta) {
        return false;
    }
    if k > 0.0 {
        theta * k < FRAC_PI_2
    } else if k < 0.0 {
        theta * -k <= FRAC_PI_2
    } else {
        true
    }
}

/// The frame half-width ray `Ω/2` must lie inside the monotone domain of `k`.
pub(crate) fn check_normalization(k: f64, omega: f64) -> Result<(), ProjectionError> {
    if !(-1.0..=1.0).contains(&k) {
        return Err(ProjectionError::InvalidParams(format!("k = {k} outside [-1, 1]")));
    }
    if !(omega > 0.0) || !theta_in_domain(omega * 0.5, k) {
        return Err(ProjectionError::InvalidParams(format!(
            "field of view {:.6}° is not reachable with k = {k}",
            omega.to_degrees()
        )));
    }
    Ok(())
}

/// Radial profile of factor `k` normalized so the half-frame ray `Ω/2` lands
/// on radius 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    k: f64,
    omega: f64,
    // profile(Ω/2)
    scale: f64,
}

impl RadialProfile {
    pub fn new(k: f64, omega: f64) -> Result<Self, ProjectionError> {
        check_normalization(k, omega)?;
        Ok(Self { k, omega, scale: profile(omega * 0.5, k) })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `profile(Ω/2)`, the derivative `dθ/dr̂` at the center.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn radius(&self, theta: f64) -> Result<f64, ProjectionError> {
        if !theta_in_domain(theta, self.k) {
            return Err(ProjectionError::Domain { theta, k: self.k });
        }
        Ok(profile(theta, self.k) / self.scale)
    }

    pub fn theta(&self, radius: f64) -> Result<f64, ProjectionError> {
        let k = self.k;
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(ProjectionError::RadiusDomain { radius, k });
        }
        let x = radius * self.scale;
        let theta = if k > 0.0 {
            (x * k).atan() / k
        } else if k < 0.0 {
            let arg = x * k;
            if arg < -1.0 {
                return Err(ProjectionError::RadiusDomain { radius, k });
            }
            arg.asin() / k
        } else {
            x
        };
        if theta > PI {
            return Err(ProjectionError::Domain { theta, k });
        }
        Ok(theta)
    }

    /// Like [`theta`](Self::theta) but saturating at [`theta_limit`] instead
    /// of failing. Monotone non-decreasing in `radius`.
    pub(crate) fn theta_saturating(&self, radius: f64) -> f64 {
        let k = self.k;
        let x = radius * self.scale;
        let theta = if k > 0.0 {
            (x * k).atan() / k
        } else if k < 0.0 {
            (x * k).max(-1.0).asin() / k
        } else {
            x
        };
        theta.min(theta_limit(k))
    }

    /// Normalized radius at which the profile leaves its domain, or infinity.
    pub(crate) fn rim_radius(&self) -> f64 {
        let k = self.k;
        if k > 0.0 && FRAC_PI_2 / k <= PI {
            f64::INFINITY
        } else {
            profile(theta_limit(k), k) / self.scale
        }
    }

    /// `dθ/dr̂` at polar angle `theta`.
    pub(crate) fn dtheta_dradius(&self, theta: f64) -> f64 {
        self.scale / profile_slope(theta, self.k)
    }
}

/// Normalized image radius of polar angle `theta` for projection factor `k`
/// and horizontal FOV `omega`; `radius_from_theta(omega/2, k, omega) = 1`.
pub fn radius_from_theta(theta: f64, k: f64, omega: f64) -> Result<f64, ProjectionError> {
    RadialProfile::new(k, omega)?.radius(theta)
}

/// Inverse of [`radius_from_theta`].
pub fn theta_from_radius(radius: f64, k: f64, omega: f64) -> Result<f64, ProjectionError> {
    RadialProfile::new(k, omega)?.theta(radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_frame_ray_is_unit_radius() {
        for k in [1.0, 0.5, 0.0, -0.5, -1.0, 0.3, -0.7] {
            let omega = 1.8;
            assert_eq!(radius_from_theta(omega / 2.0, k, omega).unwrap(), 1.0);
            assert!((theta_from_radius(1.0, k, omega).unwrap() - omega / 2.0).abs() < 1e-15);
            assert_eq!(theta_from_radius(0.0, k, omega).unwrap(), 0.0);
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(radius_from_theta(PI / 4.0, 0.0, PI).unwrap(), 0.5);
        let r = radius_from_theta(PI / 6.0, -1.0, PI).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
    }

    // Reference values for Ω = 120°, θ = Ω/4 = 30°, from an independent
    // 50-digit evaluation (mpmath):
    //   k = +½: tan(15°)/tan(30°) = 0.46410161513775458705489268301174...
    //   k = −½: sin(15°)/sin(30°) = 0.51763809020504152469779767524809...
    #[test]
    fn half_k_values_against_high_precision_reference() {
        let omega = 120f64.to_radians();
        let plus = radius_from_theta(omega / 4.0, 0.5, omega).unwrap();
        let minus = radius_from_theta(omega / 4.0, -0.5, omega).unwrap();
        assert!((plus - 0.464_101_615_137_754_6).abs() < 1e-15, "{plus}");
        assert!((minus - 0.517_638_090_205_041_5).abs() < 1e-15, "{minus}");
    }

    #[test]
    fn domain_errors() {
        // rectilinear horizon
        assert!(matches!(radius_from_theta(FRAC_PI_2, 1.0, 1.0), Err(ProjectionError::Domain { .. })));
        assert!(matches!(radius_from_theta(-0.1, 0.0, 1.0), Err(ProjectionError::Domain { .. })));
        // beyond the orthographic rim
        let rim = RadialProfile::new(-1.0, PI / 2.0).unwrap();
        let edge = rim.radius(FRAC_PI_2).unwrap();
        assert!(matches!(rim.theta(edge * 1.01), Err(ProjectionError::RadiusDomain { .. })));
        assert!(rim.theta(edge).is_ok());
        // normalization impossible
        assert!(matches!(RadialProfile::new(1.0, PI), Err(ProjectionError::InvalidParams(_))));
    }

    #[test]
    fn continuous_across_zero_k() {
        let omega = 2.5;
        for i in 0..=100 {
            let theta = omega / 2.0 * i as f64 / 100.0 * 1.2;
            let zero = radius_from_theta(theta, 0.0, omega).unwrap();
            for k in [1e-6, -1e-6] {
                let near = radius_from_theta(theta, k, omega).unwrap();
                assert!((near - zero).abs() < 1e-6, "k={k} θ={theta}: {near} vs {zero}");
            }
        }
    }

    #[test]
    fn rim_radius_matches_domain_edge() {
        let p = RadialProfile::new(-0.5, PI).unwrap();
        assert!((p.rim_radius() - p.radius(PI).unwrap()).abs() < 1e-15);
        assert!(RadialProfile::new(0.8, 1.0).unwrap().rim_radius().is_infinite());
        let small = RadialProfile::new(0.25, 2.0).unwrap();
        assert!((small.theta_saturating(small.rim_radius()) - PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip(k in -1.0f64..=1.0, omega_frac in 0.05f64..0.999, theta_frac in 0.0f64..1.0) {
            let max_omega = (2.0 * theta_limit(k)).min(2.0 * PI);
            let omega = max_omega * omega_frac;
            let theta = theta_limit(k).min(omega) * theta_frac * 0.999;
            let r = radius_from_theta(theta, k, omega).unwrap();
            let back = theta_from_radius(r, k, omega).unwrap();
            prop_assert!((back - theta).abs() < 1e-9, "θ={theta} k={k} Ω={omega} back={back}");
        }

        #[test]
        fn dtheta_matches_finite_difference(k in -1.0f64..=1.0, theta_frac in 0.05f64..0.9) {
            let omega = (2.0 * theta_limit(k)).min(2.0 * PI) * 0.9;
            let p = RadialProfile::new(k, omega).unwrap();
            let theta = omega * 0.5 * theta_frac;
            let r = p.radius(theta).unwrap();
            let h = 1e-6;
            let fd = (p.theta(r + h).unwrap() - p.theta(r - h).unwrap()) / (2.0 * h);
            prop_assert!((fd - p.dtheta_dradius(theta)).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }
}
