use nalgebra::Vector2;

/// Squeeze-weighted radius `r = √(vx² + vy²/s)` and the rescaled vector
/// `v' = (|v|/r)·v`. `v` must be non-zero.
pub fn anamorphic_radius(v: Vector2<f64>, squeeze: f64) -> (f64, Vector2<f64>) {
    if squeeze == 1.0 {
        return (v.norm(), v);
    }
    let r = (v.x * v.x + v.y * v.y / squeeze).sqrt();
    (r, v * (v.norm() / r))
}

/// Aximorphic interpolation weights `(cos²φ, sin²φ)` of a non-zero vector.
#[inline]
pub fn aximorphic_weights(v: Vector2<f64>) -> Vector2<f64> {
    let xx = v.x * v.x;
    let yy = v.y * v.y;
    let sum = xx + yy;
    Vector2::new(xx / sum, yy / sum)
}

/// Polar angle mixed from per-axis angles with the weights of `v`.
pub fn aximorphic_theta(v: Vector2<f64>, theta_x: f64, theta_y: f64) -> f64 {
    if theta_x == theta_y {
        return theta_x;
    }
    let w = aximorphic_weights(v);
    w.x * theta_x + w.y * theta_y
}

/// Vertical projection factor for the upper (`v_y > 0`) or lower half.
#[inline]
pub fn select_k_y(v_y: f64, k_top: f64, k_bottom: f64) -> f64 {
    if v_y > 0.0 {
        k_top
    } else {
        k_bottom
    }
}
