use nalgebra::{Matrix2, Vector2};

use super::{aximorphic_weights, ProjectionError};
use crate::types::BrownConradyParams;

const MAX_FIXED_POINT_ITERATIONS: usize = 50;
const MAX_NEWTON_ITERATIONS: usize = 50;
const INVERSE_TOLERANCE: f64 = 1e-8;

#[inline]
fn radial_polynomial(coefficients: &[f64], r2: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, k| acc * r2 + k) * r2 + 1.0
}

/// Brown-Conrady division model about the cardinal offset `(c1, c2)`:
///
/// ```text
/// f  = v − c,   r² = |f|²
/// v' = f / D(r²) + c + f·(f·p) + r²·q
/// ```
///
/// With `weights = None`, `D = 1 + k1 r² + k2 r⁴ + …` uses `radial_x`. With
/// weights `w`, `D = w_x·Dx + w_y·Dy` mixes the per-axis polynomials.
pub fn brown_conrady(
    v: Vector2<f64>,
    bc: &BrownConradyParams,
    weights: Option<Vector2<f64>>,
) -> Result<Vector2<f64>, ProjectionError> {
    let c = Vector2::new(bc.c1, bc.c2);
    let f = v - c;
    let r2 = f.norm_squared();
    let dx = radial_polynomial(&bc.radial_x, r2);
    let d = match weights {
        None => dx,
        Some(w) => {
            let dy = radial_polynomial(&bc.radial_y, r2);
            if dx == dy {
                dx
            } else {
                w.x * dx + w.y * dy
            }
        }
    };
    if !(d > 0.0) {
        return Err(ProjectionError::SingularDivision { value: d, r2 });
    }
    let p = Vector2::new(bc.p1, bc.p2);
    let q = Vector2::new(bc.q1, bc.q2);
    Ok(f / d + c + f * f.dot(&p) + q * r2)
}

/// The model as applied inside the lens chain: per-axis radial terms are
/// mixed with the weights of the offset vector `v − c`.
pub(crate) fn apply(v: Vector2<f64>, bc: &BrownConradyParams) -> Result<Vector2<f64>, ProjectionError> {
    if bc.is_axis_symmetric() {
        return brown_conrady(v, bc, None);
    }
    let f = v - Vector2::new(bc.c1, bc.c2);
    let w = if f.x == 0.0 && f.y == 0.0 { Vector2::new(0.5, 0.5) } else { aximorphic_weights(f) };
    brown_conrady(v, bc, Some(w))
}

/// Solves `apply(v) = target` for `v`.
///
/// Fixed-point iteration on `f = (g − f(f·p) − |f|²q)·D(|f|²)`, falling back
/// to Newton steps with a finite-difference Jacobian when the fixed point
/// does not contract.
pub fn invert_brown_conrady(
    target: Vector2<f64>,
    bc: &BrownConradyParams,
) -> Result<Vector2<f64>, ProjectionError> {
    if bc.is_identity() {
        return Ok(target);
    }
    let c = Vector2::new(bc.c1, bc.c2);
    let p = Vector2::new(bc.p1, bc.p2);
    let q = Vector2::new(bc.q1, bc.q2);
    let symmetric = bc.is_axis_symmetric();
    let g = target - c;
    let divisor = |f: Vector2<f64>| {
        let r2 = f.norm_squared();
        let dx = radial_polynomial(&bc.radial_x, r2);
        if symmetric {
            return dx;
        }
        let dy = radial_polynomial(&bc.radial_y, r2);
        if r2 == 0.0 {
            return dx;
        }
        let w = aximorphic_weights(f);
        w.x * dx + w.y * dy
    };
    let residual = |v: Vector2<f64>| apply(v, bc).map(|out| out - target);

    let mut f = g;
    for _ in 0..MAX_FIXED_POINT_ITERATIONS {
        let next = (g - f * f.dot(&p) - q * f.norm_squared()) * divisor(f);
        if !(next.x.is_finite() && next.y.is_finite()) {
            break;
        }
        let step = (next - f).norm();
        f = next;
        if step <= 1e-15 * (1.0 + f.norm()) {
            break;
        }
    }
    if let Ok(r) = residual(f + c) {
        if r.norm() < INVERSE_TOLERANCE {
            return Ok(f + c);
        }
    }

    let mut v = target;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let r = residual(v)?;
        if r.norm() < 1e-14 {
            return Ok(v);
        }
        let h = 1e-7 * (1.0 + v.norm());
        let jx = (residual(v + Vector2::new(h, 0.0))? - residual(v - Vector2::new(h, 0.0))?) / (2.0 * h);
        let jy = (residual(v + Vector2::new(0.0, h))? - residual(v - Vector2::new(0.0, h))?) / (2.0 * h);
        let jac = Matrix2::from_columns(&[jx, jy]);
        let Some(inv) = jac.try_inverse() else { break };
        v -= inv * r;
    }
    match residual(v) {
        Ok(r) if r.norm() < INVERSE_TOLERANCE => Ok(v),
        _ => Err(ProjectionError::NoConvergence(MAX_FIXED_POINT_ITERATIONS + MAX_NEWTON_ITERATIONS)),
    }
}
