use std::path::Path;

use nalgebra::Vector3;
use thiserror::Error;

use crate::types::TexCoord;

/// Accepted deviation of a direction's length from 1. Text tables rarely
/// carry more than 6 to 7 significant digits.
pub const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CorrespondenceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: direction has length {length}, expected a unit vector")]
    NonUnit { line: usize, length: f64 },
    #[error("line {line}: weight {weight} must be positive")]
    Weight { line: usize, weight: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An observed frame position and the incidence direction it sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub pixel: TexCoord,
    /// Unit vector, x right, y up, z along the optical axis.
    pub direction: Vector3<f64>,
    pub weight: f64,
}

impl Correspondence {
    /// Normalizes `direction`; returns `None` if its length is not within
    /// [`UNIT_TOLERANCE`] of 1 or `weight` is not positive.
    pub fn new(pixel: TexCoord, direction: Vector3<f64>, weight: f64) -> Option<Self> {
        let length = direction.norm();
        if (length - 1.0).abs() > UNIT_TOLERANCE || !(weight > 0.0 && weight.is_finite()) {
            return None;
        }
        Some(Self { pixel, direction: direction / length, weight })
    }
}

/// Parses `s t dir_x dir_y dir_z [weight]` lines. `#` starts a comment.
pub fn parse_correspondences(text: &str) -> Result<Vec<Correspondence>, CorrespondenceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<f64> = body
            .split_whitespace()
            .map(|f| {
                f.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CorrespondenceError::Malformed {
                    line,
                    message: format!("`{f}` is not a finite number"),
                })
            })
            .collect::<Result<_, _>>()?;
        if !(5..=6).contains(&fields.len()) {
            return Err(CorrespondenceError::Malformed {
                line,
                message: format!("expected 5 or 6 fields (s t dir_x dir_y dir_z [weight]), found {}", fields.len()),
            });
        }
        let direction = Vector3::new(fields[2], fields[3], fields[4]);
        let weight = fields.get(5).copied().unwrap_or(1.0);
        if !(weight > 0.0) {
            return Err(CorrespondenceError::Weight { line, weight });
        }
        let c = Correspondence::new(TexCoord::new(fields[0], fields[1]), direction, weight)
            .ok_or(CorrespondenceError::NonUnit { line, length: direction.norm() })?;
        out.push(c);
    }
    Ok(out)
}

pub fn read_correspondences(path: impl AsRef<Path>) -> Result<Vec<Correspondence>, CorrespondenceError> {
    parse_correspondences(&std::fs::read_to_string(path)?)
}

/// One line per correspondence in the format read by
/// [`parse_correspondences`].
pub fn format_correspondences(list: &[Correspondence]) -> String {
    let mut out = String::from("# s t dir_x dir_y dir_z weight\n");
    for c in list {
        let d = c.direction;
        out.push_str(&format!("{} {} {} {} {} {}\n", c.pixel.s, c.pixel.t, d.x, d.y, d.z, c.weight));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_line() {
        let list = parse_correspondences("0.5 0.5 0 0 1").unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(list[0].pixel, TexCoord::CENTER);
        assert_eq!(list[0].direction, Vector3::z());
        assert_eq!(list[0].weight, 1.0);
    }

    #[test]
    fn non_unit_direction() {
        let e = parse_correspondences("# header\n0.5 0.5 0 0 0.9\n").unwrap_err();
        assert!(matches!(e, CorrespondenceError::NonUnit { line: 2, .. }), "{e:?}");
    }

    #[test]
    fn comments_blank_lines_and_weights() {
        let text = "# table\n\n0.1 0.2 0 0.6 0.8 2.5  # trailing\n   \n0.9 0.9 0.6 0 0.8\n";
        let list = parse_correspondences(text).unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list[0].weight, 2.5);
        assert_eq!(list[1].direction, Vector3::new(0.6, 0.0, 0.8));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_correspondences("0.5 0.5 0 0\n"),
            Err(CorrespondenceError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_correspondences("\n0.5 x 0 0 1\n"),
            Err(CorrespondenceError::Malformed { line: 2, .. })
        ));
        assert!(matches!(parse_correspondences("0.5 0.5 0 0 1 0"), Err(CorrespondenceError::Weight { line: 1, .. })));
    }

    #[test]
    fn format_round_trip() {
        let list = parse_correspondences("0.1 0.2 0 0.6 0.8 2.5\n0.5 0.5 0 0 1\n").unwrap();
        assert_eq!(parse_correspondences(&format_correspondences(&list)).unwrap(), list);
    }
}
