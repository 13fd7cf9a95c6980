use std::f64::consts::{PI, TAU};

use super::maps::MapError;

// Slack for degree values that are integral up to conversion round-off.
const DEGREE_SLACK: f64 = 1e-9;

/// Horizontal field of view `Ω`.
///
/// Filenames only carry whole degrees, so every angle also has a *noted*
/// value: the degrees rounded up.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FovAngle {
    omega: f64,
}

impl FovAngle {
    /// `omega` in radians, `0 < omega ≤ 2π`.
    pub fn from_radians(omega: f64) -> Result<Self, MapError> {
        if !(omega.is_finite() && omega > 0.0 && omega <= TAU + 1e-12) {
            return Err(MapError::InvalidFov(omega));
        }
        Ok(Self { omega: omega.min(TAU) })
    }

    pub fn from_degrees(degrees: f64) -> Result<Self, MapError> {
        Self::from_radians(degrees.to_radians())
    }

    /// The exact angle of a whole-degree label as found in filenames.
    pub fn from_noted(degrees: u32) -> Result<Self, MapError> {
        if degrees == 0 || degrees > 360 {
            return Err(MapError::InvalidFov(degrees as f64));
        }
        Ok(Self { omega: degrees as f64 * PI / 180.0 })
    }

    pub fn radians(&self) -> f64 {
        self.omega
    }

    pub fn degrees(&self) -> f64 {
        self.omega.to_degrees()
    }

    /// Whole degrees, rounded up.
    pub fn noted_degrees(&self) -> u32 {
        (self.degrees() - DEGREE_SLACK).ceil().max(1.0) as u32
    }

    /// The angle of the noted label, `≥ self`.
    pub fn noted(&self) -> FovAngle {
        Self { omega: self.noted_degrees() as f64 * PI / 180.0 }
    }

    /// Whether the angle equals its own noted label.
    pub fn is_whole_degrees(&self) -> bool {
        (self.degrees() - self.noted_degrees() as f64).abs() <= DEGREE_SLACK
    }
}
