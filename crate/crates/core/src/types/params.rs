//! Lens model parameters and their flat `key = value` text form.
//!
//! Recognized keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `omega_deg` | horizontal FOV in degrees (required) |
//! | `aspect` | frame width / height, a number or a ratio such as `16/9` (default 1) |
//! | `k_x`, `k_y_top`, `k_y_bottom` | projection factors in `[-1, 1]` (default 0) |
//! | `k` | shorthand setting all three projection factors |
//! | `k_y` | shorthand setting `k_y_top` and `k_y_bottom` |
//! | `squeeze` | anamorphic squeeze `s > 0` (default 1) |
//! | `c1`, `c2` | Brown-Conrady cardinal offset |
//! | `kx1`, `kx2`, … / `ky1`, `ky2`, … | per-axis radial division coefficients |
//! | `k1`, `k2`, … | shorthand setting `kxN` and `kyN` together |
//! | `p1`, `p2` | decentering |
//! | `q1`, `q2` | thin prism |
//! | `description` | free text used for output filenames |
//!
//! Blank lines and `#` comments are ignored. Later keys override earlier ones.

use std::fmt::Write as _;

use thiserror::Error;

use super::FovAngle;
use crate::projection::{self, ProjectionError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

/// Brown-Conrady division-model coefficients.
///
/// `radial_x` and `radial_y` drive the horizontal and vertical radial
/// polynomials separately; equal lists give the ordinary symmetric model.
/// The all-zero default is the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BrownConradyParams {
    pub c1: f64,
    pub c2: f64,
    pub radial_x: Vec<f64>,
    pub radial_y: Vec<f64>,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl BrownConradyParams {
    /// Symmetric radial coefficients `k1, k2, …` on both axes.
    pub fn radial(coefficients: &[f64]) -> Self {
        Self {
            radial_x: coefficients.to_vec(),
            radial_y: coefficients.to_vec(),
            ..Self::default()
        }
    }

    pub fn is_identity(&self) -> bool {
        let zero = |v: &[f64]| v.iter().all(|c| *c == 0.0);
        self.c1 == 0.0
            && self.c2 == 0.0
            && self.p1 == 0.0
            && self.p2 == 0.0
            && self.q1 == 0.0
            && self.q2 == 0.0
            && zero(&self.radial_x)
            && zero(&self.radial_y)
    }

    pub fn is_axis_symmetric(&self) -> bool {
        let n = self.radial_x.len().max(self.radial_y.len());
        (0..n).all(|i| {
            self.radial_x.get(i).copied().unwrap_or(0.0)
                == self.radial_y.get(i).copied().unwrap_or(0.0)
        })
    }
}

/// A complete synthetic lens model.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionParams {
    pub omega: FovAngle,
    pub k_x: f64,
    pub k_y_top: f64,
    pub k_y_bottom: f64,
    pub squeeze: f64,
    pub bc: BrownConradyParams,
    /// Width over height of the target frame.
    pub aspect: f64,
}

impl ProjectionParams {
    /// Rotationally symmetric lens with a single projection factor `k`.
    pub fn spherical(omega: FovAngle, k: f64, aspect: f64) -> Self {
        Self {
            omega,
            k_x: k,
            k_y_top: k,
            k_y_bottom: k,
            squeeze: 1.0,
            bc: BrownConradyParams::default(),
            aspect,
        }
    }

    pub fn with_squeeze(mut self, squeeze: f64) -> Self {
        self.squeeze = squeeze;
        self
    }

    pub fn with_k_y(mut self, top: f64, bottom: f64) -> Self {
        self.k_y_top = top;
        self.k_y_bottom = bottom;
        self
    }

    pub fn with_brown_conrady(mut self, bc: BrownConradyParams) -> Self {
        self.bc = bc;
        self
    }

    /// True for the degenerate spherical case: one `k`, no squeeze, identity
    /// Brown-Conrady.
    pub fn is_spherical(&self) -> bool {
        self.k_x == self.k_y_top
            && self.k_x == self.k_y_bottom
            && self.squeeze == 1.0
            && self.bc.is_identity()
    }

    /// Checks parameter ranges and that the frame edge `Ω/2` lies inside the
    /// monotone part of every projection profile.
    pub fn validate(&self) -> Result<(), ProjectionError> {
        let bad = |what: String| Err(ProjectionError::InvalidParams(what));
        for (name, k) in [("k_x", self.k_x), ("k_y_top", self.k_y_top), ("k_y_bottom", self.k_y_bottom)]
        {
            if !(-1.0..=1.0).contains(&k) {
                return bad(format!("{name} = {k} outside [-1, 1]"));
            }
            projection::check_normalization(k, self.omega.radians())?;
        }
        if !(self.squeeze.is_finite() && self.squeeze > 0.0) {
            return bad(format!("squeeze = {} must be positive", self.squeeze));
        }
        if !(self.aspect.is_finite() && self.aspect > 0.0) {
            return bad(format!("aspect = {} must be positive", self.aspect));
        }
        let bc = &self.bc;
        let all = [bc.c1, bc.c2, bc.p1, bc.p2, bc.q1, bc.q2];
        if !all.iter().chain(&bc.radial_x).chain(&bc.radial_y).all(|v| v.is_finite()) {
            return bad("non-finite Brown-Conrady coefficient".into());
        }
        Ok(())
    }

    pub fn to_kv_string(&self) -> String {
        ParamsDocument { description: None, params: self.clone() }.to_kv_string()
    }

    pub fn from_kv_str(text: &str) -> Result<Self, ParamsError> {
        ParamsDocument::parse(text).map(|d| d.params)
    }
}

/// Parameters plus the optional free-text description used in filenames.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsDocument {
    pub description: Option<String>,
    pub params: ProjectionParams,
}

fn parse_number(value: &str) -> Option<f64> {
    let v = match value.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => value.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

fn set_coefficient(list: &mut Vec<f64>, index: usize, value: f64) {
    if list.len() < index {
        list.resize(index, 0.0);
    }
    list[index - 1] = value;
}

fn radial_index(key: &str, prefix: &str) -> Option<usize> {
    let digits = key.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|n| *n >= 1 && *n <= 64)
}

impl ParamsDocument {
    pub fn parse(text: &str) -> Result<Self, ParamsError> {
        let mut omega_deg = None;
        let mut description = None;
        let mut p = ProjectionParams::spherical(FovAngle::from_noted(90).unwrap(), 0.0, 1.0);

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ParamsError::Syntax { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            if key == "description" {
                if value.is_empty() {
                    return Err(err("empty description".into()));
                }
                description = Some(value.to_string());
                continue;
            }
            let x = parse_number(value)
                .ok_or_else(|| err(format!("`{key}` needs a finite number, found `{value}`")))?;
            match key {
                "omega_deg" => omega_deg = Some(x),
                "aspect" => p.aspect = x,
                "k" => (p.k_x, p.k_y_top, p.k_y_bottom) = (x, x, x),
                "k_x" => p.k_x = x,
                "k_y" => (p.k_y_top, p.k_y_bottom) = (x, x),
                "k_y_top" => p.k_y_top = x,
                "k_y_bottom" => p.k_y_bottom = x,
                "squeeze" => p.squeeze = x,
                "c1" => p.bc.c1 = x,
                "c2" => p.bc.c2 = x,
                "p1" => p.bc.p1 = x,
                "p2" => p.bc.p2 = x,
                "q1" => p.bc.q1 = x,
                "q2" => p.bc.q2 = x,
                _ => {
                    if let Some(n) = radial_index(key, "kx") {
                        set_coefficient(&mut p.bc.radial_x, n, x);
                    } else if let Some(n) = radial_index(key, "ky") {
                        set_coefficient(&mut p.bc.radial_y, n, x);
                    } else if let Some(n) = radial_index(key, "k") {
                        set_coefficient(&mut p.bc.radial_x, n, x);
                        set_coefficient(&mut p.bc.radial_y, n, x);
                    } else {
                        return Err(err(format!("unknown key `{key}`")));
                    }
                }
            }
        }
        let deg = omega_deg.ok_or(ParamsError::Missing("omega_deg"))?;
        p.omega = FovAngle::from_degrees(deg).map_err(|e| ParamsError::Syntax {
            line: 0,
            message: format!("omega_deg: {e}"),
        })?;
        Ok(Self { description, params: p })
    }

    pub fn to_kv_string(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        if let Some(d) = &self.description {
            let _ = writeln!(out, "description = {d}");
        }
        let _ = writeln!(out, "omega_deg = {}", p.omega.degrees());
        let _ = writeln!(out, "aspect = {}", p.aspect);
        let _ = writeln!(out, "k_x = {}", p.k_x);
        let _ = writeln!(out, "k_y_top = {}", p.k_y_top);
        let _ = writeln!(out, "k_y_bottom = {}", p.k_y_bottom);
        let _ = writeln!(out, "squeeze = {}", p.squeeze);
        let _ = writeln!(out, "c1 = {}", p.bc.c1);
        let _ = writeln!(out, "c2 = {}", p.bc.c2);
        for (i, k) in p.bc.radial_x.iter().enumerate() {
            let _ = writeln!(out, "kx{} = {k}", i + 1);
        }
        for (i, k) in p.bc.radial_y.iter().enumerate() {
            let _ = writeln!(out, "ky{} = {k}", i + 1);
        }
        let _ = writeln!(out, "p1 = {}", p.bc.p1);
        let _ = writeln!(out, "p2 = {}", p.bc.p2);
        let _ = writeln!(out, "q1 = {}", p.bc.q1);
        let _ = writeln!(out, "q2 = {}", p.bc.q2);
        out
    }
}
