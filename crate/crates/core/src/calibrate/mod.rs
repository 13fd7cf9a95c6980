//! Fitting projection parameters to measured correspondences between frame
//! positions and incidence directions.
//!
//! The solver is a damped Gauss-Newton (Levenberg-Marquardt) iteration with
//! central-difference Jacobians. Residuals are measured in frame texture
//! coordinates.

mod correspondence;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

pub use correspondence::{
    format_correspondences, parse_correspondences, read_correspondences, Correspondence, CorrespondenceError,
    UNIT_TOLERANCE,
};

use crate::projection::{inverse_model, SphericalDirection};
use crate::types::{frame_texcoord, FovAngle, ParamsDocument, ProjectionParams};

const MIN_SQUEEZE: f64 = 1e-6;
const MIN_OMEGA: f64 = 1e-6;
const MAX_DAMPING: f64 = 1e20;
const RANK_CORRELATION: f64 = 0.9999;
/// Residual RMS below which the seed is accepted without iterating.
pub const EXACT_RMS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("{count} correspondences cannot determine {free} free parameters")]
    TooFewCorrespondences { count: usize, free: usize },
    #[error("the seed parameters are invalid or do not reach every correspondence: {0}")]
    InvalidSeed(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{0}` listed twice or overlapping a tied parameter")]
    DuplicateParameter(String),
}

/// A fittable field of [`ProjectionParams`]. Names follow the params file
/// keys; `k` ties all three profile factors, `k_y` ties top and bottom and
/// `kN` ties the N-th radial coefficient of both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    Omega,
    K,
    KX,
    KY,
    KYTop,
    KYBottom,
    Squeeze,
    C1,
    C2,
    P1,
    P2,
    Q1,
    Q2,
    /// 1-based radial coefficient shared by both axes.
    Radial(usize),
    RadialX(usize),
    RadialY(usize),
}

impl Parameter {
    fn get(self, p: &ProjectionParams) -> f64 {
        let at = |list: &Vec<f64>, n: usize| list.get(n - 1).copied().unwrap_or(0.0);
        match self {
            Parameter::Omega => p.omega.radians(),
            Parameter::K | Parameter::KX => p.k_x,
            Parameter::KY | Parameter::KYTop => p.k_y_top,
            Parameter::KYBottom => p.k_y_bottom,
            Parameter::Squeeze => p.squeeze,
            Parameter::C1 => p.bc.c1,
            Parameter::C2 => p.bc.c2,
            Parameter::P1 => p.bc.p1,
            Parameter::P2 => p.bc.p2,
            Parameter::Q1 => p.bc.q1,
            Parameter::Q2 => p.bc.q2,
            Parameter::Radial(n) | Parameter::RadialX(n) => at(&p.bc.radial_x, n),
            Parameter::RadialY(n) => at(&p.bc.radial_y, n),
        }
    }

    /// Writes `x` after projecting it onto the parameter's box.
    fn set(self, p: &mut ProjectionParams, x: f64) {
        fn put(list: &mut Vec<f64>, n: usize, x: f64) {
            if list.len() < n {
                list.resize(n, 0.0);
            }
            list[n - 1] = x;
        }
        let k = x.clamp(-1.0, 1.0);
        match self {
            Parameter::Omega => {
                p.omega = FovAngle::from_radians(x.clamp(MIN_OMEGA, std::f64::consts::TAU)).expect("clamped into range")
            }
            Parameter::K => (p.k_x, p.k_y_top, p.k_y_bottom) = (k, k, k),
            Parameter::KX => p.k_x = k,
            Parameter::KY => (p.k_y_top, p.k_y_bottom) = (k, k),
            Parameter::KYTop => p.k_y_top = k,
            Parameter::KYBottom => p.k_y_bottom = k,
            Parameter::Squeeze => p.squeeze = x.max(MIN_SQUEEZE),
            Parameter::C1 => p.bc.c1 = x,
            Parameter::C2 => p.bc.c2 = x,
            Parameter::P1 => p.bc.p1 = x,
            Parameter::P2 => p.bc.p2 = x,
            Parameter::Q1 => p.bc.q1 = x,
            Parameter::Q2 => p.bc.q2 = x,
            Parameter::Radial(n) => {
                put(&mut p.bc.radial_x, n, x);
                put(&mut p.bc.radial_y, n, x);
            }
            Parameter::RadialX(n) => put(&mut p.bc.radial_x, n, x),
            Parameter::RadialY(n) => put(&mut p.bc.radial_y, n, x),
        }
    }

    /// Underlying fields written by this parameter, for overlap checks.
    fn fields(self) -> Vec<Parameter> {
        match self {
            Parameter::K => vec![Parameter::KX, Parameter::KYTop, Parameter::KYBottom],
            Parameter::KY => vec![Parameter::KYTop, Parameter::KYBottom],
            Parameter::Radial(n) => vec![Parameter::RadialX(n), Parameter::RadialY(n)],
            other => vec![other],
        }
    }

    /// Value in the units of the params file (degrees for the FOV).
    pub fn display_value(self, p: &ProjectionParams) -> f64 {
        match self {
            Parameter::Omega => p.omega.degrees(),
            other => other.get(p),
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::Omega => f.write_str("omega_deg"),
            Parameter::K => f.write_str("k"),
            Parameter::KX => f.write_str("k_x"),
            Parameter::KY => f.write_str("k_y"),
            Parameter::KYTop => f.write_str("k_y_top"),
            Parameter::KYBottom => f.write_str("k_y_bottom"),
            Parameter::Squeeze => f.write_str("squeeze"),
            Parameter::C1 => f.write_str("c1"),
            Parameter::C2 => f.write_str("c2"),
            Parameter::P1 => f.write_str("p1"),
            Parameter::P2 => f.write_str("p2"),
            Parameter::Q1 => f.write_str("q1"),
            Parameter::Q2 => f.write_str("q2"),
            Parameter::Radial(n) => write!(f, "k{n}"),
            Parameter::RadialX(n) => write!(f, "kx{n}"),
            Parameter::RadialY(n) => write!(f, "ky{n}"),
        }
    }
}

impl FromStr for Parameter {
    type Err = FitError;

    fn from_str(s: &str) -> Result<Self, FitError> {
        let index = |prefix: &str| {
            s.strip_prefix(prefix)
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|n| (1..=64).contains(n))
        };
        Ok(match s {
            "omega" | "omega_deg" => Parameter::Omega,
            "k" => Parameter::K,
            "k_x" => Parameter::KX,
            "k_y" => Parameter::KY,
            "k_y_top" => Parameter::KYTop,
            "k_y_bottom" => Parameter::KYBottom,
            "squeeze" => Parameter::Squeeze,
            "c1" => Parameter::C1,
            "c2" => Parameter::C2,
            "p1" => Parameter::P1,
            "p2" => Parameter::P2,
            "q1" => Parameter::Q1,
            "q2" => Parameter::Q2,
            _ => {
                if let Some(n) = index("kx") {
                    Parameter::RadialX(n)
                } else if let Some(n) = index("ky") {
                    Parameter::RadialY(n)
                } else if let Some(n) = index("k") {
                    Parameter::Radial(n)
                } else {
                    return Err(FitError::UnknownParameter(s.to_string()));
                }
            }
        })
    }
}

/// Parses a comma- or whitespace-separated parameter list.
pub fn parse_parameter_list(text: &str) -> Result<Vec<Parameter>, FitError> {
    text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub free_parameters: Vec<Parameter>,
    pub max_iterations: usize,
    /// Convergence threshold on the relative cost decrease of an accepted step.
    pub tolerance: f64,
    pub damping_init: f64,
}

impl FitConfig {
    pub fn new(free_parameters: Vec<Parameter>) -> Self {
        Self { free_parameters, max_iterations: 200, tolerance: 1e-10, damping_init: 1e-3 }
    }

    fn check(&self, count: usize) -> Result<(), FitError> {
        let mut seen: Vec<Parameter> = Vec::new();
        for p in &self.free_parameters {
            for f in p.fields() {
                if seen.contains(&f) {
                    return Err(FitError::DuplicateParameter(p.to_string()));
                }
                seen.push(f);
            }
        }
        if count < self.free_parameters.len() {
            return Err(FitError::TooFewCorrespondences { count, free: self.free_parameters.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The residual vanished to working precision.
    ExactFit,
    /// An accepted step reduced the cost by less than the tolerance.
    SmallDecrease,
    /// No damping level produced a decrease.
    NoImprovement,
    /// Nothing to fit.
    NoFreeParameters,
    MaxIterations,
}

impl Termination {
    fn as_str(self) -> &'static str {
        match self {
            Termination::ExactFit => "exact-fit",
            Termination::SmallDecrease => "small-decrease",
            Termination::NoImprovement => "no-improvement",
            Termination::NoFreeParameters => "no-free-parameters",
            Termination::MaxIterations => "max-iterations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub params: ProjectionParams,
    pub free_parameters: Vec<Parameter>,
    /// Weighted RMS residual in frame texture units.
    pub rms: f64,
    pub initial_rms: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Cost after every accepted step, starting with the seed.
    pub cost_history: Vec<f64>,
    pub warnings: Vec<String>,
    pub correspondences: usize,
}

impl FitReport {
    /// Flat `key = value` report followed by the fitted parameters.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "converged = {}", self.converged);
        let _ = writeln!(out, "termination = {}", self.termination.as_str());
        let _ = writeln!(out, "iterations = {}", self.iterations);
        let _ = writeln!(out, "correspondences = {}", self.correspondences);
        let _ = writeln!(out, "rms = {:e}", self.rms);
        let _ = writeln!(out, "initial_rms = {:e}", self.initial_rms);
        let free: Vec<String> = self.free_parameters.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "free = {}", free.join(","));
        for w in &self.warnings {
            let _ = writeln!(out, "warning = {w}");
        }
        for p in &self.free_parameters {
            let _ = writeln!(out, "fitted.{p} = {}", p.display_value(&self.params));
        }
        out
    }

    pub fn params_document(&self, description: Option<String>) -> ParamsDocument {
        ParamsDocument { description, params: self.params.clone() }
    }
}

/// Frame texture coordinate at which `params` images `direction`.
pub fn predict(direction: &nalgebra::Vector3<f64>, params: &ProjectionParams) -> Option<(f64, f64)> {
    let v = inverse_model(SphericalDirection::from_vector(direction), params).ok()?;
    let tc = frame_texcoord(v, params.aspect);
    (tc.s.is_finite() && tc.t.is_finite()).then_some((tc.s, tc.t))
}

struct Problem<'a> {
    data: &'a [Correspondence],
    seed: ProjectionParams,
    free: &'a [Parameter],
}

impl Problem<'_> {
    fn params(&self, x: &DVector<f64>) -> ProjectionParams {
        let mut p = self.seed.clone();
        for (param, v) in self.free.iter().zip(x.iter()) {
            param.set(&mut p, *v);
        }
        p
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let p = self.params(x);
        DVector::from_iterator(x.len(), self.free.iter().map(|f| f.get(&p)))
    }

    /// Weighted residual vector, or `None` if the parameters are invalid or
    /// some direction lies outside their field.
    fn residuals(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let p = self.params(x);
        p.validate().ok()?;
        let pairs: Option<Vec<(f64, f64)>> = self
            .data
            .par_iter()
            .map(|c| {
                let (s, t) = predict(&c.direction, &p)?;
                let w = c.weight.sqrt();
                Some((w * (s - c.pixel.s), w * (t - c.pixel.t)))
            })
            .collect();
        let pairs = pairs?;
        Some(DVector::from_iterator(2 * pairs.len(), pairs.into_iter().flat_map(|(a, b)| [a, b])))
    }

    /// Central differences with step `rel_step · max(1, |x_j|)`; one-sided
    /// where a neighbor leaves the valid domain.
    fn jacobian(&self, x: &DVector<f64>, r0: &DVector<f64>, rel_step: f64) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(r0.len(), x.len());
        for j in 0..x.len() {
            let h = rel_step * x[j].abs().max(1.0);
            let shifted = |d: f64| {
                let mut y = x.clone();
                y[j] += d;
                // a step clamped by the box is not a usable difference
                if (self.project(&y)[j] - y[j]).abs() > 0.0 {
                    return None;
                }
                self.residuals(&y)
            };
            let column = match (shifted(h), shifted(-h)) {
                (Some(a), Some(b)) => (a - b) / (2.0 * h),
                (Some(a), None) => (a - r0) / h,
                (None, Some(b)) => (r0 - b) / h,
                (None, None) => continue,
            };
            jac.set_column(j, &column);
        }
        jac
    }
}

fn cost(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

fn rms(cost: f64, total_weight: f64) -> f64 {
    (cost / total_weight).sqrt()
}

fn rank_warnings(jac: &DMatrix<f64>, free: &[Parameter]) -> Vec<String> {
    let mut out = Vec::new();
    let norms: Vec<f64> = jac.column_iter().map(|c| c.norm()).collect();
    for (i, n) in norms.iter().enumerate() {
        if *n == 0.0 {
            out.push(format!("parameter {} has no effect on the residual", free[i]));
        }
    }
    for i in 0..free.len() {
        for j in i + 1..free.len() {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let corr = jac.column(i).dot(&jac.column(j)) / (norms[i] * norms[j]);
            if corr.abs() > RANK_CORRELATION {
                out.push(format!(
                    "parameters {} and {} are nearly degenerate (Jacobian correlation {corr:.6})",
                    free[i], free[j]
                ));
            }
        }
    }
    out
}

/// Fits the free parameters of `seed` to `data`.
///
/// Non-convergence is not an error: the best parameters found are returned
/// with `converged = false`.
pub fn fit(data: &[Correspondence], seed: &ProjectionParams, config: &FitConfig) -> Result<FitReport, FitError> {
    config.check(data.len())?;
    seed.validate().map_err(|e| FitError::InvalidSeed(e.to_string()))?;
    let free = &config.free_parameters;
    let problem = Problem { data, seed: seed.clone(), free };
    let total_weight: f64 = data.iter().map(|c| c.weight).sum();

    let mut x = DVector::from_iterator(free.len(), free.iter().map(|p| p.get(seed)));
    let mut r = problem
        .residuals(&x)
        .ok_or_else(|| FitError::InvalidSeed("a correspondence direction lies outside the seed's field".into()))?;
    let mut c = cost(&r);
    let initial_rms = rms(c, total_weight);
    let mut report = FitReport {
        params: seed.clone(),
        free_parameters: free.clone(),
        rms: initial_rms,
        initial_rms,
        iterations: 0,
        converged: true,
        termination: Termination::ExactFit,
        cost_history: vec![c],
        warnings: Vec::new(),
        correspondences: data.len(),
    };
    if free.is_empty() {
        report.termination = Termination::NoFreeParameters;
        return Ok(report);
    }
    if initial_rms < EXACT_RMS {
        return Ok(report);
    }

    let mut lambda = config.damping_init;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    let mut jac = problem.jacobian(&x, &r, 1e-6);
    report.warnings = rank_warnings(&jac, free);

    'outer: while iterations < config.max_iterations {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        loop {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                let d = jtj[(i, i)];
                a[(i, i)] += lambda * if d > 0.0 { d } else { 1.0 };
            }
            let step = a.cholesky().map(|ch| ch.solve(&(-&grad)));
            if let Some(step) = step {
                let trial = problem.project(&(&x + &step));
                if let Some(r_new) = problem.residuals(&trial) {
                    let c_new = cost(&r_new);
                    if c_new < c {
                        let decrease = (c - c_new) / c;
                        x = trial;
                        r = r_new;
                        c = c_new;
                        report.cost_history.push(c);
                        lambda = (lambda / 10.0).max(1e-15);
                        if rms(c, total_weight) < EXACT_RMS {
                            termination = Termination::ExactFit;
                            break 'outer;
                        }
                        if decrease < config.tolerance {
                            termination = Termination::SmallDecrease;
                            break 'outer;
                        }
                        jac = problem.jacobian(&x, &r, 1e-6);
                        continue 'outer;
                    }
                }
            }
            lambda *= 10.0;
            if lambda > MAX_DAMPING {
                termination = Termination::NoImprovement;
                break 'outer;
            }
        }
    }

    report.params = problem.params(&x);
    report.rms = rms(c, total_weight);
    report.iterations = iterations;
    report.termination = termination;
    report.converged = termination != Termination::MaxIterations;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::forward_model;
    use crate::types::TexCoord;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn fov(d: f64) -> FovAngle {
        FovAngle::from_degrees(d).unwrap()
    }

    /// Correspondences sampled uniformly over the frame through the forward
    /// model.
    fn synthetic(p: &ProjectionParams, n: usize, seed: u64) -> Vec<Correspondence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < n {
            let tc = TexCoord::new(rng.random(), rng.random());
            let v = nalgebra::Vector2::new(2.0 * tc.s - 1.0, (2.0 * tc.t - 1.0) / p.aspect);
            let Ok(d) = forward_model(v, p) else { continue };
            out.push(Correspondence::new(tc, d.to_unit_vector(), 1.0).unwrap());
        }
        out
    }

    fn free(list: &str) -> FitConfig {
        FitConfig::new(parse_parameter_list(list).unwrap())
    }

    #[test]
    fn parameter_names_round_trip() {
        for name in ["omega_deg", "k", "k_x", "k_y", "k_y_top", "k_y_bottom", "squeeze", "c1", "q2", "k1", "kx3", "ky2"] {
            assert_eq!(name.parse::<Parameter>().unwrap().to_string(), name);
        }
        assert_eq!("omega".parse::<Parameter>().unwrap(), Parameter::Omega);
        assert!(matches!("k0".parse::<Parameter>(), Err(FitError::UnknownParameter(_))));
        assert_eq!(parse_parameter_list("k, squeeze omega").unwrap().len(), 3);
    }

    #[test]
    fn seed_at_truth_needs_no_iterations() {
        let p = ProjectionParams::spherical(fov(150.0), -0.4, 1.5).with_squeeze(1.2);
        let data = synthetic(&p, 100, 1);
        let r = fit(&data, &p, &free("omega,k,squeeze")).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.rms < 1e-9);
        assert!(r.converged);
        assert_eq!(r.params, p);
    }

    #[test]
    fn recovers_anamorphic_lens_from_wrong_seed() {
        let truth = ProjectionParams::spherical(fov(170.0), -0.4, 16.0 / 9.0).with_squeeze(1.33);
        let data = synthetic(&truth, 200, 2);
        let seed = ProjectionParams::spherical(fov(150.0), 0.0, 16.0 / 9.0);
        let r = fit(&data, &seed, &free("omega,k,squeeze")).unwrap();
        assert!(r.converged, "{:?}", r.termination);
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(r.params.omega.radians(), truth.omega.radians()) < 1e-4);
        assert!(rel(r.params.k_x, -0.4) < 1e-4);
        assert!(rel(r.params.squeeze, 1.33) < 1e-4);
        assert!(r.rms < 1e-6, "{}", r.rms);
        for w in r.cost_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn recovers_every_lens_family_from_equidistant_seed() {
        for k in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let truth = ProjectionParams::spherical(fov(150.0), k, 1.5);
            let data = synthetic(&truth, 150, 3);
            let seed = ProjectionParams::spherical(fov(140.0), 0.0, 1.5);
            let r = fit(&data, &seed, &free("omega,k")).unwrap();
            // the profile is even in k to first order around 0, so k = 0 is
            // only pinned down to about the square root of the residual
            assert!((r.params.k_x - k).abs() < 1e-4, "k={k}: {}", r.params.k_x);
            assert!((r.params.omega.radians() - truth.omega.radians()).abs() < 1e-6, "k={k}");
        }
    }

    #[test]
    fn frozen_parameters_return_seed() {
        let p = ProjectionParams::spherical(fov(120.0), 0.2, 1.0);
        let data = synthetic(&ProjectionParams::spherical(fov(125.0), 0.1, 1.0), 20, 4);
        let r = fit(&data, &p, &FitConfig::new(vec![])).unwrap();
        assert_eq!(r.params, p);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.termination, Termination::NoFreeParameters);
    }

    #[test]
    fn config_errors() {
        let p = ProjectionParams::spherical(fov(120.0), 0.2, 1.0);
        let data = synthetic(&p, 2, 5);
        assert!(matches!(fit(&data, &p, &free("omega,k,squeeze")), Err(FitError::TooFewCorrespondences { .. })));
        assert!(matches!(fit(&data, &p, &free("k,k_x")), Err(FitError::DuplicateParameter(_))));
    }

    #[test]
    fn jacobian_is_consistent_at_half_step() {
        let truth = ProjectionParams::spherical(fov(160.0), 0.3, 1.5).with_squeeze(1.4);
        let data = synthetic(&truth, 50, 6);
        let seed = ProjectionParams::spherical(fov(150.0), 0.1, 1.5).with_squeeze(1.2);
        let params = parse_parameter_list("omega,k,squeeze").unwrap();
        let problem = Problem { data: &data, seed: seed.clone(), free: &params };
        let x = DVector::from_iterator(3, params.iter().map(|p| p.get(&seed)));
        let r = problem.residuals(&x).unwrap();
        let j1 = problem.jacobian(&x, &r, 1e-6);
        let j2 = problem.jacobian(&x, &r, 5e-7);
        let rel = (&j1 - &j2).norm() / j1.norm();
        assert!(rel < 1e-4, "{rel}");
    }

    #[test]
    fn degenerate_parameters_are_reported() {
        let p = ProjectionParams::spherical(fov(120.0), 0.2, 1.0);
        let data = synthetic(&ProjectionParams::spherical(fov(125.0), 0.1, 1.0), 40, 7);
        // bottom-half data never sees the top profile
        let bottom: Vec<Correspondence> = data.into_iter().filter(|c| c.pixel.t < 0.5).collect();
        let r = fit(&bottom, &p, &free("k_x,k_y_top")).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("k_y_top")), "{:?}", r.warnings);
    }

    #[test]
    fn noisy_recovery_is_stable() {
        let truth = ProjectionParams::spherical(fov(160.0), -0.4, 1.5);
        let seed = ProjectionParams::spherical(fov(150.0), 0.0, 1.5);
        let noise = Normal::new(0.0, 1e-3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..10 {
            let mut data = synthetic(&truth, 200, 100 + trial);
            for c in &mut data {
                c.pixel.s += noise.sample(&mut rng);
                c.pixel.t += noise.sample(&mut rng);
            }
            let r = fit(&data, &seed, &free("omega,k")).unwrap();
            assert!((r.params.k_x + 0.4).abs() < 0.02, "{}", r.params.k_x);
        }
    }

    #[test]
    fn report_lists_fitted_values() {
        let truth = ProjectionParams::spherical(fov(150.0), 0.5, 1.0);
        let data = synthetic(&truth, 60, 9);
        let r = fit(&data, &ProjectionParams::spherical(fov(140.0), 0.0, 1.0), &free("omega,k")).unwrap();
        let text = r.to_kv_string();
        assert!(text.contains("converged = true"));
        let omega: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("fitted.omega_deg = "))
            .unwrap()
            .parse()
            .unwrap();
        assert!((omega - 150.0).abs() < 1e-6, "{text}");
    }
}
